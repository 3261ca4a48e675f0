//! Partition-parallel FP-Tree subgroup miner.
//!
//! Per course and per group of targets sharing the same admissible items:
//!
//! 1. count item frequencies over contiguous partitions and merge the tallies,
//! 2. sort them into the F-list,
//! 3. cut every F-list ordered transaction into one prefix per item and route
//!    each prefix to the shard of its last item,
//! 4. build one local tree per shard (nodes carry a counter per target) and
//!    grow it recursively,
//! 5. score every candidate for every target of the group.
//!
//! Shards are independent and mined in any order; the output is sorted at the
//! end, so a single worker and any number of workers give identical results.

mod exec;
mod flist;
mod growth;
mod shard;
mod tree;

use std::collections::{BTreeMap, BTreeSet};

pub use exec::Workers;
pub use flist::{count_items, sort_flist, FList, ItemTallies};
pub use growth::{mine_shard, score, CandidateSubgroup};
pub use shard::{build_local_fptree, project_transaction, ShardInstance};
pub use tree::{FpNode, FpTree, PatternBase, ROOT};

use exec::partition_ranges;
use flist::count_partitioned;
use serde::{Deserialize, Serialize};
use shard::ranked_items;

use crate::error::{Error, Result};
use crate::num::{Scalar, Threshold};
use crate::prep::{Category, CourseDataset, Item, ItemDictionary, ItemId, TargetCounts};

/// Attribute of the raw flag that decides the `Certified` target.
pub const CERTIFIED_ATTRIBUTE: &str = "certified";

/// Attributes kept for `OnlyRegistered`, who never interacted with the course.
pub const DEMOGRAPHIC_ATTRIBUTES: [&str; 4] = ["countryName", "LoE", "age", "gender"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MiningConfig {
    pub min_support_target: Threshold,
    /// Applied in post-processing; carried here so one config describes a run.
    pub min_confidence: Threshold,
    pub max_antecedent: usize,
    pub targets: Vec<Category>,
    /// Targets listed here only see items of the given attributes.
    pub allowlist: BTreeMap<Category, BTreeSet<String>>,
    pub partitions: usize,
    /// Keep an indented dump of every shard tree in the output.
    #[serde(default)]
    pub dump_trees: bool,
}

impl Default for MiningConfig {
    fn default() -> Self {
        MiningConfig {
            min_support_target: Threshold::new(1, 100).expect("valid"),
            min_confidence: Threshold::new(4, 5).expect("valid"),
            max_antecedent: 3,
            targets: Category::ALL.to_vec(),
            allowlist: BTreeMap::new(),
            partitions: 1,
            dump_trees: false,
        }
    }
}

impl MiningConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_antecedent == 0 {
            return Err(Error::Config("max_antecedent must be at least 1".into()));
        }
        if self.partitions == 0 {
            return Err(Error::Config("partitions must be at least 1".into()));
        }
        if self.targets.is_empty() {
            return Err(Error::Config("no targets selected".into()));
        }
        Ok(())
    }

    /// Restricts `OnlyRegistered` to demographic attributes.
    pub fn with_demographic_registered(mut self) -> Self {
        self.allowlist.insert(
            Category::OnlyRegistered,
            DEMOGRAPHIC_ATTRIBUTES.iter().map(|s| s.to_string()).collect(),
        );
        self
    }

    /// Whether `item` may appear in an antecedent for `target`.
    ///
    /// The `certified` flag is a tautology or a contradiction for the
    /// `Certified` target and never admitted there.
    pub fn admits(&self, target: Category, item: &Item) -> bool {
        if target == Category::Certified && item.attribute == CERTIFIED_ATTRIBUTE {
            return false;
        }
        self.allowlist.get(&target).is_none_or(|allowed| allowed.contains(&item.attribute))
    }
}

/// A rule scored on one course.
#[derive(Clone, Debug, PartialEq)]
pub struct CourseRule<T> {
    /// Sorted by item id.
    pub antecedent: Vec<ItemId>,
    pub target: Category,
    /// Transactions with the antecedent and the target.
    pub joint: u64,
    /// Transactions with the antecedent.
    pub ant_total: u64,
    /// Transactions with the target.
    pub target_total: u64,
    pub support_target: T,
    pub confidence: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShardDump {
    pub targets: Vec<Category>,
    pub key: ItemId,
    pub text: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CourseRules<T> {
    pub course_id: String,
    /// Sorted by `(target, antecedent)`.
    pub rules: Vec<CourseRule<T>>,
    /// Targets that could not be mined, with the reason.
    pub skipped: Vec<(Category, String)>,
    pub trees: Vec<ShardDump>,
}

struct Partition {
    rows: Vec<(Vec<ItemId>, Category)>,
    /// Per F-list rank: `(row, prefix length)` of every instance routed there.
    routed: Vec<Vec<(u32, u32)>>,
}

/// Mines one course for every configured target. Rules are kept when their
/// support within the target reaches `min_support_target`; confidence is
/// filtered later.
pub fn mine_course<T: Scalar>(
    dataset: &CourseDataset,
    dict: &ItemDictionary,
    cfg: &MiningConfig,
    workers: &Workers,
) -> Result<CourseRules<T>> {
    cfg.validate()?;
    let targets: BTreeSet<Category> = cfg.targets.iter().copied().collect();

    let mut skipped = Vec::new();
    let mut groups: Vec<(Vec<bool>, Vec<Category>)> = Vec::new();
    for target in targets {
        if dataset.target_totals[target] == 0 {
            let reason = format!("no {target} transactions in {}", dataset.course_id);
            log::warn!("skipping target: {reason}");
            skipped.push((target, reason));
            continue;
        }
        let mask: Vec<bool> = dict.iter().map(|(_, item)| cfg.admits(target, item)).collect();
        match groups.iter_mut().find(|(m, _)| *m == mask) {
            Some((_, members)) => members.push(target),
            None => groups.push((mask, vec![target])),
        }
    }

    let mut rules = Vec::new();
    let mut trees = Vec::new();
    for (mask, members) in &groups {
        let (mut found, dumps) = mine_group::<T>(dataset, dict, mask, members, cfg, workers);
        rules.append(&mut found);
        trees.extend(dumps);
    }
    rules.sort_by(|a, b| (a.target, &a.antecedent).cmp(&(b.target, &b.antecedent)));
    Ok(CourseRules { course_id: dataset.course_id.clone(), rules, skipped, trees })
}

fn mine_group<T: Scalar>(
    dataset: &CourseDataset,
    dict: &ItemDictionary,
    mask: &[bool],
    members: &[Category],
    cfg: &MiningConfig,
    workers: &Workers,
) -> (Vec<CourseRule<T>>, Vec<ShardDump>) {
    let keep = |i: ItemId| mask.get(i.index()).copied().unwrap_or(false);
    let flist = sort_flist(count_partitioned(&dataset.transactions, &keep, cfg.partitions, workers));
    let totals: TargetCounts = flist.target_totals;

    // map: F-list order every transaction and route its prefixes
    let ranges = partition_ranges(dataset.transactions.len(), cfg.partitions);
    let partitions: Vec<Partition> = workers.map(&ranges, |range| {
        let mut part = Partition { rows: Vec::with_capacity(range.len()), routed: vec![Vec::new(); flist.len()] };
        for t in &dataset.transactions[range.clone()] {
            let sorted = ranked_items(t, &flist, &keep);
            let row = part.rows.len() as u32;
            for (j, item) in sorted.iter().enumerate().rev() {
                let rank = flist.rank(*item).expect("ranked items are in the F-list");
                part.routed[rank].push((row, j as u32 + 1));
            }
            part.rows.push((sorted, t.target));
        }
        part
    });

    // reduce: one local tree per shard, mined independently
    let ranks: Vec<usize> = (0..flist.len()).collect();
    let per_shard = workers.map(&ranks, |&rank| {
        let key = flist.item_at(rank);
        let mut tree = FpTree::new();
        for part in &partitions {
            for &(row, len) in &part.routed[rank] {
                let (items, target) = &part.rows[row as usize];
                tree.insert(&items[..len as usize], TargetCounts::one(*target));
            }
        }
        let mut found = Vec::new();
        for cand in mine_shard(&tree, key, cfg.max_antecedent) {
            for &target in members {
                let joint = cand.joint_per_target[target];
                if !cfg.min_support_target.admits(joint, totals[target]) {
                    continue;
                }
                let (support_target, confidence) = score::<T>(&cand, target, &totals)
                    .expect("target totals are non-zero and candidates cover a transaction");
                found.push(CourseRule {
                    antecedent: cand.antecedent.clone(),
                    target,
                    joint,
                    ant_total: cand.ant_total,
                    target_total: totals[target],
                    support_target,
                    confidence,
                });
            }
        }
        let dump = cfg.dump_trees.then(|| ShardDump { targets: members.to_vec(), key, text: tree.dump(Some(dict)) });
        (found, dump)
    });

    let mut rules = Vec::new();
    let mut dumps = Vec::new();
    for (mut found, dump) in per_shard {
        rules.append(&mut found);
        dumps.extend(dump);
    }
    (rules, dumps)
}
