//! Brute-force reference used to certify the miner and the post-processor on
//! small instances. Nothing here goes through the FP-Tree code.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use crate::error::{Error, Result};
use crate::mine::CourseRule;
use crate::num::{mean, Scalar, Threshold};
use crate::postprocess::{CourseMeasure, Rule};
use crate::prep::{Category, CourseDataset, Item, ItemDictionary, ItemId};

pub const MAX_ITEMS: usize = 48;
pub const MAX_TRANSACTIONS: usize = 10_000;
pub const MAX_RULES: usize = 10_000;

#[derive(Clone, Debug, PartialEq)]
pub struct OracleConfig {
    pub max_antecedent: usize,
    pub min_support_target: Threshold,
    pub min_confidence: Threshold,
    pub targets: Vec<Category>,
    pub allowlist: BTreeMap<Category, BTreeSet<String>>,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            max_antecedent: 3,
            min_support_target: Threshold::ZERO,
            min_confidence: Threshold::ZERO,
            targets: Category::ALL.to_vec(),
            allowlist: BTreeMap::new(),
        }
    }
}

fn admissible(cfg: &OracleConfig, target: Category, item: &Item) -> bool {
    let excluded = target == Category::Certified && item.attribute == "certified";
    let allowed = match cfg.allowlist.get(&target) {
        Some(set) => set.contains(&item.attribute),
        None => true,
    };
    allowed && !excluded
}

/// Transaction cover of one item as a bitset.
#[derive(Clone)]
struct Cover(Vec<u64>);

impl Cover {
    fn empty(n: usize) -> Self {
        Cover(vec![0; n.div_ceil(64)])
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn and(&self, other: &Cover) -> Cover {
        Cover(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn count(&self) -> u64 {
        self.0.iter().map(|w| w.count_ones() as u64).sum()
    }
}

/// Every combination of 1..=`max_antecedent` items with distinct attributes,
/// counted against the whole dataset, scored by definition and thresholded.
/// Output is sorted by `(target, antecedent)`.
pub fn enumerate_subgroups<T: Scalar>(
    dataset: &CourseDataset,
    dict: &ItemDictionary,
    cfg: &OracleConfig,
) -> Result<Vec<CourseRule<T>>> {
    let n = dataset.transactions.len();
    let items: BTreeSet<ItemId> = dataset.transactions.iter().flat_map(|t| t.items.iter().copied()).collect();
    if items.len() > MAX_ITEMS || n > MAX_TRANSACTIONS {
        return Err(Error::OracleGuard(format!(
            "{} items / {n} transactions exceeds {MAX_ITEMS} / {MAX_TRANSACTIONS}",
            items.len()
        )));
    }

    let mut covers: BTreeMap<ItemId, Cover> = items.iter().map(|&i| (i, Cover::empty(n))).collect();
    let mut by_target: BTreeMap<Category, Cover> = Category::ALL.iter().map(|&c| (c, Cover::empty(n))).collect();
    for (row, t) in dataset.transactions.iter().enumerate() {
        for i in &t.items {
            covers.get_mut(i).expect("collected above").set(row);
        }
        by_target.get_mut(&t.target).expect("all targets").set(row);
    }

    let targets: BTreeSet<Category> = cfg.targets.iter().copied().collect();
    let mut out = Vec::new();
    for target in targets {
        let target_total = by_target[&target].count();
        if target_total == 0 {
            continue;
        }
        let pool: Vec<ItemId> = items.iter().copied().filter(|&i| admissible(cfg, target, dict.get(i))).collect();
        let mut chosen = Vec::new();
        combine(&pool, 0, &mut chosen, None, cfg.max_antecedent, dict, &covers, &mut |ant, cover| {
            let ant_total = cover.count();
            let joint = cover.and(&by_target[&target]).count();
            if cfg.min_support_target.admits(joint, target_total) && cfg.min_confidence.admits(joint, ant_total) {
                out.push(CourseRule {
                    antecedent: ant.to_vec(),
                    target,
                    joint,
                    ant_total,
                    target_total,
                    support_target: T::ratio(joint, target_total),
                    confidence: T::ratio(joint, ant_total),
                });
            }
        });
    }
    out.sort_by(|a, b| (a.target, &a.antecedent).cmp(&(b.target, &b.antecedent)));
    Ok(out)
}

/// Visits combinations in ascending id order. A combination covering no
/// transaction is neither reported nor extended.
#[allow(clippy::too_many_arguments)]
fn combine(
    pool: &[ItemId],
    start: usize,
    chosen: &mut Vec<ItemId>,
    cover: Option<&Cover>,
    max: usize,
    dict: &ItemDictionary,
    covers: &BTreeMap<ItemId, Cover>,
    visit: &mut dyn FnMut(&[ItemId], &Cover),
) {
    if chosen.len() == max {
        return;
    }
    for k in start..pool.len() {
        let item = pool[k];
        let attr = &dict.get(item).attribute;
        if chosen.iter().any(|c| &dict.get(*c).attribute == attr) {
            continue;
        }
        let next = match cover {
            None => covers[&item].clone(),
            Some(c) => c.and(&covers[&item]),
        };
        if next.count() == 0 {
            continue;
        }
        chosen.push(item);
        visit(chosen, &next);
        combine(pool, k + 1, chosen, Some(&next), max, dict, covers, visit);
        chosen.pop();
    }
}

/// Joins per-course rule lists by `(antecedent, target)` and keeps pairs seen
/// in at least `min_courses` courses.
pub fn join_reference<T: Scalar>(per_course: &[(String, Vec<CourseRule<T>>)], min_courses: usize) -> Vec<Rule<T>> {
    let mut keys: BTreeSet<(Category, Vec<ItemId>)> = BTreeSet::new();
    for (_, rules) in per_course {
        keys.extend(rules.iter().map(|r| (r.target, r.antecedent.clone())));
    }
    let mut out = Vec::new();
    for (target, antecedent) in keys {
        let mut courses = BTreeMap::new();
        for (course, rules) in per_course {
            if let Some(r) = rules.iter().find(|r| r.target == target && r.antecedent == antecedent) {
                courses.insert(
                    course.clone(),
                    CourseMeasure {
                        joint: r.joint,
                        ant_total: r.ant_total,
                        target_total: r.target_total,
                        support_target: r.support_target,
                        confidence: r.confidence,
                    },
                );
            }
        }
        if courses.len() >= min_courses {
            out.push(Rule {
                mean_support_target: mean(courses.values().map(|m| m.support_target)),
                mean_confidence: mean(courses.values().map(|m| m.confidence)),
                courses_matched: courses.len(),
                antecedent,
                target,
                per_course: courses,
            });
        }
    }
    out
}

fn is_proper_subset(small: &[ItemId], big: &[ItemId]) -> bool {
    small.len() < big.len() && small.iter().all(|i| big.contains(i))
}

/// All-pairs redundancy removal: a rule goes if any other rule of the same
/// target with a proper-subset antecedent has mean confidence at least as high.
pub fn prune_redundant_reference<T: Scalar>(rules: &[Rule<T>]) -> Result<Vec<Rule<T>>> {
    if rules.len() > MAX_RULES {
        return Err(Error::OracleGuard(format!("{} rules exceeds {MAX_RULES}", rules.len())));
    }
    Ok(rules
        .iter()
        .filter(|r| {
            !rules.iter().any(|g| {
                g.target == r.target
                    && is_proper_subset(&g.antecedent, &r.antecedent)
                    && g.mean_confidence >= r.mean_confidence
            })
        })
        .cloned()
        .collect())
}

/// Tab separated dump of enumerated rules, for golden files.
pub fn write_table<T: Scalar, W: Write>(rules: &[CourseRule<T>], dict: &ItemDictionary, mut sink: W) -> Result<()> {
    writeln!(sink, "antecedent\ttarget\tjoint\tant_total\ttarget_total")?;
    for r in rules {
        let ant: Vec<String> = r.antecedent.iter().map(|&i| dict.get(i).to_string()).collect();
        writeln!(sink, "{}\t{}\t{}\t{}\t{}", ant.join(" AND "), r.target, r.joint, r.ant_total, r.target_total)?;
    }
    Ok(())
}
