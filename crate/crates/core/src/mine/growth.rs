//! Recursive conditional mining of one shard tree, and subgroup scoring.

use super::tree::FpTree;
use crate::error::{Error, Result};
use crate::num::Scalar;
use crate::prep::{Category, ItemId, TargetCounts};

/// An antecedent with its exact per-target counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateSubgroup {
    /// Sorted by item id.
    pub antecedent: Vec<ItemId>,
    /// Transactions containing the antecedent, split by target.
    pub joint_per_target: TargetCounts,
    /// Transactions containing the antecedent.
    pub ant_total: u64,
}

impl CandidateSubgroup {
    fn new(items: &[ItemId], counts: TargetCounts) -> Self {
        let mut antecedent = items.to_vec();
        antecedent.sort_unstable();
        CandidateSubgroup { antecedent, joint_per_target: counts, ant_total: counts.total() }
    }
}

/// All itemsets whose last item in F-list order is `key`, up to
/// `max_antecedent` items.
pub fn mine_shard(tree: &FpTree, key: ItemId, max_antecedent: usize) -> Vec<CandidateSubgroup> {
    let mut out = Vec::new();
    if max_antecedent == 0 {
        return out;
    }
    let counts = tree.item_counts(key);
    if counts.total() == 0 {
        return out;
    }
    let mut suffix = vec![key];
    out.push(CandidateSubgroup::new(&suffix, counts));
    if max_antecedent > 1 {
        let cond = FpTree::from_base(&tree.conditional_base(key));
        grow(&cond, &mut suffix, max_antecedent, &mut out);
    }
    out
}

fn grow(tree: &FpTree, suffix: &mut Vec<ItemId>, max_antecedent: usize, out: &mut Vec<CandidateSubgroup>) {
    for item in tree.header_items() {
        let counts = tree.item_counts(item);
        suffix.push(item);
        out.push(CandidateSubgroup::new(suffix, counts));
        if suffix.len() < max_antecedent {
            let base = tree.conditional_base(item);
            if !base.is_empty() {
                grow(&FpTree::from_base(&base), suffix, max_antecedent, out);
            }
        }
        suffix.pop();
    }
}

/// `(support_target, confidence)` of `candidate -> target`.
pub fn score<T: Scalar>(candidate: &CandidateSubgroup, target: Category, target_totals: &TargetCounts) -> Result<(T, T)> {
    let total = target_totals[target];
    if total == 0 {
        return Err(Error::UndefinedMeasure(target));
    }
    if candidate.ant_total == 0 {
        return Err(Error::Config("antecedent covers no transaction".into()));
    }
    let joint = candidate.joint_per_target[target];
    Ok((T::ratio(joint, total), T::ratio(joint, candidate.ant_total)))
}
