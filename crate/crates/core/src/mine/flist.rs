use std::collections::BTreeMap;

use super::exec::{partition_ranges, Workers};
use crate::prep::{CourseDataset, ItemId, TargetCounts, Transaction};

/// Per-item frequencies and per-target totals, before sorting.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ItemTallies {
    pub counts: BTreeMap<ItemId, u64>,
    pub target_totals: TargetCounts,
}

impl ItemTallies {
    /// Associative and commutative merge of two partial tallies.
    pub fn merge(mut self, other: ItemTallies) -> ItemTallies {
        for (item, n) in other.counts {
            *self.counts.entry(item).or_insert(0) += n;
        }
        self.target_totals += other.target_totals;
        self
    }
}

/// Global item frequencies sorted by frequency (descending), ties by id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FList {
    pub entries: Vec<(ItemId, u64)>,
    pub target_totals: TargetCounts,
    rank: Vec<u32>,
}

const NO_RANK: u32 = u32::MAX;

impl FList {
    pub fn rank(&self, item: ItemId) -> Option<usize> {
        match self.rank.get(item.index()) {
            Some(&r) if r != NO_RANK => Some(r as usize),
            _ => None,
        }
    }

    pub fn item_at(&self, rank: usize) -> ItemId {
        self.entries[rank].0
    }

    pub fn frequency(&self, item: ItemId) -> Option<u64> {
        self.rank(item).map(|r| self.entries[r].1)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Counts every item of the dataset over `partitions` contiguous chunks,
/// merging the partial tallies by addition.
pub fn count_items(dataset: &CourseDataset, partitions: usize, workers: &Workers) -> FList {
    sort_flist(count_partitioned(&dataset.transactions, &|_| true, partitions, workers))
}

/// Map side tallies one chunk each; the merge runs in chunk order.
pub(crate) fn count_partitioned(
    transactions: &[Transaction],
    keep: &(dyn Fn(ItemId) -> bool + Sync),
    partitions: usize,
    workers: &Workers,
) -> ItemTallies {
    let ranges = partition_ranges(transactions.len(), partitions);
    let partials = workers.map(&ranges, |range| {
        let mut dense: Vec<u64> = Vec::new();
        let mut totals = TargetCounts::default();
        for t in &transactions[range.clone()] {
            totals[t.target] += 1;
            for &item in &t.items {
                if !keep(item) {
                    continue;
                }
                if item.index() >= dense.len() {
                    dense.resize(item.index() + 1, 0);
                }
                dense[item.index()] += 1;
            }
        }
        let counts = dense
            .into_iter()
            .enumerate()
            .filter(|(_, n)| *n > 0)
            .map(|(i, n)| (ItemId(i as u32), n))
            .collect();
        ItemTallies { counts, target_totals: totals }
    });
    partials.into_iter().fold(ItemTallies::default(), ItemTallies::merge)
}

pub fn sort_flist(tallies: ItemTallies) -> FList {
    let mut entries: Vec<(ItemId, u64)> = tallies.counts.into_iter().filter(|(_, n)| *n > 0).collect();
    entries.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    let max_id = entries.iter().map(|(i, _)| i.index() + 1).max().unwrap_or(0);
    let mut rank = vec![NO_RANK; max_id];
    for (r, (item, _)) in entries.iter().enumerate() {
        rank[item.index()] = r as u32;
    }
    FList { entries, target_totals: tallies.target_totals, rank }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prep::Category;

    fn tallies(pairs: &[(u32, u64)]) -> ItemTallies {
        ItemTallies {
            counts: pairs.iter().map(|&(i, n)| (ItemId(i), n)).collect(),
            target_totals: TargetCounts::default(),
        }
    }

    #[test]
    fn ties_break_by_id() {
        let f = sort_flist(tallies(&[(5, 2), (1, 2), (3, 2)]));
        let ids: Vec<u32> = f.entries.iter().map(|(i, _)| i.0).collect();
        assert_eq!(ids, [1, 3, 5]);
        assert_eq!(f.rank(ItemId(5)), Some(2));
        assert_eq!(f.rank(ItemId(2)), None);
        assert_eq!(f.rank(ItemId(99)), None);
    }

    #[test]
    fn frequency_then_id() {
        let f = sort_flist(tallies(&[(0, 1), (1, 4), (2, 4), (3, 9)]));
        let ids: Vec<u32> = f.entries.iter().map(|(i, _)| i.0).collect();
        assert_eq!(ids, [3, 1, 2, 0]);
        assert_eq!(f.frequency(ItemId(1)), Some(4));
    }

    #[test]
    fn single_and_empty() {
        assert_eq!(sort_flist(tallies(&[(7, 3)])).entries, vec![(ItemId(7), 3)]);
        assert!(sort_flist(tallies(&[])).is_empty());
    }

    #[test]
    fn empty_transactions_still_tally_targets() {
        let tx = vec![
            Transaction { items: vec![], target: Category::OnlyViewed },
            Transaction { items: vec![], target: Category::Certified },
        ];
        let t = count_partitioned(&tx, &|_| true, 3, &Workers::sequential());
        assert!(t.counts.is_empty());
        assert_eq!(t.target_totals.total(), 2);
    }

    #[test]
    fn merge_is_commutative() {
        let a = tallies(&[(0, 1), (2, 3)]);
        let b = tallies(&[(2, 1), (4, 5)]);
        assert_eq!(a.clone().merge(b.clone()), b.merge(a));
    }
}
