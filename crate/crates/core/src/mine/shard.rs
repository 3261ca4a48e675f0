//! Map side of the mining phase: every transaction is cut into one prefix per
//! item, and each prefix is routed to the shard keyed by its last item.

use super::flist::FList;
use super::tree::FpTree;
use crate::error::{Error, Result};
use crate::prep::{Category, ItemId, TargetCounts, Transaction};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShardInstance {
    pub key_item: ItemId,
    /// Strictly increasing in F-list rank, ending at `key_item`.
    pub prefix: Vec<ItemId>,
    pub target: Category,
}

/// Items of `t` kept by `keep` and present in `flist`, in F-list order.
pub(crate) fn ranked_items(t: &Transaction, flist: &FList, keep: &(dyn Fn(ItemId) -> bool + Sync)) -> Vec<ItemId> {
    let mut ranked: Vec<(usize, ItemId)> = t
        .items
        .iter()
        .filter(|&&i| keep(i))
        .filter_map(|&i| flist.rank(i).map(|r| (r, i)))
        .collect();
    ranked.sort_unstable();
    ranked.into_iter().map(|(_, i)| i).collect()
}

/// Emits `(a[j], a[0..=j])` for every position `j` of the F-list ordered
/// transaction, last position first.
pub fn project_transaction(t: &Transaction, flist: &FList) -> Vec<ShardInstance> {
    let sorted = ranked_items(t, flist, &|_| true);
    (0..sorted.len())
        .rev()
        .map(|j| ShardInstance { key_item: sorted[j], prefix: sorted[..=j].to_vec(), target: t.target })
        .collect()
}

/// Reducer side: one local tree per shard key.
pub fn build_local_fptree(key: ItemId, instances: &[ShardInstance]) -> Result<FpTree> {
    let mut tree = FpTree::new();
    for inst in instances {
        let last = inst.prefix.last().copied();
        if inst.key_item != key || last != Some(key) {
            let found = last.unwrap_or(inst.key_item);
            return Err(Error::Routing { expected: key.0, found: found.0 });
        }
        tree.insert(&inst.prefix, TargetCounts::one(inst.target));
    }
    Ok(tree)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mine::flist::{sort_flist, ItemTallies};

    fn flist(order: &[(u32, u64)]) -> FList {
        sort_flist(ItemTallies {
            counts: order.iter().map(|&(i, n)| (ItemId(i), n)).collect(),
            target_totals: Default::default(),
        })
    }

    #[test]
    fn emit_loop() {
        // ranks: 0 -> item 0, 1 -> item 1
        let f = flist(&[(0, 4), (1, 3)]);
        let t = Transaction { items: vec![ItemId(1), ItemId(0)], target: Category::Certified };
        let got = project_transaction(&t, &f);
        assert_eq!(
            got,
            vec![
                ShardInstance { key_item: ItemId(1), prefix: vec![ItemId(0), ItemId(1)], target: Category::Certified },
                ShardInstance { key_item: ItemId(0), prefix: vec![ItemId(0)], target: Category::Certified },
            ]
        );
        let empty = Transaction { items: vec![], target: Category::Certified };
        assert!(project_transaction(&empty, &f).is_empty());
    }

    #[test]
    fn items_outside_flist_are_dropped() {
        let f = flist(&[(3, 1)]);
        let t = Transaction { items: vec![ItemId(2), ItemId(3)], target: Category::OnlyViewed };
        let got = project_transaction(&t, &f);
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].prefix, vec![ItemId(3)]);
    }

    #[test]
    fn misrouted_instance_is_an_error() {
        let inst = ShardInstance { key_item: ItemId(1), prefix: vec![ItemId(0), ItemId(1)], target: Category::Certified };
        assert!(build_local_fptree(ItemId(1), std::slice::from_ref(&inst)).is_ok());
        assert!(matches!(
            build_local_fptree(ItemId(0), &[inst]),
            Err(Error::Routing { expected: 0, found: 1 })
        ));
    }

    #[test]
    fn repeated_single_item_is_one_path() {
        let inst = ShardInstance { key_item: ItemId(0), prefix: vec![ItemId(0)], target: Category::Certified };
        let tree = build_local_fptree(ItemId(0), &vec![inst; 4]).unwrap();
        let root = tree.node(0);
        assert_eq!(root.children.len(), 1);
        assert_eq!(tree.node(root.children[0].1).total, 4);
    }
}
