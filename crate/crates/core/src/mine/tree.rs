//! Arena FP-Tree whose nodes carry one counter per target.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::prep::{Category, ItemDictionary, ItemId, TargetCounts};

pub const ROOT: usize = 0;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpNode {
    /// `None` only for the root.
    pub item: Option<ItemId>,
    pub total: u64,
    pub per_target: TargetCounts,
    pub parent: Option<usize>,
    /// Sorted by item id.
    pub children: Vec<(ItemId, usize)>,
    /// Next node carrying the same item.
    pub header_next: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct HeaderEntry {
    first: usize,
    last: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpTree {
    nodes: Vec<FpNode>,
    header: BTreeMap<ItemId, HeaderEntry>,
}

/// Prefix paths (root first) of one item's nodes, each with that node's counters.
pub type PatternBase = Vec<(Vec<ItemId>, TargetCounts)>;

impl Default for FpTree {
    fn default() -> Self {
        FpTree::new()
    }
}

impl FpTree {
    pub fn new() -> Self {
        FpTree {
            nodes: vec![FpNode {
                item: None,
                total: 0,
                per_target: TargetCounts::default(),
                parent: None,
                children: Vec::new(),
                header_next: None,
            }],
            header: BTreeMap::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.len() == 1
    }

    pub fn nodes(&self) -> &[FpNode] {
        &self.nodes
    }

    pub fn node(&self, idx: usize) -> &FpNode {
        &self.nodes[idx]
    }

    /// Adds `counts` along `path`, creating nodes where the prefix diverges.
    /// The path must already be in the tree's item order.
    pub fn insert(&mut self, path: &[ItemId], counts: TargetCounts) {
        let add = counts.total();
        let mut cur = ROOT;
        self.nodes[ROOT].total += add;
        self.nodes[ROOT].per_target += counts;
        for &item in path {
            let next = match self.nodes[cur].children.binary_search_by_key(&item, |c| c.0) {
                Ok(pos) => self.nodes[cur].children[pos].1,
                Err(pos) => {
                    let idx = self.nodes.len();
                    self.nodes.push(FpNode {
                        item: Some(item),
                        total: 0,
                        per_target: TargetCounts::default(),
                        parent: Some(cur),
                        children: Vec::new(),
                        header_next: None,
                    });
                    self.nodes[cur].children.insert(pos, (item, idx));
                    match self.header.get_mut(&item) {
                        Some(h) => {
                            self.nodes[h.last].header_next = Some(idx);
                            h.last = idx;
                        }
                        None => {
                            self.header.insert(item, HeaderEntry { first: idx, last: idx });
                        }
                    }
                    idx
                }
            };
            let node = &mut self.nodes[next];
            node.total += add;
            node.per_target += counts;
            cur = next;
        }
    }

    /// Items that have at least one node, ascending by id.
    pub fn header_items(&self) -> impl Iterator<Item = ItemId> + '_ {
        self.header.keys().copied()
    }

    /// Nodes of `item` in header-chain order.
    pub fn chain(&self, item: ItemId) -> impl Iterator<Item = (usize, &FpNode)> + '_ {
        let mut next = self.header.get(&item).map(|h| h.first);
        std::iter::from_fn(move || {
            let idx = next?;
            let node = &self.nodes[idx];
            next = node.header_next;
            Some((idx, node))
        })
    }

    /// Per-target counts of transactions containing `item` (sum over its chain).
    pub fn item_counts(&self, item: ItemId) -> TargetCounts {
        self.chain(item).fold(TargetCounts::default(), |acc, (_, n)| acc + n.per_target)
    }

    pub fn conditional_base(&self, item: ItemId) -> PatternBase {
        self.chain(item)
            .filter_map(|(_, node)| {
                let mut path = Vec::new();
                let mut cur = node.parent;
                while let Some(idx) = cur {
                    if let Some(it) = self.nodes[idx].item {
                        path.push(it);
                    }
                    cur = self.nodes[idx].parent;
                }
                path.reverse();
                (!path.is_empty()).then_some((path, node.per_target))
            })
            .collect()
    }

    pub fn from_base(base: &PatternBase) -> FpTree {
        let mut tree = FpTree::new();
        for (path, counts) in base {
            tree.insert(path, *counts);
        }
        tree
    }

    /// Indented text form, one node per line: `item total [C E V R]`.
    pub fn dump(&self, dict: Option<&ItemDictionary>) -> String {
        let mut out = String::new();
        self.dump_node(ROOT, 0, dict, &mut out);
        out
    }

    fn dump_node(&self, idx: usize, depth: usize, dict: Option<&ItemDictionary>, out: &mut String) {
        let node = &self.nodes[idx];
        let name = match (node.item, dict) {
            (None, _) => "(root)".to_string(),
            (Some(i), Some(d)) => d.get(i).to_string(),
            (Some(i), None) => i.to_string(),
        };
        let counts: Vec<String> = Category::ALL.iter().map(|&c| node.per_target[c].to_string()).collect();
        let _ = writeln!(out, "{:indent$}{} {} [{}]", "", name, node.total, counts.join(" "), indent = depth * 2);
        for &(_, child) in &node.children {
            self.dump_node(child, depth + 1, dict, out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(v: &[u32]) -> Vec<ItemId> {
        v.iter().map(|&i| ItemId(i)).collect()
    }

    #[test]
    fn shared_prefixes_merge() {
        let mut t = FpTree::new();
        t.insert(&ids(&[1, 2, 3]), TargetCounts::one(Category::Certified));
        t.insert(&ids(&[1, 2]), TargetCounts::one(Category::OnlyViewed));
        t.insert(&ids(&[2, 3]), TargetCounts::one(Category::Certified));
        assert_eq!(t.nodes().len(), 6);
        assert_eq!(t.item_counts(ItemId(2)).total(), 3);
        assert_eq!(t.item_counts(ItemId(3))[Category::Certified], 2);
        assert_eq!(t.chain(ItemId(2)).count(), 2);
        for n in t.nodes() {
            assert_eq!(n.total, n.per_target.total());
            let kids: u64 = n.children.iter().map(|&(_, c)| t.node(c).total).sum();
            assert!(kids <= n.total);
        }
    }

    #[test]
    fn conditional_base_paths_are_root_first() {
        let mut t = FpTree::new();
        t.insert(&ids(&[1, 2, 3]), TargetCounts::one(Category::Certified));
        t.insert(&ids(&[2, 3]), TargetCounts::one(Category::OnlyRegistered));
        let base = t.conditional_base(ItemId(3));
        assert_eq!(
            base,
            vec![
                (ids(&[1, 2]), TargetCounts::one(Category::Certified)),
                (ids(&[2]), TargetCounts::one(Category::OnlyRegistered)),
            ]
        );
        let cond = FpTree::from_base(&base);
        assert_eq!(cond.item_counts(ItemId(2)).total(), 2);
        assert!(t.conditional_base(ItemId(1)).is_empty());
    }

    #[test]
    fn dump_is_indented() {
        let mut t = FpTree::new();
        t.insert(&ids(&[4, 5]), TargetCounts::one(Category::OnlyExplored));
        assert_eq!(t.dump(None), "(root) 1 [0 1 0 0]\n  4 1 [0 1 0 0]\n    5 1 [0 1 0 0]\n");
    }
}
