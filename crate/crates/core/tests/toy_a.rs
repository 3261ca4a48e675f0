//! Six-transaction dataset over two binary attributes, with every expected
//! number tallied by a plain scan before comparing against the engine.

use sdtree_core::mine::{
    build_local_fptree, count_items, mine_course, mine_shard, project_transaction, score, MiningConfig, ShardInstance,
    Workers,
};
use sdtree_core::num::{Exact, Threshold};
use sdtree_core::oracle::{enumerate_subgroups, OracleConfig};
use sdtree_core::postprocess::{cross_course_join, filter_confidence, prune_redundant, RedundancyMode};
use sdtree_core::prep::{Category, CourseDataset, Item, ItemDictionary, ItemId, TargetCounts};

const T: Category = Category::Certified;
const F: Category = Category::OnlyViewed;

struct Toy {
    ds: CourseDataset,
    dict: ItemDictionary,
    gh: ItemId,
    dh: ItemId,
    gl: ItemId,
    dl: ItemId,
}

fn toy() -> Toy {
    let mut dict = ItemDictionary::new();
    // intern in the order g=H < d=H < g=L < d=L
    let gh = dict.intern(Item::new("g", "H"));
    let dh = dict.intern(Item::new("d", "H"));
    let gl = dict.intern(Item::new("g", "L"));
    let dl = dict.intern(Item::new("d", "L"));
    let row = |g: &str, d: &str, c| (vec![Item::new("g", g), Item::new("d", d)], c);
    let rows = vec![row("H", "H", T), row("H", "H", T), row("H", "L", F), row("L", "L", F), row("L", "H", T), row("H", "H", F)];
    let ds = CourseDataset::from_rows("toy-a", rows, &mut dict).unwrap();
    Toy { ds, dict, gh, dh, gl, dl }
}

/// Plain scan: (ant_total, joint with T, joint with F).
fn tally(toy: &Toy, ant: &[ItemId]) -> (u64, u64, u64) {
    let mut out = (0, 0, 0);
    for t in &toy.ds.transactions {
        if ant.iter().all(|i| t.items.contains(i)) {
            out.0 += 1;
            if t.target == T {
                out.1 += 1;
            } else {
                out.2 += 1;
            }
        }
    }
    out
}

fn zero_support() -> MiningConfig {
    MiningConfig {
        min_support_target: Threshold::ZERO,
        min_confidence: Threshold::ZERO,
        max_antecedent: 2,
        targets: vec![T],
        ..Default::default()
    }
}

#[test]
fn flist_frequencies_and_order() {
    let toy = toy();
    assert_eq!(tally(&toy, &[toy.gh]).0, 4);
    assert_eq!(tally(&toy, &[toy.dh]).0, 4);
    assert_eq!(tally(&toy, &[toy.gl]).0, 2);
    assert_eq!(tally(&toy, &[toy.dl]).0, 2);

    for partitions in [1, 7] {
        let f = count_items(&toy.ds, partitions, &Workers::sequential());
        assert_eq!(f.entries, vec![(toy.gh, 4), (toy.dh, 4), (toy.gl, 2), (toy.dl, 2)]);
        assert_eq!(f.target_totals[T], 3);
        assert_eq!(f.target_totals[F], 3);
    }
}

#[test]
fn projection_routes_by_last_item() {
    let toy = toy();
    let f = count_items(&toy.ds, 1, &Workers::sequential());
    let first = project_transaction(&toy.ds.transactions[0], &f);
    assert_eq!(
        first,
        vec![
            ShardInstance { key_item: toy.dh, prefix: vec![toy.gh, toy.dh], target: T },
            ShardInstance { key_item: toy.gh, prefix: vec![toy.gh], target: T },
        ]
    );
    let all: Vec<ShardInstance> = toy.ds.transactions.iter().flat_map(|t| project_transaction(t, &f)).collect();
    assert_eq!(all.iter().filter(|i| i.key_item == toy.dh).count(), 4);
    assert_eq!(all.iter().filter(|i| i.key_item == toy.dl).count(), 2);
}

#[test]
fn shard_tree_for_d_high() {
    let toy = toy();
    let f = count_items(&toy.ds, 1, &Workers::sequential());
    let instances: Vec<ShardInstance> = toy
        .ds
        .transactions
        .iter()
        .flat_map(|t| project_transaction(t, &f))
        .filter(|i| i.key_item == toy.dh)
        .collect();
    let tree = build_local_fptree(toy.dh, &instances).unwrap();
    let root = tree.node(0);
    assert_eq!(root.children.len(), 2);
    let child = |item| tree.node(root.children.iter().find(|(i, _)| *i == item).unwrap().1);

    let g = child(toy.gh);
    assert_eq!((g.total, g.per_target[T], g.per_target[F]), (3, 2, 1));
    assert_eq!(g.children.len(), 1);
    let gd = tree.node(g.children[0].1);
    assert_eq!((gd.item, gd.total, gd.per_target[T], gd.per_target[F]), (Some(toy.dh), 3, 2, 1));

    let d = child(toy.dh);
    assert_eq!((d.total, d.per_target[T], d.per_target[F]), (1, 1, 0));
    for n in tree.nodes() {
        assert_eq!(n.total, n.per_target.total());
    }

    let mut cands = mine_shard(&tree, toy.dh, 3);
    cands.sort_by_key(|c| c.antecedent.len());
    assert_eq!(cands.len(), 2);
    let (n, t, fc) = tally(&toy, &[toy.dh]);
    assert_eq!((n, t, fc), (4, 3, 1));
    assert_eq!(cands[0].antecedent, vec![toy.dh]);
    assert_eq!(cands[0].joint_per_target, TargetCounts([t, 0, fc, 0]));
    let (n, t, fc) = tally(&toy, &[toy.gh, toy.dh]);
    assert_eq!((n, t, fc), (3, 2, 1));
    assert_eq!(cands[1].antecedent, vec![toy.gh, toy.dh]);
    assert_eq!((cands[1].ant_total, cands[1].joint_per_target[T], cands[1].joint_per_target[F]), (n, t, fc));
}

#[test]
fn shard_g_high_has_only_singleton() {
    let toy = toy();
    let f = count_items(&toy.ds, 1, &Workers::sequential());
    let instances: Vec<ShardInstance> = toy
        .ds
        .transactions
        .iter()
        .flat_map(|t| project_transaction(t, &f))
        .filter(|i| i.key_item == toy.gh)
        .collect();
    let tree = build_local_fptree(toy.gh, &instances).unwrap();
    let cands = mine_shard(&tree, toy.gh, 3);
    assert_eq!(cands.len(), 1);
    assert_eq!((cands[0].ant_total, cands[0].joint_per_target[T], cands[0].joint_per_target[F]), (4, 2, 2));
}

#[test]
fn golden_measures() {
    let toy = toy();
    let cfg = zero_support();
    let out = mine_course::<Exact>(&toy.ds, &toy.dict, &cfg, &Workers::sequential()).unwrap();
    let find = |ant: &[ItemId]| out.rules.iter().find(|r| r.antecedent == ant).unwrap();

    let dh = find(&[toy.dh]);
    assert_eq!(dh.support_target, Exact::new(3, 3));
    assert_eq!(dh.confidence, Exact::new(3, 4));

    let pair = find(&[toy.gh, toy.dh]);
    assert_eq!(pair.support_target, Exact::new(2, 3));
    assert_eq!(pair.confidence, Exact::new(2, 3));

    let f = count_items(&toy.ds, 1, &Workers::sequential());
    let cand = sdtree_core::mine::CandidateSubgroup {
        antecedent: vec![toy.dh],
        joint_per_target: TargetCounts([3, 0, 1, 0]),
        ant_total: 4,
    };
    let (s, c): (f64, f64) = score(&cand, T, &f.target_totals).unwrap();
    assert_eq!((s, c), (1.0, 0.75));
}

#[test]
fn mined_rules_equal_exhaustive_enumeration() {
    let toy = toy();
    let out = mine_course::<Exact>(&toy.ds, &toy.dict, &zero_support(), &Workers::sequential()).unwrap();
    let mut expected = vec![
        vec![toy.gh],
        vec![toy.dh],
        vec![toy.gl],
        vec![toy.dl],
        vec![toy.gh, toy.dh],
        vec![toy.gh, toy.dl],
        vec![toy.dh, toy.gl],
        vec![toy.gl, toy.dl],
    ];
    expected.iter_mut().for_each(|a| a.sort());
    expected.sort();
    let got: Vec<Vec<ItemId>> = out.rules.iter().map(|r| r.antecedent.clone()).collect();
    assert_eq!(got, expected);
    for r in &out.rules {
        let (n, t, _) = tally(&toy, &r.antecedent);
        assert_eq!((r.ant_total, r.joint, r.target_total), (n, t, 3));
        assert_eq!(r.confidence, Exact::new(t as i128, n as i128));
    }

    let oracle_cfg = OracleConfig { max_antecedent: 2, targets: vec![T], ..Default::default() };
    let oracle = enumerate_subgroups::<Exact>(&toy.ds, &toy.dict, &oracle_cfg).unwrap();
    assert_eq!(oracle, out.rules);
}

#[test]
fn depth_one_emits_singletons() {
    let toy = toy();
    let cfg = MiningConfig { max_antecedent: 1, ..zero_support() };
    let out = mine_course::<f64>(&toy.ds, &toy.dict, &cfg, &Workers::sequential()).unwrap();
    assert_eq!(out.rules.len(), 4);
    assert!(out.rules.iter().all(|r| r.antecedent.len() == 1));
}

#[test]
fn confidence_filter_and_redundancy() {
    let toy = toy();
    let out = mine_course::<Exact>(&toy.ds, &toy.dict, &zero_support(), &Workers::sequential()).unwrap();

    let strict = filter_confidence(out.rules.clone(), "0.8".parse().unwrap());
    assert!(!strict.iter().any(|r| r.antecedent == vec![toy.dh]));

    let joined = cross_course_join(&[out], 1).unwrap();
    let pruned = prune_redundant(joined, RedundancyMode::MeanConfidence);
    let kept: Vec<&Vec<ItemId>> = pruned.rules.iter().map(|r| &r.antecedent).collect();
    assert!(kept.contains(&&vec![toy.dh]));
    assert!(kept.contains(&&vec![toy.gh]));
    let mut pair = vec![toy.gh, toy.dh];
    pair.sort();
    assert!(!kept.contains(&&pair));
}

#[test]
fn partitions_and_workers_do_not_change_output() {
    let toy = toy();
    let base = mine_course::<Exact>(&toy.ds, &toy.dict, &zero_support(), &Workers::sequential()).unwrap();
    for partitions in [1, 2, 7, 8] {
        for workers in [1, 3] {
            let cfg = MiningConfig { partitions, ..zero_support() };
            let w = Workers::new(workers).unwrap();
            assert_eq!(mine_course::<Exact>(&toy.ds, &toy.dict, &cfg, &w).unwrap(), base);
        }
    }
}

#[test]
fn tree_dump_lists_counters() {
    let toy = toy();
    let cfg = MiningConfig { dump_trees: true, ..zero_support() };
    let out = mine_course::<f64>(&toy.ds, &toy.dict, &cfg, &Workers::sequential()).unwrap();
    let d = out.trees.iter().find(|t| t.key == toy.dh).unwrap();
    assert_eq!(
        d.text,
        "(root) 4 [3 0 1 0]\n  g=H 3 [2 0 1 0]\n    d=H 3 [2 0 1 0]\n  d=H 1 [1 0 0 0]\n"
    );
}
