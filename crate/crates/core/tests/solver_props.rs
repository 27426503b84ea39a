mod common;

use polyembed::geometry::{cross, Point};
use polyembed::model::{Embedding, FreeTree, PointSet};
use polyembed::reduction::{brute_force_3p, build_instance, extract_partition, validate_3p, Partition};
use polyembed::solver::{
    check_general_position, decide_embedding, embed_tree_unconstrained, SolveOutcome, SolverConfig,
};
use polyembed::verifier::{is_valid_embedding, verify_embedding, verify_planar_only};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

#[test]
fn pruning_never_changes_the_verdict() {
    let mut rng = StdRng::seed_from_u64(11);
    let catalog = common::polygon_catalog();
    let plain = SolverConfig {
        prune: false,
        ..SolverConfig::default()
    };
    for case in 0..120 {
        let poly = &catalog[case % catalog.len()];
        let size = rng.gen_range(2..=7);
        let inst = common::random_constrained(&mut rng, poly, size);
        let a = decide_embedding(&inst, &SolverConfig::default()).unwrap();
        let b = decide_embedding(&inst, &plain).unwrap();
        assert_eq!(a.is_embedded(), b.is_embedded(), "case {case}: {}", inst.to_json());
    }
}

#[test]
fn thread_count_keeps_verdict_and_single_thread_is_deterministic() {
    let mut rng = StdRng::seed_from_u64(12);
    let catalog = common::polygon_catalog();
    for case in 0..60 {
        let poly = &catalog[case % catalog.len()];
        let size = rng.gen_range(2..=9);
        let inst = common::random_constrained(&mut rng, poly, size);
        let one = decide_embedding(&inst, &SolverConfig::default()).unwrap();
        let again = decide_embedding(&inst, &SolverConfig::default()).unwrap();
        assert_eq!(one, again);
        let many = decide_embedding(
            &inst,
            &SolverConfig {
                thread_count: 3,
                ..SolverConfig::default()
            },
        )
        .unwrap();
        assert_eq!(one.is_embedded(), many.is_embedded());
        if let SolveOutcome::Embedded(emb) = many {
            assert!(verify_embedding(&inst, &emb).unwrap().valid);
        }
    }
}

#[test]
fn every_root_choice_agrees() {
    let mut rng = StdRng::seed_from_u64(13);
    let catalog = common::polygon_catalog();
    for case in 0..30 {
        let inst = common::random_constrained(&mut rng, &catalog[case % catalog.len()], 6);
        let base = decide_embedding(&inst, &SolverConfig::default()).unwrap().is_embedded();
        for root in 0..6 {
            let cfg = SolverConfig {
                root_node: Some(root),
                ..SolverConfig::default()
            };
            assert_eq!(decide_embedding(&inst, &cfg).unwrap().is_embedded(), base);
        }
    }
}

#[test]
fn short_circuit_check_matches_full_report() {
    let mut rng = StdRng::seed_from_u64(14);
    let catalog = common::polygon_catalog();
    for case in 0..400 {
        let size = rng.gen_range(1..=8);
        let inst = common::random_constrained(&mut rng, &catalog[case % catalog.len()], size);
        let n = inst.tree().node_count();
        let mut mapping: Vec<usize> = (0..n).collect();
        rand::seq::SliceRandom::shuffle(mapping.as_mut_slice(), &mut rng);
        let emb = Embedding::new(mapping);
        let full = verify_embedding(&inst, &emb).unwrap();
        assert_eq!(is_valid_embedding(&inst, &emb).unwrap(), full.valid);
        if full.valid {
            assert!(verify_planar_only(inst.tree(), inst.points(), &emb).unwrap().valid);
        }
    }
}

#[test]
fn hub_on_a_group_point_is_never_valid() {
    // n = 1, B = 7: pin the hub to (1,1) and try every completion.
    let (inst, meta) = build_instance(&validate_3p(7, &[2, 2, 3]).unwrap()).unwrap();
    let hub_point = meta.group_points[0][0];
    let others: Vec<usize> = (0..8).filter(|&p| p != hub_point).collect();
    let mut count = 0;
    permute(&mut others.clone(), 0, &mut |perm| {
        let mut mapping = vec![0; 8];
        mapping[meta.v0_node] = hub_point;
        let rest: Vec<usize> = (0..8).filter(|&v| v != meta.v0_node).collect();
        for (&v, &p) in rest.iter().zip(perm) {
            mapping[v] = p;
        }
        let report = verify_embedding(&inst, &Embedding::new(mapping)).unwrap();
        assert!(!report.valid);
        count += 1;
    });
    assert_eq!(count, 5040);
}

fn permute(items: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
    if k == items.len() {
        f(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, f);
        items.swap(k, i);
    }
}

#[test]
fn extraction_sound_on_small_sweep() {
    for (b, a) in [
        (7u64, vec![2u64, 2, 3]),
        (7, vec![3, 2, 2, 2, 3, 2]),
        (10, vec![3, 3, 4, 4, 3, 3]),
        (13, vec![4, 4, 5, 4, 4, 5]),
        (16, vec![5, 5, 6, 6, 5, 5]),
    ] {
        let tp = validate_3p(b, &a).unwrap();
        let (inst, meta) = build_instance(&tp).unwrap();
        let SolveOutcome::Embedded(emb) = decide_embedding(&inst, &SolverConfig::default()).unwrap() else {
            panic!("B={b} a={a:?} should be feasible");
        };
        let part = extract_partition(&meta, &emb).unwrap();
        assert_eq!(Partition::new(&tp, part.sets.clone()).unwrap(), part);
        assert!(brute_force_3p(&tp).unwrap().is_some());
    }
}

#[test]
fn mutation_swaps_hit_boundary_or_crossing() {
    let tp = validate_3p(7, &[2, 2, 3, 2, 2, 3]).unwrap();
    let (inst, meta) = build_instance(&tp).unwrap();
    let part = brute_force_3p(&tp).unwrap().unwrap();
    let emb = polyembed::reduction::embedding_from_partition(&meta, &part).unwrap();
    for &p in &meta.group_points[0] {
        for &q in &meta.group_points[1] {
            let mut m = emb.clone();
            let u = m.mapping.iter().position(|&x| x == p).unwrap();
            let v = m.mapping.iter().position(|&x| x == q).unwrap();
            m.mapping.swap(u, v);
            let r = verify_embedding(&inst, &m).unwrap();
            use polyembed::verifier::ViolationKind::*;
            assert!(r.has_kind(EdgeHitsBoundary) || r.has_kind(EdgeCrossesEdge), "{p} {q}: {:?}", r);
        }
    }
}

#[test]
fn build_instance_is_deterministic() {
    let tp = validate_3p(13, &[4, 4, 5, 5, 4, 4]).unwrap();
    let (a, ma) = build_instance(&tp).unwrap();
    let (b, mb) = build_instance(&tp).unwrap();
    assert_eq!(a.to_json(), b.to_json());
    assert_eq!(ma.to_json(), mb.to_json());
}

fn brute_collinear(points: &PointSet) -> bool {
    let p = points.points();
    let n = p.len();
    (0..n).any(|i| (i + 1..n).any(|j| (j + 1..n).any(|k| cross(p[i], p[j], p[k]) == 0)))
}

fn point_set(max: usize) -> impl Strategy<Value = PointSet> {
    prop::collection::btree_set((-12i64..12, -12i64..12), 1..max).prop_map(|s| {
        PointSet::new(s.into_iter().map(|(x, y)| Point::new(x, y)).collect()).unwrap()
    })
}

fn tree_of(n: usize, picks: &[usize]) -> FreeTree {
    let edges: Vec<(usize, usize)> = (1..n).map(|i| (picks[i] % i, i)).collect();
    FreeTree::new(n, &edges).unwrap()
}

proptest! {
    #[test]
    fn general_position_matches_triple_scan(points in point_set(9)) {
        let found = check_general_position(&points);
        prop_assert_eq!(found.is_some(), brute_collinear(&points));
        if let Some((i, j, k)) = found {
            let p = points.points();
            prop_assert!(i < j && j < k);
            prop_assert_eq!(cross(p[i], p[j], p[k]), 0);
        }
    }

    #[test]
    fn unconstrained_embeddings_are_planar(seed in any::<u64>(), n in 1usize..30) {
        let mut rng = StdRng::seed_from_u64(seed);
        let points = common::random_general_position(&mut rng, n, 500);
        let picks: Vec<usize> = (0..n).map(|_| rng.gen()).collect();
        let tree = tree_of(n, &picks);
        let emb = embed_tree_unconstrained(&tree, &points).unwrap();
        prop_assert!(emb.is_bijection(n));
        prop_assert!(verify_planar_only(&tree, &points, &emb).unwrap().valid);
        prop_assert!(common::oracle_planar(&tree, &points, &emb.mapping));
    }
}
