mod common;

use std::collections::BTreeMap;

use common::*;
use covertop_core::network::Realization;
use covertop_core::probability::{enumerate_global_coverage, sample_global_coverage};
use covertop_core::topology::{anchor_coverage, GridLayout};
use covertop_core::*;
use proptest::prelude::*;
use rand::Rng;

/// Full coverage of one choice, checked sample by sample.
fn fully_covered(cfg: &NetworkConfig, layout: &GridLayout, choice: &[usize]) -> bool {
    let pts: Vec<Point2> = cfg.nodes().iter().zip(choice).map(|(n, &c)| n.locations[c]).collect();
    (0..layout.height()).all(|j| {
        (0..layout.width()).all(|i| pts.iter().any(|p| within(*p, layout.point(i, j), cfg.rc())))
    })
}

fn toy_network(r: &mut rand_chacha::ChaCha8Rng) -> NetworkConfig {
    let n = r.random_range(1..=4);
    let k = r.random_range(1..=6);
    let anchors: Vec<(f64, f64)> = (0..n).map(|_| (r.random_range(0.5..3.5), r.random_range(0.5..3.5))).collect();
    config_from_anchors(1.6, r.random_range(0.0..1.0), k, 4.0, &anchors, r.random())
}

#[test]
fn exhaustive_estimate_matches_direct_enumeration() {
    let mut r = rng(3);
    for _ in 0..25 {
        let cfg = toy_network(&mut r);
        let res = cfg.rc() / 4.0;
        let layout = GridLayout::new(&cfg, res).unwrap();
        let full = all_choices(cfg.len(), cfg.k()).filter(|c| fully_covered(&cfg, &layout, c)).count() as u64;
        let est = estimate_global_coverage(&cfg, 10, res, 9).unwrap();
        assert!(est.exhaustive);
        assert_eq!(est.samples, cfg.instance_count().unwrap());
        assert_eq!(est.full_cover_count, full);
        assert_eq!(est, CoverageEstimate { seed: 9, ..enumerate_global_coverage(&cfg, res).unwrap() });
    }
}

#[test]
fn sampled_estimate_is_deterministic_and_close() {
    let cfg = generate_random(6, 8, 1.6, 0.8, Domain::square(4.0), 5).unwrap();
    let res = cfg.rc() / 4.0;
    let exact = enumerate_global_coverage(&cfg, res);
    assert!(matches!(exact, Err(TopologyError::TooManyInstances)));
    let a = sample_global_coverage(&cfg, 400, res, 1).unwrap();
    let b = sample_global_coverage(&cfg, 400, res, 1).unwrap();
    assert_eq!(a, b);
    assert!(!a.exhaustive && a.samples == 400);
    let c = sample_global_coverage(&cfg, 400, res, 2).unwrap();
    assert_ne!(a, c);
    assert!(matches!(sample_global_coverage(&cfg, 0, res, 1), Err(TopologyError::InvalidSampleCount)));
}

#[test]
fn instances_enumerate_every_choice_once() {
    let cfg = generate_random(3, 4, 1.0, 0.5, Domain::square(4.0), 2).unwrap();
    let mut seen = std::collections::BTreeSet::new();
    for i in 0..cfg.instance_count().unwrap() {
        match NetworkInstance::from_index(&cfg, i).realization() {
            Realization::Choice(c) => assert!(seen.insert(c.clone())),
            Realization::Anchors => unreachable!(),
        }
    }
    assert_eq!(seen.len(), 64);
}

fn point_set(max: usize) -> impl Strategy<Value = BTreeMap<NodeId, Point2>> {
    prop::collection::vec((0.0..10.0f64, 0.0..10.0f64), 0..max).prop_map(|v| {
        v.into_iter().enumerate().map(|(i, (x, y))| (NodeId(i as u32), Point2::new(x, y))).collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn interleaving_holds_above_threshold(pts in point_set(30), r in 0.2..4.0f64, slack in 0.0..0.5f64) {
        let ratio = (4.0f64 / 3.0).sqrt() * (1.0 + 1e-9) + slack;
        prop_assert!(check_interleaving(&pts, r, r / ratio));
    }

    #[test]
    fn betti_euler_consistency(pts in point_set(25), r in 0.3..2.5f64) {
        for cx in [build_rips(&pts, r), build_cech(&pts, r)] {
            let b = betti_numbers(&cx).unwrap();
            prop_assert_eq!(b.b0 as i64 - b.b1 as i64 + b.b2 as i64, cx.euler_characteristic());
            prop_assert!(b.b0 <= pts.len());
        }
    }

    #[test]
    fn sparsify_preserves_the_verdict(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.random_range(1..40);
        let cfg = generate_random(n, 2, 2.0, 0.5, Domain::square(r.random_range(6.0..16.0)), seed).unwrap();
        let res = 0.5;
        let before = anchor_coverage(&cfg, res).unwrap();
        let sparse = sparsify(&cfg, res).unwrap();
        let after = anchor_coverage(&sparse, res).unwrap();
        prop_assert_eq!(before.fully_covered, after.fully_covered);
        prop_assert_eq!(before.hole_count, after.hole_count);
        prop_assert_eq!(before.covered_samples, after.covered_samples);
        prop_assert!(sparse.len() <= cfg.len());
        prop_assert!(sparse.nodes().iter().all(|n| cfg.node(n.id) == Some(n)));
    }

    #[test]
    fn hole_verdicts_agree_on_resolvable_instances(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.random_range(2..=15);
        let (rc, h) = (1.0, 0.05);
        let anchors: Vec<(f64, f64)> = (0..n).map(|_| (r.random_range(3.0..7.0), r.random_range(3.0..7.0))).collect();
        let cfg = config_from_anchors(rc, 0.2, 3, 10.0, &anchors, seed);
        let instance = NetworkInstance::sample(&cfg, &mut r);
        let pts: Vec<Point2> = instance.points().into_iter().map(|(_, p)| p).collect();
        prop_assume!(critical_radii(&pts).iter().all(|c| (c - rc).abs() > 1.5 * h));
        let report = grid_cover_oracle(&instance, h).unwrap();
        prop_assume!(report.smallest_hole().is_none_or(|s| s >= 4));
        let cert = certify_instance_coverage(&instance);
        prop_assert_eq!(cert.verdict == CoverageVerdict::HolesPresent, report.hole_count > 0);
    }
}

#[test]
fn interleaving_fails_for_wide_equilateral() {
    let r = 1.0;
    let s = 2.0 * r;
    let tri: BTreeMap<NodeId, Point2> = [(0.0, 0.0), (s, 0.0), (s / 2.0, s * 3f64.sqrt() / 2.0)]
        .into_iter()
        .enumerate()
        .map(|(i, (x, y))| (NodeId(i as u32), Point2::new(x, y)))
        .collect();
    let rips = build_rips(&tri, r);
    let cech = build_cech(&tri, r);
    assert_eq!(rips.triangles.len(), 1);
    assert!(cech.triangles.is_empty());
    assert!(!check_interleaving(&tri, r, r));
}
