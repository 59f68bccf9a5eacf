//! Property tests for the invariants of graphs, propagation and selection.

mod common;

use std::collections::BTreeMap;

use cosine_core::{
    build_transition, cosinemax, degree_seeds, individual_influence, individual_infmax_seeds,
    parse_edge_list_str, parse_partitions_str, propagate_forward, propagate_reverse, random_seeds,
    simulate_objective, write_edge_list, write_partitions, CampaignConfig, Opinion, OpinionVector,
    PartitionVector, Seed, SeedSet, SignedGraph, TransitionMatrix,
};
use proptest::prelude::*;

use common::{dense_forward, dense_transition, dot};

const TOL: f64 = 1e-9;

fn weight() -> impl Strategy<Value = f64> {
    (0.05f64..4.0, any::<bool>()).prop_map(|(w, neg)| if neg { -w } else { w })
}

/// Graph on `1..=max_n` nodes with up to `3n` distinct edges.
fn graph(max_n: usize) -> impl Strategy<Value = SignedGraph> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec((0..n, 0..n, weight()), 0..=3 * n).prop_map(move |edges| {
            let unique: BTreeMap<(usize, usize), f64> =
                edges.into_iter().map(|(a, b, w)| ((a, b), w)).collect();
            SignedGraph::from_edges(n, unique.into_iter().map(|((a, b), w)| (a, b, w))).unwrap()
        })
    })
}

fn labels(n: usize) -> impl Strategy<Value = PartitionVector> {
    prop::collection::vec(-1i8..=1, n).prop_map(|l| PartitionVector::from_labels(l).unwrap())
}

fn opinions(n: usize) -> impl Strategy<Value = OpinionVector> {
    prop::collection::vec(-1.0f64..=1.0, n).prop_map(|v| OpinionVector::new(v).unwrap())
}

/// Graph, partition with at least one target, and transition matrix.
fn instance(
    max_n: usize,
) -> impl Strategy<Value = (SignedGraph, PartitionVector, TransitionMatrix)> {
    graph(max_n).prop_flat_map(|g| {
        let n = g.node_count();
        labels(n).prop_map(move |rho| {
            let rho = if rho.has_targets() {
                rho
            } else {
                let mut l = rho.labels().to_vec();
                l[0] = 1;
                PartitionVector::from_labels(l).unwrap()
            };
            let p = build_transition(&g);
            (g.clone(), rho, p)
        })
    })
}

fn seed_set(n: usize, max: usize) -> impl Strategy<Value = SeedSet> {
    prop::sample::subsequence((0..n).collect::<Vec<_>>(), 1..=max.min(n))
        .prop_flat_map(|nodes| {
            let len = nodes.len();
            (Just(nodes), prop::collection::vec(any::<bool>(), len))
        })
        .prop_map(|(nodes, o2)| {
            let k = nodes.len();
            let entries = nodes
                .into_iter()
                .zip(o2)
                .map(|(node, o2)| Seed {
                    node,
                    opinion: if o2 { Opinion::O2 } else { Opinion::O1 },
                    score: 0.0,
                })
                .collect();
            SeedSet::new(entries, k).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn edge_list_round_trip(g in graph(30)) {
        let mut buf = Vec::new();
        write_edge_list(&g, &mut buf).unwrap();
        let back = parse_edge_list_str(std::str::from_utf8(&buf).unwrap());
        if g.edge_count() == 0 {
            prop_assert!(back.is_err());
        } else {
            let back = back.unwrap();
            prop_assert_eq!(back.edges().collect::<Vec<_>>(), g.edges().collect::<Vec<_>>());
        }
    }

    #[test]
    fn partition_round_trip(rho in (1..40usize).prop_flat_map(labels)) {
        let mut buf = Vec::new();
        write_partitions(&rho, &mut buf).unwrap();
        let back = parse_partitions_str(std::str::from_utf8(&buf).unwrap(), rho.len()).unwrap();
        prop_assert_eq!(back, rho);
    }

    #[test]
    fn sign_counts_add_up(g in graph(30)) {
        prop_assert_eq!(g.positive_count() + g.negative_count(), g.edge_count());
        prop_assert_eq!(g.positive_edges().count(), g.positive_count());
    }

    #[test]
    fn transition_rows_are_normalised((g, _rho, p) in instance(20)) {
        let dense = p.to_dense();
        for (i, row) in dense.iter().enumerate() {
            let abs: f64 = row.iter().map(|v| v.abs()).sum();
            prop_assert!((abs - 1.0).abs() < 1e-12, "row {} sums to {}", i, abs);
            prop_assert_eq!(p.is_sink(i), g.is_sink(i));
            if g.is_sink(i) {
                prop_assert_eq!(row[i], 1.0);
            }
        }
    }

    #[test]
    fn opinions_stay_bounded(
        ((_g, _rho, p), c0) in instance(25).prop_flat_map(|inst| {
            let n = inst.0.node_count();
            (Just(inst), opinions(n))
        }),
        t in 0usize..30,
    ) {
        let ct = propagate_forward(&p, &c0, t);
        prop_assert!(ct.sup_norm() <= c0.sup_norm() + 1e-12);
    }

    #[test]
    fn forward_matches_dense_oracle(
        ((g, _rho, p), c0) in instance(15).prop_flat_map(|inst| {
            let n = inst.0.node_count();
            (Just(inst), opinions(n))
        }),
        t in 0usize..12,
    ) {
        let dense = dense_forward(&dense_transition(&g), c0.values(), t);
        for (a, b) in propagate_forward(&p, &c0, t).values().iter().zip(&dense) {
            prop_assert!((a - b).abs() < TOL);
        }
    }

    #[test]
    fn forward_is_linear(
        ((_g, _rho, p), a, b) in instance(20).prop_flat_map(|inst| {
            let n = inst.0.node_count();
            (Just(inst), opinions(n), opinions(n))
        }),
        alpha in -1.0f64..=1.0,
        t in 0usize..15,
    ) {
        // alpha a + (1 - |alpha|) b stays inside [-1, 1]
        let beta = 1.0 - alpha.abs();
        let mix: Vec<f64> = a.values().iter().zip(b.values()).map(|(x, y)| alpha * x + beta * y).collect();
        let lhs = propagate_forward(&p, &OpinionVector::new(mix).unwrap(), t);
        let (fa, fb) = (propagate_forward(&p, &a, t), propagate_forward(&p, &b, t));
        for i in 0..a.len() {
            let rhs = alpha * fa.values()[i] + beta * fb.values()[i];
            prop_assert!((lhs.values()[i] - rhs).abs() < TOL);
        }
    }

    #[test]
    fn duality(
        ((g, rho, p), c0) in instance(30).prop_flat_map(|inst| {
            let n = inst.0.node_count();
            (Just(inst), opinions(n))
        }),
        t in 0usize..20,
    ) {
        let lhs = propagate_forward(&p, &c0, t).effectiveness(&rho);
        let rhs = propagate_reverse(&p, &rho, t).dot(c0.values());
        prop_assert!((lhs - rhs).abs() < TOL);
        let oracle = dot(&rho.as_f64(), &dense_forward(&dense_transition(&g), c0.values(), t));
        prop_assert!((lhs - oracle).abs() < TOL);
    }

    #[test]
    fn objective_is_additive(
        ((_g, rho, p), seeds) in instance(25).prop_flat_map(|inst| {
            let n = inst.0.node_count();
            (Just(inst), seed_set(n, 5))
        }),
        t in 0usize..12,
    ) {
        let total = simulate_objective(&p, &rho, &seeds, t).unwrap();
        let parts: f64 = seeds
            .entries()
            .iter()
            .map(|s| individual_influence(&p, &rho, t, s.node, s.opinion).unwrap())
            .sum();
        prop_assert!((total - parts).abs() < TOL);
    }

    #[test]
    fn flipping_an_opinion_negates_its_influence(
        (_g, rho, p) in instance(20),
        node in any::<prop::sample::Index>(),
        t in 0usize..12,
    ) {
        let node = node.index(rho.len());
        let o1 = individual_influence(&p, &rho, t, node, Opinion::O1).unwrap();
        let o2 = individual_influence(&p, &rho, t, node, Opinion::O2).unwrap();
        prop_assert_eq!(o1, -o2);
    }

    #[test]
    fn cosinemax_score_is_its_objective(
        (_g, rho, p) in instance(30),
        t in 0usize..15,
        k in 1usize..6,
    ) {
        let k = k.min(rho.len());
        let cfg = CampaignConfig::new(t, k).unwrap();
        let seeds = cosinemax(&p, &rho, cfg).unwrap();
        prop_assert_eq!(seeds.len(), k);
        let achieved = simulate_objective(&p, &rho, &seeds, t).unwrap();
        prop_assert!((achieved - seeds.total_score()).abs() < TOL);
        // flipping any single seed's opinion cannot help
        for s in seeds.entries() {
            let own = individual_influence(&p, &rho, t, s.node, s.opinion).unwrap();
            prop_assert!(own >= -TOL);
        }
    }

    #[test]
    fn selection_is_deterministic(
        (g, rho, p) in instance(30),
        t in 0usize..10,
        k in 2usize..5,
        rng_seed in any::<u64>(),
    ) {
        let k = k.min(rho.target_count());
        prop_assume!(k >= 2);
        let cfg = CampaignConfig::new(t, k).unwrap();
        prop_assert_eq!(cosinemax(&p, &rho, cfg).unwrap(), cosinemax(&p, &rho, cfg).unwrap());
        prop_assert_eq!(random_seeds(&rho, cfg, rng_seed).unwrap(), random_seeds(&rho, cfg, rng_seed).unwrap());
        prop_assert_eq!(degree_seeds(&g, &rho, cfg).unwrap(), degree_seeds(&g, &rho, cfg).unwrap());
        prop_assert_eq!(
            individual_infmax_seeds(&p, &rho, cfg).unwrap(),
            individual_infmax_seeds(&p, &rho, cfg).unwrap()
        );
    }

    #[test]
    fn baselines_seed_targets_with_their_own_opinion(
        (g, rho, p) in instance(30),
        t in 0usize..10,
        k in 2usize..6,
        rng_seed in any::<u64>(),
    ) {
        let k = k.min(rho.target_count());
        prop_assume!(k >= 2);
        let cfg = CampaignConfig::new(t, k).unwrap();
        for s in [
            random_seeds(&rho, cfg, rng_seed).unwrap(),
            degree_seeds(&g, &rho, cfg).unwrap(),
            individual_infmax_seeds(&p, &rho, cfg).unwrap(),
        ] {
            prop_assert!(s.len() <= k);
            for e in s.entries() {
                prop_assert_eq!(Some(e.opinion), Opinion::for_label(rho.label(e.node)));
            }
        }
    }

    #[test]
    fn cosinemax_dominates_baselines_in_effectiveness(
        (g, rho, p) in instance(30),
        t in 0usize..10,
        k in 2usize..6,
        rng_seed in any::<u64>(),
    ) {
        let k = k.min(rho.target_count());
        prop_assume!(k >= 2);
        let cfg = CampaignConfig::new(t, k).unwrap();
        let best = simulate_objective(&p, &rho, &cosinemax(&p, &rho, cfg).unwrap(), t).unwrap();
        for s in [
            random_seeds(&rho, cfg, rng_seed).unwrap(),
            degree_seeds(&g, &rho, cfg).unwrap(),
            individual_infmax_seeds(&p, &rho, cfg).unwrap(),
        ] {
            prop_assert!(simulate_objective(&p, &rho, &s, t).unwrap() <= best + TOL);
        }
    }

    #[test]
    fn seed_set_json_round_trip(seeds in (1..30usize).prop_flat_map(|n| seed_set(n, 6))) {
        let mut buf = Vec::new();
        seeds.write_json(&mut buf).unwrap();
        prop_assert_eq!(SeedSet::read_json(buf.as_slice()).unwrap(), seeds.clone());
        let mut buf = Vec::new();
        seeds.write_csv(&mut buf).unwrap();
        let back = SeedSet::read_csv(buf.as_slice()).unwrap();
        prop_assert_eq!(back.entries(), seeds.entries());
    }
}
