//! Seed selection for two-opinion voter-model campaigns on signed graphs.
//!
//! Opinions spread by the signed voter model: every step, each node copies a
//! random out-neighbour's opinion, inverted across negative edges. Given two
//! disjoint target groups, [`cosinemax`] picks the `k` seeds (and the opinion
//! each one is seeded with) that maximise `rho . C_t`, the net adoption of
//! the first opinion in the first group and the second opinion in the second,
//! in `O(|E| t)` time.
//!
//! ```
//! use cosine_core::{build_transition, cosinemax, simulate_objective, CampaignConfig,
//!     PartitionVector, SignedGraph};
//!
//! let g = SignedGraph::from_edges(3, [(0, 1, 1.0), (0, 2, -1.0), (1, 2, 2.0), (2, 1, 1.0)])?;
//! let p = build_transition(&g);
//! let rho = PartitionVector::from_labels(vec![0, 1, -1])?;
//! let seeds = cosinemax(&p, &rho, CampaignConfig::new(1, 1)?)?;
//! assert_eq!(simulate_objective(&p, &rho, &seeds, 1)?, seeds.total_score());
//! # Ok::<(), cosine_core::Error>(())
//! ```

pub mod baselines;
pub mod error;
pub mod graph;
pub mod metrics;
pub mod montecarlo;
pub mod propagation;
pub mod seedselect;
pub mod synth;

pub use baselines::{degree_seeds, individual_infmax_seeds, random_seeds};
pub use error::{Error, Result};
pub use graph::{
    graph_stats, graph_stats_with_partitions, parse_edge_list, parse_edge_list_remapped,
    parse_edge_list_str, parse_partitions, parse_partitions_remapped, parse_partitions_str,
    write_edge_list, write_partitions, IdMap, PartitionStats, PartitionVector, SignedGraph,
    StatsReport,
};
pub use metrics::{
    all_seed_effectiveness, expected_correct, expected_correct_with, influence_pct,
    trajectory_report, trajectory_report_with, EffectivenessReport, MetricsWriter,
};
pub use montecarlo::{estimate_opinion, Estimate, WalkSampler};
pub use propagation::{
    build_transition, propagate_forward, propagate_forward_with, propagate_reverse, reverse_from,
    write_trajectory_csv, InfluenceScores, OpinionVector, TransitionMatrix,
};
pub use seedselect::{
    brute_force_best, cosinemax, individual_influence, simulate_objective, top_k, CampaignConfig,
    Opinion, Seed, SeedSet,
};
pub use synth::{
    gen_anti_balanced, gen_balanced, gen_random_partition, gen_random_signed,
    gen_random_signed_with, TwoGroupParams, WeightRange,
};
