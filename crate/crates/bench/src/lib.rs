//! Shared fixtures for the benchmarks.

use cosine_core::{
    build_transition, gen_balanced, gen_random_partition, gen_random_signed, PartitionVector,
    SignedGraph, TransitionMatrix, TwoGroupParams,
};

pub struct Fixture {
    pub graph: SignedGraph,
    pub transition: TransitionMatrix,
    pub rho: PartitionVector,
}

/// Random signed graph with about `avg_degree * n` edges, 20% negative, with
/// half of the nodes targeted.
pub fn random_fixture(n: usize, avg_degree: f64, seed: u64) -> Fixture {
    let p = (avg_degree / (n - 1) as f64).min(1.0);
    let graph = gen_random_signed(n, p, 0.2, seed).expect("valid parameters");
    let rho = gen_random_partition(n, 0.5, seed ^ 0x5eed).expect("valid fraction");
    let transition = build_transition(&graph);
    Fixture {
        graph,
        transition,
        rho,
    }
}

/// Balanced two-group instance with `n` nodes per group.
pub fn balanced_fixture(n: usize, avg_degree: f64, seed: u64) -> Fixture {
    let p = (avg_degree / (2 * n) as f64).min(1.0);
    let params = TwoGroupParams::new(n, n, p, p / 4.0);
    let (graph, rho) = gen_balanced(&params, seed).expect("valid parameters");
    let transition = build_transition(&graph);
    Fixture {
        graph,
        transition,
        rho,
    }
}
