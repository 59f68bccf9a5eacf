//! Test-only oracles, independent of the sparse propagation code.
#![allow(dead_code)]

use cosine_core::{gen_random_partition, gen_random_signed, PartitionVector, SignedGraph};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Dense `D^-1 A` built straight from the edge list; sink rows are identity.
pub fn dense_transition(g: &SignedGraph) -> Vec<Vec<f64>> {
    let n = g.node_count();
    let mut m = vec![vec![0.0; n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        let edges: Vec<(usize, f64)> = g.neighbors(i).collect();
        if edges.is_empty() {
            row[i] = 1.0;
            continue;
        }
        let denom: f64 = edges.iter().map(|e| e.1.abs()).sum();
        for (j, w) in edges {
            row[j] = w / denom;
        }
    }
    m
}

/// `P^t c` by repeated dense products.
pub fn dense_forward(p: &[Vec<f64>], c: &[f64], t: usize) -> Vec<f64> {
    let mut cur = c.to_vec();
    for _ in 0..t {
        cur = p
            .iter()
            .map(|row| row.iter().zip(&cur).map(|(a, b)| a * b).sum())
            .collect();
    }
    cur
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Both forward and backward reachability from node 0 cover the graph.
pub fn strongly_connected(g: &SignedGraph) -> bool {
    let n = g.node_count();
    let mut fwd = vec![Vec::new(); n];
    let mut rev = vec![Vec::new(); n];
    for (i, j, _) in g.edges() {
        fwd[i].push(j);
        rev[j].push(i);
    }
    let covers = |adj: &Vec<Vec<usize>>| {
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen.iter().all(|&s| s)
    };
    covers(&fwd) && covers(&rev)
}

/// Random signed instance with at least one target. When `force_sink` is
/// set the last node's out-edges are dropped.
pub fn random_instance(
    n: usize,
    p_edge: f64,
    seed: u64,
    force_sink: bool,
) -> (SignedGraph, PartitionVector) {
    let g = gen_random_signed(n, p_edge, 0.4, seed).unwrap();
    let g = if force_sink {
        SignedGraph::from_edges(n, g.edges().filter(|e| e.0 != n - 1)).unwrap()
    } else {
        g
    };
    let mut labels = gen_random_partition(n, 0.7, seed.wrapping_mul(31).wrapping_add(7))
        .unwrap()
        .labels()
        .to_vec();
    if labels.iter().all(|&l| l == 0) {
        labels[0] = 1;
    }
    (g, PartitionVector::from_labels(labels).unwrap())
}

pub fn random_opinions<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect()
}
