//! Random-walk estimator of voter-model opinions.
//!
//! A walk from `u` takes `t` steps, each leaving node `i` along edge `(i, j)`
//! with probability `|A_ij| / sum_l |A_il|`; sinks stay put. If it ends at
//! `v`, the sample is `C_0(v)` times the product of the signs of the edges
//! taken. The sample mean is an unbiased estimate of `C_t(u)`.
//!
//! Walk `w` draws from its own ChaCha stream `w` under the caller's seed, and
//! partial sums are combined in a fixed chunk order, so the result does not
//! depend on how rayon schedules the work.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::graph::SignedGraph;
use crate::propagation::OpinionVector;

const WALKS_PER_CHUNK: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub walks: u64,
}

/// Per-node cumulative absolute out-weights for inverse-CDF edge sampling.
#[derive(Debug, Clone)]
pub struct WalkSampler<'g> {
    graph: &'g SignedGraph,
    cumulative: Vec<f64>,
}

impl<'g> WalkSampler<'g> {
    pub fn new(graph: &'g SignedGraph) -> Self {
        let mut cumulative = Vec::with_capacity(graph.edge_count());
        for i in 0..graph.node_count() {
            let mut acc = 0.0;
            for (_, w) in graph.neighbors(i) {
                acc += w.abs();
                cumulative.push(acc);
            }
        }
        Self { graph, cumulative }
    }

    /// One step from `node`: the next node and the sign of the edge
    /// (`+1` at a sink, which stays).
    fn step<R: Rng>(&self, node: usize, rng: &mut R) -> (usize, f64) {
        let start = self.graph.offsets()[node];
        let end = self.graph.offsets()[node + 1];
        if start == end {
            return (node, 1.0);
        }
        let cum = &self.cumulative[start..end];
        let x = rng.gen::<f64>() * cum[cum.len() - 1];
        // first entry strictly above x
        let k = cum.partition_point(|&c| c <= x).min(cum.len() - 1);
        let j = self.graph.targets()[start + k] as usize;
        let w = self.graph.weights()[start + k];
        (j, w.signum())
    }

    /// Terminal node and path sign of one `t`-step walk from `u`.
    pub fn walk<R: Rng>(&self, u: usize, t: usize, rng: &mut R) -> (usize, f64) {
        let mut node = u;
        let mut sign = 1.0;
        for _ in 0..t {
            let (next, s) = self.step(node, rng);
            node = next;
            sign *= s;
        }
        (node, sign)
    }

    pub fn estimate(
        &self,
        c0: &OpinionVector,
        u: usize,
        t: usize,
        walks: u64,
        rng_seed: u64,
    ) -> Estimate {
        assert!(walks >= 1, "need at least one walk");
        assert_eq!(c0.len(), self.graph.node_count());
        let c0 = c0.values();
        if t == 0 {
            // every walk ends where it starts
            return Estimate {
                mean: c0[u],
                stderr: 0.0,
                walks,
            };
        }
        let chunks = walks.div_ceil(WALKS_PER_CHUNK);
        let partials: Vec<(f64, f64)> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let lo = c * WALKS_PER_CHUNK;
                let hi = (lo + WALKS_PER_CHUNK).min(walks);
                let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
                let (mut sum, mut sq) = (0.0, 0.0);
                for w in lo..hi {
                    rng.set_stream(w);
                    rng.set_word_pos(0);
                    let (v, sign) = self.walk(u, t, &mut rng);
                    let x = sign * c0[v];
                    sum += x;
                    sq += x * x;
                }
                (sum, sq)
            })
            .collect();
        let (sum, sq) = partials
            .into_iter()
            .fold((0.0, 0.0), |(a, b), (s, q)| (a + s, b + q));
        let n = walks as f64;
        let mean = sum / n;
        let stderr = if walks > 1 {
            let var = ((sq - n * mean * mean) / (n - 1.0)).max(0.0);
            (var / n).sqrt()
        } else {
            0.0
        };
        Estimate {
            mean,
            stderr,
            walks,
        }
    }
}

/// Estimates `C_t(u)` from `walks` independent random walks.
pub fn estimate_opinion(
    g: &SignedGraph,
    c0: &OpinionVector,
    u: usize,
    t: usize,
    walks: u64,
    rng_seed: u64,
) -> Estimate {
    WalkSampler::new(g).estimate(c0, u, t, walks, rng_seed)
}
