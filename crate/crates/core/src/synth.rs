//! Synthetic signed graphs.
//!
//! The two-group generators make the first `n1` ids the first group and the
//! next `n2` ids the second. Edges between distinct nodes are sampled
//! independently; self-loops are never generated. Sampling skips ahead
//! geometrically, so cost is linear in nodes plus emitted edges.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{PartitionVector, SignedGraph};

/// Edge magnitudes are drawn uniformly from `(lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightRange {
    pub lo: f64,
    pub hi: f64,
}

impl Default for WeightRange {
    fn default() -> Self {
        Self { lo: 0.0, hi: 1.0 }
    }
}

impl WeightRange {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && hi > lo) {
            return Err(Error::InvalidParameter(format!(
                "weight range ({lo}, {hi}] must satisfy 0 <= lo < hi"
            )));
        }
        Ok(Self { lo, hi })
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        self.hi - (self.hi - self.lo) * rng.gen::<f64>()
    }
}

/// Parameters shared by the balanced and anti-balanced generators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoGroupParams {
    pub n1: usize,
    pub n2: usize,
    pub p_intra: f64,
    pub p_inter: f64,
    pub weights: WeightRange,
    /// Add the cycle `0 -> 1 -> ... -> n-1 -> 0` where missing.
    pub ensure_strong: bool,
}

impl TwoGroupParams {
    pub fn new(n1: usize, n2: usize, p_intra: f64, p_inter: f64) -> Self {
        Self {
            n1,
            n2,
            p_intra,
            p_inter,
            weights: WeightRange::default(),
            ensure_strong: true,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n1 == 0 || self.n2 == 0 {
            return Err(Error::InvalidParameter(
                "both groups need at least one node".into(),
            ));
        }
        for (name, p) in [("p_intra", self.p_intra), ("p_inter", self.p_inter)] {
            if !(p > 0.0 && p <= 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} = {p} not in (0, 1]"
                )));
            }
        }
        WeightRange::new(self.weights.lo, self.weights.hi).map(|_| ())
    }
}

/// Which sign intra-group edges carry; inter-group edges get the other one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Regime {
    Balanced,
    AntiBalanced,
}

impl Regime {
    fn sign(self, same_group: bool) -> f64 {
        match (self, same_group) {
            (Regime::Balanced, true) | (Regime::AntiBalanced, false) => 1.0,
            _ => -1.0,
        }
    }
}

/// Calls `emit(offset)` for each of `len` slots kept independently with
/// probability `p`, in increasing order.
fn bernoulli_slots<R: Rng, F: FnMut(usize, &mut R)>(len: usize, p: f64, rng: &mut R, mut emit: F) {
    if len == 0 || p <= 0.0 {
        return;
    }
    if p >= 1.0 {
        for i in 0..len {
            emit(i, rng);
        }
        return;
    }
    let log_q = (1.0 - p).ln();
    let mut pos = 0usize;
    loop {
        let u: f64 = rng.gen();
        let skip = ((1.0 - u).ln() / log_q).floor();
        if !skip.is_finite() || skip >= (len - pos) as f64 {
            return;
        }
        pos += skip as usize;
        emit(pos, rng);
        pos += 1;
        if pos >= len {
            return;
        }
    }
}

fn two_group(
    params: &TwoGroupParams,
    regime: Regime,
    rng_seed: u64,
) -> Result<(SignedGraph, PartitionVector)> {
    params.validate()?;
    let TwoGroupParams { n1, n2, .. } = *params;
    let n = n1 + n2;
    let group_of = |i: usize| usize::from(i >= n1);
    let ranges = [0..n1, n1..n];
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut edges = Vec::new();

    for src in 0..n {
        let own = group_of(src);
        let succ = (src + 1) % n;
        let mut has_succ = false;
        for (g, range) in ranges.iter().enumerate() {
            let same = g == own;
            let p = if same { params.p_intra } else { params.p_inter };
            // slots index the range with `src` itself removed
            let len = range.len() - usize::from(same);
            let sign = regime.sign(same);
            bernoulli_slots(len, p, &mut rng, |slot, rng| {
                let mut dst = range.start + slot;
                if same && dst >= src {
                    dst += 1;
                }
                has_succ |= dst == succ;
                edges.push((src, dst, sign * params.weights.sample(rng)));
            });
        }
        if params.ensure_strong && !has_succ {
            let sign = regime.sign(group_of(succ) == own);
            edges.push((src, succ, sign * params.weights.sample(&mut rng)));
        }
    }

    let g = SignedGraph::from_edges(n, edges)?;
    let rho = PartitionVector::from_labels((0..n).map(|i| if i < n1 { 1 } else { -1 }).collect())?;
    Ok((g, rho))
}

/// Positive edges inside each group, negative edges between them.
pub fn gen_balanced(
    params: &TwoGroupParams,
    rng_seed: u64,
) -> Result<(SignedGraph, PartitionVector)> {
    two_group(params, Regime::Balanced, rng_seed)
}

/// Negative edges inside each group, positive edges between them.
pub fn gen_anti_balanced(
    params: &TwoGroupParams,
    rng_seed: u64,
) -> Result<(SignedGraph, PartitionVector)> {
    two_group(params, Regime::AntiBalanced, rng_seed)
}

/// Independent directed edges between distinct nodes with probability
/// `p_edge`, each negative with probability `p_negative`.
pub fn gen_random_signed(
    n: usize,
    p_edge: f64,
    p_negative: f64,
    rng_seed: u64,
) -> Result<SignedGraph> {
    gen_random_signed_with(n, p_edge, p_negative, WeightRange::default(), rng_seed)
}

pub fn gen_random_signed_with(
    n: usize,
    p_edge: f64,
    p_negative: f64,
    weights: WeightRange,
    rng_seed: u64,
) -> Result<SignedGraph> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    for (name, p) in [("p_edge", p_edge), ("p_negative", p_negative)] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!(
                "{name} = {p} not in [0, 1]"
            )));
        }
    }
    let weights = WeightRange::new(weights.lo, weights.hi)?;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut edges = Vec::new();
    for src in 0..n {
        bernoulli_slots(n - 1, p_edge, &mut rng, |slot, rng| {
            let dst = if slot >= src { slot + 1 } else { slot };
            let sign = if rng.gen::<f64>() < p_negative {
                -1.0
            } else {
                1.0
            };
            edges.push((src, dst, sign * weights.sample(rng)));
        });
    }
    SignedGraph::from_edges(n, edges)
}

/// Each node is targeted with probability `target_fraction`, and a targeted
/// node joins either group with equal probability.
pub fn gen_random_partition(
    n: usize,
    target_fraction: f64,
    rng_seed: u64,
) -> Result<PartitionVector> {
    if !(0.0..=1.0).contains(&target_fraction) {
        return Err(Error::InvalidParameter(format!(
            "target fraction {target_fraction} not in [0, 1]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let labels = (0..n)
        .map(|_| {
            if rng.gen::<f64>() < target_fraction {
                if rng.gen::<bool>() {
                    1
                } else {
                    -1
                }
            } else {
                0
            }
        })
        .collect();
    PartitionVector::from_labels(labels)
}
