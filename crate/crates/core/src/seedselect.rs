//! Exact top-k seed selection for a two-opinion campaign.
//!
//! Because `rho^T P^t e` is linear in the seed vector `e`, the objective of a
//! seed set is the sum of its members' individual influences `eps_t(i)`,
//! and seeding `i` with the opinion matching the sign of `eps_t(i)` earns
//! `|eps_t(i)|`. The optimum is therefore the `k` largest `|eps_t(i)|`.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::PartitionVector;
use crate::propagation::{propagate_forward, propagate_reverse, OpinionVector, TransitionMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Opinion {
    /// Promoted in the first target group; seeded as `+1`.
    O1,
    /// Promoted in the second target group; seeded as `-1`.
    O2,
}

impl Opinion {
    pub fn value(self) -> f64 {
        match self {
            Opinion::O1 => 1.0,
            Opinion::O2 => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Opinion::O1 => Opinion::O2,
            Opinion::O2 => Opinion::O1,
        }
    }

    /// Opinion a group member is campaigned with; `None` for untargeted nodes.
    pub fn for_label(label: i8) -> Option<Self> {
        match label {
            1 => Some(Opinion::O1),
            -1 => Some(Opinion::O2),
            _ => None,
        }
    }

    /// `O1` for strictly positive influence, `O2` otherwise.
    pub fn for_influence(eps: f64) -> Self {
        if eps > 0.0 {
            Opinion::O1
        } else {
            Opinion::O2
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Seed {
    pub node: usize,
    pub opinion: Opinion,
    pub score: f64,
}

/// At most `k` distinct seeds, ordered by non-increasing score.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedSet {
    entries: Vec<Seed>,
    k: usize,
}

impl SeedSet {
    /// Sorts `entries` by descending score (stable) and checks that nodes are
    /// distinct and there are no more than `k` of them.
    pub fn new(mut entries: Vec<Seed>, k: usize) -> Result<Self> {
        if entries.len() > k {
            return Err(Error::InvalidSeedSet(format!(
                "{} seeds exceed budget {k}",
                entries.len()
            )));
        }
        let mut seen = HashSet::with_capacity(entries.len());
        for s in &entries {
            if !seen.insert(s.node) {
                return Err(Error::InvalidSeedSet(format!(
                    "node {} listed twice",
                    s.node
                )));
            }
            if s.score.is_nan() {
                return Err(Error::InvalidSeedSet(format!(
                    "node {} has NaN score",
                    s.node
                )));
            }
        }
        entries.sort_by(|a, b| b.score.total_cmp(&a.score));
        Ok(Self { entries, k })
    }

    pub fn empty(k: usize) -> Self {
        Self {
            entries: Vec::new(),
            k,
        }
    }

    /// Every targeted node seeded with its own group's opinion.
    pub fn all_targets(rho: &PartitionVector) -> Self {
        let entries: Vec<Seed> = rho
            .targets()
            .map(|node| Seed {
                node,
                opinion: Opinion::for_label(rho.label(node)).expect("targeted node"),
                score: 0.0,
            })
            .collect();
        let k = entries.len();
        Self { entries, k }
    }

    pub fn entries(&self) -> &[Seed] {
        &self.entries
    }

    pub fn budget(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nodes(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|s| s.node)
    }

    /// Seeds promoting `opinion`.
    pub fn with_opinion(&self, opinion: Opinion) -> impl Iterator<Item = usize> + '_ {
        self.entries
            .iter()
            .filter(move |s| s.opinion == opinion)
            .map(|s| s.node)
    }

    pub fn total_score(&self) -> f64 {
        self.entries.iter().map(|s| s.score).sum()
    }

    pub fn check_nodes(&self, n: usize) -> Result<()> {
        match self.entries.iter().find(|s| s.node >= n) {
            Some(s) => Err(Error::NodeOutOfRange { node: s.node, n }),
            None => Ok(()),
        }
    }

    /// Initial opinion vector: `+1` at O1 seeds, `-1` at O2 seeds, `0` elsewhere.
    pub fn seed_vector(&self, n: usize) -> Result<OpinionVector> {
        self.check_nodes(n)?;
        let mut c0 = vec![0.0; n];
        for s in &self.entries {
            c0[s.node] = s.opinion.value();
        }
        OpinionVector::new(c0)
    }

    pub fn write_json<W: Write>(&self, out: W) -> Result<()> {
        serde_json::to_writer_pretty(out, &self.entries)?;
        Ok(())
    }

    pub fn read_json<R: Read>(input: R) -> Result<Self> {
        let entries: Vec<Seed> = serde_json::from_reader(input)?;
        let k = entries.len();
        Self::new(entries, k)
    }

    /// CSV with header `node,opinion,score`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for s in &self.entries {
            w.serialize(s)?;
        }
        if self.entries.is_empty() {
            w.write_record(["node", "opinion", "score"])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let entries = r
            .deserialize()
            .collect::<std::result::Result<Vec<Seed>, _>>()?;
        let k = entries.len();
        Self::new(entries, k)
    }
}

/// Horizon and budget of a campaign.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CampaignConfig {
    pub t: usize,
    pub k: usize,
}

impl CampaignConfig {
    pub fn new(t: usize, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidConfig("budget k must be at least 1".into()));
        }
        Ok(Self { t, k })
    }

    pub fn check_budget(&self, n: usize) -> Result<()> {
        if self.k > n {
            return Err(Error::BudgetTooLarge {
                k: self.k,
                available: n,
            });
        }
        Ok(())
    }
}

/// Heap entry ordered so that the heap top is the weakest kept seed:
/// smallest score, and among equal scores the largest node id.
#[derive(Debug, Clone, Copy)]
struct Weakest {
    score: f64,
    node: usize,
}

impl PartialEq for Weakest {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Weakest {}

impl PartialOrd for Weakest {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Weakest {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .score
            .total_cmp(&self.score)
            .then(self.node.cmp(&other.node))
    }
}

/// Top-`k` `(node, score)` pairs by descending score, ties to the lower id,
/// using a size-`k` min-heap. Returned in ranked order.
pub fn top_k<I>(scores: I, k: usize) -> Vec<(usize, f64)>
where
    I: IntoIterator<Item = (usize, f64)>,
{
    if k == 0 {
        return Vec::new();
    }
    let mut heap: BinaryHeap<Weakest> = BinaryHeap::with_capacity(k + 1);
    for (node, score) in scores {
        let cand = Weakest { score, node };
        if heap.len() < k {
            heap.push(cand);
        } else if let Some(mut worst) = heap.peek_mut() {
            if cand < *worst {
                *worst = cand;
            }
        }
    }
    // ascending Weakest order is best-first
    heap.into_sorted_vec()
        .into_iter()
        .map(|w| (w.node, w.score))
        .collect()
}

/// Selects the `k` nodes with the largest `|eps_t(i)|` and seeds each with the
/// opinion matching its sign (`O2` when `eps_t(i) <= 0`).
pub fn cosinemax(
    p: &TransitionMatrix,
    rho: &PartitionVector,
    cfg: CampaignConfig,
) -> Result<SeedSet> {
    let n = p.node_count();
    rho.check_len(n)?;
    cfg.check_budget(n)?;
    if !rho.has_targets() {
        return Err(Error::NoTargets);
    }
    let eps = propagate_reverse(p, rho, cfg.t);
    let ranked = top_k(eps.values.iter().map(|e| e.abs()).enumerate(), cfg.k);
    let entries = ranked
        .into_iter()
        .map(|(node, score)| Seed {
            node,
            opinion: Opinion::for_influence(eps.values[node]),
            score,
        })
        .collect();
    Ok(SeedSet { entries, k: cfg.k })
}

/// Simulated effectiveness `rho . C_t` of a seed set.
pub fn simulate_objective(
    p: &TransitionMatrix,
    rho: &PartitionVector,
    seeds: &SeedSet,
    t: usize,
) -> Result<f64> {
    rho.check_len(p.node_count())?;
    let c0 = seeds.seed_vector(p.node_count())?;
    Ok(propagate_forward(p, &c0, t).effectiveness(rho))
}

/// Effectiveness of seeding `node` alone with `opinion`, by forward simulation.
pub fn individual_influence(
    p: &TransitionMatrix,
    rho: &PartitionVector,
    t: usize,
    node: usize,
    opinion: Opinion,
) -> Result<f64> {
    let n = p.node_count();
    rho.check_len(n)?;
    if node >= n {
        return Err(Error::NodeOutOfRange { node, n });
    }
    let mut c0 = vec![0.0; n];
    c0[node] = opinion.value();
    Ok(propagate_forward(p, &OpinionVector::new(c0)?, t).effectiveness(rho))
}

const BRUTE_FORCE_MAX_NODES: usize = 20;
const BRUTE_FORCE_MAX_CANDIDATES: u128 = 1_000_000;

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i as u128 + 1))
}

/// Exhaustive optimum over every size-`k` node subset and every opinion
/// assignment, each evaluated by a full forward simulation.
///
/// Returns the best objective and one seed set attaining it (the first found
/// in lexicographic subset order). Seed scores are the seeds' simulated
/// individual contributions.
pub fn brute_force_best(
    p: &TransitionMatrix,
    rho: &PartitionVector,
    cfg: CampaignConfig,
) -> Result<(f64, SeedSet)> {
    let n = p.node_count();
    rho.check_len(n)?;
    cfg.check_budget(n)?;
    let k = cfg.k;
    if n > BRUTE_FORCE_MAX_NODES {
        return Err(Error::InstanceTooLarge(format!(
            "n = {n} exceeds {BRUTE_FORCE_MAX_NODES}"
        )));
    }
    let work = binomial(n, k) << k;
    if work > BRUTE_FORCE_MAX_CANDIDATES {
        return Err(Error::InstanceTooLarge(format!(
            "C({n},{k}) * 2^{k} = {work} candidate seed sets exceeds {BRUTE_FORCE_MAX_CANDIDATES}"
        )));
    }

    let mut best: Option<(f64, Vec<usize>, u32)> = None;
    let mut subset: Vec<usize> = (0..k).collect();
    let mut c0 = vec![0.0; n];
    loop {
        for mask in 0u32..(1 << k) {
            c0.iter_mut().for_each(|v| *v = 0.0);
            for (bit, &node) in subset.iter().enumerate() {
                c0[node] = if mask >> bit & 1 == 1 { -1.0 } else { 1.0 };
            }
            let value =
                propagate_forward(p, &OpinionVector::new(c0.clone())?, cfg.t).effectiveness(rho);
            if best.as_ref().is_none_or(|b| value > b.0) {
                best = Some((value, subset.clone(), mask));
            }
        }
        // next combination in lexicographic order
        let Some(pos) = (0..k).rev().find(|&i| subset[i] < n - k + i) else {
            break;
        };
        subset[pos] += 1;
        for i in pos + 1..k {
            subset[i] = subset[i - 1] + 1;
        }
    }

    let (value, nodes, mask) = best.expect("at least one candidate");
    let entries = nodes
        .iter()
        .enumerate()
        .map(|(bit, &node)| {
            let opinion = if mask >> bit & 1 == 1 {
                Opinion::O2
            } else {
                Opinion::O1
            };
            individual_influence(p, rho, cfg.t, node, opinion).map(|score| Seed {
                node,
                opinion,
                score,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((value, SeedSet::new(entries, k)?))
}
