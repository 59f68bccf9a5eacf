//! Comparison strategies: uniform random, highest out-degree, and a
//! two-stage single-opinion influence maximiser.
//!
//! All draw candidates from the targeted nodes only and seed each node with
//! its own group's opinion.

use std::collections::HashSet;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{PartitionVector, SignedGraph};
use crate::propagation::{propagate_reverse, TransitionMatrix};
use crate::seedselect::{top_k, CampaignConfig, Opinion, Seed, SeedSet};

fn member_seed(rho: &PartitionVector, node: usize, score: f64) -> Seed {
    Seed {
        node,
        opinion: Opinion::for_label(rho.label(node)).expect("candidate is targeted"),
        score,
    }
}

/// `k` distinct targets drawn uniformly without replacement. Scores are 0 and
/// entries keep draw order.
pub fn random_seeds(rho: &PartitionVector, cfg: CampaignConfig, rng_seed: u64) -> Result<SeedSet> {
    cfg.check_budget(rho.len())?;
    let targets: Vec<usize> = rho.targets().collect();
    if targets.len() < cfg.k {
        return Err(Error::BudgetTooLarge {
            k: cfg.k,
            available: targets.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let entries = index::sample(&mut rng, targets.len(), cfg.k)
        .into_iter()
        .map(|i| member_seed(rho, targets[i], 0.0))
        .collect();
    SeedSet::new(entries, cfg.k)
}

/// Targets with the highest out-degree; ties go to the lower id. The score is
/// the out-degree.
pub fn degree_seeds(
    g: &SignedGraph,
    rho: &PartitionVector,
    cfg: CampaignConfig,
) -> Result<SeedSet> {
    let n = g.node_count();
    rho.check_len(n)?;
    cfg.check_budget(n)?;
    let ranked = top_k(rho.targets().map(|i| (i, g.out_degree(i) as f64)), cfg.k);
    let entries = ranked
        .into_iter()
        .map(|(node, deg)| member_seed(rho, node, deg))
        .collect();
    SeedSet::new(entries, cfg.k)
}

/// Two independent single-opinion campaigns of `floor(k/2)` seeds each.
///
/// Stage one ranks targets by their influence on the first group alone
/// (reverse propagation of the first group's indicator). Stage two ranks the
/// remaining targets by how strongly they push the second group towards `O2`,
/// i.e. by `-eps` under the second group's `-1` indicator. Odd `k` leaves one
/// slot unused.
pub fn individual_infmax_seeds(
    p: &TransitionMatrix,
    rho: &PartitionVector,
    cfg: CampaignConfig,
) -> Result<SeedSet> {
    let n = p.node_count();
    rho.check_len(n)?;
    cfg.check_budget(n)?;
    if cfg.k < 2 {
        return Err(Error::InvalidConfig(
            "individual influence maximisation needs k >= 2".into(),
        ));
    }
    let half = cfg.k / 2;

    let first = propagate_reverse(p, &rho.positive_part(), cfg.t);
    let stage1 = top_k(rho.targets().map(|i| (i, first.values[i])), half);
    let taken: HashSet<usize> = stage1.iter().map(|&(i, _)| i).collect();

    let second = propagate_reverse(p, &rho.negative_part(), cfg.t);
    let stage2 = top_k(
        rho.targets()
            .filter(|i| !taken.contains(i))
            .map(|i| (i, -second.values[i])),
        half,
    );

    let entries = stage1
        .into_iter()
        .chain(stage2)
        .map(|(node, score)| member_seed(rho, node, score))
        .collect();
    SeedSet::new(entries, cfg.k)
}
