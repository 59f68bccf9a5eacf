//! Campaign evaluation: raw effectiveness, expected number of correctly
//! influenced targets, and effectiveness relative to seeding every target.

use std::io::Write;
use std::time::Duration;

use serde::Serialize;

use crate::error::Result;
use crate::graph::PartitionVector;
use crate::propagation::{
    propagate_forward, propagate_forward_with, OpinionVector, TransitionMatrix,
};
use crate::seedselect::SeedSet;

/// Adoption probability a target must exceed to count as influenced.
pub const DEFAULT_THRESHOLD: f64 = 0.5;

/// `|T_t|` below this makes the influence percentage undefined.
pub const UNDEFINED_BELOW: f64 = 1e-12;

/// Expected number of correctly influenced targets at the default threshold.
pub fn expected_correct(c: &OpinionVector, rho: &PartitionVector) -> f64 {
    expected_correct_with(c, rho, DEFAULT_THRESHOLD)
}

/// Sums `p(O1) = (1 + C)/2` over first-group nodes and `p(O2) = (1 - C)/2`
/// over second-group nodes, counting only nodes whose probability strictly
/// exceeds `threshold`.
pub fn expected_correct_with(c: &OpinionVector, rho: &PartitionVector, threshold: f64) -> f64 {
    assert_eq!(c.len(), rho.len(), "opinion and partition lengths differ");
    rho.labels()
        .iter()
        .zip(c.values())
        .map(|(&label, &v)| {
            let p = match label {
                1 => (1.0 + v) / 2.0,
                -1 => (1.0 - v) / 2.0,
                _ => return 0.0,
            };
            if p > threshold {
                p
            } else {
                0.0
            }
        })
        .sum()
}

fn ratio_pct(epsilon: f64, all_seed: f64) -> Option<f64> {
    if all_seed.abs() < UNDEFINED_BELOW {
        None
    } else {
        Some(epsilon / all_seed * 100.0)
    }
}

/// `T_t`: effectiveness when every target is seeded with its group's opinion.
pub fn all_seed_effectiveness(p: &TransitionMatrix, rho: &PartitionVector, t: usize) -> f64 {
    propagate_forward(p, &OpinionVector::from_partition(rho), t).effectiveness(rho)
}

/// `100 * eps_t / T_t`, or `None` when `T_t` is numerically zero.
pub fn influence_pct(
    p: &TransitionMatrix,
    rho: &PartitionVector,
    seeds: &SeedSet,
    t: usize,
) -> Result<Option<f64>> {
    rho.check_len(p.node_count())?;
    let c0 = seeds.seed_vector(p.node_count())?;
    let epsilon = propagate_forward(p, &c0, t).effectiveness(rho);
    Ok(ratio_pct(epsilon, all_seed_effectiveness(p, rho, t)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EffectivenessReport {
    pub t: usize,
    pub epsilon: f64,
    pub expected_correct: f64,
    pub influence_pct: Option<f64>,
    pub all_seed: f64,
}

impl EffectivenessReport {
    pub fn warnings(&self) -> Vec<&'static str> {
        let mut w = Vec::new();
        if self.influence_pct.is_none() {
            w.push("all_seed_zero");
        } else if self.all_seed < 0.0 {
            w.push("all_seed_negative");
        }
        w
    }
}

/// Metrics for `t = 0..=t_max` from one forward pass of the seed vector and
/// one of the all-target vector.
pub fn trajectory_report(
    p: &TransitionMatrix,
    rho: &PartitionVector,
    seeds: &SeedSet,
    t_max: usize,
) -> Result<Vec<EffectivenessReport>> {
    trajectory_report_with(p, rho, seeds, t_max, DEFAULT_THRESHOLD)
}

pub fn trajectory_report_with(
    p: &TransitionMatrix,
    rho: &PartitionVector,
    seeds: &SeedSet,
    t_max: usize,
    threshold: f64,
) -> Result<Vec<EffectivenessReport>> {
    rho.check_len(p.node_count())?;
    let c0 = seeds.seed_vector(p.node_count())?;

    let mut all_seed = Vec::with_capacity(t_max + 1);
    propagate_forward_with(p, &OpinionVector::from_partition(rho), t_max, |_, c| {
        all_seed.push(dot(rho, c));
    });

    let mut reports = Vec::with_capacity(t_max + 1);
    propagate_forward_with(p, &c0, t_max, |t, c| {
        let epsilon = dot(rho, c);
        let snapshot = OpinionVector::new(c.to_vec()).expect("propagation keeps opinions in range");
        reports.push(EffectivenessReport {
            t,
            epsilon,
            expected_correct: expected_correct_with(&snapshot, rho, threshold),
            influence_pct: ratio_pct(epsilon, all_seed[t]),
            all_seed: all_seed[t],
        });
    });
    Ok(reports)
}

fn dot(rho: &PartitionVector, c: &[f64]) -> f64 {
    rho.labels()
        .iter()
        .zip(c)
        .map(|(&l, &v)| f64::from(l) * v)
        .sum()
}

/// Header of the metrics CSV.
pub const METRICS_HEADER: [&str; 8] = [
    "t",
    "algorithm",
    "epsilon",
    "expected_correct",
    "influence_pct",
    "T_t",
    "runtime_ms",
    "warnings",
];

/// Writes metric rows. Undefined values and missing runtimes are empty cells;
/// warnings are `;`-joined.
pub struct MetricsWriter<W: Write> {
    inner: csv::Writer<W>,
}

impl<W: Write> MetricsWriter<W> {
    pub fn new(out: W) -> Result<Self> {
        let mut inner = csv::Writer::from_writer(out);
        inner.write_record(METRICS_HEADER)?;
        Ok(Self { inner })
    }

    pub fn write(
        &mut self,
        algorithm: &str,
        report: &EffectivenessReport,
        runtime: Option<Duration>,
    ) -> Result<()> {
        let pct = report
            .influence_pct
            .map(|v| format!("{v:?}"))
            .unwrap_or_default();
        let runtime = runtime
            .map(|d| format!("{:.3}", d.as_secs_f64() * 1e3))
            .unwrap_or_default();
        self.inner.write_record([
            report.t.to_string(),
            algorithm.to_string(),
            format!("{:?}", report.epsilon),
            format!("{:?}", report.expected_correct),
            pct,
            format!("{:?}", report.all_seed),
            runtime,
            report.warnings().join(";"),
        ])?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<W> {
        self.inner.flush()?;
        self.inner
            .into_inner()
            .map_err(|e| crate::Error::Io(e.into_error()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::SignedGraph;
    use crate::propagation::build_transition;
    use crate::seedselect::{cosinemax, CampaignConfig};

    #[test]
    fn fully_convinced_targets() {
        let rho = PartitionVector::from_labels(vec![1, 0, -1, -1, 1]).unwrap();
        let c = OpinionVector::from_partition(&rho);
        assert_eq!(expected_correct(&c, &rho), 4.0);
        assert_eq!(expected_correct(&OpinionVector::zeros(5), &rho), 0.0);
    }

    #[test]
    fn hand_evaluated_mixture() {
        let rho = PartitionVector::from_labels(vec![0, 1, -1]).unwrap();
        let c = OpinionVector::new(vec![-0.5, 0.0, -1.0]).unwrap();
        assert_eq!(expected_correct(&c, &rho), 1.0);
        let c = OpinionVector::new(vec![0.0, 0.5, 0.4]).unwrap();
        assert_eq!(expected_correct(&c, &rho), 0.75);
        // raising the bar excludes the 0.75 node
        assert_eq!(expected_correct_with(&c, &rho, 0.8), 0.0);
    }

    fn over_hundred_instance() -> (TransitionMatrix, PartitionVector) {
        // 0 (V1, sink), 1 (V1) -> {0, 2}, 2 (V2) -> 3, 3 untargeted sink.
        // Seeding every target cancels at node 1 and wastes node 2's seed.
        let g = SignedGraph::from_edges(4, [(1, 0, 1.0), (1, 2, 1.0), (2, 3, 1.0)]).unwrap();
        let rho = PartitionVector::from_labels(vec![1, 1, -1, 0]).unwrap();
        (build_transition(&g), rho)
    }

    #[test]
    fn influence_pct_can_exceed_hundred() {
        let (p, rho) = over_hundred_instance();
        assert_eq!(all_seed_effectiveness(&p, &rho, 1), 1.0);
        let seeds = cosinemax(&p, &rho, CampaignConfig::new(1, 2).unwrap()).unwrap();
        assert_eq!(influence_pct(&p, &rho, &seeds, 1).unwrap(), Some(250.0));
    }

    #[test]
    fn all_targets_is_exactly_hundred() {
        let (p, rho) = over_hundred_instance();
        let all = SeedSet::all_targets(&rho);
        for t in 0..10 {
            assert_eq!(influence_pct(&p, &rho, &all, t).unwrap(), Some(100.0));
        }
        assert_eq!(
            influence_pct(&p, &rho, &SeedSet::empty(1), 3).unwrap(),
            Some(0.0)
        );
    }

    #[test]
    fn undefined_when_all_seed_vanishes() {
        // node 0 (V1) copies the untargeted node 1
        let g = SignedGraph::from_edges(2, [(0, 1, 1.0), (1, 0, 1.0)]).unwrap();
        let p = build_transition(&g);
        let rho = PartitionVector::from_labels(vec![1, 0]).unwrap();
        // t = 1: C_1(0) = C_0(1) = 0 under the all-target run
        assert_eq!(all_seed_effectiveness(&p, &rho, 1), 0.0);
        let r = trajectory_report(&p, &rho, &SeedSet::all_targets(&rho), 2).unwrap();
        assert_eq!(r[1].influence_pct, None);
        assert_eq!(r[1].warnings(), vec!["all_seed_zero"]);
        assert_eq!(r[2].influence_pct, Some(100.0));
    }

    #[test]
    fn trajectory_matches_pointwise_metrics() {
        let (p, rho) = over_hundred_instance();
        let seeds = cosinemax(&p, &rho, CampaignConfig::new(1, 2).unwrap()).unwrap();
        let reports = trajectory_report(&p, &rho, &seeds, 4).unwrap();
        assert_eq!(reports.len(), 5);
        for r in &reports {
            let c = propagate_forward(&p, &seeds.seed_vector(4).unwrap(), r.t);
            assert_eq!(r.epsilon, c.effectiveness(&rho));
            assert_eq!(r.expected_correct, expected_correct(&c, &rho));
            assert_eq!(
                r.influence_pct,
                influence_pct(&p, &rho, &seeds, r.t).unwrap()
            );
        }
        // seeds 0 (V1, O1) and 3 (untargeted, O2): only node 0 counts at t = 0
        assert_eq!(reports[0].expected_correct, 1.0);
    }

    #[test]
    fn csv_rows() {
        let report = EffectivenessReport {
            t: 3,
            epsilon: -0.5,
            expected_correct: 1.0,
            influence_pct: None,
            all_seed: 0.0,
        };
        let mut w = MetricsWriter::new(Vec::new()).unwrap();
        w.write("cosinemax", &report, Some(Duration::from_micros(1500)))
            .unwrap();
        w.write(
            "random",
            &EffectivenessReport {
                all_seed: -2.0,
                influence_pct: Some(25.0),
                ..report.clone()
            },
            None,
        )
        .unwrap();
        let text = String::from_utf8(w.finish().unwrap()).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(
            lines[0],
            "t,algorithm,epsilon,expected_correct,influence_pct,T_t,runtime_ms,warnings"
        );
        assert_eq!(lines[1], "3,cosinemax,-0.5,1.0,,0.0,1.500,all_seed_zero");
        assert_eq!(lines[2], "3,random,-0.5,1.0,25.0,-2.0,,all_seed_negative");
    }
}
