//! Signed, weighted, directed graphs and the target-group partition vector.
//!
//! The graph is stored once, in compressed sparse row layout keyed by source
//! node. Row `i` holds the out-edges of `i` sorted by target id. Positive and
//! negative parts of the adjacency matrix are exposed as filtered views over
//! the same storage.

use std::collections::{BTreeMap, HashMap};
use std::io::{BufRead, Write};

use serde::Serialize;

use crate::error::{Error, Result};

/// Immutable signed graph in CSR layout.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedGraph {
    n: usize,
    offsets: Vec<usize>,
    targets: Vec<u32>,
    weights: Vec<f64>,
    positive_count: usize,
    negative_count: usize,
}

impl SignedGraph {
    /// Builds a graph over `n` nodes from `(src, dst, weight)` triples.
    ///
    /// Duplicate `(src, dst)` pairs are rejected; the reported `line` is the
    /// 1-based position of the offending triple in `edges`.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let tagged = edges
            .into_iter()
            .enumerate()
            .map(|(pos, (s, d, w))| (s, d, w, pos + 1));
        Self::build(n, tagged)
    }

    fn build<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64, usize)>,
    {
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        if n > u32::MAX as usize {
            return Err(Error::InvalidParameter(format!(
                "node count {n} exceeds the supported maximum {}",
                u32::MAX
            )));
        }

        let mut raw: Vec<(u32, u32, f64, usize)> = Vec::new();
        for (src, dst, w, line) in edges {
            for node in [src, dst] {
                if node >= n {
                    return Err(Error::NodeOutOfRange { node, n });
                }
            }
            if !w.is_finite() || w == 0.0 {
                return Err(Error::BadWeight { line, weight: w });
            }
            raw.push((src as u32, dst as u32, w, line));
        }

        // counting sort by source
        let mut offsets = vec![0usize; n + 1];
        for &(s, ..) in &raw {
            offsets[s as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut cursor = offsets.clone();
        let mut slots: Vec<(u32, f64, usize)> = vec![(0, 0.0, 0); raw.len()];
        for (s, d, w, line) in raw {
            let at = &mut cursor[s as usize];
            slots[*at] = (d, w, line);
            *at += 1;
        }

        let mut positive_count = 0;
        for src in 0..n {
            let row = &mut slots[offsets[src]..offsets[src + 1]];
            row.sort_unstable_by_key(|&(d, _, line)| (d, line));
            for pair in row.windows(2) {
                if pair[0].0 == pair[1].0 {
                    return Err(Error::DuplicateEdge {
                        line: pair[0].2.max(pair[1].2),
                        src,
                        dst: pair[0].0 as usize,
                    });
                }
            }
            positive_count += row.iter().filter(|e| e.1 > 0.0).count();
        }

        let negative_count = slots.len() - positive_count;
        let (targets, weights) = slots.into_iter().map(|(d, w, _)| (d, w)).unzip();
        Ok(Self {
            n,
            offsets,
            targets,
            weights,
            positive_count,
            negative_count,
        })
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len()
    }

    pub fn positive_count(&self) -> usize {
        self.positive_count
    }

    pub fn negative_count(&self) -> usize {
        self.negative_count
    }

    pub fn out_degree(&self, node: usize) -> usize {
        self.offsets[node + 1] - self.offsets[node]
    }

    pub fn is_sink(&self, node: usize) -> bool {
        self.out_degree(node) == 0
    }

    /// Raw CSR slices for row `node`: target ids and signed weights.
    pub fn row(&self, node: usize) -> (&[u32], &[f64]) {
        let range = self.offsets[node]..self.offsets[node + 1];
        (&self.targets[range.clone()], &self.weights[range])
    }

    /// Out-edges of `node` as `(target, weight)`, sorted by target.
    pub fn neighbors(&self, node: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (t, w) = self.row(node);
        t.iter().zip(w).map(|(&j, &w)| (j as usize, w))
    }

    /// All edges as `(src, dst, weight)` in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| self.neighbors(i).map(move |(j, w)| (i, j, w)))
    }

    /// Entries of the positive part of the adjacency matrix.
    pub fn positive_edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.edges().filter(|e| e.2 > 0.0)
    }

    /// Entries of the negative part, reported as positive magnitudes.
    pub fn negative_edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.edges()
            .filter(|e| e.2 < 0.0)
            .map(|(i, j, w)| (i, j, -w))
    }

    /// Sum of absolute out-weights of `node`.
    pub fn abs_out_weight(&self, node: usize) -> f64 {
        self.row(node).1.iter().map(|w| w.abs()).sum()
    }

    pub(crate) fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub(crate) fn targets(&self) -> &[u32] {
        &self.targets
    }

    pub(crate) fn weights(&self) -> &[f64] {
        &self.weights
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn split_fields(line_no: usize, line: &str, expected: usize) -> Result<Vec<&str>> {
    let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
    if fields.len() != expected {
        return Err(parse_err(
            line_no,
            format!(
                "expected {expected} tab-separated fields, found {}",
                fields.len()
            ),
        ));
    }
    Ok(fields)
}

/// Iterates over `(line_number, content)` of non-blank, non-comment lines.
fn data_lines<R: BufRead>(reader: R) -> impl Iterator<Item = Result<(usize, String)>> {
    reader
        .lines()
        .enumerate()
        .filter_map(|(idx, line)| match line {
            Err(e) => Some(Err(Error::Io(e))),
            Ok(l) => {
                let trimmed = l.trim_end_matches(['\r', '\n']);
                if trimmed.trim().is_empty() || trimmed.starts_with('#') {
                    None
                } else {
                    Some(Ok((idx + 1, trimmed.to_string())))
                }
            }
        })
}

fn parse_edge_line(line_no: usize, line: &str) -> Result<(u64, u64, f64)> {
    let f = split_fields(line_no, line, 3)?;
    let src = f[0]
        .parse::<u64>()
        .map_err(|_| parse_err(line_no, format!("bad source id {:?}", f[0])))?;
    let dst = f[1]
        .parse::<u64>()
        .map_err(|_| parse_err(line_no, format!("bad target id {:?}", f[1])))?;
    let weight = f[2]
        .parse::<f64>()
        .map_err(|_| parse_err(line_no, format!("bad weight {:?}", f[2])))?;
    if !weight.is_finite() || weight == 0.0 {
        return Err(Error::BadWeight {
            line: line_no,
            weight,
        });
    }
    Ok((src, dst, weight))
}

/// Parses a `src<TAB>dst<TAB>weight` edge list with dense 0-based ids.
///
/// The node count is `max_id + 1`; ids that never appear are isolated nodes.
pub fn parse_edge_list<R: BufRead>(reader: R) -> Result<SignedGraph> {
    let mut edges = Vec::new();
    let mut max_id = None;
    for item in data_lines(reader) {
        let (line_no, line) = item?;
        let (s, d, w) = parse_edge_line(line_no, &line)?;
        let (s, d) = match (usize::try_from(s), usize::try_from(d)) {
            (Ok(s), Ok(d)) if s < u32::MAX as usize && d < u32::MAX as usize => (s, d),
            _ => return Err(parse_err(line_no, "node id too large")),
        };
        max_id = Some(max_id.unwrap_or(0).max(s).max(d));
        edges.push((s, d, w, line_no));
    }
    let n = match max_id {
        Some(m) => m + 1,
        None => return Err(Error::EmptyGraph),
    };
    SignedGraph::build(n, edges)
}

pub fn parse_edge_list_str(text: &str) -> Result<SignedGraph> {
    parse_edge_list(text.as_bytes())
}

/// Maps sparse external ids onto dense internal ones, in first-seen order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IdMap {
    external: Vec<u64>,
    index: HashMap<u64, usize>,
}

impl IdMap {
    fn intern(&mut self, id: u64) -> usize {
        *self.index.entry(id).or_insert_with(|| {
            self.external.push(id);
            self.external.len() - 1
        })
    }

    pub fn internal(&self, external: u64) -> Option<usize> {
        self.index.get(&external).copied()
    }

    pub fn external(&self, internal: usize) -> Option<u64> {
        self.external.get(internal).copied()
    }

    pub fn len(&self) -> usize {
        self.external.len()
    }

    pub fn is_empty(&self) -> bool {
        self.external.is_empty()
    }
}

/// Like [`parse_edge_list`], but accepts arbitrary `u64` ids and remaps them.
pub fn parse_edge_list_remapped<R: BufRead>(reader: R) -> Result<(SignedGraph, IdMap)> {
    let mut map = IdMap::default();
    let mut edges = Vec::new();
    for item in data_lines(reader) {
        let (line_no, line) = item?;
        let (s, d, w) = parse_edge_line(line_no, &line)?;
        let s = map.intern(s);
        let d = map.intern(d);
        edges.push((s, d, w, line_no));
    }
    if map.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let g = SignedGraph::build(map.len(), edges)?;
    Ok((g, map))
}

/// Writes the graph as a TSV edge list. Weights use the shortest
/// representation that parses back to the identical `f64`.
pub fn write_edge_list<W: Write>(g: &SignedGraph, mut out: W) -> Result<()> {
    for (i, j, w) in g.edges() {
        writeln!(out, "{i}\t{j}\t{w:?}")?;
    }
    Ok(())
}

/// Target-group labels: `+1` for the first group, `-1` for the second,
/// `0` for untargeted nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionVector {
    labels: Vec<i8>,
}

impl PartitionVector {
    pub fn from_labels(labels: Vec<i8>) -> Result<Self> {
        if let Some((node, &l)) = labels
            .iter()
            .enumerate()
            .find(|(_, l)| !matches!(l, -1..=1))
        {
            return Err(Error::InvalidParameter(format!(
                "label {l} at node {node} is not one of -1, 0, +1"
            )));
        }
        Ok(Self { labels })
    }

    /// Builds a partition from explicit member lists.
    pub fn from_groups(n: usize, v1: &[usize], v2: &[usize]) -> Result<Self> {
        let mut labels = vec![0i8; n];
        for (pos, (&node, label)) in v1
            .iter()
            .map(|x| (x, 1i8))
            .chain(v2.iter().map(|x| (x, -1i8)))
            .enumerate()
        {
            if node >= n {
                return Err(Error::NodeOutOfRange { node, n });
            }
            if labels[node] != 0 {
                return Err(Error::DuplicateMembership {
                    line: pos + 1,
                    node,
                });
            }
            labels[node] = label;
        }
        Ok(Self { labels })
    }

    pub fn untargeted(n: usize) -> Self {
        Self { labels: vec![0; n] }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[i8] {
        &self.labels
    }

    pub fn label(&self, node: usize) -> i8 {
        self.labels[node]
    }

    pub fn v1_count(&self) -> usize {
        self.labels.iter().filter(|&&l| l == 1).count()
    }

    pub fn v2_count(&self) -> usize {
        self.labels.iter().filter(|&&l| l == -1).count()
    }

    pub fn target_count(&self) -> usize {
        self.labels.iter().filter(|&&l| l != 0).count()
    }

    pub fn has_targets(&self) -> bool {
        self.labels.iter().any(|&l| l != 0)
    }

    /// Targeted node ids in ascending order.
    pub fn targets(&self) -> impl Iterator<Item = usize> + '_ {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l != 0)
            .map(|(i, _)| i)
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.labels.iter().map(|&l| f64::from(l)).collect()
    }

    /// Only the first group kept (labels clamped to `{0, +1}`).
    pub fn positive_part(&self) -> Self {
        Self {
            labels: self.labels.iter().map(|&l| l.max(0)).collect(),
        }
    }

    /// Only the second group kept (labels clamped to `{-1, 0}`).
    pub fn negative_part(&self) -> Self {
        Self {
            labels: self.labels.iter().map(|&l| l.min(0)).collect(),
        }
    }

    pub(crate) fn check_len(&self, n: usize) -> Result<()> {
        if self.labels.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: self.labels.len(),
            });
        }
        Ok(())
    }
}

fn parse_partition_line(line_no: usize, line: &str) -> Result<(u64, i8)> {
    let f = split_fields(line_no, line, 2)?;
    let node = f[0]
        .parse::<u64>()
        .map_err(|_| parse_err(line_no, format!("bad node id {:?}", f[0])))?;
    let label = match f[1] {
        "1" => 1,
        "2" => -1,
        other => {
            return Err(Error::BadGroup {
                line: line_no,
                group: other.to_string(),
            })
        }
    };
    Ok((node, label))
}

fn collect_partitions<R, F>(reader: R, n: usize, mut resolve: F) -> Result<PartitionVector>
where
    R: BufRead,
    F: FnMut(u64) -> Option<usize>,
{
    let mut labels = vec![0i8; n];
    for item in data_lines(reader) {
        let (line_no, line) = item?;
        let (raw, label) = parse_partition_line(line_no, &line)?;
        let node = match resolve(raw) {
            Some(node) if node < n => node,
            _ => {
                return Err(Error::NodeOutOfRange {
                    node: raw as usize,
                    n,
                })
            }
        };
        if labels[node] != 0 {
            return Err(Error::DuplicateMembership {
                line: line_no,
                node,
            });
        }
        labels[node] = label;
    }
    Ok(PartitionVector { labels })
}

/// Parses `node<TAB>group` lines, `group` in `{1, 2}`.
pub fn parse_partitions<R: BufRead>(reader: R, n: usize) -> Result<PartitionVector> {
    collect_partitions(reader, n, |raw| usize::try_from(raw).ok())
}

pub fn parse_partitions_str(text: &str, n: usize) -> Result<PartitionVector> {
    parse_partitions(text.as_bytes(), n)
}

/// Partition parsing against external ids resolved through `map`.
pub fn parse_partitions_remapped<R: BufRead>(reader: R, map: &IdMap) -> Result<PartitionVector> {
    collect_partitions(reader, map.len(), |raw| map.internal(raw))
}

pub fn write_partitions<W: Write>(rho: &PartitionVector, mut out: W) -> Result<()> {
    for (i, &l) in rho.labels().iter().enumerate() {
        match l {
            1 => writeln!(out, "{i}\t1")?,
            -1 => writeln!(out, "{i}\t2")?,
            _ => {}
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatsReport {
    pub n: usize,
    pub edges: usize,
    pub positive: usize,
    pub negative: usize,
    pub positive_fraction: f64,
    pub sinks: usize,
    /// out-degree -> number of nodes with that out-degree
    pub out_degree_histogram: BTreeMap<usize, usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub partitions: Option<PartitionStats>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionStats {
    pub v1: usize,
    pub v2: usize,
    pub untargeted: usize,
    pub intra_positive: usize,
    pub intra_negative: usize,
    pub inter_positive: usize,
    pub inter_negative: usize,
}

pub fn graph_stats(g: &SignedGraph) -> StatsReport {
    let mut out_degree_histogram = BTreeMap::new();
    for i in 0..g.node_count() {
        *out_degree_histogram.entry(g.out_degree(i)).or_insert(0) += 1;
    }
    let positive_fraction = if g.edge_count() == 0 {
        0.0
    } else {
        g.positive_count() as f64 / g.edge_count() as f64
    };
    StatsReport {
        n: g.node_count(),
        edges: g.edge_count(),
        positive: g.positive_count(),
        negative: g.negative_count(),
        positive_fraction,
        sinks: out_degree_histogram.get(&0).copied().unwrap_or(0),
        out_degree_histogram,
        partitions: None,
    }
}

/// Stats plus a sign breakdown of edges between and within the target groups.
/// Only edges with both endpoints targeted are counted in the breakdown.
pub fn graph_stats_with_partitions(g: &SignedGraph, rho: &PartitionVector) -> Result<StatsReport> {
    rho.check_len(g.node_count())?;
    let mut ps = PartitionStats {
        v1: rho.v1_count(),
        v2: rho.v2_count(),
        untargeted: g.node_count() - rho.target_count(),
        intra_positive: 0,
        intra_negative: 0,
        inter_positive: 0,
        inter_negative: 0,
    };
    for (i, j, w) in g.edges() {
        let (a, b) = (rho.label(i), rho.label(j));
        if a == 0 || b == 0 {
            continue;
        }
        match (a == b, w > 0.0) {
            (true, true) => ps.intra_positive += 1,
            (true, false) => ps.intra_negative += 1,
            (false, true) => ps.inter_positive += 1,
            (false, false) => ps.inter_negative += 1,
        }
    }
    let mut report = graph_stats(g);
    report.partitions = Some(ps);
    Ok(report)
}
