//! Signed transition operator and the two propagation directions.
//!
//! Forward propagation iterates `C_t = P C_{t-1}` over opinion vectors.
//! Reverse propagation iterates the row vector `eps <- eps P`, starting from
//! the partition vector, giving each node's individual influence at horizon
//! `t`. `P^t` is never formed; every step is one sparse product.
//!
//! Sink nodes (no out-edges) keep their value each step: their row acts as
//! the identity. Each output entry is reduced serially in a fixed order, so
//! results do not depend on the thread count.

use std::io::{Read, Write};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{PartitionVector, SignedGraph};

/// Below this node count steps run on the calling thread.
const PARALLEL_MIN_NODES: usize = 1 << 14;
const CHUNK: usize = 1 << 12;

/// Row-normalised signed operator `P = D^-1 A` in CSR layout, with the
/// transpose kept alongside for reverse products.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
    sink: Vec<bool>,
    // transpose: for each target j, the sources i with P_ij != 0
    t_ptr: Vec<usize>,
    t_rows: Vec<u32>,
    t_vals: Vec<f64>,
}

pub fn build_transition(g: &SignedGraph) -> TransitionMatrix {
    let n = g.node_count();
    let row_ptr = g.offsets().to_vec();
    let cols = g.targets().to_vec();
    let mut vals = g.weights().to_vec();
    let mut sink = vec![false; n];
    for i in 0..n {
        let row = &mut vals[row_ptr[i]..row_ptr[i + 1]];
        if row.is_empty() {
            sink[i] = true;
            continue;
        }
        let denom: f64 = row.iter().map(|w| w.abs()).sum();
        for v in row.iter_mut() {
            *v /= denom;
        }
    }
    TransitionMatrix::assemble(n, row_ptr, cols, vals, sink)
}

impl TransitionMatrix {
    fn assemble(
        n: usize,
        row_ptr: Vec<usize>,
        cols: Vec<u32>,
        vals: Vec<f64>,
        sink: Vec<bool>,
    ) -> Self {
        let nnz = cols.len();
        let mut t_ptr = vec![0usize; n + 1];
        for &j in &cols {
            t_ptr[j as usize + 1] += 1;
        }
        for j in 0..n {
            t_ptr[j + 1] += t_ptr[j];
        }
        let mut cursor = t_ptr.clone();
        let mut t_rows = vec![0u32; nnz];
        let mut t_vals = vec![0.0; nnz];
        // rows visited in ascending order, so each transpose row is sorted
        for i in 0..n {
            for k in row_ptr[i]..row_ptr[i + 1] {
                let j = cols[k] as usize;
                t_rows[cursor[j]] = i as u32;
                t_vals[cursor[j]] = vals[k];
                cursor[j] += 1;
            }
        }
        Self {
            n,
            row_ptr,
            cols,
            vals,
            sink,
            t_ptr,
            t_rows,
            t_vals,
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    pub fn is_sink(&self, node: usize) -> bool {
        self.sink[node]
    }

    /// Nodes given implicit self-retention.
    pub fn sinks(&self) -> impl Iterator<Item = usize> + '_ {
        self.sink
            .iter()
            .enumerate()
            .filter(|(_, &s)| s)
            .map(|(i, _)| i)
    }

    /// Stored entries of row `i` (excludes the implicit sink identity).
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()]
            .iter()
            .zip(&self.vals[r])
            .map(|(&j, &v)| (j as usize, v))
    }

    /// Dense copy including sink self-retention. Only meant for small test
    /// instances.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut m = vec![vec![0.0; self.n]; self.n];
        for (i, row) in m.iter_mut().enumerate() {
            if self.sink[i] {
                row[i] = 1.0;
            }
            for (j, v) in self.row(i) {
                row[j] += v;
            }
        }
        m
    }

    fn forward_entry(&self, i: usize, prev: &[f64]) -> f64 {
        if self.sink[i] {
            return prev[i];
        }
        let mut acc = 0.0;
        for k in self.row_ptr[i]..self.row_ptr[i + 1] {
            acc += self.vals[k] * prev[self.cols[k] as usize];
        }
        acc.clamp(-1.0, 1.0)
    }

    fn reverse_entry(&self, j: usize, prev: &[f64]) -> f64 {
        let mut acc = if self.sink[j] { prev[j] } else { 0.0 };
        for k in self.t_ptr[j]..self.t_ptr[j + 1] {
            acc += self.t_vals[k] * prev[self.t_rows[k] as usize];
        }
        acc
    }

    /// One forward step: `next = P prev`.
    pub fn forward_step(&self, prev: &[f64], next: &mut [f64]) {
        self.step(prev, next, Self::forward_entry);
    }

    /// One reverse step: `next = prev P` (as a row vector).
    pub fn reverse_step(&self, prev: &[f64], next: &mut [f64]) {
        self.step(prev, next, Self::reverse_entry);
    }

    fn step(&self, prev: &[f64], next: &mut [f64], entry: fn(&Self, usize, &[f64]) -> f64) {
        assert_eq!(prev.len(), self.n);
        assert_eq!(next.len(), self.n);
        if self.n < PARALLEL_MIN_NODES {
            for (i, out) in next.iter_mut().enumerate() {
                *out = entry(self, i, prev);
            }
        } else {
            next.par_chunks_mut(CHUNK)
                .enumerate()
                .for_each(|(c, chunk)| {
                    let base = c * CHUNK;
                    for (k, out) in chunk.iter_mut().enumerate() {
                        *out = entry(self, base + k, prev);
                    }
                });
        }
    }

    /// Serialises as little-endian `u64 n, u64 nnz`, then `row_ptr`
    /// (`n + 1` x u64), column ids (`nnz` x u64) and values (`nnz` x f64).
    pub fn write_binary<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(&(self.n as u64).to_le_bytes())?;
        out.write_all(&(self.nnz() as u64).to_le_bytes())?;
        for &p in &self.row_ptr {
            out.write_all(&(p as u64).to_le_bytes())?;
        }
        for &c in &self.cols {
            out.write_all(&u64::from(c).to_le_bytes())?;
        }
        for &v in &self.vals {
            out.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut input: R) -> Result<Self> {
        let mut word = [0u8; 8];
        let mut next_u64 = |input: &mut R| -> Result<u64> {
            input
                .read_exact(&mut word)
                .map_err(|e| Error::BadDump(format!("truncated: {e}")))?;
            Ok(u64::from_le_bytes(word))
        };
        let n = next_u64(&mut input)? as usize;
        let nnz = next_u64(&mut input)? as usize;
        if n == 0 || n > u32::MAX as usize {
            return Err(Error::BadDump(format!("bad node count {n}")));
        }
        let row_ptr = (0..=n)
            .map(|_| next_u64(&mut input).map(|v| v as usize))
            .collect::<Result<Vec<_>>>()?;
        if row_ptr[0] != 0 || row_ptr[n] != nnz || row_ptr.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::BadDump("row pointers not monotone".into()));
        }
        let cols = (0..nnz)
            .map(|_| {
                let c = next_u64(&mut input)?;
                if c as usize >= n {
                    return Err(Error::BadDump(format!("column {c} out of range")));
                }
                Ok(c as u32)
            })
            .collect::<Result<Vec<_>>>()?;
        let vals = (0..nnz)
            .map(|_| next_u64(&mut input).map(f64::from_bits))
            .collect::<Result<Vec<_>>>()?;
        if vals.iter().any(|v| !v.is_finite() || *v == 0.0) {
            return Err(Error::BadDump("non-finite or zero entry".into()));
        }
        let sink = (0..n).map(|i| row_ptr[i] == row_ptr[i + 1]).collect();
        Ok(Self::assemble(n, row_ptr, cols, vals, sink))
    }
}

/// Per-node opinion values, each in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct OpinionVector(Vec<f64>);

impl OpinionVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        for (node, &v) in values.iter().enumerate() {
            if !(-1.0..=1.0).contains(&v) {
                return Err(Error::OpinionOutOfRange { node, value: v });
            }
        }
        Ok(Self(values))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    /// All targets seeded with their group's opinion: the vector equals `rho`.
    pub fn from_partition(rho: &PartitionVector) -> Self {
        Self(rho.as_f64())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn sup_norm(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Effectiveness `rho . C`.
    pub fn effectiveness(&self, rho: &PartitionVector) -> f64 {
        rho.labels()
            .iter()
            .zip(&self.0)
            .map(|(&l, &c)| f64::from(l) * c)
            .sum()
    }
}

/// Individual influence of every node at a given horizon: the row vector
/// `rho^T P^t`.
#[derive(Debug, Clone, PartialEq)]
pub struct InfluenceScores {
    pub values: Vec<f64>,
    pub horizon: usize,
}

impl InfluenceScores {
    pub fn dot(&self, other: &[f64]) -> f64 {
        self.values.iter().zip(other).map(|(a, b)| a * b).sum()
    }
}

fn check_dims(p: &TransitionMatrix, len: usize) {
    assert_eq!(
        len,
        p.node_count(),
        "vector length does not match operator dimension"
    );
}

/// Returns `C_t = P^t C_0`.
pub fn propagate_forward(p: &TransitionMatrix, c0: &OpinionVector, t: usize) -> OpinionVector {
    propagate_forward_with(p, c0, t, |_, _| {})
}

/// Like [`propagate_forward`], calling `visit(step, values)` for every step
/// `0..=t` as it is produced. Only two buffers are live at any time.
pub fn propagate_forward_with<F>(
    p: &TransitionMatrix,
    c0: &OpinionVector,
    t: usize,
    mut visit: F,
) -> OpinionVector
where
    F: FnMut(usize, &[f64]),
{
    check_dims(p, c0.len());
    let mut cur = c0.values().to_vec();
    let mut next = vec![0.0; cur.len()];
    visit(0, &cur);
    for s in 1..=t {
        p.forward_step(&cur, &mut next);
        std::mem::swap(&mut cur, &mut next);
        visit(s, &cur);
    }
    OpinionVector(cur)
}

/// Returns `rho^T P^t`.
pub fn propagate_reverse(p: &TransitionMatrix, rho: &PartitionVector, t: usize) -> InfluenceScores {
    reverse_from(p, rho.as_f64(), t)
}

/// Reverse propagation from an arbitrary starting row vector.
pub fn reverse_from(p: &TransitionMatrix, start: Vec<f64>, t: usize) -> InfluenceScores {
    check_dims(p, start.len());
    let mut cur = start;
    let mut next = vec![0.0; cur.len()];
    for _ in 0..t {
        p.reverse_step(&cur, &mut next);
        std::mem::swap(&mut cur, &mut next);
    }
    InfluenceScores {
        values: cur,
        horizon: t,
    }
}

/// Streams the trajectory `C_0 .. C_t` as CSV rows `t,node,value`.
pub fn write_trajectory_csv<W: Write>(
    p: &TransitionMatrix,
    c0: &OpinionVector,
    t: usize,
    out: W,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "node", "value"])?;
    let mut err = None;
    propagate_forward_with(p, c0, t, |step, values| {
        if err.is_some() {
            return;
        }
        for (node, v) in values.iter().enumerate() {
            if let Err(e) = w.write_record([step.to_string(), node.to_string(), format!("{v:?}")]) {
                err = Some(e);
                return;
            }
        }
    });
    if let Some(e) = err {
        return Err(e.into());
    }
    w.flush()?;
    Ok(())
}
