//! Degree-weighted propagation over the subgraph induced by a ranked list,
//! and the one-step latent smoothing that uses it.

use super::LatentBatch;
use crate::error::{Error, Result};
use crate::graph::{CorpusGraph, View};
use crate::ranked::RankedList;

/// Row-stochastic propagation matrix over a retrieved list, stored as
/// sparse rows. Rows of nodes with no retrieved neighbor are empty and
/// listed in [`PropagationMatrix::isolated`].
#[derive(Clone, Debug, PartialEq)]
pub struct PropagationMatrix {
    rows: Vec<Vec<(usize, f64)>>,
    isolated: Vec<usize>,
}

impl PropagationMatrix {
    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.rows[i]
            .binary_search_by_key(&j, |&(c, _)| c)
            .map(|p| self.rows[i][p].1)
            .unwrap_or(0.0)
    }

    pub fn isolated(&self) -> &[usize] {
        &self.isolated
    }

    pub fn is_isolated(&self, i: usize) -> bool {
        self.rows[i].is_empty()
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.size();
        self.rows
            .iter()
            .map(|r| {
                let mut d = vec![0.0; n];
                for &(j, v) in r {
                    d[j] = v;
                }
                d
            })
            .collect()
    }

    /// Builds from a dense matrix; rows summing to zero become isolated.
    /// Intended for experiments and tests; no normalization is applied.
    pub fn from_dense(m: &[Vec<f64>]) -> Result<Self> {
        let n = m.len();
        let mut rows = Vec::with_capacity(n);
        let mut isolated = Vec::new();
        for (i, r) in m.iter().enumerate() {
            if r.len() != n {
                return Err(Error::Shape(format!("row {i} has {} columns, expected {n}", r.len())));
            }
            let sparse: Vec<(usize, f64)> = r
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(|(j, v)| (j, *v))
                .collect();
            if sparse.is_empty() {
                isolated.push(i);
            }
            rows.push(sparse);
        }
        Ok(Self { rows, isolated })
    }
}

/// `A_ij = 1` when `ret[i] → ret[j]` is an edge under `view`,
/// `W = A · D⁻¹` with `D` the full-graph degrees (zero replaced by one),
/// and `P` the row normalization of `W`.
pub fn build_propagation(ret: &RankedList, g: &CorpusGraph, view: View) -> PropagationMatrix {
    let ids = ret.node_vec();
    let n = ids.len();
    let inv_degree: Vec<f64> = ids
        .iter()
        .map(|&id| 1.0 / g.degree(id, view).max(1) as f64)
        .collect();
    let mut rows = Vec::with_capacity(n);
    let mut isolated = Vec::new();
    for (i, &node) in ids.iter().enumerate() {
        let nbrs = g.neighbors(node, view);
        let mut row: Vec<(usize, f64)> = if nbrs.len() <= n {
            nbrs.iter()
                .filter_map(|&nb| ret.rank(nb).map(|r| (r - 1, inv_degree[r - 1])))
                .collect()
        } else {
            ids.iter()
                .enumerate()
                .filter(|&(_, &other)| nbrs.binary_search(&other).is_ok())
                .map(|(j, _)| (j, inv_degree[j]))
                .collect()
        };
        row.sort_unstable_by_key(|&(j, _)| j);
        let sum: f64 = row.iter().map(|&(_, w)| w).sum();
        if sum > 0.0 {
            row.iter_mut().for_each(|(_, w)| *w /= sum);
        } else {
            isolated.push(i);
            row.clear();
        }
        rows.push(row);
    }
    PropagationMatrix { rows, isolated }
}

/// `H' = (1 − alpha)·H + alpha·(P·H)` on rows with retrieved neighbors;
/// isolated rows are copied unchanged.
pub fn fuse_latents(h: &LatentBatch, p: &PropagationMatrix, alpha: f64) -> Result<LatentBatch> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidParameter(format!("alpha must lie in [0, 1], got {alpha}")));
    }
    if h.rows() != p.size() {
        return Err(Error::Shape(format!(
            "latent batch has {} rows, propagation matrix is {}×{}",
            h.rows(),
            p.size(),
            p.size()
        )));
    }
    let mut out = h.clone();
    for i in 0..h.rows() {
        let row = p.row(i);
        if row.is_empty() {
            continue;
        }
        let dst = out.row_mut(i);
        dst.iter_mut().for_each(|x| *x *= 1.0 - alpha);
        for &(j, w) in row {
            let coef = alpha * w;
            for (d, s) in dst.iter_mut().zip(h.row(j)) {
                *d += coef * s;
            }
        }
    }
    Ok(out)
}
