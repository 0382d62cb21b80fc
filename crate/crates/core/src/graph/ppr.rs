//! Personalized PageRank graph search.

use super::{CorpusGraph, NodeId, View};
use crate::error::{Error, Result};
use crate::ranked::{RankedList, Scored};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PprConfig {
    /// Probability of jumping back to the seed distribution at each step.
    pub restart: f64,
    /// L1 change between iterates below which the walk is converged.
    pub tol: f64,
    pub max_iter: usize,
    pub view: View,
}

impl Default for PprConfig {
    fn default() -> Self {
        Self {
            restart: 0.15,
            tol: 1e-8,
            max_iter: 1000,
            view: View::Undirected,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PprRun {
    /// Stationary scores indexed by [`NodeId::index`]. Sums to 1.
    pub scores: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
}

/// Runs `h ← (1 − restart)·M·h + restart·h0` to convergence, where `M`
/// is the column-normalized transition matrix and `h0` the normalized seed
/// scores. Mass sitting on nodes without neighbors is sent back to `h0`.
pub fn ppr_scores(g: &CorpusGraph, seeds: &RankedList, cfg: &PprConfig) -> Result<PprRun> {
    if !(cfg.restart > 0.0 && cfg.restart < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "restart must lie in (0, 1), got {}",
            cfg.restart
        )));
    }
    if !(cfg.tol > 0.0) {
        return Err(Error::InvalidParameter("tol must be positive".into()));
    }
    if seeds.is_empty() {
        return Err(Error::InvalidParameter("seed list is empty".into()));
    }
    let n = g.len();
    let mut h0 = vec![0.0; n];
    for s in seeds.iter() {
        if !(s.score >= 0.0) || !s.score.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "seed `{}` has invalid score {}",
                g.key(s.node),
                s.score
            )));
        }
        h0[s.node.index()] += s.score;
    }
    let total: f64 = h0.iter().sum();
    if total <= 0.0 {
        return Err(Error::InvalidParameter("seed scores are all zero".into()));
    }
    h0.iter_mut().for_each(|x| *x /= total);

    let damp = 1.0 - cfg.restart;
    let mut h = h0.clone();
    let mut next = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for iter in 1..=cfg.max_iter {
        next.iter_mut().for_each(|x| *x = 0.0);
        let mut dangling = 0.0;
        for (j, &mass) in h.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            let nbrs = g.neighbors(NodeId::from_index(j), cfg.view);
            if nbrs.is_empty() {
                dangling += mass;
            } else {
                let share = mass / nbrs.len() as f64;
                for nb in nbrs {
                    next[nb.index()] += share;
                }
            }
        }
        residual = 0.0;
        for i in 0..n {
            let v = damp * (next[i] + dangling * h0[i]) + cfg.restart * h0[i];
            residual += (v - h[i]).abs();
            next[i] = v;
        }
        std::mem::swap(&mut h, &mut next);
        if residual < cfg.tol {
            return Ok(PprRun {
                scores: h,
                iterations: iter,
                residual,
            });
        }
    }
    Err(Error::NotConverged {
        iterations: cfg.max_iter,
        residual,
    })
}

/// Top-`k` non-seed nodes by converged PPR score.
pub fn personalized_pagerank(
    g: &CorpusGraph,
    seeds: &RankedList,
    cfg: &PprConfig,
    k: usize,
) -> Result<RankedList> {
    let run = ppr_scores(g, seeds, cfg)?;
    let candidates = run
        .scores
        .iter()
        .enumerate()
        .map(|(i, &score)| Scored::new(NodeId::from_index(i), score))
        .filter(|s| !seeds.contains(s.node));
    Ok(RankedList::top_k(candidates, k))
}
