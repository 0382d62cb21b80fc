//! Retrieval metrics: capped recall, binary nDCG, topological recall and
//! its missed-node component.

mod paths;

use std::collections::BTreeSet;

use serde::Serialize;

pub use paths::{uncertainties, uncertainty, PathMode, TrConfig};

use crate::error::{Error, Result};
use crate::graph::{CorpusGraph, NodeId};
use crate::ranked::RankedList;

/// Gold nodes of one query.
pub type Oracle = BTreeSet<NodeId>;

/// Resolves gold keys against `g`.
pub fn oracle_from_keys<'k>(
    g: &CorpusGraph,
    keys: impl IntoIterator<Item = &'k str>,
) -> Result<Oracle> {
    keys.into_iter().map(|k| g.id(k)).collect()
}

fn check(oracle: &Oracle, k: usize) -> Result<()> {
    if oracle.is_empty() {
        return Err(Error::EmptyOracle);
    }
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    Ok(())
}

fn hits(ret: &RankedList, oracle: &Oracle, k: usize) -> usize {
    ret.nodes().take(k).filter(|n| oracle.contains(n)).count()
}

/// `|top-k ∩ oracle| / min(k, |oracle|)`.
pub fn capped_recall_at_k(ret: &RankedList, oracle: &Oracle, k: usize) -> Result<f64> {
    check(oracle, k)?;
    Ok(hits(ret, oracle, k) as f64 / k.min(oracle.len()) as f64)
}

/// `|ret ∩ oracle| / |oracle|` over the whole list.
pub fn recall(ret: &RankedList, oracle: &Oracle) -> Result<f64> {
    check(oracle, 1)?;
    Ok(hits(ret, oracle, ret.len()) as f64 / oracle.len() as f64)
}

/// Binary-gain nDCG with discount `1/log2(rank + 1)`.
pub fn ndcg_at_k(ret: &RankedList, oracle: &Oracle, k: usize) -> Result<f64> {
    check(oracle, k)?;
    let discount = |rank: usize| 1.0 / ((rank + 1) as f64).log2();
    let dcg: f64 = ret
        .nodes()
        .take(k)
        .enumerate()
        .filter(|(_, n)| oracle.contains(n))
        .map(|(i, _)| discount(i + 1))
        .sum();
    let ideal: f64 = (1..=k.min(oracle.len())).map(discount).sum();
    Ok(dcg / ideal)
}

fn mean_credit(g: &CorpusGraph, ret: &RankedList, targets: &[NodeId], cfg: &TrConfig) -> f64 {
    let retrieved = ret.node_vec();
    let u = uncertainties(g, &retrieved, targets, cfg);
    u.iter().map(|&u| 1.0 / (1.0 + u)).sum::<f64>() / targets.len() as f64
}

/// Mean over gold nodes of `1 / (1 + u)`, `u` the accumulated log-degree
/// distance from the retrieved set. Unreachable gold contributes zero.
pub fn topological_recall(
    g: &CorpusGraph,
    ret: &RankedList,
    oracle: &Oracle,
    cfg: &TrConfig,
) -> Result<f64> {
    check(oracle, 1)?;
    let targets: Vec<NodeId> = oracle.iter().copied().collect();
    Ok(mean_credit(g, ret, &targets, cfg))
}

/// Partial credit of the gold nodes that were not retrieved:
/// `|missed|/|oracle| · TR(missed)`.
pub fn miss_tr(g: &CorpusGraph, ret: &RankedList, oracle: &Oracle, cfg: &TrConfig) -> Result<f64> {
    check(oracle, 1)?;
    let missed: Vec<NodeId> = oracle.iter().copied().filter(|n| !ret.contains(*n)).collect();
    if missed.is_empty() {
        return Ok(0.0);
    }
    Ok(missed.len() as f64 / oracle.len() as f64 * mean_credit(g, ret, &missed, cfg))
}

/// Capped recall of the final list at `k_total` minus capped recall of the
/// initial vector-search list at `k_vs`.
pub fn marginal_recall_gain(
    final_list: &RankedList,
    initial_vs: &RankedList,
    oracle: &Oracle,
    k_total: usize,
    k_vs: usize,
) -> Result<f64> {
    Ok(capped_recall_at_k(final_list, oracle, k_total)?
        - capped_recall_at_k(initial_vs, oracle, k_vs)?)
}

/// Every per-query metric, from a single shortest-path search.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QueryMetrics {
    pub recall_at_k: f64,
    pub ndcg_at_k: f64,
    pub recall_uncapped: f64,
    pub tr: f64,
    pub miss_tr: f64,
    /// Capped recall of the whole retrieved list (cutoff = its length).
    pub recall_total: f64,
    /// Capped recall of the initial vector search at `k`.
    pub recall_vs: f64,
    pub delta_r: f64,
}

impl QueryMetrics {
    pub fn compute(
        g: &CorpusGraph,
        ret: &RankedList,
        initial_vs: &RankedList,
        oracle: &Oracle,
        k: usize,
        cfg: &TrConfig,
    ) -> Result<Self> {
        check(oracle, k)?;
        let targets: Vec<NodeId> = oracle.iter().copied().collect();
        let u = uncertainties(g, &ret.node_vec(), &targets, cfg);
        let n = targets.len() as f64;
        let mut found = 0usize;
        let mut credit_all = 0.0;
        let mut credit_missed = 0.0;
        let mut missed = 0usize;
        for (t, u) in targets.iter().zip(&u) {
            let c = 1.0 / (1.0 + u);
            credit_all += c;
            if ret.contains(*t) {
                found += 1;
            } else {
                missed += 1;
                credit_missed += c;
            }
        }
        let miss_tr = if missed == 0 {
            0.0
        } else {
            missed as f64 / n * (credit_missed / missed as f64)
        };
        let recall_total = capped_recall_at_k(ret, oracle, ret.len().max(1))?;
        let recall_vs = capped_recall_at_k(initial_vs, oracle, k)?;
        Ok(Self {
            recall_at_k: capped_recall_at_k(ret, oracle, k)?,
            ndcg_at_k: ndcg_at_k(ret, oracle, k)?,
            recall_uncapped: found as f64 / n,
            tr: credit_all / n,
            miss_tr,
            recall_total,
            recall_vs,
            delta_r: recall_total - recall_vs,
        })
    }
}
