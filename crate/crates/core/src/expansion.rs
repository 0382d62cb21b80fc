//! One-hop semantic-topological expansion of a retrieved list.
//!
//! Each frontier node `n` is scored `I_sim + beta·I_struct`, where
//! `I_sim = v_q · v_n` and `I_struct` adds
//!
//! * a rank-proximity term `1 − (r_best − 1)/(R_max − 1)`, with `r_best` the
//!   best 1-based rank among the retrieved neighbors `A(n)` and `R_max` the
//!   list length (only when `R_max > 1`), and
//! * a bridging term `(|A(n)| − 1)/(C_max − 1)` with
//!   `C_max = min(deg(n), R_max)` (only when `C_max > 1`).

use crate::encoding::EmbeddingIndex;
use crate::error::{Error, Result};
use crate::graph::{CorpusGraph, NodeId, View};
use crate::ranked::{rank_order, RankedList, Scored};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StexConfig {
    /// Weight of the structural score against the similarity score.
    pub beta: f64,
    pub view: View,
}

impl Default for StexConfig {
    fn default() -> Self {
        Self {
            beta: 1.0,
            view: View::Undirected,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StexScore {
    pub node: NodeId,
    /// Rank proximity plus bridging, in `[0, 2]`.
    pub i_struct: f64,
    pub i_sim: f64,
    pub total: f64,
}

/// Scores every frontier node of `ret`, best first.
pub fn stex_scores(
    v_q: &[f64],
    index: &EmbeddingIndex,
    g: &CorpusGraph,
    ret: &RankedList,
    cfg: &StexConfig,
) -> Result<Vec<StexScore>> {
    if ret.is_empty() {
        return Err(Error::InvalidParameter("cannot expand an empty list".into()));
    }
    if !(cfg.beta >= 0.0) {
        return Err(Error::InvalidParameter(format!("beta must be non-negative, got {}", cfg.beta)));
    }
    if v_q.len() != index.dimension() {
        return Err(Error::DimensionMismatch {
            expected: index.dimension(),
            actual: v_q.len(),
        });
    }
    let r_max = ret.len();
    // A(n) walks back along the edges that put n on the frontier.
    let back = cfg.view.reversed();
    let mut out = Vec::new();
    for node in g.frontier(ret, cfg.view) {
        let vector = index
            .get(node)
            .ok_or_else(|| Error::UnknownKey(format!("{} (missing from embedding index)", g.key(node))))?;
        let mut adjacent = 0usize;
        let mut r_best = usize::MAX;
        for &nb in g.neighbors(node, back) {
            if let Some(r) = ret.rank(nb) {
                adjacent += 1;
                r_best = r_best.min(r);
            }
        }
        debug_assert!(adjacent > 0, "frontier node without retrieved neighbor");

        let mut i_struct = 0.0;
        if r_max > 1 {
            i_struct = 1.0 - (r_best - 1) as f64 / (r_max - 1) as f64;
        }
        let c_max = g.degree(node, back).min(r_max);
        if c_max > 1 {
            i_struct += (adjacent - 1) as f64 / (c_max - 1) as f64;
        }
        let i_sim: f64 = v_q.iter().zip(vector).map(|(a, b)| a * b).sum();
        out.push(StexScore {
            node,
            i_struct,
            i_sim,
            total: i_sim + cfg.beta * i_struct,
        });
    }
    out.sort_by(|a, b| rank_order(&Scored::new(a.node, a.total), &Scored::new(b.node, b.total)));
    Ok(out)
}

/// Frontier candidates ranked by their expansion score.
pub fn stex(
    v_q: &[f64],
    index: &EmbeddingIndex,
    g: &CorpusGraph,
    ret: &RankedList,
    cfg: &StexConfig,
) -> Result<RankedList> {
    let scores = stex_scores(v_q, index, g, ret, cfg)?;
    Ok(RankedList::from_ordered(
        scores.into_iter().map(|s| Scored::new(s.node, s.total)),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::graph;

    fn unit_index(g: &CorpusGraph, sims: &[(&str, f64)]) -> EmbeddingIndex {
        // 2-d vectors (s, sqrt(1 − s²)) so that v_q = (1, 0) yields similarity s
        let rows = g
            .node_ids()
            .map(|id| {
                let s = sims
                    .iter()
                    .find(|(k, _)| *k == g.key(id))
                    .map(|p| p.1)
                    .unwrap_or(0.0);
                vec![s, (1.0 - s * s).max(0.0).sqrt()]
            })
            .collect();
        EmbeddingIndex::from_rows(2, rows, false).unwrap()
    }

    #[test]
    fn hand_trace_rank_one_and_full_bridge() {
        // n adjacent to a (rank 1) and b (rank 2), plus one outside neighbor z
        let g = graph(
            &["a", "b", "n", "z"],
            &[("a", "n"), ("b", "n"), ("n", "z")],
        );
        let idx = unit_index(&g, &[("n", 0.25)]);
        let ret = RankedList::from_ordered_ids([g.id("a").unwrap(), g.id("b").unwrap()]);
        let cfg = StexConfig {
            beta: 1.0,
            view: View::Undirected,
        };
        let s = stex_scores(&[1.0, 0.0], &idx, &g, &ret, &cfg).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(g.degree(s[0].node, View::Undirected), 3);
        assert_eq!(s[0].i_struct, 2.0);
        assert_eq!(s[0].i_sim, 0.25);
        assert_eq!(s[0].total, 0.25 + 2.0);
    }

    #[test]
    fn single_retrieved_node_is_similarity_only() {
        let g = graph(&["a", "x", "y"], &[("a", "x"), ("a", "y"), ("x", "y")]);
        let idx = unit_index(&g, &[("x", 0.1), ("y", 0.9)]);
        let ret = RankedList::from_ordered_ids([g.id("a").unwrap()]);
        let s = stex_scores(&[1.0, 0.0], &idx, &g, &ret, &StexConfig::default()).unwrap();
        assert!(s.iter().all(|x| x.i_struct == 0.0));
        let keys: Vec<&str> = s.iter().map(|x| g.key(x.node)).collect();
        assert_eq!(keys, vec!["y", "x"]);
    }

    #[test]
    fn bottom_rank_neighbor_gets_zero_rank_term() {
        // c hangs off the last of three retrieved nodes and has degree 4 > R_max
        let g = graph(
            &["a", "b", "c", "r", "u", "v", "w"],
            &[("a", "b"), ("b", "r"), ("c", "r"), ("c", "u"), ("c", "v"), ("c", "w")],
        );
        let idx = unit_index(&g, &[]);
        let ret = RankedList::from_ordered_ids(["a", "b", "r"].map(|k| g.id(k).unwrap()));
        let s = stex_scores(&[1.0, 0.0], &idx, &g, &ret, &StexConfig::default()).unwrap();
        let c = s.iter().find(|x| g.key(x.node) == "c").unwrap();
        // rank term 0, bridging (1 − 1)/(3 − 1) = 0
        assert_eq!(c.i_struct, 0.0);
    }

    #[test]
    fn empty_frontier_and_errors() {
        let g = graph(&["a", "b"], &[("a", "b")]);
        let idx = unit_index(&g, &[]);
        let all = RankedList::from_ordered_ids(g.node_ids());
        assert!(stex(&[1.0, 0.0], &idx, &g, &all, &StexConfig::default()).unwrap().is_empty());
        assert!(stex(&[1.0, 0.0], &idx, &g, &RankedList::default(), &StexConfig::default()).is_err());
        let one = RankedList::from_ordered_ids([g.id("a").unwrap()]);
        assert!(stex(&[1.0], &idx, &g, &one, &StexConfig::default()).is_err());
    }

    #[test]
    fn candidate_missing_from_index_is_an_error() {
        let g = graph(&["a", "b"], &[("a", "b")]);
        let short = EmbeddingIndex::from_rows(2, vec![vec![1.0, 0.0]], false).unwrap();
        let one = RankedList::from_ordered_ids([g.id("a").unwrap()]);
        let err = stex(&[1.0, 0.0], &short, &g, &one, &StexConfig::default()).unwrap_err();
        assert!(err.to_string().contains('b'), "{err}");
    }

    #[test]
    fn directed_view_looks_back_for_adjacency() {
        // a → n: n is on the out-frontier of {a, b}; A(n) = {a}
        let g = graph(&["a", "b", "n"], &[("a", "n"), ("a", "b")]);
        let idx = unit_index(&g, &[]);
        let ret = RankedList::from_ordered_ids([g.id("a").unwrap(), g.id("b").unwrap()]);
        let cfg = StexConfig {
            beta: 1.0,
            view: View::Out,
        };
        let s = stex_scores(&[1.0, 0.0], &idx, &g, &ret, &cfg).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].i_struct, 1.0);
    }
}
