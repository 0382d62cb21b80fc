use super::{build_propagation, extract_for_list, fuse_latents, Reranker};
use crate::error::{Error, Result};
use crate::graph::{CorpusGraph, View};
use crate::ranked::{RankedList, Scored};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GrankerConfig {
    /// Weight of the neighbor-aggregated latent in the fused latent.
    pub alpha: f64,
    pub view: View,
}

impl Default for GrankerConfig {
    fn default() -> Self {
        Self {
            alpha: 0.2,
            view: View::Undirected,
        }
    }
}

/// Head scores of the graph-fused latents, aligned with `ret`.
pub fn granker_scores<R: Reranker + ?Sized>(
    query: &str,
    ret: &RankedList,
    g: &CorpusGraph,
    rr: &R,
    cfg: &GrankerConfig,
) -> Result<Vec<f64>> {
    if ret.is_empty() {
        return Err(Error::InvalidParameter("cannot rerank an empty list".into()));
    }
    let h = extract_for_list(rr, query, ret, g)?;
    let p = build_propagation(ret, g, cfg.view);
    let fused = fuse_latents(&h, &p, cfg.alpha)?;
    Ok(fused.iter_rows().map(|l| rr.head_score(l)).collect())
}

/// Reorders `ret` by fused-latent head scores. The output is a permutation
/// of the input.
pub fn granker<R: Reranker + ?Sized>(
    query: &str,
    ret: &RankedList,
    g: &CorpusGraph,
    rr: &R,
    cfg: &GrankerConfig,
) -> Result<RankedList> {
    let scores = granker_scores(query, ret, g, rr, cfg)?;
    Ok(RankedList::from_scored(
        ret.nodes().zip(scores).map(|(n, s)| Scored::new(n, s)),
    ))
}
