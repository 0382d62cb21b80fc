//! Model-based search split into latent extraction and head scoring, and
//! the graph-aware reranker that fuses latents between the two stages.

mod granker;
mod hash;
mod head;
mod propagation;
mod remote;

pub use granker::{granker, granker_scores, GrankerConfig};
pub use hash::{ContentWeighting, HashReranker};
pub use head::{AffineLayer, MlpHead};
pub use propagation::{build_propagation, fuse_latents, PropagationMatrix};
pub use remote::RemoteReranker;

use crate::error::{Error, ModelError, Result};
use crate::graph::{CorpusGraph, NodeId};
use crate::ranked::{RankedList, Scored};

/// A reranker exposing its pre-head latent vectors.
///
/// `head_score(extract_latent(q, c))` is the plain relevance score. Both
/// stages must be deterministic and callable from several threads.
pub trait Reranker: Send + Sync {
    fn latent_dim(&self) -> usize;

    fn extract_latent(&self, query: &str, content: &str) -> Result<Vec<f64>, ModelError>;

    /// Batch extraction, rows in input order. A failing item should be
    /// reported through [`ModelError::index`].
    fn extract_latents(&self, query: &str, contents: &[&str]) -> Result<LatentBatch, ModelError> {
        let mut data = Vec::with_capacity(contents.len() * self.latent_dim());
        for (i, c) in contents.iter().enumerate() {
            let row = self.extract_latent(query, c).map_err(|e| ModelError {
                index: e.index.or(Some(i)),
                message: e.message,
            })?;
            if row.len() != self.latent_dim() {
                return Err(ModelError::at(
                    i,
                    format!("latent has length {}, expected {}", row.len(), self.latent_dim()),
                ));
            }
            data.extend(row);
        }
        LatentBatch::new(self.latent_dim(), data).map_err(|e| ModelError::new(e.to_string()))
    }

    fn head_score(&self, latent: &[f64]) -> f64;
}

impl<R: Reranker + ?Sized> Reranker for &R {
    fn latent_dim(&self) -> usize {
        (**self).latent_dim()
    }
    fn extract_latent(&self, q: &str, c: &str) -> Result<Vec<f64>, ModelError> {
        (**self).extract_latent(q, c)
    }
    fn extract_latents(&self, q: &str, cs: &[&str]) -> Result<LatentBatch, ModelError> {
        (**self).extract_latents(q, cs)
    }
    fn head_score(&self, latent: &[f64]) -> f64 {
        (**self).head_score(latent)
    }
}

impl<R: Reranker + ?Sized> Reranker for Box<R> {
    fn latent_dim(&self) -> usize {
        (**self).latent_dim()
    }
    fn extract_latent(&self, q: &str, c: &str) -> Result<Vec<f64>, ModelError> {
        (**self).extract_latent(q, c)
    }
    fn extract_latents(&self, q: &str, cs: &[&str]) -> Result<LatentBatch, ModelError> {
        (**self).extract_latents(q, cs)
    }
    fn head_score(&self, latent: &[f64]) -> f64 {
        (**self).head_score(latent)
    }
}

/// Row-major `rows × dim` matrix of latent vectors, row-aligned with the
/// ranked list it was extracted for.
#[derive(Clone, Debug, PartialEq)]
pub struct LatentBatch {
    dim: usize,
    data: Vec<f64>,
}

impl LatentBatch {
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            if data.is_empty() {
                return Ok(Self { dim, data });
            }
            return Err(Error::Shape("latent dimension is zero".into()));
        }
        if !data.len().is_multiple_of(dim) {
            return Err(Error::Shape(format!(
                "{} values do not fill rows of width {dim}",
                data.len()
            )));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::Shape("latent batch has non-finite entries".into()));
        }
        Ok(Self { dim, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map(Vec::len).unwrap_or(0);
        if let Some(r) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::Shape(format!("ragged rows: {} vs {dim}", r.len())));
        }
        Self::new(dim, rows.concat())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> usize {
        self.data.len().checked_div(self.dim).unwrap_or(0)
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub(crate) fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim.max(1))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

/// Extracts latents for every entry of `ret`, naming the node on failure.
pub fn extract_for_list<R: Reranker + ?Sized>(
    rr: &R,
    query: &str,
    ret: &RankedList,
    g: &CorpusGraph,
) -> Result<LatentBatch> {
    let ids: Vec<NodeId> = ret.node_vec();
    let contents: Vec<&str> = ids.iter().map(|&id| g.content(id)).collect();
    let name = |i: Option<usize>| {
        i.and_then(|i| ids.get(i))
            .or(ids.first())
            .map(|&id| g.key(id).to_string())
            .unwrap_or_default()
    };
    let batch = rr.extract_latents(query, &contents).map_err(|e| Error::Reranker {
        key: name(e.index),
        message: e.message,
    })?;
    if batch.rows() != ids.len() || (!ids.is_empty() && batch.dim() != rr.latent_dim()) {
        return Err(Error::Reranker {
            key: name(None),
            message: format!(
                "expected {} latents of width {}, got {} of width {}",
                ids.len(),
                rr.latent_dim(),
                batch.rows(),
                batch.dim()
            ),
        });
    }
    Ok(batch)
}

/// Plain model-based search: top-`k` of `ret` by head score of the
/// unfused latents. `k` is clamped to `|ret|`.
pub fn rerank_plain<R: Reranker + ?Sized>(
    query: &str,
    ret: &RankedList,
    g: &CorpusGraph,
    rr: &R,
    k: usize,
) -> Result<RankedList> {
    if ret.is_empty() {
        return Err(Error::InvalidParameter("cannot rerank an empty list".into()));
    }
    let h = extract_for_list(rr, query, ret, g)?;
    let scored = ret
        .nodes()
        .zip(h.iter_rows())
        .map(|(node, latent)| Scored::new(node, rr.head_score(latent)));
    Ok(RankedList::top_k(scored, k.min(ret.len())))
}
