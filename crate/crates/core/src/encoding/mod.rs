//! Query and node encoders, the embedding index, and exact vector search.

mod hash;
mod index;
mod remote;

pub use hash::{hash_embed, hash_presence, tokenize, HashEmbedder, DEFAULT_DIM};
pub use index::{build_index, vector_search, EmbeddingIndex, IndexOptions, CACHE_MAGIC, CACHE_VERSION};
pub use remote::RemoteEmbedder;
pub(crate) use remote::remote_agent;

use crate::error::ModelError;

/// A text encoder producing fixed-length vectors.
///
/// Implementations must be deterministic and safe to call from several
/// threads at once.
pub trait Embedder: Send + Sync {
    fn dimension(&self) -> usize;

    fn encode_query(&self, text: &str) -> Result<Vec<f64>, ModelError>;

    fn encode_node(&self, text: &str) -> Result<Vec<f64>, ModelError>;

    /// Batch form of [`Embedder::encode_node`]. A failing item should be
    /// reported through [`ModelError::index`].
    fn encode_nodes(&self, texts: &[&str]) -> Result<Vec<Vec<f64>>, ModelError> {
        texts
            .iter()
            .enumerate()
            .map(|(i, t)| {
                self.encode_node(t).map_err(|e| ModelError {
                    index: e.index.or(Some(i)),
                    message: e.message,
                })
            })
            .collect()
    }
}

impl<E: Embedder + ?Sized> Embedder for &E {
    fn dimension(&self) -> usize {
        (**self).dimension()
    }
    fn encode_query(&self, text: &str) -> Result<Vec<f64>, ModelError> {
        (**self).encode_query(text)
    }
    fn encode_node(&self, text: &str) -> Result<Vec<f64>, ModelError> {
        (**self).encode_node(text)
    }
    fn encode_nodes(&self, texts: &[&str]) -> Result<Vec<Vec<f64>>, ModelError> {
        (**self).encode_nodes(texts)
    }
}

impl<E: Embedder + ?Sized> Embedder for Box<E> {
    fn dimension(&self) -> usize {
        (**self).dimension()
    }
    fn encode_query(&self, text: &str) -> Result<Vec<f64>, ModelError> {
        (**self).encode_query(text)
    }
    fn encode_node(&self, text: &str) -> Result<Vec<f64>, ModelError> {
        (**self).encode_node(text)
    }
    fn encode_nodes(&self, texts: &[&str]) -> Result<Vec<Vec<f64>>, ModelError> {
        (**self).encode_nodes(texts)
    }
}
