//! Deterministic offline reranker built from hashed bag-of-words vectors.
//!
//! The latent is the elementwise product of the hashed query vector and a
//! hashed content vector, so its coordinates are per-bucket query/content
//! agreements. A linear head sums them into a score.

use twox_hash::XxHash64;

use super::{MlpHead, Reranker};
use crate::encoding::{hash_embed, hash_presence, DEFAULT_DIM};
use crate::error::ModelError;

/// How the content side of the latent is hashed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ContentWeighting {
    /// Unit-normalized counts; with an all-ones head the score is the
    /// cosine of the two hashed vectors.
    Normalized,
    /// Signed bucket occupancy; the score measures how much of the query
    /// the content covers, independent of content length.
    #[default]
    Presence,
}

#[derive(Clone, Debug)]
pub struct HashReranker {
    dim: usize,
    weighting: ContentWeighting,
    head: MlpHead,
}

fn ones_head(dim: usize) -> MlpHead {
    MlpHead::linear(vec![1.0; dim], 0.0).expect("valid linear head")
}

impl HashReranker {
    pub fn new(dim: usize, weighting: ContentWeighting, head: MlpHead) -> Self {
        assert_eq!(head.input_dim(), dim, "head input must match latent dimension");
        Self {
            dim,
            weighting,
            head,
        }
    }

    /// Score equals the dot product of the two hashed, normalized vectors.
    pub fn cosine(dim: usize) -> Self {
        Self::new(dim, ContentWeighting::Normalized, ones_head(dim))
    }

    pub fn coverage(dim: usize) -> Self {
        Self::new(dim, ContentWeighting::Presence, ones_head(dim))
    }

    /// Linear head with weights `1 + jitter·u_i`, `u_i ∈ [-1, 1)` derived
    /// from `seed`, and zero bias.
    pub fn seeded_head(dim: usize, seed: u64, jitter: f64) -> MlpHead {
        let weights = (0..dim as u64)
            .map(|i| {
                let h = XxHash64::oneshot(seed, &i.to_le_bytes());
                let u = (h >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0;
                1.0 + jitter * u
            })
            .collect();
        MlpHead::linear(weights, 0.0).expect("valid linear head")
    }

    pub fn head(&self) -> &MlpHead {
        &self.head
    }

    pub fn weighting(&self) -> ContentWeighting {
        self.weighting
    }
}

impl Default for HashReranker {
    fn default() -> Self {
        Self::coverage(DEFAULT_DIM)
    }
}

impl Reranker for HashReranker {
    fn latent_dim(&self) -> usize {
        self.dim
    }

    fn extract_latent(&self, query: &str, content: &str) -> Result<Vec<f64>, ModelError> {
        let q = hash_embed(query, self.dim);
        let c = match self.weighting {
            ContentWeighting::Normalized => hash_embed(content, self.dim),
            ContentWeighting::Presence => hash_presence(content, self.dim),
        };
        Ok(q.iter().zip(&c).map(|(a, b)| a * b).collect())
    }

    fn head_score(&self, latent: &[f64]) -> f64 {
        self.head.score(latent)
    }
}
