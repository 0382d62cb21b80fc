//! Feature-hashing text vectors. Deterministic and dependency-free at
//! runtime, used as the offline encoder and inside the test reranker.

use twox_hash::XxHash64;

use super::Embedder;
use crate::error::{Error, ModelError, Result};

const HASH_SEED: u64 = 0x6773_6978; // "gsix"

pub const DEFAULT_DIM: usize = 256;

/// Lowercased alphanumeric runs of `text`.
pub fn tokenize(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(|t| t.to_lowercase())
}

#[inline]
fn bucket_and_sign(token: &str, d: usize) -> (usize, f64) {
    let h = XxHash64::oneshot(HASH_SEED, token.as_bytes());
    let bucket = (h % d as u64) as usize;
    let sign = if h >> 63 == 0 { 1.0 } else { -1.0 };
    (bucket, sign)
}

fn accumulate(text: &str, d: usize) -> Vec<f64> {
    assert!(d >= 8, "hash embedding dimension must be at least 8, got {d}");
    let mut v = vec![0.0; d];
    for tok in tokenize(text) {
        let (b, s) = bucket_and_sign(&tok, d);
        v[b] += s;
    }
    v
}

/// Signed token counts hashed into `d` buckets, L2-normalized.
/// Text without tokens maps to the zero vector.
pub fn hash_embed(text: &str, d: usize) -> Vec<f64> {
    let mut v = accumulate(text, d);
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    v
}

/// Signed bucket occupancy: the sign of each bucket's accumulated count.
/// Unlike [`hash_embed`] this does not shrink with document length.
pub fn hash_presence(text: &str, d: usize) -> Vec<f64> {
    let mut v = accumulate(text, d);
    v.iter_mut().for_each(|x| *x = if *x == 0.0 { 0.0 } else { x.signum() });
    v
}

/// [`Embedder`] backed by [`hash_embed`] for both queries and nodes.
#[derive(Clone, Copy, Debug)]
pub struct HashEmbedder {
    dim: usize,
}

impl HashEmbedder {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 8 {
            return Err(Error::InvalidParameter(format!(
                "hash embedding dimension must be at least 8, got {dim}"
            )));
        }
        Ok(Self { dim })
    }
}

impl Default for HashEmbedder {
    fn default() -> Self {
        Self { dim: DEFAULT_DIM }
    }
}

impl Embedder for HashEmbedder {
    fn dimension(&self) -> usize {
        self.dim
    }

    fn encode_query(&self, text: &str) -> Result<Vec<f64>, ModelError> {
        Ok(hash_embed(text, self.dim))
    }

    fn encode_node(&self, text: &str) -> Result<Vec<f64>, ModelError> {
        Ok(hash_embed(text, self.dim))
    }
}
