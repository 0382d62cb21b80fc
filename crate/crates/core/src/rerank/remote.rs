//! HTTP reranker client returning pre-head latents.
//!
//! Request: `POST {"query": .., "documents": [..], "return_latents": true}`.
//! Response: `{"latents": [[..], ..]}`, one row per document. Scoring runs
//! locally through an [`MlpHead`] loaded from the model's head weights.

use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{LatentBatch, MlpHead, Reranker};
use crate::encoding::remote_agent;
use crate::error::{Error, ModelError, Result};

#[derive(Serialize)]
struct RerankRequest<'a> {
    query: &'a str,
    documents: &'a [&'a str],
    return_latents: bool,
}

#[derive(Deserialize)]
struct RerankResponse {
    latents: Vec<Vec<f64>>,
}

const MAX_RESPONSE_BYTES: u64 = 1 << 30;

#[derive(Debug, Clone)]
pub struct RemoteReranker {
    url: String,
    head: MlpHead,
    batch_size: usize,
    agent: ureq::Agent,
}

impl RemoteReranker {
    pub fn new(url: impl Into<String>, head: MlpHead) -> Self {
        Self {
            url: url.into(),
            head,
            batch_size: 128,
            agent: remote_agent(Duration::from_secs(120)),
        }
    }

    pub fn with_batch_size(mut self, batch_size: usize) -> Result<Self> {
        if batch_size == 0 {
            return Err(Error::InvalidParameter("batch size must be positive".into()));
        }
        self.batch_size = batch_size;
        Ok(self)
    }

    fn post(&self, query: &str, documents: &[&str]) -> Result<Vec<Vec<f64>>, ModelError> {
        let resp: RerankResponse = self
            .agent
            .post(&self.url)
            .send_json(RerankRequest {
                query,
                documents,
                return_latents: true,
            })
            .map_err(|e| ModelError::new(format!("POST {}: {e}", self.url)))?
            .body_mut()
            .with_config()
            .limit(MAX_RESPONSE_BYTES)
            .read_json()
            .map_err(|e| ModelError::new(format!("bad response from {}: {e}", self.url)))?;
        if resp.latents.len() != documents.len() {
            return Err(ModelError::new(format!(
                "sent {} documents, received {} latents",
                documents.len(),
                resp.latents.len()
            )));
        }
        Ok(resp.latents)
    }
}

impl Reranker for RemoteReranker {
    fn latent_dim(&self) -> usize {
        self.head.input_dim()
    }

    fn extract_latent(&self, query: &str, content: &str) -> Result<Vec<f64>, ModelError> {
        Ok(self.post(query, &[content])?.remove(0))
    }

    fn extract_latents(&self, query: &str, contents: &[&str]) -> Result<LatentBatch, ModelError> {
        let dim = self.latent_dim();
        let mut data = Vec::with_capacity(contents.len() * dim);
        for (c, chunk) in contents.chunks(self.batch_size).enumerate() {
            let offset = c * self.batch_size;
            let rows = self.post(query, chunk).map_err(|e| ModelError {
                index: e.index.map(|i| i + offset).or(Some(offset)),
                message: e.message,
            })?;
            for (i, row) in rows.into_iter().enumerate() {
                if row.len() != dim {
                    return Err(ModelError::at(
                        offset + i,
                        format!("latent has length {}, expected {dim}", row.len()),
                    ));
                }
                data.extend(row);
            }
        }
        LatentBatch::new(dim, data).map_err(|e| ModelError::new(e.to_string()))
    }

    fn head_score(&self, latent: &[f64]) -> f64 {
        self.head.score(latent)
    }
}
