//! HTTP embedding client.
//!
//! Request: `POST {"texts": [..]}`. Response: `{"vectors": [[..], ..]}`,
//! one vector per text in request order.

use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::Embedder;
use crate::error::{Error, ModelError, Result};

#[derive(Serialize)]
struct EmbedRequest<'a> {
    texts: &'a [&'a str],
}

#[derive(Deserialize)]
struct EmbedResponse {
    vectors: Vec<Vec<f64>>,
}

const MAX_RESPONSE_BYTES: u64 = 1 << 30;

#[derive(Debug, Clone)]
pub struct RemoteEmbedder {
    url: String,
    dim: usize,
    agent: ureq::Agent,
}

pub(crate) fn remote_agent(timeout: Duration) -> ureq::Agent {
    ureq::Agent::config_builder()
        .timeout_global(Some(timeout))
        .build()
        .into()
}

impl RemoteEmbedder {
    pub fn new(url: impl Into<String>, dim: usize) -> Self {
        Self {
            url: url.into(),
            dim,
            agent: remote_agent(Duration::from_secs(120)),
        }
    }

    /// Asks the endpoint for one vector to learn its dimension.
    pub fn probe(url: impl Into<String>) -> Result<Self> {
        let mut this = Self::new(url, 0);
        let v = this.post(&["dimension probe"]).map_err(|e| Error::QueryEncoder(e.message))?;
        this.dim = v.first().map(Vec::len).unwrap_or(0);
        if this.dim == 0 {
            return Err(Error::QueryEncoder("endpoint returned an empty vector".into()));
        }
        Ok(this)
    }

    fn post(&self, texts: &[&str]) -> Result<Vec<Vec<f64>>, ModelError> {
        let resp: EmbedResponse = self
            .agent
            .post(&self.url)
            .send_json(EmbedRequest { texts })
            .map_err(|e| ModelError::new(format!("POST {}: {e}", self.url)))?
            .body_mut()
            .with_config()
            .limit(MAX_RESPONSE_BYTES)
            .read_json()
            .map_err(|e| ModelError::new(format!("bad response from {}: {e}", self.url)))?;
        if resp.vectors.len() != texts.len() {
            return Err(ModelError::new(format!(
                "sent {} texts, received {} vectors",
                texts.len(),
                resp.vectors.len()
            )));
        }
        if self.dim > 0 {
            if let Some(i) = resp.vectors.iter().position(|v| v.len() != self.dim) {
                return Err(ModelError::at(
                    i,
                    format!("vector has length {}, expected {}", resp.vectors[i].len(), self.dim),
                ));
            }
        }
        Ok(resp.vectors)
    }
}

impl Embedder for RemoteEmbedder {
    fn dimension(&self) -> usize {
        self.dim
    }

    fn encode_query(&self, text: &str) -> Result<Vec<f64>, ModelError> {
        Ok(self.post(&[text])?.remove(0))
    }

    fn encode_node(&self, text: &str) -> Result<Vec<f64>, ModelError> {
        Ok(self.post(&[text])?.remove(0))
    }

    fn encode_nodes(&self, texts: &[&str]) -> Result<Vec<Vec<f64>>, ModelError> {
        if texts.is_empty() {
            return Ok(Vec::new());
        }
        self.post(texts)
    }
}
