use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failure reported by a pluggable model (embedder or reranker).
///
/// `index` points at the offending item of a batch call when the model can
/// tell which one failed. Callers translate it into a node key.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelError {
    pub index: Option<usize>,
    pub message: String,
}

impl ModelError {
    pub fn new(message: impl Into<String>) -> Self {
        Self {
            index: None,
            message: message.into(),
        }
    }

    pub fn at(index: usize, message: impl Into<String>) -> Self {
        Self {
            index: Some(index),
            message: message.into(),
        }
    }
}

impl std::fmt::Display for ModelError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.index {
            Some(i) => write!(f, "item {i}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ModelError {}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{source_name}:{line}: {message}")]
    Parse {
        source_name: &'static str,
        line: usize,
        message: String,
    },

    #[error("edges reference unknown node keys: {}", .keys.join(", "))]
    UnknownEdgeKeys { keys: Vec<String> },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("unknown node key `{0}`")]
    UnknownKey(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("vector cache invalid: {0}")]
    CacheInvalid(String),

    #[error("encoder failed on node `{key}`: {message}")]
    Encoder { key: String, message: String },

    #[error("query encoder failed: {0}")]
    QueryEncoder(String),

    #[error("reranker failed on node `{key}`: {message}")]
    Reranker { key: String, message: String },

    #[error("personalized pagerank did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("oracle set is empty")]
    EmptyOracle,

    #[error("graph is empty")]
    EmptyGraph,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
