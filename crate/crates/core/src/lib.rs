//! Retrieval over corpus graphs, where every node carries a key and a text.
//!
//! The crate provides exact vector search, plain and graph-aware
//! reranking, one-hop semantic-topological expansion, personalized
//! PageRank, and the iterative pipeline that interleaves reranking with
//! expansion under a node budget. [`metrics`] holds the evaluation side,
//! including a topology-aware recall that credits gold nodes close to the
//! retrieved set.

pub mod encoding;
pub mod engine;
pub mod error;
pub mod expansion;
pub mod graph;
pub mod io;
pub mod metrics;
pub mod ranked;
pub mod rerank;

pub use encoding::{build_index, vector_search, Embedder, EmbeddingIndex, HashEmbedder, IndexOptions};
pub use engine::{
    baseline_re2, baseline_vs, fastinsight_retrieve, FastInsightConfig, Pipeline, Retrieval,
    RetrievalTrace, StageTimings,
};
pub use error::{Error, ModelError, Result};
pub use expansion::{stex, stex_scores, StexConfig, StexScore};
pub use graph::{CorpusGraph, NodeId, NodeRecord, View};
pub use ranked::{RankedList, Scored};
pub use rerank::{granker, rerank_plain, GrankerConfig, HashReranker, LatentBatch, Reranker};
