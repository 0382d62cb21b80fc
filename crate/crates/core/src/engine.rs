//! Retrieval pipelines composed from the operators: the iterative
//! rerank/expand loop, plus vector search, retrieve-then-rerank and
//! PageRank baselines.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::encoding::{vector_search, Embedder, EmbeddingIndex};
use crate::error::{Error, Result};
use crate::expansion::{stex, StexConfig};
use crate::graph::{personalized_pagerank, CorpusGraph, NodeId, PprConfig, View};
use crate::ranked::{RankedList, Scored};
use crate::rerank::{granker, rerank_plain, GrankerConfig, Reranker};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FastInsightConfig {
    /// Nodes seeded by vector search and added per expansion round.
    pub batch: usize,
    /// Latent smoothing factor of the graph-aware reranker.
    pub alpha: f64,
    /// Weight of structural evidence during expansion.
    pub beta: f64,
    /// Maximum number of retrieved nodes.
    pub budget: usize,
    /// Metric cutoff; does not affect retrieval.
    pub k_report: usize,
    pub view: View,
}

impl Default for FastInsightConfig {
    fn default() -> Self {
        Self {
            batch: 10,
            alpha: 0.2,
            beta: 1.0,
            budget: 100,
            k_report: 10,
            view: View::Undirected,
        }
    }
}

impl FastInsightConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch == 0 || self.batch > self.budget {
            return Err(Error::InvalidParameter(format!(
                "need 1 ≤ batch ≤ budget, got batch={} budget={}",
                self.batch, self.budget
            )));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::InvalidParameter(format!("alpha must lie in [0, 1], got {}", self.alpha)));
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(Error::InvalidParameter(format!("beta must be non-negative, got {}", self.beta)));
        }
        if self.k_report == 0 {
            return Err(Error::InvalidParameter("k_report must be at least 1".into()));
        }
        Ok(())
    }

    fn granker(&self) -> GrankerConfig {
        GrankerConfig {
            alpha: self.alpha,
            view: self.view,
        }
    }

    fn stex(&self) -> StexConfig {
        StexConfig {
            beta: self.beta,
            view: self.view,
        }
    }
}

/// Wall-clock time spent per stage of one retrieval.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct StageTimings {
    pub embed: Duration,
    pub vector_search: Duration,
    pub rerank: Duration,
    pub granker: Duration,
    pub stex: Duration,
    pub ppr: Duration,
}

impl StageTimings {
    pub fn sum(&self) -> Duration {
        self.embed + self.vector_search + self.rerank + self.granker + self.stex + self.ppr
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RetrievalTrace {
    /// Retrieved node order after each reranking pass.
    pub snapshots: Vec<Vec<NodeId>>,
    /// Vector-search seeds before any reranking.
    pub initial: RankedList,
    pub vector_search_calls: usize,
    pub rerank_calls: usize,
    pub granker_calls: usize,
    pub stex_calls: usize,
    pub ppr_calls: usize,
    pub timings: StageTimings,
    pub total: Duration,
}

#[derive(Clone, Debug)]
pub struct Retrieval {
    pub ranked: RankedList,
    pub trace: RetrievalTrace,
}

fn timed<T>(slot: &mut Duration, f: impl FnOnce() -> T) -> T {
    let start = Instant::now();
    let out = f();
    *slot += start.elapsed();
    out
}

/// Shared read-only retrieval context. Cheap to copy; safe to use from many
/// threads at once.
#[derive(Clone, Copy)]
pub struct Pipeline<'a> {
    graph: &'a CorpusGraph,
    index: &'a EmbeddingIndex,
    embedder: &'a dyn Embedder,
    reranker: &'a dyn Reranker,
}

impl<'a> Pipeline<'a> {
    pub fn new(
        graph: &'a CorpusGraph,
        index: &'a EmbeddingIndex,
        embedder: &'a dyn Embedder,
        reranker: &'a dyn Reranker,
    ) -> Result<Self> {
        if graph.is_empty() {
            return Err(Error::EmptyGraph);
        }
        if index.len() != graph.len() {
            return Err(Error::Shape(format!(
                "index has {} vectors, graph has {} nodes",
                index.len(),
                graph.len()
            )));
        }
        if index.dimension() != embedder.dimension() {
            return Err(Error::DimensionMismatch {
                expected: index.dimension(),
                actual: embedder.dimension(),
            });
        }
        Ok(Self {
            graph,
            index,
            embedder,
            reranker,
        })
    }

    pub fn graph(&self) -> &'a CorpusGraph {
        self.graph
    }

    pub fn index(&self) -> &'a EmbeddingIndex {
        self.index
    }

    pub fn embed_query(&self, query: &str) -> Result<Vec<f64>> {
        let v = self
            .embedder
            .encode_query(query)
            .map_err(|e| Error::QueryEncoder(e.to_string()))?;
        self.index.prepare_query(v)
    }

    /// Vector-search seeds, graph-aware rerank, then rounds of one-hop
    /// expansion followed by reranking until the budget is filled or the
    /// frontier runs dry.
    pub fn fastinsight(&self, query: &str, cfg: &FastInsightConfig) -> Result<Retrieval> {
        cfg.validate()?;
        let start = Instant::now();
        let mut trace = RetrievalTrace::default();
        let v_q = timed(&mut trace.timings.embed, || self.embed_query(query))?;
        let g = self.graph;
        let (gcfg, scfg) = (cfg.granker(), cfg.stex());

        let seeds = timed(&mut trace.timings.vector_search, || {
            vector_search(&v_q, self.index, cfg.batch)
        })?;
        trace.vector_search_calls += 1;
        trace.initial = seeds.clone();

        let mut ret = timed(&mut trace.timings.granker, || {
            granker(query, &seeds, g, self.reranker, &gcfg)
        })?;
        trace.granker_calls += 1;
        trace.snapshots.push(ret.node_vec());

        while ret.len() < cfg.budget {
            let add = timed(&mut trace.timings.stex, || stex(&v_q, self.index, g, &ret, &scfg))?;
            trace.stex_calls += 1;
            if add.is_empty() {
                break;
            }
            let k_remain = (ret.len() + cfg.batch).min(cfg.budget) - ret.len();
            let mut grown = ret.clone();
            for e in add.iter().take(k_remain) {
                grown.push(*e);
            }
            ret = timed(&mut trace.timings.granker, || {
                granker(query, &grown, g, self.reranker, &gcfg)
            })?;
            trace.granker_calls += 1;
            trace.snapshots.push(ret.node_vec());
        }
        trace.total = start.elapsed();
        Ok(Retrieval { ranked: ret, trace })
    }

    pub fn vector_search(&self, query: &str, k: usize) -> Result<Retrieval> {
        let start = Instant::now();
        let mut trace = RetrievalTrace::default();
        let v_q = timed(&mut trace.timings.embed, || self.embed_query(query))?;
        let ranked = timed(&mut trace.timings.vector_search, || vector_search(&v_q, self.index, k))?;
        trace.vector_search_calls += 1;
        trace.initial = ranked.clone();
        trace.snapshots.push(ranked.node_vec());
        trace.total = start.elapsed();
        Ok(Retrieval { ranked, trace })
    }

    /// Vector search for `pool` candidates, then plain reranking to `k`.
    pub fn re2(&self, query: &str, pool: usize, k: usize) -> Result<Retrieval> {
        if pool < k {
            return Err(Error::InvalidParameter(format!("pool ({pool}) must be ≥ k ({k})")));
        }
        let start = Instant::now();
        let mut trace = RetrievalTrace::default();
        let v_q = timed(&mut trace.timings.embed, || self.embed_query(query))?;
        let cand = timed(&mut trace.timings.vector_search, || vector_search(&v_q, self.index, pool))?;
        trace.vector_search_calls += 1;
        trace.initial = cand.clone();
        let ranked = timed(&mut trace.timings.rerank, || {
            rerank_plain(query, &cand, self.graph, self.reranker, k)
        })?;
        trace.rerank_calls += 1;
        trace.snapshots.push(ranked.node_vec());
        trace.total = start.elapsed();
        Ok(Retrieval { ranked, trace })
    }

    /// Vector-search seeds followed by the `budget − seeds` best
    /// personalized-PageRank nodes outside the seed set.
    pub fn ppr(&self, query: &str, seeds: usize, budget: usize, cfg: &PprConfig) -> Result<Retrieval> {
        if seeds == 0 || seeds > budget {
            return Err(Error::InvalidParameter(format!(
                "need 1 ≤ seeds ≤ budget, got seeds={seeds} budget={budget}"
            )));
        }
        let start = Instant::now();
        let mut trace = RetrievalTrace::default();
        let v_q = timed(&mut trace.timings.embed, || self.embed_query(query))?;
        let vs = timed(&mut trace.timings.vector_search, || vector_search(&v_q, self.index, seeds))?;
        trace.vector_search_calls += 1;
        trace.initial = vs.clone();
        let positive = vs.iter().any(|s| s.score > 0.0);
        let weights = RankedList::from_ordered(
            vs.iter()
                .map(|s| Scored::new(s.node, if positive { s.score.max(0.0) } else { 1.0 })),
        );
        let walked = timed(&mut trace.timings.ppr, || {
            personalized_pagerank(self.graph, &weights, cfg, budget - vs.len())
        })?;
        trace.ppr_calls += 1;
        let mut ranked = vs;
        for e in walked.iter() {
            ranked.push(*e);
        }
        trace.snapshots.push(ranked.node_vec());
        trace.total = start.elapsed();
        Ok(Retrieval { ranked, trace })
    }
}

/// Runs the iterative rerank/expand retrieval for one query.
pub fn fastinsight_retrieve(
    query: &str,
    graph: &CorpusGraph,
    index: &EmbeddingIndex,
    embedder: &dyn Embedder,
    reranker: &dyn Reranker,
    cfg: &FastInsightConfig,
) -> Result<Retrieval> {
    Pipeline::new(graph, index, embedder, reranker)?.fastinsight(query, cfg)
}

pub fn baseline_vs(
    query: &str,
    embedder: &dyn Embedder,
    index: &EmbeddingIndex,
    k: usize,
) -> Result<RankedList> {
    let v = embedder
        .encode_query(query)
        .map_err(|e| Error::QueryEncoder(e.to_string()))?;
    vector_search(&index.prepare_query(v)?, index, k)
}

pub fn baseline_re2(
    query: &str,
    graph: &CorpusGraph,
    index: &EmbeddingIndex,
    embedder: &dyn Embedder,
    reranker: &dyn Reranker,
    pool: usize,
    k: usize,
) -> Result<RankedList> {
    Ok(Pipeline::new(graph, index, embedder, reranker)?
        .re2(query, pool, k)?
        .ranked)
}
