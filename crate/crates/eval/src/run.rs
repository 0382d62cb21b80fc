//! Batch evaluation: load a dataset, retrieve for every judged query, score
//! against the judgments and write the reports.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use fastinsight::encoding::{build_index, IndexOptions, RemoteEmbedder};
use fastinsight::graph::{LoadStats, PprConfig};
use fastinsight::metrics::{oracle_from_keys, Oracle, PathMode, QueryMetrics, TrConfig};
use fastinsight::rerank::{ContentWeighting, HashReranker, MlpHead, RemoteReranker};
use fastinsight::{
    CorpusGraph, Embedder, EmbeddingIndex, FastInsightConfig, HashEmbedder, Pipeline, Reranker,
    Retrieval,
};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{load_qrels, load_queries, Query};
use crate::error::{EvalError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Top-budget nodes by vector similarity.
    Vs,
    /// Vector search for budget candidates, reranked.
    Re2,
    /// Iterative graph-aware reranking and expansion.
    Fastinsight,
    /// Vector-search seeds followed by personalized PageRank.
    Ppr,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum EncoderKind {
    Hash,
    Remote,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum RerankerKind {
    /// Hashed query terms weighted by their presence in the node text.
    Coverage,
    /// Dot product of the hashed query and node texts.
    Cosine,
    /// Latents from an HTTP endpoint, scored by a local head.
    Remote,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub nodes: PathBuf,
    pub edges: PathBuf,
    pub queries: PathBuf,
    pub qrels: PathBuf,
    pub method: Method,
    pub retrieval: FastInsightConfig,
    pub encoder: EncoderKind,
    pub remote_url: Option<String>,
    /// Hash encoder and hash reranker width.
    pub dim: usize,
    pub normalize: bool,
    pub cache: Option<PathBuf>,
    pub reranker: RerankerKind,
    pub reranker_url: Option<String>,
    pub head: Option<PathBuf>,
    /// Spread of the seeded hash-reranker head weights around 1.
    pub head_jitter: f64,
    pub path_mode: PathMode,
    pub ppr_restart: f64,
    pub out: PathBuf,
    pub jobs: usize,
    pub seed: u64,
    /// Leading queries run serially and left out of timing aggregates.
    pub warmup: usize,
    /// Times each query is retrieved; the median-QPT run is reported.
    pub timing_repeats: usize,
}

impl RunConfig {
    pub fn new(dataset_dir: impl AsRef<Path>, out: impl Into<PathBuf>) -> Self {
        let d = dataset_dir.as_ref();
        Self {
            nodes: d.join("nodes.jsonl"),
            edges: d.join("edges.tsv"),
            queries: d.join("queries.jsonl"),
            qrels: d.join("qrels.tsv"),
            method: Method::Fastinsight,
            retrieval: FastInsightConfig::default(),
            encoder: EncoderKind::Hash,
            remote_url: None,
            dim: fastinsight::encoding::DEFAULT_DIM,
            normalize: true,
            cache: None,
            reranker: RerankerKind::Coverage,
            reranker_url: None,
            head: None,
            head_jitter: 0.0,
            path_mode: PathMode::MinCost,
            ppr_restart: 0.15,
            out: out.into(),
            jobs: 1,
            seed: 0,
            warmup: 3,
            timing_repeats: 1,
        }
    }

    /// Checks parameters, then input paths. Nothing is loaded.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(EvalError::Config(m));
        self.retrieval.validate().map_err(|e| EvalError::Config(e.to_string()))?;
        if self.jobs == 0 {
            return bad("jobs must be at least 1".into());
        }
        if self.timing_repeats == 0 {
            return bad("timing repeats must be at least 1".into());
        }
        if self.dim < 8 {
            return bad(format!("dim must be at least 8, got {}", self.dim));
        }
        if self.encoder == EncoderKind::Remote && self.remote_url.is_none() {
            return bad("--encoder remote needs --remote-url".into());
        }
        if self.reranker == RerankerKind::Remote && (self.reranker_url.is_none() || self.head.is_none()) {
            return bad("--reranker remote needs --reranker-url and --head".into());
        }
        if !(self.head_jitter >= 0.0 && self.head_jitter.is_finite()) {
            return bad(format!("head jitter must be non-negative, got {}", self.head_jitter));
        }
        if self.method == Method::Ppr && !(self.ppr_restart > 0.0 && self.ppr_restart < 1.0) {
            return bad(format!("restart must lie in (0, 1), got {}", self.ppr_restart));
        }
        for p in [&self.nodes, &self.edges, &self.queries, &self.qrels] {
            if !p.is_file() {
                return bad(format!("{} does not exist", p.display()));
            }
        }
        Ok(())
    }

    fn tr(&self) -> TrConfig {
        TrConfig {
            view: self.retrieval.view,
            path_mode: self.path_mode,
        }
    }
}

/// A loaded dataset with its models, reusable across runs.
pub struct Workspace {
    pub graph: CorpusGraph,
    pub load_stats: LoadStats,
    pub index: EmbeddingIndex,
    pub index_build: Duration,
    embedder: Box<dyn Embedder>,
    reranker: Box<dyn Reranker>,
    /// Judged queries, sorted by id, with resolved gold sets.
    pub judged: Vec<(Query, Oracle)>,
    pub skipped_unjudged: usize,
    pub unknown_gold_keys: usize,
}

impl Workspace {
    pub fn load(cfg: &RunConfig) -> Result<Self> {
        cfg.validate()?;
        let (graph, load_stats) = CorpusGraph::load_files(&cfg.nodes, &cfg.edges)?;
        log::info!("{} nodes, {} edges", graph.len(), graph.edge_count());

        let embedder: Box<dyn Embedder> = match cfg.encoder {
            EncoderKind::Hash => Box::new(HashEmbedder::new(cfg.dim)?),
            EncoderKind::Remote => Box::new(RemoteEmbedder::probe(cfg.remote_url.clone().unwrap_or_default())?),
        };
        let reranker: Box<dyn Reranker> = match cfg.reranker {
            RerankerKind::Coverage | RerankerKind::Cosine => {
                let weighting = if cfg.reranker == RerankerKind::Coverage {
                    ContentWeighting::Presence
                } else {
                    ContentWeighting::Normalized
                };
                let head = HashReranker::seeded_head(cfg.dim, cfg.seed, cfg.head_jitter);
                Box::new(HashReranker::new(cfg.dim, weighting, head))
            }
            RerankerKind::Remote => {
                let head = MlpHead::from_file(cfg.head.as_ref().expect("validated"))?;
                Box::new(RemoteReranker::new(cfg.reranker_url.clone().unwrap_or_default(), head))
            }
        };

        let start = Instant::now();
        let opts = IndexOptions {
            normalize: cfg.normalize,
            cache: cfg.cache.clone(),
            ..Default::default()
        };
        let index = build_index(&graph, embedder.as_ref(), &opts)?;
        let index_build = start.elapsed();

        let mut queries = load_queries(&cfg.queries)?;
        queries.sort_by(|a, b| a.id.cmp(&b.id));
        let qrels = load_qrels(&cfg.qrels)?;
        let mut judged = Vec::new();
        let (mut skipped_unjudged, mut unknown_gold_keys) = (0, 0);
        for q in queries {
            let Some(keys) = qrels.get(&q.id) else {
                skipped_unjudged += 1;
                continue;
            };
            let known: Vec<&str> = keys.iter().map(String::as_str).filter(|k| graph.get(k).is_some()).collect();
            if known.len() < keys.len() {
                log::warn!("query {}: {} gold keys not in the graph", q.id, keys.len() - known.len());
                unknown_gold_keys += keys.len() - known.len();
            }
            if known.is_empty() {
                skipped_unjudged += 1;
                continue;
            }
            let oracle = oracle_from_keys(&graph, known)?;
            judged.push((q, oracle));
        }
        if skipped_unjudged > 0 {
            log::warn!("{skipped_unjudged} queries have no usable judgments and are skipped");
        }
        Ok(Self {
            graph,
            load_stats,
            index,
            index_build,
            embedder,
            reranker,
            judged,
            skipped_unjudged,
            unknown_gold_keys,
        })
    }

    pub fn pipeline(&self) -> Result<Pipeline<'_>> {
        Ok(Pipeline::new(&self.graph, &self.index, self.embedder.as_ref(), self.reranker.as_ref())?)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct QueryRow {
    pub id: String,
    pub metrics: QueryMetrics,
    pub retrieved: usize,
    pub gold: usize,
}

/// Milliseconds per stage of one query. `qpt_ms` is the retrieval wall
/// clock; `metrics_ms` is spent afterwards and not part of it.
#[derive(Clone, Debug, Default, Serialize)]
pub struct TimingRow {
    pub id: String,
    pub qpt_ms: f64,
    pub embed_ms: f64,
    pub vector_search_ms: f64,
    pub rerank_ms: f64,
    pub granker_ms: f64,
    pub stex_ms: f64,
    pub ppr_ms: f64,
    pub metrics_ms: f64,
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct Summary {
    pub mean: f64,
    pub p95: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Self {
        if values.is_empty() {
            return Self::default();
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let rank = (0.95 * v.len() as f64).ceil() as usize;
        Self {
            mean: v.iter().sum::<f64>() / v.len() as f64,
            p95: v[rank.max(1) - 1],
        }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct MetricMeans {
    pub recall_at_k: f64,
    pub ndcg_at_k: f64,
    pub recall_uncapped: f64,
    pub tr: f64,
    pub miss_tr: f64,
    pub recall_total: f64,
    pub recall_vs: f64,
    pub delta_r: f64,
}

impl MetricMeans {
    fn of(rows: &[QueryRow]) -> Self {
        let n = rows.len().max(1) as f64;
        let mean = |f: fn(&QueryMetrics) -> f64| rows.iter().map(|r| f(&r.metrics)).sum::<f64>() / n;
        Self {
            recall_at_k: mean(|m| m.recall_at_k),
            ndcg_at_k: mean(|m| m.ndcg_at_k),
            recall_uncapped: mean(|m| m.recall_uncapped),
            tr: mean(|m| m.tr),
            miss_tr: mean(|m| m.miss_tr),
            recall_total: mean(|m| m.recall_total),
            recall_vs: mean(|m| m.recall_vs),
            delta_r: mean(|m| m.delta_r),
        }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct TimingSummary {
    pub timed_queries: usize,
    pub warmup_queries: usize,
    pub qpt_ms: Summary,
    pub embed_ms: Summary,
    pub vector_search_ms: Summary,
    pub rerank_ms: Summary,
    pub granker_ms: Summary,
    pub stex_ms: Summary,
    pub ppr_ms: Summary,
    pub metrics_ms: Summary,
}

impl TimingSummary {
    fn of(rows: &[TimingRow], warmup: usize) -> Self {
        let col = |f: fn(&TimingRow) -> f64| Summary::of(&rows.iter().map(f).collect::<Vec<_>>());
        Self {
            timed_queries: rows.len(),
            warmup_queries: warmup,
            qpt_ms: col(|r| r.qpt_ms),
            embed_ms: col(|r| r.embed_ms),
            vector_search_ms: col(|r| r.vector_search_ms),
            rerank_ms: col(|r| r.rerank_ms),
            granker_ms: col(|r| r.granker_ms),
            stex_ms: col(|r| r.stex_ms),
            ppr_ms: col(|r| r.ppr_ms),
            metrics_ms: col(|r| r.metrics_ms),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DatasetSummary {
    pub nodes: usize,
    pub edges: usize,
    pub self_loops_dropped: usize,
    pub duplicate_edges: usize,
    pub evaluated_queries: usize,
    pub skipped_queries: usize,
    pub unknown_gold_keys: usize,
    pub index_build_ms: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub method: Method,
    pub k: usize,
    pub config: RunConfig,
    pub dataset: DatasetSummary,
    pub metrics: MetricMeans,
    pub timing: TimingSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

pub struct Outcome {
    pub report: Report,
    pub rows: Vec<QueryRow>,
    pub timings: Vec<TimingRow>,
}

fn retrieve(p: &Pipeline<'_>, cfg: &RunConfig, text: &str) -> fastinsight::Result<Retrieval> {
    let r = &cfg.retrieval;
    match cfg.method {
        Method::Vs => p.vector_search(text, r.budget),
        Method::Re2 => p.re2(text, r.budget, r.budget),
        Method::Fastinsight => p.fastinsight(text, r),
        Method::Ppr => {
            let ppr = PprConfig {
                restart: cfg.ppr_restart,
                view: r.view,
                ..Default::default()
            };
            p.ppr(text, r.batch, r.budget, &ppr)
        }
    }
}

fn evaluate_one(
    p: &Pipeline<'_>,
    cfg: &RunConfig,
    query: &Query,
    oracle: &Oracle,
) -> Result<(QueryRow, TimingRow)> {
    let wrap = |source| EvalError::Query {
        id: query.id.clone(),
        source,
    };
    let out = retrieve(p, cfg, &query.text).map_err(wrap)?;
    let start = Instant::now();
    let metrics = QueryMetrics::compute(
        p.graph(),
        &out.ranked,
        &out.trace.initial,
        oracle,
        cfg.retrieval.k_report,
        &cfg.tr(),
    )
    .map_err(wrap)?;
    let metrics_time = start.elapsed();
    let t = &out.trace.timings;
    let timing = TimingRow {
        id: query.id.clone(),
        qpt_ms: ms(out.trace.total),
        embed_ms: ms(t.embed),
        vector_search_ms: ms(t.vector_search),
        rerank_ms: ms(t.rerank),
        granker_ms: ms(t.granker),
        stex_ms: ms(t.stex),
        ppr_ms: ms(t.ppr),
        metrics_ms: ms(metrics_time),
    };
    let row = QueryRow {
        id: query.id.clone(),
        metrics,
        retrieved: out.ranked.len(),
        gold: oracle.len(),
    };
    Ok((row, timing))
}

/// Keeps the run with the median QPT.
fn median_run(mut runs: Vec<(QueryRow, TimingRow)>) -> (QueryRow, TimingRow) {
    runs.sort_by(|a, b| a.1.qpt_ms.total_cmp(&b.1.qpt_ms));
    let mid = runs.len() / 2;
    runs.swap_remove(mid)
}

type Measured = Result<(QueryRow, TimingRow)>;

/// Evaluates every judged query of `ws` under `cfg`. Per-query errors are
/// reported after all queries finish; the rows that did succeed are kept.
pub fn evaluate(ws: &Workspace, cfg: &RunConfig) -> (Outcome, Option<EvalError>) {
    evaluate_many(ws, std::slice::from_ref(cfg))
        .pop()
        .expect("one outcome per configuration")
}

/// Evaluates several configurations query by query, so that slow drift of
/// the machine spreads evenly over all of them. Pool width and warm-up come
/// from the first configuration.
pub fn evaluate_many(ws: &Workspace, cfgs: &[RunConfig]) -> Vec<(Outcome, Option<EvalError>)> {
    let Some(first) = cfgs.first() else {
        return Vec::new();
    };
    let fail = |e: EvalError| -> Vec<(Outcome, Option<EvalError>)> {
        cfgs.iter()
            .map(|c| (empty_outcome(ws, c, &e), Some(EvalError::Config(e.to_string()))))
            .collect()
    };
    let pipeline = match ws.pipeline() {
        Ok(p) => p,
        Err(e) => return fail(e),
    };
    // each repeat round runs the configurations in a fresh seeded order
    let per_query = |(i, (q, o)): (usize, &(Query, Oracle))| -> Vec<Measured> {
        let mut rng = ChaCha8Rng::seed_from_u64(first.seed ^ i as u64);
        let rounds = cfgs.iter().map(|c| c.timing_repeats.max(1)).max().unwrap_or(1);
        let mut runs: Vec<Result<Vec<(QueryRow, TimingRow)>>> = cfgs.iter().map(|_| Ok(Vec::new())).collect();
        let mut order: Vec<usize> = (0..cfgs.len()).collect();
        for round in 0..rounds {
            order.shuffle(&mut rng);
            for &c in &order {
                if round >= cfgs[c].timing_repeats.max(1) {
                    continue;
                }
                if let Ok(done) = &mut runs[c] {
                    match evaluate_one(&pipeline, &cfgs[c], q, o) {
                        Ok(r) => done.push(r),
                        Err(e) => runs[c] = Err(e),
                    }
                }
            }
        }
        runs.into_iter().map(|r| r.map(median_run)).collect()
    };
    let warmup = first.warmup.min(ws.judged.len());
    let (head, tail) = ws.judged.split_at(warmup);
    let mut results: Vec<Vec<Measured>> = head.iter().enumerate().map(per_query).collect();
    match rayon::ThreadPoolBuilder::new().num_threads(first.jobs).build() {
        Ok(pool) => results.extend(pool.install(|| {
            tail.par_iter().enumerate().map(|(i, x)| per_query((i + warmup, x))).collect::<Vec<_>>()
        })),
        Err(e) => return fail(EvalError::Config(format!("cannot start worker pool: {e}"))),
    }

    let mut columns: Vec<Vec<Measured>> = cfgs.iter().map(|_| Vec::with_capacity(results.len())).collect();
    for row in results {
        for (col, r) in columns.iter_mut().zip(row) {
            col.push(r);
        }
    }
    cfgs.iter()
        .zip(columns)
        .map(|(cfg, results)| collect_outcome(ws, cfg, results, warmup))
        .collect()
}

fn collect_outcome(ws: &Workspace, cfg: &RunConfig, results: Vec<Measured>, warmup: usize) -> (Outcome, Option<EvalError>) {
    let mut rows = Vec::with_capacity(results.len());
    let mut timings = Vec::with_capacity(results.len());
    let mut timed = Vec::with_capacity(results.len());
    let mut first_error = None;
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok((row, timing)) => {
                rows.push(row);
                if i >= warmup {
                    timed.push(timing.clone());
                }
                timings.push(timing);
            }
            Err(e) => {
                log::error!("{e}");
                first_error.get_or_insert(e);
            }
        }
    }
    let report = Report {
        method: cfg.method,
        k: cfg.retrieval.k_report,
        config: cfg.clone(),
        dataset: dataset_summary(ws),
        metrics: MetricMeans::of(&rows),
        timing: TimingSummary::of(&timed, warmup),
        error: first_error.as_ref().map(ToString::to_string),
    };
    (Outcome { report, rows, timings }, first_error)
}

fn dataset_summary(ws: &Workspace) -> DatasetSummary {
    DatasetSummary {
        nodes: ws.graph.len(),
        edges: ws.graph.edge_count(),
        self_loops_dropped: ws.load_stats.self_loops_dropped,
        duplicate_edges: ws.load_stats.duplicate_edges,
        evaluated_queries: ws.judged.len(),
        skipped_queries: ws.skipped_unjudged,
        unknown_gold_keys: ws.unknown_gold_keys,
        index_build_ms: ms(ws.index_build),
    }
}

fn empty_outcome(ws: &Workspace, cfg: &RunConfig, e: &EvalError) -> Outcome {
    Outcome {
        report: Report {
            method: cfg.method,
            k: cfg.retrieval.k_report,
            config: cfg.clone(),
            dataset: dataset_summary(ws),
            metrics: MetricMeans::default(),
            timing: TimingSummary::default(),
            error: Some(e.to_string()),
        },
        rows: Vec::new(),
        timings: Vec::new(),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).map_err(EvalError::file(path))?))
}

/// Writes `report.json`, `per_query.csv` (deterministic metric columns) and
/// `timing.csv` (wall-clock columns) into `dir`.
pub fn write_outcome(outcome: &Outcome, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(EvalError::file(dir))?;
    let k = outcome.report.k;

    let mut w = csv::Writer::from_writer(create(&dir.join("per_query.csv"))?);
    w.write_record([
        "query_id".to_string(),
        format!("r{k}"),
        format!("ndcg{k}"),
        "recall_uncapped".into(),
        "tr".into(),
        "miss_tr".into(),
        "recall_total".into(),
        "recall_vs".into(),
        "delta_r".into(),
        "retrieved".into(),
        "gold".into(),
    ])?;
    for r in &outcome.rows {
        let m = &r.metrics;
        w.write_record([
            r.id.clone(),
            m.recall_at_k.to_string(),
            m.ndcg_at_k.to_string(),
            m.recall_uncapped.to_string(),
            m.tr.to_string(),
            m.miss_tr.to_string(),
            m.recall_total.to_string(),
            m.recall_vs.to_string(),
            m.delta_r.to_string(),
            r.retrieved.to_string(),
            r.gold.to_string(),
        ])?;
    }
    w.flush()?;

    let mut w = csv::Writer::from_writer(create(&dir.join("timing.csv"))?);
    for t in &outcome.timings {
        w.serialize(t)?;
    }
    w.flush()?;

    let mut f = create(&dir.join("report.json"))?;
    serde_json::to_writer_pretty(&mut f, &outcome.report)?;
    f.write_all(b"\n")?;
    f.flush()?;
    Ok(())
}

/// Loads, evaluates and writes into `cfg.out`. On a per-query failure the
/// completed rows are still written before the error is returned.
pub fn run_eval(cfg: &RunConfig) -> Result<Report> {
    let ws = Workspace::load(cfg)?;
    let (outcome, err) = evaluate(&ws, cfg);
    write_outcome(&outcome, &cfg.out)?;
    match err {
        Some(e) => Err(e),
        None => Ok(outcome.report),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepPoint {
    pub budget: usize,
    pub qpt_ms_mean: f64,
    pub qpt_ms_p95: f64,
    pub recall_at_k: f64,
    pub tr: f64,
    pub miss_tr: f64,
    pub recall_total: f64,
    pub delta_r: f64,
}

pub const DEFAULT_SWEEP: [usize; 10] = [10, 20, 30, 40, 50, 60, 70, 80, 90, 100];

/// One evaluation per budget, written to `out/budget_{b}/`, plus
/// `out/sweep.csv` with one aggregate row per budget. The dataset is loaded
/// once and every query runs at all budgets before the next query starts.
/// The batch is clamped to each budget.
pub fn run_sweep(cfg: &RunConfig, budgets: &[usize]) -> Result<Vec<SweepPoint>> {
    if budgets.is_empty() || budgets.contains(&0) {
        return Err(EvalError::Config("sweep budgets must be positive".into()));
    }
    let ws = Workspace::load(cfg)?;
    let cfgs: Vec<RunConfig> = budgets
        .iter()
        .map(|&b| {
            let mut c = cfg.clone();
            c.retrieval.budget = b;
            c.retrieval.batch = c.retrieval.batch.min(b);
            c.out = cfg.out.join(format!("budget_{b}"));
            c
        })
        .collect();
    let mut points = Vec::with_capacity(budgets.len());
    let mut first_error = None;
    for (c, (outcome, err)) in cfgs.iter().zip(evaluate_many(&ws, &cfgs)) {
        write_outcome(&outcome, &c.out)?;
        if let Some(e) = err {
            first_error.get_or_insert(e);
        }
        let r = &outcome.report;
        let b = c.retrieval.budget;
        log::info!("budget {b}: qpt {:.3} ms, tr {:.4}", r.timing.qpt_ms.mean, r.metrics.tr);
        points.push(SweepPoint {
            budget: b,
            qpt_ms_mean: r.timing.qpt_ms.mean,
            qpt_ms_p95: r.timing.qpt_ms.p95,
            recall_at_k: r.metrics.recall_at_k,
            tr: r.metrics.tr,
            miss_tr: r.metrics.miss_tr,
            recall_total: r.metrics.recall_total,
            delta_r: r.metrics.delta_r,
        });
    }
    if let Some(e) = first_error {
        return Err(e);
    }
    let mut w = csv::Writer::from_writer(create(&cfg.out.join("sweep.csv"))?);
    for p in &points {
        w.serialize(p)?;
    }
    w.flush()?;
    Ok(points)
}
