use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fastinsight::metrics::PathMode;
use fastinsight::{FastInsightConfig, View};
use fastinsight_eval::{run_eval, EvalError, run_sweep, synth_bridge, EncoderKind, Method, RerankerKind, RunConfig, DEFAULT_SWEEP};

#[derive(Parser, Debug)]
#[command(name = "fastinsight", version, about = "Corpus-graph retrieval evaluation")]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,

    #[command(flatten)]
    run: RunArgs,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a synthetic clustered bridge corpus
    Synth {
        #[arg(long, default_value_t = 60)]
        clusters: usize,
        #[arg(long, default_value_t = 200)]
        cluster_size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Node file, JSON lines {"key", "content"}
    #[arg(long)]
    nodes: Option<PathBuf>,
    /// Edge file, tab-separated source and target keys
    #[arg(long)]
    edges: Option<PathBuf>,
    /// Query file, JSON lines {"id", "text"}
    #[arg(long)]
    queries: Option<PathBuf>,
    /// Judgments, tab-separated query id, node key, relevance
    #[arg(long)]
    qrels: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Method::Fastinsight)]
    method: Method,
    #[arg(long, default_value_t = 10)]
    batch: usize,
    #[arg(long, default_value_t = 0.2)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, default_value_t = 100)]
    budget: usize,
    /// Metric cutoff
    #[arg(long, default_value_t = 10)]
    k: usize,
    /// Edge orientation used by every graph operator and by the metrics
    #[arg(long, default_value = "undirected")]
    view: View,
    #[arg(long, value_enum, default_value_t = PathModeArg::MinCost)]
    path_mode: PathModeArg,

    #[arg(long, value_enum, default_value_t = EncoderKind::Hash)]
    encoder: EncoderKind,
    #[arg(long)]
    remote_url: Option<String>,
    /// Width of the hash encoder and hash reranker
    #[arg(long, default_value_t = 256)]
    dim: usize,
    /// Keep raw encoder vectors instead of unit-normalizing them
    #[arg(long)]
    no_normalize: bool,
    /// Binary vector cache, reused when present
    #[arg(long)]
    cache: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = RerankerKind::Coverage)]
    reranker: RerankerKind,
    #[arg(long)]
    reranker_url: Option<String>,
    /// Head weights for the remote reranker, JSON
    #[arg(long)]
    head: Option<PathBuf>,
    #[arg(long, default_value_t = 0.0)]
    head_jitter: f64,
    #[arg(long, default_value_t = 0.15)]
    ppr_restart: f64,

    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Queries run serially first and excluded from timing aggregates
    #[arg(long, default_value_t = 3)]
    warmup: usize,
    /// Retrieve each query this many times and report the median QPT
    #[arg(long, default_value_t = 1)]
    timing_repeats: usize,
    /// Run once per budget (default 10,20,..,100) instead of a single run
    #[arg(long, num_args = 0.., value_delimiter = ',')]
    sweep_budget: Option<Vec<usize>>,
}

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
enum PathModeArg {
    MinCost,
    HopShortest,
}

fn config(a: RunArgs) -> Result<(RunConfig, Option<Vec<usize>>), String> {
    let need = |p: Option<PathBuf>, flag: &str| p.ok_or_else(|| format!("--{flag} is required"));
    let cfg = RunConfig {
        nodes: need(a.nodes, "nodes")?,
        edges: need(a.edges, "edges")?,
        queries: need(a.queries, "queries")?,
        qrels: need(a.qrels, "qrels")?,
        method: a.method,
        retrieval: FastInsightConfig {
            batch: a.batch,
            alpha: a.alpha,
            beta: a.beta,
            budget: a.budget,
            k_report: a.k,
            view: a.view,
        },
        encoder: a.encoder,
        remote_url: a.remote_url,
        dim: a.dim,
        normalize: !a.no_normalize,
        cache: a.cache,
        reranker: a.reranker,
        reranker_url: a.reranker_url,
        head: a.head,
        head_jitter: a.head_jitter,
        path_mode: match a.path_mode {
            PathModeArg::MinCost => PathMode::MinCost,
            PathModeArg::HopShortest => PathMode::HopShortest,
        },
        ppr_restart: a.ppr_restart,
        out: a.out,
        jobs: a.jobs,
        seed: a.seed,
        warmup: a.warmup,
        timing_repeats: a.timing_repeats,
    };
    let sweep = a.sweep_budget.map(|b| if b.is_empty() { DEFAULT_SWEEP.to_vec() } else { b });
    Ok((cfg, sweep))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();

    if let Some(Command::Synth { clusters, cluster_size, seed, out }) = cli.command {
        if clusters < 2 || cluster_size < 2 {
            eprintln!("error: --clusters and --cluster-size must be at least 2");
            return ExitCode::from(2);
        }
        let data = synth_bridge(clusters, cluster_size, seed);
        return match data.write(&out) {
            Ok(()) => {
                println!("{}", serde_json::to_string(&data.stats()).unwrap_or_default());
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::FAILURE
            }
        };
    }

    let (cfg, sweep) = match config(cli.run) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let result = match sweep {
        Some(budgets) => run_sweep(&cfg, &budgets).map(|points| {
            for p in points {
                println!(
                    "budget={:<4} qpt_ms={:.3} r@{}={:.4} tr={:.4} miss_tr={:.4}",
                    p.budget, p.qpt_ms_mean, cfg.retrieval.k_report, p.recall_at_k, p.tr, p.miss_tr
                );
            }
        }),
        None => run_eval(&cfg).map(|r| {
            let m = &r.metrics;
            println!(
                "{} queries  r@{k}={:.4}  ndcg@{k}={:.4}  tr={:.4}  miss_tr={:.4}  delta_r={:.4}  qpt_ms={:.3} (p95 {:.3})",
                r.dataset.evaluated_queries,
                m.recall_at_k,
                m.ndcg_at_k,
                m.tr,
                m.miss_tr,
                m.delta_r,
                r.timing.qpt_ms.mean,
                r.timing.qpt_ms.p95,
                k = r.k
            );
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                EvalError::Config(_) => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
