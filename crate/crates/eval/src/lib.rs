//! Evaluation harness for the fastinsight retrieval engine: dataset
//! loading, a synthetic bridge-corpus generator, batch runs with timing and
//! budget sweeps.

pub mod dataset;
pub mod error;
pub mod run;
pub mod synth;

pub use dataset::{load_qrels, load_queries, Qrels, Query};
pub use error::{EvalError, Result};
pub use run::{
    evaluate, evaluate_many, run_eval, run_sweep, write_outcome, EncoderKind, Method, Outcome, Report,
    RerankerKind, RunConfig, SweepPoint, Workspace, DEFAULT_SWEEP,
};
pub use synth::{synth_bridge, SynthDataset};
