//! Metrics, splitting, synthetic corpora and the end-to-end benchmark.

mod benchmark;
mod metrics;
mod split;
mod synth;

pub use benchmark::{render_table, run_benchmark, BenchCorpus, BenchmarkConfig, EvalReport};
pub use metrics::{f_score, fleiss_kappa, mae, precision_at_k, rmse, Confusion, Query};
pub use split::{
    derive_threshold_labels, train_size, train_test_split, LabelSource, LabeledExample, SplitRounding,
    DEFAULT_TRAIN_FRACTION,
};
pub(crate) use synth::read_jsonl;
pub use synth::{
    synth_corpus, synth_lexicons, synth_sentiment_corpus, GoldFragment, GoldRating, SynthConfig, SynthCorpus,
};

use thiserror::Error;

use crate::cf::CfError;

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("{predictions} predictions but {golds} gold values")]
    LengthMismatch { predictions: usize, golds: usize },
    #[error("undefined metric: {0}")]
    UndefinedMetric(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("training failed: {0}")]
    Training(String),
    #[error("i/o: {0}")]
    Io(String),
    #[error(transparent)]
    Cf(#[from] CfError),
}
