//! Fragment-level sentiment classifiers.
//!
//! Every classifier reports on the same scale: a [`SentimentScore`] in
//! `[-1, 1]`, negative meaning a negative opinion of the item.

mod bow;
mod logistic;
mod naive_bayes;
mod tree;

pub use bow::{bow_vectorize, BowVector};
pub use logistic::{lr_loss_and_gradient, lr_predict, lr_train, LrConfig, LrGradient, LrModel};
pub use naive_bayes::{nb_predict, nb_train, NbModel};
pub use tree::{dt_predict, dt_train, gini, DtConfig, DtModel, TreeNode};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{build_vocabulary, Polarity};
use crate::document::Documented;
use crate::lstm::{train_on_tokens, LstmConfig, LstmError, LstmModel};

#[derive(Debug, Error, PartialEq)]
pub enum SentimentError {
    #[error("training labels contain only one class")]
    SingleClassCorpus,
    #[error("{features} feature vectors but {labels} labels")]
    LengthMismatch { features: usize, labels: usize },
    #[error("feature vector has dimension {found}, model expects {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid hyperparameter: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Lstm(#[from] LstmError),
}

/// Sentiment on the unified `[-1, 1]` scale.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SentimentScore(f64);

impl SentimentScore {
    pub fn new(value: f64) -> Self {
        SentimentScore(value.clamp(-1.0, 1.0))
    }

    /// Maps a positive-class probability onto the score scale.
    pub fn from_probability(p_pos: f64) -> Self {
        SentimentScore::new(2.0 * p_pos - 1.0)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn polarity(self) -> Polarity {
        Polarity::from_score(self.0)
    }
}

/// Which classifier to train.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelChoice {
    #[serde(rename = "nb")]
    NaiveBayes,
    #[serde(rename = "bow-lr")]
    BowLogistic,
    #[serde(rename = "bow-dt")]
    BowTree,
    #[serde(rename = "lstm")]
    Lstm,
}

impl ModelChoice {
    pub const ALL: [ModelChoice; 4] = [
        ModelChoice::NaiveBayes,
        ModelChoice::BowLogistic,
        ModelChoice::BowTree,
        ModelChoice::Lstm,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelChoice::NaiveBayes => "nb",
            ModelChoice::BowLogistic => "bow-lr",
            ModelChoice::BowTree => "bow-dt",
            ModelChoice::Lstm => "lstm",
        }
    }
}

impl std::str::FromStr for ModelChoice {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ModelChoice::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| format!("unknown model `{s}` (expected nb, bow-lr, bow-dt or lstm)"))
    }
}

/// A trained classifier of any kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum SentimentModel {
    Nb(NbModel),
    BowLr(LrModel),
    BowDt(DtModel),
    Lstm(LstmModel),
}

impl SentimentModel {
    pub fn choice(&self) -> ModelChoice {
        match self {
            SentimentModel::Nb(_) => ModelChoice::NaiveBayes,
            SentimentModel::BowLr(_) => ModelChoice::BowLogistic,
            SentimentModel::BowDt(_) => ModelChoice::BowTree,
            SentimentModel::Lstm(_) => ModelChoice::Lstm,
        }
    }
}

impl Documented for SentimentModel {
    fn kind(&self) -> &'static str {
        self.choice().as_str()
    }

    fn vocabulary_hash(&self) -> Option<String> {
        let vocab = match self {
            SentimentModel::Nb(m) => &m.vocabulary,
            SentimentModel::BowLr(m) => &m.vocabulary,
            SentimentModel::BowDt(m) => &m.vocabulary,
            SentimentModel::Lstm(m) => &m.vocabulary,
        };
        Some(vocab.fingerprint())
    }

    fn seed(&self) -> Option<u64> {
        match self {
            SentimentModel::Lstm(m) => Some(m.config.seed),
            _ => None,
        }
    }
}

/// Scores a fragment's tokens with the given model.
///
/// Naive Bayes and logistic regression map `p_pos` to `2 p_pos - 1`; the tree
/// uses its leaf's positive share the same way; the LSTM emits the score
/// directly. A fragment with no in-vocabulary token scores 0 under the LSTM.
pub fn classify_fragment<S: AsRef<str>>(tokens: &[S], model: &SentimentModel) -> SentimentScore {
    match model {
        SentimentModel::Nb(m) => SentimentScore::from_probability(nb_predict(tokens, m).0),
        SentimentModel::BowLr(m) => {
            SentimentScore::from_probability(lr_predict(&bow_vectorize(tokens, &m.vocabulary), m))
        }
        SentimentModel::BowDt(m) => {
            let (pos, neg) = m.leaf_counts(&bow_vectorize(tokens, &m.vocabulary));
            SentimentScore::from_probability(pos as f64 / (pos + neg).max(1) as f64)
        }
        SentimentModel::Lstm(m) => m.score_tokens(tokens),
    }
}

/// Hyperparameters for every classifier kind.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SentimentConfig {
    pub min_count: usize,
    pub nb_alpha: f64,
    pub lr: LrConfig,
    pub dt: DtConfig,
    pub lstm: LstmConfig,
}

impl Default for SentimentConfig {
    fn default() -> Self {
        SentimentConfig {
            min_count: 1,
            nb_alpha: 1.0,
            lr: LrConfig::default(),
            dt: DtConfig::default(),
            lstm: LstmConfig::default(),
        }
    }
}

/// Builds the vocabulary from `fragments` and trains the chosen classifier.
pub fn train_sentiment<S: AsRef<str>>(
    choice: ModelChoice,
    fragments: &[Vec<S>],
    labels: &[Polarity],
    config: &SentimentConfig,
) -> Result<SentimentModel, SentimentError> {
    if fragments.len() != labels.len() {
        return Err(SentimentError::LengthMismatch {
            features: fragments.len(),
            labels: labels.len(),
        });
    }
    check_both_classes(labels)?;
    let vocab = build_vocabulary(fragments, config.min_count)
        .map_err(|e| SentimentError::InvalidConfig(e.to_string()))?;
    let bows = || -> Vec<BowVector> { fragments.iter().map(|f| bow_vectorize(f, &vocab)).collect() };
    Ok(match choice {
        ModelChoice::NaiveBayes => SentimentModel::Nb(nb_train(fragments, labels, &vocab, config.nb_alpha)?),
        ModelChoice::BowLogistic => SentimentModel::BowLr(lr_train(&bows(), labels, &vocab, &config.lr)?),
        ModelChoice::BowTree => SentimentModel::BowDt(dt_train(&bows(), labels, &vocab, &config.dt)),
        ModelChoice::Lstm => SentimentModel::Lstm(train_on_tokens(fragments, labels, &vocab, &config.lstm)?),
    })
}

pub(crate) fn check_both_classes(labels: &[Polarity]) -> Result<(), SentimentError> {
    let pos = labels.iter().any(|&l| l == Polarity::Positive);
    let neg = labels.iter().any(|&l| l == Polarity::Negative);
    if pos && neg {
        Ok(())
    } else {
        Err(SentimentError::SingleClassCorpus)
    }
}
