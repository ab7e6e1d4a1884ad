use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::corpus::{Polarity, ReviewRecord};
use crate::pipeline::THRESHOLDS;

pub const DEFAULT_TRAIN_FRACTION: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitRounding {
    /// `floor(f * N)`, giving 2504 of 3131 at 0.8.
    #[default]
    Floor,
    /// Round half up.
    Round,
}

impl std::str::FromStr for SplitRounding {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "floor" => Ok(SplitRounding::Floor),
            "round" => Ok(SplitRounding::Round),
            o => Err(format!("unknown rounding `{o}` (expected floor or round)")),
        }
    }
}

pub fn train_size(n: usize, fraction: f64, rounding: SplitRounding) -> usize {
    let x = fraction * n as f64;
    let k = match rounding {
        SplitRounding::Floor => (x + 1e-9).floor(),
        SplitRounding::Round => (x + 0.5).floor(),
    };
    (k.max(0.0) as usize).min(n)
}

/// Seeded shuffle then split; `(train, test)` preserve no input order.
pub fn train_test_split<T: Clone>(
    items: &[T],
    fraction: f64,
    seed: u64,
    rounding: SplitRounding,
) -> Result<(Vec<T>, Vec<T>), EvalError> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(EvalError::InvalidConfig(format!("train fraction {fraction} outside [0, 1]")));
    }
    let mut idx: Vec<usize> = (0..items.len()).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let k = train_size(items.len(), fraction, rounding);
    Ok((
        idx[..k].iter().map(|&i| items[i].clone()).collect(),
        idx[k..].iter().map(|&i| items[i].clone()).collect(),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "t")]
pub enum LabelSource {
    Manual,
    Threshold(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledExample {
    pub review_id: String,
    pub label: Polarity,
    pub source: LabelSource,
}

/// Positive iff `stars >= t`; `t` must be 2.0, 2.5 or 3.0.
pub fn derive_threshold_labels(reviews: &[ReviewRecord], t: f64) -> Result<Vec<LabeledExample>, EvalError> {
    if !THRESHOLDS.contains(&t) {
        return Err(EvalError::InvalidConfig(format!("threshold {t} not one of 2.0, 2.5, 3.0")));
    }
    Ok(reviews
        .iter()
        .map(|r| LabeledExample {
            review_id: r.review_id.clone(),
            label: if r.stars.value() >= t { Polarity::Positive } else { Polarity::Negative },
            source: LabelSource::Threshold(t),
        })
        .collect())
}
