use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::cf::ColumnKey;
use crate::corpus::Polarity;

fn check_lengths(a: usize, b: usize) -> Result<(), EvalError> {
    if a != b {
        return Err(EvalError::LengthMismatch { predictions: a, golds: b });
    }
    if a == 0 {
        return Err(EvalError::UndefinedMetric("no observations".into()));
    }
    Ok(())
}

pub fn rmse(preds: &[f64], golds: &[f64]) -> Result<f64, EvalError> {
    check_lengths(preds.len(), golds.len())?;
    let mse = preds.iter().zip(golds).map(|(p, g)| (p - g) * (p - g)).sum::<f64>() / preds.len() as f64;
    Ok(mse.sqrt())
}

pub fn mae(preds: &[f64], golds: &[f64]) -> Result<f64, EvalError> {
    check_lengths(preds.len(), golds.len())?;
    Ok(preds.iter().zip(golds).map(|(p, g)| (p - g).abs()).sum::<f64>() / preds.len() as f64)
}

/// Binary confusion counts with positive sentiment as the positive class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub tn: usize,
}

impl Confusion {
    pub fn from_pairs(preds: &[Polarity], golds: &[Polarity]) -> Result<Self, EvalError> {
        if preds.len() != golds.len() {
            return Err(EvalError::LengthMismatch {
                predictions: preds.len(),
                golds: golds.len(),
            });
        }
        let mut c = Confusion::default();
        for (&p, &g) in preds.iter().zip(golds) {
            match (p, g) {
                (Polarity::Positive, Polarity::Positive) => c.tp += 1,
                (Polarity::Positive, Polarity::Negative) => c.fp += 1,
                (Polarity::Negative, Polarity::Positive) => c.fn_ += 1,
                (Polarity::Negative, Polarity::Negative) => c.tn += 1,
            }
        }
        Ok(c)
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }

    /// `2TP / (2TP + FP + FN)`; 1.0 when there is nothing positive to find or claim.
    pub fn f1(&self) -> f64 {
        let den = 2 * self.tp + self.fp + self.fn_;
        if den == 0 {
            1.0
        } else {
            (2 * self.tp) as f64 / den as f64
        }
    }
}

pub fn f_score(preds: &[Polarity], golds: &[Polarity]) -> Result<f64, EvalError> {
    Ok(Confusion::from_pairs(preds, golds)?.f1())
}

/// One recommendation query: the user and the columns recommended, best first.
#[derive(Debug, Clone, PartialEq)]
pub struct Query {
    pub user_id: String,
    pub recommended: Vec<ColumnKey>,
}

/// Mean over queries of the share of recommended columns with a held-out rating
/// that reach `threshold`. Queries without any held-out overlap are skipped.
pub fn precision_at_k(
    queries: &[Query],
    held_out: &BTreeMap<(String, ColumnKey), f64>,
    threshold: f64,
) -> Result<f64, EvalError> {
    let mut sum = 0.0;
    let mut counted = 0usize;
    for q in queries {
        let rated: Vec<f64> = q
            .recommended
            .iter()
            .filter_map(|c| held_out.get(&(q.user_id.clone(), c.clone())).copied())
            .collect();
        if rated.is_empty() {
            continue;
        }
        sum += rated.iter().filter(|&&r| r >= threshold).count() as f64 / rated.len() as f64;
        counted += 1;
    }
    if counted == 0 {
        Err(EvalError::UndefinedMetric("no query overlaps the held-out ratings".into()))
    } else {
        Ok(sum / counted as f64)
    }
}

/// Fleiss' kappa over `items x annotators` categorical labels.
/// Returns 1.0 when chance agreement is already total.
pub fn fleiss_kappa<L: Ord + Clone>(labels: &[Vec<L>]) -> Result<f64, EvalError> {
    let n = labels.first().map_or(0, Vec::len);
    if labels.is_empty() || n < 2 || labels.iter().any(|row| row.len() != n) {
        return Err(EvalError::UndefinedMetric(
            "need at least one item and a fixed number (>= 2) of annotators".into(),
        ));
    }
    let mut totals: BTreeMap<L, usize> = BTreeMap::new();
    let mut p_bar = 0.0;
    for row in labels {
        let mut counts: BTreeMap<&L, usize> = BTreeMap::new();
        for l in row {
            *counts.entry(l).or_default() += 1;
            *totals.entry(l.clone()).or_default() += 1;
        }
        let sq: usize = counts.values().map(|c| c * c).sum();
        p_bar += (sq - n) as f64 / (n * (n - 1)) as f64;
    }
    p_bar /= labels.len() as f64;
    let all = (labels.len() * n) as f64;
    let p_e: f64 = totals.values().map(|&c| (c as f64 / all).powi(2)).sum();
    if (1.0 - p_e).abs() < 1e-15 {
        return Ok(1.0);
    }
    Ok((p_bar - p_e) / (1.0 - p_e))
}
