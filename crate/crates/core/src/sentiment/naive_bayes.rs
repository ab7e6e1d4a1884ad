use serde::{Deserialize, Serialize};

use super::{check_both_classes, SentimentError};
use crate::corpus::{Polarity, Vocabulary};

/// Multinomial Naive Bayes with Laplace smoothing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NbModel {
    pub alpha: f64,
    /// `[positive, negative]`
    pub log_prior: [f64; 2],
    pub log_likelihood_pos: Vec<f64>,
    pub log_likelihood_neg: Vec<f64>,
    pub vocabulary: Vocabulary,
}

pub fn nb_train<S: AsRef<str>>(
    fragments: &[Vec<S>],
    labels: &[Polarity],
    vocabulary: &Vocabulary,
    alpha: f64,
) -> Result<NbModel, SentimentError> {
    if fragments.len() != labels.len() {
        return Err(SentimentError::LengthMismatch {
            features: fragments.len(),
            labels: labels.len(),
        });
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(SentimentError::InvalidConfig(format!("alpha must be > 0, got {alpha}")));
    }
    check_both_classes(labels)?;

    let v = vocabulary.len();
    let mut counts = [vec![0usize; v], vec![0usize; v]];
    let mut totals = [0usize; 2];
    let mut docs = [0usize; 2];
    for (frag, &label) in fragments.iter().zip(labels) {
        let c = class_slot(label);
        docs[c] += 1;
        for idx in vocabulary.encode(frag) {
            counts[c][idx] += 1;
            totals[c] += 1;
        }
    }
    let n = labels.len() as f64;
    let likelihood = |c: usize| -> Vec<f64> {
        let denom = totals[c] as f64 + alpha * v as f64;
        counts[c]
            .iter()
            .map(|&k| ((k as f64 + alpha) / denom).ln())
            .collect()
    };
    Ok(NbModel {
        alpha,
        log_prior: [(docs[0] as f64 / n).ln(), (docs[1] as f64 / n).ln()],
        log_likelihood_pos: likelihood(0),
        log_likelihood_neg: likelihood(1),
        vocabulary: vocabulary.clone(),
    })
}

fn class_slot(p: Polarity) -> usize {
    match p {
        Polarity::Positive => 0,
        Polarity::Negative => 1,
    }
}

/// Returns `(p_pos, p_neg)`; out-of-vocabulary tokens carry no evidence.
pub fn nb_predict<S: AsRef<str>>(tokens: &[S], model: &NbModel) -> (f64, f64) {
    let mut lp = model.log_prior[0];
    let mut ln = model.log_prior[1];
    for idx in model.vocabulary.encode(tokens) {
        lp += model.log_likelihood_pos[idx];
        ln += model.log_likelihood_neg[idx];
    }
    let m = lp.max(ln);
    let (a, b) = ((lp - m).exp(), (ln - m).exp());
    (a / (a + b), b / (a + b))
}
