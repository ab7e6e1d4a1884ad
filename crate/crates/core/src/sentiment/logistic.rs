use serde::{Deserialize, Serialize};

use super::{check_both_classes, BowVector, SentimentError};
use crate::corpus::{Polarity, Vocabulary};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LrConfig {
    pub l2: f64,
    pub learning_rate: f64,
    pub epochs: usize,
}

impl Default for LrConfig {
    fn default() -> Self {
        LrConfig {
            l2: 1e-3,
            learning_rate: 0.1,
            epochs: 500,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LrModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub config: LrConfig,
    pub vocabulary: Vocabulary,
    /// Training loss before the first epoch followed by the loss after each epoch.
    pub loss_history: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LrGradient {
    pub weights: Vec<f64>,
    pub bias: f64,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

fn target(p: Polarity) -> f64 {
    match p {
        Polarity::Positive => 1.0,
        Polarity::Negative => 0.0,
    }
}

/// Mean log loss plus `l2/2 * |w|^2` (bias unregularized) and its gradient.
pub fn lr_loss_and_gradient(
    weights: &[f64],
    bias: f64,
    x: &[BowVector],
    y: &[Polarity],
    l2: f64,
) -> (f64, LrGradient) {
    let n = x.len() as f64;
    let mut loss = 0.0;
    let mut gw = vec![0.0; weights.len()];
    let mut gb = 0.0;
    for (xi, &yi) in x.iter().zip(y) {
        let z = xi.dot(weights) + bias;
        let t = target(yi);
        loss += softplus(z) - t * z;
        let r = (sigmoid(z) - t) / n;
        gb += r;
        for &j in xi.active() {
            gw[j] += r;
        }
    }
    loss /= n;
    let mut reg = 0.0;
    for (g, &w) in gw.iter_mut().zip(weights) {
        *g += l2 * w;
        reg += w * w;
    }
    (loss + 0.5 * l2 * reg, LrGradient { weights: gw, bias: gb })
}

/// Full-batch gradient descent from zero weights.
pub fn lr_train(
    x: &[BowVector],
    y: &[Polarity],
    vocabulary: &Vocabulary,
    config: &LrConfig,
) -> Result<LrModel, SentimentError> {
    if x.len() != y.len() {
        return Err(SentimentError::LengthMismatch {
            features: x.len(),
            labels: y.len(),
        });
    }
    if config.l2 < 0.0 || !(config.learning_rate > 0.0) {
        return Err(SentimentError::InvalidConfig(
            "l2 must be >= 0 and learning_rate > 0".into(),
        ));
    }
    check_both_classes(y)?;
    let dim = vocabulary.len();
    if let Some(bad) = x.iter().find(|v| v.dim() != dim) {
        return Err(SentimentError::DimensionMismatch {
            expected: dim,
            found: bad.dim(),
        });
    }

    let mut weights = vec![0.0; dim];
    let mut bias = 0.0;
    let mut history = Vec::with_capacity(config.epochs + 1);
    let (mut loss, mut grad) = lr_loss_and_gradient(&weights, bias, x, y, config.l2);
    history.push(loss);
    for _ in 0..config.epochs {
        for (w, g) in weights.iter_mut().zip(&grad.weights) {
            *w -= config.learning_rate * g;
        }
        bias -= config.learning_rate * grad.bias;
        (loss, grad) = lr_loss_and_gradient(&weights, bias, x, y, config.l2);
        history.push(loss);
    }
    Ok(LrModel {
        weights,
        bias,
        config: *config,
        vocabulary: vocabulary.clone(),
        loss_history: history,
    })
}

/// Probability of the positive class; classify positive when `>= 0.5`.
pub fn lr_predict(x: &BowVector, model: &LrModel) -> f64 {
    sigmoid(x.dot(&model.weights) + model.bias)
}
