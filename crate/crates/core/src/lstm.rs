//! Single-layer LSTM sentiment regressor trained with backpropagation through time.
//!
//! Tokens are embedded, run through one LSTM layer, and the final hidden state
//! feeds a `tanh` head producing a score in `[-1, 1]`. Training minimizes the
//! squared error against labels in `{-1, +1}` with plain per-sample SGD.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Polarity, Vocabulary};
use crate::sentiment::SentimentScore;

/// Gate slots in every per-gate array.
pub const INPUT: usize = 0;
pub const FORGET: usize = 1;
pub const OUTPUT: usize = 2;
pub const CANDIDATE: usize = 3;
pub const GATE_NAMES: [&str; 4] = ["i", "f", "o", "c"];

#[derive(Debug, Error, PartialEq)]
pub enum LstmError {
    #[error("token index {index} is outside the vocabulary of size {vocab}")]
    IndexOutOfVocabulary { index: usize, vocab: usize },
    #[error("empty input sequence")]
    EmptySequence,
    #[error("training loss became non-finite in epoch {epoch}")]
    DivergenceDetected { epoch: usize },
    #[error("no trainable sequences (all fragments empty after vocabulary lookup)")]
    EmptyCorpus,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LstmConfig {
    pub embedding_dim: usize,
    pub hidden_dim: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub seed: u64,
    /// Rescales a sample's gradient when its infinity norm exceeds this value.
    pub clip: Option<f64>,
}

impl Default for LstmConfig {
    fn default() -> Self {
        LstmConfig {
            embedding_dim: 16,
            hidden_dim: 16,
            learning_rate: 0.05,
            epochs: 50,
            seed: 42,
            clip: None,
        }
    }
}

/// All weights. Matrices are row-major: `w[g]` is `hidden x embedding`,
/// `u[g]` is `hidden x hidden`, `embedding` is `vocab x embedding`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LstmParams {
    pub vocab_size: usize,
    pub embedding_dim: usize,
    pub hidden_dim: usize,
    pub embedding: Vec<f64>,
    pub w: [Vec<f64>; 4],
    pub u: [Vec<f64>; 4],
    pub b: [Vec<f64>; 4],
    pub w_out: Vec<f64>,
    pub b_out: f64,
}

impl LstmParams {
    pub fn zeros(vocab_size: usize, embedding_dim: usize, hidden_dim: usize) -> Self {
        let (v, e, h) = (vocab_size, embedding_dim, hidden_dim);
        LstmParams {
            vocab_size: v,
            embedding_dim: e,
            hidden_dim: h,
            embedding: vec![0.0; v * e],
            w: std::array::from_fn(|_| vec![0.0; h * e]),
            u: std::array::from_fn(|_| vec![0.0; h * h]),
            b: std::array::from_fn(|_| vec![0.0; h]),
            w_out: vec![0.0; h],
            b_out: 0.0,
        }
    }

    /// Uniform(-0.1, 0.1) everywhere, forget-gate bias 1.0.
    pub fn init<R: Rng>(vocab_size: usize, embedding_dim: usize, hidden_dim: usize, rng: &mut R) -> Self {
        let mut p = LstmParams::zeros(vocab_size, embedding_dim, hidden_dim);
        for (_, t) in p.tensors_mut() {
            for x in t.iter_mut() {
                *x = rng.gen_range(-0.1..0.1);
            }
        }
        p.b[FORGET].iter_mut().for_each(|x| *x = 1.0);
        p
    }

    /// Every parameter tensor with a stable name, `b_out` as a length-1 slice.
    pub fn tensors_mut(&mut self) -> Vec<(String, &mut [f64])> {
        let mut out: Vec<(String, &mut [f64])> = vec![("embedding".into(), &mut self.embedding[..])];
        for (g, t) in self.w.iter_mut().enumerate() {
            out.push((format!("W_{}", GATE_NAMES[g]), &mut t[..]));
        }
        for (g, t) in self.u.iter_mut().enumerate() {
            out.push((format!("U_{}", GATE_NAMES[g]), &mut t[..]));
        }
        for (g, t) in self.b.iter_mut().enumerate() {
            out.push((format!("b_{}", GATE_NAMES[g]), &mut t[..]));
        }
        out.push(("w_out".into(), &mut self.w_out[..]));
        out.push(("b_out".into(), std::slice::from_mut(&mut self.b_out)));
        out
    }

    pub fn tensors(&self) -> Vec<&[f64]> {
        let mut out: Vec<&[f64]> = vec![&self.embedding];
        out.extend(self.w.iter().map(|t| &t[..]));
        out.extend(self.u.iter().map(|t| &t[..]));
        out.extend(self.b.iter().map(|t| &t[..]));
        out.push(&self.w_out);
        out.push(std::slice::from_ref(&self.b_out));
        out
    }

    fn inf_norm(&self) -> f64 {
        self.tensors()
            .iter()
            .flat_map(|t| t.iter())
            .fold(0.0f64, |m, x| m.max(x.abs()))
    }

    fn scale(&mut self, factor: f64) {
        for (_, t) in self.tensors_mut() {
            t.iter_mut().for_each(|x| *x *= factor);
        }
    }

    /// `self -= lr * grad`
    fn descend(&mut self, grad: &LstmParams, lr: f64) {
        for ((_, p), d) in self.tensors_mut().into_iter().zip(grad.tensors()) {
            for (x, dx) in p.iter_mut().zip(d.iter()) {
                *x -= lr * dx;
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        self.tensors().iter().all(|t| t.iter().all(|x| x.is_finite()))
    }
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Activations of one time step.
#[derive(Debug, Clone)]
pub struct StepCache {
    pub token: usize,
    pub gates: [Vec<f64>; 4],
    pub c: Vec<f64>,
    pub tanh_c: Vec<f64>,
    pub h: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct ForwardCache {
    pub steps: Vec<StepCache>,
    pub score: f64,
}

/// Runs the recurrence from `h_0 = c_0 = 0` and returns the score and all activations.
pub fn lstm_forward(sequence: &[usize], params: &LstmParams) -> Result<(f64, ForwardCache), LstmError> {
    if sequence.is_empty() {
        return Err(LstmError::EmptySequence);
    }
    let (e, h) = (params.embedding_dim, params.hidden_dim);
    let mut h_prev = vec![0.0; h];
    let mut c_prev = vec![0.0; h];
    let mut steps = Vec::with_capacity(sequence.len());
    for &tok in sequence {
        if tok >= params.vocab_size {
            return Err(LstmError::IndexOutOfVocabulary {
                index: tok,
                vocab: params.vocab_size,
            });
        }
        let x = &params.embedding[tok * e..(tok + 1) * e];
        let gates: [Vec<f64>; 4] = std::array::from_fn(|g| {
            (0..h)
                .map(|r| {
                    let mut z = params.b[g][r];
                    let wr = &params.w[g][r * e..(r + 1) * e];
                    z += wr.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
                    let ur = &params.u[g][r * h..(r + 1) * h];
                    z += ur.iter().zip(&h_prev).map(|(a, b)| a * b).sum::<f64>();
                    if g == CANDIDATE {
                        z.tanh()
                    } else {
                        sigmoid(z)
                    }
                })
                .collect()
        });
        let c: Vec<f64> = (0..h)
            .map(|r| gates[FORGET][r] * c_prev[r] + gates[INPUT][r] * gates[CANDIDATE][r])
            .collect();
        let tanh_c: Vec<f64> = c.iter().map(|v| v.tanh()).collect();
        let hh: Vec<f64> = (0..h).map(|r| gates[OUTPUT][r] * tanh_c[r]).collect();
        h_prev = hh.clone();
        c_prev = c.clone();
        steps.push(StepCache {
            token: tok,
            gates,
            c,
            tanh_c,
            h: hh,
        });
    }
    let last = &steps.last().expect("non-empty").h;
    let score = (params.w_out.iter().zip(last).map(|(a, b)| a * b).sum::<f64>() + params.b_out).tanh();
    Ok((score, ForwardCache { steps, score }))
}

/// Squared error against a label in `{-1, +1}`.
pub fn lstm_loss(score: f64, label: f64) -> f64 {
    (score - label).powi(2)
}

/// Exact gradient of [`lstm_loss`] with respect to every parameter.
pub fn lstm_backward(cache: &ForwardCache, label: f64, params: &LstmParams) -> LstmParams {
    let (e, h) = (params.embedding_dim, params.hidden_dim);
    let mut grad = LstmParams::zeros(params.vocab_size, e, h);
    let score = cache.score;
    let dpre = 2.0 * (score - label) * (1.0 - score * score);
    let last = &cache.steps.last().expect("non-empty").h;
    for r in 0..h {
        grad.w_out[r] = dpre * last[r];
    }
    grad.b_out = dpre;

    let zeros = vec![0.0; h];
    let mut dh: Vec<f64> = params.w_out.iter().map(|w| dpre * w).collect();
    let mut dc_next = vec![0.0; h];
    for t in (0..cache.steps.len()).rev() {
        let st = &cache.steps[t];
        let (h_prev, c_prev) = if t == 0 {
            (&zeros, &zeros)
        } else {
            (&cache.steps[t - 1].h, &cache.steps[t - 1].c)
        };
        let [gi, gf, go, gc] = &st.gates;
        let mut dz: [Vec<f64>; 4] = std::array::from_fn(|_| vec![0.0; h]);
        for r in 0..h {
            let dc = dh[r] * go[r] * (1.0 - st.tanh_c[r] * st.tanh_c[r]) + dc_next[r];
            dz[OUTPUT][r] = dh[r] * st.tanh_c[r] * go[r] * (1.0 - go[r]);
            dz[FORGET][r] = dc * c_prev[r] * gf[r] * (1.0 - gf[r]);
            dz[INPUT][r] = dc * gc[r] * gi[r] * (1.0 - gi[r]);
            dz[CANDIDATE][r] = dc * gi[r] * (1.0 - gc[r] * gc[r]);
            dc_next[r] = dc * gf[r];
        }
        let x = &params.embedding[st.token * e..(st.token + 1) * e];
        let mut dx = vec![0.0; e];
        let mut dh_prev = vec![0.0; h];
        for g in 0..4 {
            for r in 0..h {
                let d = dz[g][r];
                if d == 0.0 {
                    continue;
                }
                grad.b[g][r] += d;
                for c in 0..e {
                    grad.w[g][r * e + c] += d * x[c];
                    dx[c] += d * params.w[g][r * e + c];
                }
                for c in 0..h {
                    grad.u[g][r * h + c] += d * h_prev[c];
                    dh_prev[c] += d * params.u[g][r * h + c];
                }
            }
        }
        for c in 0..e {
            grad.embedding[st.token * e + c] += dx[c];
        }
        dh = dh_prev;
    }
    grad
}

/// A trained LSTM bound to its vocabulary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LstmModel {
    pub params: LstmParams,
    pub config: LstmConfig,
    pub vocabulary: Vocabulary,
    pub epoch_losses: Vec<f64>,
}

impl LstmModel {
    /// Scores raw tokens; out-of-vocabulary tokens are skipped and an empty
    /// remainder scores 0.
    pub fn score_tokens<S: AsRef<str>>(&self, tokens: &[S]) -> SentimentScore {
        let seq = self.vocabulary.encode(tokens);
        match lstm_forward(&seq, &self.params) {
            Ok((s, _)) => SentimentScore::new(s),
            Err(_) => SentimentScore::new(0.0),
        }
    }
}

/// Per-sample SGD over `corpus` of `(sequence, label in {-1, +1})`.
///
/// Shuffle order is drawn from a generator seeded with `config.seed`, the same
/// generator that produced `params0` when [`LstmParams::init`] was used.
pub fn lstm_train_params(
    corpus: &[(Vec<usize>, f64)],
    mut params: LstmParams,
    config: &LstmConfig,
    rng: &mut ChaCha8Rng,
) -> Result<(LstmParams, Vec<f64>), LstmError> {
    if corpus.is_empty() {
        return Err(LstmError::EmptyCorpus);
    }
    let mut order: Vec<usize> = (0..corpus.len()).collect();
    let mut losses = Vec::with_capacity(config.epochs);
    for epoch in 0..config.epochs {
        order.shuffle(rng);
        let mut total = 0.0;
        for &i in &order {
            let (seq, label) = &corpus[i];
            let (score, cache) = lstm_forward(seq, &params)?;
            let loss = lstm_loss(score, *label);
            if !loss.is_finite() {
                return Err(LstmError::DivergenceDetected { epoch });
            }
            total += loss;
            let mut grad = lstm_backward(&cache, *label, &params);
            if let Some(limit) = config.clip {
                let norm = grad.inf_norm();
                if norm > limit {
                    grad.scale(limit / norm);
                }
            }
            params.descend(&grad, config.learning_rate);
        }
        let mean = total / corpus.len() as f64;
        if !mean.is_finite() || !params.is_finite() {
            return Err(LstmError::DivergenceDetected { epoch });
        }
        losses.push(mean);
    }
    Ok((params, losses))
}

/// Seeds, initializes and trains on index sequences.
pub fn lstm_train(
    corpus: &[(Vec<usize>, f64)],
    vocab_size: usize,
    config: &LstmConfig,
) -> Result<(LstmParams, Vec<f64>), LstmError> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let params0 = LstmParams::init(vocab_size, config.embedding_dim, config.hidden_dim, &mut rng);
    lstm_train_params(corpus, params0, config, &mut rng)
}

/// Encodes token fragments with `vocabulary` and trains; empty encodings are skipped.
pub fn train_on_tokens<S: AsRef<str>>(
    fragments: &[Vec<S>],
    labels: &[Polarity],
    vocabulary: &Vocabulary,
    config: &LstmConfig,
) -> Result<LstmModel, LstmError> {
    let corpus: Vec<(Vec<usize>, f64)> = fragments
        .iter()
        .zip(labels)
        .map(|(f, l)| (vocabulary.encode(f), l.sign()))
        .filter(|(s, _)| !s.is_empty())
        .collect();
    let (params, epoch_losses) = lstm_train(&corpus, vocabulary.len(), config)?;
    Ok(LstmModel {
        params,
        config: *config,
        vocabulary: vocabulary.clone(),
        epoch_losses,
    })
}
