//! Second-order factorization machine over one-hot `(user, column)` features.
//!
//! ```text
//! ŷ(x) = w0 + Σ_i w_i x_i + ½ Σ_f [ (Σ_i v_if x_i)² − Σ_i v_if² x_i² ]
//! ```
//!
//! Trained by SGD on `½ (ŷ − y)²` with weight decay `λ_w` on `w` and `λ_v` on `V`.
//! After every epoch the two λs take one gradient step on the validation loss,
//! differentiated through a hypothetical full-batch parameter update
//! `θ' = θ − lr (g + λ θ)`, so `∂L_val/∂λ = ∇L_val(θ') · (−lr θ)`.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cf::{CfError, ColumnKey, Method, Prediction, RatingMatrix, RatingPredictor, RATING_MAX, RATING_MIN};
use crate::document::Documented;
use crate::fragmenter::ItemId;

#[derive(Debug, Error, PartialEq)]
pub enum FmError {
    #[error("feature index {index} out of range for {n_features} features")]
    FeatureIndexOutOfRange { index: usize, n_features: usize },
    #[error("training diverged at epoch {epoch}")]
    DivergenceDetected { epoch: usize },
    #[error("validation set is empty")]
    EmptyValidation,
    #[error("training set is empty")]
    EmptyTraining,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Cf(#[from] CfError),
}

/// Sparse feature vector plus target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FmInstance {
    pub features: Vec<(usize, f64)>,
    pub target: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IterationMode {
    /// Each iteration is a full shuffled pass.
    #[default]
    Epochs,
    /// Each iteration is a single-instance SGD step.
    Steps,
}

impl std::str::FromStr for IterationMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "epochs" => Ok(IterationMode::Epochs),
            "steps" => Ok(IterationMode::Steps),
            o => Err(format!("unknown iteration mode `{o}` (expected epochs or steps)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FmConfig {
    pub learning_rate: f64,
    pub iterations: usize,
    pub mode: IterationMode,
    pub kdim: usize,
    pub seed: u64,
    pub init_std: f64,
    pub lambda_init: f64,
    pub lambda_max: f64,
    pub lambda_lr: f64,
    pub validation_fraction: f64,
    pub side_feature: bool,
}

impl Default for FmConfig {
    fn default() -> Self {
        FmConfig {
            learning_rate: 0.001,
            iterations: 100,
            mode: IterationMode::Epochs,
            kdim: 8,
            seed: 42,
            init_std: 0.01,
            lambda_init: 0.01,
            lambda_max: 10.0,
            lambda_lr: 1.0,
            validation_fraction: 0.1,
            side_feature: false,
        }
    }
}

impl FmConfig {
    fn validate(&self) -> Result<(), FmError> {
        let bad = |m: &str| Err(FmError::InvalidConfig(m.to_string()));
        if self.kdim == 0 {
            return bad("kdim must be >= 1");
        }
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate must be finite and >= 0");
        }
        if !(self.lambda_max >= 0.0) || !(0.0..=self.lambda_max).contains(&self.lambda_init) {
            return bad("lambda_init must lie in [0, lambda_max]");
        }
        if !(self.init_std >= 0.0) || !(self.lambda_lr >= 0.0) {
            return bad("init_std and lambda_lr must be >= 0");
        }
        if !(self.validation_fraction > 0.0 && self.validation_fraction < 1.0) {
            return bad("validation_fraction must lie in (0, 1)");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FmModel {
    pub n_features: usize,
    pub kdim: usize,
    pub w0: f64,
    pub w: Vec<f64>,
    /// Row-major `n_features x kdim`.
    pub v: Vec<f64>,
    pub lambda_w: f64,
    pub lambda_v: f64,
    /// Mean training loss after each iteration.
    pub loss_history: Vec<f64>,
}

/// Dense gradient with the same layout as the model parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct FmGradient {
    pub w0: f64,
    pub w: Vec<f64>,
    pub v: Vec<f64>,
}

impl FmGradient {
    fn zeros(n: usize, k: usize) -> Self {
        FmGradient {
            w0: 0.0,
            w: vec![0.0; n],
            v: vec![0.0; n * k],
        }
    }
}

impl FmModel {
    pub fn zeros(n_features: usize, kdim: usize) -> Self {
        FmModel {
            n_features,
            kdim,
            w0: 0.0,
            w: vec![0.0; n_features],
            v: vec![0.0; n_features * kdim],
            lambda_w: 0.0,
            lambda_v: 0.0,
            loss_history: Vec::new(),
        }
    }

    /// `w0 = 0`, `w = 0`, `V ~ Normal(0, std)`.
    pub fn init(n_features: usize, kdim: usize, std: f64, lambda: f64, rng: &mut ChaCha8Rng) -> Self {
        let mut m = Self::zeros(n_features, kdim);
        if std > 0.0 {
            let normal = Normal::new(0.0, std).expect("std > 0");
            m.v.iter_mut().for_each(|x| *x = normal.sample(rng));
        }
        m.lambda_w = lambda;
        m.lambda_v = lambda;
        m
    }

    pub fn is_finite(&self) -> bool {
        self.w0.is_finite()
            && self.w.iter().chain(&self.v).all(|x| x.is_finite())
            && self.lambda_w.is_finite()
            && self.lambda_v.is_finite()
    }

    pub fn factor(&self, i: usize) -> &[f64] {
        &self.v[i * self.kdim..(i + 1) * self.kdim]
    }

    fn check(&self, x: &[(usize, f64)]) -> Result<(), FmError> {
        match x.iter().find(|e| e.0 >= self.n_features) {
            Some(&(index, _)) => Err(FmError::FeatureIndexOutOfRange {
                index,
                n_features: self.n_features,
            }),
            None => Ok(()),
        }
    }

    /// Prediction plus the per-factor sums `Σ_i v_if x_i`.
    fn forward(&self, x: &[(usize, f64)]) -> (f64, Vec<f64>) {
        let mut sums = vec![0.0; self.kdim];
        let mut sq = vec![0.0; self.kdim];
        let mut y = self.w0;
        for &(i, xi) in x {
            y += self.w[i] * xi;
            for (f, &vif) in self.factor(i).iter().enumerate() {
                sums[f] += vif * xi;
                sq[f] += vif * vif * xi * xi;
            }
        }
        for f in 0..self.kdim {
            y += 0.5 * (sums[f] * sums[f] - sq[f]);
        }
        (y, sums)
    }
}

/// Linear-time prediction; no clamping.
pub fn fm_predict(x: &[(usize, f64)], model: &FmModel) -> Result<f64, FmError> {
    model.check(x)?;
    Ok(model.forward(x).0)
}

/// Gradient of `ŷ(x)` with respect to every parameter.
pub fn fm_predict_gradient(x: &[(usize, f64)], model: &FmModel) -> Result<FmGradient, FmError> {
    model.check(x)?;
    let (_, sums) = model.forward(x);
    let mut g = FmGradient::zeros(model.n_features, model.kdim);
    g.w0 = 1.0;
    add_sparse_gradient(&mut g, x, &sums, model, 1.0);
    Ok(g)
}

fn add_sparse_gradient(g: &mut FmGradient, x: &[(usize, f64)], sums: &[f64], model: &FmModel, scale: f64) {
    let k = model.kdim;
    for &(i, xi) in x {
        g.w[i] += scale * xi;
        for f in 0..k {
            g.v[i * k + f] += scale * xi * (sums[f] - model.v[i * k + f] * xi);
        }
    }
}

/// Mean `½ (ŷ − y)²` plus `λ_w/2 |w|² + λ_v/2 |V|²`, with its gradient.
pub fn fm_loss_gradient(data: &[FmInstance], model: &FmModel) -> Result<(f64, FmGradient), FmError> {
    let (loss, mut g) = data_loss_gradient(data, model)?;
    let mut reg = 0.0;
    for (gi, &wi) in g.w.iter_mut().zip(&model.w) {
        *gi += model.lambda_w * wi;
        reg += 0.5 * model.lambda_w * wi * wi;
    }
    for (gi, &vi) in g.v.iter_mut().zip(&model.v) {
        *gi += model.lambda_v * vi;
        reg += 0.5 * model.lambda_v * vi * vi;
    }
    Ok((loss + reg, g))
}

/// Mean `½ (ŷ − y)²` without regularization, with its gradient.
fn data_loss_gradient(data: &[FmInstance], model: &FmModel) -> Result<(f64, FmGradient), FmError> {
    let mut g = FmGradient::zeros(model.n_features, model.kdim);
    if data.is_empty() {
        return Ok((0.0, g));
    }
    let inv = 1.0 / data.len() as f64;
    let mut loss = 0.0;
    for inst in data {
        model.check(&inst.features)?;
        let (y, sums) = model.forward(&inst.features);
        let e = y - inst.target;
        loss += 0.5 * e * e * inv;
        g.w0 += e * inv;
        add_sparse_gradient(&mut g, &inst.features, &sums, model, e * inv);
    }
    Ok((loss, g))
}

/// Mean `½ (ŷ − y)²` over `data`.
pub fn fm_data_loss(data: &[FmInstance], model: &FmModel) -> Result<f64, FmError> {
    let mut loss = 0.0;
    for inst in data {
        let e = fm_predict(&inst.features, model)? - inst.target;
        loss += 0.5 * e * e;
    }
    Ok(if data.is_empty() { 0.0 } else { loss / data.len() as f64 })
}

/// One SGD step on a single instance; `w0` is not decayed.
pub fn fm_sgd_step(inst: &FmInstance, model: &mut FmModel, lr: f64) -> Result<(), FmError> {
    model.check(&inst.features)?;
    let (y, sums) = model.forward(&inst.features);
    let e = y - inst.target;
    let k = model.kdim;
    model.w0 -= lr * e;
    for &(i, xi) in &inst.features {
        model.w[i] -= lr * (e * xi + model.lambda_w * model.w[i]);
        for f in 0..k {
            let vif = model.v[i * k + f];
            model.v[i * k + f] -= lr * (e * xi * (sums[f] - vif * xi) + model.lambda_v * vif);
        }
    }
    Ok(())
}

/// One gradient step on `(λ_w, λ_v)` against the validation loss.
pub fn fm_lambda_step(
    model: &mut FmModel,
    train: &[FmInstance],
    validation: &[FmInstance],
    lr: f64,
    lambda_lr: f64,
    lambda_max: f64,
) -> Result<(), FmError> {
    let (_, g) = data_loss_gradient(train, model)?;
    let mut next = model.clone();
    next.w0 -= lr * g.w0;
    for ((p, gi), &wi) in next.w.iter_mut().zip(&g.w).zip(&model.w) {
        *p -= lr * (gi + model.lambda_w * wi);
    }
    for ((p, gi), &vi) in next.v.iter_mut().zip(&g.v).zip(&model.v) {
        *p -= lr * (gi + model.lambda_v * vi);
    }
    let (_, gv) = data_loss_gradient(validation, &next)?;
    let d_lw: f64 = gv.w.iter().zip(&model.w).map(|(a, b)| a * -lr * b).sum();
    let d_lv: f64 = gv.v.iter().zip(&model.v).map(|(a, b)| a * -lr * b).sum();
    model.lambda_w = (model.lambda_w - lambda_lr * d_lw).clamp(0.0, lambda_max);
    model.lambda_v = (model.lambda_v - lambda_lr * d_lv).clamp(0.0, lambda_max);
    Ok(())
}

/// Trains from a seeded initialization. Validation must be non-empty.
pub fn fm_train(
    train: &[FmInstance],
    validation: &[FmInstance],
    n_features: usize,
    config: &FmConfig,
) -> Result<FmModel, FmError> {
    config.validate()?;
    if train.is_empty() {
        return Err(FmError::EmptyTraining);
    }
    if validation.is_empty() {
        return Err(FmError::EmptyValidation);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut model = FmModel::init(n_features, config.kdim, config.init_std, config.lambda_init, &mut rng);
    for inst in train.iter().chain(validation) {
        model.check(&inst.features)?;
    }
    let lr = config.learning_rate;
    let mut order: Vec<usize> = (0..train.len()).collect();
    match config.mode {
        IterationMode::Epochs => {
            for epoch in 0..config.iterations {
                order.shuffle(&mut rng);
                for &i in &order {
                    fm_sgd_step(&train[i], &mut model, lr)?;
                }
                fm_lambda_step(&mut model, train, validation, lr, config.lambda_lr, config.lambda_max)?;
                if !model.is_finite() {
                    return Err(FmError::DivergenceDetected { epoch });
                }
                model.loss_history.push(fm_data_loss(train, &model)?);
            }
        }
        IterationMode::Steps => {
            let mut cursor = order.len();
            for step in 0..config.iterations {
                if cursor == order.len() {
                    if step > 0 {
                        fm_lambda_step(&mut model, train, validation, lr, config.lambda_lr, config.lambda_max)?;
                    }
                    order.shuffle(&mut rng);
                    cursor = 0;
                }
                fm_sgd_step(&train[order[cursor]], &mut model, lr)?;
                cursor += 1;
                if !model.is_finite() {
                    return Err(FmError::DivergenceDetected { epoch: step });
                }
                model.loss_history.push(fm_data_loss(train, &model)?);
            }
        }
    }
    Ok(model)
}

/// Seeded split of `data` into `(train, validation)` with `ceil(fraction * n)`
/// validation instances (at least one when `n >= 2`).
pub fn carve_validation(data: &[FmInstance], fraction: f64, seed: u64) -> (Vec<FmInstance>, Vec<FmInstance>) {
    let mut idx: Vec<usize> = (0..data.len()).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n_val = if data.len() < 2 {
        0
    } else {
        ((fraction * data.len() as f64).ceil() as usize).clamp(1, data.len() - 1)
    };
    let val = idx[..n_val].iter().map(|&i| data[i].clone()).collect();
    let train = idx[n_val..].iter().map(|&i| data[i].clone()).collect();
    (train, val)
}

/// Maps users and columns (and optionally item communities) to feature indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FmEncoder {
    /// Sorted.
    pub users: Vec<String>,
    /// Sorted.
    pub columns: Vec<ColumnKey>,
    pub communities: Option<BTreeMap<ItemId, usize>>,
}

impl FmEncoder {
    pub fn from_matrix(matrix: &RatingMatrix, communities: Option<BTreeMap<ItemId, usize>>) -> Self {
        FmEncoder {
            users: matrix.users().to_vec(),
            columns: matrix.columns().to_vec(),
            communities,
        }
    }

    fn n_communities(&self) -> usize {
        self.communities
            .as_ref()
            .and_then(|c| c.values().max().map(|m| m + 1))
            .unwrap_or(0)
    }

    pub fn n_features(&self) -> usize {
        self.users.len() + self.columns.len() + self.n_communities()
    }

    pub fn encode(&self, user: &str, column: &ColumnKey) -> Result<Vec<(usize, f64)>, CfError> {
        let u = self
            .users
            .binary_search_by(|x| x.as_str().cmp(user))
            .map_err(|_| CfError::UnknownUser(user.to_string()))?;
        let c = self
            .columns
            .binary_search(column)
            .map_err(|_| CfError::UnknownColumn(column.clone()))?;
        let mut x = vec![(u, 1.0), (self.users.len() + c, 1.0)];
        if let Some(&k) = self.communities.as_ref().and_then(|m| m.get(&column.item_id)) {
            x.push((self.users.len() + self.columns.len() + k, 1.0));
        }
        Ok(x)
    }
}

/// A trained FM with its feature encoder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FmRecommender {
    pub encoder: FmEncoder,
    pub config: FmConfig,
    pub model: FmModel,
}

impl FmRecommender {
    /// Trains on every entry of `matrix`, carving a seeded validation share.
    pub fn fit(
        matrix: &RatingMatrix,
        communities: Option<BTreeMap<ItemId, usize>>,
        config: &FmConfig,
    ) -> Result<Self, FmError> {
        let encoder = FmEncoder::from_matrix(matrix, communities.filter(|_| config.side_feature));
        let mut data = Vec::with_capacity(matrix.n_entries());
        for (u, user) in matrix.users().iter().enumerate() {
            for &(c, r) in matrix.row(u) {
                data.push(FmInstance {
                    features: encoder.encode(user, &matrix.columns()[c])?,
                    target: r,
                });
            }
        }
        let (train, val) = carve_validation(&data, config.validation_fraction, config.seed);
        let model = fm_train(&train, &val, encoder.n_features(), config)?;
        Ok(FmRecommender {
            encoder,
            config: *config,
            model,
        })
    }
}

impl RatingPredictor for FmRecommender {
    fn method(&self) -> Method {
        Method::Fm
    }

    fn predict(&self, user: &str, column: &ColumnKey) -> Result<Prediction, CfError> {
        let x = self.encoder.encode(user, column)?;
        let raw = self.model.forward(&x).0;
        Ok(Prediction {
            user_id: user.to_string(),
            column: column.clone(),
            rating: raw.clamp(RATING_MIN, RATING_MAX),
            raw,
            method: Method::Fm,
        })
    }
}

impl Documented for FmRecommender {
    fn kind(&self) -> &'static str {
        "fm"
    }

    fn vocabulary_hash(&self) -> Option<String> {
        None
    }

    fn seed(&self) -> Option<u64> {
        Some(self.config.seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn naive_predict(x: &[(usize, f64)], m: &FmModel) -> f64 {
        let mut y = m.w0;
        for &(i, xi) in x {
            y += m.w[i] * xi;
        }
        for a in 0..x.len() {
            for b in a + 1..x.len() {
                let (i, xi) = x[a];
                let (j, xj) = x[b];
                let dot: f64 = m.factor(i).iter().zip(m.factor(j)).map(|(p, q)| p * q).sum();
                y += dot * xi * xj;
            }
        }
        y
    }

    fn random_model(rng: &mut ChaCha8Rng, n: usize, k: usize) -> FmModel {
        let mut m = FmModel::zeros(n, k);
        m.w0 = rng.gen_range(-1.0..1.0);
        m.w.iter_mut().for_each(|x| *x = rng.gen_range(-1.0..1.0));
        m.v.iter_mut().for_each(|x| *x = rng.gen_range(-1.0..1.0));
        m
    }

    #[test]
    fn zero_model_predicts_zero() {
        assert_eq!(fm_predict(&[(0, 1.0), (2, 1.0)], &FmModel::zeros(3, 2)).unwrap(), 0.0);
    }

    #[test]
    fn single_pair_closed_form() {
        let mut m = FmModel::zeros(2, 1);
        m.v = vec![0.7, -1.3];
        assert!((fm_predict(&[(0, 1.0), (1, 1.0)], &m).unwrap() - 0.7 * -1.3).abs() < 1e-15);
    }

    #[test]
    fn out_of_range_feature() {
        assert_eq!(
            fm_predict(&[(3, 1.0)], &FmModel::zeros(3, 1)).unwrap_err(),
            FmError::FeatureIndexOutOfRange { index: 3, n_features: 3 }
        );
    }

    proptest! {
        #[test]
        fn linear_time_matches_pairwise(seed in any::<u64>(), n in 1usize..=6, k in 1usize..=3) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random_model(&mut rng, n, k);
            let mut x = Vec::new();
            for i in 0..n {
                if rng.gen_bool(0.6) {
                    x.push((i, rng.gen_range(-2.0..2.0)));
                }
            }
            prop_assert!((fm_predict(&x, &m).unwrap() - naive_predict(&x, &m)).abs() <= 1e-10);
        }
    }

    fn rel_err(a: f64, b: f64) -> f64 {
        (a - b).abs() / a.abs().max(b.abs()).max(1e-8)
    }

    #[test]
    fn loss_gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let (n, k) = (5, 2);
            let mut m = random_model(&mut rng, n, k);
            m.lambda_w = 0.3;
            m.lambda_v = 0.2;
            let data: Vec<FmInstance> = (0..4)
                .map(|_| FmInstance {
                    features: vec![(rng.gen_range(0..2), 1.0), (rng.gen_range(2..5), 1.0)],
                    target: rng.gen_range(1.0..5.0),
                })
                .collect();
            let (_, g) = fm_loss_gradient(&data, &m).unwrap();
            let h = 1e-5;
            let num = |m2: &FmModel| fm_loss_gradient(&data, m2).unwrap().0;
            let mut p = m.clone();
            p.w0 += h;
            let mut q = m.clone();
            q.w0 -= h;
            assert!(rel_err(g.w0, (num(&p) - num(&q)) / (2.0 * h)) < 1e-6);
            for i in 0..n {
                let (mut p, mut q) = (m.clone(), m.clone());
                p.w[i] += h;
                q.w[i] -= h;
                assert!(rel_err(g.w[i], (num(&p) - num(&q)) / (2.0 * h)) < 1e-6);
            }
            for i in 0..n * k {
                let (mut p, mut q) = (m.clone(), m.clone());
                p.v[i] += h;
                q.v[i] -= h;
                assert!(rel_err(g.v[i], (num(&p) - num(&q)) / (2.0 * h)) < 1e-6);
            }
        }
    }

    fn constant_set(c: f64) -> Vec<FmInstance> {
        (0..50)
            .map(|i| FmInstance {
                features: vec![(i % 5, 1.0), (5 + i % 7, 1.0)],
                target: c,
            })
            .collect()
    }

    #[test]
    fn zero_learning_rate_keeps_init() {
        let data = constant_set(3.0);
        let cfg = FmConfig { learning_rate: 0.0, iterations: 5, kdim: 3, ..FmConfig::default() };
        let m = fm_train(&data[..40], &data[40..], 12, &cfg).unwrap();
        let init = FmModel::init(12, 3, cfg.init_std, cfg.lambda_init, &mut ChaCha8Rng::seed_from_u64(cfg.seed));
        assert_eq!((m.w0, &m.w, &m.v), (init.w0, &init.w, &init.v));
        assert_eq!((m.lambda_w, m.lambda_v), (cfg.lambda_init, cfg.lambda_init));
    }

    #[test]
    fn constant_targets_learn_bias() {
        let data = constant_set(3.5);
        let cfg = FmConfig { learning_rate: 0.05, iterations: 100, kdim: 4, ..FmConfig::default() };
        let m = fm_train(&data, &data[..5], 12, &cfg).unwrap();
        let rmse = (2.0 * fm_data_loss(&data, &m).unwrap()).sqrt();
        assert!(rmse <= 0.05, "rmse {rmse}");
        // w0 carries most of the constant, the user and column weights the rest
        assert!(m.w0 > 0.75 * 3.5 - 0.1 && m.w0 < 3.5, "w0 {}", m.w0);
    }

    #[test]
    fn training_is_reproducible_and_lambdas_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let data: Vec<FmInstance> = (0..80)
            .map(|_| FmInstance {
                features: vec![(rng.gen_range(0..6), 1.0), (rng.gen_range(6..12), 1.0)],
                target: rng.gen_range(1.0..5.0),
            })
            .collect();
        let cfg = FmConfig { learning_rate: 0.05, iterations: 20, kdim: 2, lambda_lr: 50.0, ..FmConfig::default() };
        let a = fm_train(&data[..70], &data[70..], 12, &cfg).unwrap();
        let b = fm_train(&data[..70], &data[70..], 12, &cfg).unwrap();
        assert_eq!(a, b);
        assert!((0.0..=cfg.lambda_max).contains(&a.lambda_w));
        assert!((0.0..=cfg.lambda_max).contains(&a.lambda_v));
        let steps = FmConfig { mode: IterationMode::Steps, iterations: 100, ..cfg };
        let s = fm_train(&data[..70], &data[70..], 12, &steps).unwrap();
        assert_eq!(s.loss_history.len(), 100);
    }

    #[test]
    fn empty_validation_rejected() {
        let data = constant_set(2.0);
        assert_eq!(fm_train(&data, &[], 12, &FmConfig::default()).unwrap_err(), FmError::EmptyValidation);
    }

    #[test]
    fn divergence_detected() {
        let data = constant_set(5.0);
        let cfg = FmConfig { learning_rate: 50.0, iterations: 50, kdim: 2, init_std: 1.0, ..FmConfig::default() };
        assert!(matches!(fm_train(&data, &data[..3], 12, &cfg), Err(FmError::DivergenceDetected { .. })));
    }

    #[test]
    fn carve_is_disjoint_and_seeded() {
        let data = constant_set(1.0);
        let (t, v) = carve_validation(&data, 0.1, 3);
        assert_eq!((t.len(), v.len()), (45, 5));
        assert_eq!(carve_validation(&data, 0.1, 3), (t, v));
    }
}
