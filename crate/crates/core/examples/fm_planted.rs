//! Fits a factorization machine to data drawn from a planted one and reports
//! how close the recovered model gets on held-out pairs.

use dishrec::evalx::rmse;
use dishrec::fm::{carve_validation, fm_predict, fm_train, FmConfig, FmInstance, FmModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut planted = FmModel::init(30, 2, 0.5, 0.0, &mut rng);
    planted.w0 = 3.0;
    planted.w.iter_mut().for_each(|w| *w = rng.gen_range(-0.5..0.5));
    let noise = Normal::new(0.0, 0.1).unwrap();
    let mut data = Vec::new();
    for u in 0..15 {
        for i in 0..15 {
            let features = vec![(u, 1.0), (15 + i, 1.0)];
            let target = fm_predict(&features, &planted).unwrap() + noise.sample(&mut rng);
            data.push(FmInstance { features, target });
        }
    }
    let (train, test) = carve_validation(&data, 0.2, 11);
    let (tr, val) = carve_validation(&train, 0.1, 42);
    let golds: Vec<f64> = test.iter().map(|t| t.target).collect();
    for (lr, epochs) in [(0.05, 100), (0.001, 100)] {
        let cfg = FmConfig { learning_rate: lr, iterations: epochs, kdim: 2, ..FmConfig::default() };
        let model = fm_train(&tr, &val, 30, &cfg).expect("training converges");
        let preds: Vec<f64> = test.iter().map(|t| fm_predict(&t.features, &model).unwrap()).collect();
        println!(
            "lr {lr} epochs {epochs}: held-out rmse {:.4}, final train loss {:.5}, lambda_w {:.4}, lambda_v {:.4}",
            rmse(&preds, &golds).unwrap(),
            model.loss_history.last().unwrap(),
            model.lambda_w,
            model.lambda_v
        );
    }
}
