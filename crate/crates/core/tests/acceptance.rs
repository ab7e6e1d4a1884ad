//! The acceptance gate: one test per criterion, each printing a PASS/FAIL line.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::panic::{catch_unwind, UnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use dishrec::cf::{
    cosine_sim, predict_item_item, predict_user_item, ColumnKey, Eq1Center, RatingMatrix, SimilarityMatrix,
};
use dishrec::corpus::{build_vocabulary, Polarity};
use dishrec::evalx::{
    fleiss_kappa, mae, precision_at_k, rmse, synth_corpus, synth_sentiment_corpus, Confusion, Query, SynthConfig,
};
use dishrec::fm::{carve_validation, fm_loss_gradient, fm_predict, fm_train, FmConfig, FmInstance, FmModel};
use dishrec::fragmenter::ItemId;
use dishrec::lstm::{lstm_backward, lstm_forward, lstm_loss, LstmParams};
use dishrec::sentiment::{
    classify_fragment, lr_loss_and_gradient, nb_predict, nb_train, train_sentiment, BowVector, ModelChoice,
    SentimentConfig,
};
use dishrec::sides::{lda_train, lda_train_observed, louvain_with_trace, modularity, top_words, LdaConfig, Partition, WeightedGraph};
use proptest::prelude::*;
use proptest::test_runner::{Config as PtConfig, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

/// Runs one criterion, writes its verdict straight to stderr (bypassing
/// libtest capture) and fails the test on FAIL.
fn criterion(n: u32, name: &str, body: impl FnOnce() -> Check + UnwindSafe) {
    let start = Instant::now();
    let outcome = match catch_unwind(body) {
        Ok(r) => r,
        Err(p) => Err(p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panicked".into())),
    };
    let elapsed = start.elapsed().as_secs_f64();
    let line = match &outcome {
        Ok(()) => format!("criterion {n:>2} PASS  {name} ({elapsed:.2}s)\n"),
        Err(e) => format!("criterion {n:>2} FAIL  {name} ({elapsed:.2}s): {e}\n"),
    };
    let _ = std::io::stderr().write_all(line.as_bytes());
    if let Err(e) = outcome {
        panic!("criterion {n} failed: {e}");
    }
}

fn within(limit: Duration, start: Instant, what: &str) -> Check {
    let t = start.elapsed();
    ensure!(t < limit, "{what} took {t:.2?}, limit {limit:.0?}");
    Ok(())
}

fn close(a: f64, b: f64, tol: f64, what: &str) -> Check {
    ensure!((a - b).abs() <= tol, "{what}: {a} vs {b} (tol {tol:e})");
    Ok(())
}

/// Relative error with an absolute floor for near-zero gradients.
fn rel_err(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-7)
}

const DENSE: [[f64; 6]; 5] = [
    [5.0, 3.0, 4.0, 4.0, 1.0, 2.5],
    [3.0, 1.0, 2.0, 3.0, 3.0, 4.5],
    [4.0, 3.0, 4.0, 3.0, 5.0, 1.0],
    [3.0, 3.0, 1.0, 5.0, 4.0, 2.0],
    [1.0, 5.0, 5.0, 2.0, 1.0, 3.5],
];

fn dense_matrix() -> RatingMatrix {
    let mut t = Vec::new();
    for (u, row) in DENSE.iter().enumerate() {
        for (c, &x) in row.iter().enumerate() {
            t.push((format!("u{u}"), ColumnKey::new(format!("r{c}"), ItemId(1)), x));
        }
    }
    RatingMatrix::from_triples(t).unwrap()
}

fn oracle_cos(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum();
    let nb: f64 = b.iter().map(|x| x * x).sum();
    dot / (na * nb).sqrt()
}

fn oracle_eq1(k: usize, m: usize, item_centre: bool) -> f64 {
    let mean = |r: &[f64; 6]| r.iter().sum::<f64>() / 6.0;
    let col_mean = DENSE.iter().map(|r| r[m]).sum::<f64>() / 5.0;
    let (mut num, mut den) = (0.0, 0.0);
    for a in (0..5).filter(|&a| a != k) {
        let s = oracle_cos(&DENSE[k], &DENSE[a]);
        let centre = if item_centre { col_mean } else { mean(&DENSE[a]) };
        num += s * (DENSE[a][m] - centre);
        den += s.abs();
    }
    mean(&DENSE[k]) + num / den
}

fn oracle_eq2(k: usize, m: usize) -> f64 {
    let col = |c: usize| -> Vec<f64> { DENSE.iter().map(|r| r[c]).collect() };
    let (mut num, mut den) = (0.0, 0.0);
    for b in (0..6).filter(|&b| b != m) {
        let s = oracle_cos(&col(m), &col(b));
        num += s * DENSE[k][b];
        den += s.abs();
    }
    num / den
}

#[test]
fn criterion_01_neighbourhood_formulas_match_direct_oracle() {
    criterion(1, "user-item and item-item predictions vs direct oracle (1e-12, <1s)", || {
        let start = Instant::now();
        let m = dense_matrix();
        let us = SimilarityMatrix::users(&m);
        let cs = SimilarityMatrix::columns(&m);
        for k in 0..5 {
            for c in 0..6 {
                let user = format!("u{k}");
                let col = ColumnKey::new(format!("r{c}"), ItemId(1));
                let p = predict_user_item(&m, &us, &user, &col, None, Eq1Center::User).unwrap();
                close(p.raw, oracle_eq1(k, c, false), 1e-12, &format!("user-item ({k},{c})"))?;
                let p = predict_user_item(&m, &us, &user, &col, None, Eq1Center::Item).unwrap();
                close(p.raw, oracle_eq1(k, c, true), 1e-12, &format!("user-item item-centred ({k},{c})"))?;
                let p = predict_item_item(&m, &cs, &user, &col, None).unwrap();
                close(p.raw, oracle_eq2(k, c), 1e-12, &format!("item-item ({k},{c})"))?;
            }
        }
        within(Duration::from_secs(1), start, "30 x 3 predictions")
    });
}

#[test]
fn criterion_02_cosine_cases() {
    criterion(2, "cosine: identical 1.0, disjoint 0.0, (1,2,0).(2,1,0) = 0.8 exactly", || {
        let a = [(0, 1.5), (2, 4.0), (5, 2.0)];
        ensure!(cosine_sim(&a, &a) == 1.0, "identical gave {}", cosine_sim(&a, &a));
        ensure!(cosine_sim(&[(0, 3.0), (1, 1.0)], &[(2, 5.0), (3, 2.0)]) == 0.0, "disjoint not 0");
        let s = cosine_sim(&[(0, 1.0), (1, 2.0)], &[(0, 2.0), (1, 1.0)]);
        ensure!(s == 0.8, "got {s:e}");
        Ok(())
    });
}

fn naive_fm(x: &[(usize, f64)], m: &FmModel) -> f64 {
    let mut y = m.w0;
    for &(i, xi) in x {
        y += m.w[i] * xi;
    }
    for (a, &(i, xi)) in x.iter().enumerate() {
        for &(j, xj) in &x[a + 1..] {
            let dot: f64 = (0..m.kdim).map(|f| m.v[i * m.kdim + f] * m.v[j * m.kdim + f]).sum();
            y += dot * xi * xj;
        }
    }
    y
}

fn sparse_input(rng: &mut ChaCha8Rng, n: usize, density: f64, scale: f64) -> Vec<(usize, f64)> {
    let mut x = Vec::new();
    for i in 0..n {
        if rng.gen_bool(density) {
            x.push((i, rng.gen_range(-scale..scale)));
        }
    }
    x
}

fn random_fm(rng: &mut ChaCha8Rng, n: usize, k: usize) -> FmModel {
    let mut m = FmModel::init(n, k, 0.5, 0.1, rng);
    m.w0 = rng.gen_range(-1.0..1.0);
    m.w.iter_mut().for_each(|w| *w = rng.gen_range(-1.0..1.0));
    m
}

#[test]
fn criterion_03_fm_linear_time_matches_pairwise() {
    criterion(3, "FM linear-time prediction vs O(n^2) oracle, 100 pairs (1e-10)", || {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for case in 0..100 {
            let n = rng.gen_range(1..=6);
            let k = rng.gen_range(1..=3);
            let m = random_fm(&mut rng, n, k);
            let x = sparse_input(&mut rng, n, 0.7, 2.0);
            let fast = fm_predict(&x, &m).map_err(|e| e.to_string())?;
            close(fast, naive_fm(&x, &m), 1e-10, &format!("case {case}"))?;
        }
        Ok(())
    });
}

/// 15 users x 15 items one-hot over 30 features, targets from a planted kdim-2 FM plus N(0, 0.1).
fn planted_fm_data() -> (Vec<FmInstance>, Vec<FmInstance>) {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut planted = FmModel::init(30, 2, 0.5, 0.0, &mut rng);
    planted.w0 = 3.0;
    planted.w.iter_mut().for_each(|w| *w = rng.gen_range(-0.5..0.5));
    let noise = Normal::new(0.0, 0.1).unwrap();
    let mut data = Vec::new();
    for u in 0..15 {
        for i in 0..15 {
            let features = vec![(u, 1.0), (15 + i, 1.0)];
            let target = naive_fm(&features, &planted) + noise.sample(&mut rng);
            data.push(FmInstance { features, target });
        }
    }
    let (train, test) = carve_validation(&data, 0.2, 11);
    (train, test)
}

#[test]
fn criterion_04_fm_recovers_planted_model() {
    criterion(4, "FM planted recovery RMSE <= 0.2; lr 0.001 x 100 epochs stable tail (1e-3), <10s", || {
        let start = Instant::now();
        let (train, test) = planted_fm_data();
        let (tr, val) = carve_validation(&train, 0.1, 42);
        let cfg = FmConfig { learning_rate: 0.05, iterations: 100, kdim: 2, ..FmConfig::default() };
        let model = fm_train(&tr, &val, 30, &cfg).map_err(|e| e.to_string())?;
        let preds: Vec<f64> = test.iter().map(|t| fm_predict(&t.features, &model).unwrap()).collect();
        let golds: Vec<f64> = test.iter().map(|t| t.target).collect();
        let err = rmse(&preds, &golds).unwrap();
        ensure!(err <= 0.2, "held-out RMSE {err:.4} > 0.2");

        let faithful = FmConfig { learning_rate: 0.001, iterations: 100, kdim: 2, ..FmConfig::default() };
        let model = fm_train(&tr, &val, 30, &faithful).map_err(|e| e.to_string())?;
        let h = &model.loss_history;
        ensure!(h.len() == 100, "{} epochs recorded", h.len());
        for w in h[h.len() - 10..].windows(2) {
            ensure!(w[1] <= w[0] + 1e-3, "loss rose {} -> {}", w[0], w[1]);
        }
        within(Duration::from_secs(10), start, "both FM runs")
    });
}

fn lstm_instance(seed: u64) -> (LstmParams, Vec<usize>, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (v, e, h) = (5, 3, 3);
    let mut p = LstmParams::init(v, e, h, &mut rng);
    for (_, t) in p.tensors_mut() {
        t.iter_mut().for_each(|x| *x = rng.gen_range(-0.8..0.8));
    }
    let len = rng.gen_range(1..=5);
    let seq = (0..len).map(|_| rng.gen_range(0..v)).collect();
    let label = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    (p, seq, label)
}

fn check_lstm(seed: u64) -> Check {
    let (p, seq, label) = lstm_instance(seed);
    let (_, cache) = lstm_forward(&seq, &p).unwrap();
    let grad = lstm_backward(&cache, label, &p);
    let grads: Vec<Vec<f64>> = grad.tensors().iter().map(|t| t.to_vec()).collect();
    let loss = |q: &LstmParams| lstm_loss(lstm_forward(&seq, q).unwrap().0, label);
    let h = 1e-5;
    let mut q = p.clone();
    let names: Vec<String> = q.tensors_mut().into_iter().map(|(n, _)| n).collect();
    for (t, name) in names.iter().enumerate() {
        for i in 0..grads[t].len() {
            let orig = q.tensors_mut()[t].1[i];
            q.tensors_mut()[t].1[i] = orig + h;
            let up = loss(&q);
            q.tensors_mut()[t].1[i] = orig - h;
            let down = loss(&q);
            q.tensors_mut()[t].1[i] = orig;
            let numeric = (up - down) / (2.0 * h);
            let r = rel_err(grads[t][i], numeric);
            ensure!(r <= 1e-4, "lstm seed {seed} {name}[{i}]: {} vs {numeric} (rel {r:e})", grads[t][i]);
        }
    }
    Ok(())
}

fn check_lr(seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = rng.gen_range(2..8);
    let n = rng.gen_range(3..12);
    let x: Vec<BowVector> = (0..n)
        .map(|_| BowVector::from_indices(dim, (0..dim).filter(|_| rng.gen_bool(0.5)).collect()))
        .collect();
    let y: Vec<Polarity> = (0..n)
        .map(|_| if rng.gen_bool(0.5) { Polarity::Positive } else { Polarity::Negative })
        .collect();
    let mut w: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.5..1.5)).collect();
    let b = rng.gen_range(-1.0..1.0);
    let l2 = 0.05;
    let (_, g) = lr_loss_and_gradient(&w, b, &x, &y, l2);
    let h = 1e-5;
    for i in 0..dim {
        let orig = w[i];
        w[i] = orig + h;
        let up = lr_loss_and_gradient(&w, b, &x, &y, l2).0;
        w[i] = orig - h;
        let down = lr_loss_and_gradient(&w, b, &x, &y, l2).0;
        w[i] = orig;
        let r = rel_err(g.weights[i], (up - down) / (2.0 * h));
        ensure!(r <= 1e-6, "lr seed {seed} w[{i}] rel {r:e}");
    }
    let up = lr_loss_and_gradient(&w, b + h, &x, &y, l2).0;
    let down = lr_loss_and_gradient(&w, b - h, &x, &y, l2).0;
    let r = rel_err(g.bias, (up - down) / (2.0 * h));
    ensure!(r <= 1e-6, "lr seed {seed} bias rel {r:e}");
    Ok(())
}

fn check_fm(seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=6);
    let k = rng.gen_range(1..=3);
    let mut m = random_fm(&mut rng, n, k);
    m.lambda_w = rng.gen_range(0.0..0.5);
    m.lambda_v = rng.gen_range(0.0..0.5);
    let data: Vec<FmInstance> = (0..rng.gen_range(1..6))
        .map(|_| FmInstance {
            features: sparse_input(&mut rng, n, 0.6, 1.5),
            target: rng.gen_range(1.0..5.0),
        })
        .collect();
    let (_, g) = fm_loss_gradient(&data, &m).unwrap();
    let loss = |m: &FmModel| fm_loss_gradient(&data, m).unwrap().0;
    let h = 1e-5;
    let fd = |m: &mut FmModel, get: &dyn Fn(&mut FmModel) -> &mut f64| {
        let orig = *get(m);
        *get(m) = orig + h;
        let up = loss(m);
        *get(m) = orig - h;
        let down = loss(m);
        *get(m) = orig;
        (up - down) / (2.0 * h)
    };
    let r = rel_err(g.w0, fd(&mut m, &|m| &mut m.w0));
    ensure!(r <= 1e-6, "fm seed {seed} w0 rel {r:e}");
    for i in 0..n {
        let r = rel_err(g.w[i], fd(&mut m, &|m| &mut m.w[i]));
        ensure!(r <= 1e-6, "fm seed {seed} w[{i}] rel {r:e}");
    }
    for i in 0..n * k {
        let r = rel_err(g.v[i], fd(&mut m, &|m| &mut m.v[i]));
        ensure!(r <= 1e-6, "fm seed {seed} v[{i}] rel {r:e}");
    }
    Ok(())
}

#[test]
fn criterion_05_gradient_checks() {
    criterion(5, "central differences: LSTM (1e-4), LR and FM (1e-6), 20 instances each, <30s", || {
        let start = Instant::now();
        for seed in 0..20 {
            check_lstm(seed)?;
            check_lr(seed)?;
            check_fm(seed)?;
        }
        within(Duration::from_secs(30), start, "gradient checks")
    });
}

#[test]
fn criterion_06_lstm_separable_corpus() {
    criterion(6, "LSTM on separable corpus 200/50: F >= 0.90 (lr 0.05, 50 epochs, seed 42), <60s", || {
        let start = Instant::now();
        let corpus = synth_sentiment_corpus(42, 250);
        let (train, test) = corpus.split_at(200);
        let tokens: Vec<Vec<String>> = train.iter().map(|(t, _)| t.clone()).collect();
        let labels: Vec<Polarity> = train.iter().map(|(_, l)| *l).collect();
        let mut cfg = SentimentConfig::default();
        cfg.lstm.learning_rate = 0.05;
        cfg.lstm.epochs = 50;
        cfg.lstm.seed = 42;
        let model = train_sentiment(ModelChoice::Lstm, &tokens, &labels, &cfg).map_err(|e| e.to_string())?;
        let preds: Vec<Polarity> = test.iter().map(|(t, _)| classify_fragment(t, &model).polarity()).collect();
        let golds: Vec<Polarity> = test.iter().map(|(_, l)| *l).collect();
        let f = Confusion::from_pairs(&preds, &golds).unwrap().f1();
        ensure!(f >= 0.90, "F = {f:.4}");
        within(Duration::from_secs(60), start, "LSTM training")
    });
}

#[test]
fn criterion_07_naive_bayes_closed_form() {
    criterion(7, "naive Bayes posterior 2/3 (1e-12); posteriors sum to 1 (1e-12) under proptest", || {
        let docs = vec![vec!["good".to_string()], vec!["bad".to_string()]];
        let labels = [Polarity::Positive, Polarity::Negative];
        let vocab = build_vocabulary(&docs, 1).unwrap();
        let m = nb_train(&docs, &labels, &vocab, 1.0).unwrap();
        let (p, q) = nb_predict(&["good"], &m);
        close(p, 2.0 / 3.0, 1e-12, "p_pos")?;
        close(q, 1.0 / 3.0, 1e-12, "p_neg")?;

        let words = prop::sample::select(vec!["a", "b", "c", "d", "e", "f"]);
        let doc = prop::collection::vec(words.clone(), 1..6);
        let strategy = (prop::collection::vec((doc, any::<bool>()), 2..20), prop::collection::vec(words, 0..8), 0.1f64..3.0);
        let mut runner = TestRunner::new(PtConfig { cases: 256, ..PtConfig::default() });
        runner
            .run(&strategy, |(mut corpus, query, alpha)| {
                corpus[0].1 = true;
                corpus[1].1 = false;
                let docs: Vec<Vec<String>> = corpus.iter().map(|(d, _)| d.iter().map(|w| w.to_string()).collect()).collect();
                let labels: Vec<Polarity> = corpus
                    .iter()
                    .map(|(_, l)| if *l { Polarity::Positive } else { Polarity::Negative })
                    .collect();
                let vocab = build_vocabulary(&docs, 1).unwrap();
                let m = nb_train(&docs, &labels, &vocab, alpha).unwrap();
                let (p, q) = nb_predict(&query, &m);
                prop_assert!((p + q - 1.0).abs() <= 1e-12, "{} + {} = {}", p, q, p + q);
                Ok(())
            })
            .map_err(|e| e.to_string())
    });
}

fn graph(edges: &[(u32, u32, u64)]) -> WeightedGraph {
    let mut g = WeightedGraph::new();
    for &(a, b, w) in edges {
        g.add_edge(ItemId(a), ItemId(b), w);
    }
    g
}

/// Maximum modularity over every set partition, enumerated as restricted growth strings.
fn brute_force_max(g: &WeightedGraph) -> (f64, usize) {
    let nodes: Vec<ItemId> = g.nodes().collect();
    let n = nodes.len();
    let mut labels = vec![0usize; n];
    let mut best = f64::NEG_INFINITY;
    let mut count = 0;
    loop {
        count += 1;
        let p = Partition::from_assignment(nodes.iter().copied().zip(labels.iter().copied()).collect());
        best = best.max(modularity(g, &p));
        // next restricted growth string
        let mut i = n - 1;
        loop {
            let max_prefix = labels[..i].iter().copied().max().unwrap_or(0);
            if i > 0 && labels[i] <= max_prefix {
                labels[i] += 1;
                labels[i + 1..].iter_mut().for_each(|l| *l = 0);
                break;
            }
            if i <= 1 {
                return (best, count);
            }
            i -= 1;
        }
    }
}

#[test]
fn criterion_08_louvain_exact_on_fixtures() {
    criterion(8, "Louvain: bridged K4s = 2 cliques at brute-force max (1e-9); K3 one community; monotone phases; <5s", || {
        let start = Instant::now();
        let mut edges = Vec::new();
        for base in [1u32, 5] {
            for a in base..base + 4 {
                for b in a + 1..base + 4 {
                    edges.push((a, b, 1));
                }
            }
        }
        edges.push((4, 5, 1));
        let g = graph(&edges);
        let trace = louvain_with_trace(&g).map_err(|e| e.to_string())?;
        let communities = trace.partition.communities();
        let expect: Vec<Vec<ItemId>> = vec![(1..=4).map(ItemId).collect(), (5..=8).map(ItemId).collect()];
        ensure!(communities == expect, "communities {communities:?}");
        let (best, count) = brute_force_max(&g);
        ensure!(count == 4140, "enumerated {count} partitions");
        close(modularity(&g, &trace.partition), best, 1e-9, "Q vs brute force")?;

        let k3 = louvain_with_trace(&graph(&[(1, 2, 1), (2, 3, 1), (1, 3, 1)])).map_err(|e| e.to_string())?;
        ensure!(k3.partition.n_communities() == 1, "K3 gave {} communities", k3.partition.n_communities());

        for t in [&trace, &k3] {
            for w in t.phase_modularity.windows(2) {
                ensure!(w[1] >= w[0] - 1e-12, "phase Q decreased {} -> {}", w[0], w[1]);
            }
        }
        within(Duration::from_secs(5), start, "Louvain fixtures with brute force")
    });
}

#[test]
fn criterion_09_modularity_hand_values() {
    criterion(9, "modularity: two K3s by component 0.5, single community 0 (1e-12)", || {
        let g = graph(&[(1, 2, 1), (2, 3, 1), (1, 3, 1), (4, 5, 1), (5, 6, 1), (4, 6, 1)]);
        let split = Partition::from_assignment((1..=6).map(|i| (ItemId(i), usize::from(i > 3))).collect());
        close(modularity(&g, &split), 0.5, 1e-12, "by component")?;
        close(modularity(&g, &Partition::single(&g)), 0.0, 1e-12, "single community")
    });
}

#[test]
fn criterion_10_lda_invariants_and_planted_topics() {
    criterion(10, "LDA: invariants every sweep (100 docs); planted purity >= 90% (K=2, 500 sweeps, seed 42); <60s", || {
        let start = Instant::now();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let docs: Vec<Vec<String>> = (0..100)
            .map(|_| (0..rng.gen_range(5..30)).map(|_| format!("w{}", rng.gen_range(0..25))).collect())
            .collect();
        let mut violation = None;
        let mut sweeps = 0;
        let cfg = LdaConfig { k: 5, sweeps: 100, ..LdaConfig::default() };
        lda_train_observed(&docs, &cfg, |_, m| {
            sweeps += 1;
            if violation.is_none() {
                violation = m.check_invariants().err();
            }
        })
        .map_err(|e| e.to_string())?;
        ensure!(violation.is_none(), "invariant broken: {violation:?}");
        ensure!(sweeps >= cfg.sweeps, "observed {sweeps} sweeps");

        let planted: Vec<Vec<String>> = (0..100)
            .map(|d| {
                let prefix = if d < 50 { "a" } else { "b" };
                (0..20).map(|_| format!("{prefix}{}", rng.gen_range(0..15))).collect()
            })
            .collect();
        let model = lda_train(&planted, &LdaConfig { k: 2, sweeps: 500, seed: 42, ..LdaConfig::default() })
            .map_err(|e| e.to_string())?;
        let mut dominant = Vec::new();
        for k in 0..2 {
            let words = top_words(&model, k, 10);
            let a = words.iter().filter(|(w, _)| w.starts_with('a')).count();
            let purity = a.max(words.len() - a) as f64 / words.len() as f64;
            ensure!(purity >= 0.9, "topic {k} purity {purity}");
            dominant.push(a * 2 > words.len());
        }
        ensure!(dominant[0] != dominant[1], "both topics match the same vocabulary");
        within(Duration::from_secs(60), start, "LDA runs")
    });
}

fn dishrec(args: &[&str], cwd: &Path) -> Result<Vec<u8>, String> {
    let o = Command::new(env!("CARGO_BIN_EXE_dishrec"))
        .args(args)
        .current_dir(cwd)
        .env_remove("FIDUCIA_CONFIG")
        .output()
        .map_err(|e| e.to_string())?;
    if !o.status.success() {
        return Err(format!("{args:?} exited {:?}: {}", o.status.code(), String::from_utf8_lossy(&o.stderr)));
    }
    Ok(o.stdout)
}

const PIPELINE: &[&[&str]] = &[
    &["synth", "--seed", "42", "--users", "50", "--restaurants", "10", "--items", "12", "--noise", "0.15", "--out", "data"],
    &["ingest", "--reviews", "data/reviews.jsonl", "--restaurants", "data/restaurants.jsonl", "--lexicons", "data/lexicons", "--out", "corpus.json"],
    &["train-sentiment", "--model", "nb", "--corpus", "corpus.json", "--labels", "manual", "--out", "nb.json", "--seed", "42"],
    &["train-sentiment", "--model", "bow-lr", "--corpus", "corpus.json", "--labels", "threshold:2.5", "--out", "lr.json", "--seed", "42"],
    &["train-sentiment", "--model", "bow-dt", "--corpus", "corpus.json", "--labels", "threshold:3.0", "--out", "dt.json", "--seed", "42"],
    &["train-sentiment", "--model", "lstm", "--corpus", "corpus.json", "--labels", "manual", "--out", "lstm.json", "--seed", "42"],
    &["recommend", "--corpus", "corpus.json", "--sentiment-model", "nb.json", "--user", "u000", "--item", "pasta", "--method", "fm", "--top-k", "3", "--side-weight", "0.2", "--out", "rec_fm.tsv", "--seed", "42"],
    &["recommend", "--corpus", "corpus.json", "--sentiment-model", "lstm.json", "--user", "u001", "--item", "1", "--method", "user", "--out", "rec_user.tsv", "--seed", "42"],
    &["sides", "--method", "louvain", "--corpus", "corpus.json", "--out", "sides_louvain.tsv", "--seed", "42"],
    &["sides", "--method", "lda", "--topics", "3", "--corpus", "corpus.json", "--out", "sides_lda.tsv", "--seed", "42"],
    &["evaluate", "--data", "data", "--methods", "baseline,user,item,fm", "--seed", "42", "--out", "report.json"],
    &["evaluate", "--data", "data", "--seed", "42", "--format", "table", "--out", "report.txt"],
];

/// Runs the whole pipeline in `dir`, returning stdout of each step.
fn run_pipeline(dir: &Path) -> Result<Vec<Vec<u8>>, String> {
    PIPELINE.iter().map(|args| dishrec(args, dir)).collect()
}

fn rmse_of(report: &serde_json::Value, method: &str) -> Result<f64, String> {
    report["reports"]
        .as_array()
        .and_then(|rs| rs.iter().find(|r| r["method"] == method))
        .and_then(|r| r["rmse"].as_f64())
        .ok_or_else(|| format!("no {method} report"))
}

#[test]
fn criterion_11_end_to_end_ordering() {
    criterion(11, "default synthetic corpus: FM and user-item RMSE below baseline; full pipeline <120s", || {
        let start = Instant::now();
        let dir = tempfile::tempdir().unwrap();
        run_pipeline(dir.path())?;
        within(Duration::from_secs(120), start, "full CLI pipeline")?;
        let report: serde_json::Value =
            serde_json::from_slice(&fs::read(dir.path().join("report.json")).unwrap()).map_err(|e| e.to_string())?;
        let (base, user, fm) = (rmse_of(&report, "baseline")?, rmse_of(&report, "user")?, rmse_of(&report, "fm")?);
        ensure!(fm < base, "fm {fm:.4} >= baseline {base:.4}");
        ensure!(user < base, "user-item {user:.4} >= baseline {base:.4}");

        let lib = synth_corpus(&SynthConfig::default()).unwrap();
        ensure!(lib.reviews.len() == 400, "library corpus has {} reviews", lib.reviews.len());
        Ok(())
    });
}

#[test]
fn criterion_12_metric_oracles() {
    criterion(12, "metric constants (1e-12) and rmse >= mae over 1000 random vectors", || {
        close(rmse(&[1.0, 2.0, 3.0, 4.0], &[1.0, 2.0, 3.0, 7.0]).unwrap(), 1.5, 1e-12, "rmse")?;
        close(mae(&[1.0, 2.0, 3.0, 4.0], &[1.0, 2.0, 3.0, 7.0]).unwrap(), 0.75, 1e-12, "mae")?;
        close(rmse(&[2.0, 4.0], &[3.0, 3.0]).unwrap(), 1.0, 1e-12, "equal |errors| rmse")?;
        close(mae(&[2.0, 4.0], &[3.0, 3.0]).unwrap(), 1.0, 1e-12, "equal |errors| mae")?;

        use Polarity::{Negative as N, Positive as P};
        let c = Confusion::from_pairs(&[P, P, P, N, N, N], &[P, P, N, P, N, N]).unwrap();
        ensure!((c.tp, c.fp, c.fn_, c.tn) == (2, 1, 1, 2), "confusion {c:?}");
        close(c.f1(), 2.0 / 3.0, 1e-12, "F1")?;

        let col = |r: &str| ColumnKey::new(r, ItemId(1));
        let mut held = BTreeMap::new();
        held.insert(("u".to_string(), col("a")), 5.0);
        held.insert(("u".to_string(), col("b")), 5.0);
        held.insert(("v".to_string(), col("a")), 4.0);
        held.insert(("v".to_string(), col("b")), 2.0);
        let q = |u: &str, rs: &[&str]| Query { user_id: u.into(), recommended: rs.iter().map(|r| col(r)).collect() };
        close(precision_at_k(&[q("u", &["a", "b"])], &held, 4.0).unwrap(), 1.0, 1e-12, "all relevant")?;
        close(precision_at_k(&[q("v", &["a", "b"])], &held, 4.0).unwrap(), 0.5, 1e-12, "half relevant")?;
        ensure!(precision_at_k(&[q("w", &["a"])], &held, 4.0).is_err(), "no overlap must be undefined");

        let kappa = fleiss_kappa(&[vec![P, P, N], vec![P, P, P], vec![N, N, N], vec![P, N, N]]).unwrap();
        close(kappa, 1.0 / 3.0, 1e-12, "Fleiss kappa")?;
        close(fleiss_kappa(&[vec![P, P, P], vec![N, N, N]]).unwrap(), 1.0, 1e-12, "unanimous kappa")?;

        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for i in 0..1000 {
            let n = rng.gen_range(1..40);
            let g: Vec<f64> = (0..n).map(|_| rng.gen_range(1.0..5.0)).collect();
            let p: Vec<f64> = (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect();
            let (r, m) = (rmse(&p, &g).unwrap(), mae(&p, &g).unwrap());
            ensure!(r >= m - 1e-12 && m >= 0.0, "vector {i}: rmse {r} < mae {m}");
        }
        Ok(())
    });
}

fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(dir).unwrap().display().to_string();
                out.insert(rel, fs::read(&p).unwrap());
            }
        }
    }
    out
}

#[test]
fn criterion_13_every_command_is_deterministic() {
    criterion(13, "every command rerun with identical flags and seed gives byte-identical artifacts", || {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let out_a = run_pipeline(a.path())?;
        let out_b = run_pipeline(b.path())?;
        for ((args, x), y) in PIPELINE.iter().zip(&out_a).zip(&out_b) {
            ensure!(x == y, "stdout differs for {args:?}");
        }
        let (sa, sb) = (snapshot(a.path()), snapshot(b.path()));
        ensure!(sa.keys().eq(sb.keys()), "different file sets");
        ensure!(sa.len() >= 18, "only {} artifacts", sa.len());
        for (name, bytes) in &sa {
            ensure!(&sb[name] == bytes, "{name} differs between runs");
        }
        let seeded = ["corpus.json", "nb.json", "lstm.json", "rec_fm.tsv", "sides_louvain.tsv", "sides_lda.tsv", "report.json", "data/synth.json"];
        for name in seeded {
            let text = String::from_utf8_lossy(&sa[name]);
            ensure!(text.contains("\"seed\": 42") || text.contains("seed=42"), "{name} does not record the seed");
        }
        Ok(())
    });
}
