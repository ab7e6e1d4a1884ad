use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::SidesError;
use crate::fragmenter::{ItemFragment, ItemLexicon};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LdaConfig {
    pub k: usize,
    /// Defaults to `50 / k`.
    pub alpha: Option<f64>,
    pub beta: f64,
    pub sweeps: usize,
    pub seed: u64,
}

impl Default for LdaConfig {
    fn default() -> Self {
        LdaConfig {
            k: 10,
            alpha: None,
            beta: 0.01,
            sweeps: 500,
            seed: 42,
        }
    }
}

/// Collapsed Gibbs state: final-sweep counts are the model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicModel {
    pub k: usize,
    pub alpha: f64,
    pub beta: f64,
    /// Sorted.
    pub vocabulary: Vec<String>,
    pub docs: Vec<Vec<usize>>,
    pub z: Vec<Vec<usize>>,
    pub n_dk: Vec<Vec<u32>>,
    /// `k x |V|`
    pub n_kw: Vec<Vec<u32>>,
    pub n_k: Vec<u32>,
    pub seed: u64,
}

impl TopicModel {
    /// Smoothed `(n_kw + β) / (n_k + β|V|)`.
    pub fn word_probability(&self, k: usize, w: usize) -> f64 {
        (self.n_kw[k][w] as f64 + self.beta) / (self.n_k[k] as f64 + self.beta * self.vocabulary.len() as f64)
    }

    /// Recounts from `z` and compares with the cached counts.
    pub fn check_invariants(&self) -> Result<(), String> {
        let v = self.vocabulary.len();
        let mut n_dk = vec![vec![0u32; self.k]; self.docs.len()];
        let mut n_kw = vec![vec![0u32; v]; self.k];
        let mut n_k = vec![0u32; self.k];
        for (d, doc) in self.docs.iter().enumerate() {
            if doc.len() != self.z[d].len() {
                return Err(format!("doc {d}: {} tokens but {} assignments", doc.len(), self.z[d].len()));
            }
            for (&w, &k) in doc.iter().zip(&self.z[d]) {
                n_dk[d][k] += 1;
                n_kw[k][w] += 1;
                n_k[k] += 1;
            }
            let sum: u32 = self.n_dk[d].iter().sum();
            if sum as usize != doc.len() {
                return Err(format!("doc {d}: topic counts sum to {sum}, length {}", doc.len()));
            }
        }
        for k in 0..self.k {
            let sum: u32 = self.n_kw[k].iter().sum();
            if sum != self.n_k[k] {
                return Err(format!("topic {k}: word counts sum to {sum}, total {}", self.n_k[k]));
            }
        }
        if n_dk != self.n_dk || n_kw != self.n_kw || n_k != self.n_k {
            return Err("cached counts disagree with assignments".into());
        }
        Ok(())
    }

    /// `topic<TAB>rank<TAB>token<TAB>probability` lines, top `n` per topic.
    pub fn export_tsv(&self, n: usize) -> String {
        let mut out = String::new();
        for k in 0..self.k {
            for (rank, (w, p)) in top_words(self, k, n).into_iter().enumerate() {
                out.push_str(&format!("{k}\t{rank}\t{w}\t{p}\n"));
            }
        }
        out
    }
}

pub fn lda_train<S: AsRef<str>>(docs: &[Vec<S>], config: &LdaConfig) -> Result<TopicModel, SidesError> {
    lda_train_observed(docs, config, |_, _| {})
}

/// Like `lda_train`, calling `observe(sweep, model)` after every sweep.
pub fn lda_train_observed<S, F>(docs: &[Vec<S>], config: &LdaConfig, mut observe: F) -> Result<TopicModel, SidesError>
where
    S: AsRef<str>,
    F: FnMut(usize, &TopicModel),
{
    if config.k == 0 {
        return Err(SidesError::InvalidConfig("k must be >= 1".into()));
    }
    let alpha = config.alpha.unwrap_or(50.0 / config.k as f64);
    if !(alpha > 0.0 && config.beta > 0.0) {
        return Err(SidesError::InvalidConfig("alpha and beta must be > 0".into()));
    }
    let vocabulary: Vec<String> = docs
        .iter()
        .flatten()
        .map(|t| t.as_ref().to_string())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if vocabulary.is_empty() {
        return Err(SidesError::EmptyCorpus);
    }
    let index: BTreeMap<&str, usize> = vocabulary.iter().enumerate().map(|(i, w)| (w.as_str(), i)).collect();
    let encoded: Vec<Vec<usize>> = docs
        .iter()
        .map(|d| d.iter().map(|t| index[t.as_ref()]).collect())
        .collect();
    let (k, v) = (config.k, vocabulary.len());
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut m = TopicModel {
        k,
        alpha,
        beta: config.beta,
        vocabulary: vocabulary.clone(),
        z: Vec::with_capacity(encoded.len()),
        n_dk: vec![vec![0; k]; encoded.len()],
        n_kw: vec![vec![0; v]; k],
        n_k: vec![0; k],
        docs: Vec::new(),
        seed: config.seed,
    };
    for (d, doc) in encoded.iter().enumerate() {
        let zs: Vec<usize> = doc.iter().map(|_| rng.gen_range(0..k)).collect();
        for (&w, &t) in doc.iter().zip(&zs) {
            m.n_dk[d][t] += 1;
            m.n_kw[t][w] += 1;
            m.n_k[t] += 1;
        }
        m.z.push(zs);
    }
    m.docs = encoded;
    let beta_v = config.beta * v as f64;
    let mut p = vec![0.0; k];
    for sweep in 0..config.sweeps {
        for d in 0..m.docs.len() {
            for i in 0..m.docs[d].len() {
                let w = m.docs[d][i];
                let old = m.z[d][i];
                m.n_dk[d][old] -= 1;
                m.n_kw[old][w] -= 1;
                m.n_k[old] -= 1;
                let mut total = 0.0;
                for t in 0..k {
                    total += (m.n_dk[d][t] as f64 + alpha) * (m.n_kw[t][w] as f64 + config.beta)
                        / (m.n_k[t] as f64 + beta_v);
                    p[t] = total;
                }
                let u = rng.gen::<f64>() * total;
                let new = p.iter().position(|&c| u < c).unwrap_or(k - 1);
                m.z[d][i] = new;
                m.n_dk[d][new] += 1;
                m.n_kw[new][w] += 1;
                m.n_k[new] += 1;
            }
        }
        observe(sweep, &m);
    }
    Ok(m)
}

/// Top `n` tokens of topic `k` by smoothed probability, ties lexicographic.
pub fn top_words(model: &TopicModel, k: usize, n: usize) -> Vec<(String, f64)> {
    let mut words: Vec<(String, f64)> = (0..model.vocabulary.len())
        .map(|w| (model.vocabulary[w].clone(), model.word_probability(k, w)))
        .collect();
    words.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    words.truncate(n);
    words
}

/// One document per restaurant: the canonical names of the items its reviews mention.
pub fn restaurant_documents(
    fragments: &[ItemFragment],
    restaurant_of_review: &BTreeMap<String, String>,
    lexicon: &ItemLexicon,
) -> BTreeMap<String, Vec<String>> {
    let mut docs: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for f in fragments {
        if let (Some(r), Some(name)) = (restaurant_of_review.get(&f.review_id), lexicon.name(f.item_id)) {
            docs.entry(r.clone()).or_default().push(name.to_string());
        }
    }
    docs
}

#[cfg(test)]
mod tests {
    use super::*;

    fn docs(texts: &[&str]) -> Vec<Vec<String>> {
        texts.iter().map(|t| t.split_whitespace().map(String::from).collect()).collect()
    }

    #[test]
    fn single_topic_top_word_is_most_frequent() {
        let d = docs(&["a b b c", "b c", "d"]);
        let m = lda_train(&d, &LdaConfig { k: 1, sweeps: 3, ..LdaConfig::default() }).unwrap();
        assert_eq!(top_words(&m, 0, 1)[0].0, "b");
        let all = top_words(&m, 0, 99);
        assert_eq!(all.iter().map(|w| w.0.as_str()).collect::<Vec<_>>(), vec!["b", "c", "a", "d"]);
    }

    #[test]
    fn invariants_every_sweep_and_normalized() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let d: Vec<Vec<String>> = (0..100)
            .map(|_| (0..rng.gen_range(1..15)).map(|_| format!("w{}", rng.gen_range(0..30))).collect())
            .collect();
        let mut sweeps = 0;
        let m = lda_train_observed(&d, &LdaConfig { k: 4, sweeps: 20, ..LdaConfig::default() }, |_, m| {
            m.check_invariants().unwrap();
            sweeps += 1;
        })
        .unwrap();
        assert_eq!(sweeps, 20);
        for k in 0..m.k {
            let s: f64 = (0..m.vocabulary.len()).map(|w| m.word_probability(k, w)).sum();
            assert!((s - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn empty_corpus_rejected() {
        let d: Vec<Vec<String>> = vec![vec![]];
        assert_eq!(lda_train(&d, &LdaConfig::default()).unwrap_err(), SidesError::EmptyCorpus);
    }

    #[test]
    fn seeded_reproducible() {
        let d = docs(&["a b c", "c d e", "a e"]);
        let cfg = LdaConfig { k: 2, sweeps: 10, ..LdaConfig::default() };
        assert_eq!(lda_train(&d, &cfg).unwrap(), lda_train(&d, &cfg).unwrap());
    }
}
