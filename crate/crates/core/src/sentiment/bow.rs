use serde::{Deserialize, Serialize};

use crate::corpus::Vocabulary;

/// Binary bag-of-words: the sorted set of vocabulary indices present.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BowVector {
    dim: usize,
    active: Vec<usize>,
}

impl BowVector {
    pub fn from_indices(dim: usize, mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        assert!(indices.last().map_or(true, |&i| i < dim), "index out of range");
        BowVector { dim, active: indices }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn active(&self) -> &[usize] {
        &self.active
    }

    pub fn contains(&self, index: usize) -> bool {
        self.active.binary_search(&index).is_ok()
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.dim];
        for &i in &self.active {
            v[i] = 1.0;
        }
        v
    }

    pub fn dot(&self, weights: &[f64]) -> f64 {
        self.active.iter().map(|&i| weights[i]).sum()
    }
}

pub fn bow_vectorize<S: AsRef<str>>(tokens: &[S], vocab: &Vocabulary) -> BowVector {
    BowVector::from_indices(vocab.len(), vocab.encode(tokens))
}
