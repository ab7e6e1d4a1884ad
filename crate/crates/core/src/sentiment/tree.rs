use serde::{Deserialize, Serialize};

use super::BowVector;
use crate::corpus::{Polarity, Vocabulary};

const IMPURITY_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DtConfig {
    pub max_depth: usize,
    pub min_samples_leaf: usize,
}

impl Default for DtConfig {
    fn default() -> Self {
        DtConfig {
            max_depth: 10,
            min_samples_leaf: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TreeNode {
    Leaf {
        positive: usize,
        negative: usize,
    },
    Split {
        feature: usize,
        /// Samples where the feature is absent.
        absent: Box<TreeNode>,
        present: Box<TreeNode>,
    },
}

impl TreeNode {
    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Split { absent, present, .. } => 1 + absent.depth().max(present.depth()),
        }
    }

    /// Majority class; ties go to positive.
    pub fn label(positive: usize, negative: usize) -> Polarity {
        if positive >= negative {
            Polarity::Positive
        } else {
            Polarity::Negative
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DtModel {
    pub root: TreeNode,
    pub config: DtConfig,
    pub vocabulary: Vocabulary,
}

impl DtModel {
    /// Training class counts `(positive, negative)` of the leaf `x` falls into.
    pub fn leaf_counts(&self, x: &BowVector) -> (usize, usize) {
        let mut node = &self.root;
        loop {
            match node {
                TreeNode::Leaf { positive, negative } => return (*positive, *negative),
                TreeNode::Split {
                    feature,
                    absent,
                    present,
                } => node = if x.contains(*feature) { present } else { absent },
            }
        }
    }
}

/// Gini impurity of a binary node.
pub fn gini(positive: usize, negative: usize) -> f64 {
    let n = (positive + negative) as f64;
    if n == 0.0 {
        return 0.0;
    }
    let p = positive as f64 / n;
    let q = negative as f64 / n;
    1.0 - p * p - q * q
}

struct Builder<'a> {
    x: &'a [BowVector],
    y: &'a [Polarity],
    dim: usize,
    config: DtConfig,
}

#[derive(Clone, Copy)]
struct Candidate {
    feature: usize,
    impurity: f64,
}

impl Builder<'_> {
    fn counts(&self, samples: &[usize]) -> (usize, usize) {
        let pos = samples
            .iter()
            .filter(|&&s| self.y[s] == Polarity::Positive)
            .count();
        (pos, samples.len() - pos)
    }

    /// Per-feature `(present, present_positive)` counts over `samples`.
    fn feature_counts(&self, samples: &[usize]) -> Vec<(usize, usize)> {
        let mut c = vec![(0usize, 0usize); self.dim];
        for &s in samples {
            let is_pos = self.y[s] == Polarity::Positive;
            for &f in self.x[s].active() {
                c[f].0 += 1;
                c[f].1 += usize::from(is_pos);
            }
        }
        c
    }

    /// Valid splits in ascending feature order with their weighted child impurity.
    fn candidates(&self, samples: &[usize]) -> Vec<Candidate> {
        let n = samples.len();
        let (pos, _) = self.counts(samples);
        let min_leaf = self.config.min_samples_leaf;
        self.feature_counts(samples)
            .into_iter()
            .enumerate()
            .filter(|(_, (present, _))| *present >= min_leaf && n - *present >= min_leaf && *present > 0 && *present < n)
            .map(|(feature, (present, present_pos))| {
                let absent = n - present;
                let absent_pos = pos - present_pos;
                let impurity = (present as f64 * gini(present_pos, present - present_pos)
                    + absent as f64 * gini(absent_pos, absent - absent_pos))
                    / n as f64;
                Candidate { feature, impurity }
            })
            .collect()
    }

    fn best(candidates: &[Candidate]) -> Option<Candidate> {
        let mut best: Option<Candidate> = None;
        for &c in candidates {
            if best.map_or(true, |b| c.impurity < b.impurity) {
                best = Some(c);
            }
        }
        best
    }

    fn partition(&self, samples: &[usize], feature: usize) -> (Vec<usize>, Vec<usize>) {
        samples.iter().partition(|&&s| !self.x[s].contains(feature))
    }

    /// Weighted impurity reachable from `samples` with one more split (or none).
    fn one_step_impurity(&self, samples: &[usize]) -> f64 {
        let (pos, neg) = self.counts(samples);
        let own = gini(pos, neg);
        match Self::best(&self.candidates(samples)) {
            Some(c) if c.impurity < own => c.impurity,
            _ => own,
        }
    }

    fn build(&self, samples: &[usize], depth: usize) -> TreeNode {
        let (pos, neg) = self.counts(samples);
        let leaf = TreeNode::Leaf {
            positive: pos,
            negative: neg,
        };
        if pos == 0
            || neg == 0
            || depth >= self.config.max_depth
            || samples.len() < 2 * self.config.min_samples_leaf
        {
            return leaf;
        }
        let parent = gini(pos, neg);
        let candidates = self.candidates(samples);
        let mut chosen = Self::best(&candidates).filter(|c| c.impurity < parent - IMPURITY_EPS);

        // No single split helps (XOR-like data): look one level deeper when the
        // depth budget allows it and keep the split only if its subtree gains.
        if chosen.is_none() && depth + 2 <= self.config.max_depth {
            let n = samples.len() as f64;
            let mut best: Option<Candidate> = None;
            for c in &candidates {
                let (absent, present) = self.partition(samples, c.feature);
                let impurity = (absent.len() as f64 * self.one_step_impurity(&absent)
                    + present.len() as f64 * self.one_step_impurity(&present))
                    / n;
                if best.map_or(true, |b| impurity < b.impurity) {
                    best = Some(Candidate {
                        feature: c.feature,
                        impurity,
                    });
                }
            }
            chosen = best.filter(|c| c.impurity < parent - IMPURITY_EPS);
        }

        match chosen {
            None => leaf,
            Some(c) => {
                let (absent, present) = self.partition(samples, c.feature);
                TreeNode::Split {
                    feature: c.feature,
                    absent: Box::new(self.build(&absent, depth + 1)),
                    present: Box::new(self.build(&present, depth + 1)),
                }
            }
        }
    }
}

/// Greedy Gini tree over binary features. Ties between splits go to the
/// lowest feature index; an empty training set yields a single positive leaf.
pub fn dt_train(x: &[BowVector], y: &[Polarity], vocabulary: &Vocabulary, config: &DtConfig) -> DtModel {
    assert_eq!(x.len(), y.len(), "features and labels differ in length");
    let config = DtConfig {
        max_depth: config.max_depth,
        min_samples_leaf: config.min_samples_leaf.max(1),
    };
    let builder = Builder {
        x,
        y,
        dim: vocabulary.len(),
        config,
    };
    let samples: Vec<usize> = (0..x.len()).collect();
    DtModel {
        root: builder.build(&samples, 0),
        config,
        vocabulary: vocabulary.clone(),
    }
}

pub fn dt_predict(x: &BowVector, model: &DtModel) -> Polarity {
    let (p, n) = model.leaf_counts(x);
    TreeNode::label(p, n)
}
