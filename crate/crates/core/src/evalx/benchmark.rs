use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::metrics::{mae, precision_at_k, rmse, Confusion, Query};
use super::split::{train_test_split, SplitRounding, DEFAULT_TRAIN_FRACTION};
use super::synth::{GoldRating, SynthCorpus};
use super::EvalError;
use crate::cf::{
    derive_item_rating, recommend_top_k, Baseline, CfError, ColumnKey, Eq1Center, ItemItemCf, Method, Neighborhood,
    Prediction, RatingPredictor, SideAffinity, UserItemCf, DEFAULT_NEIGHBORHOOD, DEFAULT_SIDE_WEIGHT,
};
use crate::corpus::{LexiconSet, Polarity, ReviewRecord};
use crate::fm::{FmConfig, FmRecommender};
use crate::fragmenter::{ItemFragment, ItemId, ItemLexicon};
use crate::pipeline::{
    catalog, labelled_fragments, process_reviews, rating_matrix, score_fragments, GoldLabels, LabelMode,
    ProcessedReview, DEFAULT_BLEND,
};
use crate::sentiment::{classify_fragment, train_sentiment, ModelChoice, SentimentConfig, SentimentError};
use crate::sides::{build_comention_graph, comention_sets, louvain};

/// Everything the benchmark reads.
#[derive(Debug, Clone, Copy)]
pub struct BenchCorpus<'a> {
    pub reviews: &'a [ReviewRecord],
    pub lexicons: &'a LexiconSet,
    pub items: &'a ItemLexicon,
    pub gold_labels: Option<&'a GoldLabels>,
    pub gold_ratings: Option<&'a [GoldRating]>,
}

impl<'a> BenchCorpus<'a> {
    pub fn from_synth(corpus: &'a SynthCorpus, gold_labels: &'a GoldLabels) -> Self {
        BenchCorpus {
            reviews: &corpus.reviews,
            lexicons: &corpus.lexicons,
            items: &corpus.items,
            gold_labels: Some(gold_labels),
            gold_ratings: Some(&corpus.gold_ratings),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkConfig {
    pub seed: u64,
    pub train_fraction: f64,
    pub split_round: SplitRounding,
    pub methods: Vec<Method>,
    pub classifier: ModelChoice,
    pub sentiment: SentimentConfig,
    pub labels: LabelMode,
    pub blend: f64,
    pub neighborhood: Neighborhood,
    pub eq1_center: Eq1Center,
    pub fm: FmConfig,
    pub top_k: usize,
    pub relevance: f64,
    pub side_weight: f64,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        BenchmarkConfig {
            seed: 42,
            train_fraction: DEFAULT_TRAIN_FRACTION,
            split_round: SplitRounding::Floor,
            methods: Method::ALL.to_vec(),
            classifier: ModelChoice::NaiveBayes,
            sentiment: SentimentConfig::default(),
            labels: LabelMode::Manual,
            blend: DEFAULT_BLEND,
            neighborhood: DEFAULT_NEIGHBORHOOD,
            eq1_center: Eq1Center::User,
            fm: FmConfig::default(),
            top_k: 3,
            relevance: 4.0,
            side_weight: DEFAULT_SIDE_WEIGHT,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub method: Method,
    pub rmse: f64,
    pub mae: f64,
    /// `None` when no recommendation overlaps a held-out rating.
    pub precision: Option<f64>,
    /// Relevance (rating >= threshold) of predicted vs held-out ratings.
    pub f_score: f64,
    pub confusion: Confusion,
    pub n_test: usize,
    /// Classifier F-score on held-out fragments.
    pub sentiment_f_score: f64,
    pub classifier: String,
    pub seed: u64,
}

/// Falls back to a constant for users or columns absent from training.
struct WithFallback<'a> {
    inner: &'a dyn RatingPredictor,
    default: f64,
}

impl RatingPredictor for WithFallback<'_> {
    fn method(&self) -> Method {
        self.inner.method()
    }

    fn predict(&self, user: &str, column: &ColumnKey) -> Result<Prediction, CfError> {
        match self.inner.predict(user, column) {
            Err(CfError::UnknownUser(_)) | Err(CfError::UnknownColumn(_)) => Ok(Prediction {
                user_id: user.to_string(),
                column: column.clone(),
                rating: self.default,
                raw: self.default,
                method: self.inner.method(),
            }),
            other => other,
        }
    }
}

fn relevance(rating: f64, threshold: f64) -> Polarity {
    if rating >= threshold {
        Polarity::Positive
    } else {
        Polarity::Negative
    }
}

/// Held-out `(user, column) -> rating`, averaged over repeats.
fn held_out_ratings(
    test: &[ProcessedReview],
    corpus: &BenchCorpus,
    config: &BenchmarkConfig,
) -> BTreeMap<(String, ColumnKey), f64> {
    let mut acc: BTreeMap<(String, ColumnKey), (f64, usize)> = BTreeMap::new();
    let mut add = |user: &str, column: ColumnKey, r: f64| {
        let e = acc.entry((user.to_string(), column)).or_insert((0.0, 0));
        e.0 += r;
        e.1 += 1;
    };
    if let Some(gold) = corpus.gold_ratings {
        let ids: BTreeSet<&str> = test.iter().map(|r| r.review.review_id.as_str()).collect();
        for g in gold.iter().filter(|g| ids.contains(g.review_id.as_str())) {
            add(&g.user_id, ColumnKey::new(g.restaurant_id.clone(), g.item_id), g.rating);
        }
    } else {
        for r in test {
            for f in &r.fragments {
                let sign = match corpus.gold_labels {
                    Some(g) => g.get(&(f.review_id.clone(), f.item_id)).map(|p| p.sign()),
                    None => config.labels.label(&r.review).map(Polarity::sign),
                };
                let rating = derive_item_rating(r.review.stars.value(), sign.unwrap_or(0.0), config.blend);
                add(&r.review.user_id, ColumnKey::new(r.review.restaurant_id.clone(), f.item_id), rating);
            }
        }
    }
    acc.into_iter().map(|(k, (s, n))| (k, s / n as f64)).collect()
}

/// split, sentiment, ratings, each recommender, metrics; one report per method.
pub fn run_benchmark(corpus: &BenchCorpus, config: &BenchmarkConfig) -> Result<Vec<EvalReport>, EvalError> {
    if config.methods.is_empty() {
        return Err(EvalError::InvalidConfig("no methods selected".into()));
    }
    let processed = process_reviews(corpus.reviews, corpus.lexicons, corpus.items);
    let (train, test) = train_test_split(&processed, config.train_fraction, config.seed, config.split_round)?;

    let labelled = labelled_fragments(&train, config.labels, corpus.gold_labels);
    let tokens: Vec<Vec<String>> = labelled.iter().map(|(_, f, _)| f.tokens.clone()).collect();
    let labels: Vec<Polarity> = labelled.iter().map(|(_, _, l)| *l).collect();
    let model = match train_sentiment(config.classifier, &tokens, &labels, &config.sentiment) {
        Ok(m) => Some(m),
        Err(SentimentError::SingleClassCorpus) => None,
        Err(e) => return Err(EvalError::Training(e.to_string())),
    };
    let classifier = model.as_ref().map_or("constant", |_| config.classifier.as_str()).to_string();

    let test_labelled = labelled_fragments(&test, config.labels, corpus.gold_labels);
    let predicted: Vec<Polarity> = test_labelled
        .iter()
        .map(|(_, f, _)| model.as_ref().map_or(Polarity::Negative, |m| classify_fragment(&f.tokens, m).polarity()))
        .collect();
    let gold: Vec<Polarity> = test_labelled.iter().map(|(_, _, l)| *l).collect();
    let sentiment_f_score = Confusion::from_pairs(&predicted, &gold)?.f1();

    let scored = score_fragments(&train, model.as_ref());
    let matrix = rating_matrix(&scored, config.blend)?;
    let held_out = held_out_ratings(&test, corpus, config);
    if held_out.is_empty() {
        return Err(EvalError::UndefinedMetric("test split has no item ratings".into()));
    }

    let train_fragments: Vec<ItemFragment> = train.iter().flat_map(|r| r.fragments.iter().cloned()).collect();
    let graph = build_comention_graph(&comention_sets(&train_fragments));
    let communities: BTreeMap<ItemId, usize> = match louvain(&graph) {
        Ok(p) => p.assignment().clone(),
        Err(_) => BTreeMap::new(),
    };
    let sides = SideAffinity::new(&communities, &scored);
    let catalog = catalog(&scored);
    let queries: BTreeSet<(String, ItemId)> = held_out.keys().map(|(u, c)| (u.clone(), c.item_id)).collect();

    let mut reports = Vec::new();
    for &method in &config.methods {
        let baseline;
        let user_item;
        let item_item;
        let fm;
        let inner: &dyn RatingPredictor = match method {
            Method::Baseline => {
                baseline = Baseline::fit(&scored);
                &baseline
            }
            Method::UserItem => {
                user_item = UserItemCf::new(&matrix, config.neighborhood, config.eq1_center);
                &user_item
            }
            Method::ItemItem => {
                item_item = ItemItemCf::new(&matrix, config.neighborhood);
                &item_item
            }
            Method::Fm => {
                fm = FmRecommender::fit(&matrix, Some(communities.clone()), &config.fm)
                    .map_err(|e| EvalError::Training(e.to_string()))?;
                &fm
            }
        };
        let predictor = WithFallback {
            inner,
            default: matrix.global_mean(),
        };
        let mut preds = Vec::with_capacity(held_out.len());
        let mut golds = Vec::with_capacity(held_out.len());
        for ((user, column), &g) in &held_out {
            preds.push(predictor.predict(user, column)?.rating);
            golds.push(g);
        }
        let confusion = Confusion::from_pairs(
            &preds.iter().map(|&p| relevance(p, config.relevance)).collect::<Vec<_>>(),
            &golds.iter().map(|&g| relevance(g, config.relevance)).collect::<Vec<_>>(),
        )?;
        let mut qs = Vec::new();
        for (user, item) in &queries {
            match recommend_top_k(&predictor, &catalog, &sides, user, *item, config.top_k, config.side_weight) {
                Ok(recs) => qs.push(Query {
                    user_id: user.clone(),
                    recommended: recs.into_iter().map(|r| ColumnKey::new(r.restaurant_id, *item)).collect(),
                }),
                Err(CfError::UnknownItem(_)) => {}
                Err(e) => return Err(e.into()),
            }
        }
        let precision = match precision_at_k(&qs, &held_out, config.relevance) {
            Ok(p) => Some(p),
            Err(EvalError::UndefinedMetric(_)) => None,
            Err(e) => return Err(e),
        };
        reports.push(EvalReport {
            method,
            rmse: rmse(&preds, &golds)?,
            mae: mae(&preds, &golds)?,
            precision,
            f_score: confusion.f1(),
            confusion,
            n_test: held_out.len(),
            sentiment_f_score,
            classifier: classifier.clone(),
            seed: config.seed,
        });
    }
    Ok(reports)
}

/// Aligned plain-text table of reports.
pub fn render_table(reports: &[EvalReport]) -> String {
    let mut out = format!(
        "{:<10} {:>8} {:>8} {:>10} {:>8} {:>6} {:>6} {:>6} {:>6} {:>6}\n",
        "method", "rmse", "mae", "precision", "f_score", "tp", "fp", "fn", "tn", "seed"
    );
    for r in reports {
        let precision = r.precision.map_or_else(|| "n/a".to_string(), |p| format!("{p:.4}"));
        out.push_str(&format!(
            "{:<10} {:>8.4} {:>8.4} {:>10} {:>8.4} {:>6} {:>6} {:>6} {:>6} {:>6}\n",
            r.method.as_str(),
            r.rmse,
            r.mae,
            precision,
            r.f_score,
            r.confusion.tp,
            r.confusion.fp,
            r.confusion.fn_,
            r.confusion.tn,
            r.seed
        ));
    }
    out
}
