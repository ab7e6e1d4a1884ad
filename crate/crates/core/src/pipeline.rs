//! Glue from raw reviews to scored fragments and the rating matrix.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cf::{derive_item_rating, CfError, ColumnKey, RatingMatrix, ScoredFragment};
use crate::corpus::{normalize, LexiconSet, Polarity, ReviewRecord};
use crate::fragmenter::{find_mentions, scope_fragments, ItemFragment, ItemId, ItemLexicon};
use crate::sentiment::{classify_fragment, SentimentModel};

/// Default blend weight between review stars and fragment sentiment.
pub const DEFAULT_BLEND: f64 = 0.5;

/// Ground-truth thresholds accepted for star-derived labels.
pub const THRESHOLDS: [f64; 3] = [2.0, 2.5, 3.0];

/// A review with its normalized tokens and per-item fragments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcessedReview {
    pub review: ReviewRecord,
    pub tokens: Vec<String>,
    pub fragments: Vec<ItemFragment>,
}

pub fn process_review(review: &ReviewRecord, lex: &LexiconSet, items: &ItemLexicon) -> ProcessedReview {
    let tokens = normalize(&review.text, lex);
    let mentions = find_mentions(&tokens, items);
    let fragments = scope_fragments(&review.review_id, &tokens, &mentions);
    ProcessedReview {
        review: review.clone(),
        tokens,
        fragments,
    }
}

pub fn process_reviews(reviews: &[ReviewRecord], lex: &LexiconSet, items: &ItemLexicon) -> Vec<ProcessedReview> {
    reviews.iter().map(|r| process_review(r, lex, items)).collect()
}

/// Where fragment labels come from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum LabelMode {
    /// The review's annotated label, copied to each of its fragments.
    Manual,
    /// Positive iff the review's stars reach the threshold.
    Threshold(f64),
}

impl Default for LabelMode {
    fn default() -> Self {
        LabelMode::Manual
    }
}

impl fmt::Display for LabelMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabelMode::Manual => f.write_str("manual"),
            LabelMode::Threshold(t) => write!(f, "threshold:{t:.1}"),
        }
    }
}

impl std::str::FromStr for LabelMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "manual" {
            return Ok(LabelMode::Manual);
        }
        let t: f64 = s
            .strip_prefix("threshold:")
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| format!("unknown label mode `{s}` (expected manual or threshold:T)"))?;
        if THRESHOLDS.contains(&t) {
            Ok(LabelMode::Threshold(t))
        } else {
            Err(format!("threshold {t} not one of 2.0, 2.5, 3.0"))
        }
    }
}

impl TryFrom<String> for LabelMode {
    type Error = String;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<LabelMode> for String {
    fn from(m: LabelMode) -> String {
        m.to_string()
    }
}

impl LabelMode {
    /// `None` when the review carries no usable label under this mode.
    pub fn label(&self, review: &ReviewRecord) -> Option<Polarity> {
        match self {
            LabelMode::Manual => review.annotated_label.polarity(),
            LabelMode::Threshold(t) => Some(if review.stars.value() >= *t {
                Polarity::Positive
            } else {
                Polarity::Negative
            }),
        }
    }
}

/// Gold per-fragment labels keyed by `(review_id, item_id)`.
pub type GoldLabels = BTreeMap<(String, ItemId), Polarity>;

/// Labelled fragments of `reviews`, skipping fragments without a label.
/// Gold labels take precedence when given.
pub fn labelled_fragments<'a>(
    reviews: &'a [ProcessedReview],
    mode: LabelMode,
    gold: Option<&GoldLabels>,
) -> Vec<(&'a ProcessedReview, &'a ItemFragment, Polarity)> {
    let mut out = Vec::new();
    for r in reviews {
        for f in &r.fragments {
            let label = match gold {
                Some(g) => g.get(&(f.review_id.clone(), f.item_id)).copied(),
                None => mode.label(&r.review),
            };
            if let Some(l) = label {
                out.push((r, f, l));
            }
        }
    }
    out
}

/// Scores every fragment; `None` scores everything as neutral.
pub fn score_fragments(reviews: &[ProcessedReview], model: Option<&SentimentModel>) -> Vec<ScoredFragment> {
    let mut out = Vec::new();
    for r in reviews {
        for f in &r.fragments {
            out.push(ScoredFragment {
                review_id: r.review.review_id.clone(),
                user_id: r.review.user_id.clone(),
                restaurant_id: r.review.restaurant_id.clone(),
                item_id: f.item_id,
                stars: r.review.stars.value(),
                score: model.map_or(0.0, |m| classify_fragment(&f.tokens, m).value()),
            });
        }
    }
    out
}

/// Derived ratings, averaged per `(user, column)`.
pub fn rating_matrix(scored: &[ScoredFragment], blend: f64) -> Result<RatingMatrix, CfError> {
    RatingMatrix::from_observations(
        scored
            .iter()
            .map(|f| (f.user_id.clone(), f.column(), derive_item_rating(f.stars, f.score, blend))),
    )
}

/// Review id to restaurant id.
pub fn restaurant_of_review(reviews: &[ProcessedReview]) -> BTreeMap<String, String> {
    reviews
        .iter()
        .map(|r| (r.review.review_id.clone(), r.review.restaurant_id.clone()))
        .collect()
}

/// Every `(restaurant, item)` pair with at least one fragment.
pub fn catalog(scored: &[ScoredFragment]) -> std::collections::BTreeSet<ColumnKey> {
    scored.iter().map(ScoredFragment::column).collect()
}
