//! Memory-based collaborative filtering over a users x (restaurant, item) matrix.
//!
//! Columns are `(restaurant, item)` pairs, so recommending a restaurant for a
//! dish means ranking the columns that carry that dish.
//!
//! User-item prediction (mean-centred neighbourhood average):
//!
//! ```text
//! x̂(k,m) = mean(k) + Σ_a sim(k,a) (x(a,m) - centre(a)) / Σ_a |sim(k,a)|
//! ```
//!
//! Item-item prediction (similarity-weighted average of the user's own ratings):
//!
//! ```text
//! x̂(k,m) = Σ_b sim(m,b) x(k,b) / Σ_b |sim(m,b)|
//! ```

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fragmenter::ItemId;

pub const RATING_MIN: f64 = 1.0;
pub const RATING_MAX: f64 = 5.0;

#[derive(Debug, Error, PartialEq)]
pub enum CfError {
    #[error("unknown user `{0}`")]
    UnknownUser(String),
    #[error("unknown column {0}")]
    UnknownColumn(ColumnKey),
    #[error("unknown item {0}")]
    UnknownItem(ItemId),
    #[error("duplicate rating for user `{user}` and column {column}")]
    DuplicateEntry { user: String, column: ColumnKey },
    #[error("rating {0} outside [1, 5]")]
    RatingOutOfRange(f64),
}

/// A `(restaurant, item)` column of the rating matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ColumnKey {
    pub restaurant_id: String,
    pub item_id: ItemId,
}

impl ColumnKey {
    pub fn new(restaurant_id: impl Into<String>, item_id: ItemId) -> Self {
        ColumnKey {
            restaurant_id: restaurant_id.into(),
            item_id,
        }
    }
}

impl fmt::Display for ColumnKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.restaurant_id, self.item_id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Baseline,
    #[serde(rename = "user", alias = "user-item")]
    UserItem,
    #[serde(rename = "item", alias = "item-item")]
    ItemItem,
    Fm,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Baseline, Method::UserItem, Method::ItemItem, Method::Fm];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Baseline => "baseline",
            Method::UserItem => "user",
            Method::ItemItem => "item",
            Method::Fm => "fm",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "baseline" => Ok(Method::Baseline),
            "user" | "user-item" => Ok(Method::UserItem),
            "item" | "item-item" => Ok(Method::ItemItem),
            "fm" => Ok(Method::Fm),
            other => Err(format!("unknown method `{other}` (expected baseline, user, item or fm)")),
        }
    }
}

/// Maps a review's stars and a fragment's sentiment to an item rating:
/// `clamp(stars + 2 * score * blend, 1, 5)`.
pub fn derive_item_rating(stars: f64, score: f64, blend: f64) -> f64 {
    (stars + 2.0 * score * blend).clamp(RATING_MIN, RATING_MAX)
}

/// A sentiment-scored fragment with the identities needed downstream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredFragment {
    pub review_id: String,
    pub user_id: String,
    pub restaurant_id: String,
    pub item_id: ItemId,
    pub stars: f64,
    pub score: f64,
}

impl ScoredFragment {
    pub fn column(&self) -> ColumnKey {
        ColumnKey::new(self.restaurant_id.clone(), self.item_id)
    }
}

/// Sparse user x column ratings. Users and columns are indexed in sorted order.
#[derive(Debug, Clone, PartialEq)]
pub struct RatingMatrix {
    users: Vec<String>,
    user_index: HashMap<String, usize>,
    columns: Vec<ColumnKey>,
    column_index: HashMap<ColumnKey, usize>,
    rows: Vec<Vec<(usize, f64)>>,
    cols: Vec<Vec<(usize, f64)>>,
    global_mean: f64,
}

impl RatingMatrix {
    pub fn from_triples<I>(triples: I) -> Result<Self, CfError>
    where
        I: IntoIterator<Item = (String, ColumnKey, f64)>,
    {
        let mut entries: BTreeMap<(String, ColumnKey), f64> = BTreeMap::new();
        for (user, column, rating) in triples {
            if !(RATING_MIN..=RATING_MAX).contains(&rating) {
                return Err(CfError::RatingOutOfRange(rating));
            }
            let key = (user, column);
            if entries.contains_key(&key) {
                return Err(CfError::DuplicateEntry {
                    user: key.0,
                    column: key.1,
                });
            }
            entries.insert(key, rating);
        }
        let users: Vec<String> = entries
            .keys()
            .map(|(u, _)| u.clone())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let columns: Vec<ColumnKey> = entries
            .keys()
            .map(|(_, c)| c.clone())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let user_index: HashMap<String, usize> =
            users.iter().enumerate().map(|(i, u)| (u.clone(), i)).collect();
        let column_index: HashMap<ColumnKey, usize> =
            columns.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();
        let mut rows = vec![Vec::new(); users.len()];
        let mut cols = vec![Vec::new(); columns.len()];
        let mut sum = 0.0;
        for ((u, c), r) in &entries {
            let (ui, ci) = (user_index[u], column_index[c]);
            rows[ui].push((ci, *r));
            cols[ci].push((ui, *r));
            sum += r;
        }
        for r in &mut rows {
            r.sort_by_key(|e| e.0);
        }
        for c in &mut cols {
            c.sort_by_key(|e| e.0);
        }
        let global_mean = if entries.is_empty() {
            (RATING_MIN + RATING_MAX) / 2.0
        } else {
            sum / entries.len() as f64
        };
        Ok(RatingMatrix {
            users,
            user_index,
            columns,
            column_index,
            rows,
            cols,
            global_mean,
        })
    }

    /// Averages repeated `(user, column)` observations before building.
    pub fn from_observations<I>(observations: I) -> Result<Self, CfError>
    where
        I: IntoIterator<Item = (String, ColumnKey, f64)>,
    {
        let mut acc: BTreeMap<(String, ColumnKey), (f64, usize)> = BTreeMap::new();
        for (u, c, r) in observations {
            let e = acc.entry((u, c)).or_insert((0.0, 0));
            e.0 += r;
            e.1 += 1;
        }
        Self::from_triples(acc.into_iter().map(|((u, c), (s, n))| (u, c, s / n as f64)))
    }

    pub fn n_users(&self) -> usize {
        self.users.len()
    }

    pub fn n_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn n_entries(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn users(&self) -> &[String] {
        &self.users
    }

    pub fn columns(&self) -> &[ColumnKey] {
        &self.columns
    }

    pub fn user_idx(&self, user: &str) -> Option<usize> {
        self.user_index.get(user).copied()
    }

    pub fn column_idx(&self, column: &ColumnKey) -> Option<usize> {
        self.column_index.get(column).copied()
    }

    pub fn row(&self, user: usize) -> &[(usize, f64)] {
        &self.rows[user]
    }

    pub fn column_entries(&self, column: usize) -> &[(usize, f64)] {
        &self.cols[column]
    }

    pub fn get(&self, user: usize, column: usize) -> Option<f64> {
        let row = &self.rows[user];
        row.binary_search_by_key(&column, |e| e.0).ok().map(|i| row[i].1)
    }

    pub fn user_mean(&self, user: usize) -> Option<f64> {
        mean(&self.rows[user])
    }

    pub fn column_mean(&self, column: usize) -> Option<f64> {
        mean(&self.cols[column])
    }

    pub fn global_mean(&self) -> f64 {
        self.global_mean
    }

    /// Returns a copy with `delta` added to every rating, skipping range checks.
    pub fn shifted(&self, delta: f64) -> RatingMatrix {
        let mut m = self.clone();
        for r in m.rows.iter_mut().chain(m.cols.iter_mut()) {
            r.iter_mut().for_each(|e| e.1 += delta);
        }
        m.global_mean += delta;
        m
    }

    /// `user_id<TAB>restaurant_id:item_id<TAB>rating`, sorted by user then column.
    pub fn export_tsv(&self) -> String {
        let mut out = String::new();
        for (u, row) in self.rows.iter().enumerate() {
            for &(c, r) in row {
                out.push_str(&format!("{}\t{}\t{}\n", self.users[u], self.columns[c], r));
            }
        }
        out
    }
}

fn mean(entries: &[(usize, f64)]) -> Option<f64> {
    if entries.is_empty() {
        None
    } else {
        Some(entries.iter().map(|e| e.1).sum::<f64>() / entries.len() as f64)
    }
}

/// Cosine similarity of two sparse vectors given as index-sorted `(index, value)`
/// pairs. Missing coordinates count as zero; a zero-norm side yields 0.
pub fn cosine_sim(a: &[(usize, f64)], b: &[(usize, f64)]) -> f64 {
    let (mut i, mut j, mut dot) = (0, 0, 0.0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                dot += a[i].1 * b[j].1;
                i += 1;
                j += 1;
            }
        }
    }
    let na: f64 = a.iter().map(|e| e.1 * e.1).sum();
    let nb: f64 = b.iter().map(|e| e.1 * e.1).sum();
    cosine_from_parts(dot, na, nb)
}

fn cosine_from_parts(dot: f64, norm_sq_a: f64, norm_sq_b: f64) -> f64 {
    if norm_sq_a == 0.0 || norm_sq_b == 0.0 {
        return 0.0;
    }
    (dot / (norm_sq_a * norm_sq_b).sqrt()).clamp(-1.0, 1.0)
}

/// Dense symmetric similarity matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    n: usize,
    values: Vec<f64>,
}

impl SimilarityMatrix {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    fn from_vectors(vectors: &[Vec<(usize, f64)>], transposed: &[Vec<(usize, f64)>]) -> Self {
        let n = vectors.len();
        let mut dots = vec![0.0; n * n];
        // accumulate dot products through the shared coordinates
        for shared in transposed {
            for (x, &(i, vi)) in shared.iter().enumerate() {
                for &(j, vj) in &shared[x..] {
                    dots[i * n + j] += vi * vj;
                }
            }
        }
        let norms: Vec<f64> = vectors
            .iter()
            .map(|v| v.iter().map(|e| e.1 * e.1).sum())
            .collect();
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let s = if i == j && norms[i] > 0.0 {
                    1.0
                } else {
                    cosine_from_parts(dots[i * n + j], norms[i], norms[j])
                };
                values[i * n + j] = s;
                values[j * n + i] = s;
            }
        }
        SimilarityMatrix { n, values }
    }

    /// Cosine similarity between user rating rows.
    pub fn users(matrix: &RatingMatrix) -> Self {
        Self::from_vectors(&matrix.rows, &matrix.cols)
    }

    /// Cosine similarity between column rating vectors.
    pub fn columns(matrix: &RatingMatrix) -> Self {
        Self::from_vectors(&matrix.cols, &matrix.rows)
    }
}

/// Which mean is subtracted from neighbour ratings in user-item prediction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Eq1Center {
    /// Mean of the neighbour's own ratings.
    #[default]
    User,
    /// Mean of the ratings given to the target column.
    Item,
}

impl std::str::FromStr for Eq1Center {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "user" => Ok(Eq1Center::User),
            "item" => Ok(Eq1Center::Item),
            o => Err(format!("unknown centring `{o}` (expected user or item)")),
        }
    }
}

/// Neighbourhood size: `None` uses every candidate.
pub type Neighborhood = Option<usize>;

pub const DEFAULT_NEIGHBORHOOD: Neighborhood = Some(20);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub user_id: String,
    pub column: ColumnKey,
    /// Clamped to `[1, 5]`.
    pub rating: f64,
    /// Before clamping.
    pub raw: f64,
    pub method: Method,
}

impl Prediction {
    fn new(user_id: &str, column: &ColumnKey, raw: f64, method: Method) -> Self {
        Prediction {
            user_id: user_id.to_string(),
            column: column.clone(),
            rating: raw.clamp(RATING_MIN, RATING_MAX),
            raw,
            method,
        }
    }
}

/// Keeps the `limit` candidates with the largest `|sim|`, ties by index.
fn top_by_abs(mut cands: Vec<(usize, f64, f64)>, limit: Neighborhood) -> Vec<(usize, f64, f64)> {
    cands.sort_by(|a, b| b.1.abs().total_cmp(&a.1.abs()).then(a.0.cmp(&b.0)));
    if let Some(n) = limit {
        cands.truncate(n);
    }
    cands
}

fn lookup(matrix: &RatingMatrix, user: &str, column: &ColumnKey) -> Result<(usize, usize), CfError> {
    let k = matrix
        .user_idx(user)
        .ok_or_else(|| CfError::UnknownUser(user.to_string()))?;
    let m = matrix
        .column_idx(column)
        .ok_or_else(|| CfError::UnknownColumn(column.clone()))?;
    Ok((k, m))
}

/// Mean-centred user-based prediction over the most similar users who rated the column.
pub fn predict_user_item(
    matrix: &RatingMatrix,
    user_sims: &SimilarityMatrix,
    user: &str,
    column: &ColumnKey,
    neighborhood: Neighborhood,
    center: Eq1Center,
) -> Result<Prediction, CfError> {
    let (k, m) = lookup(matrix, user, column)?;
    let Some(user_mean) = matrix.user_mean(k) else {
        return Ok(Prediction::new(user, column, matrix.global_mean(), Method::UserItem));
    };
    let column_mean = matrix.column_mean(m).unwrap_or(matrix.global_mean());
    let cands: Vec<(usize, f64, f64)> = matrix
        .column_entries(m)
        .iter()
        .filter(|&&(a, _)| a != k)
        .map(|&(a, x)| (a, user_sims.get(k, a), x))
        .collect();
    let (mut num, mut den) = (0.0, 0.0);
    for (a, sim, x) in top_by_abs(cands, neighborhood) {
        let centre = match center {
            Eq1Center::User => matrix.user_mean(a).expect("neighbour rated m"),
            Eq1Center::Item => column_mean,
        };
        num += sim * (x - centre);
        den += sim.abs();
    }
    let raw = if den == 0.0 { user_mean } else { user_mean + num / den };
    Ok(Prediction::new(user, column, raw, Method::UserItem))
}

/// Item-based prediction from the user's own ratings of the most similar columns.
pub fn predict_item_item(
    matrix: &RatingMatrix,
    column_sims: &SimilarityMatrix,
    user: &str,
    column: &ColumnKey,
    neighborhood: Neighborhood,
) -> Result<Prediction, CfError> {
    let (k, m) = lookup(matrix, user, column)?;
    let cands: Vec<(usize, f64, f64)> = matrix
        .row(k)
        .iter()
        .filter(|&&(b, _)| b != m)
        .map(|&(b, x)| (b, column_sims.get(m, b), x))
        .collect();
    let (mut num, mut den) = (0.0, 0.0);
    for (_, sim, x) in top_by_abs(cands, neighborhood) {
        num += sim * x;
        den += sim.abs();
    }
    let raw = if den == 0.0 {
        matrix.user_mean(k).unwrap_or(matrix.global_mean())
    } else {
        num / den
    };
    Ok(Prediction::new(user, column, raw, Method::ItemItem))
}

/// Restaurants ranked by their number of positively scored fragments for `item`
/// (ties by restaurant id). Restaurants with fragments but no positive ones come last.
pub fn baseline_recommend(item: ItemId, fragments: &[ScoredFragment]) -> Vec<(String, usize)> {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for f in fragments.iter().filter(|f| f.item_id == item) {
        *counts.entry(f.restaurant_id.as_str()).or_default() += usize::from(f.score > 0.0);
    }
    let mut ranked: Vec<(String, usize)> = counts.into_iter().map(|(r, c)| (r.to_string(), c)).collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    ranked
}

/// Anything that predicts a rating for a `(user, column)` pair.
pub trait RatingPredictor {
    fn method(&self) -> Method;
    fn predict(&self, user: &str, column: &ColumnKey) -> Result<Prediction, CfError>;
}

/// User-agnostic popularity model: a column's rating is
/// `1 + 4 * positives(column) / max positives over the item's columns`.
#[derive(Debug, Clone, PartialEq)]
pub struct Baseline {
    positives: HashMap<ColumnKey, usize>,
    best_per_item: HashMap<ItemId, usize>,
}

impl Baseline {
    pub fn fit(fragments: &[ScoredFragment]) -> Self {
        let mut positives: HashMap<ColumnKey, usize> = HashMap::new();
        for f in fragments {
            *positives.entry(f.column()).or_default() += usize::from(f.score > 0.0);
        }
        let mut best_per_item: HashMap<ItemId, usize> = HashMap::new();
        for (c, &n) in &positives {
            let b = best_per_item.entry(c.item_id).or_default();
            *b = (*b).max(n);
        }
        Baseline {
            positives,
            best_per_item,
        }
    }

    pub fn rating(&self, column: &ColumnKey) -> f64 {
        let best = self.best_per_item.get(&column.item_id).copied().unwrap_or(0);
        let own = self.positives.get(column).copied().unwrap_or(0);
        if best == 0 {
            RATING_MIN
        } else {
            RATING_MIN + (RATING_MAX - RATING_MIN) * own as f64 / best as f64
        }
    }
}

impl RatingPredictor for Baseline {
    fn method(&self) -> Method {
        Method::Baseline
    }

    fn predict(&self, user: &str, column: &ColumnKey) -> Result<Prediction, CfError> {
        Ok(Prediction::new(user, column, self.rating(column), Method::Baseline))
    }
}

pub struct UserItemCf<'a> {
    pub matrix: &'a RatingMatrix,
    pub sims: SimilarityMatrix,
    pub neighborhood: Neighborhood,
    pub center: Eq1Center,
}

impl<'a> UserItemCf<'a> {
    pub fn new(matrix: &'a RatingMatrix, neighborhood: Neighborhood, center: Eq1Center) -> Self {
        UserItemCf {
            matrix,
            sims: SimilarityMatrix::users(matrix),
            neighborhood,
            center,
        }
    }
}

impl RatingPredictor for UserItemCf<'_> {
    fn method(&self) -> Method {
        Method::UserItem
    }

    fn predict(&self, user: &str, column: &ColumnKey) -> Result<Prediction, CfError> {
        predict_user_item(self.matrix, &self.sims, user, column, self.neighborhood, self.center)
    }
}

pub struct ItemItemCf<'a> {
    pub matrix: &'a RatingMatrix,
    pub sims: SimilarityMatrix,
    pub neighborhood: Neighborhood,
}

impl<'a> ItemItemCf<'a> {
    pub fn new(matrix: &'a RatingMatrix, neighborhood: Neighborhood) -> Self {
        ItemItemCf {
            matrix,
            sims: SimilarityMatrix::columns(matrix),
            neighborhood,
        }
    }
}

impl RatingPredictor for ItemItemCf<'_> {
    fn method(&self) -> Method {
        Method::ItemItem
    }

    fn predict(&self, user: &str, column: &ColumnKey) -> Result<Prediction, CfError> {
        predict_item_item(self.matrix, &self.sims, user, column, self.neighborhood)
    }
}

/// Community co-membership and positive mentions used as the side-dish feature.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SideAffinity {
    co_members: HashMap<ItemId, Vec<ItemId>>,
    positive: HashSet<(String, ItemId)>,
}

impl SideAffinity {
    /// `communities` maps each item to its community id.
    pub fn new(communities: &BTreeMap<ItemId, usize>, fragments: &[ScoredFragment]) -> Self {
        let mut groups: BTreeMap<usize, Vec<ItemId>> = BTreeMap::new();
        for (&item, &c) in communities {
            groups.entry(c).or_default().push(item);
        }
        let mut co_members = HashMap::new();
        for members in groups.values() {
            for &item in members {
                co_members.insert(item, members.iter().copied().filter(|&o| o != item).collect());
            }
        }
        let positive = fragments
            .iter()
            .filter(|f| f.score > 0.0)
            .map(|f| (f.restaurant_id.clone(), f.item_id))
            .collect();
        SideAffinity {
            co_members,
            positive,
        }
    }

    /// Share of `item`'s community co-members praised at `restaurant`; 0 without co-members.
    pub fn side_score(&self, restaurant: &str, item: ItemId) -> f64 {
        match self.co_members.get(&item) {
            Some(co) if !co.is_empty() => {
                let hits = co
                    .iter()
                    .filter(|&&o| self.positive.contains(&(restaurant.to_string(), o)))
                    .count();
                hits as f64 / co.len() as f64
            }
            _ => 0.0,
        }
    }

    pub fn has_positive(&self, restaurant: &str, item: ItemId) -> bool {
        self.positive.contains(&(restaurant.to_string(), item))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recommendation {
    pub restaurant_id: String,
    pub score: f64,
    pub predicted_rating: f64,
    pub side_score: f64,
}

pub const DEFAULT_SIDE_WEIGHT: f64 = 0.2;

/// Ranks the restaurants in `catalog` that serve `item` for `user`:
/// `score = clamp(predicted rating) + side_weight * side_score`, descending,
/// ties by restaurant id.
pub fn recommend_top_k(
    predictor: &dyn RatingPredictor,
    catalog: &BTreeSet<ColumnKey>,
    sides: &SideAffinity,
    user: &str,
    item: ItemId,
    k: usize,
    side_weight: f64,
) -> Result<Vec<Recommendation>, CfError> {
    let columns: Vec<&ColumnKey> = catalog.iter().filter(|c| c.item_id == item).collect();
    if columns.is_empty() {
        return Err(CfError::UnknownItem(item));
    }
    let mut recs = Vec::with_capacity(columns.len());
    for column in columns {
        let predicted = match predictor.predict(user, column) {
            Ok(p) => p.rating,
            Err(CfError::UnknownColumn(_)) => continue,
            Err(e) => return Err(e),
        };
        let side = sides.side_score(&column.restaurant_id, item);
        recs.push(Recommendation {
            restaurant_id: column.restaurant_id.clone(),
            score: predicted + side_weight * side,
            predicted_rating: predicted,
            side_score: side,
        });
    }
    recs.sort_by(|a, b| b.score.total_cmp(&a.score).then(a.restaurant_id.cmp(&b.restaurant_id)));
    recs.truncate(k);
    Ok(recs)
}
