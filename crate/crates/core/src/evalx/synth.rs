//! Seeded synthetic review corpora with planted preferences and gold files.
//!
//! Each user has a favourite dish group and a harshness offset. Each review
//! praises or criticises 1-3 dishes from one group at one restaurant. A dish
//! rating starts at 5 and loses 2 for a non-favourite, 2.5 when the
//! restaurant's version is bad, the user's harshness, and Gaussian noise.
//! `noise` drives the rate of non-favourite reviews, the share of bad
//! `(restaurant, dish)` pairs, the harshness scale and the Gaussian spread,
//! so `noise = 0` gives every rating 5.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::corpus::{
    load_restaurants, load_reviews, write_jsonl, AnnotatedLabel, LexiconSet, Polarity, RestaurantProfile,
    ReviewRecord, Stars, NEG_EMO, POS_EMO,
};
use crate::fragmenter::{ItemEntry, ItemId, ItemLexicon};
use crate::pipeline::GoldLabels;

const DISHES: [(&str, &[&str]); 24] = [
    ("paneer_tikka", &["paneer tikka", "tikka"]),
    ("butter_chicken", &["butter chicken", "murgh makhani"]),
    ("garlic_naan", &["garlic naan", "naan"]),
    ("dal_makhani", &["dal makhani", "dal"]),
    ("masala_dosa", &["masala dosa", "dosa"]),
    ("idli", &["idli", "idlis"]),
    ("vada", &["vada", "medu vada"]),
    ("filter_coffee", &["filter coffee", "coffee"]),
    ("pasta", &["pasta", "penne"]),
    ("garlic_bread", &["garlic bread"]),
    ("pizza", &["pizza", "margherita"]),
    ("tiramisu", &["tiramisu"]),
    ("momos", &["momos", "momo"]),
    ("chowmein", &["chowmein", "noodles"]),
    ("fried_rice", &["fried rice"]),
    ("spring_rolls", &["spring rolls", "spring roll"]),
    ("burger", &["burger", "burgers"]),
    ("fries", &["fries", "french fries"]),
    ("milkshake", &["milkshake", "shake"]),
    ("brownie", &["brownie", "brownies"]),
    ("biryani", &["biryani", "biriyani"]),
    ("kebab", &["kebab", "seekh kebab"]),
    ("raita", &["raita"]),
    ("phirni", &["phirni"]),
];

const GROUP_SIZE: usize = 4;

const POSITIVE: [&str; 8] = ["great", "delicious", "tasty", "amazing", "fresh", "perfect", "lovely", "mast"];
const NEGATIVE: [&str; 8] = ["bland", "cold", "soggy", "stale", "awful", "greasy", "bekaar", "bakwas"];
const INTENSIFIERS: [&str; 3] = ["really", "ekdum", "so"];
const POS_EMOTICONS: [&str; 3] = [":)", ":-)", ":D"];
const NEG_EMOTICONS: [&str; 2] = [":(", ":-("];
const FILLERS: [&str; 4] = [
    "we went there on a weekend",
    "visited with friends",
    "ordered for dinner",
    "it was my second visit",
];

/// The lexicons the generated text is written against.
pub fn synth_lexicons() -> LexiconSet {
    let stop = [
        "the", "was", "were", "a", "an", "is", "it", "we", "on", "at", "this", "that", "i", "of", "to", "with",
        "there", "for", "my", "had", "here",
    ];
    let emo = POS_EMOTICONS
        .iter()
        .map(|e| (e.to_string(), POS_EMO.to_string()))
        .chain(NEG_EMOTICONS.iter().map(|e| (e.to_string(), NEG_EMO.to_string())));
    let slang = [
        ("mast", "great"),
        ("ekdum", "very"),
        ("bekaar", "terrible"),
        ("bakwas", "awful"),
        ("accha", "good"),
        ("gr8", "great"),
    ];
    LexiconSet::new(
        stop.iter().map(|s| s.to_string()),
        emo,
        slang.iter().map(|(k, v)| (k.to_string(), vec![v.to_string()])),
    )
    .expect("built-in lexicon is valid")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthConfig {
    pub seed: u64,
    pub n_users: usize,
    pub n_restaurants: usize,
    pub n_items: usize,
    pub noise: f64,
    pub reviews_per_user: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            seed: 42,
            n_users: 50,
            n_restaurants: 10,
            n_items: 12,
            noise: 0.15,
            reviews_per_user: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoldFragment {
    pub review_id: String,
    pub item_id: ItemId,
    pub label: Polarity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoldRating {
    pub review_id: String,
    pub user_id: String,
    pub restaurant_id: String,
    pub item_id: ItemId,
    pub rating: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthCorpus {
    pub config: SynthConfig,
    pub reviews: Vec<ReviewRecord>,
    pub restaurants: Vec<RestaurantProfile>,
    pub lexicons: LexiconSet,
    pub items: ItemLexicon,
    pub gold_fragments: Vec<GoldFragment>,
    pub gold_ratings: Vec<GoldRating>,
}

fn pick<'a, R: Rng>(rng: &mut R, xs: &[&'a str]) -> &'a str {
    xs[rng.gen_range(0..xs.len())]
}

pub fn synth_corpus(config: &SynthConfig) -> Result<SynthCorpus, EvalError> {
    let c = config;
    if c.n_users == 0 || c.n_restaurants == 0 || c.n_items == 0 || c.reviews_per_user == 0 {
        return Err(EvalError::InvalidConfig("sizes must be positive".into()));
    }
    if c.n_items > DISHES.len() {
        return Err(EvalError::InvalidConfig(format!("at most {} items are available", DISHES.len())));
    }
    if !(0.0..=1.0).contains(&c.noise) {
        return Err(EvalError::InvalidConfig(format!("noise {} outside [0, 1]", c.noise)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    let gauss = Normal::new(0.0, c.noise).expect("noise is finite and non-negative");

    let entries: Vec<ItemEntry> = DISHES[..c.n_items]
        .iter()
        .enumerate()
        .map(|(i, (name, aliases))| ItemEntry {
            item_id: ItemId(i as u32 + 1),
            canonical_name: name.to_string(),
            aliases: aliases.iter().map(|a| a.split_whitespace().map(String::from).collect()).collect(),
        })
        .collect();
    let items = ItemLexicon::new(entries.clone()).expect("built-in dishes are distinct");
    let groups: Vec<Vec<usize>> = (0..c.n_items).collect::<Vec<_>>().chunks(GROUP_SIZE).map(<[usize]>::to_vec).collect();
    let group_of = |i: usize| i / GROUP_SIZE;

    let users: Vec<String> = (0..c.n_users).map(|u| format!("u{u:03}")).collect();
    let restaurants: Vec<String> = (0..c.n_restaurants).map(|r| format!("r{r:02}")).collect();
    let favourite: Vec<usize> = (0..c.n_users).map(|_| rng.gen_range(0..groups.len())).collect();
    let harshness: Vec<f64> = (0..c.n_users).map(|_| 4.0 * c.noise * rng.gen::<f64>()).collect();
    let bad: Vec<Vec<bool>> = (0..c.n_restaurants)
        .map(|_| (0..c.n_items).map(|_| rng.gen_bool(c.noise)).collect())
        .collect();

    let mut reviews = Vec::new();
    let mut gold_fragments = Vec::new();
    let mut gold_ratings = Vec::new();
    let mut stars_by_restaurant: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for (u, user) in users.iter().enumerate() {
        for _ in 0..c.reviews_per_user {
            let r = rng.gen_range(0..c.n_restaurants);
            let favs = &groups[favourite[u]];
            let others: Vec<usize> = (0..c.n_items).filter(|i| group_of(*i) != favourite[u]).collect();
            let first = if !others.is_empty() && rng.gen_bool(c.noise) {
                *others.choose(&mut rng).expect("non-empty")
            } else {
                *favs.choose(&mut rng).expect("groups are non-empty")
            };
            let mut dishes = vec![first];
            let mates: Vec<usize> = groups[group_of(first)].iter().copied().filter(|&i| i != first).collect();
            let extra = rng.gen_range(0..=2usize).min(mates.len());
            dishes.extend(mates.choose_multiple(&mut rng, extra).copied());

            let review_id = format!("rev{:05}", reviews.len());
            let mut clauses = Vec::new();
            if rng.gen_bool(0.3) {
                clauses.push(pick(&mut rng, &FILLERS).to_string());
            }
            let mut ratings = Vec::new();
            for &i in &dishes {
                let mut rating = 5.0 - harshness[u];
                if group_of(i) != favourite[u] {
                    rating -= 2.0;
                }
                if bad[r][i] {
                    rating -= 2.5;
                }
                if c.noise > 0.0 {
                    rating += gauss.sample(&mut rng);
                }
                let rating = Stars::nearest(rating).value();
                let label = if rating >= 3.0 { Polarity::Positive } else { Polarity::Negative };
                let alias = DISHES[i].1[rng.gen_range(0..DISHES[i].1.len())];
                let (adjs, emos) = match label {
                    Polarity::Positive => (&POSITIVE, &POS_EMOTICONS[..]),
                    Polarity::Negative => (&NEGATIVE, &NEG_EMOTICONS[..]),
                };
                let mut clause = format!("the {alias} was");
                if rng.gen_bool(0.4) {
                    clause.push(' ');
                    clause.push_str(pick(&mut rng, &INTENSIFIERS));
                }
                clause.push(' ');
                clause.push_str(pick(&mut rng, adjs));
                if rng.gen_bool(0.5) {
                    clause.push(' ');
                    clause.push_str(pick(&mut rng, emos));
                }
                clauses.push(clause);
                ratings.push(rating);
                gold_fragments.push(GoldFragment {
                    review_id: review_id.clone(),
                    item_id: ItemId(i as u32 + 1),
                    label,
                });
                gold_ratings.push(GoldRating {
                    review_id: review_id.clone(),
                    user_id: user.clone(),
                    restaurant_id: restaurants[r].clone(),
                    item_id: ItemId(i as u32 + 1),
                    rating,
                });
            }
            let mut text = String::new();
            for (k, clause) in clauses.iter().enumerate() {
                if k > 0 {
                    text.push_str(if rng.gen_bool(0.5) { ". " } else { " but " });
                }
                text.push_str(clause);
            }
            text.push('.');
            let mean = ratings.iter().sum::<f64>() / ratings.len() as f64;
            let stars = Stars::nearest(mean);
            stars_by_restaurant.entry(r).or_default().push(stars.value());
            reviews.push(ReviewRecord {
                review_id,
                restaurant_id: restaurants[r].clone(),
                user_id: user.clone(),
                stars,
                text,
                annotated_label: if mean >= 3.0 {
                    AnnotatedLabel::Positive
                } else {
                    AnnotatedLabel::Negative
                },
            });
        }
    }
    let restaurants = restaurants
        .iter()
        .enumerate()
        .map(|(r, id)| {
            let s = stars_by_restaurant.get(&r);
            let rating = s.map_or(3.0, |s| s.iter().sum::<f64>() / s.len() as f64);
            RestaurantProfile {
                restaurant_id: id.clone(),
                name: format!("Restaurant {r}"),
                cuisines: Vec::new(),
                zomato_rating: (rating * 10.0).round() / 10.0,
            }
        })
        .collect();
    Ok(SynthCorpus {
        config: *config,
        reviews,
        restaurants,
        lexicons: synth_lexicons(),
        items,
        gold_fragments,
        gold_ratings,
    })
}

fn jsonl<T: Serialize>(records: &[T]) -> Vec<u8> {
    let mut out = Vec::new();
    write_jsonl(&mut out, records).expect("writing to memory");
    out
}

pub(crate) fn read_jsonl<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, EvalError> {
    let text = fs::read_to_string(path).map_err(|e| EvalError::Io(format!("{}: {e}", path.display())))?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(n, l)| {
            serde_json::from_str(l).map_err(|e| EvalError::Io(format!("{}:{}: {e}", path.display(), n + 1)))
        })
        .collect()
}

impl SynthCorpus {
    /// File name to contents; written by [`SynthCorpus::write_dir`].
    pub fn files(&self) -> BTreeMap<String, Vec<u8>> {
        let mut files = BTreeMap::new();
        files.insert("reviews.jsonl".into(), jsonl(&self.reviews));
        files.insert("restaurants.jsonl".into(), jsonl(&self.restaurants));
        files.insert("gold_fragments.jsonl".into(), jsonl(&self.gold_fragments));
        files.insert("gold_ratings.jsonl".into(), jsonl(&self.gold_ratings));
        let mut manifest = serde_json::to_string_pretty(&self.config).expect("plain struct");
        manifest.push('\n');
        files.insert("synth.json".into(), manifest.into_bytes());
        files.insert("lexicons/items.tsv".into(), self.items.to_tsv().into_bytes());
        files
    }

    pub fn write_dir(&self, dir: impl AsRef<Path>) -> Result<(), EvalError> {
        let dir = dir.as_ref();
        let io = |e: std::io::Error| EvalError::Io(format!("{}: {e}", dir.display()));
        fs::create_dir_all(dir.join("lexicons")).map_err(io)?;
        self.lexicons.write_dir(dir.join("lexicons")).map_err(io)?;
        for (name, bytes) in self.files() {
            fs::write(dir.join(name), bytes).map_err(io)?;
        }
        Ok(())
    }

    pub fn load_dir(dir: impl AsRef<Path>) -> Result<Self, EvalError> {
        let dir = dir.as_ref();
        let err = |e: &dyn std::fmt::Display| EvalError::Io(e.to_string());
        let config: SynthConfig = serde_json::from_str(
            &fs::read_to_string(dir.join("synth.json")).map_err(|e| err(&e))?,
        )
        .map_err(|e| err(&e))?;
        Ok(SynthCorpus {
            config,
            reviews: load_reviews(dir.join("reviews.jsonl")).map_err(|e| err(&e))?,
            restaurants: load_restaurants(dir.join("restaurants.jsonl")).map_err(|e| err(&e))?,
            lexicons: LexiconSet::load_dir(dir.join("lexicons")).map_err(|e| err(&e))?,
            items: ItemLexicon::load(dir.join("lexicons/items.tsv")).map_err(|e| err(&e))?,
            gold_fragments: read_jsonl(&dir.join("gold_fragments.jsonl"))?,
            gold_ratings: read_jsonl(&dir.join("gold_ratings.jsonl"))?,
        })
    }

    pub fn gold_labels(&self) -> GoldLabels {
        self.gold_fragments
            .iter()
            .map(|g| ((g.review_id.clone(), g.item_id), g.label))
            .collect()
    }
}

/// Balanced, adjective-separable fragments for classifier experiments.
/// Tokens are already in normalized form.
pub fn synth_sentiment_corpus(seed: u64, n: usize) -> Vec<(Vec<String>, Polarity)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lex = synth_lexicons();
    let norm = |w: &str| lex.slang_map.get(w).map_or_else(|| w.to_string(), |v| v.join(" "));
    (0..n)
        .map(|k| {
            let label = if k % 2 == 0 { Polarity::Positive } else { Polarity::Negative };
            let (_, aliases) = DISHES[rng.gen_range(0..DISHES.len())];
            let mut tokens: Vec<String> = aliases[0].split_whitespace().map(String::from).collect();
            if rng.gen_bool(0.4) {
                tokens.push(norm(pick(&mut rng, &INTENSIFIERS)));
            }
            let adj = match label {
                Polarity::Positive => pick(&mut rng, &POSITIVE),
                Polarity::Negative => pick(&mut rng, &NEGATIVE),
            };
            tokens.push(norm(adj));
            if rng.gen_bool(0.3) {
                tokens.push(match label {
                    Polarity::Positive => POS_EMO.to_string(),
                    Polarity::Negative => NEG_EMO.to_string(),
                });
            }
            (tokens, label)
        })
        .collect()
}
