//! Review ingestion, lexicon loading, text normalization and vocabularies.
//!
//! Reviews and restaurant profiles are newline-delimited JSON, one object per
//! line. Lexicons are small tab-separated files living in one directory:
//!
//! ```text
//! lexicons/
//! ├── stopwords.txt    # one token per line
//! ├── emoticons.tsv    # emoticon<TAB>POS_EMO|NEG_EMO
//! ├── slang.tsv        # slang<TAB>replacement tokens (space separated)
//! └── items.tsv        # item_id<TAB>canonical_name<TAB>alias1|alias2|...
//! ```
//!
//! Lines starting with `#` are comments in every lexicon file.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::fs;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

/// Sentinel emitted for emoticons of the positive class.
pub const POS_EMO: &str = "POS_EMO";
/// Sentinel emitted for emoticons of the negative class.
pub const NEG_EMO: &str = "NEG_EMO";
/// Clause marker produced for `.`, `!` and `?`.
pub const SENTENCE_BREAK: &str = "<eos>";
/// Clause marker produced for `;` and the coordinating words.
pub const CLAUSE_BREAK: &str = "<cl>";

/// Single-token coordinators that open a new clause.
pub const COORDINATORS: [&str; 4] = ["but", "however", "while", "whereas"];

pub fn is_sentinel(token: &str) -> bool {
    matches!(token, POS_EMO | NEG_EMO | SENTENCE_BREAK | CLAUSE_BREAK)
}

pub fn is_marker(token: &str) -> bool {
    token == SENTENCE_BREAK || token == CLAUSE_BREAK
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("line {line}: malformed record: {reason}")]
    MalformedRecord { line: usize, reason: String },
    #[error("line {line}: duplicate id `{id}`")]
    DuplicateId { line: usize, id: String },
    #[error("{file}:{line}: {reason}")]
    MalformedLexicon {
        file: String,
        line: usize,
        reason: String,
    },
    #[error("slang entry `{0}` rewrites to a sequence containing itself")]
    SlangCycle(String),
    #[error("no token occurs at least {min_count} times")]
    EmptyVocabulary { min_count: usize },
    #[error("min_count must be at least 1")]
    InvalidMinCount,
}

impl CorpusError {
    pub(crate) fn io(path: &Path, source: io::Error) -> Self {
        CorpusError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// A review star rating on Zomato's 1.0..=5.0 scale in half-star steps.
///
/// Stored as a count of half stars so equality and hashing are exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Stars(u8);

impl Stars {
    pub const MIN: Stars = Stars(2);
    pub const MAX: Stars = Stars(10);

    pub fn new(value: f64) -> Result<Self, String> {
        if !value.is_finite() {
            return Err(format!("stars must be finite, got {value}"));
        }
        let halves = value * 2.0;
        if (halves - halves.round()).abs() > 1e-9 {
            return Err(format!("stars must be a multiple of 0.5, got {value}"));
        }
        let halves = halves.round();
        if !(2.0..=10.0).contains(&halves) {
            return Err(format!("stars must lie in [1.0, 5.0], got {value}"));
        }
        Ok(Stars(halves as u8))
    }

    /// Rounds an arbitrary value onto the half-star grid, clamping to the scale.
    pub fn nearest(value: f64) -> Self {
        let halves = (value * 2.0).round().clamp(2.0, 10.0);
        Stars(halves as u8)
    }

    pub fn value(self) -> f64 {
        f64::from(self.0) / 2.0
    }
}

impl TryFrom<f64> for Stars {
    type Error = String;
    fn try_from(value: f64) -> Result<Self, Self::Error> {
        Stars::new(value)
    }
}

impl From<Stars> for f64 {
    fn from(s: Stars) -> f64 {
        s.value()
    }
}

impl fmt::Display for Stars {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.1}", self.value())
    }
}

/// Binary sentiment class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    pub fn sign(self) -> f64 {
        match self {
            Polarity::Positive => 1.0,
            Polarity::Negative => -1.0,
        }
    }

    pub fn from_score(score: f64) -> Self {
        if score > 0.0 {
            Polarity::Positive
        } else {
            Polarity::Negative
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Polarity::Positive => "positive",
            Polarity::Negative => "negative",
        }
    }
}

impl std::str::FromStr for Polarity {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "positive" | "pos" => Ok(Polarity::Positive),
            "negative" | "neg" => Ok(Polarity::Negative),
            other => Err(format!("unknown polarity `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnnotatedLabel {
    Positive,
    Negative,
    #[default]
    Unlabeled,
}

impl AnnotatedLabel {
    pub fn polarity(self) -> Option<Polarity> {
        match self {
            AnnotatedLabel::Positive => Some(Polarity::Positive),
            AnnotatedLabel::Negative => Some(Polarity::Negative),
            AnnotatedLabel::Unlabeled => None,
        }
    }
}

impl From<Polarity> for AnnotatedLabel {
    fn from(p: Polarity) -> Self {
        match p {
            Polarity::Positive => AnnotatedLabel::Positive,
            Polarity::Negative => AnnotatedLabel::Negative,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReviewRecord {
    pub review_id: String,
    pub restaurant_id: String,
    pub user_id: String,
    pub stars: Stars,
    pub text: String,
    #[serde(default)]
    pub annotated_label: AnnotatedLabel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RestaurantProfile {
    pub restaurant_id: String,
    pub name: String,
    #[serde(default)]
    pub cuisines: Vec<String>,
    pub zomato_rating: f64,
}

/// Reads newline-delimited records, applying `check` to each parsed value.
/// Blank lines are skipped; line numbers are 1-based.
fn read_jsonl<T, F>(path: &Path, mut check: F) -> Result<Vec<T>, CorpusError>
where
    T: for<'de> Deserialize<'de>,
    F: FnMut(&T, usize) -> Result<(), CorpusError>,
{
    let file = fs::File::open(path).map_err(|e| CorpusError::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| CorpusError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: T = serde_json::from_str(&line).map_err(|e| CorpusError::MalformedRecord {
            line: line_no,
            reason: e.to_string(),
        })?;
        check(&record, line_no)?;
        out.push(record);
    }
    Ok(out)
}

pub fn load_reviews(path: impl AsRef<Path>) -> Result<Vec<ReviewRecord>, CorpusError> {
    let mut seen = HashSet::new();
    read_jsonl(path.as_ref(), |r: &ReviewRecord, line| {
        if r.text.trim().is_empty() {
            return Err(CorpusError::MalformedRecord {
                line,
                reason: "text is empty".into(),
            });
        }
        if !seen.insert(r.review_id.clone()) {
            return Err(CorpusError::DuplicateId {
                line,
                id: r.review_id.clone(),
            });
        }
        Ok(())
    })
}

pub fn load_restaurants(path: impl AsRef<Path>) -> Result<Vec<RestaurantProfile>, CorpusError> {
    let mut seen = HashSet::new();
    read_jsonl(path.as_ref(), |r: &RestaurantProfile, line| {
        if !(1.0..=5.0).contains(&r.zomato_rating) {
            return Err(CorpusError::MalformedRecord {
                line,
                reason: format!("zomato_rating {} outside [1.0, 5.0]", r.zomato_rating),
            });
        }
        if !seen.insert(r.restaurant_id.clone()) {
            return Err(CorpusError::DuplicateId {
                line,
                id: r.restaurant_id.clone(),
            });
        }
        Ok(())
    })
}

pub fn write_jsonl<T: Serialize, W: Write>(mut out: W, records: &[T]) -> io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn write_reviews(path: impl AsRef<Path>, reviews: &[ReviewRecord]) -> Result<(), CorpusError> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| CorpusError::io(path, e))?;
    let mut w = io::BufWriter::new(file);
    write_jsonl(&mut w, reviews).map_err(|e| CorpusError::io(path, e))?;
    w.flush().map_err(|e| CorpusError::io(path, e))
}

/// Iterates the non-comment, non-blank lines of a lexicon file with 1-based numbers.
pub(crate) fn lexicon_lines(path: &Path) -> Result<Vec<(usize, String)>, CorpusError> {
    let text = fs::read_to_string(path).map_err(|e| CorpusError::io(path, e))?;
    Ok(text
        .lines()
        .enumerate()
        .filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        })
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r').to_string()))
        .collect())
}

/// Stopwords, emoticon classes and slang rewrites used by [`normalize`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LexiconSet {
    pub stopwords: BTreeSet<String>,
    pub emoticon_map: BTreeMap<String, String>,
    pub slang_map: BTreeMap<String, Vec<String>>,
}

impl LexiconSet {
    pub fn new(
        stopwords: impl IntoIterator<Item = String>,
        emoticons: impl IntoIterator<Item = (String, String)>,
        slang: impl IntoIterator<Item = (String, Vec<String>)>,
    ) -> Result<Self, CorpusError> {
        let lex = LexiconSet {
            stopwords: stopwords.into_iter().map(|s| s.to_lowercase()).collect(),
            emoticon_map: emoticons.into_iter().collect(),
            slang_map: slang
                .into_iter()
                .map(|(k, v)| (k.to_lowercase(), v))
                .collect(),
        };
        lex.validate()?;
        Ok(lex)
    }

    pub fn validate(&self) -> Result<(), CorpusError> {
        for (emo, class) in &self.emoticon_map {
            if emo.is_empty() || (class != POS_EMO && class != NEG_EMO) {
                return Err(CorpusError::MalformedLexicon {
                    file: "emoticons".into(),
                    line: 0,
                    reason: format!("`{emo}` maps to `{class}`, expected {POS_EMO} or {NEG_EMO}"),
                });
            }
        }
        for (key, replacement) in &self.slang_map {
            if replacement.iter().any(|t| t == key) {
                return Err(CorpusError::SlangCycle(key.clone()));
            }
        }
        Ok(())
    }

    /// Loads `stopwords.txt`, `emoticons.tsv` and `slang.tsv` from `dir`.
    /// Missing files are treated as empty.
    pub fn load_dir(dir: impl AsRef<Path>) -> Result<Self, CorpusError> {
        let dir = dir.as_ref();
        if !dir.is_dir() {
            return Err(CorpusError::io(
                dir,
                io::Error::new(io::ErrorKind::NotFound, "lexicon directory not found"),
            ));
        }
        let mut lex = LexiconSet::default();

        let stop = dir.join("stopwords.txt");
        if stop.exists() {
            for (_, line) in lexicon_lines(&stop)? {
                lex.stopwords.insert(line.trim().to_lowercase());
            }
        }

        let emo = dir.join("emoticons.tsv");
        if emo.exists() {
            for (n, line) in lexicon_lines(&emo)? {
                let (key, class) = split_pair(&line).ok_or_else(|| CorpusError::MalformedLexicon {
                    file: "emoticons.tsv".into(),
                    line: n,
                    reason: "expected emoticon<TAB>class".into(),
                })?;
                if class != POS_EMO && class != NEG_EMO {
                    return Err(CorpusError::MalformedLexicon {
                        file: "emoticons.tsv".into(),
                        line: n,
                        reason: format!("unknown class `{class}`"),
                    });
                }
                lex.emoticon_map.insert(key.to_string(), class.to_string());
            }
        }

        let slang = dir.join("slang.tsv");
        if slang.exists() {
            for (n, line) in lexicon_lines(&slang)? {
                let (key, repl) = split_pair(&line).ok_or_else(|| CorpusError::MalformedLexicon {
                    file: "slang.tsv".into(),
                    line: n,
                    reason: "expected slang<TAB>replacement".into(),
                })?;
                let tokens: Vec<String> = repl.split_whitespace().map(str::to_lowercase).collect();
                lex.slang_map.insert(key.trim().to_lowercase(), tokens);
            }
        }

        lex.validate()?;
        Ok(lex)
    }

    pub fn write_dir(&self, dir: impl AsRef<Path>) -> io::Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;
        let mut stop = String::from("# one stopword per line\n");
        for w in &self.stopwords {
            stop.push_str(w);
            stop.push('\n');
        }
        fs::write(dir.join("stopwords.txt"), stop)?;

        let mut emo = String::from("# emoticon<TAB>class\n");
        for (k, v) in &self.emoticon_map {
            emo.push_str(&format!("{k}\t{v}\n"));
        }
        fs::write(dir.join("emoticons.tsv"), emo)?;

        let mut slang = String::from("# slang<TAB>replacement\n");
        for (k, v) in &self.slang_map {
            slang.push_str(&format!("{k}\t{}\n", v.join(" ")));
        }
        fs::write(dir.join("slang.tsv"), slang)
    }
}

fn split_pair(line: &str) -> Option<(&str, &str)> {
    let (a, b) = line.split_once('\t')?;
    let b = b.trim();
    if a.is_empty() || b.is_empty() {
        None
    } else {
        Some((a, b))
    }
}

enum Segment {
    Text(String),
    Sentinel(&'static str),
}

fn emoticon_class(class: &str) -> &'static str {
    if class == NEG_EMO {
        NEG_EMO
    } else {
        POS_EMO
    }
}

fn static_sentinel(token: &str) -> Option<&'static str> {
    match token {
        POS_EMO => Some(POS_EMO),
        NEG_EMO => Some(NEG_EMO),
        SENTENCE_BREAK => Some(SENTENCE_BREAK),
        CLAUSE_BREAK => Some(CLAUSE_BREAK),
        _ => None,
    }
}

/// Normalizes raw review text into tokens.
///
/// Steps, in order:
/// 1. emoticons are replaced by `POS_EMO`/`NEG_EMO` on the raw string, longest match first;
/// 2. the remaining text is lowercased;
/// 3. `.`, `!`, `?` become [`SENTENCE_BREAK`]; `;` and the coordinators
///    (`but`, `however`, `while`, `whereas`, `and then`) become [`CLAUSE_BREAK`];
///    other punctuation separates tokens and apostrophes are dropped;
/// 4. slang tokens are expanded once, left to right;
/// 5. stopwords are removed.
///
/// Sentinels and markers survive every step. Runs of markers collapse to one
/// (a sentence break wins) and markers at either end are dropped.
pub fn normalize(text: &str, lex: &LexiconSet) -> Vec<String> {
    // 1. emoticons
    let mut emoticons: Vec<(&str, &str)> = lex
        .emoticon_map
        .iter()
        .map(|(k, v)| (k.as_str(), v.as_str()))
        .collect();
    emoticons.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then(a.0.cmp(b.0)));

    let mut segments = Vec::new();
    let mut buf = String::new();
    let mut rest = text;
    'scan: while let Some(c) = rest.chars().next() {
        for (emo, class) in &emoticons {
            if rest.starts_with(emo) {
                segments.push(Segment::Text(std::mem::take(&mut buf)));
                segments.push(Segment::Sentinel(emoticon_class(class)));
                rest = &rest[emo.len()..];
                continue 'scan;
            }
        }
        buf.push(c);
        rest = &rest[c.len_utf8()..];
    }
    segments.push(Segment::Text(buf));

    // 2 + 3. lowercase and punctuation handling
    let mut tokens: Vec<String> = Vec::new();
    for seg in segments {
        match seg {
            Segment::Sentinel(s) => tokens.push(s.to_string()),
            Segment::Text(t) => {
                for raw in t.split_whitespace() {
                    if let Some(s) = static_sentinel(raw) {
                        tokens.push(s.to_string());
                        continue;
                    }
                    tokenize_word(&raw.to_lowercase(), &mut tokens);
                }
            }
        }
    }
    let tokens = mark_coordinators(tokens);

    // 4. slang
    let mut expanded = Vec::with_capacity(tokens.len());
    for tok in tokens {
        match lex.slang_map.get(&tok) {
            Some(repl) if !is_sentinel(&tok) => expanded.extend(repl.iter().cloned()),
            _ => expanded.push(tok),
        }
    }

    // 5. stopwords
    let kept = expanded
        .into_iter()
        .filter(|t| is_sentinel(t) || !lex.stopwords.contains(t));

    tidy_markers(kept)
}

fn tokenize_word(word: &str, out: &mut Vec<String>) {
    let mut cur = String::new();
    let flush = |cur: &mut String, out: &mut Vec<String>| {
        let t = cur.trim_matches('-');
        if !t.is_empty() {
            out.push(t.to_string());
        }
        cur.clear();
    };
    for c in word.chars() {
        match c {
            c if c.is_alphanumeric() || c == '_' || c == '-' => cur.push(c),
            '\'' | '\u{2019}' => {}
            '.' | '!' | '?' => {
                flush(&mut cur, out);
                out.push(SENTENCE_BREAK.to_string());
            }
            ';' => {
                flush(&mut cur, out);
                out.push(CLAUSE_BREAK.to_string());
            }
            _ => flush(&mut cur, out),
        }
    }
    flush(&mut cur, out);
}

fn mark_coordinators(tokens: Vec<String>) -> Vec<String> {
    let mut out = Vec::with_capacity(tokens.len());
    let mut i = 0;
    while i < tokens.len() {
        let t = tokens[i].as_str();
        if COORDINATORS.contains(&t) {
            out.push(CLAUSE_BREAK.to_string());
        } else if t == "and" && tokens.get(i + 1).map(String::as_str) == Some("then") {
            out.push(CLAUSE_BREAK.to_string());
            i += 1;
        } else {
            out.push(tokens[i].clone());
        }
        i += 1;
    }
    out
}

fn tidy_markers(tokens: impl Iterator<Item = String>) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    let mut pending: Option<&'static str> = None;
    for t in tokens {
        if is_marker(&t) {
            if t == SENTENCE_BREAK || pending.is_none() {
                pending = Some(if t == SENTENCE_BREAK {
                    SENTENCE_BREAK
                } else {
                    CLAUSE_BREAK
                });
            }
            continue;
        }
        if let Some(m) = pending.take() {
            if !out.is_empty() {
                out.push(m.to_string());
            }
        }
        out.push(t);
    }
    out
}

/// Token to contiguous index map, ordered by descending corpus frequency.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    tokens: Vec<String>,
    index: HashMap<String, usize>,
    min_count: usize,
}

#[derive(Serialize, Deserialize)]
struct VocabularyDoc {
    min_count: usize,
    tokens: Vec<String>,
}

impl Serialize for Vocabulary {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        VocabularyDoc {
            min_count: self.min_count,
            tokens: self.tokens.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Vocabulary {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let doc = VocabularyDoc::deserialize(d)?;
        Vocabulary::from_tokens(doc.tokens, doc.min_count).map_err(serde::de::Error::custom)
    }
}

impl Vocabulary {
    /// Rebuilds a vocabulary from an ordered token list.
    pub fn from_tokens(tokens: Vec<String>, min_count: usize) -> Result<Self, String> {
        let mut index = HashMap::with_capacity(tokens.len());
        for (i, t) in tokens.iter().enumerate() {
            if index.insert(t.clone(), i).is_some() {
                return Err(format!("duplicate vocabulary token `{t}`"));
            }
        }
        Ok(Vocabulary {
            tokens,
            index,
            min_count,
        })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn min_count(&self) -> usize {
        self.min_count
    }

    pub fn get(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    pub fn token(&self, index: usize) -> Option<&str> {
        self.tokens.get(index).map(String::as_str)
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    /// Maps tokens to indices, dropping out-of-vocabulary tokens.
    pub fn encode<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<usize> {
        tokens.iter().filter_map(|t| self.get(t.as_ref())).collect()
    }

    /// Hex SHA-256 over the ordered token list; identifies the vocabulary in model documents.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        for t in &self.tokens {
            h.update(t.as_bytes());
            h.update([0u8]);
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

pub fn build_vocabulary<S: AsRef<str>>(
    corpus: &[Vec<S>],
    min_count: usize,
) -> Result<Vocabulary, CorpusError> {
    if min_count == 0 {
        return Err(CorpusError::InvalidMinCount);
    }
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for doc in corpus {
        for t in doc {
            *counts.entry(t.as_ref()).or_default() += 1;
        }
    }
    let mut kept: Vec<(&str, usize)> = counts.into_iter().filter(|&(_, c)| c >= min_count).collect();
    if kept.is_empty() {
        return Err(CorpusError::EmptyVocabulary { min_count });
    }
    kept.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
    let tokens = kept.into_iter().map(|(t, _)| t.to_string()).collect();
    Ok(Vocabulary::from_tokens(tokens, min_count).expect("counted tokens are unique"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lex(stop: &[&str], slang: &[(&str, &[&str])]) -> LexiconSet {
        LexiconSet::new(
            stop.iter().map(|s| s.to_string()),
            [(":)".to_string(), POS_EMO.to_string()), (":(".to_string(), NEG_EMO.to_string())],
            slang
                .iter()
                .map(|(k, v)| (k.to_string(), v.iter().map(|s| s.to_string()).collect())),
        )
        .unwrap()
    }

    fn toks(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn normalize_example_with_emoticon() {
        let l = lex(&["the", "was"], &[]);
        assert_eq!(normalize("The pasta was great :)", &l), toks(&["pasta", "great", POS_EMO]));
    }

    #[test]
    fn normalize_empty() {
        assert!(normalize("", &lex(&[], &[])).is_empty());
    }

    #[test]
    fn normalize_slang() {
        let l = lex(&[], &[("gr8", &["great"]), ("chai", &["tea"])]);
        assert_eq!(normalize("gr8 chai", &l), toks(&["great", "tea"]));
    }

    #[test]
    fn slang_expands_once_to_multiple_tokens() {
        let l = lex(&[], &[("bahut", &["very"]), ("mast", &["very", "good"])]);
        assert_eq!(normalize("bahut mast", &l), toks(&["very", "very", "good"]));
    }

    #[test]
    fn longest_emoticon_wins() {
        let l = LexiconSet::new(
            Vec::<String>::new(),
            [
                (":)".to_string(), POS_EMO.to_string()),
                (":))".to_string(), NEG_EMO.to_string()),
            ],
            Vec::new(),
        )
        .unwrap();
        assert_eq!(normalize("ok :))", &l), toks(&["ok", NEG_EMO]));
    }

    #[test]
    fn clause_markers_survive_stopwords() {
        let l = lex(&["but", "was", "and", "then"], &[]);
        assert_eq!(
            normalize("Pasta was great but pizza was soggy. Fries, and then coffee!", &l),
            toks(&["pasta", "great", CLAUSE_BREAK, "pizza", "soggy", SENTENCE_BREAK, "fries", CLAUSE_BREAK, "coffee"])
        );
    }

    #[test]
    fn marker_runs_collapse() {
        let l = lex(&["it", "was"], &[]);
        assert_eq!(
            normalize("Good... It was. ; bad", &l),
            toks(&["good", SENTENCE_BREAK, "bad"])
        );
    }

    #[test]
    fn apostrophes_and_hyphens() {
        let l = lex(&[], &[]);
        assert_eq!(normalize("Didn't like the stir-fry -", &l), toks(&["didnt", "like", "the", "stir-fry"]));
    }

    #[test]
    fn slang_cycle_rejected() {
        let err = LexiconSet::new(Vec::<String>::new(), Vec::new(), [("lol".to_string(), toks(&["lol", "x"]))]);
        assert!(matches!(err, Err(CorpusError::SlangCycle(_))));
    }

    #[test]
    fn vocabulary_examples() {
        let v = build_vocabulary(&[toks(&["a", "b", "a"])], 2).unwrap();
        assert_eq!(v.tokens(), &["a".to_string()]);
        let v = build_vocabulary(&[toks(&["a"]), toks(&["b"])], 1).unwrap();
        assert_eq!(v.get("a"), Some(0));
        assert_eq!(v.get("b"), Some(1));
        let corpus = vec![toks(&["x", "y"]), toks(&["x"])];
        assert!(matches!(
            build_vocabulary(&corpus, corpus.len() + 1),
            Err(CorpusError::EmptyVocabulary { .. })
        ));
        assert!(matches!(build_vocabulary(&corpus, 0), Err(CorpusError::InvalidMinCount)));
    }

    #[test]
    fn stars_grid() {
        assert_eq!(Stars::new(3.5).unwrap().value(), 3.5);
        assert!(Stars::new(7.0).is_err());
        assert!(Stars::new(0.5).is_err());
        assert!(Stars::new(3.2).is_err());
        assert_eq!(Stars::nearest(3.74).value(), 3.5);
        assert_eq!(Stars::nearest(9.0).value(), 5.0);
    }

    proptest! {
        #[test]
        fn normalize_is_idempotent(words in proptest::collection::vec(
            prop_oneof![
                Just("The"), Just("pasta"), Just("WAS"), Just("great"), Just(":)"), Just(":("),
                Just("gr8"), Just("but"), Just("."), Just("!"), Just(";"), Just("and"), Just("then"),
                Just("chai,"), Just("it's"), Just("cold?"),
            ], 0..20)) {
            let l = lex(&["the", "was", "and"], &[("gr8", &["great"]), ("chai", &["tea"])]);
            let once = normalize(&words.join(" "), &l);
            let twice = normalize(&once.join(" "), &l);
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn vocabulary_is_deterministic_and_contiguous(docs in proptest::collection::vec(
            proptest::collection::vec("[a-e]", 0..8), 1..6), min_count in 1usize..3) {
            let a = build_vocabulary(&docs, min_count);
            let b = build_vocabulary(&docs, min_count);
            match (a, b) {
                (Ok(a), Ok(b)) => {
                    prop_assert_eq!(&a, &b);
                    for (i, t) in a.tokens().iter().enumerate() {
                        prop_assert_eq!(a.get(t), Some(i));
                        let count = docs.iter().flatten().filter(|x| *x == t).count();
                        prop_assert!(count >= min_count);
                    }
                }
                (Err(_), Err(_)) => {}
                _ => prop_assert!(false, "non-deterministic result"),
            }
        }
    }
}
