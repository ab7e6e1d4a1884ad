//! Food-item mention detection and per-item opinion scoping.
//!
//! A normalized review is cut into clauses at [`SENTENCE_BREAK`] and
//! [`CLAUSE_BREAK`] markers (raw coordinators are recognized too, so token
//! lists that did not pass through [`crate::corpus::normalize`] still split).
//! Every clause is then owned by the items mentioned inside it, or attached to
//! a neighbouring mention in the same sentence.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{lexicon_lines, CorpusError, CLAUSE_BREAK, COORDINATORS, SENTENCE_BREAK};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ItemId(pub u32);

impl fmt::Display for ItemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::str::FromStr for ItemId {
    type Err = std::num::ParseIntError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.parse().map(ItemId)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ItemEntry {
    pub item_id: ItemId,
    pub canonical_name: String,
    pub aliases: Vec<Vec<String>>,
}

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("item {0} has an empty alias")]
    EmptyAlias(ItemId),
    #[error("alias `{alias}` is claimed by items {first} and {second}")]
    SharedAlias {
        alias: String,
        first: ItemId,
        second: ItemId,
    },
    #[error("duplicate item id {0}")]
    DuplicateItem(ItemId),
    #[error("item lexicon is empty")]
    Empty,
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

/// The set of known food items and their surface forms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<ItemEntry>", into = "Vec<ItemEntry>")]
pub struct ItemLexicon {
    items: Vec<ItemEntry>,
    alias_index: HashMap<Vec<String>, ItemId>,
    max_alias_len: usize,
}

impl TryFrom<Vec<ItemEntry>> for ItemLexicon {
    type Error = LexiconError;
    fn try_from(items: Vec<ItemEntry>) -> Result<Self, Self::Error> {
        ItemLexicon::new(items)
    }
}

impl From<ItemLexicon> for Vec<ItemEntry> {
    fn from(l: ItemLexicon) -> Self {
        l.items
    }
}

impl ItemLexicon {
    pub fn new(mut items: Vec<ItemEntry>) -> Result<Self, LexiconError> {
        if items.is_empty() {
            return Err(LexiconError::Empty);
        }
        items.sort_by_key(|e| e.item_id);
        let mut alias_index = HashMap::new();
        let mut max_alias_len = 0;
        for w in items.windows(2) {
            if w[0].item_id == w[1].item_id {
                return Err(LexiconError::DuplicateItem(w[0].item_id));
            }
        }
        for item in &items {
            for alias in &item.aliases {
                if alias.is_empty() || alias.iter().any(|t| t.is_empty()) {
                    return Err(LexiconError::EmptyAlias(item.item_id));
                }
                if let Some(prev) = alias_index.insert(alias.clone(), item.item_id) {
                    if prev != item.item_id {
                        return Err(LexiconError::SharedAlias {
                            alias: alias.join(" "),
                            first: prev,
                            second: item.item_id,
                        });
                    }
                }
                max_alias_len = max_alias_len.max(alias.len());
            }
        }
        Ok(ItemLexicon {
            items,
            alias_index,
            max_alias_len,
        })
    }

    /// Reads `item_id<TAB>canonical_name<TAB>alias1|alias2|...`; aliases are
    /// lowercased and split on whitespace into token sequences.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, LexiconError> {
        let path = path.as_ref();
        let mut items = Vec::new();
        for (n, line) in lexicon_lines(path)? {
            let malformed = |reason: &str| {
                LexiconError::Corpus(CorpusError::MalformedLexicon {
                    file: path.display().to_string(),
                    line: n,
                    reason: reason.to_string(),
                })
            };
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 3 {
                return Err(malformed("expected item_id<TAB>canonical_name<TAB>aliases"));
            }
            let item_id = fields[0]
                .trim()
                .parse::<ItemId>()
                .map_err(|_| malformed("item_id must be a non-negative integer"))?;
            let aliases = fields[2]
                .split('|')
                .map(|a| a.split_whitespace().map(str::to_lowercase).collect::<Vec<_>>())
                .collect();
            items.push(ItemEntry {
                item_id,
                canonical_name: fields[1].trim().to_string(),
                aliases,
            });
        }
        ItemLexicon::new(items)
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("# item_id\tcanonical_name\taliases\n");
        for item in &self.items {
            let aliases: Vec<String> = item.aliases.iter().map(|a| a.join(" ")).collect();
            out.push_str(&format!(
                "{}\t{}\t{}\n",
                item.item_id,
                item.canonical_name,
                aliases.join("|")
            ));
        }
        out
    }

    pub fn items(&self) -> &[ItemEntry] {
        &self.items
    }

    pub fn get(&self, id: ItemId) -> Option<&ItemEntry> {
        self.items
            .binary_search_by_key(&id, |e| e.item_id)
            .ok()
            .map(|i| &self.items[i])
    }

    pub fn by_name(&self, name: &str) -> Option<&ItemEntry> {
        self.items.iter().find(|e| e.canonical_name == name)
    }

    /// Accepts a numeric id, a canonical name or any alias.
    pub fn resolve(&self, query: &str) -> Option<ItemId> {
        if let Ok(id) = query.parse::<ItemId>() {
            if self.get(id).is_some() {
                return Some(id);
            }
        }
        if let Some(e) = self.by_name(query) {
            return Some(e.item_id);
        }
        let key: Vec<String> = query.split_whitespace().map(str::to_lowercase).collect();
        self.alias_index.get(&key).copied()
    }

    pub fn name(&self, id: ItemId) -> Option<&str> {
        self.get(id).map(|e| e.canonical_name.as_str())
    }
}

/// A matched item occurrence: token span `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mention {
    pub item_id: ItemId,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ItemFragment {
    pub review_id: String,
    pub item_id: ItemId,
    pub tokens: Vec<String>,
    pub clause_index: usize,
}

/// Greedy longest-match-first, left-to-right alias matching.
pub fn find_mentions<S: AsRef<str>>(tokens: &[S], lexicon: &ItemLexicon) -> Vec<Mention> {
    let mut mentions = Vec::new();
    let mut i = 0;
    let mut key: Vec<String> = Vec::with_capacity(lexicon.max_alias_len);
    while i < tokens.len() {
        let longest = lexicon.max_alias_len.min(tokens.len() - i);
        let mut matched = None;
        for len in (1..=longest).rev() {
            key.clear();
            key.extend(tokens[i..i + len].iter().map(|t| t.as_ref().to_string()));
            if let Some(&item_id) = lexicon.alias_index.get(&key) {
                matched = Some((item_id, len));
                break;
            }
        }
        match matched {
            Some((item_id, len)) => {
                mentions.push(Mention {
                    item_id,
                    start: i,
                    end: i + len,
                });
                i += len;
            }
            None => i += 1,
        }
    }
    mentions
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Break {
    Clause,
    Sentence,
}

/// Classifies the token at `i`, returning the break kind and how many tokens it spans.
fn break_at<S: AsRef<str>>(tokens: &[S], i: usize) -> Option<(Break, usize)> {
    let t = tokens[i].as_ref();
    if t == SENTENCE_BREAK {
        Some((Break::Sentence, 1))
    } else if t == CLAUSE_BREAK || COORDINATORS.contains(&t) {
        Some((Break::Clause, 1))
    } else if t == "and" && tokens.get(i + 1).map(|n| n.as_ref()) == Some("then") {
        Some((Break::Clause, 2))
    } else {
        None
    }
}

struct Clause {
    sentence: usize,
    /// Token indices, markers excluded.
    positions: Vec<usize>,
}

fn split_clauses<S: AsRef<str>>(tokens: &[S]) -> Vec<Clause> {
    let mut clauses = Vec::new();
    let mut sentence = 0;
    let mut current = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        if let Some((kind, width)) = break_at(tokens, i) {
            if !current.is_empty() {
                clauses.push(Clause {
                    sentence,
                    positions: std::mem::take(&mut current),
                });
            }
            if kind == Break::Sentence {
                sentence += 1;
            }
            i += width;
            continue;
        }
        current.push(i);
        i += 1;
    }
    if !current.is_empty() {
        clauses.push(Clause {
            sentence,
            positions: current,
        });
    }
    clauses
}

/// Collects per-item token positions into fragments ordered by first appearance.
fn assemble<S: AsRef<str>>(
    review_id: &str,
    tokens: &[S],
    owned: BTreeMap<ItemId, (usize, Vec<usize>)>,
) -> Vec<ItemFragment> {
    let mut fragments: Vec<(usize, usize, ItemFragment)> = owned
        .into_iter()
        .filter(|(_, (_, pos))| !pos.is_empty())
        .map(|(item_id, (clause_index, positions))| {
            let first = positions[0];
            (
                clause_index,
                first,
                ItemFragment {
                    review_id: review_id.to_string(),
                    item_id,
                    tokens: positions.iter().map(|&p| tokens[p].as_ref().to_string()).collect(),
                    clause_index,
                },
            )
        })
        .collect();
    fragments.sort_by_key(|(c, first, _)| (*c, *first));
    fragments.into_iter().map(|(_, _, f)| f).collect()
}

/// Assigns each clause to the items mentioned in it; mention-less clauses go
/// to the nearest preceding mention in the same sentence, else the nearest
/// following one, else they are dropped. Other items' mention tokens are not
/// copied into a fragment.
pub fn scope_fragments<S: AsRef<str>>(
    review_id: &str,
    tokens: &[S],
    mentions: &[Mention],
) -> Vec<ItemFragment> {
    if mentions.is_empty() {
        return Vec::new();
    }
    let mut owner_of: Vec<Option<ItemId>> = vec![None; tokens.len()];
    for m in mentions {
        for slot in &mut owner_of[m.start..m.end] {
            *slot = Some(m.item_id);
        }
    }

    let clauses = split_clauses(tokens);
    // items mentioned in each clause, in order of appearance
    let clause_items: Vec<Vec<ItemId>> = clauses
        .iter()
        .map(|c| {
            let mut items: Vec<ItemId> = Vec::new();
            for &p in &c.positions {
                if let Some(id) = owner_of[p] {
                    if !items.contains(&id) {
                        items.push(id);
                    }
                }
            }
            items
        })
        .collect();

    let mut owned: BTreeMap<ItemId, (usize, Vec<usize>)> = BTreeMap::new();
    for (ci, clause) in clauses.iter().enumerate() {
        let targets: Vec<ItemId> = if !clause_items[ci].is_empty() {
            clause_items[ci].clone()
        } else {
            let preceding = (0..ci)
                .rev()
                .take_while(|&j| clauses[j].sentence == clause.sentence)
                .find_map(|j| clause_items[j].last().copied());
            let following = || {
                (ci + 1..clauses.len())
                    .take_while(|&j| clauses[j].sentence == clause.sentence)
                    .find_map(|j| clause_items[j].first().copied())
            };
            match preceding.or_else(following) {
                Some(id) => vec![id],
                None => continue,
            }
        };
        for item in targets {
            let entry = owned.entry(item).or_insert_with(|| (ci, Vec::new()));
            entry.1.extend(
                clause
                    .positions
                    .iter()
                    .copied()
                    .filter(|&p| owner_of[p].is_none_or(|o| o == item)),
            );
        }
    }
    assemble(review_id, tokens, owned)
}

/// A dependency arc `(head, dependent, relation)` over token indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Arc {
    pub head: usize,
    pub dependent: usize,
    pub relation: String,
}

impl Arc {
    pub fn new(head: usize, dependent: usize, relation: impl Into<String>) -> Self {
        Arc {
            head,
            dependent,
            relation: relation.into(),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ArcError {
    #[error("arc {head}->{dependent} is out of bounds for {len} tokens")]
    OutOfBounds {
        head: usize,
        dependent: usize,
        len: usize,
    },
    #[error("arcs contain a cycle through token {0}")]
    Cycle(usize),
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Scopes tokens to mentions using externally supplied dependency arcs.
///
/// Each non-mention token goes to the mention whose head token is closest in
/// undirected arc distance (earlier mention on ties); tokens in components
/// without a mention are dropped. The head of a multi-token mention is its
/// first token whose parent lies outside the span.
pub fn scope_fragments_with_arcs<S: AsRef<str>>(
    review_id: &str,
    tokens: &[S],
    mentions: &[Mention],
    arcs: &[Arc],
) -> Result<Vec<ItemFragment>, ArcError> {
    let n = tokens.len();
    let mut parent: Vec<usize> = (0..n).collect();
    let mut adjacency = vec![Vec::new(); n];
    let mut head_of = vec![None; n];
    for a in arcs {
        if a.head >= n || a.dependent >= n {
            return Err(ArcError::OutOfBounds {
                head: a.head,
                dependent: a.dependent,
                len: n,
            });
        }
        let (ra, rb) = (find(&mut parent, a.head), find(&mut parent, a.dependent));
        if ra == rb {
            return Err(ArcError::Cycle(a.dependent));
        }
        parent[ra] = rb;
        adjacency[a.head].push(a.dependent);
        adjacency[a.dependent].push(a.head);
        head_of[a.dependent] = Some(a.head);
    }
    if mentions.is_empty() {
        return Ok(Vec::new());
    }

    let mut sorted: Vec<Mention> = mentions.to_vec();
    sorted.sort_by_key(|m| m.start);

    let mut owner: Vec<Option<usize>> = vec![None; n];
    let mut best = vec![usize::MAX; n];
    for (mi, m) in sorted.iter().enumerate() {
        for p in m.start..m.end {
            owner[p] = Some(mi);
            best[p] = 0;
        }
    }
    let is_mention_token: Vec<bool> = owner.iter().map(Option::is_some).collect();

    for (mi, m) in sorted.iter().enumerate() {
        let head = (m.start..m.end)
            .find(|&p| head_of[p].is_none_or(|h| h < m.start || h >= m.end))
            .unwrap_or(m.start);
        let mut dist = vec![usize::MAX; n];
        let mut queue = VecDeque::from([head]);
        dist[head] = 0;
        while let Some(u) = queue.pop_front() {
            for &v in &adjacency[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        for p in 0..n {
            // strict < keeps the earlier mention on ties
            if !is_mention_token[p] && dist[p] < best[p] {
                best[p] = dist[p];
                owner[p] = Some(mi);
            }
        }
    }

    let mut owned: BTreeMap<ItemId, (usize, Vec<usize>)> = BTreeMap::new();
    for (p, o) in owner.iter().enumerate() {
        let Some(mi) = *o else { continue };
        let t = tokens[p].as_ref();
        if t == SENTENCE_BREAK || t == CLAUSE_BREAK {
            continue;
        }
        let item = sorted[mi].item_id;
        let first_mention = sorted.iter().position(|m| m.item_id == item).unwrap_or(mi);
        owned
            .entry(item)
            .or_insert_with(|| (first_mention, Vec::new()))
            .1
            .push(p);
    }
    Ok(assemble(review_id, tokens, owned))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    fn lexicon(entries: &[(u32, &str, &[&str])]) -> ItemLexicon {
        ItemLexicon::new(
            entries
                .iter()
                .map(|(id, name, aliases)| ItemEntry {
                    item_id: ItemId(*id),
                    canonical_name: name.to_string(),
                    aliases: aliases.iter().map(|a| toks(a)).collect(),
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn resolve_by_id_name_or_alias() {
        let lex = lexicon(&[(3, "masala_dosa", &["masala dosa", "dosa"]), (7, "idli", &["idli"])]);
        assert_eq!(lex.resolve("3"), Some(ItemId(3)));
        assert_eq!(lex.resolve("masala_dosa"), Some(ItemId(3)));
        assert_eq!(lex.resolve("Masala  Dosa"), Some(ItemId(3)));
        assert_eq!(lex.resolve("idli"), Some(ItemId(7)));
        assert_eq!(lex.resolve("5"), None);
        assert_eq!(lex.resolve("vada"), None);
    }

    #[test]
    fn longest_alias_wins() {
        let lex = lexicon(&[(7, "garlic_bread", &["garlic bread"]), (3, "bread", &["bread"])]);
        let m = find_mentions(&toks("garlic bread good"), &lex);
        assert_eq!(m, vec![Mention { item_id: ItemId(7), start: 0, end: 2 }]);
    }

    #[test]
    fn disjoint_and_absent_mentions() {
        let lex = lexicon(&[(1, "pasta", &["pasta"]), (2, "pizza", &["pizza"])]);
        assert_eq!(find_mentions(&toks("pasta and pizza"), &lex).len(), 2);
        assert!(find_mentions(&toks("great service"), &lex).is_empty());
    }

    #[test]
    fn shared_alias_rejected() {
        let err = ItemLexicon::new(vec![
            ItemEntry { item_id: ItemId(1), canonical_name: "a".into(), aliases: vec![toks("x")] },
            ItemEntry { item_id: ItemId(2), canonical_name: "b".into(), aliases: vec![toks("x")] },
        ]);
        assert!(matches!(err, Err(LexiconError::SharedAlias { .. })));
    }

    #[test]
    fn clause_split_at_but() {
        let lex = lexicon(&[(1, "pasta", &["pasta"]), (2, "pizza", &["pizza"])]);
        let t = toks("pasta great but pizza soggy");
        let f = scope_fragments("r1", &t, &find_mentions(&t, &lex));
        assert_eq!(f.len(), 2);
        assert_eq!(f[0].item_id, ItemId(1));
        assert_eq!(f[0].tokens, toks("pasta great"));
        assert_eq!(f[1].tokens, toks("pizza soggy"));
        assert_eq!(f[1].clause_index, 1);
    }

    #[test]
    fn shared_clause_duplicates_modifiers() {
        // "pasta and pizza were cold" after stopword removal: one clause, two
        // mentions; each fragment keeps its own mention plus the shared "cold".
        let lex = lexicon(&[(1, "pasta", &["pasta"]), (2, "pizza", &["pizza"])]);
        let t = toks("pasta pizza cold");
        let f = scope_fragments("r", &t, &find_mentions(&t, &lex));
        assert_eq!(f[0].tokens, toks("pasta cold"));
        assert_eq!(f[1].tokens, toks("pizza cold"));
    }

    #[test]
    fn single_mention_collects_all_clauses() {
        let lex = lexicon(&[(1, "pasta", &["pasta"])]);
        let t = toks("lovely <cl> pasta creamy <cl> cheap too");
        let f = scope_fragments("r", &t, &find_mentions(&t, &lex));
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].tokens, toks("lovely pasta creamy cheap too"));
    }

    #[test]
    fn orphan_clause_in_other_sentence_is_dropped() {
        let lex = lexicon(&[(1, "pasta", &["pasta"]), (2, "pizza", &["pizza"])]);
        let t = toks("pasta good <cl> pizza bad <cl> cold <eos> service slow");
        let f = scope_fragments("r", &t, &find_mentions(&t, &lex));
        assert_eq!(f[0].tokens, toks("pasta good"));
        // "cold" attaches to the nearest preceding mention (pizza)
        assert_eq!(f[1].tokens, toks("pizza bad cold"));
    }

    #[test]
    fn orphan_clause_attaches_forward_within_sentence() {
        let lex = lexicon(&[(1, "pasta", &["pasta"])]);
        let t = toks("bad <eos> honestly awful <cl> pasta");
        let f = scope_fragments("r", &t, &find_mentions(&t, &lex));
        assert_eq!(f[0].tokens, toks("honestly awful pasta"));
    }

    #[test]
    fn no_mentions_no_fragments() {
        assert!(scope_fragments::<String>("r", &toks("a b"), &[]).is_empty());
    }

    #[test]
    fn arcs_star_graph() {
        let t = toks("pasta was really good");
        let m = [Mention { item_id: ItemId(1), start: 0, end: 1 }];
        let arcs: Vec<Arc> = (1..4).map(|d| Arc::new(0, d, "dep")).collect();
        let f = scope_fragments_with_arcs("r", &t, &m, &arcs).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].tokens, t);
    }

    #[test]
    fn arcs_two_components() {
        let t = toks("pasta good pizza bad");
        let m = [
            Mention { item_id: ItemId(1), start: 0, end: 1 },
            Mention { item_id: ItemId(2), start: 2, end: 3 },
        ];
        let arcs = [Arc::new(0, 1, "amod"), Arc::new(2, 3, "amod")];
        let f = scope_fragments_with_arcs("r", &t, &m, &arcs).unwrap();
        assert_eq!(f[0].tokens, toks("pasta good"));
        assert_eq!(f[1].tokens, toks("pizza bad"));
    }

    #[test]
    fn arcs_tie_goes_to_earlier_mention() {
        let t = toks("a b c");
        let m = [
            Mention { item_id: ItemId(5), start: 0, end: 1 },
            Mention { item_id: ItemId(4), start: 2, end: 3 },
        ];
        let arcs = [Arc::new(0, 1, "x"), Arc::new(1, 2, "x")];
        let f = scope_fragments_with_arcs("r", &t, &m, &arcs).unwrap();
        let five = f.iter().find(|f| f.item_id == ItemId(5)).unwrap();
        assert_eq!(five.tokens, toks("a b"));
    }

    #[test]
    fn arcs_malformed() {
        let t = toks("a b c");
        let m = [Mention { item_id: ItemId(1), start: 0, end: 1 }];
        assert!(matches!(
            scope_fragments_with_arcs("r", &t, &m, &[Arc::new(0, 9, "x")]),
            Err(ArcError::OutOfBounds { .. })
        ));
        let cyc = [Arc::new(0, 1, "x"), Arc::new(1, 2, "x"), Arc::new(2, 0, "x")];
        assert!(matches!(scope_fragments_with_arcs("r", &t, &m, &cyc), Err(ArcError::Cycle(_))));
        assert!(matches!(
            scope_fragments_with_arcs("r", &t, &m, &[Arc::new(1, 1, "x")]),
            Err(ArcError::Cycle(1))
        ));
    }

    fn vocab_token() -> impl Strategy<Value = String> {
        prop_oneof![
            Just("pasta"), Just("pizza"), Just("garlic"), Just("bread"), Just("good"),
            Just("bad"), Just("cold"), Just("<cl>"), Just("<eos>"), Just("but"), Just("and"), Just("then"),
        ]
        .prop_map(String::from)
    }

    proptest! {
        #[test]
        fn fragment_tokens_bounded_by_review(tokens in proptest::collection::vec(vocab_token(), 0..25)) {
            let lex = lexicon(&[(1, "pasta", &["pasta"]), (2, "pizza", &["pizza"]), (3, "garlic_bread", &["garlic bread"])]);
            let mentions = find_mentions(&tokens, &lex);
            for w in mentions.windows(2) {
                prop_assert!(w[0].end <= w[1].start);
            }
            let frags = scope_fragments("r", &tokens, &mentions);
            prop_assert_eq!(&frags, &scope_fragments("r", &tokens, &mentions));
            let mut seen_items = std::collections::HashSet::new();
            for f in &frags {
                prop_assert!(!f.tokens.is_empty());
                prop_assert!(seen_items.insert(f.item_id));
            }
            let distinct: std::collections::HashSet<_> = mentions.iter().map(|m| m.item_id).collect();
            for t in ["good", "bad", "cold", "pasta"] {
                let in_review = tokens.iter().filter(|x| *x == t).count();
                let in_frags: usize = frags.iter().map(|f| f.tokens.iter().filter(|x| *x == t).count()).sum();
                prop_assert!(in_frags <= in_review * distinct.len().max(1));
            }
            if distinct.len() == 1 {
                prop_assert_eq!(frags.len(), 1);
            }
        }
    }
}
