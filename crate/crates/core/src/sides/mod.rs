//! Side-dish affinity: item co-mention communities and per-restaurant topics.

mod graph;
mod lda;
mod louvain;

pub use graph::{build_comention_graph, comention_sets, modularity, Partition, WeightedGraph};
pub use lda::{lda_train, lda_train_observed, restaurant_documents, top_words, LdaConfig, TopicModel};
pub use louvain::{louvain, louvain_with_trace, LouvainTrace};

use std::collections::BTreeSet;

use thiserror::Error;

use crate::fragmenter::{ItemId, ItemLexicon};

#[derive(Debug, Error, PartialEq)]
pub enum SidesError {
    #[error("graph has no nodes")]
    EmptyGraph,
    #[error("corpus has no tokens")]
    EmptyCorpus,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

/// Number of top words per topic used for topic-mode pairs.
pub const TOP_WORDS: usize = 10;

/// Co-preferred item pairs `(a, b)` with `a < b`, deduplicated and sorted.
pub fn side_pairs_from_partition(partition: &Partition) -> Vec<(ItemId, ItemId)> {
    let mut pairs = BTreeSet::new();
    for members in partition.communities() {
        for (x, &a) in members.iter().enumerate() {
            for &b in &members[x + 1..] {
                pairs.insert((a.min(b), a.max(b)));
            }
        }
    }
    pairs.into_iter().collect()
}

/// Pairs of lexicon items that share any topic's top words.
pub fn side_pairs_from_topics(model: &TopicModel, lexicon: &ItemLexicon) -> Vec<(ItemId, ItemId)> {
    let mut pairs = BTreeSet::new();
    for k in 0..model.k {
        let items: Vec<ItemId> = top_words(model, k, TOP_WORDS)
            .iter()
            .filter_map(|(w, _)| lexicon.by_name(w).map(|e| e.item_id))
            .collect();
        for (x, &a) in items.iter().enumerate() {
            for &b in &items[x + 1..] {
                if a != b {
                    pairs.insert((a.min(b), a.max(b)));
                }
            }
        }
    }
    pairs.into_iter().collect()
}

/// `item_a<TAB>item_b` lines.
pub fn export_pairs(pairs: &[(ItemId, ItemId)]) -> String {
    pairs.iter().map(|(a, b)| format!("{a}\t{b}\n")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fragmenter::ItemEntry;
    use std::collections::BTreeMap;

    #[test]
    fn community_pairs() {
        let p = Partition::from_assignment(
            [(ItemId(1), 0), (ItemId(2), 0), (ItemId(3), 1)].into_iter().collect::<BTreeMap<_, _>>(),
        );
        assert_eq!(side_pairs_from_partition(&p), vec![(ItemId(1), ItemId(2))]);
        let singles = Partition::from_assignment((1..4).map(|i| (ItemId(i), i as usize)).collect());
        assert!(side_pairs_from_partition(&singles).is_empty());
    }

    #[test]
    fn topic_pairs() {
        let entry = |id: u32, name: &str| ItemEntry {
            item_id: ItemId(id),
            canonical_name: name.into(),
            aliases: vec![vec![name.into()]],
        };
        let lex = ItemLexicon::new(vec![entry(1, "pasta"), entry(2, "garlic_bread"), entry(3, "kulfi")]).unwrap();
        let docs: Vec<Vec<String>> = vec![
            vec!["pasta".into(), "garlic_bread".into(), "pasta".into()],
            vec!["garlic_bread".into(), "pasta".into()],
        ];
        let cfg = LdaConfig { k: 1, sweeps: 5, ..LdaConfig::default() };
        let m = lda_train(&docs, &cfg).unwrap();
        assert_eq!(side_pairs_from_topics(&m, &lex), vec![(ItemId(1), ItemId(2))]);
    }
}
