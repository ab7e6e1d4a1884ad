use std::collections::{BTreeMap, BTreeSet};

use crate::fragmenter::{ItemFragment, ItemId};

/// Undirected co-mention graph; edge weight counts reviews mentioning both items.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct WeightedGraph {
    nodes: BTreeSet<ItemId>,
    /// Keyed by `(a, b)` with `a < b`.
    edges: BTreeMap<(ItemId, ItemId), u64>,
}

impl WeightedGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, node: ItemId) {
        self.nodes.insert(node);
    }

    /// Adds `weight` to edge `{a, b}`; self-loops are ignored.
    pub fn add_edge(&mut self, a: ItemId, b: ItemId, weight: u64) {
        self.nodes.insert(a);
        self.nodes.insert(b);
        if a != b && weight > 0 {
            *self.edges.entry((a.min(b), a.max(b))).or_default() += weight;
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = ItemId> + '_ {
        self.nodes.iter().copied()
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (ItemId, ItemId, u64)> + '_ {
        self.edges.iter().map(|(&(a, b), &w)| (a, b, w))
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn weight(&self, a: ItemId, b: ItemId) -> u64 {
        self.edges.get(&(a.min(b), a.max(b))).copied().unwrap_or(0)
    }

    pub fn total_weight(&self) -> u64 {
        self.edges.values().sum()
    }

    pub fn degree(&self, node: ItemId) -> u64 {
        self.edges
            .iter()
            .filter(|((a, b), _)| *a == node || *b == node)
            .map(|(_, &w)| w)
            .sum()
    }
}

/// Item sets per review, in review-id order.
pub fn comention_sets(fragments: &[ItemFragment]) -> Vec<BTreeSet<ItemId>> {
    let mut by_review: BTreeMap<&str, BTreeSet<ItemId>> = BTreeMap::new();
    for f in fragments {
        by_review.entry(f.review_id.as_str()).or_default().insert(f.item_id);
    }
    by_review.into_values().collect()
}

/// Every mentioned item becomes a node; each review adds 1 to every pair it mentions.
pub fn build_comention_graph(reviews: &[BTreeSet<ItemId>]) -> WeightedGraph {
    let mut g = WeightedGraph::new();
    for items in reviews {
        let items: Vec<ItemId> = items.iter().copied().collect();
        for (x, &a) in items.iter().enumerate() {
            g.add_node(a);
            for &b in &items[x + 1..] {
                g.add_edge(a, b, 1);
            }
        }
    }
    g
}

/// Total assignment of items to communities numbered contiguously from 0.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Partition {
    assignment: BTreeMap<ItemId, usize>,
}

impl Partition {
    /// Renumbers community labels by first appearance in ascending item order.
    pub fn from_assignment(raw: BTreeMap<ItemId, usize>) -> Self {
        let mut relabel: BTreeMap<usize, usize> = BTreeMap::new();
        let assignment = raw
            .into_iter()
            .map(|(item, c)| {
                let next = relabel.len();
                (item, *relabel.entry(c).or_insert(next))
            })
            .collect();
        Partition { assignment }
    }

    pub fn singletons(g: &WeightedGraph) -> Self {
        Self::from_assignment(g.nodes().enumerate().map(|(i, n)| (n, i)).collect())
    }

    pub fn single(g: &WeightedGraph) -> Self {
        Self::from_assignment(g.nodes().map(|n| (n, 0)).collect())
    }

    pub fn community_of(&self, item: ItemId) -> Option<usize> {
        self.assignment.get(&item).copied()
    }

    pub fn assignment(&self) -> &BTreeMap<ItemId, usize> {
        &self.assignment
    }

    pub fn n_communities(&self) -> usize {
        self.assignment.values().max().map_or(0, |m| m + 1)
    }

    /// Members of each community, ascending.
    pub fn communities(&self) -> Vec<Vec<ItemId>> {
        let mut out = vec![Vec::new(); self.n_communities()];
        for (&item, &c) in &self.assignment {
            out[c].push(item);
        }
        out
    }

    /// `item_id<TAB>community_id` lines in item order.
    pub fn export_tsv(&self) -> String {
        self.assignment.iter().map(|(i, c)| format!("{i}\t{c}\n")).collect()
    }
}

/// Weighted Newman modularity; 0 for a graph without edges.
pub fn modularity(g: &WeightedGraph, p: &Partition) -> f64 {
    let m = g.total_weight() as f64;
    if m == 0.0 {
        return 0.0;
    }
    let n = p.n_communities();
    let mut internal = vec![0.0; n];
    let mut total = vec![0.0; n];
    for (a, b, w) in g.edges() {
        let (ca, cb) = (p.community_of(a).expect("total partition"), p.community_of(b).expect("total partition"));
        total[ca] += w as f64;
        total[cb] += w as f64;
        if ca == cb {
            internal[ca] += 2.0 * w as f64;
        }
    }
    (0..n)
        .map(|c| internal[c] / (2.0 * m) - (total[c] / (2.0 * m)).powi(2))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(ids: &[u32]) -> BTreeSet<ItemId> {
        ids.iter().map(|&i| ItemId(i)).collect()
    }

    #[test]
    fn counting_pairs() {
        let g = build_comention_graph(&[set(&[1, 2]), set(&[1, 2]), set(&[3])]);
        assert_eq!(g.weight(ItemId(1), ItemId(2)), 2);
        assert_eq!(g.n_edges(), 1);
        assert_eq!(g.n_nodes(), 3);
        let t = build_comention_graph(&[set(&[1, 2, 3])]);
        assert_eq!(t.n_edges(), 3);
        assert!(t.edges().all(|e| e.2 == 1));
        assert_eq!(build_comention_graph(&[set(&[1]), set(&[2])]).n_edges(), 0);
    }

    #[test]
    fn hand_modularity_values() {
        let mut g = WeightedGraph::new();
        for base in [0, 3] {
            g.add_edge(ItemId(base), ItemId(base + 1), 1);
            g.add_edge(ItemId(base + 1), ItemId(base + 2), 1);
            g.add_edge(ItemId(base), ItemId(base + 2), 1);
        }
        let split = Partition::from_assignment((0..6).map(|i| (ItemId(i), (i / 3) as usize)).collect());
        assert!((modularity(&g, &split) - 0.5).abs() < 1e-12);
        assert!(modularity(&g, &Partition::single(&g)).abs() < 1e-12);

        let mut e = WeightedGraph::new();
        e.add_edge(ItemId(0), ItemId(1), 1);
        assert!((modularity(&e, &Partition::singletons(&e)) + 0.5).abs() < 1e-12);
    }

    #[test]
    fn relabel_by_first_appearance() {
        let p = Partition::from_assignment([(ItemId(5), 7), (ItemId(1), 9), (ItemId(3), 7)].into_iter().collect());
        assert_eq!(p.export_tsv(), "1\t0\n3\t1\n5\t1\n");
    }
}
