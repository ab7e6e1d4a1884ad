use std::collections::BTreeMap;

use super::graph::{modularity, Partition, WeightedGraph};
use super::SidesError;

const MIN_GAIN: f64 = 1e-12;

/// Node-level partition after each aggregation phase, with its modularity.
#[derive(Debug, Clone, PartialEq)]
pub struct LouvainTrace {
    pub partition: Partition,
    /// Modularity of the singleton start followed by one value per phase.
    pub phase_modularity: Vec<f64>,
}

/// Weighted graph on dense indices; `self_loop[i]` holds `A_ii`.
struct Level {
    adj: Vec<Vec<(usize, f64)>>,
    self_loop: Vec<f64>,
}

impl Level {
    fn n(&self) -> usize {
        self.adj.len()
    }

    fn degree(&self, i: usize) -> f64 {
        self.adj[i].iter().map(|e| e.1).sum::<f64>() + self.self_loop[i]
    }

    /// Local moves until a full pass changes nothing; returns labels and whether anything moved.
    fn local_moves(&self, two_m: f64) -> (Vec<usize>, bool) {
        let n = self.n();
        let k: Vec<f64> = (0..n).map(|i| self.degree(i)).collect();
        let mut comm: Vec<usize> = (0..n).collect();
        let mut tot = k.clone();
        let mut moved_any = false;
        loop {
            let mut moved = false;
            for i in 0..n {
                let own = comm[i];
                tot[own] -= k[i];
                let mut links: BTreeMap<usize, f64> = BTreeMap::new();
                links.insert(own, 0.0);
                for &(j, w) in &self.adj[i] {
                    *links.entry(comm[j]).or_default() += w;
                }
                let gain = |c: usize, w_in: f64| w_in - tot[c] * k[i] / two_m;
                let stay = gain(own, links[&own]);
                let mut best = (own, stay);
                for (&c, &w_in) in &links {
                    let g = gain(c, w_in);
                    if g > best.1 + MIN_GAIN || (c < best.0 && (g - best.1).abs() <= MIN_GAIN && g > stay + MIN_GAIN) {
                        best = (c, g);
                    }
                }
                let target = if best.1 > stay + MIN_GAIN { best.0 } else { own };
                tot[target] += k[i];
                if target != own {
                    comm[i] = target;
                    moved = true;
                    moved_any = true;
                }
            }
            if !moved {
                break;
            }
        }
        (compact(&comm), moved_any)
    }

    fn aggregate(&self, comm: &[usize]) -> Level {
        let nc = comm.iter().max().map_or(0, |m| m + 1);
        let mut self_loop = vec![0.0; nc];
        let mut acc: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); nc];
        for i in 0..self.n() {
            self_loop[comm[i]] += self.self_loop[i];
            for &(j, w) in &self.adj[i] {
                if comm[i] == comm[j] {
                    self_loop[comm[i]] += w;
                } else {
                    *acc[comm[i]].entry(comm[j]).or_default() += w;
                }
            }
        }
        Level {
            adj: acc.into_iter().map(|m| m.into_iter().collect()).collect(),
            self_loop,
        }
    }
}

fn compact(comm: &[usize]) -> Vec<usize> {
    let mut relabel = BTreeMap::new();
    comm.iter()
        .map(|&c| {
            let next = relabel.len();
            *relabel.entry(c).or_insert(next)
        })
        .collect()
}

/// Deterministic Louvain: ascending scan order, ties to the lowest community id.
pub fn louvain(g: &WeightedGraph) -> Result<Partition, SidesError> {
    louvain_with_trace(g).map(|t| t.partition)
}

pub fn louvain_with_trace(g: &WeightedGraph) -> Result<LouvainTrace, SidesError> {
    if g.n_nodes() == 0 {
        return Err(SidesError::EmptyGraph);
    }
    let nodes: Vec<_> = g.nodes().collect();
    let index: BTreeMap<_, usize> = nodes.iter().enumerate().map(|(i, &n)| (n, i)).collect();
    let mut adj = vec![Vec::new(); nodes.len()];
    for (a, b, w) in g.edges() {
        adj[index[&a]].push((index[&b], w as f64));
        adj[index[&b]].push((index[&a], w as f64));
    }
    for row in &mut adj {
        row.sort_by_key(|e| e.0);
    }
    let mut level = Level {
        self_loop: vec![0.0; nodes.len()],
        adj,
    };
    let two_m = 2.0 * g.total_weight() as f64;
    let mut node_comm: Vec<usize> = (0..nodes.len()).collect();
    let to_partition = |nc: &[usize]| Partition::from_assignment(nodes.iter().copied().zip(nc.iter().copied()).collect());
    let mut trace = vec![modularity(g, &to_partition(&node_comm))];
    if two_m > 0.0 {
        loop {
            let (comm, moved) = level.local_moves(two_m);
            if !moved {
                break;
            }
            let next: Vec<usize> = node_comm.iter().map(|&c| comm[c]).collect();
            let q = modularity(g, &to_partition(&next));
            let prev = *trace.last().expect("non-empty");
            assert!(q >= prev - 1e-12, "modularity decreased across a phase: {prev} -> {q}");
            if q <= prev + MIN_GAIN {
                break;
            }
            trace.push(q);
            node_comm = next;
            level = level.aggregate(&comm);
        }
    }
    Ok(LouvainTrace {
        partition: to_partition(&node_comm),
        phase_modularity: trace,
    })
}
