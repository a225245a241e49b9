//! Weighted modularity and Louvain community detection.
//!
//! Each level runs local moves (a node joins the neighboring community with
//! the largest modularity gain) until no node moves, then collapses every
//! community into a single node carrying a self-loop for its internal
//! weight. Levels repeat until a local-move phase leaves every node where it
//! started. Nodes are visited in a seeded random order, so results are a
//! deterministic function of the seed.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{CueGraph, GraphError, Partition, Result};
use crate::scalar::Scalar;

/// Newman-Girvan weighted modularity, `Σ_c in_c/2m − (tot_c/2m)²`.
pub fn modularity<T: Scalar>(graph: &CueGraph<T>, partition: &Partition) -> Result<T> {
    modularity_with_resolution(graph, partition, T::one())
}

pub fn modularity_with_resolution<T: Scalar>(
    graph: &CueGraph<T>,
    partition: &Partition,
    resolution: T,
) -> Result<T> {
    partition.check(graph.num_nodes())?;
    if graph.num_edges() == 0 {
        return Err(GraphError::NoEdges);
    }
    let k = partition.num_communities();
    let mut inner = vec![T::zero(); k];
    let mut tot = vec![T::zero(); k];
    let mut two_m = T::zero();
    for e in graph.edges() {
        let (cu, cv) = (partition.community_of(e.u), partition.community_of(e.v));
        if cu == cv {
            inner[cu] += e.weight + e.weight;
        }
        tot[cu] += e.weight;
        tot[cv] += e.weight;
        two_m += e.weight + e.weight;
    }
    Ok(inner
        .into_iter()
        .zip(tot)
        .map(|(i, t)| i / two_m - resolution * (t / two_m) * (t / two_m))
        .sum())
}

#[derive(Debug, Clone, PartialEq)]
pub struct LouvainOutcome<T> {
    pub partition: Partition,
    /// Modularity of the original graph after each aggregation level.
    pub level_modularity: Vec<T>,
}

/// Working graph of one level: adjacency without self-loops plus a
/// self-loop weight per node.
struct Level<T> {
    adj: Vec<Vec<(usize, T)>>,
    self_loops: Vec<T>,
}

impl<T: Scalar> Level<T> {
    fn strengths(&self) -> Vec<T> {
        self.adj
            .iter()
            .zip(&self.self_loops)
            .map(|(nb, &sl)| nb.iter().map(|&(_, w)| w).sum::<T>() + sl + sl)
            .collect()
    }

    /// Local-move phase. Returns the community of every level node and
    /// whether anything moved.
    fn local_moves(&self, resolution: T, two_m: T, rng: &mut ChaCha8Rng) -> (Vec<usize>, bool) {
        let n = self.adj.len();
        let k = self.strengths();
        let mut comm: Vec<usize> = (0..n).collect();
        let mut tot = k.clone();
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        let eps = T::of(1e-12) * two_m;

        let mut links = vec![T::zero(); n];
        let mut touched: Vec<usize> = Vec::new();
        let mut any = false;
        for _sweep in 0..1000 {
            let mut moved = false;
            for &i in &order {
                let old = comm[i];
                touched.clear();
                for &(j, w) in &self.adj[i] {
                    let c = comm[j];
                    if links[c] == T::zero() && !touched.contains(&c) {
                        touched.push(c);
                    }
                    links[c] += w;
                }
                tot[old] -= k[i];
                let gain = |c: usize, l: T| l - resolution * tot[c] * k[i] / two_m;
                let mut best = old;
                let mut best_gain = gain(old, links[old]);
                for &c in &touched {
                    let g = gain(c, links[c]);
                    if g > best_gain + eps {
                        best = c;
                        best_gain = g;
                    }
                }
                tot[best] += k[i];
                if best != old {
                    comm[i] = best;
                    moved = true;
                }
                for &c in &touched {
                    links[c] = T::zero();
                }
            }
            if !moved {
                break;
            }
            any = true;
        }
        (comm, any)
    }

    fn aggregate(&self, comm: &[usize], num: usize) -> Self {
        let mut self_loops = vec![T::zero(); num];
        let mut weights: Vec<std::collections::BTreeMap<usize, T>> = vec![Default::default(); num];
        for (i, nb) in self.adj.iter().enumerate() {
            let ci = comm[i];
            self_loops[ci] += self.self_loops[i];
            for &(j, w) in nb {
                let cj = comm[j];
                if ci == cj {
                    // each internal edge is seen from both ends
                    if i < j {
                        self_loops[ci] += w;
                    }
                } else {
                    *weights[ci].entry(cj).or_insert(T::zero()) += w;
                }
            }
        }
        Self {
            adj: weights.into_iter().map(|m| m.into_iter().collect()).collect(),
            self_loops,
        }
    }
}

/// Louvain modularity optimization with seeded node ordering.
pub fn louvain<T: Scalar>(graph: &CueGraph<T>, resolution: T, rng_seed: u64) -> Result<LouvainOutcome<T>> {
    if graph.num_edges() == 0 {
        return Err(GraphError::NoEdges);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut level = Level { adj: graph.adjacency(), self_loops: vec![T::zero(); graph.num_nodes()] };
    let two_m: T = level.strengths().into_iter().sum();
    let mut assignment: Vec<usize> = (0..graph.num_nodes()).collect();
    let mut level_modularity = Vec::new();

    loop {
        let (comm, moved) = level.local_moves(resolution, two_m, &mut rng);
        if !moved {
            break;
        }
        let dense = Partition::new(&comm);
        let num = dense.num_communities();
        for a in assignment.iter_mut() {
            *a = dense.community_of(*a);
        }
        level_modularity.push(modularity_with_resolution(graph, &Partition::new(&assignment), resolution)?);
        if num == level.adj.len() {
            break;
        }
        level = level.aggregate(dense.assignment(), num);
    }
    Ok(LouvainOutcome { partition: Partition::new(&assignment), level_modularity })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_triangles() -> CueGraph<f64> {
        CueGraph::from_words(
            &["a", "b", "c", "d", "e", "f"],
            &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0), (3, 4, 1.0), (4, 5, 1.0), (3, 5, 1.0)],
        )
        .unwrap()
    }

    #[test]
    fn modularity_hand_values() {
        let g = two_triangles();
        assert_eq!(modularity(&g, &Partition::new(&[0, 0, 0, 1, 1, 1])).unwrap(), 0.5);
        assert_eq!(modularity(&g, &Partition::single(6)).unwrap(), 0.0);
        let pair = CueGraph::from_words(&["a", "b"], &[(0, 1, 1.0)]).unwrap();
        assert_eq!(modularity(&pair, &Partition::singletons(2)).unwrap(), -0.5);
    }

    #[test]
    fn modularity_ignores_labels() {
        let g = two_triangles();
        let a = modularity(&g, &Partition::new(&[0, 0, 1, 1, 2, 2])).unwrap();
        let b = modularity(&g, &Partition::new(&[5, 5, 9, 9, 1, 1])).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn edgeless_is_an_error() {
        let g = CueGraph::<f64>::from_words(&["a", "b"], &[]).unwrap();
        assert!(matches!(modularity(&g, &Partition::single(2)), Err(GraphError::NoEdges)));
        assert!(matches!(louvain(&g, 1.0, 0), Err(GraphError::NoEdges)));
    }

    #[test]
    fn louvain_splits_triangles() {
        let g = two_triangles();
        for seed in 0..20 {
            let out = louvain(&g, 1.0, seed).unwrap();
            let p = out.partition.assignment();
            assert_eq!(out.partition.num_communities(), 2);
            assert!(p[0] == p[1] && p[1] == p[2] && p[3] == p[4] && p[4] == p[5] && p[0] != p[3]);
        }
    }

    #[test]
    fn louvain_is_deterministic() {
        let g = two_triangles();
        assert_eq!(louvain(&g, 1.0, 42).unwrap(), louvain(&g, 1.0, 42).unwrap());
    }

    #[test]
    fn isolated_nodes_stay_alone() {
        let g = CueGraph::from_words(&["a", "b", "c"], &[(0, 1, 0.5)]).unwrap();
        let p = louvain(&g, 1.0, 1).unwrap().partition;
        assert_eq!(p.community_of(0), p.community_of(1));
        assert_ne!(p.community_of(2), p.community_of(0));
    }
}
