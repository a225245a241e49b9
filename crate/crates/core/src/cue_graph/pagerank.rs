//! Weighted PageRank by power iteration.

use serde::{Deserialize, Serialize};

use super::{CueGraph, GraphError, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PageRankVector<T> {
    pub scores: Vec<T>,
    pub iterations: usize,
}

impl<T: Scalar> PageRankVector<T> {
    pub fn total(&self) -> T {
        self.scores.iter().copied().sum()
    }
}

/// Stationary distribution of the damped random walk over the undirected
/// graph, each edge acting as two arcs with weight-proportional transition
/// probabilities.
///
/// Nodes without edges only receive the teleport share; their own mass is
/// spread uniformly so the vector keeps summing to one. Iterates until the
/// L1 change drops below `tol`.
pub fn pagerank<T: Scalar>(
    graph: &CueGraph<T>,
    damping: T,
    tol: T,
    max_iter: usize,
) -> Result<PageRankVector<T>> {
    let n = graph.num_nodes();
    if n == 0 {
        return Err(GraphError::NoNodes);
    }
    let adj = graph.adjacency();
    let strength = graph.strengths();
    let nf = T::of_usize(n);
    let mut rank = vec![T::one() / nf; n];
    let mut next = vec![T::zero(); n];

    for iteration in 1..=max_iter {
        let dangling: T = (0..n).filter(|&i| strength[i] == T::zero()).map(|i| rank[i]).sum();
        let base = (T::one() - damping) / nf + damping * dangling / nf;
        for (j, slot) in next.iter_mut().enumerate() {
            let inflow: T = adj[j].iter().map(|&(i, w)| rank[i] * w / strength[i]).sum();
            *slot = base + damping * inflow;
        }
        let total: T = next.iter().copied().sum();
        for x in next.iter_mut() {
            *x /= total;
        }
        let change: T = rank.iter().zip(&next).map(|(&a, &b)| (a - b).abs()).sum();
        std::mem::swap(&mut rank, &mut next);
        if change < tol {
            return Ok(PageRankVector { scores: rank, iterations: iteration });
        }
    }
    Err(GraphError::NotConverged(max_iter))
}
