//! Word-similarity network over seeds and expansion candidates.
//!
//! Nodes are seed surfaces and retrieved candidates; undirected edges are
//! the retrieval pairs weighted by cosine similarity. The network can be
//! clustered ([`louvain`]), ranked ([`pagerank`]) and exported for external
//! viewers.

mod export;
mod louvain;
mod pagerank;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embedding::EmbeddingModel;
use crate::expansion::{CandidatePair, Status};
use crate::lexicon::SeedLexicon;
use crate::scalar::Scalar;

pub use export::{export, read_tsv, write_edge_tsv, write_gexf, write_node_tsv, ExportFormat};
pub use louvain::{louvain, modularity, modularity_with_resolution, LouvainOutcome};
pub use pagerank::{pagerank, PageRankVector};

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("pair references an empty token")]
    EmptyToken,
    #[error("duplicate node {0:?}")]
    DuplicateNode(String),
    #[error("edge endpoint {0} does not exist")]
    UnknownNode(usize),
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("edge weight {0} outside (0, 1]")]
    BadWeight(f64),
    #[error("graph has no edges")]
    NoEdges,
    #[error("graph has no nodes")]
    NoNodes,
    #[error("partition covers {partition} nodes but graph has {graph}")]
    PartitionMismatch { partition: usize, graph: usize },
    #[error("pagerank did not converge within {0} iterations")]
    NotConverged(usize),
    #[error("malformed {file} line {line}: {reason}")]
    Parse {
        file: &'static str,
        line: usize,
        reason: String,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = GraphError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub word: String,
    pub is_seed: bool,
    pub status: Status,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge<T> {
    pub u: usize,
    pub v: usize,
    pub weight: T,
}

/// Undirected weighted graph without self-loops or parallel edges.
#[derive(Debug, Clone, PartialEq)]
pub struct CueGraph<T> {
    nodes: Vec<Node>,
    index: HashMap<String, usize>,
    edges: Vec<Edge<T>>,
}

impl<T: Scalar> CueGraph<T> {
    /// Validates nodes and edges. Parallel edges collapse to the heaviest one;
    /// edges are stored with `u < v`, sorted.
    pub fn new(nodes: Vec<Node>, edges: impl IntoIterator<Item = Edge<T>>) -> Result<Self> {
        let mut index = HashMap::with_capacity(nodes.len());
        for (i, n) in nodes.iter().enumerate() {
            if n.word.is_empty() {
                return Err(GraphError::EmptyToken);
            }
            if index.insert(n.word.clone(), i).is_some() {
                return Err(GraphError::DuplicateNode(n.word.clone()));
            }
        }
        let mut best: BTreeMap<(usize, usize), T> = BTreeMap::new();
        for e in edges {
            for end in [e.u, e.v] {
                if end >= nodes.len() {
                    return Err(GraphError::UnknownNode(end));
                }
            }
            if e.u == e.v {
                return Err(GraphError::SelfLoop(e.u));
            }
            if !(e.weight > T::zero() && e.weight <= T::one()) {
                return Err(GraphError::BadWeight(e.weight.to_f64_lossy()));
            }
            let key = (e.u.min(e.v), e.u.max(e.v));
            best.entry(key)
                .and_modify(|w| *w = w.max(e.weight))
                .or_insert(e.weight);
        }
        let edges = best.into_iter().map(|((u, v), weight)| Edge { u, v, weight }).collect();
        Ok(Self { nodes, index, edges })
    }

    /// Unflagged graph over plain words; handy for analytics on arbitrary networks.
    pub fn from_words<S: AsRef<str>>(words: &[S], edges: &[(usize, usize, T)]) -> Result<Self> {
        let nodes = words
            .iter()
            .map(|w| Node { word: w.as_ref().to_string(), is_seed: false, status: Status::Unrated })
            .collect();
        Self::new(nodes, edges.iter().map(|&(u, v, weight)| Edge { u, v, weight }))
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge<T>] {
        &self.edges
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn node_index(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    /// Neighbor lists `(node, weight)` in edge order.
    pub fn adjacency(&self) -> Vec<Vec<(usize, T)>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            adj[e.u].push((e.v, e.weight));
            adj[e.v].push((e.u, e.weight));
        }
        adj
    }

    /// Weighted degree of every node.
    pub fn strengths(&self) -> Vec<T> {
        let mut deg = vec![T::zero(); self.nodes.len()];
        for e in &self.edges {
            deg[e.u] += e.weight;
            deg[e.v] += e.weight;
        }
        deg
    }

    /// Adds an edge between every pair of nodes whose cosine in `model`
    /// reaches `threshold`. Words missing from the model are ignored.
    pub fn augment_by_similarity(&self, model: &EmbeddingModel, threshold: f32) -> Result<Self> {
        let ids: Vec<Option<usize>> = self.nodes.iter().map(|n| model.resolve(&n.word, true).ok()).collect();
        let mut extra = Vec::new();
        for a in 0..ids.len() {
            for b in a + 1..ids.len() {
                if let (Some(x), Some(y)) = (ids[a], ids[b]) {
                    let s = model.cosine_idx(x, y);
                    if s >= threshold && s > 0.0 {
                        extra.push(Edge { u: a, v: b, weight: T::of(f64::from(s.min(1.0))) });
                    }
                }
            }
        }
        Self::new(self.nodes.clone(), self.edges.iter().copied().chain(extra))
    }
}

/// Builds the seed/candidate network from retrieval pairs.
///
/// Nodes are the folded seed surfaces plus every candidate of `pairs`, in
/// lexicographic order. Seeds are accepted by definition; other nodes take
/// their status from `statuses` (default unrated). Pairs whose seed is not in
/// the lexicon, self-pairs and non-positive similarities produce no edge.
pub fn build<T: Scalar>(
    pairs: &[CandidatePair],
    lexicon: &SeedLexicon,
    statuses: &HashMap<String, Status>,
) -> Result<CueGraph<T>> {
    let seeds = lexicon.folded_surfaces();
    let mut words: BTreeSet<String> = seeds.clone();
    for p in pairs {
        if p.candidate.is_empty() || p.seed.is_empty() {
            return Err(GraphError::EmptyToken);
        }
        words.insert(p.candidate.to_lowercase());
    }
    let nodes: Vec<Node> = words
        .into_iter()
        .map(|word| {
            let is_seed = seeds.contains(&word);
            let status = if is_seed {
                Status::Accepted
            } else {
                statuses.get(&word).copied().unwrap_or_default()
            };
            Node { word, is_seed, status }
        })
        .collect();
    let index: HashMap<&str, usize> = nodes.iter().enumerate().map(|(i, n)| (n.word.as_str(), i)).collect();
    let mut edges = Vec::with_capacity(pairs.len());
    for p in pairs {
        let (Some(&u), Some(&v)) = (
            index.get(p.seed.to_lowercase().as_str()),
            index.get(p.candidate.to_lowercase().as_str()),
        ) else {
            continue;
        };
        if u == v || p.similarity <= 0.0 {
            continue;
        }
        edges.push(Edge { u, v, weight: T::of(f64::from(p.similarity.min(1.0))) });
    }
    CueGraph::new(nodes, edges)
}

/// Community assignment with dense ids starting at 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Partition {
    assignment: Vec<usize>,
}

impl Partition {
    /// Relabels arbitrary community labels densely in order of first appearance.
    pub fn new(labels: &[usize]) -> Self {
        let mut map = HashMap::new();
        let assignment = labels
            .iter()
            .map(|l| {
                let next = map.len();
                *map.entry(*l).or_insert(next)
            })
            .collect();
        Self { assignment }
    }

    pub fn singletons(n: usize) -> Self {
        Self { assignment: (0..n).collect() }
    }

    pub fn single(n: usize) -> Self {
        Self { assignment: vec![0; n] }
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn community_of(&self, node: usize) -> usize {
        self.assignment[node]
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn num_communities(&self) -> usize {
        self.assignment.iter().max().map_or(0, |m| m + 1)
    }

    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_communities()];
        for (node, &c) in self.assignment.iter().enumerate() {
            out[c].push(node);
        }
        out
    }

    fn check(&self, nodes: usize) -> Result<()> {
        if self.assignment.len() != nodes {
            return Err(GraphError::PartitionMismatch { partition: self.assignment.len(), graph: nodes });
        }
        Ok(())
    }
}

/// Node label `"<word> - <a> - <b>"`: `a` marks seeds, `b` marks seeds and
/// accepted words; unrated non-seeds show `?` for `b`.
pub fn format_label(word: &str, is_seed: bool, status: Status) -> String {
    let a = u8::from(is_seed);
    let b = match (is_seed, status) {
        (true, _) | (false, Status::Accepted) => "1",
        (false, Status::Rejected) => "0",
        (false, Status::Unrated) => "?",
    };
    format!("{word} - {a} - {b}")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompositionRow {
    pub community: usize,
    pub n_seed: usize,
    pub n_accepted: usize,
    pub n_rejected: usize,
    pub n_unrated: usize,
}

impl CompositionRow {
    pub fn size(&self) -> usize {
        self.n_seed + self.n_accepted + self.n_rejected + self.n_unrated
    }
}

/// Word-type counts per community, largest community first. Seeds are
/// counted only as seeds.
pub fn composition<T: Scalar>(graph: &CueGraph<T>, partition: &Partition) -> Result<Vec<CompositionRow>> {
    partition.check(graph.num_nodes())?;
    let mut rows: Vec<CompositionRow> = (0..partition.num_communities())
        .map(|community| CompositionRow { community, n_seed: 0, n_accepted: 0, n_rejected: 0, n_unrated: 0 })
        .collect();
    for (i, node) in graph.nodes().iter().enumerate() {
        let row = &mut rows[partition.community_of(i)];
        match (node.is_seed, node.status) {
            (true, _) => row.n_seed += 1,
            (false, Status::Accepted) => row.n_accepted += 1,
            (false, Status::Rejected) => row.n_rejected += 1,
            (false, Status::Unrated) => row.n_unrated += 1,
        }
    }
    rows.sort_by(|a, b| b.size().cmp(&a.size()).then(a.community.cmp(&b.community)));
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(s: &str, c: &str, sim: f32) -> CandidatePair {
        CandidatePair { seed: s.into(), candidate: c.into(), similarity: sim, model: "m".into() }
    }

    #[test]
    fn max_weight_dedupe() {
        let lex = SeedLexicon::from_surfaces(&["s"]).unwrap();
        let g: CueGraph<f64> = build(&[pair("s", "a", 0.7), pair("s", "a", 0.6)], &lex, &HashMap::new()).unwrap();
        assert_eq!(g.num_edges(), 1);
        assert!((g.edges()[0].weight - 0.7).abs() < 1e-7);
    }

    #[test]
    fn no_pairs_gives_seed_nodes_only() {
        let lex = SeedLexicon::from_surfaces(&["s", "t"]).unwrap();
        let g: CueGraph<f64> = build(&[], &lex, &HashMap::new()).unwrap();
        assert_eq!(g.num_nodes(), 2);
        assert_eq!(g.num_edges(), 0);
        assert!(g.nodes().iter().all(|n| n.is_seed && n.status == Status::Accepted));
    }

    #[test]
    fn empty_token_rejected() {
        let lex = SeedLexicon::from_surfaces(&["s"]).unwrap();
        let err = build::<f64>(&[pair("s", "", 0.5)], &lex, &HashMap::new());
        assert!(matches!(err, Err(GraphError::EmptyToken)));
    }

    #[test]
    fn statuses_applied() {
        let lex = SeedLexicon::from_surfaces(&["s"]).unwrap();
        let st: HashMap<String, Status> = [("a".to_string(), Status::Rejected)].into();
        let g: CueGraph<f64> = build(&[pair("s", "a", 0.5), pair("s", "b", 0.4)], &lex, &st).unwrap();
        let status: Vec<_> = g.nodes().iter().map(|n| n.status).collect();
        assert_eq!(status, [Status::Rejected, Status::Unrated, Status::Accepted]);
    }

    #[test]
    fn invalid_edges() {
        assert!(matches!(CueGraph::<f64>::from_words(&["a"], &[(0, 0, 1.0)]), Err(GraphError::SelfLoop(0))));
        assert!(matches!(CueGraph::<f64>::from_words(&["a", "b"], &[(0, 2, 1.0)]), Err(GraphError::UnknownNode(2))));
        assert!(matches!(CueGraph::<f64>::from_words(&["a", "b"], &[(0, 1, 0.0)]), Err(GraphError::BadWeight(_))));
        assert!(matches!(CueGraph::<f64>::from_words(&["a", "a"], &[]), Err(GraphError::DuplicateNode(_))));
    }

    #[test]
    fn labels() {
        assert_eq!(format_label("paradox", true, Status::Accepted), "paradox - 1 - 1");
        assert_eq!(format_label("inaccurate", false, Status::Accepted), "inaccurate - 0 - 1");
        assert_eq!(format_label("erroneous", false, Status::Rejected), "erroneous - 0 - 0");
        assert_eq!(format_label("maybe", false, Status::Unrated), "maybe - 0 - ?");
        assert_eq!(format_label("seed", true, Status::Unrated), "seed - 1 - 1");
    }

    #[test]
    fn composition_single_community() {
        let lex = SeedLexicon::from_surfaces(&["s", "t"]).unwrap();
        let st: HashMap<String, Status> = [("a".to_string(), Status::Accepted)].into();
        let g: CueGraph<f64> = build(&[pair("s", "a", 0.5)], &lex, &st).unwrap();
        let rows = composition(&g, &Partition::single(3)).unwrap();
        assert_eq!(rows, vec![CompositionRow { community: 0, n_seed: 2, n_accepted: 1, n_rejected: 0, n_unrated: 0 }]);
    }

    #[test]
    fn partition_relabels_densely() {
        let p = Partition::new(&[7, 7, 3, 9, 3]);
        assert_eq!(p.assignment(), &[0, 0, 1, 2, 1]);
        assert_eq!(p.num_communities(), 3);
    }
}
