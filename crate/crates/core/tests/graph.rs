mod common;

use cuelex::cue_graph::{louvain, modularity, pagerank, CueGraph, Partition};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;

fn random_edges(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Vec<(usize, usize, f64)> {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v, rng.gen_range(1..=10) as f64 / 10.0));
            }
        }
    }
    edges
}

fn graph(n: usize, edges: &[(usize, usize, f64)]) -> CueGraph<f64> {
    let words: Vec<String> = (0..n).map(|i| format!("w{i:02}")).collect();
    CueGraph::from_words(&words, edges).unwrap()
}

fn final_q(out: &cuelex::cue_graph::LouvainOutcome<f64>) -> f64 {
    *out.level_modularity.last().unwrap()
}

/// Dense blocks joined by a few light bridges.
fn planted(rng: &mut ChaCha8Rng, blocks: &[usize]) -> (usize, Vec<(usize, usize, f64)>) {
    let mut edges = Vec::new();
    let mut start = 0;
    let mut starts = Vec::new();
    for &b in blocks {
        starts.push(start);
        for u in start..start + b {
            for v in u + 1..start + b {
                edges.push((u, v, rng.gen_range(7..=10) as f64 / 10.0));
            }
        }
        start += b;
    }
    for w in starts.windows(2) {
        edges.push((w[0], w[1], 0.1));
    }
    (start, edges)
}

#[test]
fn modularity_matches_dense_definition_on_every_partition() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        let edges = random_edges(&mut rng, 8, 0.4);
        if edges.is_empty() {
            continue;
        }
        let g = graph(8, &edges);
        for labels in all_partitions(8) {
            let got = modularity(&g, &Partition::new(&labels)).unwrap();
            let want = dense_modularity(8, &edges, &labels);
            assert!((got - want).abs() < 1e-12, "{labels:?}: {got} vs {want}");
        }
    }
}

#[test]
fn louvain_never_beats_exhaustive_optimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for trial in 0..20 {
        let edges = random_edges(&mut rng, 8, 0.35);
        if edges.is_empty() {
            continue;
        }
        let best = all_partitions(8)
            .iter()
            .map(|l| dense_modularity(8, &edges, l))
            .fold(f64::NEG_INFINITY, f64::max);
        let out = louvain(&graph(8, &edges), 1.0, trial).unwrap();
        let q = dense_modularity(8, &edges, out.partition.assignment());
        assert!(q <= best + 1e-12);
        assert!((q - final_q(&out)).abs() < 1e-9);
    }
}

#[test]
fn louvain_finds_planted_optimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for blocks in [[3usize, 3, 2], [4, 4, 0], [2, 3, 3]] {
        let blocks: Vec<usize> = blocks.into_iter().filter(|&b| b > 0).collect();
        let (n, edges) = planted(&mut rng, &blocks);
        let best = all_partitions(n)
            .iter()
            .map(|l| dense_modularity(n, &edges, l))
            .fold(f64::NEG_INFINITY, f64::max);
        for seed in 0..5 {
            let out = louvain(&graph(n, &edges), 1.0, seed).unwrap();
            assert!((final_q(&out) - best).abs() < 1e-9, "{blocks:?} seed {seed}");
            assert_eq!(out.partition.num_communities(), blocks.len());
        }
    }
}

#[test]
fn two_disjoint_triangles_give_one_half() {
    let edges = [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0), (3, 4, 1.0), (4, 5, 1.0), (3, 5, 1.0)];
    let out = louvain(&graph(6, &edges), 1.0, 0).unwrap();
    assert_eq!(out.partition.num_communities(), 2);
    assert!((final_q(&out) - 0.5).abs() < 1e-12);
}

#[test]
fn three_path_pagerank() {
    let edges = [(0, 1, 1.0), (1, 2, 1.0)];
    let r = pagerank(&graph(3, &edges), 0.85, 1e-12, 1000).unwrap();
    let oracle = dense_pagerank(3, &edges, 0.85);
    for (got, want) in r.scores.iter().zip([0.2568, 0.4865, 0.2568]) {
        assert!((got - want).abs() < 1e-4);
    }
    for (got, want) in r.scores.iter().zip(&oracle) {
        assert!((got - want).abs() < 1e-6);
    }
}

#[test]
fn pagerank_matches_dense_oracle_with_isolated_nodes() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..10 {
        let n = rng.gen_range(3..25);
        let edges = random_edges(&mut rng, n, 0.15);
        let r = pagerank(&graph(n, &edges), 0.85, 1e-13, 5000).unwrap();
        let oracle = dense_pagerank(n, &edges, 0.85);
        for (got, want) in r.scores.iter().zip(&oracle) {
            assert!((got - want).abs() < 1e-6);
        }
    }
}

fn components(n: usize, edges: &[(usize, usize, f64)]) -> Vec<usize> {
    let mut comp: Vec<usize> = (0..n).collect();
    fn find(c: &mut Vec<usize>, x: usize) -> usize {
        if c[x] != x {
            let r = find(c, c[x]);
            c[x] = r;
        }
        c[x]
    }
    for &(u, v, _) in edges {
        let (a, b) = (find(&mut comp, u), find(&mut comp, v));
        comp[a] = b;
    }
    (0..n).map(|x| find(&mut comp, x)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn louvain_keeps_components_apart(seed in any::<u64>(), n in 4usize..30) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let edges = random_edges(&mut rng, n, 0.12);
        prop_assume!(!edges.is_empty());
        let out = louvain(&graph(n, &edges), 1.0, seed).unwrap();
        let comp = components(n, &edges);
        for u in 0..n {
            for v in 0..n {
                if out.partition.community_of(u) == out.partition.community_of(v) {
                    prop_assert_eq!(comp[u], comp[v]);
                }
            }
        }
        let q = dense_modularity(n, &edges, out.partition.assignment());
        prop_assert!((q - final_q(&out)).abs() < 1e-9);
        prop_assert!(final_q(&out) >= dense_modularity(n, &edges, &vec![0; n]) - 1e-12);
    }

    #[test]
    fn pagerank_is_a_distribution(seed in any::<u64>(), n in 1usize..40, damping in 0.5f64..0.95) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let edges = random_edges(&mut rng, n, 0.2);
        let r = pagerank(&graph(n, &edges), damping, 1e-12, 10_000).unwrap();
        let total: f64 = r.scores.iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-9);
        prop_assert!(r.scores.iter().all(|&s| s > 0.0));
    }

    #[test]
    fn louvain_is_deterministic_per_seed(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let edges = random_edges(&mut rng, 20, 0.2);
        prop_assume!(!edges.is_empty());
        let g = graph(20, &edges);
        let a = louvain(&g, 1.0, seed).unwrap();
        let b = louvain(&g, 1.0, seed).unwrap();
        prop_assert_eq!(a.partition.assignment(), b.partition.assignment());
    }
}
