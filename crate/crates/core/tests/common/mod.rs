//! Graph fixtures and proptest strategies shared by the integration tests.
#![allow(dead_code)]

use nibble::{SparseMass, WeightedGraph};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn complete(n: usize) -> WeightedGraph {
    let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j, 1.0)));
    WeightedGraph::from_edges(n, edges).unwrap()
}

pub fn path(n: usize) -> WeightedGraph {
    WeightedGraph::from_edges(n, (1..n).map(|i| (i - 1, i, 1.0))).unwrap()
}

pub fn cycle(n: usize) -> WeightedGraph {
    WeightedGraph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n, 1.0))).unwrap()
}

/// Two `k`-cliques `0..k` and `k..2k` joined by the edge `(k - 1, k)`.
pub fn two_cliques(k: usize) -> WeightedGraph {
    let mut edges = Vec::new();
    for base in [0, k] {
        for i in 0..k {
            for j in i + 1..k {
                edges.push((base + i, base + j, 1.0));
            }
        }
    }
    edges.push((k - 1, k, 1.0));
    WeightedGraph::from_edges(2 * k, edges).unwrap()
}

/// G(n, p) with unit weights plus a spanning path, so it is connected.
pub fn connected_gnp(n: usize, p: f64, seed: u64) -> WeightedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(usize, usize, f64)> = (1..n).map(|i| (i - 1, i, 1.0)).collect();
    for i in 0..n {
        for j in i + 2..n {
            if rng.random::<f64>() < p {
                edges.push((i, j, 1.0));
            }
        }
    }
    WeightedGraph::from_edges(n, edges).unwrap()
}

/// G(n, p) with unit weights; may be disconnected or have isolated vertices.
pub fn gnp(n: usize, p: f64, seed: u64) -> WeightedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < p {
                edges.push((i, j, 1.0));
            }
        }
    }
    WeightedGraph::from_edges(n, edges).unwrap()
}

/// Connected weighted graph: a random spanning tree plus random extra
/// edges, weights in `[0.5, 3)`.
pub fn arb_connected_graph(max_n: usize) -> impl Strategy<Value = WeightedGraph> {
    (2..=max_n, any::<u64>(), 0.0f64..0.5).prop_map(|(n, seed, p)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut edges = Vec::new();
        for v in 1..n {
            let u = rng.random_range(0..v);
            edges.push((u, v, rng.random_range(0.5..3.0)));
        }
        for i in 0..n {
            for j in i + 1..n {
                if rng.random::<f64>() < p {
                    edges.push((i, j, rng.random_range(0.5..3.0)));
                }
            }
        }
        WeightedGraph::from_edges(n, edges).unwrap()
    })
}

/// Random nonnegative mass on the non-isolated vertices of `graph`,
/// normalized to total mass 1.
pub fn random_mass(graph: &WeightedGraph, seed: u64, density: f64) -> SparseMass {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = graph.vertex_count();
    let mut entries: Vec<(usize, f64)> = Vec::new();
    for u in 0..n {
        if graph.degree(u) > 0.0 && rng.random::<f64>() < density {
            entries.push((u, rng.random::<f64>() + 1e-3));
        }
    }
    if entries.is_empty() {
        let u = (0..n).find(|&u| graph.degree(u) > 0.0).unwrap();
        entries.push((u, 1.0));
    }
    let total: f64 = entries.iter().map(|e| e.1).sum();
    SparseMass::from_entries(entries.into_iter().map(|(u, m)| (u, m / total))).unwrap()
}
