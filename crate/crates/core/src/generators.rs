//! Reproducible graph constructions: Watts–Strogatz rings, the three-block
//! planted benchmark, the two-chain hard instance, plain chains and k-NN
//! similarity graphs.

use std::collections::{BTreeMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{VertexSet, WeightedGraph};

/// A generated graph with its planted set and per-vertex labels.
#[derive(Debug, Clone)]
pub struct GeneratedGraph {
    pub graph: WeightedGraph,
    pub truth: VertexSet,
    pub labels: Vec<String>,
}

/// Mixes a base seed with stream indices (splitmix64 finalizer per word), so
/// every run of a sweep gets an independent, schedule-free RNG stream.
pub fn stream_seed(seed: u64, indices: &[u64]) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    indices.iter().fold(mix(seed), |acc, &i| mix(acc ^ mix(i)))
}

fn ring_lattice_edges<R: Rng>(n: usize, k: usize, beta: f64, rng: &mut R) -> Result<Vec<(usize, usize)>> {
    if !k.is_multiple_of(2) || k >= n {
        return Err(Error::input(format!(
            "Watts-Strogatz needs even K < n, got K = {k}, n = {n}"
        )));
    }
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::input(format!("beta must lie in [0, 1], got {beta}")));
    }
    let key = |u: usize, v: usize| (u.min(v), u.max(v));
    let mut present: HashSet<(usize, usize)> = HashSet::with_capacity(n * k / 2);
    let mut degree = vec![k; n];
    for j in 1..=k / 2 {
        for u in 0..n {
            present.insert(key(u, (u + j) % n));
        }
    }
    // one endpoint of each lattice edge is rewired, lattice distance by
    // distance, in vertex order
    for j in 1..=k / 2 {
        for u in 0..n {
            let v = (u + j) % n;
            if !present.contains(&key(u, v)) || rng.random::<f64>() >= beta {
                continue;
            }
            if degree[u] >= n - 1 {
                continue;
            }
            let mut w = rng.random_range(0..n);
            while w == u || present.contains(&key(u, w)) {
                w = rng.random_range(0..n);
            }
            present.remove(&key(u, v));
            present.insert(key(u, w));
            degree[v] -= 1;
            degree[w] += 1;
        }
    }
    let mut edges: Vec<(usize, usize)> = present.into_iter().collect();
    edges.sort_unstable();
    Ok(edges)
}

/// Ring lattice on `n` vertices with `k/2` neighbors per side, each edge
/// rewired at one endpoint with probability `beta`.
pub fn watts_strogatz(n: usize, k: usize, beta: f64, rng_seed: u64) -> Result<WeightedGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let edges = ring_lattice_edges(n, k, beta, &mut rng)?;
    WeightedGraph::from_edges(n, edges.into_iter().map(|(u, v)| (u, v, 1.0)))
}

/// Planted three-block benchmark: a Watts–Strogatz block `A`, and
/// Erdős–Rényi blocks `B` and `C`, with independent cross edges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Experiment1Config {
    pub size_a: usize,
    pub size_b: usize,
    pub size_c: usize,
    pub ws_mean_degree: usize,
    pub beta: f64,
    pub p_bb: f64,
    pub p_cc: f64,
    pub p_ab: f64,
    pub p_ac: f64,
    pub p_bc: f64,
    pub rng_seed: u64,
}

impl Experiment1Config {
    pub fn new(beta: f64, rng_seed: u64) -> Self {
        Self {
            size_a: 300,
            size_b: 20,
            size_c: 550,
            ws_mean_degree: 60,
            beta,
            p_bb: 0.3,
            p_cc: 0.02,
            p_ab: 0.001,
            p_ac: 0.002,
            p_bc: 0.002,
            rng_seed,
        }
    }
}

/// Vertices `0..|A|` form `A`, then `B`, then `C`.
pub fn experiment1_graph(config: &Experiment1Config) -> Result<GeneratedGraph> {
    for p in [config.p_bb, config.p_cc, config.p_ab, config.p_ac, config.p_bc] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::input(format!("edge probability {p} outside [0, 1]")));
        }
    }
    let (na, nb, nc) = (config.size_a, config.size_b, config.size_c);
    let n = na + nb + nc;
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let mut edges: Vec<(usize, usize, f64)> = ring_lattice_edges(na, config.ws_mean_degree, config.beta, &mut rng)?
        .into_iter()
        .map(|(u, v)| (u, v, 1.0))
        .collect();
    let a = 0..na;
    let b = na..na + nb;
    let c = na + nb..n;
    let mut within = |r: std::ops::Range<usize>, p: f64, rng: &mut ChaCha8Rng| {
        for u in r.clone() {
            for v in u + 1..r.end {
                if rng.random::<f64>() < p {
                    edges.push((u, v, 1.0));
                }
            }
        }
    };
    within(b.clone(), config.p_bb, &mut rng);
    within(c.clone(), config.p_cc, &mut rng);
    for (r1, r2, p) in [
        (a.clone(), b.clone(), config.p_ab),
        (a.clone(), c.clone(), config.p_ac),
        (b.clone(), c.clone(), config.p_bc),
    ] {
        for u in r1 {
            for v in r2.clone() {
                if rng.random::<f64>() < p {
                    edges.push((u, v, 1.0));
                }
            }
        }
    }
    let graph = WeightedGraph::from_edges(n, edges)?;
    let truth = VertexSet::new(&graph, a)?;
    let labels = (0..n)
        .map(|u| {
            if u < na {
                "A"
            } else if u < na + nb {
                "B"
            } else {
                "C"
            }
            .to_string()
        })
        .collect();
    Ok(GeneratedGraph { graph, truth, labels })
}

/// Two-chain hard instance: a top chain `a .. b .. c` of `ell + 1` vertices,
/// a bottom chain `d .. e`, and a bridge between the top midpoint `b` and `d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HardInstanceSpec {
    pub ell: usize,
    /// Volume scale: the top chain has volume about `2n`.
    pub n: f64,
    /// Target conductance of the top chain.
    pub phi: f64,
    pub c0: f64,
}

/// Edge multiplicities after rounding.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Multiplicities {
    pub top_edge: f64,
    pub bridge: f64,
    pub bottom_edge: f64,
    pub bottom_length: usize,
    /// Largest relative rounding change among the four quantities.
    pub drift: f64,
}

/// Largest tolerated relative rounding drift.
pub const MAX_ROUNDING_DRIFT: f64 = 0.01;

impl HardInstanceSpec {
    /// Rounds `n/ell`, `phi n`, `phi n ell / c0` and `c0 / (phi ell)` to
    /// integers at least 1.
    pub fn resolve(&self) -> Result<Multiplicities> {
        if self.ell < 4 || !self.ell.is_multiple_of(2) {
            return Err(Error::input(format!("ell must be even and >= 4, got {}", self.ell)));
        }
        for (name, x) in [("n", self.n), ("phi", self.phi), ("c0", self.c0)] {
            if !(x > 0.0 && x.is_finite()) {
                return Err(Error::input(format!("{name} must be positive, got {x}")));
            }
        }
        let ell = self.ell as f64;
        let raw = [
            self.n / ell,
            self.phi * self.n,
            self.phi * self.n * ell / self.c0,
            self.c0 / (self.phi * ell),
        ];
        let rounded = raw.map(|x| x.round().max(1.0));
        let drift = raw
            .iter()
            .zip(&rounded)
            .map(|(x, r)| (r - x).abs() / x)
            .fold(0.0, f64::max);
        if drift > MAX_ROUNDING_DRIFT {
            let length = rounded[3];
            return Err(Error::input(format!(
                "rounding drift {drift:.3e} exceeds {MAX_ROUNDING_DRIFT}; try a larger n \
                 (e.g. n = {:e}) or phi = {:e} for an integral bottom chain of {length} edges",
                self.n * 100.0,
                self.c0 / (ell * length)
            )));
        }
        Ok(Multiplicities {
            top_edge: rounded[0],
            bridge: rounded[1],
            bottom_edge: rounded[2],
            bottom_length: rounded[3] as usize,
            drift,
        })
    }
}

/// The hard instance together with its labeled vertices.
#[derive(Debug, Clone)]
pub struct HardInstance {
    pub generated: GeneratedGraph,
    pub ell: usize,
    pub multiplicities: Multiplicities,
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub d: usize,
    pub e: usize,
}

pub fn hard_instance(spec: &HardInstanceSpec) -> Result<HardInstance> {
    let m = spec.resolve()?;
    hard_instance_from(spec.ell, m)
}

/// Builds the two-chain graph from explicit multiplicities. A zero bridge
/// leaves the bottom chain disconnected.
pub fn hard_instance_from(ell: usize, m: Multiplicities) -> Result<HardInstance> {
    if ell < 2 || !ell.is_multiple_of(2) || m.bottom_length == 0 {
        return Err(Error::input("ell must be even and the bottom chain nonempty"));
    }
    let (a, b, c) = (0, ell / 2, ell);
    let d = ell + 1;
    let e = d + m.bottom_length;
    let n = e + 1;
    let mut edges = Vec::with_capacity(ell + m.bottom_length + 1);
    edges.extend((0..ell).map(|i| (i, i + 1, m.top_edge)));
    edges.extend((d..e).map(|i| (i, i + 1, m.bottom_edge)));
    edges.push((b, d, m.bridge));
    let graph = WeightedGraph::from_edges(n, edges)?;
    let truth = VertexSet::new(&graph, 0..=ell)?;
    let labels = (0..n)
        .map(|u| {
            match u {
                _ if u == a => "a",
                _ if u == b => "b",
                _ if u == c => "c",
                _ if u == d => "d",
                _ if u == e => "e",
                _ if u < d => "top",
                _ => "bottom",
            }
            .to_string()
        })
        .collect();
    Ok(HardInstance {
        generated: GeneratedGraph { graph, truth, labels },
        ell,
        multiplicities: m,
        a,
        b,
        c,
        d,
        e,
    })
}

/// Unit-weight path on `ell + 1` vertices.
pub fn chain(ell: usize) -> Result<WeightedGraph> {
    if ell == 0 {
        return Err(Error::input("chain length must be at least 1"));
    }
    WeightedGraph::from_edges(ell + 1, (0..ell).map(|i| (i, i + 1, 1.0)))
}

/// Weighted k-NN graph: `i ~ j` when either is among the other's `k`
/// nearest points (all points tied with the k-th distance included), with
/// weight `exp(-d_ij^2 / sigma)`, `sigma = sigma_factor * r` and `r` the
/// mean squared distance to the k-th neighbor. Weights that underflow to
/// zero drop the edge.
pub fn knn_graph(points: &[Vec<f64>], k: usize, sigma_factor: f64) -> Result<WeightedGraph> {
    let n = points.len();
    if k == 0 || n < k + 1 {
        return Err(Error::input(format!(
            "k-NN needs k >= 1 and at least k + 1 points, got k = {k}, {n} points"
        )));
    }
    let dim = points[0].len();
    if let Some(i) = points.iter().position(|p| p.len() != dim) {
        return Err(Error::input(format!(
            "point {i} has dimension {} instead of {dim}",
            points[i].len()
        )));
    }
    if !(sigma_factor > 0.0 && sigma_factor.is_finite()) {
        return Err(Error::input(format!(
            "sigma factor must be positive, got {sigma_factor}"
        )));
    }
    let sq = |i: usize, j: usize| -> f64 { points[i].iter().zip(&points[j]).map(|(x, y)| (x - y) * (x - y)).sum() };
    let mut pairs: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut kth_sum = 0.0;
    let mut dist: Vec<(f64, usize)> = Vec::with_capacity(n - 1);
    for i in 0..n {
        dist.clear();
        dist.extend((0..n).filter(|&j| j != i).map(|j| (sq(i, j), j)));
        let (_, kth, _) = dist.select_nth_unstable_by(k - 1, |a, b| a.0.total_cmp(&b.0));
        let kth = kth.0;
        kth_sum += kth;
        for &(d2, j) in dist.iter().filter(|(d2, _)| *d2 <= kth) {
            pairs.insert((i.min(j), i.max(j)), d2);
        }
    }
    let r = kth_sum / n as f64;
    if r <= 0.0 {
        return Err(Error::domain("mean k-th neighbor distance is zero"));
    }
    let sigma = sigma_factor * r;
    WeightedGraph::from_edges(n, pairs.into_iter().map(|((i, j), d2)| (i, j, (-d2 / sigma).exp())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_without_rewiring() {
        let g = watts_strogatz(30, 6, 0.0, 1).unwrap();
        assert!(g.degrees().iter().all(|&d| d == 6.0));
        assert_eq!(g.edge_count(), 90);
        assert!(g.is_connected());
        assert_eq!(g.weight(0, 3), 1.0);
        assert_eq!(g.weight(0, 4), 0.0);
    }

    #[test]
    fn rewiring_keeps_edge_count() {
        for seed in 0..5 {
            let g = watts_strogatz(300, 60, 1.0, seed).unwrap();
            assert_eq!(g.edge_count(), 9000);
        }
        assert_eq!(
            watts_strogatz(300, 60, 0.5, 7).unwrap(),
            watts_strogatz(300, 60, 0.5, 7).unwrap()
        );
        assert!(watts_strogatz(10, 3, 0.5, 0).is_err());
        assert!(watts_strogatz(10, 10, 0.5, 0).is_err());
        assert!(watts_strogatz(10, 4, 1.5, 0).is_err());
    }

    #[test]
    fn experiment1_layout() {
        let g = experiment1_graph(&Experiment1Config::new(0.25, 3)).unwrap();
        assert_eq!(g.graph.vertex_count(), 870);
        assert_eq!(g.truth.len(), 300);
        assert_eq!(g.labels[299], "A");
        assert_eq!(g.labels[300], "B");
        assert_eq!(g.labels[320], "C");
    }

    #[test]
    fn hard_instance_volumes() {
        let spec = HardInstanceSpec {
            ell: 10,
            n: 1000.0,
            phi: 0.01,
            c0: 2.0,
        };
        let h = hard_instance(&spec).unwrap();
        let g = &h.generated.graph;
        let (n, phi) = (spec.n, spec.phi);
        assert_eq!(g.volume(&h.generated.truth).unwrap(), 2.0 * n + phi * n);
        assert_eq!(g.total_volume(), 4.0 * n + 2.0 * phi * n);
        assert_eq!(g.degree(h.b), 2.0 * n / 10.0 + phi * n);
        assert_eq!((h.a, h.b, h.c, h.d), (0, 5, 10, 11));
        assert_eq!(h.e, 11 + 20);
        assert_eq!(h.generated.labels[h.d], "d");
        assert_eq!(h.multiplicities.drift, 0.0);
    }

    #[test]
    fn hard_instance_rejects_drift() {
        let spec = HardInstanceSpec {
            ell: 10,
            n: 1000.0,
            phi: 0.0013,
            c0: 2.0,
        };
        assert!(matches!(hard_instance(&spec), Err(Error::Input(_))));
        let odd = HardInstanceSpec { ell: 9, ..spec };
        assert!(odd.resolve().is_err());
    }

    #[test]
    fn chains() {
        let g = chain(1).unwrap();
        assert_eq!(g.edge_count(), 1);
        let g = chain(5).unwrap();
        assert_eq!(g.degrees(), &[1.0, 2.0, 2.0, 2.0, 2.0, 1.0]);
        assert_eq!(g.total_volume(), 10.0);
        assert!(chain(0).is_err());
    }

    #[test]
    fn knn_small() {
        let pts = vec![vec![0.0], vec![0.0], vec![1.0], vec![3.0]];
        let g = knn_graph(&pts, 1, 0.2).unwrap();
        // 1-NN: 0<->1 (coincident), 2 -> 0 and 1 tied at distance 1, 3 -> 2
        assert_eq!(g.weight(0, 1), 1.0);
        assert!(g.weight(0, 2) > 0.0 && g.weight(1, 2) > 0.0);
        assert_eq!(g.weight(2, 3), g.weight(3, 2));
        assert_eq!(g.weight(0, 3), 0.0);
        // r = (0 + 0 + 1 + 4) / 4
        let sigma: f64 = 0.2 * 1.25;
        assert!((g.weight(2, 3) - (-4.0 / sigma).exp()).abs() < 1e-18);
        assert!(knn_graph(&vec![vec![1.0]; 4], 1, 0.2).is_err());
        assert!(knn_graph(&pts, 4, 0.2).is_err());
    }

    #[test]
    fn stream_seeds_differ() {
        let a = stream_seed(1, &[0, 0]);
        assert_ne!(a, stream_seed(1, &[0, 1]));
        assert_ne!(a, stream_seed(1, &[1, 0]));
        assert_ne!(a, stream_seed(2, &[0, 0]));
        assert_eq!(a, stream_seed(1, &[0, 0]));
    }
}
