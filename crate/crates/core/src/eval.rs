//! Cluster-quality metrics and the planted-benchmark experiments.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::{experiment1_graph, stream_seed, Experiment1Config};
use crate::graph::{VertexSet, WeightedGraph};
use crate::nibble::{page_rank_nibble, NibbleParams};
use crate::pagerank::PushStats;

/// Two-sided 94% standard normal quantile.
pub const Z_94: f64 = 1.880_793_608_151_251;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterReport {
    pub size_s: usize,
    pub size_a: usize,
    pub intersection: usize,
    /// `None` when `S` is empty or all of `V`.
    pub phi_s: Option<f64>,
    pub phi_a: f64,
    pub conductance_ratio: Option<f64>,
    /// `|A n S| / |S|`; `None` for empty `S`.
    pub precision: Option<f64>,
    pub recall: f64,
    /// `vol(S \ A) / vol(A)`
    pub vol_out: f64,
    /// `vol(A \ S) / vol(A)`
    pub vol_miss: f64,
    /// `1 - |A xor S| / |V|`
    pub accuracy: f64,
    pub stats: Option<PushStats>,
}

pub fn cluster_metrics(graph: &WeightedGraph, s: &VertexSet, a: &VertexSet) -> Result<ClusterReport> {
    if a.is_empty() {
        return Err(Error::input("ground-truth set is empty"));
    }
    let phi_a = graph.conductance(a)?;
    let phi_s = if s.is_empty() || s.len() == graph.vertex_count() {
        None
    } else {
        Some(graph.conductance(s)?)
    };
    graph.volume(s)?;
    let inter = s.intersection_len(a);
    let mut vol_s_minus_a = 0.0;
    for &u in s.ids() {
        if !a.contains(u) {
            vol_s_minus_a += graph.degree(u);
        }
    }
    let mut vol_a_minus_s = 0.0;
    for &u in a.ids() {
        if !s.contains(u) {
            vol_a_minus_s += graph.degree(u);
        }
    }
    let sym_diff = s.len() + a.len() - 2 * inter;
    Ok(ClusterReport {
        size_s: s.len(),
        size_a: a.len(),
        intersection: inter,
        phi_s,
        phi_a,
        conductance_ratio: phi_s.map(|p| p / phi_a),
        precision: (!s.is_empty()).then(|| inter as f64 / s.len() as f64),
        recall: inter as f64 / a.len() as f64,
        vol_out: vol_s_minus_a / a.volume(),
        vol_miss: vol_a_minus_s / a.volume(),
        accuracy: 1.0 - sym_diff as f64 / graph.vertex_count() as f64,
        stats: None,
    })
}

/// `k` points spaced evenly in log scale over `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, k: usize) -> Vec<f64> {
    if k == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..k)
        .map(|i| (a + (b - a) * i as f64 / (k - 1) as f64).exp())
        .collect()
}

/// Mean and the half-width of the two-sided 94% normal confidence
/// interval; `None` below two samples.
pub fn mean_ci94(xs: &[f64]) -> Option<(f64, f64)> {
    if xs.len() < 2 {
        return None;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Some((mean, Z_94 * (var / n).sqrt()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaSweepConfig {
    pub betas: Vec<f64>,
    pub runs_per_point: usize,
    /// Teleport probabilities tried per run; the lowest-conductance output wins.
    pub alpha_grid: Vec<f64>,
    /// `vol0 = vol0_factor * vol(A)`.
    pub vol0_factor: f64,
    /// Defaults to `1 / (10 vol0)`.
    pub epsilon: Option<f64>,
    pub c_min: f64,
    pub c_max: f64,
    pub rng_seed: u64,
}

impl BetaSweepConfig {
    pub fn new(betas: Vec<f64>, runs_per_point: usize, rng_seed: u64) -> Self {
        Self {
            betas,
            runs_per_point,
            alpha_grid: log_grid(0.001, 0.3, 12),
            vol0_factor: 1.0,
            epsilon: None,
            c_min: 1.0 / 16.0,
            c_max: 0.5,
            rng_seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BetaRunRecord {
    pub beta: f64,
    pub beta_index: usize,
    pub run: usize,
    pub graph_seed: u64,
    pub seed_vertex: usize,
    pub phi_a: f64,
    pub best_alpha: Option<f64>,
    pub report: Option<ClusterReport>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BetaRow {
    pub beta: f64,
    pub runs: usize,
    pub failures: usize,
    pub mean_ratio: Option<f64>,
    pub ci_ratio: Option<f64>,
    pub mean_accuracy: Option<f64>,
    pub ci_accuracy: Option<f64>,
    pub mean_phi_a: Option<f64>,
    pub ci_phi_a: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BetaSweepTable {
    pub config: BetaSweepConfig,
    pub rows: Vec<BetaRow>,
    pub runs: Vec<BetaRunRecord>,
}

/// Best (lowest conductance) nibble output over a grid of teleport
/// probabilities, or the last error if every value fails.
pub fn best_over_alphas(
    graph: &WeightedGraph,
    base: &NibbleParams,
    alphas: &[f64],
) -> Result<(f64, crate::nibble::NibbleResult)> {
    let mut best: Option<(f64, crate::nibble::NibbleResult)> = None;
    let mut last_err = None;
    for &alpha in alphas {
        let mut p = base.clone();
        p.alpha_override = Some(alpha);
        match page_rank_nibble(graph, &p) {
            Ok(res) => {
                if best.as_ref().is_none_or(|(_, b)| res.phi < b.phi) {
                    best = Some((alpha, res));
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    best.ok_or_else(|| last_err.unwrap_or_else(|| Error::input("empty alpha grid")))
}

/// For each beta, `runs_per_point` fresh planted graphs, each clustered from
/// a uniform seed in `A` with the best teleport probability of the grid.
pub fn beta_sweep_experiment(config: &BetaSweepConfig) -> Result<BetaSweepTable> {
    if config.runs_per_point < 2 {
        return Err(Error::input("beta sweep needs at least two runs per point"));
    }
    if config.alpha_grid.is_empty() {
        return Err(Error::input("alpha grid is empty"));
    }
    let mut rows = Vec::with_capacity(config.betas.len());
    let mut runs = Vec::new();
    for (bi, &beta) in config.betas.iter().enumerate() {
        let mut ratios = Vec::new();
        let mut accs = Vec::new();
        let mut phis = Vec::new();
        let mut failures = 0;
        for run in 0..config.runs_per_point {
            let graph_seed = stream_seed(config.rng_seed, &[bi as u64, run as u64, 0]);
            let gen = experiment1_graph(&Experiment1Config::new(beta, graph_seed))?;
            let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(config.rng_seed, &[bi as u64, run as u64, 1]));
            let seed_vertex = gen.truth.ids()[rng.random_range(0..gen.truth.len())];
            let phi_a = gen.graph.conductance(&gen.truth)?;
            phis.push(phi_a);
            let vol0 = config.vol0_factor * gen.truth.volume();
            let base = NibbleParams {
                epsilon_override: config.epsilon,
                c_min: config.c_min,
                c_max: config.c_max,
                ..NibbleParams::new(seed_vertex, 1.0, vol0)
            };
            let mut record = BetaRunRecord {
                beta,
                beta_index: bi,
                run,
                graph_seed,
                seed_vertex,
                phi_a,
                best_alpha: None,
                report: None,
                error: None,
            };
            match best_over_alphas(&gen.graph, &base, &config.alpha_grid) {
                Ok((alpha, res)) => {
                    let mut report = cluster_metrics(&gen.graph, &res.output_set, &gen.truth)?;
                    report.stats = Some(res.stats);
                    if let Some(r) = report.conductance_ratio {
                        ratios.push(r);
                    }
                    accs.push(report.accuracy);
                    record.best_alpha = Some(alpha);
                    record.report = Some(report);
                }
                Err(e) => {
                    failures += 1;
                    record.error = Some(e.to_string());
                }
            }
            log::debug!(
                "beta {beta} run {run}: {:?}",
                record.report.as_ref().map(|r| r.accuracy)
            );
            runs.push(record);
        }
        let r = mean_ci94(&ratios);
        let a = mean_ci94(&accs);
        let p = mean_ci94(&phis);
        rows.push(BetaRow {
            beta,
            runs: config.runs_per_point,
            failures,
            mean_ratio: r.map(|x| x.0),
            ci_ratio: r.map(|x| x.1),
            mean_accuracy: a.map(|x| x.0),
            ci_accuracy: a.map(|x| x.1),
            mean_phi_a: p.map(|x| x.0),
            ci_phi_a: p.map(|x| x.1),
        });
    }
    Ok(BetaSweepTable {
        config: config.clone(),
        rows,
        runs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeedThresholds {
    pub vol_out: f64,
    pub vol_miss: f64,
    pub phi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedSweepConfig {
    /// Template; the seed field is replaced per run.
    pub params: NibbleParams,
    pub thresholds: SeedThresholds,
    /// Sets up to this size are swept exhaustively.
    pub max_exhaustive: usize,
    /// Volume-weighted sample size for larger sets.
    pub sample_size: usize,
    pub rng_seed: u64,
}

impl SeedSweepConfig {
    pub fn new(params: NibbleParams, thresholds: SeedThresholds) -> Self {
        Self {
            params,
            thresholds,
            max_exhaustive: 1000,
            sample_size: 200,
            rng_seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeedOutcome {
    pub seed: usize,
    pub good: bool,
    pub report: Option<ClusterReport>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeedSweepReport {
    pub config: SeedSweepConfig,
    /// Degree-weighted fraction of seeds whose output meets every threshold.
    pub fraction: f64,
    pub exhaustive: bool,
    pub outcomes: Vec<SeedOutcome>,
}

/// Runs the nibble from every vertex of `a` (or a volume-weighted sample)
/// and reports the degree-weighted fraction of good seeds.
pub fn seed_sweep(graph: &WeightedGraph, a: &VertexSet, config: &SeedSweepConfig) -> Result<SeedSweepReport> {
    if a.is_empty() {
        return Err(Error::input("seed sweep over an empty set"));
    }
    graph.volume(a)?;
    let exhaustive = a.len() <= config.max_exhaustive;
    let seeds: Vec<usize> = if exhaustive {
        a.ids().to_vec()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
        let total = a.volume();
        (0..config.sample_size)
            .map(|_| {
                let mut x = rng.random::<f64>() * total;
                for &u in a.ids() {
                    x -= graph.degree(u);
                    if x < 0.0 {
                        return u;
                    }
                }
                *a.ids().last().unwrap()
            })
            .collect()
    };
    let t = config.thresholds;
    let (mut good_weight, mut total_weight) = (0.0, 0.0);
    let mut outcomes = Vec::with_capacity(seeds.len());
    for seed in seeds {
        // sampled seeds already carry the volume weighting
        let w = if exhaustive { graph.degree(seed) } else { 1.0 };
        total_weight += w;
        let mut params = config.params.clone();
        params.seed = seed;
        let outcome = match page_rank_nibble(graph, &params) {
            Ok(res) => {
                let mut report = cluster_metrics(graph, &res.output_set, a)?;
                report.stats = Some(res.stats);
                let good = report.vol_out <= t.vol_out
                    && report.vol_miss <= t.vol_miss
                    && report.phi_s.is_some_and(|p| p <= t.phi);
                SeedOutcome {
                    seed,
                    good,
                    report: Some(report),
                    error: None,
                }
            }
            Err(Error::NoCandidateCut { .. }) | Err(Error::Domain(_)) => SeedOutcome {
                seed,
                good: false,
                report: None,
                error: Some("no cut".into()),
            },
            Err(e) => return Err(e),
        };
        if outcome.good {
            good_weight += w;
        }
        outcomes.push(outcome);
    }
    Ok(SeedSweepReport {
        config: config.clone(),
        fraction: if total_weight > 0.0 {
            good_weight / total_weight
        } else {
            0.0
        },
        exhaustive,
        outcomes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> WeightedGraph {
        WeightedGraph::from_edges(n, (0..n - 1).map(|i| (i, i + 1, 1.0))).unwrap()
    }

    #[test]
    fn identical_sets() {
        let g = path(6);
        let a = VertexSet::new(&g, [0, 1, 2]).unwrap();
        let r = cluster_metrics(&g, &a, &a).unwrap();
        assert_eq!(r.precision, Some(1.0));
        assert_eq!((r.recall, r.accuracy, r.vol_out, r.vol_miss), (1.0, 1.0, 0.0, 0.0));
        assert_eq!(r.conductance_ratio, Some(1.0));
    }

    #[test]
    fn disjoint_and_empty_sets() {
        let g = path(6);
        let a = VertexSet::new(&g, [0, 1, 2]).unwrap();
        let s = VertexSet::new(&g, [4, 5]).unwrap();
        let r = cluster_metrics(&g, &s, &a).unwrap();
        assert_eq!((r.precision, r.recall), (Some(0.0), 0.0));
        assert_eq!(r.accuracy, 1.0 - 5.0 / 6.0);
        let e = cluster_metrics(&g, &VertexSet::empty(), &a).unwrap();
        assert_eq!(e.precision, None);
        assert_eq!(e.phi_s, None);
        assert_eq!(e.vol_miss, 1.0);
        assert!(cluster_metrics(&g, &a, &VertexSet::empty()).is_err());
    }

    #[test]
    fn grid_and_interval() {
        let g = log_grid(0.001, 0.3, 12);
        assert_eq!(g.len(), 12);
        assert!((g[0] - 0.001).abs() < 1e-15 && (g[11] - 0.3).abs() < 1e-14);
        let (m, h) = mean_ci94(&[1.0, 3.0]).unwrap();
        assert_eq!(m, 2.0);
        assert!((h - Z_94 * 1.0).abs() < 1e-12);
        assert!(mean_ci94(&[1.0]).is_none());
    }

    #[test]
    fn beta_sweep_needs_two_runs() {
        let cfg = BetaSweepConfig::new(vec![0.0], 1, 0);
        assert!(beta_sweep_experiment(&cfg).is_err());
    }
}
