//! Internal connectivity of a vertex set: spectral gap and mixing time of
//! the lazy walk on `G[A]`, and the derived connectivity/gap ratios.
//!
//! Logarithms are natural throughout.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{
    set_conductance, SetConductance, SetConductanceMode, VertexSet, WeightedGraph, EXACT_SET_CONDUCTANCE_CAP,
};
use crate::spectral;

pub const DEFAULT_GAP_TOLERANCE: f64 = 1e-9;
const POWER_ITERATION_LIMIT: usize = 20_000_000;
/// Largest set for which the dense eigensolve is offered.
pub const DENSE_GAP_CAP: usize = 2000;
/// Work budget (vertex-row updates times edge touches) for exact mixing time
/// in automatic mode.
const EXACT_MIXING_BUDGET: f64 = 4e9;

fn connected_subgraph(graph: &WeightedGraph, set: &VertexSet) -> Result<WeightedGraph> {
    if set.len() < 2 {
        return Err(Error::domain("connectivity needs at least two vertices"));
    }
    let sub = graph.induced_subgraph(set)?.graph;
    if !sub.is_connected() {
        return Err(Error::Disconnected);
    }
    Ok(sub)
}

/// `1 - mu_2` of the lazy walk on `G[set]`, by deflated power iteration
/// stopped at eigen-residual `tol`. Disconnected sets give
/// [`Error::Disconnected`].
pub fn spectral_gap(graph: &WeightedGraph, set: &VertexSet, tol: f64) -> Result<f64> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::input(format!("tolerance must be positive, got {tol}")));
    }
    let sub = connected_subgraph(graph, set)?;
    let pair = spectral::second_eigenpair(&sub, tol, POWER_ITERATION_LIMIT)?;
    Ok((1.0 - pair.value).clamp(0.0, 1.0))
}

/// Same quantity from a dense symmetric eigensolve.
pub fn spectral_gap_dense(graph: &WeightedGraph, set: &VertexSet) -> Result<f64> {
    if set.len() > DENSE_GAP_CAP {
        return Err(Error::input(format!(
            "dense eigensolve is capped at {DENSE_GAP_CAP} vertices, got {}",
            set.len()
        )));
    }
    let sub = connected_subgraph(graph, set)?;
    let values = spectral::dense_lazy_spectrum(&sub)?;
    Ok((1.0 - values[1]).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixingTime {
    /// Smallest `t` with relative pointwise distance at most 1/2; `None` when
    /// the cap was hit or the set is disconnected.
    pub tau: Option<u64>,
    pub cap: u64,
    /// `tau` is the spectral upper bound rather than the exact value.
    pub estimate: bool,
    pub disconnected: bool,
    /// Relative pointwise distance at `tau` (exact mode only).
    pub distance: Option<f64>,
    /// Relative pointwise distance at `tau - 1` (exact mode only).
    pub distance_before: Option<f64>,
}

impl MixingTime {
    fn never(cap: u64, disconnected: bool) -> Self {
        Self {
            tau: None,
            cap,
            estimate: false,
            disconnected,
            distance: None,
            distance_before: None,
        }
    }
}

pub fn default_mixing_cap(set_len: usize) -> u64 {
    100 * (set_len as u64).pow(2)
}

/// Exact mixing time: the lazy walk on `G[set]` is iterated from every
/// start vertex at once until `max |W^t(v,u) - pi(u)| / pi(u) <= 1/2`.
pub fn mixing_time(graph: &WeightedGraph, set: &VertexSet, cap: Option<u64>) -> Result<MixingTime> {
    let cap = cap.unwrap_or_else(|| default_mixing_cap(set.len()));
    let sub = match connected_subgraph(graph, set) {
        Ok(sub) => sub,
        Err(Error::Disconnected) => return Ok(MixingTime::never(cap, true)),
        Err(e) => return Err(e),
    };
    let k = sub.vertex_count();
    let vol = sub.total_volume();
    let pi: Vec<f64> = (0..k).map(|u| sub.degree(u) / vol).collect();
    let distance = |rows: &[f64]| {
        let mut worst: f64 = 0.0;
        for row in rows.chunks_exact(k) {
            for (x, p) in row.iter().zip(&pi) {
                worst = worst.max((x - p).abs() / p);
            }
        }
        worst
    };

    let mut rows = vec![0.0; k * k];
    for v in 0..k {
        rows[v * k + v] = 1.0;
    }
    let mut next = vec![0.0; k * k];
    let mut before = distance(&rows);
    for t in 1..=cap {
        for (src, dst) in rows.chunks_exact(k).zip(next.chunks_exact_mut(k)) {
            for u in 0..k {
                dst[u] = 0.5 * src[u];
            }
            for (x, &mass) in src.iter().enumerate() {
                if mass == 0.0 {
                    continue;
                }
                let share = 0.5 * mass / sub.degree(x);
                let (nbrs, ws) = sub.neighbors(x);
                for (&u, &w) in nbrs.iter().zip(ws) {
                    dst[u] += share * w;
                }
            }
        }
        std::mem::swap(&mut rows, &mut next);
        let d = distance(&rows);
        if d <= 0.5 {
            return Ok(MixingTime {
                tau: Some(t),
                cap,
                estimate: false,
                disconnected: false,
                distance: Some(d),
                distance_before: Some(before),
            });
        }
        before = d;
    }
    Ok(MixingTime::never(cap, false))
}

/// Spectral upper bound `ceil(ln(2 / pi_min) / -ln(1 - lambda))` on the
/// mixing time.
pub fn mixing_time_estimate(graph: &WeightedGraph, set: &VertexSet, lambda: f64) -> Result<MixingTime> {
    let cap = default_mixing_cap(set.len());
    let sub = match connected_subgraph(graph, set) {
        Ok(sub) => sub,
        Err(Error::Disconnected) => return Ok(MixingTime::never(cap, true)),
        Err(e) => return Err(e),
    };
    let pi_min = (0..sub.vertex_count())
        .map(|u| sub.degree(u))
        .fold(f64::INFINITY, f64::min)
        / sub.total_volume();
    let t = if lambda >= 1.0 {
        1.0
    } else if lambda <= 0.0 {
        f64::INFINITY
    } else {
        ((2.0 / pi_min).ln() / -(1.0 - lambda).ln()).ceil().max(1.0)
    };
    Ok(MixingTime {
        tau: t.is_finite().then_some(t as u64),
        cap,
        estimate: true,
        disconnected: false,
        distance: None,
        distance_before: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConnDefinition {
    /// `1 / tau_mix`
    Mix,
    /// `lambda / ln vol(A)`
    Lambda,
    /// `phi_s^2 / ln vol(A)`
    PhiS,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConnectivityReport {
    pub set_size: usize,
    /// Host-graph volume of the set.
    pub volume: f64,
    pub lambda: f64,
    pub tau_mix: MixingTime,
    pub phi_s: SetConductance,
    pub conn_mix: f64,
    pub conn_lambda: f64,
    pub conn_phi_s: f64,
    /// Conductance of the set in the host graph.
    pub phi: f64,
    pub definition: ConnDefinition,
    pub conn: f64,
    /// `conn / phi`.
    pub gap: f64,
    pub log_base: &'static str,
}

/// Fills a [`ConnectivityReport`] for `set`. `phi_of_set` replaces the host
/// conductance when given. Disconnected sets yield zero connectivity.
pub fn conn_and_gap(
    graph: &WeightedGraph,
    set: &VertexSet,
    definition: ConnDefinition,
    phi_of_set: Option<f64>,
) -> Result<ConnectivityReport> {
    let phi = match phi_of_set {
        Some(p) => p,
        None => graph.conductance(set)?,
    };
    let volume = graph.volume(set)?;
    let mode = if set.len() <= EXACT_SET_CONDUCTANCE_CAP {
        SetConductanceMode::Exact
    } else {
        SetConductanceMode::SpectralSweep
    };
    let phi_s = set_conductance(graph, set, mode)?;
    let lambda = match spectral_gap(graph, set, DEFAULT_GAP_TOLERANCE) {
        Ok(l) => l,
        Err(Error::Disconnected) => 0.0,
        Err(e) => return Err(e),
    };
    let tau_mix = if phi_s.disconnected {
        MixingTime::never(default_mixing_cap(set.len()), true)
    } else {
        let estimate = mixing_time_estimate(graph, set, lambda)?;
        let k = set.len() as f64;
        let sub_volume = volume - graph.cut_weight(set)?;
        let work = estimate.tau.map_or(f64::INFINITY, |t| t as f64) * k * (k + sub_volume);
        if work <= EXACT_MIXING_BUDGET {
            mixing_time(graph, set, None)?
        } else {
            estimate
        }
    };
    let log_vol = volume.ln();
    let per_log = |x: f64| {
        if log_vol > 0.0 {
            (x / log_vol).clamp(0.0, 1.0)
        } else {
            x.clamp(0.0, 1.0)
        }
    };
    let conn_mix = tau_mix.tau.map_or(0.0, |t| 1.0 / t as f64);
    let conn_lambda = per_log(lambda);
    let conn_phi_s = per_log(phi_s.value * phi_s.value);
    let conn = match definition {
        ConnDefinition::Mix => conn_mix,
        ConnDefinition::Lambda => conn_lambda,
        ConnDefinition::PhiS => conn_phi_s,
    };
    Ok(ConnectivityReport {
        set_size: set.len(),
        volume,
        lambda,
        tau_mix,
        phi_s,
        conn_mix,
        conn_lambda,
        conn_phi_s,
        phi,
        definition,
        conn,
        gap: conn / phi,
        log_base: "e",
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(n: usize) -> WeightedGraph {
        let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j, 1.0)));
        WeightedGraph::from_edges(n, edges).unwrap()
    }

    fn path(ell: usize) -> WeightedGraph {
        WeightedGraph::from_edges(ell + 1, (0..ell).map(|i| (i, i + 1, 1.0))).unwrap()
    }

    #[test]
    fn gap_of_small_graphs() {
        let k2 = complete(2);
        let all = VertexSet::all(&k2);
        assert!((spectral_gap(&k2, &all, 1e-12).unwrap() - 1.0).abs() < 1e-9);
        let k4 = complete(4);
        let all = VertexSet::all(&k4);
        let dense = spectral_gap_dense(&k4, &all).unwrap();
        assert!((dense - 2.0 / 3.0).abs() < 1e-12);
        assert!((spectral_gap(&k4, &all, 1e-12).unwrap() - dense).abs() < 1e-9);
        let c8 = WeightedGraph::from_edges(8, (0..8).map(|i| (i, (i + 1) % 8, 1.0))).unwrap();
        let all = VertexSet::all(&c8);
        let closed = (1.0 - (std::f64::consts::PI / 4.0).cos()) / 2.0;
        assert!((closed - 0.146_446_6).abs() < 1e-7);
        assert!((spectral_gap(&c8, &all, 1e-12).unwrap() - closed).abs() < 1e-9);
    }

    #[test]
    fn disconnected_set() {
        let g = path(3);
        let set = VertexSet::new(&g, [0, 3]).unwrap();
        assert!(matches!(spectral_gap(&g, &set, 1e-9), Err(Error::Disconnected)));
        let mix = mixing_time(&g, &set, None).unwrap();
        assert!(mix.disconnected && mix.tau.is_none());
    }

    #[test]
    fn k2_mixes_in_one_step() {
        let g = complete(2);
        let mix = mixing_time(&g, &VertexSet::all(&g), None).unwrap();
        assert_eq!(mix.tau, Some(1));
        assert_eq!(mix.distance, Some(0.0));
    }

    #[test]
    fn path_mixing_scales_quadratically() {
        let t16 = mixing_time(&path(16), &VertexSet::all(&path(16)), None).unwrap();
        let t32 = mixing_time(&path(32), &VertexSet::all(&path(32)), None).unwrap();
        let ratio = t32.tau.unwrap() as f64 / t16.tau.unwrap() as f64;
        assert!((3.0..=5.0).contains(&ratio), "ratio {ratio}");
        assert!(t32.distance_before.unwrap() > 0.5);
    }

    #[test]
    fn mixing_cap_is_reported() {
        let g = path(16);
        let mix = mixing_time(&g, &VertexSet::all(&g), Some(3)).unwrap();
        assert_eq!(mix.tau, None);
        assert!(!mix.disconnected);
    }

    #[test]
    fn estimate_bounds_exact() {
        let g = path(12);
        let all = VertexSet::all(&g);
        let lambda = spectral_gap_dense(&g, &all).unwrap();
        let exact = mixing_time(&g, &all, None).unwrap().tau.unwrap();
        let est = mixing_time_estimate(&g, &all, lambda).unwrap();
        assert!(est.estimate && est.tau.unwrap() >= exact);
    }
}
