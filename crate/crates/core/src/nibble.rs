//! PageRank-Nibble: approximate PageRank from a seed followed by a sweep
//! restricted to a window of threshold sets, plus a two-mode wrapper and a
//! doubling search over the volume guess.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{VertexSet, WeightedGraph};
use crate::pagerank::{approximate_pagerank, PageRankParams, PushStats, SparseMass};
use crate::sweep::SweepProfile;

/// Largest teleport probability derived from `conn`.
pub const ALPHA_CAP: f64 = 1.0 / 9.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NibbleParams {
    pub seed: usize,
    /// Caller-supplied internal connectivity of the target set, in `(0, 1]`;
    /// unused when `alpha_override` is set.
    pub conn: f64,
    /// Guess for the target volume.
    pub vol0: f64,
    pub alpha_scale: f64,
    pub c_min: f64,
    pub c_max: f64,
    pub alpha_override: Option<f64>,
    pub epsilon_override: Option<f64>,
}

impl NibbleParams {
    pub fn new(seed: usize, conn: f64, vol0: f64) -> Self {
        Self {
            seed,
            conn,
            vol0,
            alpha_scale: 1.0 / 9.0,
            c_min: 1.0 / 16.0,
            c_max: 0.5,
            alpha_override: None,
            epsilon_override: None,
        }
    }

    /// `min(alpha_scale * conn, 1/9)` unless overridden.
    pub fn alpha(&self) -> f64 {
        self.alpha_override
            .unwrap_or_else(|| (self.alpha_scale * self.conn).min(ALPHA_CAP))
    }

    /// `1 / (10 vol0)` unless overridden.
    pub fn epsilon(&self) -> f64 {
        self.epsilon_override.unwrap_or(1.0 / (10.0 * self.vol0))
    }

    pub fn validate(&self) -> Result<()> {
        if self.alpha_override.is_none() && !(self.conn > 0.0 && self.conn <= 1.0) {
            return Err(Error::input(format!("conn must lie in (0, 1], got {}", self.conn)));
        }
        if !(self.vol0 > 0.0 && self.vol0.is_finite()) {
            return Err(Error::input(format!("vol0 must be positive, got {}", self.vol0)));
        }
        if !(self.alpha_scale > 0.0 && self.alpha_scale.is_finite()) {
            return Err(Error::input(format!(
                "alpha scale must be positive, got {}",
                self.alpha_scale
            )));
        }
        if !(self.c_min > 0.0 && self.c_min < self.c_max && self.c_max.is_finite()) {
            return Err(Error::input(format!(
                "need 0 < c_min < c_max, got [{}, {}]",
                self.c_min, self.c_max
            )));
        }
        PageRankParams::new(self.alpha(), self.epsilon()).map(|_| ())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NibbleMode {
    /// Teleport probability derived from the connectivity estimate.
    GapMode,
    /// Teleport probability proportional to the target conductance.
    ClassicMode,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NibbleResult {
    pub output_set: VertexSet,
    pub phi: f64,
    pub stats: PushStats,
    pub params: NibbleParams,
    pub alpha: f64,
    pub epsilon: f64,
    pub mode: NibbleMode,
    /// Number of distinct threshold sets inside the window.
    pub candidates: usize,
}

/// Prefix lengths of the sweep ordering that equal some threshold set
/// `S'_c` with `c` in `[c_min, c_max]` and have positive volume on both
/// sides. Lengths are increasing, so the sets are nested.
pub fn candidate_prefixes(profile: &SweepProfile, vol0: f64, c_min: f64, c_max: f64) -> Vec<usize> {
    let values = profile.values();
    let mut out = Vec::new();
    let mut j = 0;
    while j < values.len() {
        // end of the tie group starting at j
        let mut k = j;
        while k + 1 < values.len() && values[k + 1] == values[j] {
            k += 1;
        }
        let here = values[j] * vol0;
        let next = values.get(k + 1).map_or(0.0, |v| v * vol0);
        // S'_c is this prefix exactly for c in (next, here]
        if here >= c_min && next < c_max && profile.prefix_conductance(k).is_some() {
            out.push(k + 1);
        }
        j = k + 1;
    }
    out
}

/// Runs one nibble from `params.seed`.
pub fn page_rank_nibble(graph: &WeightedGraph, params: &NibbleParams) -> Result<NibbleResult> {
    run(graph, params, NibbleMode::GapMode)
}

fn run(graph: &WeightedGraph, params: &NibbleParams, mode: NibbleMode) -> Result<NibbleResult> {
    params.validate()?;
    graph.check_vertex(params.seed)?;
    if graph.degree(params.seed) <= 0.0 {
        return Err(Error::domain(format!("seed {} has degree 0", params.seed)));
    }
    if params.vol0 > graph.total_volume() / 2.0 {
        log::warn!(
            "vol0 = {} exceeds half the total volume {}",
            params.vol0,
            graph.total_volume()
        );
    }
    let alpha = params.alpha();
    let epsilon = params.epsilon();
    let pr = PageRankParams::new(alpha, epsilon)?;
    let approx = approximate_pagerank(graph, &SparseMass::indicator(params.seed), pr)?;
    let no_cut = || Error::NoCandidateCut {
        c_min: params.c_min,
        c_max: params.c_max,
    };
    if approx.p.is_empty() {
        return Err(no_cut());
    }
    let profile = SweepProfile::build(graph, &approx.p)?;
    let candidates = candidate_prefixes(&profile, params.vol0, params.c_min, params.c_max);
    let mut best: Option<(usize, f64)> = None;
    for &len in &candidates {
        let phi = profile.prefix_conductance(len - 1).expect("candidate is proper");
        if best.is_none_or(|(_, b)| phi < b) {
            best = Some((len, phi));
        }
    }
    let (len, phi) = best.ok_or_else(no_cut)?;
    Ok(NibbleResult {
        output_set: profile.prefix_set(len),
        phi,
        stats: approx.stats,
        params: params.clone(),
        alpha,
        epsilon,
        mode,
        candidates: candidates.len(),
    })
}

/// Classic-mode parameters: teleport probability `phi_target * classic_scale`.
pub fn classic_params(params: &NibbleParams, phi_target: f64, classic_scale: f64) -> Result<NibbleParams> {
    if !(phi_target > 0.0 && phi_target < 1.0) {
        return Err(Error::input(format!("phi target must lie in (0, 1), got {phi_target}")));
    }
    let mut p = params.clone();
    p.alpha_override = Some(phi_target * classic_scale);
    Ok(p)
}

/// Both runs of the two-mode wrapper: `(gap mode, classic mode)`.
pub fn nibble_both_modes(
    graph: &WeightedGraph,
    params: &NibbleParams,
    phi_target: f64,
    classic_scale: f64,
) -> Result<(Result<NibbleResult>, Result<NibbleResult>)> {
    let classic = classic_params(params, phi_target, classic_scale)?;
    Ok((
        run(graph, params, NibbleMode::GapMode),
        run(graph, &classic, NibbleMode::ClassicMode),
    ))
}

/// Runs gap mode and classic mode and keeps the smaller conductance; ties
/// go to gap mode.
pub fn nibble_auto(
    graph: &WeightedGraph,
    params: &NibbleParams,
    phi_target: f64,
    classic_scale: f64,
) -> Result<NibbleResult> {
    let (gap, classic) = nibble_both_modes(graph, params, phi_target, classic_scale)?;
    choose_mode(gap, classic)
}

/// Keeps the run with smaller conductance; ties go to gap mode.
pub fn choose_mode(gap: Result<NibbleResult>, classic: Result<NibbleResult>) -> Result<NibbleResult> {
    match (gap, classic) {
        (Ok(g), Ok(c)) => Ok(if c.phi < g.phi { c } else { g }),
        (Ok(g), Err(_)) => Ok(g),
        (Err(_), Ok(c)) => Ok(c),
        (Err(g), Err(c)) => Err(Error::BothModesFailed {
            gap: Box::new(g),
            classic: Box::new(c),
        }),
    }
}

/// Tries `vol0 = 1, 2, 4, ...` up to `vol0_max` and returns the first run
/// with a nonempty window and conductance at most `phi_accept`.
pub fn vol0_search(
    graph: &WeightedGraph,
    params: &NibbleParams,
    phi_accept: f64,
    vol0_max: f64,
) -> Result<NibbleResult> {
    if !(vol0_max >= 1.0 && vol0_max.is_finite()) {
        return Err(Error::input(format!("vol0 cap must be at least 1, got {vol0_max}")));
    }
    let mut best_phi: Option<f64> = None;
    let mut vol0 = 1.0;
    while vol0 <= vol0_max {
        let mut p = params.clone();
        p.vol0 = vol0;
        match page_rank_nibble(graph, &p) {
            Ok(res) => {
                if res.phi <= phi_accept {
                    return Ok(res);
                }
                best_phi = Some(best_phi.map_or(res.phi, |b: f64| b.min(res.phi)));
            }
            Err(Error::NoCandidateCut { .. }) => {}
            Err(e) => return Err(e),
        }
        vol0 *= 2.0;
    }
    Err(Error::NoValidVol0 { vol0_max, best_phi })
}
