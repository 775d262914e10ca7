//! Sweep cuts over a degree-normalized mass vector and the
//! Lovász–Simonovits curve built from the same ordering.

use std::collections::HashSet;
use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{VertexSet, WeightedGraph};
use crate::pagerank::SparseMass;
use crate::sum::ExactSum;

/// Vertices of `supp(p)` by `p(u)/deg(u)` descending (ties: ascending id),
/// with prefix volumes, cut weights and masses.
/// Relative complement volume below which a prefix counts as all of `V`.
const VOLUME_SNAP: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepProfile {
    order: Vec<usize>,
    values: Vec<f64>,
    prefix_volume: Vec<f64>,
    prefix_cut: Vec<f64>,
    prefix_mass: Vec<f64>,
    total_volume: f64,
}

impl SweepProfile {
    /// Builds the profile in `O(vol(supp(p)) + |supp| log |supp|)`.
    pub fn build(graph: &WeightedGraph, p: &SparseMass) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::domain("sweep over an empty support"));
        }
        let mut entries: Vec<(usize, f64, f64)> = Vec::with_capacity(p.len());
        for (u, m) in p.iter() {
            graph.check_vertex(u)?;
            let d = graph.degree(u);
            if d <= 0.0 {
                return Err(Error::domain(format!("support vertex {u} has degree 0")));
            }
            entries.push((u, m / d, m));
        }
        entries.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));

        let k = entries.len();
        let mut order = Vec::with_capacity(k);
        let mut values = Vec::with_capacity(k);
        let mut prefix_volume = Vec::with_capacity(k);
        let mut prefix_cut = Vec::with_capacity(k);
        let mut prefix_mass = Vec::with_capacity(k);
        let mut inside: HashSet<usize> = HashSet::with_capacity(k);
        let (mut vol, mut cut) = (0.0, 0.0);
        let mut mass = ExactSum::default();
        for (u, value, m) in entries {
            let (nbrs, ws) = graph.neighbors(u);
            let into_prefix: f64 = nbrs
                .iter()
                .zip(ws)
                .filter(|(v, _)| inside.contains(v))
                .map(|(_, &w)| w)
                .sum();
            let d = graph.degree(u);
            cut += d - 2.0 * into_prefix;
            vol += d;
            if graph.total_volume() - vol <= VOLUME_SNAP * graph.total_volume() {
                // the prefix holds every vertex of positive degree
                vol = graph.total_volume();
                cut = 0.0;
            }
            mass.add(m);
            inside.insert(u);
            order.push(u);
            values.push(value);
            prefix_volume.push(vol);
            prefix_cut.push(cut.max(0.0));
            prefix_mass.push(mass.value());
        }
        Ok(Self {
            order,
            values,
            prefix_volume,
            prefix_cut,
            prefix_mass,
            total_volume: graph.total_volume(),
        })
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// `p(u)/deg(u)` of the vertex at each rank.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Volume of the first `j + 1` vertices.
    pub fn prefix_volume(&self, j: usize) -> f64 {
        self.prefix_volume[j]
    }

    pub fn prefix_cut(&self, j: usize) -> f64 {
        self.prefix_cut[j]
    }

    pub fn prefix_mass(&self, j: usize) -> f64 {
        self.prefix_mass[j]
    }

    pub fn total_volume(&self) -> f64 {
        self.total_volume
    }

    /// Conductance of the first `j + 1` vertices; `None` when either side has
    /// zero volume.
    pub fn prefix_conductance(&self, j: usize) -> Option<f64> {
        let vol = self.prefix_volume[j];
        let denom = vol.min(self.total_volume - vol);
        (denom > 0.0).then(|| self.prefix_cut[j] / denom)
    }

    /// The first `len` vertices as a set.
    pub fn prefix_set(&self, len: usize) -> VertexSet {
        let volume = if len == 0 { 0.0 } else { self.prefix_volume[len - 1] };
        VertexSet::from_parts(self.order[..len].to_vec(), volume)
    }

    /// Number of leading vertices with `p(u) >= c deg(u) / vol0`.
    pub fn threshold_len(&self, c: f64, vol0: f64) -> usize {
        self.values.partition_point(|&v| v * vol0 >= c)
    }

    /// Writes rank, vertex, normalized value, prefix volume, prefix mass,
    /// prefix cut and prefix conductance as CSV. The `(prefix_volume,
    /// prefix_mass)` columns are the Lovász–Simonovits breakpoints. Vertex
    /// ids are translated through `ids` when given.
    pub fn write_csv<W: Write>(&self, ids: Option<&[usize]>, mut out: W) -> std::io::Result<()> {
        writeln!(
            out,
            "rank,vertex,normalized_value,prefix_volume,prefix_mass,prefix_cut,prefix_conductance"
        )?;
        for j in 0..self.len() {
            let phi = self
                .prefix_conductance(j)
                .map_or_else(String::new, |x| format!("{x:.16e}"));
            writeln!(
                out,
                "{},{},{:.16e},{:.16e},{:.16e},{:.16e},{}",
                j + 1,
                ids.map_or(self.order[j], |ids| ids[self.order[j]]),
                self.values[j],
                self.prefix_volume[j],
                self.prefix_mass[j],
                self.prefix_cut[j],
                phi
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepCut {
    pub set: VertexSet,
    pub phi: f64,
    /// Number of vertices in the chosen prefix.
    pub prefix_len: usize,
}

/// Minimum-conductance proper prefix, optionally restricted to prefixes of
/// volume at most `volume_cap`. Ties go to the shortest prefix.
pub fn best_sweep_cut(profile: &SweepProfile, volume_cap: Option<f64>) -> Result<SweepCut> {
    let mut best: Option<(usize, f64)> = None;
    for j in 0..profile.len() {
        if volume_cap.is_some_and(|cap| profile.prefix_volume(j) > cap) {
            break;
        }
        if let Some(phi) = profile.prefix_conductance(j) {
            if best.is_none_or(|(_, b)| phi < b) {
                best = Some((j, phi));
            }
        }
    }
    let (j, phi) = best.ok_or_else(|| Error::domain("no eligible sweep prefix"))?;
    Ok(SweepCut {
        set: profile.prefix_set(j + 1),
        phi,
        prefix_len: j + 1,
    })
}

/// `{u in supp(p) : p(u) >= c deg(u) / vol0}`.
pub fn threshold_set(graph: &WeightedGraph, p: &SparseMass, c: f64, vol0: f64) -> Result<VertexSet> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::input(format!("threshold c must be positive, got {c}")));
    }
    if !(vol0 > 0.0 && vol0.is_finite()) {
        return Err(Error::input(format!("vol0 must be positive, got {vol0}")));
    }
    let mut ids = Vec::new();
    for (u, m) in p.iter() {
        graph.check_vertex(u)?;
        // same arithmetic as `SweepProfile::threshold_len`
        let d = graph.degree(u);
        if d > 0.0 && m / d * vol0 >= c {
            ids.push(u);
        }
    }
    VertexSet::new(graph, ids)
}

/// Piecewise-linear curve through `(vol(S_j), p(S_j))`, starting at the
/// origin and extended flat to `vol(V)` past the support.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LsCurve {
    xs: Vec<f64>,
    ys: Vec<f64>,
    total_volume: f64,
}

impl LsCurve {
    pub fn from_profile(profile: &SweepProfile) -> Self {
        let mut xs = Vec::with_capacity(profile.len() + 2);
        let mut ys = Vec::with_capacity(profile.len() + 2);
        xs.push(0.0);
        ys.push(0.0);
        for j in 0..profile.len() {
            xs.push(profile.prefix_volume(j));
            ys.push(profile.prefix_mass(j));
        }
        let last_x = *xs.last().unwrap();
        let last_y = *ys.last().unwrap();
        if last_x < profile.total_volume() {
            xs.push(profile.total_volume());
            ys.push(last_y);
        }
        Self {
            xs,
            ys,
            total_volume: profile.total_volume(),
        }
    }

    pub fn breakpoints(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.ys.iter().copied())
    }

    /// Slope of each linear piece; equals `p(v_j)/deg(v_j)` on the support.
    pub fn slopes(&self) -> Vec<f64> {
        self.xs
            .windows(2)
            .zip(self.ys.windows(2))
            .map(|(x, y)| (y[1] - y[0]) / (x[1] - x[0]))
            .collect()
    }

    pub fn evaluate(&self, x: f64) -> Result<f64> {
        if !(0.0..=self.total_volume).contains(&x) {
            return Err(Error::input(format!(
                "curve argument {x} outside [0, {}]",
                self.total_volume
            )));
        }
        let i = self.xs.partition_point(|&b| b < x);
        if i == 0 {
            return Ok(self.ys[0]);
        }
        if i == self.xs.len() {
            return Ok(*self.ys.last().unwrap());
        }
        let (x0, x1) = (self.xs[i - 1], self.xs[i]);
        let (y0, y1) = (self.ys[i - 1], self.ys[i]);
        Ok(y0 + (x - x0) / (x1 - x0) * (y1 - y0))
    }
}
