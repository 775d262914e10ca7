//! Immutable weighted undirected graph in compressed sparse row form.
//!
//! Parallel edges are stored as a single entry whose weight is the
//! multiplicity, so the same type serves multigraphs and weighted
//! similarity graphs. Degrees, volumes and cuts all use weights.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral;

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    weights: Vec<f64>,
    degrees: Vec<f64>,
    total_volume: f64,
}

impl WeightedGraph {
    /// Builds a graph on `vertex_count` vertices from undirected weighted
    /// edges. Repeated pairs, in either orientation, are merged by summing
    /// their weights. Zero weights are dropped; self-loops and negative or
    /// non-finite weights are rejected.
    pub fn from_edges<I>(vertex_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); vertex_count];
        for (u, v, w) in edges {
            for x in [u, v] {
                if x >= vertex_count {
                    return Err(Error::InvalidVertex {
                        vertex: x,
                        vertex_count,
                    });
                }
            }
            if u == v {
                return Err(Error::input(format!("self-loop at vertex {u}")));
            }
            if !w.is_finite() || w < 0.0 {
                return Err(Error::input(format!("invalid weight {w} on edge ({u}, {v})")));
            }
            if w == 0.0 {
                continue;
            }
            rows[u].push((v, w));
            rows[v].push((u, w));
        }

        let mut offsets = Vec::with_capacity(vertex_count + 1);
        let mut targets = Vec::new();
        let mut weights = Vec::new();
        let mut degrees = Vec::with_capacity(vertex_count);
        offsets.push(0);
        for mut row in rows {
            // stable: duplicates keep input order, so w(u,v) and w(v,u) are
            // summed in the same order and agree bitwise
            row.sort_by_key(|&(v, _)| v);
            let mut degree = 0.0;
            let mut i = 0;
            while i < row.len() {
                let v = row[i].0;
                let mut w = 0.0;
                while i < row.len() && row[i].0 == v {
                    w += row[i].1;
                    i += 1;
                }
                targets.push(v);
                weights.push(w);
                degree += w;
            }
            degrees.push(degree);
            offsets.push(targets.len());
        }
        let total_volume = degrees.iter().sum();
        Ok(Self {
            offsets,
            targets,
            weights,
            degrees,
            total_volume,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.degrees.len()
    }

    /// Number of distinct undirected vertex pairs with positive weight.
    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn degree(&self, u: usize) -> f64 {
        self.degrees[u]
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    /// Sum of all degrees, i.e. twice the total edge weight.
    pub fn total_volume(&self) -> f64 {
        self.total_volume
    }

    /// Neighbor ids (ascending) and the matching weights.
    pub fn neighbors(&self, u: usize) -> (&[usize], &[f64]) {
        let range = self.offsets[u]..self.offsets[u + 1];
        (&self.targets[range.clone()], &self.weights[range])
    }

    pub fn weight(&self, u: usize, v: usize) -> f64 {
        let (nbrs, ws) = self.neighbors(u);
        match nbrs.binary_search(&v) {
            Ok(i) => ws[i],
            Err(_) => 0.0,
        }
    }

    /// Each undirected edge once, as `(u, v, w)` with `u < v`, ordered by `u`
    /// then `v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.vertex_count()).flat_map(move |u| {
            let (nbrs, ws) = self.neighbors(u);
            nbrs.iter()
                .zip(ws)
                .filter(move |(&v, _)| v > u)
                .map(move |(&v, &w)| (u, v, w))
        })
    }

    pub(crate) fn check_vertex(&self, u: usize) -> Result<()> {
        if u >= self.vertex_count() {
            return Err(Error::InvalidVertex {
                vertex: u,
                vertex_count: self.vertex_count(),
            });
        }
        Ok(())
    }

    fn check_set(&self, set: &VertexSet) -> Result<()> {
        match set.ids.last() {
            Some(&u) => self.check_vertex(u),
            None => Ok(()),
        }
    }

    pub fn volume(&self, set: &VertexSet) -> Result<f64> {
        self.check_set(set)?;
        Ok(set.ids.iter().map(|&u| self.degrees[u]).sum())
    }

    /// Total weight of edges with exactly one endpoint in `set`. Edges are
    /// summed in `(min, max)` order, so a set and its complement give
    /// bitwise-equal cuts.
    pub fn cut_weight(&self, set: &VertexSet) -> Result<f64> {
        self.check_set(set)?;
        let mask = set.mask(self.vertex_count());
        let mut crossing = Vec::new();
        for &u in &set.ids {
            let (nbrs, ws) = self.neighbors(u);
            for (&v, &w) in nbrs.iter().zip(ws) {
                if !mask[v] {
                    crossing.push((u.min(v), u.max(v), w));
                }
            }
        }
        crossing.sort_by_key(|&(a, b, _)| (a, b));
        Ok(crossing.iter().map(|e| e.2).sum())
    }

    /// `cut(S, V \ S) / min(vol(S), vol(V \ S))`.
    pub fn conductance(&self, set: &VertexSet) -> Result<f64> {
        self.check_set(set)?;
        if set.is_empty() || set.len() == self.vertex_count() {
            return Err(Error::domain("conductance needs a nonempty proper subset"));
        }
        let mask = set.mask(self.vertex_count());
        let (mut vol_in, mut vol_out) = (0.0, 0.0);
        for (u, &d) in self.degrees.iter().enumerate() {
            if mask[u] {
                vol_in += d;
            } else {
                vol_out += d;
            }
        }
        let denom = f64::min(vol_in, vol_out);
        if denom <= 0.0 {
            return Err(Error::domain("one side of the cut has zero volume"));
        }
        // cut <= min side volume; clamp the rounding excess
        Ok((self.cut_weight(set)? / denom).min(1.0))
    }

    /// `G[S]` with outgoing edges removed. Vertices keep their relative
    /// order; vertices without internal edges stay as degree-0 vertices.
    pub fn induced_subgraph(&self, set: &VertexSet) -> Result<InducedSubgraph> {
        self.check_set(set)?;
        if set.is_empty() {
            return Err(Error::domain("induced subgraph of the empty set"));
        }
        let mut local = vec![usize::MAX; self.vertex_count()];
        for (i, &u) in set.ids.iter().enumerate() {
            local[u] = i;
        }
        let mut edges = Vec::new();
        for (i, &u) in set.ids.iter().enumerate() {
            let (nbrs, ws) = self.neighbors(u);
            for (&v, &w) in nbrs.iter().zip(ws) {
                let j = local[v];
                if j != usize::MAX && j > i {
                    edges.push((i, j, w));
                }
            }
        }
        let graph = WeightedGraph::from_edges(set.len(), edges)?;
        Ok(InducedSubgraph {
            graph,
            host_ids: set.ids.clone(),
        })
    }

    /// Vertices reachable from `start`.
    pub(crate) fn component_of(&self, start: usize) -> Vec<bool> {
        let mut seen = vec![false; self.vertex_count()];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(u) = stack.pop() {
            for &v in self.neighbors(u).0 {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    }

    pub fn is_connected(&self) -> bool {
        self.vertex_count() == 0 || self.component_of(0).iter().all(|&x| x)
    }
}

/// An induced subgraph together with the map from its ids back to the host.
#[derive(Debug, Clone)]
pub struct InducedSubgraph {
    pub graph: WeightedGraph,
    /// `host_ids[local] = host id`; ascending.
    pub host_ids: Vec<usize>,
}

impl InducedSubgraph {
    pub fn to_local(&self, host: usize) -> Option<usize> {
        self.host_ids.binary_search(&host).ok()
    }
}

/// Sorted, duplicate-free vertex ids with the host-graph volume cached.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexSet {
    ids: Vec<usize>,
    volume: f64,
}

impl VertexSet {
    /// Sorts and deduplicates `ids`; every id must be a vertex of `graph`.
    pub fn new(graph: &WeightedGraph, ids: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut ids: Vec<usize> = ids.into_iter().collect();
        ids.sort_unstable();
        ids.dedup();
        if let Some(&u) = ids.last() {
            graph.check_vertex(u)?;
        }
        let volume = ids.iter().map(|&u| graph.degree(u)).sum();
        Ok(Self { ids, volume })
    }

    /// `ids` must already be sorted, unique and valid; `volume` their volume.
    pub(crate) fn from_parts(mut ids: Vec<usize>, volume: f64) -> Self {
        ids.sort_unstable();
        Self { ids, volume }
    }

    pub fn empty() -> Self {
        Self {
            ids: Vec::new(),
            volume: 0.0,
        }
    }

    pub fn all(graph: &WeightedGraph) -> Self {
        Self {
            ids: (0..graph.vertex_count()).collect(),
            volume: graph.total_volume(),
        }
    }

    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Volume in the graph the set was built against.
    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn contains(&self, u: usize) -> bool {
        self.ids.binary_search(&u).is_ok()
    }

    pub fn mask(&self, vertex_count: usize) -> Vec<bool> {
        let mut mask = vec![false; vertex_count];
        for &u in &self.ids {
            mask[u] = true;
        }
        mask
    }

    pub fn complement(&self, graph: &WeightedGraph) -> Self {
        let mask = self.mask(graph.vertex_count());
        let ids: Vec<usize> = (0..graph.vertex_count()).filter(|&u| !mask[u]).collect();
        let volume = ids.iter().map(|&u| graph.degree(u)).sum();
        Self { ids, volume }
    }

    pub fn intersection_len(&self, other: &VertexSet) -> usize {
        let (mut i, mut j, mut count) = (0, 0, 0);
        while i < self.ids.len() && j < other.ids.len() {
            match self.ids[i].cmp(&other.ids[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    count += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        count
    }
}

/// Largest set accepted by exhaustive set-conductance enumeration.
pub const EXACT_SET_CONDUCTANCE_CAP: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SetConductanceMode {
    Exact,
    SpectralSweep,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SetConductance {
    pub value: f64,
    /// False when the value is only an upper bound from a spectral sweep.
    pub exact: bool,
    /// `G[S]` is disconnected; `value` is 0.
    pub disconnected: bool,
}

/// Conductance of `set` inside its own induced subgraph.
pub fn set_conductance(graph: &WeightedGraph, set: &VertexSet, mode: SetConductanceMode) -> Result<SetConductance> {
    if set.len() < 2 {
        return Err(Error::domain("set conductance needs at least two vertices"));
    }
    if mode == SetConductanceMode::Exact && set.len() > EXACT_SET_CONDUCTANCE_CAP {
        return Err(Error::input(format!(
            "exact set conductance is capped at {EXACT_SET_CONDUCTANCE_CAP} vertices, got {}",
            set.len()
        )));
    }
    let sub = graph.induced_subgraph(set)?.graph;
    if !sub.is_connected() {
        return Ok(SetConductance {
            value: 0.0,
            exact: true,
            disconnected: true,
        });
    }
    match mode {
        SetConductanceMode::Exact => Ok(SetConductance {
            value: exact_conductance_min(&sub),
            exact: true,
            disconnected: false,
        }),
        SetConductanceMode::SpectralSweep => Ok(SetConductance {
            value: spectral_sweep_min(&sub)?,
            exact: false,
            disconnected: false,
        }),
    }
}

/// Minimum conductance over all nonempty proper subsets, by Gray-code
/// enumeration. The last vertex is pinned outside, which visits each cut
/// exactly once.
fn exact_conductance_min(g: &WeightedGraph) -> f64 {
    let k = g.vertex_count();
    let total = g.total_volume();
    let mut inside = vec![false; k];
    let (mut vol, mut cut) = (0.0, 0.0);
    let mut best = f64::INFINITY;
    let free = k - 1;
    for step in 1u64..(1u64 << free) {
        let bit = step.trailing_zeros() as usize;
        let u = bit;
        let (nbrs, ws) = g.neighbors(u);
        let into_set: f64 = nbrs.iter().zip(ws).filter(|(&v, _)| inside[v]).map(|(_, &w)| w).sum();
        if inside[u] {
            inside[u] = false;
            vol -= g.degree(u);
            cut -= g.degree(u) - 2.0 * into_set;
        } else {
            inside[u] = true;
            vol += g.degree(u);
            cut += g.degree(u) - 2.0 * into_set;
        }
        let denom = vol.min(total - vol);
        if denom > 0.0 {
            best = best.min(cut.max(0.0) / denom);
        }
    }
    best
}

/// Best sweep cut along the second eigenvector of the lazy walk.
fn spectral_sweep_min(g: &WeightedGraph) -> Result<f64> {
    let pair = spectral::second_eigenpair(g, 1e-10, 1_000_000)?;
    let k = g.vertex_count();
    // degree-normalized embedding of the left eigenvector D^{1/2} y
    let mut order: Vec<usize> = (0..k).collect();
    let key: Vec<f64> = (0..k).map(|u| pair.vector[u] / g.degree(u).sqrt()).collect();
    order.sort_by(|&a, &b| key[b].total_cmp(&key[a]).then(a.cmp(&b)));
    let total = g.total_volume();
    let mut inside = vec![false; k];
    let (mut vol, mut cut) = (0.0, 0.0);
    let mut best = f64::INFINITY;
    for &u in &order[..k - 1] {
        let (nbrs, ws) = g.neighbors(u);
        let into_set: f64 = nbrs.iter().zip(ws).filter(|(&v, _)| inside[v]).map(|(_, &w)| w).sum();
        inside[u] = true;
        vol += g.degree(u);
        cut += g.degree(u) - 2.0 * into_set;
        let denom = vol.min(total - vol);
        if denom > 0.0 {
            best = best.min(cut.max(0.0) / denom);
        }
    }
    Ok(best)
}
