//! Personalized PageRank on the lazy walk `W = (I + D^{-1} A) / 2`.
//!
//! `pr_s` is the unique solution of `pr = alpha s + (1 - alpha) pr W`. Two
//! exact routes are provided (the truncated walk series and a conjugate
//! gradient solve of the linear system) plus the residual-push
//! approximation that keeps `p = pr_{s - r}` with `r(u) < eps deg(u)`.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{VertexSet, WeightedGraph};
use crate::spectral;
use crate::sum::exact_sum;

/// Sparse nonnegative vertex masses; zero entries are never stored.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SparseMass {
    entries: BTreeMap<usize, f64>,
}

impl SparseMass {
    pub fn new() -> Self {
        Self::default()
    }

    /// Duplicate ids are summed. Negative or non-finite masses are rejected.
    pub fn from_entries(entries: impl IntoIterator<Item = (usize, f64)>) -> Result<Self> {
        let mut out = Self::new();
        for (u, m) in entries {
            if !m.is_finite() || m < 0.0 {
                return Err(Error::input(format!("invalid mass {m} at vertex {u}")));
            }
            out.add(u, m);
        }
        Ok(out)
    }

    /// Indicator vector of one vertex.
    pub fn indicator(u: usize) -> Self {
        let mut out = Self::new();
        out.add(u, 1.0);
        out
    }

    /// Degree-normalized uniform distribution on `set`.
    pub fn stationary_on(graph: &WeightedGraph, set: &VertexSet) -> Result<Self> {
        let vol = graph.volume(set)?;
        if vol <= 0.0 {
            return Err(Error::domain("stationary distribution on a zero-volume set"));
        }
        Self::from_entries(set.ids().iter().map(|&u| (u, graph.degree(u) / vol)))
    }

    /// Keeps the strictly positive entries of a dense vector.
    pub fn from_dense(values: &[f64]) -> Self {
        let mut out = Self::new();
        for (u, &m) in values.iter().enumerate() {
            if m > 0.0 {
                out.add(u, m);
            }
        }
        out
    }

    fn add(&mut self, u: usize, m: f64) {
        if m == 0.0 {
            return;
        }
        *self.entries.entry(u).or_insert(0.0) += m;
    }

    pub fn get(&self, u: usize) -> f64 {
        self.entries.get(&u).copied().unwrap_or(0.0)
    }

    /// Entries in ascending vertex order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.entries.iter().map(|(&u, &m)| (u, m))
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Correctly rounded total mass.
    pub fn l1(&self) -> f64 {
        exact_sum(self.entries.values().copied())
    }

    pub fn to_dense(&self, n: usize) -> Vec<f64> {
        let mut out = vec![0.0; n];
        for (u, m) in self.iter() {
            out[u] = m;
        }
        out
    }

    fn check_against(&self, graph: &WeightedGraph) -> Result<()> {
        for u in self.support() {
            graph.check_vertex(u)?;
            if graph.degree(u) <= 0.0 {
                return Err(Error::domain(format!("support vertex {u} has degree 0")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PageRankParams {
    pub alpha: f64,
    pub epsilon: f64,
}

impl PageRankParams {
    pub fn new(alpha: f64, epsilon: f64) -> Result<Self> {
        let params = Self { alpha, epsilon };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::input(format!("alpha must lie in (0, 1], got {}", self.alpha)));
        }
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return Err(Error::input(format!(
                "epsilon must lie in (0, 1], got {}",
                self.epsilon
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PushStats {
    pub push_count: u64,
    /// Sum of the degrees of the pushed vertices.
    pub work: f64,
    /// Volume of `supp(p)`.
    pub support_volume: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApproximatePageRank {
    pub p: SparseMass,
    pub r: SparseMass,
    pub stats: PushStats,
}

/// One step of the lazy walk: returns `v W`.
pub fn lazy_step(graph: &WeightedGraph, v: &SparseMass) -> Result<SparseMass> {
    v.check_against(graph)?;
    let mut out: BTreeMap<usize, f64> = BTreeMap::new();
    for (u, m) in v.iter() {
        *out.entry(u).or_insert(0.0) += 0.5 * m;
        let share = 0.5 * m / graph.degree(u);
        let (nbrs, ws) = graph.neighbors(u);
        for (&x, &w) in nbrs.iter().zip(ws) {
            *out.entry(x).or_insert(0.0) += share * w;
        }
    }
    SparseMass::from_entries(out)
}

fn walk_step(graph: &WeightedGraph, x: &[f64], out: &mut [f64]) {
    for (u, slot) in out.iter_mut().enumerate() {
        *slot = 0.5 * x[u];
    }
    for (u, &mass) in x.iter().enumerate() {
        if mass == 0.0 {
            continue;
        }
        let share = 0.5 * mass / graph.degree(u);
        let (nbrs, ws) = graph.neighbors(u);
        for (&v, &w) in nbrs.iter().zip(ws) {
            out[v] += share * w;
        }
    }
}

fn check_dense_start(graph: &WeightedGraph, s: &[f64], alpha: f64, tol: f64) -> Result<()> {
    if s.len() != graph.vertex_count() {
        return Err(Error::input(format!(
            "start vector has length {}, graph has {} vertices",
            s.len(),
            graph.vertex_count()
        )));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::input(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::input(format!("tolerance must lie in (0, 1), got {tol}")));
    }
    if let Some(u) = (0..s.len()).find(|&u| s[u] != 0.0 && graph.degree(u) <= 0.0) {
        return Err(Error::domain(format!("start vector has mass on degree-0 vertex {u}")));
    }
    Ok(())
}

/// Number of walk steps `T` after which the discarded tail
/// `(1 - alpha)^{T+1}` is at most `tol`.
pub fn series_length(alpha: f64, tol: f64) -> usize {
    if alpha >= 1.0 {
        return 0;
    }
    // smallest T with (T + 1) ln(1 - alpha) <= ln(tol)
    let t = (tol.ln() / (1.0 - alpha).ln()).ceil() - 1.0;
    t.max(0.0) as usize
}

/// `sum_t alpha (1 - alpha)^t s W^t` truncated once the remaining tail
/// weight `(1 - alpha)^{T+1}` drops below `tol`. `s` may be signed; the
/// absolute error of each entry is at most `tol * ||s||_1`.
pub fn exact_pagerank_series(graph: &WeightedGraph, s: &[f64], alpha: f64, tol: f64) -> Result<Vec<f64>> {
    check_dense_start(graph, s, alpha, tol)?;
    let steps = series_length(alpha, tol);
    let n = graph.vertex_count();
    let mut x = s.to_vec();
    let mut next = vec![0.0; n];
    let mut acc: Vec<f64> = x.iter().map(|v| alpha * v).collect();
    let mut weight = alpha;
    for _ in 0..steps {
        walk_step(graph, &x, &mut next);
        std::mem::swap(&mut x, &mut next);
        weight *= 1.0 - alpha;
        for (a, v) in acc.iter_mut().zip(&x) {
            *a += weight * v;
        }
    }
    Ok(acc)
}

/// Exact PageRank by solving the linear system directly; residual target is
/// `tol` relative to the right-hand side.
pub fn exact_pagerank_solve(graph: &WeightedGraph, s: &[f64], alpha: f64, tol: f64) -> Result<Vec<f64>> {
    check_dense_start(graph, s, alpha, tol)?;
    if alpha >= 1.0 {
        return Ok(s.to_vec());
    }
    spectral::solve_pagerank(graph, s, alpha, tol.max(1e-15))
}

/// Exact PageRank, choosing the walk series when it is short and the linear
/// solve otherwise.
pub fn exact_pagerank(graph: &WeightedGraph, s: &[f64], alpha: f64, tol: f64) -> Result<Vec<f64>> {
    check_dense_start(graph, s, alpha, tol)?;
    let steps = series_length(alpha, tol) as f64;
    let per_step = (graph.vertex_count() + 2 * graph.edge_count()) as f64;
    if steps * per_step <= 2e7 {
        exact_pagerank_series(graph, s, alpha, tol)
    } else {
        exact_pagerank_solve(graph, s, alpha, tol)
    }
}

/// Exact PageRank of a sparse start vector.
pub fn exact_pagerank_of(graph: &WeightedGraph, s: &SparseMass, alpha: f64, tol: f64) -> Result<Vec<f64>> {
    s.check_against(graph)?;
    exact_pagerank(graph, &s.to_dense(graph.vertex_count()), alpha, tol)
}

/// Residual push: returns an `epsilon`-approximate PageRank vector
/// `p = pr_{s - r}` with `r(u) < epsilon deg(u)` everywhere.
///
/// Violating vertices are processed in FIFO order; a vertex is enqueued when
/// its residual first crosses the threshold and is never queued twice.
pub fn approximate_pagerank(
    graph: &WeightedGraph,
    s: &SparseMass,
    params: PageRankParams,
) -> Result<ApproximatePageRank> {
    params.validate()?;
    s.check_against(graph)?;
    if s.l1() > 1.0 + 1e-12 {
        return Err(Error::input(format!("start vector has mass {} > 1", s.l1())));
    }
    let PageRankParams { alpha, epsilon } = params;
    let n = graph.vertex_count();
    let mut p = vec![0.0; n];
    let mut r = vec![0.0; n];
    let mut queued = vec![false; n];
    let mut seen = vec![false; n];
    let mut touched: Vec<usize> = Vec::new();
    let mut queue = VecDeque::new();

    for (u, m) in s.iter() {
        r[u] = m;
        seen[u] = true;
        touched.push(u);
        if m >= epsilon * graph.degree(u) {
            queued[u] = true;
            queue.push_back(u);
        }
    }

    let mut stats = PushStats::default();
    while let Some(u) = queue.pop_front() {
        queued[u] = false;
        let deg = graph.degree(u);
        let ru = r[u];
        p[u] += alpha * ru;
        r[u] = 0.5 * (1.0 - alpha) * ru;
        let share = 0.5 * (1.0 - alpha) * ru / deg;
        let (nbrs, ws) = graph.neighbors(u);
        for (&v, &w) in nbrs.iter().zip(ws) {
            if !seen[v] {
                seen[v] = true;
                touched.push(v);
            }
            r[v] += share * w;
            if !queued[v] && r[v] >= epsilon * graph.degree(v) {
                queued[v] = true;
                queue.push_back(v);
            }
        }
        if !queued[u] && r[u] >= epsilon * deg {
            queued[u] = true;
            queue.push_back(u);
        }
        stats.push_count += 1;
        stats.work += deg;
    }

    touched.sort_unstable();
    touched.dedup();
    let mut p_out = SparseMass::new();
    let mut r_out = SparseMass::new();
    for &u in &touched {
        if p[u] > 0.0 {
            p_out.add(u, p[u]);
            stats.support_volume += graph.degree(u);
        }
        if r[u] > 0.0 {
            r_out.add(u, r[u]);
        }
    }
    Ok(ApproximatePageRank {
        p: p_out,
        r: r_out,
        stats,
    })
}
