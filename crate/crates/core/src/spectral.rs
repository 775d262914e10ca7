//! Numerical kernels shared by the PageRank oracle, the connectivity
//! estimates and the spectral sweep used for set conductance.
//!
//! Everything here works on the symmetrized lazy walk
//! `M = D^{-1/2} (D + A)/2 D^{-1/2} = (I + N)/2` with `N = D^{-1/2} A D^{-1/2}`.
//! `M` is similar to the lazy walk matrix `W = (I + D^{-1} A)/2`, is positive
//! semidefinite, and has the unit top eigenvector `sqrt(deg)/sqrt(vol)`.

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;

/// The normalized adjacency `N = D^{-1/2} A D^{-1/2}`; degree-0 rows are zero.
pub(crate) struct NormalizedAdjacency<'a> {
    graph: &'a WeightedGraph,
    inv_sqrt_deg: Vec<f64>,
}

impl<'a> NormalizedAdjacency<'a> {
    pub(crate) fn new(graph: &'a WeightedGraph) -> Self {
        let inv_sqrt_deg = (0..graph.vertex_count())
            .map(|u| {
                let d = graph.degree(u);
                if d > 0.0 {
                    1.0 / d.sqrt()
                } else {
                    0.0
                }
            })
            .collect();
        Self { graph, inv_sqrt_deg }
    }

    /// `out = N y`
    pub(crate) fn apply(&self, y: &[f64], out: &mut [f64]) {
        for (u, slot) in out.iter_mut().enumerate() {
            let (nbrs, ws) = self.graph.neighbors(u);
            let mut acc = 0.0;
            for (&v, &w) in nbrs.iter().zip(ws) {
                acc += w * self.inv_sqrt_deg[v] * y[v];
            }
            *slot = acc * self.inv_sqrt_deg[u];
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Second-largest eigenpair of the symmetrized lazy walk.
#[derive(Debug, Clone)]
pub(crate) struct SecondEigenpair {
    pub value: f64,
    /// Unit eigenvector of `M`, orthogonal to `sqrt(deg)`.
    pub vector: Vec<f64>,
}

/// Power iteration on `M` with the stationary direction projected out at
/// every step. Requires every degree to be positive.
///
/// Stops once `||M y - rho y|| <= tol`; the Rayleigh quotient is then within
/// `tol^2 / gap` of the eigenvalue it converged to.
pub(crate) fn second_eigenpair(graph: &WeightedGraph, tol: f64, max_iter: usize) -> Result<SecondEigenpair> {
    let n = graph.vertex_count();
    if n < 2 {
        return Err(Error::domain("spectral gap needs at least two vertices"));
    }
    if let Some(u) = (0..n).find(|&u| graph.degree(u) <= 0.0) {
        return Err(Error::domain(format!("vertex {u} has degree 0")));
    }
    let vol = graph.total_volume();
    let top: Vec<f64> = (0..n).map(|u| (graph.degree(u) / vol).sqrt()).collect();
    let deflate = |y: &mut [f64]| {
        let c = dot(&top, y);
        for (yi, ti) in y.iter_mut().zip(&top) {
            *yi -= c * ti;
        }
    };

    let adj = NormalizedAdjacency::new(graph);
    // Deterministic, non-symmetric start so that no eigen-direction is
    // missed on symmetric graphs.
    let mut y: Vec<f64> = (0..n)
        .map(|u| ((u as f64 + 1.0) * 0.618_033_988_749_895).fract() - 0.5 + 1e-3 * u as f64)
        .collect();
    deflate(&mut y);
    let ny = norm(&y);
    if ny == 0.0 {
        return Err(Error::domain("degenerate start vector"));
    }
    y.iter_mut().for_each(|v| *v /= ny);

    let mut ny_buf = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for _ in 0..max_iter {
        adj.apply(&y, &mut ny_buf);
        for i in 0..n {
            z[i] = 0.5 * (y[i] + ny_buf[i]);
        }
        deflate(&mut z);
        let rho = dot(&y, &z);
        residual = y
            .iter()
            .zip(&z)
            .map(|(yi, zi)| (zi - rho * yi).powi(2))
            .sum::<f64>()
            .sqrt();
        if residual <= tol {
            return Ok(SecondEigenpair { value: rho, vector: y });
        }
        let nz = norm(&z);
        if nz == 0.0 {
            // y lies in the null space: the second eigenvalue is 0.
            return Ok(SecondEigenpair { value: 0.0, vector: y });
        }
        for i in 0..n {
            y[i] = z[i] / nz;
        }
    }
    Err(Error::NotConverged {
        what: "power iteration",
        iterations: max_iter,
        residual,
    })
}

/// Dense symmetric eigensolve of `M`; returns the eigenvalues in descending
/// order. Used as an independent oracle for the power iteration.
pub(crate) fn dense_lazy_spectrum(graph: &WeightedGraph) -> Result<Vec<f64>> {
    let n = graph.vertex_count();
    if let Some(u) = (0..n).find(|&u| graph.degree(u) <= 0.0) {
        return Err(Error::domain(format!("vertex {u} has degree 0")));
    }
    let mut m = nalgebra::DMatrix::<f64>::zeros(n, n);
    for u in 0..n {
        m[(u, u)] = 0.5;
        let (nbrs, ws) = graph.neighbors(u);
        for (&v, &w) in nbrs.iter().zip(ws) {
            m[(u, v)] += 0.5 * w / (graph.degree(u) * graph.degree(v)).sqrt();
        }
    }
    let eig = nalgebra::SymmetricEigen::new(m);
    let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

/// Solves the PageRank fixed point `pr = alpha s + (1 - alpha) pr W` by
/// conjugate gradients on the symmetric positive definite system
///
/// `((1 + alpha)/2 I - (1 - alpha)/2 N) z = alpha D^{-1/2} s`, `pr = D^{1/2} z`.
///
/// The system matrix has spectrum inside `[alpha, 1]`. Entries of `s` on
/// degree-0 vertices must be zero; those vertices get zero mass.
pub(crate) fn solve_pagerank(graph: &WeightedGraph, s: &[f64], alpha: f64, rel_tol: f64) -> Result<Vec<f64>> {
    let n = graph.vertex_count();
    let adj = NormalizedAdjacency::new(graph);
    let sqrt_deg: Vec<f64> = (0..n).map(|u| graph.degree(u).sqrt()).collect();
    let b: Vec<f64> = (0..n)
        .map(|u| {
            if sqrt_deg[u] > 0.0 {
                alpha * s[u] / sqrt_deg[u]
            } else {
                0.0
            }
        })
        .collect();
    let b_norm = norm(&b);
    if b_norm == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let diag = 0.5 * (1.0 + alpha);
    let off = 0.5 * (1.0 - alpha);
    let mut scratch = vec![0.0; n];
    let mut apply = |y: &[f64], out: &mut [f64]| {
        adj.apply(y, &mut scratch);
        for i in 0..n {
            out[i] = diag * y[i] - off * scratch[i];
        }
    };

    let mut z = vec![0.0; n];
    let mut r = b.clone();
    let mut d = r.clone();
    let mut bd = vec![0.0; n];
    let mut rr = dot(&r, &r);
    let target = rel_tol * b_norm;
    // CG needs about sqrt(cond) ln(1/tol) steps and cond <= 1/alpha; extra
    // room covers loss of orthogonality in floating point
    let max_iter = 20 * n + 1000 + (200.0 / alpha.sqrt()) as usize;
    let mut iterations = 0;
    while rr.sqrt() > target && iterations < max_iter {
        apply(&d, &mut bd);
        let step = rr / dot(&d, &bd);
        for i in 0..n {
            z[i] += step * d[i];
            r[i] -= step * bd[i];
        }
        let rr_next = dot(&r, &r);
        let beta = rr_next / rr;
        for i in 0..n {
            d[i] = r[i] + beta * d[i];
        }
        rr = rr_next;
        iterations += 1;
    }
    if rr.sqrt() > target {
        return Err(Error::NotConverged {
            what: "conjugate gradient PageRank solve",
            iterations,
            residual: rr.sqrt() / b_norm,
        });
    }
    Ok(z.iter().zip(&sqrt_deg).map(|(zi, sd)| zi * sd).collect())
}
