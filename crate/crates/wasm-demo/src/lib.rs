//! WebAssembly bindings for the browser demo. Results cross the boundary as
//! JSON strings.

use nibble::eval::cluster_metrics;
use nibble::generators::{experiment1_graph, hard_instance, Experiment1Config, GeneratedGraph, HardInstanceSpec};
use nibble::nibble::page_rank_nibble;
use nibble::oracles::recipe_c0;
use nibble::pagerank::{approximate_pagerank, exact_pagerank_of};
use nibble::sweep::best_sweep_cut;
use nibble::{LsCurve, NibbleParams, PageRankParams, SparseMass, SweepProfile};
use serde_json::json;
use wasm_bindgen::prelude::*;

fn js_err(e: nibble::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// A planted three-block benchmark graph; block `A` is vertices `0..300`.
#[wasm_bindgen]
pub struct Planted {
    generated: GeneratedGraph,
}

#[wasm_bindgen]
impl Planted {
    #[wasm_bindgen(constructor)]
    pub fn new(beta: f64, rng_seed: u32) -> Result<Planted, JsError> {
        let generated = experiment1_graph(&Experiment1Config::new(beta, rng_seed.into())).map_err(js_err)?;
        Ok(Planted { generated })
    }

    #[wasm_bindgen(getter)]
    pub fn summary(&self) -> Result<String, JsError> {
        let g = &self.generated.graph;
        let phi_a = g.conductance(&self.generated.truth).map_err(js_err)?;
        Ok(json!({
            "vertices": g.vertex_count(),
            "edges": g.edge_count(),
            "target_size": self.generated.truth.len(),
            "target_volume": self.generated.truth.volume(),
            "target_phi": phi_a,
        })
        .to_string())
    }

    /// Sweep profile and Lovász–Simonovits curve of the approximate
    /// PageRank vector from `seed`.
    pub fn sweep(&self, seed: usize, alpha: f64, epsilon: f64) -> Result<String, JsError> {
        let g = &self.generated.graph;
        let params = PageRankParams::new(alpha, epsilon).map_err(js_err)?;
        let apr = approximate_pagerank(g, &SparseMass::indicator(seed), params).map_err(js_err)?;
        let profile = SweepProfile::build(g, &apr.p).map_err(js_err)?;
        let prefixes: Vec<_> = (0..profile.len())
            .filter_map(|j| profile.prefix_conductance(j).map(|phi| (profile.prefix_volume(j), phi)))
            .collect();
        let curve: Vec<_> = LsCurve::from_profile(&profile).breakpoints().collect();
        let best = best_sweep_cut(&profile, None).map_err(js_err)?;
        let hits = best.set.intersection_len(&self.generated.truth);
        Ok(json!({
            "pushes": apr.stats.push_count,
            "support": apr.p.len(),
            "total_volume": g.total_volume(),
            "prefixes": prefixes,
            "curve": curve,
            "best": { "size": best.set.len(), "volume": best.set.volume(), "phi": best.phi, "in_target": hits },
        })
        .to_string())
    }

    /// PageRank-Nibble from `seed` with the quality of its output against `A`.
    pub fn cluster(&self, seed: usize, conn: f64, vol0: f64) -> Result<String, JsError> {
        let g = &self.generated.graph;
        let r = page_rank_nibble(g, &NibbleParams::new(seed, conn, vol0)).map_err(js_err)?;
        let m = cluster_metrics(g, &r.output_set, &self.generated.truth).map_err(js_err)?;
        Ok(json!({
            "alpha": r.alpha,
            "epsilon": r.epsilon,
            "candidates": r.candidates,
            "phi": r.phi,
            "size": r.output_set.len(),
            "precision": m.precision,
            "recall": m.recall,
            "accuracy": m.accuracy,
            "set": r.output_set.ids(),
        })
        .to_string())
    }
}

/// Exact PageRank from `a` on the two-chain instance, normalized by degree,
/// along the top chain and the bottom chain.
#[wasm_bindgen]
pub fn hard_instance_profile(ell: usize, phi_ell2: f64, gamma: f64) -> Result<String, JsError> {
    let spec = HardInstanceSpec {
        ell,
        n: 1e10,
        phi: phi_ell2 / (ell * ell) as f64,
        c0: recipe_c0(gamma).map_err(js_err)?,
    };
    let h = hard_instance(&spec).map_err(js_err)?;
    let g = &h.generated.graph;
    let alpha = gamma / (ell * ell) as f64;
    let pr = exact_pagerank_of(g, &SparseMass::indicator(h.a), alpha, 1e-13).map_err(js_err)?;
    let norm = |u: usize| pr[u] / g.degree(u);
    Ok(json!({
        "alpha": alpha,
        "vertices": g.vertex_count(),
        "top": (h.a..=h.c).map(norm).collect::<Vec<_>>(),
        "bottom": (h.d..=h.e).map(norm).collect::<Vec<_>>(),
        "c": norm(h.c),
        "d": norm(h.d),
    })
    .to_string())
}
