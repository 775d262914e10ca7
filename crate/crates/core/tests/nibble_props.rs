mod common;

use common::{arb_connected_graph, two_cliques};
use nibble::generators::{experiment1_graph, Experiment1Config};
use nibble::nibble::{candidate_prefixes, nibble_auto, page_rank_nibble};
use nibble::pagerank::approximate_pagerank;
use nibble::sweep::{threshold_set, SweepProfile};
use nibble::{Error, NibbleMode, NibbleParams, PageRankParams, SparseMass};
use proptest::prelude::*;

#[test]
fn two_cliques_recover_the_seed_clique() {
    let g = two_cliques(10);
    for seed in 0..10 {
        let r = page_rank_nibble(&g, &NibbleParams::new(seed, 0.5, 91.0)).unwrap();
        assert_eq!(r.output_set.ids(), (0..10).collect::<Vec<_>>().as_slice());
        assert!((r.phi - 1.0 / 91.0).abs() < 1e-15);
        assert_eq!(r.mode, NibbleMode::GapMode);
    }
}

#[test]
fn identical_modes_tie_toward_gap_mode() {
    let g = two_cliques(10);
    // gap alpha = min(0.9, 1/9) and classic alpha = 1/9: identical runs
    let mut params = NibbleParams::new(2, 0.9, 91.0);
    params.alpha_scale = 1.0;
    let r = nibble_auto(&g, &params, 1.0 / 9.0, 1.0).unwrap();
    assert_eq!(r.mode, NibbleMode::GapMode);
}

#[test]
fn unit_alpha_keeps_the_seed_or_fails() {
    let g = two_cliques(10);
    let mut params = NibbleParams::new(0, 0.5, 9.0);
    params.alpha_override = Some(1.0);
    let r = page_rank_nibble(&g, &params).unwrap();
    assert_eq!(r.output_set.ids(), &[0]);
    params.vol0 = 0.5;
    assert!(matches!(
        page_rank_nibble(&g, &params),
        Err(Error::NoCandidateCut { .. })
    ));
}

proptest! {
    #[test]
    fn nibble_invariants(
        g in arb_connected_graph(40),
        seed_pick in any::<usize>(),
        conn in 0.05f64..1.0,
        vol_frac in 0.05f64..0.5,
    ) {
        let seed = seed_pick % g.vertex_count();
        let vol0 = vol_frac * g.total_volume();
        prop_assume!(vol0 >= 1.0);
        let params = NibbleParams::new(seed, conn, vol0);
        let alpha = params.alpha();
        match page_rank_nibble(&g, &params) {
            Ok(r) => {
                prop_assert!(r.stats.work <= 10.0 * vol0 / alpha);
                let phi = g.conductance(&r.output_set).unwrap();
                prop_assert!((phi - r.phi).abs() <= 1e-12, "{} vs {}", phi, r.phi);
            }
            Err(Error::NoCandidateCut { .. }) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
        // the scanned threshold sets are nested
        let apr = approximate_pagerank(&g, &SparseMass::indicator(seed), PageRankParams::new(alpha, params.epsilon()).unwrap()).unwrap();
        if !apr.p.is_empty() {
            let profile = SweepProfile::build(&g, &apr.p).unwrap();
            let lens = candidate_prefixes(&profile, vol0, params.c_min, params.c_max);
            prop_assert!(lens.windows(2).all(|w| w[0] < w[1]));
            for w in lens.windows(2) {
                let (a, b) = (profile.prefix_set(w[0]), profile.prefix_set(w[1]));
                prop_assert!(a.ids().iter().all(|u| b.contains(*u)));
            }
        }
    }
}

/// Threshold sets in the window `c in [1/8, 1/4]` started from seeds in the
/// planted block stay close to it: `vol(S_c \ A) / vol(A) <= 2 phi(A) / (alpha c)`.
#[test]
fn threshold_sets_leak_little_volume_on_planted_graphs() {
    let mut held = 0;
    let mut total = 0;
    for graph_seed in 0..3 {
        let gen = experiment1_graph(&Experiment1Config::new(1.0, graph_seed)).unwrap();
        let (g, a) = (&gen.graph, &gen.truth);
        let phi_a = g.conductance(a).unwrap();
        let vol_a = a.volume();
        let alpha = 0.05;
        for seed in (0..300).step_by(30) {
            let apr = approximate_pagerank(
                g,
                &SparseMass::indicator(seed),
                PageRankParams::new(alpha, 1.0 / (10.0 * vol_a)).unwrap(),
            )
            .unwrap();
            for c in [0.125, 0.25] {
                let s = threshold_set(g, &apr.p, c, vol_a).unwrap();
                let outside: f64 = s.ids().iter().filter(|&&u| !a.contains(u)).map(|&u| g.degree(u)).sum();
                total += 1;
                if outside / vol_a <= 2.0 * phi_a / (alpha * c) {
                    held += 1;
                }
            }
        }
    }
    assert!(2 * held > total, "bound held in {held} of {total} cases");
}
