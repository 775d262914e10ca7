mod common;

use common::{arb_connected_graph, two_cliques};
use nibble::eval::{
    beta_sweep_experiment, cluster_metrics, seed_sweep, BetaSweepConfig, SeedSweepConfig, SeedThresholds,
};
use nibble::io::{read_vertex_ids, write_vertex_ids};
use nibble::{NibbleParams, VertexSet, WeightedGraph};
use proptest::prelude::*;

fn subset(g: &WeightedGraph, mask: u64) -> VertexSet {
    VertexSet::new(g, (0..g.vertex_count()).filter(|&u| mask >> (u % 64) & 1 == 1)).unwrap()
}

#[test]
fn identity_and_disjoint_examples() {
    let g = two_cliques(10);
    let a = VertexSet::new(&g, 0..10).unwrap();
    let r = cluster_metrics(&g, &a, &a).unwrap();
    assert_eq!((r.precision, r.recall, r.accuracy), (Some(1.0), 1.0, 1.0));
    assert_eq!((r.vol_out, r.vol_miss), (0.0, 0.0));
    let b = VertexSet::new(&g, 10..20).unwrap();
    let r = cluster_metrics(&g, &b, &a).unwrap();
    assert_eq!((r.precision, r.recall), (Some(0.0), 0.0));
    let r = cluster_metrics(&g, &VertexSet::empty(), &a).unwrap();
    assert_eq!(r.precision, None);
}

proptest! {
    #[test]
    fn metrics_survive_serialization_bit_for_bit(g in arb_connected_graph(30), ms in any::<u64>(), ma in any::<u64>()) {
        let (s, a) = (subset(&g, ms), subset(&g, ma));
        prop_assume!(!a.is_empty() && a.len() < g.vertex_count());
        let report = cluster_metrics(&g, &s, &a).unwrap();
        let reload = |set: &VertexSet| {
            let mut buf = Vec::new();
            write_vertex_ids(set.ids(), &["echo".into()], &mut buf).unwrap();
            VertexSet::new(&g, read_vertex_ids(&buf[..]).unwrap()).unwrap()
        };
        let again = cluster_metrics(&g, &reload(&s), &reload(&a)).unwrap();
        prop_assert_eq!(&report, &again);
        let json = serde_json::to_string(&report).unwrap();
        let back: nibble::eval::ClusterReport = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(report, back);
    }

    #[test]
    fn accuracy_is_one_iff_sets_match(g in arb_connected_graph(30), ms in any::<u64>(), ma in any::<u64>()) {
        let (s, a) = (subset(&g, ms), subset(&g, ma));
        prop_assume!(!a.is_empty() && a.len() < g.vertex_count());
        let r = cluster_metrics(&g, &s, &a).unwrap();
        prop_assert_eq!(r.accuracy == 1.0, s == a);
        for x in [r.recall, r.accuracy] {
            prop_assert!((0.0..=1.0).contains(&x));
        }
        prop_assert!(r.vol_out >= 0.0 && r.vol_miss >= 0.0);
    }
}

fn sweep_fraction(t: SeedThresholds) -> f64 {
    let g = two_cliques(10);
    let a = VertexSet::new(&g, 0..10).unwrap();
    let mut params = NibbleParams::new(0, 0.5, 64.0);
    params.alpha_override = Some(0.05);
    seed_sweep(&g, &a, &SeedSweepConfig::new(params, t)).unwrap().fraction
}

#[test]
fn seed_sweep_fraction_examples_and_monotonicity() {
    let generous = SeedThresholds {
        vol_out: 1.0,
        vol_miss: 1.0,
        phi: 1.0,
    };
    assert_eq!(sweep_fraction(generous), 1.0);
    assert_eq!(
        sweep_fraction(SeedThresholds {
            vol_out: 0.0,
            vol_miss: 0.0,
            phi: 0.0
        }),
        0.0
    );
    let grid = [0.0, 0.01, 0.05, 0.2, 1.0];
    let base = SeedThresholds {
        vol_out: 0.05,
        vol_miss: 0.05,
        phi: 0.05,
    };
    for field in 0..3 {
        let mut last = 0.0;
        for &t in &grid {
            let mut th = base;
            match field {
                0 => th.vol_out = t,
                1 => th.vol_miss = t,
                _ => th.phi = t,
            }
            let f = sweep_fraction(th);
            assert!(f >= last, "threshold {field} = {t}: {f} < {last}");
            last = f;
        }
    }
}

#[test]
fn beta_sweep_table_shape_and_determinism() {
    let mut config = BetaSweepConfig::new(vec![0.0, 1.0], 2, 5);
    config.alpha_grid = vec![0.01, 0.1];
    let a = beta_sweep_experiment(&config).unwrap();
    assert_eq!(a.rows.len(), 2);
    assert_eq!(a.runs.len(), 4);
    assert_eq!(a.rows.iter().map(|r| r.runs).sum::<usize>(), 4);
    let b = beta_sweep_experiment(&config).unwrap();
    assert_eq!(a, b);
    assert!(beta_sweep_experiment(&BetaSweepConfig::new(vec![0.0], 1, 5)).is_err());
}
