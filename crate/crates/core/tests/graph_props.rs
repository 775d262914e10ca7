mod common;

use common::{arb_connected_graph, complete, cycle, path};
use nibble::graph::{set_conductance, SetConductanceMode};
use nibble::io::{read_edge_list, write_edge_list};
use nibble::{VertexSet, WeightedGraph};
use proptest::prelude::*;

fn subset(graph: &WeightedGraph, mask: u64) -> VertexSet {
    let n = graph.vertex_count();
    VertexSet::new(graph, (0..n).filter(|&u| mask >> (u % 64) & 1 == 1)).unwrap()
}

#[test]
fn volume_and_conductance_examples() {
    let c4 = cycle(4);
    assert_eq!(c4.volume(&VertexSet::all(&c4)).unwrap(), 8.0);
    assert_eq!(c4.volume(&VertexSet::empty()).unwrap(), 0.0);
    assert_eq!(c4.conductance(&VertexSet::new(&c4, [0, 1]).unwrap()).unwrap(), 0.5);
    let k4 = complete(4);
    assert_eq!(k4.conductance(&VertexSet::new(&k4, [2]).unwrap()).unwrap(), 1.0);
}

#[test]
fn induced_subgraph_examples() {
    let k4 = complete(4);
    let sub = k4.induced_subgraph(&VertexSet::new(&k4, [1, 3]).unwrap()).unwrap();
    assert_eq!(sub.graph.degrees(), &[1.0, 1.0]);
    assert_eq!(sub.host_ids, vec![1, 3]);
    let p3 = path(3);
    let sub = p3.induced_subgraph(&VertexSet::new(&p3, [0, 2]).unwrap()).unwrap();
    assert_eq!(sub.graph.degrees(), &[0.0, 0.0]);
}

#[test]
fn exact_set_conductance_examples() {
    let p4 = path(4);
    let all = VertexSet::all(&p4);
    let sc = set_conductance(&p4, &all, SetConductanceMode::Exact).unwrap();
    assert!((sc.value - 1.0 / 3.0).abs() < 1e-15 && sc.exact);
    let p3 = path(3);
    let sc = set_conductance(&p3, &VertexSet::all(&p3), SetConductanceMode::Exact).unwrap();
    assert_eq!(sc.value, 1.0);
    let two_edges = WeightedGraph::from_edges(4, [(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
    let sc = set_conductance(&two_edges, &VertexSet::all(&two_edges), SetConductanceMode::Exact).unwrap();
    assert!(sc.disconnected && sc.value == 0.0);
}

proptest! {
    #[test]
    fn conductance_is_symmetric_and_in_unit_interval(g in arb_connected_graph(24), mask in any::<u64>()) {
        let s = subset(&g, mask);
        prop_assume!(!s.is_empty() && s.len() < g.vertex_count());
        let c = s.complement(&g);
        let phi = g.conductance(&s).unwrap();
        prop_assert_eq!(phi, g.conductance(&c).unwrap());
        prop_assert!(phi > 0.0 && phi <= 1.0);
        let total = g.volume(&s).unwrap() + g.volume(&c).unwrap();
        prop_assert!((total - g.total_volume()).abs() <= 1e-12 * g.total_volume());
    }

    #[test]
    fn exact_set_conductance_never_exceeds_sweep(g in arb_connected_graph(14)) {
        let all = VertexSet::all(&g);
        let exact = set_conductance(&g, &all, SetConductanceMode::Exact).unwrap();
        let sweep = set_conductance(&g, &all, SetConductanceMode::SpectralSweep).unwrap();
        prop_assert!(exact.value <= sweep.value + 1e-12, "{} > {}", exact.value, sweep.value);
    }

    #[test]
    fn edge_list_round_trip(g in arb_connected_graph(30)) {
        let mut buf = Vec::new();
        write_edge_list(&g, None, &[], &mut buf).unwrap();
        let back = read_edge_list(&buf[..]).unwrap();
        prop_assert!(back.ids.is_none());
        let a: Vec<_> = g.edges().collect();
        let b: Vec<_> = back.graph.edges().collect();
        prop_assert_eq!(a, b);
    }
}
