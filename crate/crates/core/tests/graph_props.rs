use kappa_core::graph::{EdgeKind, Multigraph};
use proptest::prelude::*;

fn multigraph(max_n: usize, max_m: usize, loops: bool) -> impl Strategy<Value = Multigraph> {
    (1..=max_n).prop_flat_map(move |n| {
        proptest::collection::vec((0..n, 0..n), 0..=max_m).prop_map(move |pairs| {
            let edges = pairs.into_iter().filter(|(a, b)| loops || a != b);
            Multigraph::new(n, edges).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn delete_and_contract_sizes(g in multigraph(7, 12, true)) {
        for (e, &(a, b)) in g.edges().iter().enumerate() {
            let d = g.delete_edge(e).unwrap();
            prop_assert_eq!(d.graph.edge_count(), g.edge_count() - 1);
            prop_assert_eq!(d.graph.vertex_count(), g.vertex_count());
            if a != b {
                let c = g.contract_edge(e).unwrap();
                prop_assert_eq!(c.graph.edge_count(), g.edge_count() - 1);
                prop_assert_eq!(c.graph.vertex_count(), g.vertex_count() - 1);
                prop_assert_eq!(c.graph.component_count(), g.component_count());
                for (old, new) in c.edge_map.iter().enumerate() {
                    if let Some(new) = new {
                        let (x, y) = g.edges()[old];
                        let (p, q) = (c.vertex_map[x], c.vertex_map[y]);
                        prop_assert_eq!(c.graph.edges()[*new], (p.min(q), p.max(q)));
                    }
                }
            }
        }
    }

    #[test]
    fn bridges_are_exactly_disconnecting_edges(g in multigraph(7, 12, true)) {
        let base = g.component_count();
        for (e, kind) in g.classify_edges().into_iter().enumerate() {
            let after = g.delete_edge(e).unwrap().graph.component_count();
            prop_assert_eq!(kind == EdgeKind::Bridge, after == base + 1);
            let (a, b) = g.edges()[e];
            prop_assert_eq!(kind == EdgeKind::Loop, a == b);
        }
    }

    #[test]
    fn simplify_is_idempotent(g in multigraph(6, 14, true)) {
        let once = g.simplify().graph;
        prop_assert!(once.is_simple());
        prop_assert_eq!(once.simplify().graph, once);
    }

    #[test]
    fn cycle_subgraph_has_no_bridges(g in multigraph(7, 12, false)) {
        let c = g.cycle_subgraph();
        prop_assert!(c.classify_edges().iter().all(|k| *k != EdgeKind::Bridge));
        prop_assert_eq!(c.vertex_count(), g.vertex_count());
    }

    #[test]
    fn edge_list_round_trip(g in multigraph(6, 10, true)) {
        prop_assert_eq!(Multigraph::parse_edge_list(&g.to_edge_list()).unwrap(), g);
    }
}
