use anonagents::config::{AgentPlacement, Configuration};
use anonagents::graph::{
    automorphisms, canonical_form, isomorphic, isomorphism, parse_graph, quotient_isomorphic,
    random_graph, serialize_graph, NodeId, PortGraph,
};
use anonagents::lift::random_lift;
use anonagents::protocols::{default_budget, Gather, TokenMap};
use anonagents::sim::Simulation;
use anonagents::views::{quotient, truncated_view, view_partition, views_equal};
use proptest::prelude::*;

fn graph() -> impl Strategy<Value = PortGraph> {
    (1usize..=6, 0.0f64..=1.0, any::<u64>()).prop_map(|(n, d, s)| random_graph(n, d, s).unwrap())
}

fn graph_and_perm() -> impl Strategy<Value = (PortGraph, Vec<NodeId>)> {
    graph().prop_flat_map(|g| {
        let ids: Vec<NodeId> = (0..g.node_count()).collect();
        (Just(g), Just(ids).prop_shuffle())
    })
}

/// Port-preserving: the edge at `(v, p)` lands on `(map[u], q)` when it
/// lands on `(u, q)` in `g`.
fn preserves_ports(g: &PortGraph, h: &PortGraph, map: &[NodeId]) -> bool {
    (0..g.node_count()).all(|v| {
        g.degree(v) == h.degree(map[v])
            && (1..=g.degree(v)).all(|p| {
                let (u, q) = g.neighbor(v, p);
                h.neighbor(map[v], p) == (map[u], q)
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn relabeling_keeps_the_isomorphism_class((g, perm) in graph_and_perm()) {
        let h = g.permuted(&perm);
        prop_assert!(isomorphic(&g, &h));
        prop_assert_eq!(canonical_form(&g), canonical_form(&h));
        let map = isomorphism(&g, &h).unwrap();
        prop_assert!(preserves_ports(&g, &h, &map));
    }

    #[test]
    fn automorphisms_act_freely(g in graph()) {
        let auts = automorphisms(&g);
        let n = g.node_count();
        prop_assert!(!auts.is_empty());
        prop_assert_eq!(n % auts.len(), 0);
        for a in &auts {
            prop_assert!(preserves_ports(&g, &g, a));
        }
        let fiber = view_partition(&g).blocks[0].len();
        prop_assert!(auts.len() <= fiber);
    }

    #[test]
    fn quotient_is_a_relabeling_invariant((g, perm) in graph_and_perm()) {
        let (q, classes) = quotient(&g);
        let (r, _) = quotient(&g.permuted(&perm));
        prop_assert!(quotient_isomorphic(&q, &r));
        let mut sizes = vec![0; q.node_count()];
        classes.iter().for_each(|&c| sizes[c] += 1);
        prop_assert!(sizes.iter().all(|&s| s == sizes[0]));
    }

    #[test]
    fn covers_share_the_quotient(g in graph(), copies in 1usize..=3, seed in any::<u64>()) {
        let q = quotient(&g).0;
        if let Some(cover) = random_lift(&q, copies, seed) {
            prop_assert_eq!(cover.node_count(), q.node_count() * copies);
            prop_assert!(quotient_isomorphic(&quotient(&cover).0, &q));
        }
    }

    #[test]
    fn deeper_views_refine(g in graph(), t in 0usize..6) {
        let n = g.node_count();
        for u in 0..n {
            for v in 0..n {
                let deep = views_equal(&g, u, v, t + 1);
                prop_assert!(!deep || views_equal(&g, u, v, t));
                prop_assert_eq!(views_equal(&g, u, v, t), truncated_view(&g, u, t) == truncated_view(&g, v, t));
            }
        }
    }

    #[test]
    fn text_round_trip(g in graph()) {
        prop_assert_eq!(parse_graph(&serialize_graph(&g)).unwrap(), g);
    }

    #[test]
    fn runs_are_deterministic_and_anonymous((g, perm) in graph_and_perm(), a in any::<prop::sample::Index>(), b in any::<prop::sample::Index>()) {
        let n = g.node_count();
        let starts = [a.index(n), b.index(n)];
        let place = |s: [NodeId; 2]| vec![AgentPlacement::new(s[0], 1, "2"), AgentPlacement::new(s[1], 3, "2")];
        let cfg = Configuration::new(g.clone(), place(starts)).unwrap();
        let moved = Configuration::new(g.permuted(&perm), place(starts.map(|s| perm[s]))).unwrap();
        let budget = default_budget(&cfg);
        let first = Simulation::new(&cfg, &Gather).max_rounds(budget).run().unwrap();
        let again = Simulation::new(&cfg, &Gather).max_rounds(budget).run().unwrap();
        let other = Simulation::new(&moved, &Gather).max_rounds(budget).run().unwrap();
        prop_assert_eq!(&first.decisions, &again.decisions);
        prop_assert_eq!(&first.final_positions, &again.final_positions);
        prop_assert_eq!(&first.decisions, &other.decisions);
        prop_assert_eq!(first.rounds_used, other.rounds_used);
        let mapped: Vec<NodeId> = first.final_positions.iter().map(|&v| perm[v]).collect();
        prop_assert_eq!(mapped, other.final_positions);
    }

    #[test]
    fn token_maps_match_the_graph(g in graph(), s in any::<prop::sample::Index>()) {
        let start = s.index(g.node_count());
        let cfg = Configuration::with_starts(g.clone(), &[start]).unwrap();
        let out = Simulation::new(&cfg, &TokenMap).max_rounds(1_000_000).run().unwrap();
        let map = out.final_states[0].map.clone().unwrap();
        prop_assert!(isomorphic(&map, &g));
    }
}
