//! Covering graphs built from quotient multigraphs.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::{Edge, NodeId, PortGraph, QuotientGraph};

/// A random `copies`-fold cover of `q`: node `(x, i)` is `x * copies + i`,
/// every quotient edge becomes a random matching between the copies of its
/// ends. Returns `None` if the result is not a simple connected graph, or
/// if some port of `q` has more than one edge end.
pub fn random_lift(q: &QuotientGraph, copies: usize, seed: u64) -> Option<PortGraph> {
    if copies == 0 {
        return None;
    }
    let mut uses = vec![Vec::new(); q.node_count()];
    for e in q.edges() {
        uses[e.u].push(e.pu);
        if (e.u, e.pu) != (e.v, e.pv) {
            uses[e.v].push(e.pv);
        }
    }
    for ports in &mut uses {
        let before = ports.len();
        ports.sort_unstable();
        ports.dedup();
        if ports.len() != before {
            return None;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let node = |x: NodeId, i: usize| x * copies + i;
    let mut edges = Vec::new();
    for e in q.edges() {
        let mut sigma: Vec<usize> = (0..copies).collect();
        sigma.shuffle(&mut rng);
        if e.u == e.v && e.pu == e.pv {
            // one port pairs copies among themselves
            if copies % 2 == 1 {
                return None;
            }
            for pair in sigma.chunks(2) {
                edges.push(Edge::new(node(e.u, pair[0]), e.pu, node(e.u, pair[1]), e.pu));
            }
        } else {
            for (i, &j) in sigma.iter().enumerate() {
                edges.push(Edge::new(node(e.u, i), e.pu, node(e.v, j), e.pv));
            }
        }
    }
    PortGraph::new(q.node_count() * copies, edges).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::quotient_isomorphic;
    use crate::views::quotient;

    #[test]
    fn lifts_of_one_loop_are_cycles() {
        let o = QuotientGraph::one_loop();
        let mut found = 0;
        for seed in 0..20 {
            if let Some(g) = random_lift(&o, 5, seed) {
                assert!(quotient_isomorphic(&quotient(&g).0, &o));
                assert!((0..5).all(|v| g.degree(v) == 2));
                found += 1;
            }
        }
        assert!(found > 0);
    }

    #[test]
    fn half_loop_needs_an_even_cover() {
        let k2 = QuotientGraph::new(1, [Edge::new(0, 1, 0, 1)]).unwrap();
        assert!(random_lift(&k2, 3, 0).is_none());
        assert_eq!(random_lift(&k2, 2, 0).unwrap().edge_count(), 1);
    }

    #[test]
    fn sun_quotient_lifts_to_suns() {
        let p = QuotientGraph::loop_with_pendant();
        let g = (0..50).find_map(|s| random_lift(&p, 4, s)).unwrap();
        assert!(quotient_isomorphic(&quotient(&g).0, &p));
        assert_eq!(g.node_count(), 8);
    }
}
