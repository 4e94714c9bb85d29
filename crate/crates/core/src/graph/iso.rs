//! Port-preserving isomorphisms.
//!
//! In a connected port-labeled graph, fixing the image of one node fixes the
//! image of every other node: follow the same port on both sides. So each
//! anchor choice yields at most one isomorphism and a search over anchors is
//! complete.

use std::collections::VecDeque;

use super::{Edge, NodeId, PortGraph, QuotientGraph};

/// The isomorphism sending `a` in `g` to `b` in `h`, if one exists.
pub fn anchored_isomorphism(
    g: &PortGraph,
    h: &PortGraph,
    a: NodeId,
    b: NodeId,
) -> Option<Vec<NodeId>> {
    let n = g.node_count();
    if n != h.node_count() || g.edge_count() != h.edge_count() {
        return None;
    }
    let mut map = vec![usize::MAX; n];
    let mut inv = vec![usize::MAX; n];
    map[a] = b;
    inv[b] = a;
    let mut queue = VecDeque::from([a]);
    while let Some(u) = queue.pop_front() {
        let fu = map[u];
        if g.degree(u) != h.degree(fu) {
            return None;
        }
        for (&(v, q), &(fv, fq)) in g.ports(u).iter().zip(h.ports(fu)) {
            if q != fq {
                return None;
            }
            if map[v] == usize::MAX {
                if inv[fv] != usize::MAX {
                    return None;
                }
                map[v] = fv;
                inv[fv] = v;
                queue.push_back(v);
            } else if map[v] != fv {
                return None;
            }
        }
    }
    Some(map)
}

/// The isomorphism `g -> h` with the least image of node 0, if any.
pub fn isomorphism(g: &PortGraph, h: &PortGraph) -> Option<Vec<NodeId>> {
    if g.node_count() != h.node_count() {
        return None;
    }
    (0..h.node_count()).find_map(|b| anchored_isomorphism(g, h, 0, b))
}

pub fn isomorphic(g: &PortGraph, h: &PortGraph) -> bool {
    isomorphism(g, h).is_some()
}

/// All port-preserving automorphisms, ordered by the image of node 0.
pub fn automorphisms(g: &PortGraph) -> Vec<Vec<NodeId>> {
    (0..g.node_count()).filter_map(|b| anchored_isomorphism(g, g, 0, b)).collect()
}

/// Canonical form of a connected port graph: the lexicographically least
/// relabeled edge list over all breadth-first port-order relabelings.
/// Two graphs are isomorphic iff their canonical forms are equal.
pub fn canonical_form(g: &PortGraph) -> Vec<Edge> {
    (0..g.node_count())
        .map(|anchor| {
            let order = port_bfs_order(g.node_count(), anchor, |u| {
                g.ports(u).iter().map(|&(v, _)| v).collect()
            });
            let mut edges: Vec<Edge> = g
                .edges()
                .into_iter()
                .map(|e| Edge::new(order[e.u], e.pu, order[e.v], e.pv).canonical())
                .collect();
            edges.sort();
            edges
        })
        .min()
        .unwrap_or_default()
}

fn port_bfs_order(
    n: usize,
    anchor: NodeId,
    successors: impl Fn(NodeId) -> Vec<NodeId>,
) -> Vec<NodeId> {
    let mut label = vec![usize::MAX; n];
    label[anchor] = 0;
    let mut next = 1;
    let mut queue = VecDeque::from([anchor]);
    while let Some(u) = queue.pop_front() {
        for v in successors(u) {
            if label[v] == usize::MAX {
                label[v] = next;
                next += 1;
                queue.push_back(v);
            }
        }
    }
    label
}

impl QuotientGraph {
    /// Canonical form usable as a hash key: equal iff the quotients are
    /// isomorphic (edge multisets included).
    pub fn canonical_form(&self) -> (usize, Vec<Edge>) {
        let mut parts: Vec<(usize, Vec<Edge>)> = self
            .components()
            .into_iter()
            .map(|comp| {
                comp.iter()
                    .map(|&anchor| {
                        let order = port_bfs_order(self.node_count(), anchor, |u| {
                            (1..=self.port_degree(u)).map(|p| self.target(u, p)).collect()
                        });
                        let mut edges: Vec<Edge> = self
                            .edges()
                            .iter()
                            .filter(|e| order[e.u] != usize::MAX)
                            .map(|e| Edge::new(order[e.u], e.pu, order[e.v], e.pv).canonical())
                            .collect();
                        edges.sort();
                        (comp.len(), edges)
                    })
                    .min()
                    .expect("components are non-empty")
            })
            .collect();
        parts.sort();
        let mut offset = 0;
        let mut all = Vec::new();
        for (size, edges) in parts {
            all.extend(edges.into_iter().map(|e| Edge::new(e.u + offset, e.pu, e.v + offset, e.pv)));
            offset += size;
        }
        (self.node_count(), all)
    }
}

/// A node bijection `a -> b` carrying the edge multiset of `a` onto that of
/// `b`, if one exists.
pub fn quotient_isomorphism(a: &QuotientGraph, b: &QuotientGraph) -> Option<Vec<NodeId>> {
    if a.node_count() != b.node_count() || a.edges().len() != b.edges().len() {
        return None;
    }
    let mut target_edges = b.edges().to_vec();
    target_edges.sort();
    let comps = a.components();
    let mut map = vec![usize::MAX; a.node_count()];
    let mut inv = vec![usize::MAX; b.node_count()];
    if extend(a, b, &comps, 0, &mut map, &mut inv, &target_edges) {
        Some(map)
    } else {
        None
    }
}

pub fn quotient_isomorphic(a: &QuotientGraph, b: &QuotientGraph) -> bool {
    quotient_isomorphism(a, b).is_some()
}

fn extend(
    a: &QuotientGraph,
    b: &QuotientGraph,
    comps: &[Vec<NodeId>],
    idx: usize,
    map: &mut Vec<NodeId>,
    inv: &mut Vec<NodeId>,
    target_edges: &[Edge],
) -> bool {
    if idx == comps.len() {
        let mut mapped: Vec<Edge> = a
            .edges()
            .iter()
            .map(|e| Edge::new(map[e.u], e.pu, map[e.v], e.pv).canonical())
            .collect();
        mapped.sort();
        return mapped == target_edges;
    }
    let anchor = comps[idx][0];
    for cand in 0..b.node_count() {
        if inv[cand] != usize::MAX {
            continue;
        }
        let saved = (map.clone(), inv.clone());
        if propagate(a, b, anchor, cand, map, inv) && extend(a, b, comps, idx + 1, map, inv, target_edges)
        {
            return true;
        }
        *map = saved.0;
        *inv = saved.1;
    }
    false
}

fn propagate(
    a: &QuotientGraph,
    b: &QuotientGraph,
    anchor: NodeId,
    image: NodeId,
    map: &mut [NodeId],
    inv: &mut [NodeId],
) -> bool {
    map[anchor] = image;
    inv[image] = anchor;
    let mut queue = VecDeque::from([anchor]);
    while let Some(u) = queue.pop_front() {
        let fu = map[u];
        if a.port_degree(u) != b.port_degree(fu) {
            return false;
        }
        for p in 1..=a.port_degree(u) {
            let (v, fv) = (a.target(u, p), b.target(fu, p));
            if map[v] == usize::MAX {
                if inv[fv] != usize::MAX {
                    return false;
                }
                map[v] = fv;
                inv[fv] = v;
                queue.push_back(v);
            } else if map[v] != fv {
                return false;
            }
        }
    }
    true
}
