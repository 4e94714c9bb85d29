//! Port-labeled graphs and the quotient multigraphs obtained by merging
//! nodes with identical views.
//!
//! Node indices exist only on the host side (storage, I/O, traces). Agents
//! never see them: the simulator exposes degrees and port numbers only.

mod generators;
mod iso;
mod quotient;
mod text;

pub(crate) use text::{logical_lines, parse_block};

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use generators::{
    complete, consistent_cycle, enumerate_connected, generate, path, random_graph, star, sun, GENERATORS,
    MAX_ENUMERATION_NODES,
};
pub use iso::{
    anchored_isomorphism, automorphisms, canonical_form, isomorphic, isomorphism,
    quotient_isomorphic, quotient_isomorphism,
};
pub use quotient::{QuotientGraph, QuotientViolation};
pub use text::{
    parse_graph, parse_quotient, serialize_graph, serialize_graph_compact, serialize_quotient,
    serialize_quotient_compact,
};

pub type NodeId = usize;
pub type Port = usize;

/// One edge `{u, v}` with port `pu` at `u` and port `pv` at `v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub u: NodeId,
    pub pu: Port,
    pub v: NodeId,
    pub pv: Port,
}

impl Edge {
    pub const fn new(u: NodeId, pu: Port, v: NodeId, pv: Port) -> Self {
        Edge { u, pu, v, pv }
    }

    pub const fn flipped(self) -> Self {
        Edge { u: self.v, pu: self.pv, v: self.u, pv: self.pu }
    }

    /// Orientation with `(u, pu) <= (v, pv)`; for simple graphs this puts the
    /// smaller node first, for loops the smaller port first.
    pub fn canonical(self) -> Self {
        if (self.u, self.pu) <= (self.v, self.pv) {
            self
        } else {
            self.flipped()
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})-({},{})", self.u, self.pu, self.v, self.pv)
    }
}

/// The first broken invariant found by [`validate`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("graph has no nodes")]
    Empty,
    #[error("edge {edge} references a node outside 0..{node_count}")]
    NodeOutOfRange { edge: Edge, node_count: usize },
    #[error("edge {0} is a loop")]
    Loop(Edge),
    #[error("edge {0} uses port 0 (ports start at 1)")]
    ZeroPort(Edge),
    #[error("nodes {0} and {1} are joined by more than one edge")]
    ParallelEdge(NodeId, NodeId),
    #[error("port {port} is used twice at node {node}")]
    DuplicatePort { node: NodeId, port: Port },
    #[error("ports at node {node} are not 1..{degree}: port {missing} is missing")]
    PortGap { node: NodeId, degree: usize, missing: Port },
    #[error("graph is not connected: node {0} is unreachable from node 0")]
    Disconnected(NodeId),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("invalid graph: {0}")]
    Invalid(#[from] Violation),
    #[error("invalid quotient graph: {0}")]
    InvalidQuotient(#[from] QuotientViolation),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{0}")]
    Parameter(String),
}

/// Checks every port-labeled graph invariant and reports the first failure.
pub fn validate(node_count: usize, edges: &[Edge]) -> Result<(), Violation> {
    build_adjacency(node_count, edges).map(|_| ())
}

fn build_adjacency(
    node_count: usize,
    edges: &[Edge],
) -> Result<Vec<Vec<(NodeId, Port)>>, Violation> {
    if node_count == 0 {
        return Err(Violation::Empty);
    }
    let mut slots: Vec<Vec<Option<(NodeId, Port)>>> = vec![Vec::new(); node_count];
    let mut seen_pairs = std::collections::HashSet::new();
    for &e in edges {
        if e.u >= node_count || e.v >= node_count {
            return Err(Violation::NodeOutOfRange { edge: e, node_count });
        }
        if e.u == e.v {
            return Err(Violation::Loop(e));
        }
        if e.pu == 0 || e.pv == 0 {
            return Err(Violation::ZeroPort(e));
        }
        if !seen_pairs.insert((e.u.min(e.v), e.u.max(e.v))) {
            return Err(Violation::ParallelEdge(e.u.min(e.v), e.u.max(e.v)));
        }
        for (node, port, other, far) in [(e.u, e.pu, e.v, e.pv), (e.v, e.pv, e.u, e.pu)] {
            let row = &mut slots[node];
            if row.len() < port {
                row.resize(port, None);
            }
            if row[port - 1].is_some() {
                return Err(Violation::DuplicatePort { node, port });
            }
            row[port - 1] = Some((other, far));
        }
    }
    let mut adj = Vec::with_capacity(node_count);
    for (node, row) in slots.into_iter().enumerate() {
        let degree = row.iter().filter(|s| s.is_some()).count();
        if let Some(missing) = row.iter().position(Option::is_none) {
            return Err(Violation::PortGap { node, degree, missing: missing + 1 });
        }
        adj.push(row.into_iter().map(Option::unwrap).collect::<Vec<_>>());
    }
    let mut seen = vec![false; node_count];
    seen[0] = true;
    let mut queue = VecDeque::from([0]);
    while let Some(u) = queue.pop_front() {
        for &(v, _) in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    if let Some(unreached) = seen.iter().position(|s| !s) {
        return Err(Violation::Disconnected(unreached));
    }
    Ok(adj)
}

/// A simple connected undirected graph with ports `1..=deg(v)` at every node.
///
/// `adj[v][p - 1]` is the neighbor reached through port `p` of `v` together
/// with the port number at that neighbor.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PortGraph {
    adj: Vec<Vec<(NodeId, Port)>>,
}

impl PortGraph {
    pub fn new(node_count: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Self, Violation> {
        let edges: Vec<Edge> = edges.into_iter().collect();
        Ok(PortGraph { adj: build_adjacency(node_count, &edges)? })
    }

    /// The one-node graph.
    pub fn singleton() -> Self {
        PortGraph { adj: vec![Vec::new()] }
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Neighbor through port `p` of `v` and the port at which the edge arrives.
    ///
    /// Panics if `p` is not in `1..=deg(v)`.
    pub fn neighbor(&self, v: NodeId, p: Port) -> (NodeId, Port) {
        self.adj[v][p - 1]
    }

    pub fn try_neighbor(&self, v: NodeId, p: Port) -> Option<(NodeId, Port)> {
        p.checked_sub(1).and_then(|i| self.adj[v].get(i).copied())
    }

    pub fn ports(&self, v: NodeId) -> &[(NodeId, Port)] {
        &self.adj[v]
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges with `u < v`, sorted.
    pub fn edges(&self) -> Vec<Edge> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (u, row) in self.adj.iter().enumerate() {
            for (i, &(v, pv)) in row.iter().enumerate() {
                if u < v {
                    out.push(Edge::new(u, i + 1, v, pv));
                }
            }
        }
        out.sort();
        out
    }

    /// Renames node `v` to `perm[v]`; ports are unchanged.
    pub fn permuted(&self, perm: &[NodeId]) -> PortGraph {
        let n = self.node_count();
        assert_eq!(perm.len(), n, "permutation length must match node count");
        let mut adj = vec![Vec::new(); n];
        for (v, row) in self.adj.iter().enumerate() {
            adj[perm[v]] = row.iter().map(|&(w, q)| (perm[w], q)).collect();
        }
        PortGraph { adj }
    }

    pub fn is_tree(&self) -> bool {
        self.edge_count() + 1 == self.node_count()
    }

    /// Breadth-first distances from `source`.
    pub fn distances_from(&self, source: NodeId) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.node_count()];
        dist[source] = 0;
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            for &(v, _) in &self.adj[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// The graph seen as a quotient multigraph (no loops, no parallel edges).
    pub fn to_quotient(&self) -> QuotientGraph {
        QuotientGraph::new(self.node_count(), self.edges())
            .expect("a valid port graph is a valid quotient graph")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k2_is_valid() {
        assert_eq!(validate(2, &[Edge::new(0, 1, 1, 1)]), Ok(()));
    }

    #[test]
    fn isolated_nodes_are_disconnected() {
        assert_eq!(validate(2, &[]), Err(Violation::Disconnected(1)));
    }

    #[test]
    fn port_gap_is_reported_at_the_center() {
        let edges = [Edge::new(1, 1, 0, 1), Edge::new(1, 3, 2, 1)];
        assert_eq!(
            validate(3, &edges),
            Err(Violation::PortGap { node: 1, degree: 2, missing: 2 })
        );
    }

    #[test]
    fn structural_violations() {
        assert_eq!(validate(0, &[]), Err(Violation::Empty));
        assert!(matches!(validate(2, &[Edge::new(0, 1, 0, 2)]), Err(Violation::Loop(_))));
        assert!(matches!(validate(2, &[Edge::new(0, 0, 1, 1)]), Err(Violation::ZeroPort(_))));
        assert_eq!(
            validate(2, &[Edge::new(0, 1, 1, 2), Edge::new(0, 2, 1, 1)]),
            Err(Violation::ParallelEdge(0, 1))
        );
        assert_eq!(
            validate(3, &[Edge::new(0, 1, 1, 1), Edge::new(0, 1, 2, 1)]),
            Err(Violation::DuplicatePort { node: 0, port: 1 })
        );
        assert!(matches!(
            validate(2, &[Edge::new(0, 1, 5, 1)]),
            Err(Violation::NodeOutOfRange { .. })
        ));
    }

    #[test]
    fn singleton_is_valid() {
        assert_eq!(validate(1, &[]), Ok(()));
        assert_eq!(PortGraph::singleton().node_count(), 1);
    }

    #[test]
    fn edges_are_canonical() {
        let g = PortGraph::new(2, [Edge::new(1, 1, 0, 1)]).unwrap();
        assert_eq!(g.edges(), vec![Edge::new(0, 1, 1, 1)]);
        assert_eq!(g.neighbor(0, 1), (1, 1));
        assert_eq!(g.try_neighbor(0, 2), None);
        assert_eq!(g.try_neighbor(0, 0), None);
    }
}
