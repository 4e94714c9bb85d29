use thiserror::Error;

use super::{Edge, NodeId, Port};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuotientViolation {
    #[error("quotient graph has no nodes")]
    Empty,
    #[error("edge {edge} references a node outside 0..{node_count}")]
    NodeOutOfRange { edge: Edge, node_count: usize },
    #[error("edge {0} uses port 0 (ports start at 1)")]
    ZeroPort(Edge),
    #[error("port {port} at node {node} leads to both node {first} and node {second}")]
    PortNotFunctional { node: NodeId, port: Port, first: NodeId, second: NodeId },
    #[error("ports at node {node} are not 1..{degree}: port {missing} is missing")]
    PortGap { node: NodeId, degree: usize, missing: Port },
}

/// A multigraph with loops and parallel edges whose edge ends carry ports.
///
/// Edges are kept as a sorted multiset of canonical quadruples. Loops are
/// stored as `(u, p, u, q)` with `p <= q`. For every node `u` and port `p`,
/// all edge ends at `(u, p)` lead to the same node.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuotientGraph {
    edges: Vec<Edge>,
    targets: Vec<Vec<NodeId>>,
}

impl QuotientGraph {
    pub fn new(
        node_count: usize,
        edges: impl IntoIterator<Item = Edge>,
    ) -> Result<Self, QuotientViolation> {
        if node_count == 0 {
            return Err(QuotientViolation::Empty);
        }
        let mut edges: Vec<Edge> = edges.into_iter().map(Edge::canonical).collect();
        edges.sort();
        let mut slots: Vec<Vec<Option<NodeId>>> = vec![Vec::new(); node_count];
        for &e in &edges {
            if e.u >= node_count || e.v >= node_count {
                return Err(QuotientViolation::NodeOutOfRange { edge: e, node_count });
            }
            if e.pu == 0 || e.pv == 0 {
                return Err(QuotientViolation::ZeroPort(e));
            }
            for (node, port, other) in [(e.u, e.pu, e.v), (e.v, e.pv, e.u)] {
                let row = &mut slots[node];
                if row.len() < port {
                    row.resize(port, None);
                }
                match row[port - 1] {
                    None => row[port - 1] = Some(other),
                    Some(first) if first != other => {
                        return Err(QuotientViolation::PortNotFunctional {
                            node,
                            port,
                            first,
                            second: other,
                        })
                    }
                    Some(_) => {}
                }
            }
        }
        let mut targets = Vec::with_capacity(node_count);
        for (node, row) in slots.into_iter().enumerate() {
            if let Some(missing) = row.iter().position(Option::is_none) {
                let degree = row.iter().filter(|s| s.is_some()).count();
                return Err(QuotientViolation::PortGap { node, degree, missing: missing + 1 });
            }
            targets.push(row.into_iter().map(Option::unwrap).collect());
        }
        Ok(QuotientGraph { edges, targets })
    }

    /// One node with a loop labeled 1 and 2: the quotient of every
    /// consistently labeled cycle.
    pub fn one_loop() -> Self {
        QuotientGraph::new(1, [Edge::new(0, 1, 0, 2)]).expect("valid")
    }

    /// Two nodes joined by an edge (port 3 / port 1) with a 1–2 loop at the
    /// first: the quotient of every consistently labeled sun.
    pub fn loop_with_pendant() -> Self {
        QuotientGraph::new(2, [Edge::new(0, 1, 0, 2), Edge::new(0, 3, 1, 1)]).expect("valid")
    }

    pub fn node_count(&self) -> usize {
        self.targets.len()
    }

    /// Number of distinct local ports at `u`.
    pub fn port_degree(&self, u: NodeId) -> usize {
        self.targets[u].len()
    }

    pub fn target(&self, u: NodeId, p: Port) -> NodeId {
        self.targets[u][p - 1]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() == 1
    }

    /// Connected components, each listed in breadth-first order from its
    /// least node; components ordered by least node.
    pub fn components(&self) -> Vec<Vec<NodeId>> {
        let n = self.node_count();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![start];
            let mut i = 0;
            while i < comp.len() {
                let u = comp[i];
                i += 1;
                for &v in &self.targets[u] {
                    if !seen[v] {
                        seen[v] = true;
                        comp.push(v);
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    /// The simple port graph with the same edges, if there are no loops or
    /// parallel edges and the graph is connected.
    pub fn to_simple(&self) -> Option<super::PortGraph> {
        super::PortGraph::new(self.node_count(), self.edges.iter().copied()).ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_quotients_are_valid() {
        let o = QuotientGraph::one_loop();
        assert_eq!(o.node_count(), 1);
        assert_eq!(o.port_degree(0), 2);
        assert_eq!(o.target(0, 2), 0);
        let p = QuotientGraph::loop_with_pendant();
        assert_eq!(p.port_degree(0), 3);
        assert_eq!(p.port_degree(1), 1);
        assert_eq!(p.target(1, 1), 0);
        assert!(p.is_connected());
    }

    #[test]
    fn loops_are_stored_with_smaller_port_first() {
        let q = QuotientGraph::new(1, [Edge::new(0, 2, 0, 1)]).unwrap();
        assert_eq!(q.edges(), &[Edge::new(0, 1, 0, 2)]);
    }

    #[test]
    fn parallel_edges_form_a_multiset() {
        let q = QuotientGraph::new(2, [Edge::new(0, 1, 1, 1), Edge::new(0, 1, 1, 1)]).unwrap();
        assert_eq!(q.edges().len(), 2);
        assert_eq!(q.port_degree(0), 1);
    }

    #[test]
    fn ports_must_be_functional() {
        let err = QuotientGraph::new(3, [Edge::new(0, 1, 1, 1), Edge::new(0, 1, 2, 1)]).unwrap_err();
        assert!(matches!(err, QuotientViolation::PortNotFunctional { node: 0, port: 1, .. }));
    }

    #[test]
    fn port_gaps_are_rejected() {
        let err = QuotientGraph::new(1, [Edge::new(0, 1, 0, 3)]).unwrap_err();
        assert_eq!(err, QuotientViolation::PortGap { node: 0, degree: 2, missing: 2 });
    }

    #[test]
    fn disconnected_quotients_are_representable() {
        let q = QuotientGraph::new(2, [Edge::new(0, 1, 0, 1), Edge::new(1, 1, 1, 1)]).unwrap();
        assert_eq!(q.components(), vec![vec![0], vec![1]]);
        assert!(q.to_simple().is_none());
    }
}
