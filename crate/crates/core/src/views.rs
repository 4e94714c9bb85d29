//! Truncated views and the view-equivalence partition.
//!
//! A view is stored as a DAG of shared subtrees: the depth-`t` view of a node
//! in an `n`-node graph has up to `Δ^t` tree nodes but only `n·(t+1)`
//! distinct subtrees. Every tree node records the degree of the graph node it
//! stands for, including nodes on the last level, so `V^0(v)` already
//! carries `deg(v)`.

use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;

use thiserror::Error;

use crate::graph::{Edge, NodeId, Port, PortGraph, QuotientGraph};

#[derive(Debug, PartialEq, Eq, Hash)]
pub struct ViewNode {
    degree: usize,
    /// Empty on the last level; otherwise `children[p - 1]` is the far-end
    /// port of the edge leaving through `p` and the subtree behind it.
    children: Vec<(Port, Rc<ViewNode>)>,
}

impl ViewNode {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn children(&self) -> &[(Port, Rc<ViewNode>)] {
        &self.children
    }
}

/// The depth-`depth` truncated view rooted at some node.
#[derive(Debug, Clone)]
pub struct ViewTree {
    depth: usize,
    root: Rc<ViewNode>,
}

impl ViewTree {
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn degree(&self) -> usize {
        self.root.degree
    }

    pub fn root(&self) -> &ViewNode {
        &self.root
    }

    /// Far-end port and subtree behind local port `p`; `None` on a depth-0
    /// view or for a port the root does not have.
    pub fn child(&self, p: Port) -> Option<(Port, ViewTree)> {
        let (q, sub) = self.root.children.get(p.checked_sub(1)?)?;
        Some((*q, ViewTree { depth: self.depth - 1, root: Rc::clone(sub) }))
    }

    /// The same view cut down to depth `t <= self.depth()`.
    pub fn truncate(&self, t: usize) -> ViewTree {
        assert!(t <= self.depth, "cannot deepen a view");
        let mut memo = HashMap::new();
        ViewTree { depth: t, root: truncate_node(&self.root, t, &mut memo) }
    }

    /// Number of tree nodes in the expanded tree, saturating.
    pub fn expanded_size(&self) -> u64 {
        fn go(node: &ViewNode, memo: &mut HashMap<*const ViewNode, u64>) -> u64 {
            let key = node as *const ViewNode;
            if let Some(&s) = memo.get(&key) {
                return s;
            }
            let s = node
                .children
                .iter()
                .fold(1u64, |acc, (_, c)| acc.saturating_add(go(c, memo)));
            memo.insert(key, s);
            s
        }
        go(&self.root, &mut HashMap::new())
    }
}

fn truncate_node(
    node: &Rc<ViewNode>,
    t: usize,
    memo: &mut HashMap<(*const ViewNode, usize), Rc<ViewNode>>,
) -> Rc<ViewNode> {
    let key = (Rc::as_ptr(node), t);
    if let Some(done) = memo.get(&key) {
        return Rc::clone(done);
    }
    let children = if t == 0 {
        Vec::new()
    } else {
        node.children.iter().map(|(q, c)| (*q, truncate_node(c, t - 1, memo))).collect()
    };
    let out = Rc::new(ViewNode { degree: node.degree, children });
    memo.insert(key, Rc::clone(&out));
    out
}

impl PartialEq for ViewTree {
    fn eq(&self, other: &Self) -> bool {
        if self.depth != other.depth {
            return false;
        }
        let mut interner = Interner::default();
        interner.intern(&self.root, self.depth) == interner.intern(&other.root, other.depth)
    }
}

impl Eq for ViewTree {}

impl fmt::Display for ViewTree {
    /// `(<deg> [p:q subtree]...)`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(node: &ViewNode, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            write!(f, "({}", node.degree)?;
            for (i, (q, c)) in node.children.iter().enumerate() {
                write!(f, " [{}:{} ", i + 1, q)?;
                go(c, f)?;
                write!(f, "]")?;
            }
            write!(f, ")")
        }
        go(&self.root, f)
    }
}

/// Assigns equal ids to equal truncated subtrees.
#[derive(Default)]
pub(crate) struct Interner {
    ids: HashMap<(usize, Vec<(Port, usize)>), usize>,
    memo: HashMap<(*const ViewNode, usize), usize>,
}

impl Interner {
    /// Id of `node` truncated to `height` levels below it.
    pub(crate) fn intern(&mut self, node: &Rc<ViewNode>, height: usize) -> usize {
        let key = (Rc::as_ptr(node), height);
        if let Some(&id) = self.memo.get(&key) {
            return id;
        }
        let children = if height == 0 {
            Vec::new()
        } else {
            assert!(!node.children.is_empty() || node.degree == 0, "view too shallow to intern");
            node.children.iter().map(|(q, c)| (*q, self.intern(c, height - 1))).collect()
        };
        let next = self.ids.len();
        let id = *self.ids.entry((node.degree, children)).or_insert(next);
        self.memo.insert(key, id);
        id
    }
}

/// Builds views of many nodes of one graph, sharing subtrees between them.
pub struct ViewBuilder<'g> {
    graph: &'g PortGraph,
    memo: HashMap<(NodeId, usize), Rc<ViewNode>>,
}

impl<'g> ViewBuilder<'g> {
    pub fn new(graph: &'g PortGraph) -> Self {
        ViewBuilder { graph, memo: HashMap::new() }
    }

    pub fn view(&mut self, v: NodeId, t: usize) -> ViewTree {
        ViewTree { depth: t, root: self.node(v, t) }
    }

    fn node(&mut self, v: NodeId, t: usize) -> Rc<ViewNode> {
        if let Some(done) = self.memo.get(&(v, t)) {
            return Rc::clone(done);
        }
        // build bottom-up to keep recursion shallow for deep views
        for level in 0..=t {
            if self.memo.contains_key(&(v, level)) {
                continue;
            }
            for u in 0..self.graph.node_count() {
                if self.memo.contains_key(&(u, level)) {
                    continue;
                }
                let children = if level == 0 {
                    Vec::new()
                } else {
                    self.graph
                        .ports(u)
                        .iter()
                        .map(|&(w, q)| (q, Rc::clone(&self.memo[&(w, level - 1)])))
                        .collect()
                };
                let node = Rc::new(ViewNode { degree: self.graph.degree(u), children });
                self.memo.insert((u, level), node);
            }
        }
        Rc::clone(&self.memo[&(v, t)])
    }
}

/// The depth-`t` truncated view of `g` at `v`.
pub fn truncated_view(g: &PortGraph, v: NodeId, t: usize) -> ViewTree {
    ViewBuilder::new(g).view(v, t)
}

pub fn views_equal(g: &PortGraph, u: NodeId, v: NodeId, t: usize) -> bool {
    let mut builder = ViewBuilder::new(g);
    let (a, b) = (builder.view(u, t), builder.view(v, t));
    a == b
}

/// Class index of every node under equality of depth-`t` views, computed by
/// comparing the trees themselves. Classes are numbered by least member.
pub fn view_classes_by_trees(g: &PortGraph, t: usize) -> Vec<usize> {
    let mut builder = ViewBuilder::new(g);
    let mut interner = Interner::default();
    let ids: Vec<usize> = (0..g.node_count())
        .map(|v| {
            let view = builder.view(v, t);
            interner.intern(&view.root, t)
        })
        .collect();
    renumber(&ids)
}

fn renumber<T: Eq + std::hash::Hash + Clone>(keys: &[T]) -> Vec<usize> {
    let mut seen = HashMap::new();
    keys.iter()
        .map(|k| {
            let next = seen.len();
            *seen.entry(k.clone()).or_insert(next)
        })
        .collect()
}

/// Partition of the nodes into view-equivalence classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ViewPartition {
    /// Blocks ordered by least member, members ascending.
    pub blocks: Vec<Vec<NodeId>>,
    /// `class_of[v]` is the index of the block containing `v`.
    pub class_of: Vec<usize>,
    /// First `t` with the depth-`t` partition equal to the depth-`t+1` one.
    pub stabilization_depth: usize,
}

/// One refinement step: split classes by the classes and far ports of
/// neighbors.
fn refine(g: &PortGraph, class_of: &[usize]) -> Vec<usize> {
    let sigs: Vec<(usize, Vec<(usize, Port)>)> = (0..g.node_count())
        .map(|v| (class_of[v], g.ports(v).iter().map(|&(w, q)| (class_of[w], q)).collect()))
        .collect();
    renumber(&sigs)
}

fn degree_classes(g: &PortGraph) -> Vec<usize> {
    let degrees: Vec<usize> = (0..g.node_count()).map(|v| g.degree(v)).collect();
    renumber(&degrees)
}

/// Classes of depth-`t` view equality via `t` refinement steps.
pub fn partition_at_depth(g: &PortGraph, t: usize) -> Vec<usize> {
    let mut classes = degree_classes(g);
    for _ in 0..t {
        let next = refine(g, &classes);
        if next == classes {
            break;
        }
        classes = next;
    }
    classes
}

/// Refinement to the fixpoint, starting from degree classes.
pub fn view_partition(g: &PortGraph) -> ViewPartition {
    let mut classes = degree_classes(g);
    let mut depth = 0;
    loop {
        let next = refine(g, &classes);
        if next == classes {
            break;
        }
        classes = next;
        depth += 1;
    }
    let count = classes.iter().max().map_or(0, |&m| m + 1);
    let mut blocks = vec![Vec::new(); count];
    for (v, &c) in classes.iter().enumerate() {
        blocks[c].push(v);
    }
    ViewPartition { blocks, class_of: classes, stabilization_depth: depth }
}

/// Quotient edges read off one representative per block.
pub fn quotient_with_representatives(
    g: &PortGraph,
    partition: &ViewPartition,
    reps: &[NodeId],
) -> QuotientGraph {
    let mut edges: Vec<Edge> = Vec::new();
    for (block, &u) in reps.iter().enumerate() {
        assert_eq!(partition.class_of[u], block, "representative outside its block");
        for (i, &(v, q)) in g.ports(u).iter().enumerate() {
            edges.push(Edge::new(block, i + 1, partition.class_of[v], q).canonical());
        }
    }
    edges.sort();
    edges.dedup();
    QuotientGraph::new(partition.blocks.len(), edges)
        .expect("a view partition always yields a valid quotient")
}

/// The quotient graph together with the class of every node.
pub fn quotient(g: &PortGraph) -> (QuotientGraph, Vec<usize>) {
    let partition = view_partition(g);
    let reps: Vec<NodeId> = partition.blocks.iter().map(|b| b[0]).collect();
    let q = quotient_with_representatives(g, &partition, &reps);
    (q, partition.class_of)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ViewError {
    #[error("a view of depth {0} is too shallow to reconstruct a quotient")]
    TooShallow(usize),
    #[error("the view does not determine the edge behind port {port} of quotient node {node}")]
    Ambiguous { node: usize, port: Port },
    #[error("the view is inconsistent: {0}")]
    Inconsistent(String),
}

/// Rebuilds a quotient from a single view of depth `d`.
///
/// Tree nodes within distance `d/2` of the root are grouped by their
/// depth-`d/2` subtrees; each group becomes one quotient node. Returns the
/// quotient and the node the root belongs to (always 0). Exact whenever `d`
/// is at least twice the node count of the true quotient.
pub fn quotient_from_view(view: &ViewTree) -> Result<(QuotientGraph, usize), ViewError> {
    let d = view.depth;
    let h = d / 2;
    if d == 0 {
        // only the degree is known
        if view.root.degree == 0 {
            return Ok((QuotientGraph::new(1, []).expect("valid"), 0));
        }
        return Err(ViewError::TooShallow(d));
    }
    let mut interner = Interner::default();
    // class id (interner) -> dense class index in discovery order
    let mut dense: HashMap<usize, usize> = HashMap::new();
    let mut class_nodes: Vec<(Rc<ViewNode>, usize)> = Vec::new(); // shallowest rep, its depth
    let mut frontier = vec![Rc::clone(&view.root)];
    let mut seen_ptr: HashMap<*const ViewNode, ()> = HashMap::new();
    for depth in 0..=h {
        let mut next = Vec::new();
        for node in frontier {
            if seen_ptr.insert(Rc::as_ptr(&node), ()).is_some() {
                continue;
            }
            let id = interner.intern(&node, h);
            if !dense.contains_key(&id) {
                dense.insert(id, class_nodes.len());
                class_nodes.push((Rc::clone(&node), depth));
            }
            if depth < h {
                next.extend(node.children.iter().map(|(_, c)| Rc::clone(c)));
            }
        }
        frontier = next;
        seen_ptr.clear();
    }
    let k = class_nodes.len();
    // targets[c][p-1] = (class, far port)
    let mut targets: Vec<Vec<Option<(usize, Port)>>> =
        class_nodes.iter().map(|(n, _)| vec![None; n.degree]).collect();
    for c in 0..k {
        let (node, depth) = class_nodes[c].clone();
        if depth < h {
            for (i, (q, child)) in node.children.iter().enumerate() {
                let target = dense[&interner.intern(child, h)];
                targets[c][i] = Some((target, *q));
            }
        }
    }
    // reverse fill: an edge c --p/q--> t implies t --q/p--> c
    for c in 0..k {
        for i in 0..targets[c].len() {
            if let Some((t, q)) = targets[c][i] {
                let slot = targets[t].get_mut(q - 1).ok_or_else(|| {
                    ViewError::Inconsistent(format!("port {q} missing at quotient node {t}"))
                })?;
                match *slot {
                    None => *slot = Some((c, i + 1)),
                    Some(existing) if existing != (c, i + 1) => {
                        return Err(ViewError::Inconsistent(format!(
                            "port {q} at quotient node {t} leads two ways"
                        )))
                    }
                    Some(_) => {}
                }
            }
        }
    }
    // remaining ports at classes seen only on the deepest level: match the
    // child's shallower subtree against the classes' shallower subtrees
    for c in 0..k {
        for i in 0..targets[c].len() {
            if targets[c][i].is_some() {
                continue;
            }
            let (node, depth) = class_nodes[c].clone();
            let remaining = d - depth;
            if node.children.is_empty() || remaining == 0 {
                return Err(ViewError::TooShallow(d));
            }
            let (q, child) = &node.children[i];
            let height = (remaining - 1).min(h);
            let want = interner.intern(child, height);
            let matches: Vec<usize> = (0..k)
                .filter(|&t| {
                    let (tn, td) = &class_nodes[t];
                    d - td >= height && interner.intern(tn, height) == want
                })
                .collect();
            match matches[..] {
                [t] => targets[c][i] = Some((t, *q)),
                _ => return Err(ViewError::Ambiguous { node: c, port: i + 1 }),
            }
        }
    }
    let mut edges = Vec::new();
    for (c, row) in targets.iter().enumerate() {
        for (i, slot) in row.iter().enumerate() {
            let (t, q) = slot.expect("filled above");
            edges.push(Edge::new(c, i + 1, t, q).canonical());
        }
    }
    edges.sort();
    edges.dedup();
    let q = QuotientGraph::new(k, edges).map_err(|e| ViewError::Inconsistent(e.to_string()))?;
    Ok((q, 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{consistent_cycle, path, quotient_isomorphic, sun};

    #[test]
    fn depth_zero_is_a_single_node() {
        let g = sun(3).unwrap();
        let v = truncated_view(&g, 0, 0);
        assert_eq!(v.degree(), 3);
        assert!(v.root().children().is_empty());
        assert_eq!(v.to_string(), "(3)");
    }

    #[test]
    fn k2_depth_one() {
        let v = truncated_view(&path(2).unwrap(), 0, 1);
        assert_eq!(v.to_string(), "(1 [1:1 (1)])");
    }

    #[test]
    fn cycle3_depth_two() {
        let v = truncated_view(&consistent_cycle(3).unwrap(), 0, 2);
        assert_eq!(v.root().children().len(), 2);
        assert_eq!(v.root().children()[0].0, 2);
        assert_eq!(v.root().children()[1].0, 1);
        for (_, c) in v.root().children() {
            assert_eq!(c.children().len(), 2);
        }
        assert_eq!(v.expanded_size(), 7);
    }

    #[test]
    fn truncate_matches_direct_construction() {
        let g = sun(4).unwrap();
        for t in 0..5 {
            assert_eq!(truncated_view(&g, 5, 6).truncate(t), truncated_view(&g, 5, t));
        }
    }

    #[test]
    fn views_equal_examples() {
        let c = consistent_cycle(5).unwrap();
        assert!(views_equal(&c, 0, 3, 4));
        let p = path(3).unwrap();
        assert!(!views_equal(&p, 0, 1, 0));
        assert!(!views_equal(&sun(4).unwrap(), 0, 4, 1));
    }

    #[test]
    fn partitions() {
        let c6 = view_partition(&consistent_cycle(6).unwrap());
        assert_eq!(c6.blocks, vec![vec![0, 1, 2, 3, 4, 5]]);
        assert_eq!(c6.stabilization_depth, 0);
        let s3 = view_partition(&sun(3).unwrap());
        assert_eq!(s3.blocks, vec![vec![0, 1, 2], vec![3, 4, 5]]);
    }

    #[test]
    fn named_quotients() {
        for m in 3..7 {
            let (q, _) = quotient(&consistent_cycle(m).unwrap());
            assert_eq!(q, QuotientGraph::one_loop());
            let (q, class) = quotient(&sun(m).unwrap());
            assert_eq!(q, QuotientGraph::loop_with_pendant());
            assert_eq!(class[m], 1);
        }
        let (k2, _) = quotient(&path(2).unwrap());
        assert_eq!(k2.edges(), &[Edge::new(0, 1, 0, 1)]);
    }

    #[test]
    fn quotient_from_views_of_named_graphs() {
        let c8 = consistent_cycle(8).unwrap();
        let (q, root) = quotient_from_view(&truncated_view(&c8, 3, 8)).unwrap();
        assert_eq!((q, root), (QuotientGraph::one_loop(), 0));
        let s4 = sun(4).unwrap();
        for t in [4, 5, 6] {
            let (q, _) = quotient_from_view(&truncated_view(&s4, 6, t)).unwrap();
            assert!(quotient_isomorphic(&q, &QuotientGraph::loop_with_pendant()), "t={t}");
        }
        let (q, _) = quotient_from_view(&truncated_view(&path(2).unwrap(), 0, 2)).unwrap();
        assert_eq!(q.edges(), &[Edge::new(0, 1, 0, 1)]);
    }

    #[test]
    fn singleton_views() {
        let g = PortGraph::singleton();
        let (q, _) = quotient_from_view(&truncated_view(&g, 0, 0)).unwrap();
        assert_eq!(q.node_count(), 1);
        assert!(q.edges().is_empty());
        assert_eq!(quotient(&g).0, q);
    }
}
