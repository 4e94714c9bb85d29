//! The standard graph corpus: every valid graph up to four nodes, named
//! families at five to eight nodes and seeded random graphs at five and six.

use std::collections::BTreeSet;

use crate::graph::{
    canonical_form, complete, consistent_cycle, enumerate_connected, path, random_graph, star, sun,
    PortGraph, MAX_ENUMERATION_NODES,
};

pub const DEFAULT_SEED: u64 = 0xC0FFEE;
pub const RANDOM_COUNT: usize = 64;
pub const RANDOM_DENSITY: f64 = 0.3;

#[derive(Debug, Clone)]
pub struct CorpusGraph {
    pub name: String,
    pub graph: PortGraph,
}

impl CorpusGraph {
    fn new(name: impl Into<String>, graph: PortGraph) -> Self {
        CorpusGraph { name: name.into(), graph }
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }
}

/// Every valid graph on `1..=max_n` nodes (`max_n <= 4`), in enumeration
/// order, named `enum-<n>-<index>`.
pub fn exhaustive(max_n: usize) -> Vec<CorpusGraph> {
    let mut out = Vec::new();
    for n in 1..=max_n.min(MAX_ENUMERATION_NODES) {
        let graphs = enumerate_connected(n).expect("size within the enumeration limit");
        out.extend(graphs.into_iter().enumerate().map(|(i, g)| CorpusGraph::new(format!("enum-{n}-{i}"), g)));
    }
    out
}

/// Keeps the first graph of every isomorphism class. Agents cannot tell
/// isomorphic graphs apart, so protocol suites run on these only.
pub fn up_to_isomorphism(graphs: Vec<CorpusGraph>) -> Vec<CorpusGraph> {
    let mut seen = BTreeSet::new();
    graphs
        .into_iter()
        .filter(|c| seen.insert((c.node_count(), canonical_form(&c.graph))))
        .collect()
}

/// Cycles, suns, paths, stars and complete graphs with 5 to 8 nodes.
pub fn named() -> Vec<CorpusGraph> {
    let mut out = Vec::new();
    for n in 5..=8 {
        out.push(CorpusGraph::new(format!("cycle-{n}"), consistent_cycle(n).expect("n >= 3")));
        out.push(CorpusGraph::new(format!("path-{n}"), path(n).expect("n >= 1")));
        out.push(CorpusGraph::new(format!("star-{n}"), star(n).expect("n >= 2")));
    }
    out.push(CorpusGraph::new("sun-3", sun(3).expect("m >= 3")));
    out.push(CorpusGraph::new("sun-4", sun(4).expect("m >= 3")));
    out.push(CorpusGraph::new("complete-5", complete(5).expect("n >= 1")));
    out
}

/// `count` random graphs alternating between 5 and 6 nodes; graph `i`
/// uses seed `seed + i`.
pub fn random(count: usize, seed: u64) -> Vec<CorpusGraph> {
    (0..count)
        .map(|i| {
            let n = 5 + i % 2;
            let s = seed.wrapping_add(i as u64);
            let g = random_graph(n, RANDOM_DENSITY, s).expect("valid parameters");
            CorpusGraph::new(format!("random-{n}-{s:#x}"), g)
        })
        .collect()
}

/// Exhaustive graphs up to four nodes followed by the 64 seeded random ones.
pub fn standard(seed: u64) -> Vec<CorpusGraph> {
    let mut out = exhaustive(MAX_ENUMERATION_NODES);
    out.extend(random(RANDOM_COUNT, seed));
    out
}

/// [`standard`] plus the named families.
pub fn extended(seed: u64) -> Vec<CorpusGraph> {
    let mut out = standard(seed);
    out.extend(named());
    out
}
