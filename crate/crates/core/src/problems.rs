//! Decision problems over initial configurations, evaluated with full
//! knowledge of the configuration. These evaluators are the reference every
//! protocol is tested against.
//!
//! Inputs are strings. Numbers are decimal, graphs use the single-line text
//! form (`graph 2;edge 0 1 1 1`), product inputs are a one-digit component
//! index followed by the component input. A configuration whose input does
//! not decode is not in the problem.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

use crate::config::{AgentPlacement, Configuration};
use crate::graph::{
    automorphisms, canonical_form, consistent_cycle, isomorphic, parse_graph, parse_quotient,
    path, quotient_isomorphic, serialize_graph_compact, serialize_quotient_compact, Edge, NodeId,
    PortGraph, QuotientGraph,
};
use crate::sim::Oracle;
use crate::views::quotient;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProblemError {
    #[error("unknown problem `{0}`")]
    Unknown(String),
    #[error("problem `{0}` does not give every agent the same input, so it cannot back an oracle")]
    NotUniform(String),
}

#[derive(Clone)]
pub enum Problem {
    /// More than `k` agents.
    Teamsize,
    /// Exactly `n` nodes.
    Nodes,
    Tree,
    /// A tree with exactly `n` nodes.
    Treesize,
    /// Per-agent bits with exactly one 1.
    Leader,
    /// Every start has odd degree (and so does some other node).
    Odd,
    Path,
    Leaf,
    /// Some node has degree `k`.
    Degree(usize),
    /// A consistently labeled cycle.
    Cycle,
    /// A consistently labeled sun.
    Sun,
    /// The quotient differs from the input quotient.
    Quotient,
    /// The graph is the input graph.
    Map,
    Complement(Box<Problem>),
    Product(Vec<Problem>),
    Custom { name: String, uniform: bool, eval: fn(&Configuration) -> bool },
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl PartialEq for Problem {
    fn eq(&self, other: &Self) -> bool {
        self.name() == other.name()
    }
}

/// Names accepted by [`Problem::parse`] for the base problems.
pub const BASE_PROBLEMS: &[&str] = &[
    "teamsize", "nodes", "tree", "treesize", "leader", "odd", "path", "leaf", "degree-<k>", "cycle",
    "sun", "quotient", "map",
];

impl Problem {
    /// `teamsize x quotient`.
    pub fn omega() -> Problem {
        Problem::Product(vec![Problem::Teamsize, Problem::Quotient])
    }

    pub fn complement(self) -> Problem {
        Problem::Complement(Box::new(self))
    }

    /// Parses names such as `tree`, `degree-3`, `co-sun`, `cycle*co-sun`, `omega`.
    pub fn parse(name: &str) -> Result<Problem, ProblemError> {
        let unknown = || ProblemError::Unknown(name.to_string());
        if name.contains('*') {
            let parts = name.split('*').map(Problem::parse).collect::<Result<Vec<_>, _>>()?;
            if parts.len() > 9 {
                return Err(unknown());
            }
            return Ok(Problem::Product(parts));
        }
        if let Some(inner) = name.strip_prefix("co-") {
            return Ok(Problem::parse(inner)?.complement());
        }
        if let Some(k) = name.strip_prefix("degree-") {
            return k.parse().map(Problem::Degree).map_err(|_| unknown());
        }
        Ok(match name {
            "teamsize" => Problem::Teamsize,
            "nodes" => Problem::Nodes,
            "tree" => Problem::Tree,
            "treesize" => Problem::Treesize,
            "leader" => Problem::Leader,
            "odd" => Problem::Odd,
            "path" => Problem::Path,
            "leaf" => Problem::Leaf,
            "cycle" => Problem::Cycle,
            "sun" => Problem::Sun,
            "quotient" => Problem::Quotient,
            "map" => Problem::Map,
            "omega" => Problem::omega(),
            _ => return Err(unknown()),
        })
    }

    pub fn name(&self) -> String {
        match self {
            Problem::Teamsize => "teamsize".into(),
            Problem::Nodes => "nodes".into(),
            Problem::Tree => "tree".into(),
            Problem::Treesize => "treesize".into(),
            Problem::Leader => "leader".into(),
            Problem::Odd => "odd".into(),
            Problem::Path => "path".into(),
            Problem::Leaf => "leaf".into(),
            Problem::Degree(k) => format!("degree-{k}"),
            Problem::Cycle => "cycle".into(),
            Problem::Sun => "sun".into(),
            Problem::Quotient => "quotient".into(),
            Problem::Map => "map".into(),
            Problem::Complement(p) => format!("co-{}", p.name()),
            Problem::Product(ps) if *ps == Problem::omega_parts() => "omega".into(),
            Problem::Product(ps) => ps.iter().map(Problem::name).collect::<Vec<_>>().join("*"),
            Problem::Custom { name, .. } => name.clone(),
        }
    }

    fn omega_parts() -> Vec<Problem> {
        vec![Problem::Teamsize, Problem::Quotient]
    }

    /// Whether all agents receive the same input in every instance.
    pub fn is_uniform(&self) -> bool {
        match self {
            Problem::Leader => false,
            Problem::Complement(p) => p.is_uniform(),
            Problem::Product(ps) => ps.iter().all(Problem::is_uniform),
            Problem::Custom { uniform, .. } => *uniform,
            _ => true,
        }
    }

    /// What the input encodes.
    pub fn input_format(&self) -> String {
        match self {
            Problem::Teamsize => "k (decimal)".into(),
            Problem::Nodes | Problem::Treesize => "n (decimal)".into(),
            Problem::Leader => "one bit per agent".into(),
            Problem::Quotient => "quotient graph, single-line form".into(),
            Problem::Map => "graph, single-line form".into(),
            Problem::Complement(p) => p.input_format(),
            Problem::Product(ps) => {
                let parts: Vec<String> = ps
                    .iter()
                    .enumerate()
                    .map(|(i, p)| format!("{}<{}>", i + 1, p.input_format()))
                    .collect();
                parts.join(" | ")
            }
            Problem::Custom { .. } => "any".into(),
            _ => "empty".into(),
        }
    }

    /// Informal class membership, for listings only.
    pub fn class_tags(&self) -> &'static [&'static str] {
        match self {
            Problem::Treesize | Problem::Odd => &["MAD"],
            Problem::Tree | Problem::Path | Problem::Leaf | Problem::Degree(_) => &["MAV"],
            Problem::Teamsize | Problem::Quotient => &["MAV"],
            Problem::Product(ps) if *ps == Problem::omega_parts() => &["MAV-complete"],
            Problem::Nodes | Problem::Map => &["oracle"],
            Problem::Cycle => &["MAD1^quotient"],
            Problem::Complement(p) if matches!(**p, Problem::Sun) => &["MAD1^quotient"],
            _ => &[],
        }
    }

    /// Membership of `cfg`.
    pub fn evaluate(&self, cfg: &Configuration) -> bool {
        match self {
            Problem::Complement(p) => !p.evaluate(cfg),
            Problem::Product(ps) => {
                let Some((index, rest)) = split_product(cfg) else {
                    return false;
                };
                match ps.get(index.wrapping_sub(1)) {
                    Some(p) => p.evaluate(&rest),
                    None => false,
                }
            }
            Problem::Custom { eval, .. } => eval(cfg),
            Problem::Leader => {
                cfg.agents().iter().all(|a| a.input == "0" || a.input == "1")
                    && cfg.agents().iter().filter(|a| a.input == "1").count() == 1
            }
            base => match cfg.uniform_input() {
                Some(w) => base.evaluate_uniform(cfg, w),
                None => false,
            },
        }
    }

    fn evaluate_uniform(&self, cfg: &Configuration, w: &str) -> bool {
        let g = cfg.graph();
        let input_free = |holds: bool| w.is_empty() && holds;
        match self {
            Problem::Teamsize => decode_number(w).is_some_and(|k| cfg.team_size() as u64 > k),
            Problem::Nodes => decode_number(w).is_some_and(|n| g.node_count() as u64 == n),
            Problem::Tree => input_free(g.is_tree()),
            Problem::Treesize => {
                decode_number(w).is_some_and(|n| g.is_tree() && g.node_count() as u64 == n)
            }
            Problem::Odd => input_free(cfg.agents().iter().all(|a| {
                g.degree(a.start) % 2 == 1
                    && (0..g.node_count()).any(|u| u != a.start && g.degree(u) % 2 == 1)
            })),
            Problem::Path => input_free(g.is_tree() && g.max_degree() <= 2),
            Problem::Leaf => input_free((0..g.node_count()).any(|u| g.degree(u) == 1)),
            Problem::Degree(k) => input_free((0..g.node_count()).any(|u| g.degree(u) == *k)),
            Problem::Cycle => input_free(is_consistent_cycle(g)),
            Problem::Sun => input_free(is_consistent_sun(g)),
            Problem::Quotient => match parse_quotient(w) {
                Ok(h) => !quotient_isomorphic(&quotient(g).0, &h),
                Err(_) => false,
            },
            Problem::Map => parse_graph(w).is_ok_and(|h| isomorphic(g, &h)),
            _ => unreachable!("handled in evaluate"),
        }
    }

    /// Inputs used to probe the problem on `g` in closure checks.
    pub fn sample_inputs(&self, g: &PortGraph) -> Vec<String> {
        let junk = "x".to_string();
        match self {
            Problem::Teamsize => vec!["0".into(), "1".into(), "2".into(), "3".into(), junk],
            Problem::Nodes | Problem::Treesize => {
                (1..=6).map(|n| n.to_string()).chain([String::new()]).collect()
            }
            Problem::Quotient => vec![
                serialize_quotient_compact(&QuotientGraph::one_loop()),
                serialize_quotient_compact(&QuotientGraph::loop_with_pendant()),
                serialize_quotient_compact(&quotient(g).0),
                serialize_quotient_compact(&quotient(&path(2).expect("valid")).0),
                junk,
            ],
            Problem::Map => {
                let reversed: Vec<NodeId> = (0..g.node_count()).rev().collect();
                vec![
                    serialize_graph_compact(g),
                    serialize_graph_compact(&g.permuted(&reversed)),
                    serialize_graph_compact(&consistent_cycle(4).expect("valid")),
                    junk,
                ]
            }
            Problem::Complement(p) => p.sample_inputs(g),
            Problem::Product(ps) => {
                let mut out = vec![String::new()];
                for (i, p) in ps.iter().enumerate() {
                    out.extend(p.sample_inputs(g).into_iter().map(|w| format!("{}{w}", i + 1)));
                }
                out.push(format!("{}x", ps.len() + 1));
                out
            }
            Problem::Leader => vec!["0".into(), "1".into(), junk],
            _ => vec![String::new(), "1".into()],
        }
    }
}

/// Decimal numeral without sign or leading zeros (`0` itself is allowed).
pub fn decode_number(w: &str) -> Option<u64> {
    let canonical = w == "0" || (!w.is_empty() && !w.starts_with('0'));
    if !canonical || !w.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    w.parse().ok()
}

/// Strips the component index from every agent's input; all agents must
/// carry the same index.
fn split_product(cfg: &Configuration) -> Option<(usize, Configuration)> {
    let mut index = None;
    let mut agents = Vec::new();
    for a in cfg.agents() {
        let first = a.input.chars().next()?;
        let i = first.to_digit(10)? as usize;
        if *index.get_or_insert(i) != i {
            return None;
        }
        agents.push(AgentPlacement { input: a.input[1..].to_string(), ..a.clone() });
    }
    let rest = Configuration::new(cfg.graph().clone(), agents).ok()?;
    Some((index?, rest))
}

/// Every node has degree 2 and port 1 always meets port 2.
fn is_consistent_cycle(g: &PortGraph) -> bool {
    g.node_count() >= 3
        && (0..g.node_count()).all(|v| g.degree(v) == 2 && g.neighbor(v, 1).1 == 2)
}

/// Degree-3 nodes form a consistent cycle on ports 1/2 and each has a leaf
/// behind port 3; there are no other nodes.
fn is_consistent_sun(g: &PortGraph) -> bool {
    let n = g.node_count();
    let hubs: Vec<NodeId> = (0..n).filter(|&v| g.degree(v) == 3).collect();
    let m = hubs.len();
    if m < 3 || n != 2 * m || (0..n).any(|v| g.degree(v) != 3 && g.degree(v) != 1) {
        return false;
    }
    let local = hubs.iter().all(|&v| {
        let (a, pa) = g.neighbor(v, 1);
        let (leaf, _) = g.neighbor(v, 3);
        g.degree(a) == 3 && pa == 2 && g.degree(leaf) == 1
    });
    if !local {
        return false;
    }
    // one cycle through all hubs
    let mut v = hubs[0];
    for step in 1..=m {
        v = g.neighbor(v, 1).0;
        if v == hubs[0] {
            return step == m;
        }
    }
    false
}

/// An oracle answering for `problem` on a fixed configuration, with the
/// caller's input substituted for every agent.
pub struct ProblemOracle {
    problem: Problem,
    config: Configuration,
}

impl ProblemOracle {
    pub fn problem(&self) -> &Problem {
        &self.problem
    }
}

impl Oracle for ProblemOracle {
    fn answer(&self, input: &str) -> bool {
        self.problem.evaluate(&self.config.with_uniform_input(input))
    }
}

pub fn oracle_env(problem: &Problem, config: &Configuration) -> Result<ProblemOracle, ProblemError> {
    if !problem.is_uniform() {
        return Err(ProblemError::NotUniform(problem.name()));
    }
    Ok(ProblemOracle { problem: problem.clone(), config: config.clone() })
}

/// A configuration and automorphism on which membership changes.
#[derive(Debug, Clone)]
pub struct ClosureCounterexample {
    pub automorphism: Vec<NodeId>,
    pub config: Configuration,
}

/// Checks that membership is invariant under every automorphism of `g`,
/// over all placements of one and two agents and the problem's sample
/// inputs.
pub fn closure_check(problem: &Problem, g: &PortGraph) -> Result<(), Box<ClosureCounterexample>> {
    let auts = automorphisms(g);
    let n = g.node_count();
    let samples = problem.sample_inputs(g);
    let mut placements: Vec<Vec<NodeId>> = (0..n).map(|s| vec![s]).collect();
    for a in 0..n {
        for b in 0..n {
            placements.push(vec![a, b]);
        }
    }
    for starts in &placements {
        let input_sets: Vec<Vec<String>> = if problem.is_uniform() {
            samples.iter().map(|w| vec![w.clone(); starts.len()]).collect()
        } else {
            // every assignment of sample inputs to agents
            let mut sets = vec![Vec::new()];
            for _ in starts {
                sets = sets
                    .into_iter()
                    .flat_map(|prefix: Vec<String>| {
                        samples.iter().map(move |w| {
                            let mut next = prefix.clone();
                            next.push(w.clone());
                            next
                        })
                    })
                    .collect();
            }
            sets
        };
        for inputs in input_sets {
            let agents = starts
                .iter()
                .zip(inputs)
                .enumerate()
                .map(|(i, (&s, w))| AgentPlacement::new(s, i as u64 + 1, w))
                .collect();
            let cfg = Configuration::new(g.clone(), agents).expect("valid placement");
            let here = problem.evaluate(&cfg);
            for alpha in &auts {
                let moved = cfg.transported(alpha);
                if problem.evaluate(&moved) != here {
                    return Err(Box::new(ClosureCounterexample {
                        automorphism: alpha.clone(),
                        config: cfg,
                    }));
                }
            }
        }
    }
    Ok(())
}

/// A pseudo-problem that looks at node names; it is not a decision problem
/// and serves as a negative control for [`closure_check`].
pub fn even_start_index() -> Problem {
    Problem::Custom {
        name: "even-start-index".into(),
        uniform: true,
        eval: |cfg| cfg.agents().iter().all(|a| a.start % 2 == 0),
    }
}

/// Two graphs with the same size and isomorphic quotients that are not
/// isomorphic to each other.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessPair {
    pub first: PortGraph,
    pub second: PortGraph,
    pub quotient: QuotientGraph,
}

/// Searches all graphs with at most 4 nodes, then seeded lifts of their
/// quotients up to `max_n` nodes, for a [`WitnessPair`]. Returns the pair
/// whose graphs come first in (size, canonical form) order among the
/// candidates examined at the smallest size where one exists.
pub fn witness_same_quotient_nonisomorphic(max_n: usize) -> Option<WitnessPair> {
    // canonical quotient form -> canonical graph forms with that quotient, by size
    let mut by_size: BTreeMap<usize, HashMap<(usize, Vec<Edge>), BTreeMap<Vec<Edge>, PortGraph>>> =
        BTreeMap::new();
    let mut bases: BTreeMap<(usize, Vec<Edge>), QuotientGraph> = BTreeMap::new();
    for n in 1..=max_n.min(crate::graph::MAX_ENUMERATION_NODES) {
        for g in crate::graph::enumerate_connected(n).expect("in range") {
            let q = quotient(&g).0;
            let key = q.canonical_form();
            bases.entry(key.clone()).or_insert_with(|| q.clone());
            by_size.entry(n).or_default().entry(key).or_default().insert(canonical_form(&g), g);
        }
    }
    for base in bases.values() {
        for copies in 2..=max_n / base.node_count() {
            let n = copies * base.node_count();
            if n <= crate::graph::MAX_ENUMERATION_NODES {
                continue;
            }
            for seed in 0..64u64 {
                if let Some(g) = crate::lift::random_lift(base, copies, seed) {
                    let key = base.canonical_form();
                    by_size.entry(n).or_default().entry(key).or_default().insert(canonical_form(&g), g);
                }
            }
        }
    }
    for (_, classes) in by_size {
        let mut found: Vec<(Vec<Edge>, Vec<Edge>, PortGraph, PortGraph)> = Vec::new();
        for graphs in classes.values() {
            let mut iter = graphs.iter();
            if let (Some((ka, a)), Some((kb, b))) = (iter.next(), iter.next()) {
                found.push((ka.clone(), kb.clone(), a.clone(), b.clone()));
            }
        }
        found.sort_by(|x, y| (&x.0, &x.1).cmp(&(&y.0, &y.1)));
        if let Some((_, _, a, b)) = found.into_iter().next() {
            let q = quotient(&a).0;
            return Some(WitnessPair { first: a, second: b, quotient: q });
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{star, sun};

    fn cfg(g: PortGraph, starts: &[NodeId], inputs: &[&str]) -> Configuration {
        let agents = starts
            .iter()
            .zip(inputs)
            .enumerate()
            .map(|(i, (&s, &w))| AgentPlacement::new(s, i as u64 + 1, w))
            .collect();
        Configuration::new(g, agents).unwrap()
    }

    #[test]
    fn leader_needs_exactly_one_bit() {
        let g = consistent_cycle(4).unwrap();
        assert!(Problem::Leader.evaluate(&cfg(g.clone(), &[0, 1, 2], &["1", "0", "0"])));
        assert!(!Problem::Leader.evaluate(&cfg(g.clone(), &[0, 1, 2], &["1", "1", "0"])));
        assert!(!Problem::Leader.evaluate(&cfg(g, &[0, 1, 2], &["1", "0", "2"])));
    }

    #[test]
    fn teamsize_and_nodes() {
        let g = path(5).unwrap();
        let three = cfg(g.clone(), &[0, 1, 2], &["", "", ""]);
        assert!(Problem::Teamsize.evaluate(&three.with_uniform_input("2")));
        assert!(!Problem::Teamsize.evaluate(&three.with_uniform_input("3")));
        assert!(Problem::Nodes.evaluate(&three.with_uniform_input("5")));
        assert!(!Problem::Nodes.evaluate(&three.with_uniform_input("4")));
        assert!(!Problem::Nodes.evaluate(&three.with_uniform_input("+5")));
    }

    #[test]
    fn quotient_and_map() {
        let o = serialize_quotient_compact(&QuotientGraph::one_loop());
        let c6 = cfg(consistent_cycle(6).unwrap(), &[0], &[&o]);
        assert!(!Problem::Quotient.evaluate(&c6));
        let s3 = cfg(sun(3).unwrap(), &[0], &[&o]);
        assert!(Problem::Quotient.evaluate(&s3));
        let c4 = consistent_cycle(4).unwrap();
        let m = cfg(c4.clone(), &[0], &[&serialize_graph_compact(&c4)]);
        assert!(Problem::Map.evaluate(&m));
    }

    #[test]
    fn cycle_and_sun_recognizers() {
        for m in 3..7 {
            assert!(is_consistent_cycle(&consistent_cycle(m).unwrap()));
            assert!(is_consistent_sun(&sun(m).unwrap()));
            assert!(!is_consistent_cycle(&sun(m).unwrap()));
            assert!(!is_consistent_sun(&consistent_cycle(m).unwrap()));
        }
        assert!(!is_consistent_cycle(&path(4).unwrap()));
        // a 4-cycle with port 1 meeting port 1 on one edge
        let odd = PortGraph::new(
            4,
            [Edge::new(0, 1, 1, 1), Edge::new(1, 2, 2, 1), Edge::new(2, 2, 3, 1), Edge::new(3, 2, 0, 2)],
        )
        .unwrap();
        assert!(!is_consistent_cycle(&odd));
    }

    #[test]
    fn product_and_complement() {
        let two = cfg(consistent_cycle(4).unwrap(), &[0, 1], &["", ""]);
        let omega = Problem::omega();
        assert!(omega.evaluate(&two.with_uniform_input("11")));
        assert!(!omega.evaluate(&two.with_uniform_input("3anything")));
        let o = serialize_quotient_compact(&QuotientGraph::one_loop());
        let c6 = cfg(consistent_cycle(6).unwrap(), &[0], &[""]);
        assert!(!omega.evaluate(&c6.with_uniform_input(&format!("2{o}"))));
        let co_sun = Problem::parse("co-sun").unwrap();
        assert!(!co_sun.evaluate(&cfg(sun(3).unwrap(), &[0], &[""])));
        assert!(Problem::parse("co-cycle").unwrap().evaluate(&cfg(star(4).unwrap(), &[0], &[""])));
    }

    #[test]
    fn names_round_trip() {
        for name in ["tree", "degree-3", "co-sun", "cycle*co-sun", "omega", "co-co-tree"] {
            assert_eq!(Problem::parse(name).unwrap().name(), name);
        }
        assert!(Problem::parse("nonsense").is_err());
    }

    #[test]
    fn oracles() {
        let five = cfg(path(5).unwrap(), &[0], &[""]);
        let nodes = oracle_env(&Problem::Nodes, &five).unwrap();
        assert!(nodes.answer("5"));
        assert!(!nodes.answer("4"));
        let three = cfg(path(5).unwrap(), &[0, 1, 2], &["", "", ""]);
        let team = oracle_env(&Problem::Teamsize, &three).unwrap();
        assert!(team.answer("2"));
        assert!(!team.answer("3"));
        let c6 = cfg(consistent_cycle(6).unwrap(), &[0], &[""]);
        let q = oracle_env(&Problem::Quotient, &c6).unwrap();
        assert!(!q.answer(&serialize_quotient_compact(&QuotientGraph::one_loop())));
        assert!(matches!(oracle_env(&Problem::Leader, &c6), Err(ProblemError::NotUniform(_))));
    }

    #[test]
    fn closure_examples() {
        let c4 = consistent_cycle(4).unwrap();
        assert!(closure_check(&Problem::Teamsize, &c4).is_ok());
        assert!(closure_check(&Problem::Nodes, &star(4).unwrap()).is_ok());
        let cex = closure_check(&even_start_index(), &c4).unwrap_err();
        assert_ne!(cex.automorphism, vec![0, 1, 2, 3]);
    }
}
