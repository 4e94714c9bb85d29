//! Initial configurations: a graph plus agents with start nodes, ids and inputs.

use std::collections::BTreeSet;
use std::fmt::Write;

use serde::Serialize;

use crate::graph::{anchored_isomorphism, parse_block, serialize_graph, serialize_graph_compact, GraphError, NodeId, PortGraph};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct AgentPlacement {
    pub start: NodeId,
    pub id: u64,
    pub input: String,
}

impl AgentPlacement {
    pub fn new(start: NodeId, id: u64, input: impl Into<String>) -> Self {
        AgentPlacement { start, id, input: input.into() }
    }
}

/// A graph with at least one agent; ids are positive and pairwise distinct.
/// Several agents may share a start node.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    graph: PortGraph,
    agents: Vec<AgentPlacement>,
}

impl Configuration {
    pub fn new(graph: PortGraph, agents: Vec<AgentPlacement>) -> Result<Self, GraphError> {
        if agents.is_empty() {
            return Err(GraphError::Parameter("a configuration needs at least one agent".into()));
        }
        let mut ids = BTreeSet::new();
        for a in &agents {
            if a.id == 0 {
                return Err(GraphError::Parameter("agent ids must be positive".into()));
            }
            if !ids.insert(a.id) {
                return Err(GraphError::Parameter(format!("agent id {} is used twice", a.id)));
            }
            if a.start >= graph.node_count() {
                return Err(GraphError::Parameter(format!(
                    "agent {} starts at node {} but the graph has {} nodes",
                    a.id,
                    a.start,
                    graph.node_count()
                )));
            }
        }
        Ok(Configuration { graph, agents })
    }

    /// Agents with ids `1..=starts.len()` and empty inputs.
    pub fn with_starts(graph: PortGraph, starts: &[NodeId]) -> Result<Self, GraphError> {
        let agents =
            starts.iter().enumerate().map(|(i, &s)| AgentPlacement::new(s, i as u64 + 1, "")).collect();
        Configuration::new(graph, agents)
    }

    pub fn graph(&self) -> &PortGraph {
        &self.graph
    }

    pub fn agents(&self) -> &[AgentPlacement] {
        &self.agents
    }

    pub fn team_size(&self) -> usize {
        self.agents.len()
    }

    pub fn max_id(&self) -> u64 {
        self.agents.iter().map(|a| a.id).max().unwrap_or(0)
    }

    /// The common input if all agents have the same one.
    pub fn uniform_input(&self) -> Option<&str> {
        let first = self.agents[0].input.as_str();
        self.agents.iter().all(|a| a.input == first).then_some(first)
    }

    /// Same graph, starts and ids; every agent gets input `w`.
    pub fn with_uniform_input(&self, w: &str) -> Configuration {
        let agents =
            self.agents.iter().map(|a| AgentPlacement { input: w.to_string(), ..a.clone() }).collect();
        Configuration { graph: self.graph.clone(), agents }
    }

    /// Moves every agent from `s` to `alpha[s]`, keeping its id and input.
    pub fn transported(&self, alpha: &[NodeId]) -> Configuration {
        let agents = self
            .agents
            .iter()
            .map(|a| AgentPlacement { start: alpha[a.start], ..a.clone() })
            .collect();
        Configuration { graph: self.graph.clone(), agents }
    }

    /// Whether some port-preserving isomorphism of the graphs carries every
    /// agent of `self` to the start of the agent of `other` with the same
    /// id and input.
    pub fn equivalent(&self, other: &Configuration) -> bool {
        if self.agents.len() != other.agents.len() || self.graph.node_count() != other.graph.node_count() {
            return false;
        }
        let by_id = |cfg: &Configuration| {
            let mut agents = cfg.agents.clone();
            agents.sort_by_key(|a| a.id);
            agents
        };
        let (mine, theirs) = (by_id(self), by_id(other));
        if mine.iter().zip(&theirs).any(|(a, b)| a.id != b.id || a.input != b.input) {
            return false;
        }
        (0..other.graph.node_count()).any(|b| {
            anchored_isomorphism(&self.graph, &other.graph, 0, b)
                .is_some_and(|f| mine.iter().zip(&theirs).all(|(a, t)| f[a.start] == t.start))
        })
    }

    /// One-line description for reports: the compact graph and every agent
    /// as `id@start`, with its input if any.
    pub fn summary(&self) -> String {
        let agents: Vec<String> = self
            .agents
            .iter()
            .map(|a| match a.input.as_str() {
                "" => format!("{}@{}", a.id, a.start),
                w => format!("{}@{}:{w}", a.id, a.start),
            })
            .collect();
        format!("{} with agents {}", serialize_graph_compact(&self.graph), agents.join(" "))
    }

    /// Text form with an inline graph block.
    pub fn serialize(&self) -> String {
        let mut out = String::from("config\n");
        out.push_str(&serialize_graph(&self.graph));
        for a in &self.agents {
            let input = if a.input.is_empty() { "-" } else { a.input.as_str() };
            let _ = writeln!(out, "agent {} {} {}", a.start, a.id, input);
        }
        out
    }
}

/// Parses the configuration format:
///
/// ```text
/// config
/// use cycle6.graph        # or an inline `graph <n>` block
/// agent <node> <id> <input>   # `-` for the empty input
/// ```
///
/// The input is the rest of the line, so it may contain spaces (a compact
/// graph such as `2quotient 1;edge 0 1 0 2`).
///
/// `load` resolves the path given to `use`.
pub fn parse_config(
    text: &str,
    load: impl Fn(&str) -> Result<String, String>,
) -> Result<Configuration, GraphError> {
    let err = |line, message: String| GraphError::Parse { line, message };
    let lines = crate::graph::logical_lines(text);
    let Some(&(first_line, first)) = lines.first() else {
        return Err(err(1, "expected `config`, found end of input".into()));
    };
    if first != "config" {
        return Err(err(first_line, format!("expected `config`, found `{first}`")));
    }
    let rest = &lines[1..];
    let Some(&(line, head)) = rest.first() else {
        return Err(err(first_line, "configuration has no graph".into()));
    };
    let (graph, consumed) = if let Some(path) = head.strip_prefix("use ") {
        let text = load(path.trim()).map_err(|m| err(line, m))?;
        let g = crate::graph::parse_graph(&text).map_err(|e| err(line, format!("in {path}: {e}")))?;
        (g, 1)
    } else {
        let (n, edges, consumed) = parse_block(rest, "graph")?;
        (PortGraph::new(n, edges)?, consumed)
    };
    let mut agents = Vec::new();
    for &(line, text) in &rest[consumed..] {
        let words: Vec<&str> = text.splitn(4, char::is_whitespace).collect();
        let ["agent", node, id, input] = words[..] else {
            return Err(err(line, format!("expected `agent <node> <id> <input>`, found `{text}`")));
        };
        let input = input.trim();
        let start = node.parse().map_err(|_| err(line, format!("bad node `{node}`")))?;
        let id = id.parse().map_err(|_| err(line, format!("bad id `{id}`")))?;
        let input = if input == "-" { "" } else { input };
        agents.push(AgentPlacement::new(start, id, input));
    }
    Configuration::new(graph, agents).map_err(|e| match e {
        GraphError::Parameter(m) => err(first_line, m),
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{consistent_cycle, path};

    #[test]
    fn validation() {
        let g = path(2).unwrap();
        assert!(Configuration::new(g.clone(), vec![]).is_err());
        assert!(Configuration::new(g.clone(), vec![AgentPlacement::new(0, 0, "")]).is_err());
        assert!(Configuration::new(
            g.clone(),
            vec![AgentPlacement::new(0, 3, ""), AgentPlacement::new(1, 3, "")]
        )
        .is_err());
        assert!(Configuration::new(g.clone(), vec![AgentPlacement::new(2, 1, "")]).is_err());
        let c = Configuration::with_starts(g, &[1, 1]).unwrap();
        assert_eq!(c.team_size(), 2);
        assert_eq!(c.max_id(), 2);
    }

    #[test]
    fn round_trip_inline() {
        let c = Configuration::new(
            consistent_cycle(4).unwrap(),
            vec![AgentPlacement::new(0, 5, "101"), AgentPlacement::new(2, 2, "")],
        )
        .unwrap();
        let text = c.serialize();
        assert!(text.contains("agent 2 2 -"));
        assert_eq!(parse_config(&text, |_| Err("no files".into())).unwrap(), c);
    }

    #[test]
    fn use_directive_loads_graph() {
        let text = "config\nuse k2.graph\nagent 0 1 -\nagent 1 2 -\n";
        let c = parse_config(text, |p| {
            assert_eq!(p, "k2.graph");
            Ok("graph 2\nedge 0 1 1 1\n".into())
        })
        .unwrap();
        assert_eq!(c.graph(), &path(2).unwrap());
        let err = parse_config("config\nuse x\n", |_| Err("missing".into())).unwrap_err();
        assert!(matches!(err, GraphError::Parse { line: 2, .. }));
    }

    #[test]
    fn inputs_may_hold_compact_graphs() {
        let text = "config\ngraph 1\nagent 0 1 2quotient 1;edge 0 1 0 2\n";
        let c = parse_config(text, |_| Err(String::new())).unwrap();
        assert_eq!(c.agents()[0].input, "2quotient 1;edge 0 1 0 2");
    }

    #[test]
    fn bad_agent_lines() {
        let err = parse_config("config\ngraph 1\nagent 0 1\n", |_| Err(String::new())).unwrap_err();
        assert!(matches!(err, GraphError::Parse { line: 3, .. }));
    }

    #[test]
    fn uniform_inputs_and_transport() {
        let c = Configuration::with_starts(consistent_cycle(4).unwrap(), &[0, 1]).unwrap();
        assert_eq!(c.uniform_input(), Some(""));
        let w = c.with_uniform_input("11");
        assert_eq!(w.uniform_input(), Some("11"));
        let moved = c.transported(&[1, 2, 3, 0]);
        assert_eq!(moved.agents()[0].start, 1);
        assert_eq!(moved.agents()[1].start, 2);
    }
}
