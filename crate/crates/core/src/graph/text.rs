//! Line-based text format.
//!
//! ```text
//! graph 3
//! edge 0 1 1 2
//! edge 1 1 2 2
//! edge 2 1 0 2
//! ```
//!
//! Quotients use the header `quotient <n>`; loops and repeated lines are
//! allowed there. Blank lines and `#` comments are ignored. The parsers also
//! accept `;` as a line separator, which gives a single-line form such as
//! `graph 2;edge 0 1 1 1` (used when a graph is passed as an agent input).

use std::fmt::Write;

use super::{Edge, GraphError, PortGraph, QuotientGraph};

fn parse_err(line: usize, message: impl Into<String>) -> GraphError {
    GraphError::Parse { line, message: message.into() }
}

/// Splits text into numbered logical lines, dropping blanks and comments.
pub(crate) fn logical_lines(text: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if !line.is_empty() {
            out.push((i + 1, line));
        }
    }
    out
}

/// Parses the header line plus edge lines; `header` is "graph" or "quotient".
pub(crate) fn parse_block(
    lines: &[(usize, &str)],
    header: &str,
) -> Result<(usize, Vec<Edge>, usize), GraphError> {
    let Some(&(first_line, first)) = lines.first() else {
        return Err(parse_err(1, format!("expected `{header} <n>`, found end of input")));
    };
    let mut words = first.split_whitespace();
    if words.next() != Some(header) {
        return Err(parse_err(first_line, format!("expected `{header} <n>`, found `{first}`")));
    }
    let n: usize = words
        .next()
        .and_then(|w| w.parse().ok())
        .ok_or_else(|| parse_err(first_line, "node count must be a non-negative integer"))?;
    if words.next().is_some() {
        return Err(parse_err(first_line, "trailing text after node count"));
    }
    let mut edges = Vec::new();
    let mut consumed = 1;
    for &(line_no, line) in &lines[1..] {
        let mut words = line.split_whitespace();
        if words.next() != Some("edge") {
            break;
        }
        let nums: Vec<usize> = words
            .map(|w| w.parse::<usize>())
            .collect::<Result<_, _>>()
            .map_err(|_| parse_err(line_no, format!("malformed edge line `{line}`")))?;
        let [u, pu, v, pv] = nums[..] else {
            return Err(parse_err(line_no, format!("edge line needs 4 numbers: `{line}`")));
        };
        edges.push((line_no, Edge::new(u, pu, v, pv)));
        consumed += 1;
    }
    // attribute validation failures to the line that introduced the problem
    let edge_list: Vec<Edge> = edges.iter().map(|&(_, e)| e).collect();
    let check = if header == "graph" {
        super::validate(n, &edge_list).map_err(GraphError::from)
    } else {
        QuotientGraph::new(n, edge_list.iter().copied()).map(|_| ()).map_err(GraphError::from)
    };
    if let Err(err) = check {
        let line = blame_line(n, &edges, header).unwrap_or(first_line);
        return Err(parse_err(line, err.to_string()));
    }
    Ok((n, edge_list, consumed))
}

/// The line of the first edge whose addition makes the prefix invalid in a
/// way other than missing ports or connectivity.
fn blame_line(n: usize, edges: &[(usize, Edge)], header: &str) -> Option<usize> {
    use super::{QuotientViolation as Q, Violation as V};
    for k in 1..=edges.len() {
        let prefix: Vec<Edge> = edges[..k].iter().map(|&(_, e)| e).collect();
        let local = if header == "graph" {
            !matches!(
                super::validate(n, &prefix),
                Ok(()) | Err(V::PortGap { .. } | V::Disconnected(_) | V::Empty)
            )
        } else {
            !matches!(QuotientGraph::new(n, prefix), Ok(_) | Err(Q::PortGap { .. } | Q::Empty))
        };
        if local {
            return Some(edges[k - 1].0);
        }
    }
    None
}

fn finish(lines: &[(usize, &str)], consumed: usize) -> Result<(), GraphError> {
    match lines.get(consumed) {
        Some(&(line, text)) => Err(parse_err(line, format!("unexpected line `{text}`"))),
        None => Ok(()),
    }
}

pub fn parse_graph(text: &str) -> Result<PortGraph, GraphError> {
    let text = text.replace(';', "\n");
    let lines = logical_lines(&text);
    let (n, edges, consumed) = parse_block(&lines, "graph")?;
    finish(&lines, consumed)?;
    Ok(PortGraph::new(n, edges)?)
}

pub fn parse_quotient(text: &str) -> Result<QuotientGraph, GraphError> {
    let text = text.replace(';', "\n");
    let lines = logical_lines(&text);
    let (n, edges, consumed) = parse_block(&lines, "quotient")?;
    finish(&lines, consumed)?;
    Ok(QuotientGraph::new(n, edges)?)
}

fn serialize(header: &str, n: usize, edges: &[Edge], sep: &str) -> String {
    let mut out = format!("{header} {n}");
    for e in edges {
        let _ = write!(out, "{sep}edge {} {} {} {}", e.u, e.pu, e.v, e.pv);
    }
    out
}

/// Multi-line form ending in a newline; edges in canonical sorted order.
pub fn serialize_graph(g: &PortGraph) -> String {
    serialize("graph", g.node_count(), &g.edges(), "\n") + "\n"
}

/// Single-line form with `;` separators.
pub fn serialize_graph_compact(g: &PortGraph) -> String {
    serialize("graph", g.node_count(), &g.edges(), ";")
}

pub fn serialize_quotient(q: &QuotientGraph) -> String {
    serialize("quotient", q.node_count(), q.edges(), "\n") + "\n"
}

pub fn serialize_quotient_compact(q: &QuotientGraph) -> String {
    serialize("quotient", q.node_count(), q.edges(), ";")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{consistent_cycle, path};

    #[test]
    fn parses_k2() {
        assert_eq!(parse_graph("graph 2\nedge 0 1 1 1").unwrap(), path(2).unwrap());
    }

    #[test]
    fn cycle_round_trip() {
        let c3 = consistent_cycle(3).unwrap();
        let text = serialize_graph(&c3);
        assert_eq!(text.lines().count(), 4);
        assert_eq!(parse_graph(&text).unwrap(), c3);
        assert_eq!(parse_graph(&serialize_graph_compact(&c3)).unwrap(), c3);
    }

    #[test]
    fn parallel_edge_is_blamed_on_its_line() {
        let err = parse_graph("graph 2\nedge 0 1 1 2\nedge 0 2 1 1").unwrap_err();
        assert!(matches!(err, GraphError::Parse { line: 3, .. }), "{err}");
    }

    #[test]
    fn malformed_lines() {
        assert!(matches!(parse_graph(""), Err(GraphError::Parse { line: 1, .. })));
        assert!(matches!(parse_graph("graph x"), Err(GraphError::Parse { line: 1, .. })));
        assert!(matches!(
            parse_graph("graph 2\nedge 0 1 1"),
            Err(GraphError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_graph("graph 2\nedge 0 1 1 1\nnode 3"),
            Err(GraphError::Parse { line: 3, .. })
        ));
        assert!(matches!(parse_graph("graph 3\nedge 0 1 1 1"), Err(GraphError::Parse { .. })));
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# K2\n\ngraph 2  # two nodes\nedge 0 1 1 1\n";
        assert_eq!(parse_graph(text).unwrap().edge_count(), 1);
    }

    #[test]
    fn quotient_round_trip_with_loops_and_parallels() {
        let q = parse_quotient("quotient 2\nedge 0 2 0 1\nedge 0 3 1 1\nedge 0 3 1 1").unwrap();
        assert_eq!(q.edges().len(), 3);
        assert_eq!(parse_quotient(&serialize_quotient(&q)).unwrap(), q);
        assert_eq!(
            serialize_quotient_compact(&QuotientGraph::one_loop()),
            "quotient 1;edge 0 1 0 2"
        );
    }
}
