//! Browser bindings: every export takes a graph as text (or a generator
//! spec like `cycle:6`) and returns JSON for the page to draw.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use anonagents::config::{AgentPlacement, Configuration};
use anonagents::graph::{generate, parse_graph, serialize_quotient_compact, PortGraph};
use anonagents::protocols::{tau, Rdv};
use anonagents::sim::Simulation;
use anonagents::views::{quotient, truncated_view, ViewNode};

const MAX_NODES: usize = 12;
const MAX_VIEW_DEPTH: usize = 6;
const MAX_RDV_NODES: usize = 5;
const MAX_RDV_ID: u64 = 4;

fn load(text: &str) -> Result<PortGraph, String> {
    let text = text.trim();
    let g = if text.starts_with("graph") { parse_graph(text) } else { generate(text) };
    let g = g.map_err(|e| e.to_string())?;
    if g.node_count() > MAX_NODES {
        return Err(format!("the demo draws at most {MAX_NODES} nodes"));
    }
    Ok(g)
}

fn graph_json(g: &PortGraph) -> Value {
    let edges: Vec<[usize; 4]> = g.edges().iter().map(|e| [e.u, e.pu, e.v, e.pv]).collect();
    json!({ "nodes": g.node_count(), "edges": edges })
}

/// The graph with every node colored by its view class, and the quotient.
pub fn quotient_coloring_json(graph: &str) -> Result<String, String> {
    let g = load(graph)?;
    let (q, classes) = quotient(&g);
    let out = json!({
        "graph": graph_json(&g),
        "classes": classes,
        "quotient": serialize_quotient_compact(&q),
        "quotient_nodes": q.node_count(),
    });
    Ok(out.to_string())
}

fn view_json(node: &ViewNode) -> Value {
    let children: Vec<Value> = node
        .children()
        .iter()
        .enumerate()
        .map(|(i, (far, sub))| json!({ "port": i + 1, "far_port": far, "child": view_json(sub) }))
        .collect();
    json!({ "degree": node.degree(), "children": children })
}

/// The depth-`depth` view from `node` as a nested tree.
pub fn view_json_for(graph: &str, node: usize, depth: usize) -> Result<String, String> {
    let g = load(graph)?;
    if node >= g.node_count() {
        return Err(format!("node {node} out of range"));
    }
    if depth > MAX_VIEW_DEPTH {
        return Err(format!("depth is capped at {MAX_VIEW_DEPTH} in the demo"));
    }
    let view = truncated_view(&g, node, depth);
    Ok(json!({ "text": view.to_string(), "tree": view_json(view.root()) }).to_string())
}

/// Two agents running rendezvous; positions at every traced round and the
/// first round they share a node.
pub fn rdv_trace_json(graph: &str, starts: [usize; 2], ids: [u64; 2]) -> Result<String, String> {
    let g = load(graph)?;
    let n = g.node_count();
    if n > MAX_RDV_NODES {
        return Err(format!("rendezvous runs n^n rounds; the demo allows up to {MAX_RDV_NODES} nodes"));
    }
    if ids.iter().any(|&i| i == 0 || i > MAX_RDV_ID) || ids[0] == ids[1] {
        return Err(format!("ids must be distinct and between 1 and {MAX_RDV_ID}"));
    }
    let input = n.to_string();
    let agents = vec![AgentPlacement::new(starts[0], ids[0], &*input), AgentPlacement::new(starts[1], ids[1], &*input)];
    let cfg = Configuration::new(g.clone(), agents).map_err(|e| e.to_string())?;
    let out = Simulation::new(&cfg, &Rdv)
        .max_rounds(tau(n as u64, ids[0].max(ids[1])))
        .trace(true)
        .run()
        .map_err(|e| e.to_string())?;
    let rounds: Vec<Value> = out
        .trace
        .iter()
        .map(|r| json!({ "round": r.round, "at": [r.agents[0].node, r.agents[1].node] }))
        .collect();
    let met = out.trace.iter().find(|r| r.agents[0].node == r.agents[1].node).map(|r| r.round);
    let out = json!({
        "graph": graph_json(&g),
        "met_at": met,
        "bound": tau(n as u64, ids[0].min(ids[1])),
        "decisions": out.decisions,
        "rounds": rounds,
    });
    Ok(out.to_string())
}

#[wasm_bindgen]
pub fn quotient_coloring(graph: &str) -> Result<String, JsValue> {
    quotient_coloring_json(graph).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn view(graph: &str, node: usize, depth: usize) -> Result<String, JsValue> {
    view_json_for(graph, node, depth).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn rdv_trace(graph: &str, start1: usize, start2: usize, id1: u32, id2: u32) -> Result<String, JsValue> {
    rdv_trace_json(graph, [start1, start2], [id1 as u64, id2 as u64]).map_err(|e| JsValue::from_str(&e))
}
