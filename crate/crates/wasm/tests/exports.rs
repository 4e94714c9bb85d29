use anonagents_wasm::{quotient_coloring_json, rdv_trace_json, view_json_for};
use serde_json::Value;

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn sun_colors_cycle_and_leaves_apart() {
    let v = parse(quotient_coloring_json("sun:3").unwrap());
    assert_eq!(v["quotient_nodes"], 2);
    assert_eq!(v["classes"], serde_json::json!([0, 0, 0, 1, 1, 1]));
    assert_eq!(v["graph"]["edges"].as_array().unwrap().len(), 6);
}

#[test]
fn inline_graphs_parse() {
    let v = parse(quotient_coloring_json("graph 2;edge 0 1 1 1").unwrap());
    assert_eq!(v["quotient_nodes"], 1);
    assert!(quotient_coloring_json("graph 2;edge 0 1 1 2").is_err());
    assert!(quotient_coloring_json("cycle:40").is_err());
}

#[test]
fn views_nest_by_port() {
    let v = parse(view_json_for("path:3", 1, 1).unwrap());
    assert_eq!(v["text"], "(2 [1:1 (1)] [2:1 (1)])");
    assert_eq!(v["tree"]["children"][1]["port"], 2);
    assert_eq!(v["tree"]["children"][1]["child"]["degree"], 1);
    assert!(view_json_for("path:3", 5, 1).is_err());
}

#[test]
fn rendezvous_on_k2() {
    let v = parse(rdv_trace_json("path:2", [0, 1], [1, 2]).unwrap());
    let met = v["met_at"].as_u64().unwrap();
    assert!(met <= v["bound"].as_u64().unwrap());
    assert_eq!(v["bound"], 16);
    assert_eq!(v["decisions"], serde_json::json!([true, true]));
    assert!(rdv_trace_json("path:2", [0, 1], [2, 2]).is_err());
    assert!(rdv_trace_json("cycle:7", [0, 1], [1, 2]).is_err());
}
