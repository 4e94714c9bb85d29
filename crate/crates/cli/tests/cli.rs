use std::process::{Command, Output};

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_anonagents")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = cli(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> serde_json::Value {
    serde_json::from_str(&stdout(args)).unwrap()
}

#[test]
fn cycle_quotient_is_one_loop() {
    let out = stdout(&["quotient", "--gen", "cycle:6"]);
    assert!(out.starts_with("quotient 1\nedge 0 1 0 2\n"), "{out}");
    assert!(out.contains("classes 0 0 0 0 0 0"));
}

#[test]
fn sun_quotient_has_two_nodes() {
    let v = json(&["quotient", "--gen", "sun:3", "--json"]);
    assert_eq!(v["quotient"], "quotient 2;edge 0 1 0 2;edge 0 3 1 1");
    assert_eq!(v["classes"], serde_json::json!([0, 0, 0, 1, 1, 1]));
}

#[test]
fn depth_zero_view_is_one_node() {
    assert_eq!(stdout(&["view", "--gen", "star:4", "--depth", "0"]).trim(), "(3)");
}

#[test]
fn iso_with_inline_graph() {
    let relabeled = "graph 2;edge 1 1 0 1";
    let out = stdout(&["iso", "--graph", relabeled, "--gen", "path:2"]);
    assert!(out.starts_with("isomorphic"), "{out}");
    let v = json(&["iso", "--gen", "cycle:4", "--gen", "star:4", "--json"]);
    assert_eq!(v["isomorphic"], false);
}

#[test]
fn rdv_on_k2_meets_within_the_bound() {
    let v = json(&["run", "rdv", "--gen", "path:2", "--agents", "0:1,1:2", "--input", "2", "--json"]);
    assert_eq!(v["decisions"], serde_json::json!([true, true]));
    let note = v["notes"][0].as_str().unwrap();
    let round: u64 = note.rsplit(' ').next().unwrap().parse().unwrap();
    // 2 (min id + 1) n^n with n = 2 and min id = 1
    assert!(round <= 16, "{note}");
}

#[test]
fn omega_team_branch_accepts_with_honest_size() {
    let v = json(&["run", "omega-verify", "--gen", "cycle:4", "--agents", "0:1,2:2", "--input", "11", "--cert", "100", "--json"]);
    assert_eq!(v["decisions"], serde_json::json!([true, true]));
}

#[test]
fn unknown_protocol_fails() {
    let out = cli(&["run", "nope", "--gen", "path:2"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown protocol"));
}

#[test]
fn budget_exhaustion_is_reported() {
    let v = json(&["run", "rdv", "--gen", "path:3", "--agents", "0:1,2:2", "--input", "3", "--budget", "3", "--json"]);
    assert_eq!(v["status"], "undecided");
}

#[test]
fn bad_graphs_are_rejected() {
    for args in [
        &["quotient", "--graph", "graph 2;edge 0 1 1 2"][..],
        &["quotient", "--gen", "cycle:2"],
        &["view", "--gen", "path:3", "--node", "7", "--depth", "1"],
    ] {
        assert!(!cli(args).status.success(), "{args:?}");
    }
}

#[test]
fn config_files_load() {
    let dir = std::env::temp_dir().join(format!("anonagents-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    std::fs::write(dir.join("k2.graph"), "graph 2\nedge 0 1 1 1\n").unwrap();
    std::fs::write(dir.join("pair.config"), "config\nuse k2.graph\nagent 0 1 2\nagent 1 2 2\n").unwrap();
    let path = dir.join("pair.config");
    let v = json(&["run", "gather", "--config", path.to_str().unwrap(), "--json"]);
    assert_eq!(v["decisions"], serde_json::json!([true, true]));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn problems_list_and_eval() {
    let list = stdout(&["problems", "list"]);
    assert!(list.contains("treesize") && list.contains("omega-verify"));
    let yes = stdout(&["problems", "eval", "treesize", "--gen", "star:4", "--input", "4"]);
    assert!(yes.starts_with("treesize: yes"), "{yes}");
    let no = stdout(&["problems", "eval", "cycle", "--gen", "sun:3"]);
    assert!(no.starts_with("cycle: no"), "{no}");
}

#[test]
fn enumeration_counts() {
    let v = json(&["enumerate", "--nodes", "3", "--up-to-iso", "--json"]);
    assert_eq!(v["count"], 3);
    let all = json(&["enumerate", "--nodes", "2", "--json"]);
    assert_eq!(all["graphs"], serde_json::json!(["graph 2;edge 0 1 1 1"]));
}

#[test]
fn suites_report_and_fail_on_unknown() {
    let out = stdout(&["suite", "indistinguishability"]);
    assert!(out.contains("pass"));
    assert!(!cli(&["suite", "nope"]).status.success());
    let v = json(&["suite", "rdv", "--ids", "1,2", "--json"]);
    assert_eq!(v[0]["checks"][0]["passed"], true);
    assert!(v[0]["checks"][0]["summary"].as_str().unwrap().contains("{1,2}"));
}

#[test]
fn json_output_matches_golden_files() {
    let cases: [(&[&str], &str); 3] = [
        (&["quotient", "--gen", "sun:3", "--json"], include_str!("golden/quotient_sun3.json")),
        (&["suite", "separations", "--json"], include_str!("golden/suite_separations.json")),
        (&["run", "rdv", "--gen", "path:2", "--agents", "0:1,1:2", "--input", "2", "--json"], include_str!("golden/run_rdv_k2.json")),
    ];
    for (args, golden) in cases {
        assert_eq!(stdout(args), golden, "{args:?}");
    }
}
