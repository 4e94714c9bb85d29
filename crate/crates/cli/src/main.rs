use std::path::Path;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use anonagents::config::{parse_config, AgentPlacement, Configuration};
use anonagents::corpus;
use anonagents::graph::{
    canonical_form, enumerate_connected, generate, isomorphism, parse_graph, serialize_graph,
    serialize_graph_compact, serialize_quotient, serialize_quotient_compact, PortGraph, GENERATORS,
};
use anonagents::problems::{witness_same_quotient_nonisomorphic, Problem, BASE_PROBLEMS};
use anonagents::protocols::{protocol_names, run_named, RunRequest};
use anonagents::suites::{run_suite, SuiteOptions, SUITE_NAMES};
use anonagents::views::{quotient, truncated_view, view_partition};

#[derive(Parser)]
#[command(name = "anonagents", version, about = "Mobile agents in anonymous port-labeled graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the quotient graph and the view class of every node.
    Quotient {
        #[command(flatten)]
        source: GraphSource,
        #[arg(long)]
        json: bool,
    },
    /// Print the truncated view of a node.
    View {
        #[command(flatten)]
        source: GraphSource,
        #[arg(long, default_value_t = 0)]
        node: usize,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        json: bool,
    },
    /// Test two graphs for port-preserving isomorphism. Give two sources:
    /// `--graph` values first, then `--gen` values.
    Iso {
        #[arg(long)]
        graph: Vec<String>,
        #[arg(long)]
        gen: Vec<String>,
        #[arg(long)]
        json: bool,
    },
    /// Run a registered protocol on a configuration.
    Run {
        /// Protocol name; `anonagents problems list` shows the protocols too.
        protocol: String,
        #[command(flatten)]
        placement: Placement,
        /// Certificate, once for all agents or once per agent.
        #[arg(long)]
        cert: Vec<String>,
        #[arg(long)]
        budget: Option<u64>,
        /// Include the round-by-round trace.
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        json: bool,
    },
    /// Run an acceptance suite over the standard corpus, or `all`.
    Suite {
        name: String,
        #[arg(long, default_value_t = corpus::DEFAULT_SEED)]
        seed: u64,
        /// Id pair for the rendezvous suite, e.g. `1,2`; repeatable.
        #[arg(long)]
        ids: Vec<String>,
        #[arg(long)]
        json: bool,
    },
    /// List problems or evaluate one on a configuration.
    Problems {
        #[command(subcommand)]
        action: ProblemsAction,
    },
    /// Every valid connected graph with the given node count.
    Enumerate {
        #[arg(long)]
        nodes: usize,
        /// Keep one graph per isomorphism class.
        #[arg(long)]
        up_to_iso: bool,
        #[arg(long)]
        json: bool,
    },
    /// Search for two non-isomorphic graphs of equal size with the same quotient.
    WitnessSearch {
        #[arg(long, default_value_t = 8)]
        max_nodes: usize,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand)]
enum ProblemsAction {
    List {
        #[arg(long)]
        json: bool,
    },
    Eval {
        problem: String,
        #[command(flatten)]
        placement: Placement,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct GraphSource {
    /// Graph file, or the graph text itself such as `graph 2;edge 0 1 1 1`.
    #[arg(long, conflicts_with = "gen")]
    graph: Option<String>,
    /// Generator such as `cycle:6`, `sun:3` or `random:5:0.3:7`.
    #[arg(long)]
    gen: Option<String>,
}

#[derive(Args)]
struct Placement {
    #[command(flatten)]
    source: GraphSource,
    /// Configuration file with a graph and `agent <node> <id> <input>` lines.
    #[arg(long, conflicts_with_all = ["graph", "gen"])]
    config: Option<String>,
    /// Agents as `node:id[:input]`, comma separated.
    #[arg(long)]
    agents: Option<String>,
    /// Input for every agent without its own.
    #[arg(long)]
    input: Option<String>,
}

fn load_graph(text_or_path: &str) -> Result<PortGraph> {
    let text = if Path::new(text_or_path).is_file() {
        std::fs::read_to_string(text_or_path).with_context(|| format!("reading {text_or_path}"))?
    } else {
        text_or_path.to_string()
    };
    parse_graph(&text).with_context(|| format!("parsing graph `{text_or_path}`"))
}

impl GraphSource {
    fn graph(&self) -> Result<PortGraph> {
        match (&self.graph, &self.gen) {
            (Some(g), _) => load_graph(g),
            (None, Some(spec)) => generate(spec).with_context(|| format!("generator `{spec}`")),
            (None, None) => bail!("give a graph with --graph or --gen (generators: {})", GENERATORS.join(", ")),
        }
    }
}

fn parse_agent(spec: &str, input: &str) -> Result<AgentPlacement> {
    let mut parts = spec.splitn(3, ':');
    let node = parts.next().unwrap_or_default();
    let Some(id) = parts.next() else {
        bail!("agent `{spec}` should look like node:id[:input]");
    };
    let node = node.trim().parse().with_context(|| format!("node in `{spec}`"))?;
    let id = id.trim().parse().with_context(|| format!("id in `{spec}`"))?;
    Ok(AgentPlacement::new(node, id, parts.next().unwrap_or(input)))
}

impl Placement {
    fn configuration(&self) -> Result<Configuration> {
        let input = self.input.as_deref().unwrap_or("");
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
            let dir = Path::new(path).parent().unwrap_or(Path::new(".")).to_path_buf();
            let load = |p: &str| std::fs::read_to_string(dir.join(p)).map_err(|e| format!("{p}: {e}"));
            let cfg = parse_config(&text, load).with_context(|| format!("parsing {path}"))?;
            return Ok(match &self.input {
                Some(w) => cfg.with_uniform_input(w),
                None => cfg,
            });
        }
        let g = self.source.graph()?;
        let agents = match &self.agents {
            Some(list) => list.split(',').map(|a| parse_agent(a, input)).collect::<Result<Vec<_>>>()?,
            None => vec![AgentPlacement::new(0, 1, input)],
        };
        Ok(Configuration::new(g, agents)?)
    }
}

fn print_json(value: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("json values serialize"));
}

fn yes_no(d: Option<bool>) -> &'static str {
    match d {
        Some(true) => "yes",
        Some(false) => "no",
        None => "undecided",
    }
}

fn cmd_quotient(source: &GraphSource, as_json: bool) -> Result<()> {
    let g = source.graph()?;
    let (q, classes) = quotient(&g);
    let depth = view_partition(&g).stabilization_depth;
    if as_json {
        print_json(&json!({
            "nodes": g.node_count(),
            "quotient": serialize_quotient_compact(&q),
            "classes": classes,
            "stabilization_depth": depth,
        }));
    } else {
        println!("{}", serialize_quotient(&q).trim_end());
        println!("classes {}", classes.iter().map(usize::to_string).collect::<Vec<_>>().join(" "));
        println!("stabilization depth {depth}");
    }
    Ok(())
}

fn cmd_view(source: &GraphSource, node: usize, depth: usize, as_json: bool) -> Result<()> {
    let g = source.graph()?;
    if node >= g.node_count() {
        bail!("node {node} out of range, the graph has {} nodes", g.node_count());
    }
    let view = truncated_view(&g, node, depth);
    if as_json {
        print_json(&json!({ "node": node, "depth": depth, "view": view.to_string() }));
    } else {
        println!("{view}");
    }
    Ok(())
}

fn cmd_iso(graphs: &[String], gens: &[String], as_json: bool) -> Result<()> {
    let mut all = graphs.iter().map(|g| load_graph(g)).collect::<Result<Vec<_>>>()?;
    for spec in gens {
        all.push(generate(spec).with_context(|| format!("generator `{spec}`"))?);
    }
    let [g, h] = &all[..] else {
        bail!("iso needs exactly two graphs, got {}", all.len());
    };
    let map = isomorphism(g, h);
    if as_json {
        print_json(&json!({ "isomorphic": map.is_some(), "map": map }));
    } else {
        match map {
            Some(m) => println!("isomorphic, map {}", m.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")),
            None => println!("not isomorphic"),
        }
    }
    Ok(())
}

fn cmd_run(protocol: String, placement: &Placement, cert: Vec<String>, budget: Option<u64>, trace: bool, as_json: bool) -> Result<()> {
    let cfg = placement.configuration()?;
    let req = RunRequest { protocol, certificates: cert, budget, trace };
    let run = run_named(&cfg, &req)?;
    let status = if run.all_decided() { "decided" } else { "undecided" };
    if as_json {
        let mut value = serde_json::to_value(&run)?;
        value["status"] = json!(status);
        if trace {
            value["trace"] = serde_json::to_value(&run.trace)?;
        }
        print_json(&value);
        return Ok(());
    }
    println!("protocol {} on {}", run.protocol, cfg.summary());
    for (i, id) in run.ids.iter().enumerate() {
        let round = run.decision_rounds[i].map_or("-".to_string(), |r| r.to_string());
        println!("  agent {id}: {} at round {round}, ends at node {}", yes_no(run.decisions[i]), run.final_positions[i]);
    }
    println!("rounds {} of budget {} ({status})", run.rounds_used, run.budget);
    for call in &run.oracle_log {
        println!("  oracle {call:?}");
    }
    for note in &run.notes {
        println!("  {note}");
    }
    if trace {
        print!("{}", run.trace_json_lines());
    }
    Ok(())
}

fn parse_ids(pair: &str) -> Result<[u64; 2]> {
    let ids: Vec<u64> = pair.split(',').map(|w| w.trim().parse()).collect::<Result<_, _>>().with_context(|| format!("ids `{pair}`"))?;
    match ids[..] {
        [a, b] if a != b => Ok([a, b]),
        _ => bail!("ids `{pair}` should be two distinct numbers such as 1,2"),
    }
}

fn cmd_suite(name: &str, seed: u64, ids: &[String], as_json: bool) -> Result<bool> {
    let mut opts = SuiteOptions { seed, ..SuiteOptions::default() };
    if !ids.is_empty() {
        opts.rdv_ids = ids.iter().map(|p| parse_ids(p)).collect::<Result<_>>()?;
    }
    let names: Vec<&str> = if name == "all" { SUITE_NAMES.to_vec() } else { vec![name] };
    let mut reports = Vec::new();
    for n in names {
        let Some(report) = run_suite(n, &opts) else {
            bail!("unknown suite `{n}`; known: {}, all", SUITE_NAMES.join(", "));
        };
        if !as_json {
            print!("{}", report.render());
        }
        reports.push(report);
    }
    if as_json {
        print_json(&serde_json::to_value(&reports)?);
    }
    Ok(reports.iter().all(|r| r.passed()))
}

fn problem_names() -> Vec<String> {
    let mut names: Vec<String> = BASE_PROBLEMS.iter().map(|s| s.to_string()).collect();
    names.extend(["omega", "co-<problem>", "<problem>*<problem>"].map(String::from));
    names
}

fn cmd_problems(action: &ProblemsAction) -> Result<()> {
    match action {
        ProblemsAction::List { json: as_json } => {
            let rows: Vec<(String, String, String)> = problem_names()
                .into_iter()
                .map(|name| {
                    let probe = name.replace("<k>", "1");
                    match Problem::parse(&probe) {
                        Ok(p) => (name, p.input_format(), p.class_tags().join(" ")),
                        Err(_) => (name, "see parts".into(), String::new()),
                    }
                })
                .collect();
            let protocols = protocol_names();
            if *as_json {
                let problems: Vec<_> =
                    rows.iter().map(|(n, i, t)| json!({ "name": n, "input": i, "tags": t })).collect();
                let protocols: Vec<_> = protocols.iter().map(|(n, d)| json!({ "name": n, "about": d })).collect();
                print_json(&json!({ "problems": problems, "protocols": protocols }));
            } else {
                println!("problems:");
                for (n, i, t) in rows {
                    println!("  {n:<22} input: {i:<36} {t}");
                }
                println!("protocols:");
                for (n, d) in protocols {
                    println!("  {n:<22} {d}");
                }
            }
        }
        ProblemsAction::Eval { problem, placement, json: as_json } => {
            let p = Problem::parse(problem)?;
            let cfg = placement.configuration()?;
            let answer = p.evaluate(&cfg);
            if *as_json {
                print_json(&json!({ "problem": p.name(), "configuration": cfg.summary(), "member": answer }));
            } else {
                println!("{}: {} on {}", p.name(), if answer { "yes" } else { "no" }, cfg.summary());
            }
        }
    }
    Ok(())
}

fn cmd_enumerate(nodes: usize, up_to_iso: bool, as_json: bool) -> Result<()> {
    let mut graphs = enumerate_connected(nodes)?;
    if up_to_iso {
        let mut seen = std::collections::BTreeSet::new();
        graphs.retain(|g| seen.insert(canonical_form(g)));
    }
    let lines: Vec<String> = graphs.iter().map(serialize_graph_compact).collect();
    if as_json {
        print_json(&json!({ "nodes": nodes, "count": lines.len(), "graphs": lines }));
    } else {
        println!("{} graphs", lines.len());
        for l in lines {
            println!("{l}");
        }
    }
    Ok(())
}

fn cmd_witness(max_nodes: usize, as_json: bool) -> Result<()> {
    let found = witness_same_quotient_nonisomorphic(max_nodes);
    match (found, as_json) {
        (Some(w), true) => print_json(&json!({
            "found": true,
            "first": serialize_graph_compact(&w.first),
            "second": serialize_graph_compact(&w.second),
            "quotient": serialize_quotient_compact(&w.quotient),
        })),
        (Some(w), false) => {
            println!("first\n{}\n", serialize_graph(&w.first));
            println!("second\n{}\n", serialize_graph(&w.second));
            println!("shared quotient\n{}", serialize_quotient(&w.quotient));
        }
        (None, true) => print_json(&json!({ "found": false })),
        (None, false) => println!("not found with at most {max_nodes} nodes"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Quotient { source, json } => cmd_quotient(&source, json),
        Command::View { source, node, depth, json } => cmd_view(&source, node, depth, json),
        Command::Iso { graph, gen, json } => cmd_iso(&graph, &gen, json),
        Command::Run { protocol, placement, cert, budget, trace, json } => {
            cmd_run(protocol, &placement, cert, budget, trace, json)
        }
        Command::Suite { name, seed, ids, json } => match cmd_suite(&name, seed, &ids, json) {
            Ok(true) => Ok(()),
            Ok(false) => return ExitCode::FAILURE,
            Err(e) => Err(e),
        },
        Command::Problems { action } => cmd_problems(&action),
        Command::Enumerate { nodes, up_to_iso, json } => cmd_enumerate(nodes, up_to_iso, json),
        Command::WitnessSearch { max_nodes, json } => cmd_witness(max_nodes, json),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
