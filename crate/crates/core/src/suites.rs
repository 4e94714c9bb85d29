//! Property suites run over the standard corpus. Each suite returns a
//! report with one check per property: how many cases it covered, a short
//! summary and the first counterexample if any.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{AgentPlacement, Configuration};
use crate::corpus::{self, CorpusGraph};
use crate::graph::{
    anchored_isomorphism, consistent_cycle, isomorphic, path, quotient_isomorphic,
    serialize_graph_compact, serialize_quotient_compact, star, sun, NodeId, PortGraph,
    QuotientGraph,
};
use crate::problems::{
    closure_check, even_start_index, oracle_env, witness_same_quotient_nonisomorphic, Problem,
    WitnessPair,
};
use crate::protocols::{
    default_budget, gather_horizon, tau, CycleCoSun, DecideOdd, DecideTreesize, DovetailTreesize,
    Gather, OmegaVerify, ReduceToOmega, Rdv, TokenMap,
};
use crate::sim::{Protocol, RunOutcome, Simulation};
use crate::views::{
    quotient, quotient_from_view, truncated_view, view_classes_by_trees, view_partition,
};

pub const SUITE_NAMES: &[&str] = &[
    "norris",
    "rdv",
    "gather",
    "token",
    "omega",
    "reduction",
    "dovetail",
    "cosun",
    "separations",
    "closure",
    "indistinguishability",
    "unanimity",
];

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub cases: u64,
    pub summary: String,
    pub counterexample: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<Check>,
    #[serde(skip)]
    pub elapsed_ms: u128,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Plain-text table, one line per check.
    pub fn render(&self) -> String {
        let mut out = format!(
            "suite {}: {} ({} ms)\n",
            self.suite,
            if self.passed() { "pass" } else { "FAIL" },
            self.elapsed_ms
        );
        for c in &self.checks {
            let mark = if c.passed { "ok  " } else { "FAIL" };
            out.push_str(&format!("  {mark} {:<48} {:>7} cases  {}\n", c.name, c.cases, c.summary));
            if let Some(cx) = &c.counterexample {
                out.push_str(&format!("       first counterexample: {cx}\n"));
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct SuiteOptions {
    pub seed: u64,
    /// Id pairs for the rendezvous suite.
    pub rdv_ids: Vec<[u64; 2]>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions { seed: corpus::DEFAULT_SEED, rdv_ids: vec![[1, 2], [2, 5]] }
    }
}

/// Counts cases of one property and keeps the first failure.
struct Tally {
    name: String,
    cases: u64,
    failures: u64,
    first: Option<String>,
}

impl Tally {
    fn new(name: &str) -> Self {
        Tally { name: name.to_string(), cases: 0, failures: 0, first: None }
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.first.is_none() {
                self.first = Some(describe());
            }
        }
    }

    fn finish(self, summary: impl Into<String>) -> Check {
        let mut summary = summary.into();
        if self.failures > 0 {
            summary = format!("{} failures; {summary}", self.failures);
        }
        Check {
            name: self.name,
            passed: self.failures == 0 && self.cases > 0,
            cases: self.cases,
            summary,
            counterexample: self.first,
        }
    }
}

pub fn run_suite(name: &str, opts: &SuiteOptions) -> Option<SuiteReport> {
    let started = Instant::now();
    let checks = match name {
        "norris" => norris(opts.seed),
        "rdv" => rdv(opts),
        "gather" => gather(opts.seed),
        "token" => token(opts.seed),
        "omega" => omega(),
        "reduction" => reduction(),
        "dovetail" => dovetail(opts.seed),
        "cosun" => cosun(),
        "separations" => separations(),
        "closure" => closure(),
        "indistinguishability" => indistinguishability(),
        "unanimity" => unanimity(),
        _ => return None,
    };
    Some(SuiteReport {
        suite: name.to_string(),
        seed: opts.seed,
        checks,
        elapsed_ms: started.elapsed().as_millis(),
    })
}

fn small_classes() -> Vec<CorpusGraph> {
    corpus::up_to_isomorphism(corpus::exhaustive(4))
}

fn random_of_size(seed: u64, n: usize) -> Vec<CorpusGraph> {
    corpus::random(corpus::RANDOM_COUNT, seed).into_iter().filter(|c| c.node_count() == n).collect()
}

/// Every map from `k` agents to nodes.
fn ordered_placements(n: usize, k: usize) -> Vec<Vec<NodeId>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|p: Vec<NodeId>| {
                (0..n).map(move |v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    out
}

fn team(g: &PortGraph, starts: &[NodeId], input: &str) -> Configuration {
    let agents =
        starts.iter().enumerate().map(|(i, &s)| AgentPlacement::new(s, i as u64 + 1, input)).collect();
    Configuration::new(g.clone(), agents).expect("valid placement")
}

fn run<P: Protocol>(cfg: &Configuration, p: &P, budget: u64) -> RunOutcome<P::State> {
    Simulation::new(cfg, p).max_rounds(budget).run().expect("protocols make legal moves")
}

fn norris(seed: u64) -> Vec<Check> {
    let mut stable = Tally::new("views stabilize by depth n-1");
    let mut refinement = Tally::new("refinement matches view trees");
    let mut bound = Tally::new("stabilization depth <= quotient size - 1");
    let mut fibers = Tally::new("equal fibers, quotient size divides n");
    let mut from_view = Tally::new("quotient from one view of depth 2n");
    let mut deepest = 0;
    for c in corpus::standard(seed) {
        let g = &c.graph;
        let n = g.node_count();
        let shallow = view_classes_by_trees(g, n - 1);
        let deep = view_classes_by_trees(g, 2 * n);
        stable.record(shallow == deep, || format!("{}: {shallow:?} vs {deep:?}", c.name));
        let vp = view_partition(g);
        refinement.record(vp.class_of == deep, || format!("{}: {:?} vs {deep:?}", c.name, vp.class_of));
        let classes = vp.blocks.len();
        deepest = deepest.max(vp.stabilization_depth);
        bound.record(vp.stabilization_depth < classes, || {
            format!("{}: depth {} with {classes} classes", c.name, vp.stabilization_depth)
        });
        let size = vp.blocks[0].len();
        fibers.record(vp.blocks.iter().all(|b| b.len() == size) && n % classes == 0, || {
            format!("{}: blocks {:?}", c.name, vp.blocks)
        });
        let q = quotient(g).0;
        for v in 0..n {
            let ok = quotient_from_view(&truncated_view(g, v, 2 * n))
                .is_ok_and(|(r, _)| quotient_isomorphic(&r, &q));
            from_view.record(ok, || format!("{} from node {v}", c.name));
        }
    }
    vec![
        stable.finish("depth n-1 and 2n tree partitions compared"),
        refinement.finish("fixpoint classes vs depth-2n trees"),
        bound.finish(format!("deepest stabilization {deepest}")),
        fibers.finish(""),
        from_view.finish("every start node"),
    ]
}

fn rdv(opts: &SuiteOptions) -> Vec<Check> {
    let mut meet = Tally::new("meet by tau(n, min id)");
    let mut home = Tally::new("agent i at its start at tau(n, i)");
    let mut accept = Tally::new("both agents decide yes");
    let mut graphs = small_classes();
    graphs.extend(random_of_size(opts.seed, 5));
    let mut worst = 0.0f64;
    let mut latest = 0;
    for c in &graphs {
        let g = &c.graph;
        let n = g.node_count() as u64;
        for ids in &opts.rdv_ids {
            for (s1, s2) in ordered_placements(g.node_count(), 2).iter().map(|p| (p[0], p[1])) {
                let input = n.to_string();
                let agents =
                    vec![AgentPlacement::new(s1, ids[0], &*input), AgentPlacement::new(s2, ids[1], &*input)];
                let cfg = Configuration::new(g.clone(), agents).expect("distinct ids");
                let limit = tau(n, ids[0].max(ids[1]));
                let out = Simulation::new(&cfg, &Rdv).max_rounds(limit).trace(true).run().expect("legal");
                let bound = tau(n, ids[0].min(ids[1]));
                let met = out
                    .trace
                    .iter()
                    .find(|r| r.agents[0].node == r.agents[1].node)
                    .map(|r| r.round);
                meet.record(met.is_some_and(|r| r <= bound), || format!("{} met at {met:?}", cfg.summary()));
                if let Some(r) = met {
                    worst = worst.max(r as f64 / bound as f64);
                    latest = latest.max(r);
                }
                for (i, a) in cfg.agents().iter().enumerate() {
                    let at = tau(n, a.id);
                    let node = out.trace.iter().find(|r| r.round == at).map(|r| r.agents[i].node);
                    home.record(node == Some(a.start), || format!("{} agent {} at {node:?}", cfg.summary(), a.id));
                }
                accept.record(out.accepted(), || format!("{}: {:?}", cfg.summary(), out.decisions));
            }
        }
    }
    let ids: Vec<String> = opts.rdv_ids.iter().map(|p| format!("{{{},{}}}", p[0], p[1])).collect();
    vec![
        meet.finish(format!("ids {}, latest meeting round {latest} ({:.3} of its bound)", ids.join(" "), worst)),
        home.finish(""),
        accept.finish(""),
    ]
}

fn gather(seed: u64) -> Vec<Check> {
    let mut together = Tally::new("all agents co-located at the end");
    let mut accept = Tally::new("every agent decides yes");
    let mut horizon = Tally::new("gathered by the guaranteed phase");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases: Vec<(PortGraph, Vec<NodeId>)> = Vec::new();
    for c in small_classes() {
        for k in [2, 3] {
            for p in ordered_placements(c.node_count(), k) {
                cases.push((c.graph.clone(), p));
            }
        }
    }
    for c in random_of_size(seed, 5) {
        cases.extend(ordered_placements(5, 2).into_iter().map(|p| (c.graph.clone(), p)));
        let mut triples = ordered_placements(5, 3);
        triples.shuffle(&mut rng);
        cases.extend(triples.into_iter().take(16).map(|p| (c.graph.clone(), p)));
    }
    let mut latest = 0;
    for (g, starts) in cases {
        let cfg = team(&g, &starts, &starts.len().to_string());
        let out = run(&cfg, &Gather, default_budget(&cfg));
        let first = out.final_positions[0];
        together.record(out.final_positions.iter().all(|&v| v == first), || {
            format!("{}: ended at {:?}", cfg.summary(), out.final_positions)
        });
        accept.record(out.accepted(), || format!("{}: {:?}", cfg.summary(), out.decisions));
        let limit = gather_horizon(g.node_count() as u64, cfg.max_id());
        horizon.record(out.rounds_used <= limit, || {
            format!("{}: {} rounds, limit {limit}", cfg.summary(), out.rounds_used)
        });
        latest = latest.max(out.rounds_used);
    }
    vec![
        together.finish("k in {2, 3}; all placements up to 4 nodes, sampled at 5"),
        accept.finish(""),
        horizon.finish(format!("latest gathering at round {latest}")),
    ]
}

fn token(seed: u64) -> Vec<Check> {
    let mut maps = Tally::new("map isomorphic to the graph, start marked");
    let mut back = Tally::new("explorer ends at its start");
    let mut graphs = small_classes();
    graphs.extend(random_of_size(seed, 5));
    graphs.extend(corpus::named().into_iter().filter(|c| c.node_count() == 5));
    let mut longest = 0;
    for c in &graphs {
        for v in 0..c.node_count() {
            let cfg = Configuration::with_starts(c.graph.clone(), &[v]).expect("valid");
            let out = run(&cfg, &TokenMap, 10_000_000);
            longest = longest.max(out.rounds_used);
            let map = out.final_states[0].map.clone();
            let ok = out.accepted()
                && map.as_ref().is_some_and(|m| anchored_isomorphism(m, &c.graph, 0, v).is_some());
            maps.record(ok, || {
                format!("{} from {v}: {:?}", c.name, map.as_ref().map(serialize_graph_compact))
            });
            back.record(out.final_positions[0] == v, || format!("{} from {v}", c.name));
        }
    }
    vec![maps.finish(format!("up to 5 nodes, longest run {longest} rounds")), back.finish("")]
}

fn omega_inputs(g: &PortGraph, k: usize) -> Vec<String> {
    let q = |h: &QuotientGraph| format!("2{}", serialize_quotient_compact(h));
    let k2 = quotient(&path(2).expect("valid")).0;
    vec![
        format!("1{}", k - 1),
        format!("1{k}"),
        format!("1{}", k + 1),
        q(&quotient(g).0),
        q(&QuotientGraph::one_loop()),
        q(&QuotientGraph::loop_with_pendant()),
        q(&k2),
        "3".into(),
    ]
}

fn omega() -> Vec<Check> {
    let mut yes = Tally::new("yes-instances accepted with x = n");
    let mut no = Tally::new("no-instances rejected for x in 1..2n");
    let mut configs = 0u64;
    let omega = Problem::omega();
    for c in small_classes() {
        let n = c.node_count();
        for starts in [vec![0], vec![0, n - 1], vec![n - 1, 0, n / 2]] {
            for w in omega_inputs(&c.graph, starts.len()) {
                let cfg = team(&c.graph, &starts, &w);
                configs += 1;
                let verify = |x: usize| {
                    Simulation::new(&cfg, &OmegaVerify)
                        .certificate(&format!("{x:b}"))
                        .max_rounds(u64::MAX - 1)
                        .run()
                        .expect("legal")
                };
                if omega.evaluate(&cfg) {
                    let out = verify(n);
                    yes.record(out.accepted(), || format!("{}: {:?}", cfg.summary(), out.decisions));
                } else {
                    for x in 1..=2 * n {
                        let out = verify(x);
                        no.record(out.rejected(), || format!("{} with x = {x}: {:?}", cfg.summary(), out.decisions));
                    }
                }
            }
        }
    }
    vec![
        yes.finish(format!("{configs} configurations")),
        no.finish("certificates bounded to 1..2n"),
    ]
}

/// The configurations of the reduction suite for one problem.
fn reduction_inputs(problem: &Problem, n: usize) -> Vec<String> {
    match problem {
        Problem::Teamsize => (0..=3).map(|k| k.to_string()).collect(),
        Problem::Treesize => vec![n.to_string(), (n + 1).to_string()],
        _ => vec![String::new()],
    }
}

fn reduce(cfg: &Configuration, problem: &Problem) -> RunOutcome<crate::protocols::ReduceState> {
    let oracle = oracle_env(&Problem::omega(), cfg).expect("omega is uniform");
    Simulation::new(cfg, &ReduceToOmega { problem: problem.clone() })
        .oracle(&oracle)
        .max_rounds(default_budget(cfg))
        .run()
        .expect("legal")
}

fn reduction() -> Vec<Check> {
    let problems = [Problem::Tree, Problem::Path, Problem::Teamsize, Problem::Treesize];
    let mut tallies: Vec<Tally> =
        problems.iter().map(|p| Tally::new(&format!("reduction agrees with {}", p.name()))).collect();
    for c in small_classes() {
        let n = c.node_count();
        for k in 1..=3 {
            for starts in ordered_placements(n, k) {
                for (p, tally) in problems.iter().zip(&mut tallies) {
                    for w in reduction_inputs(p, n) {
                        let cfg = team(&c.graph, &starts, &w);
                        let truth = p.evaluate(&cfg);
                        let out = reduce(&cfg, p);
                        tally.record(out.decisions.iter().all(|d| *d == Some(truth)), || {
                            format!("{}: truth {truth}, got {:?}", cfg.summary(), out.decisions)
                        });
                    }
                }
            }
        }
    }
    tallies.into_iter().map(|t| t.finish("n <= 4, k in {1, 2, 3}, all placements")).collect()
}

fn dovetail(seed: u64) -> Vec<Check> {
    let mut correct = Tally::new("dovetailing decides treesize");
    let mut home = Tally::new("agent ends at its start");
    let mut graphs = small_classes();
    graphs.extend(random_of_size(seed, 5));
    graphs.extend(corpus::named().into_iter().filter(|c| c.node_count() == 5));
    let decider = DovetailTreesize::default();
    let mut longest = 0;
    for c in &graphs {
        for v in 0..c.node_count() {
            for w in (1..=6).map(|m| m.to_string()).chain(["".to_string(), "07".to_string()]) {
                let cfg = team(&c.graph, &[v], &w);
                let truth = Problem::Treesize.evaluate(&cfg);
                let out = run(&cfg, &decider, 10_000_000);
                longest = longest.max(out.rounds_used);
                correct.record(out.decisions[0] == Some(truth), || {
                    format!("{}: truth {truth}, got {:?}", cfg.summary(), out.decisions[0])
                });
                home.record(out.final_positions[0] == v, || cfg.summary());
            }
        }
    }
    vec![correct.finish(format!("single agent, n <= 5, longest run {longest} rounds")), home.finish("")]
}

fn cosun() -> Vec<Check> {
    let mut shapes = Tally::new("cycles quotient to O, suns to P");
    for m in 3..=6 {
        let cq = quotient(&consistent_cycle(m).expect("m >= 3")).0;
        shapes.record(quotient_isomorphic(&cq, &QuotientGraph::one_loop()), || format!("cycle {m}"));
        let sq = quotient(&sun(m).expect("m >= 3")).0;
        shapes.record(quotient_isomorphic(&sq, &QuotientGraph::loop_with_pendant()), || format!("sun {m}"));
    }
    let mut decided = Tally::new("cycle x co-sun decided with a quotient oracle");
    let product = Problem::parse("cycle*co-sun").expect("registered");
    let mut graphs: Vec<(String, PortGraph)> = Vec::new();
    for m in 3..=6 {
        graphs.push((format!("cycle-{m}"), consistent_cycle(m).expect("valid")));
        graphs.push((format!("sun-{m}"), sun(m).expect("valid")));
    }
    for m in 2..=6 {
        graphs.push((format!("star-{m}"), star(m).expect("valid")));
    }
    for m in 1..=6 {
        graphs.push((format!("path-{m}"), path(m).expect("valid")));
    }
    for (name, g) in &graphs {
        for v in 0..g.node_count() {
            for w in ["1", "2"] {
                let cfg = team(g, &[v], w);
                let truth = product.evaluate(&cfg);
                let oracle = oracle_env(&Problem::Quotient, &cfg).expect("uniform");
                let out = Simulation::new(&cfg, &CycleCoSun).oracle(&oracle).max_rounds(100_000_000).run().expect("legal");
                decided.record(out.decisions[0] == Some(truth), || {
                    format!("{name} from {v}, input {w}: truth {truth}, got {:?}", out.decisions[0])
                });
            }
        }
    }
    vec![shapes.finish("m in 3..6"), decided.finish("cycles, suns, stars, paths; every start")]
}

/// The golden text form of a witness pair.
pub fn witness_text(w: &WitnessPair) -> String {
    format!(
        "first {}\nsecond {}\nquotient {}\n",
        serialize_graph_compact(&w.first),
        serialize_graph_compact(&w.second),
        serialize_quotient_compact(&w.quotient)
    )
}

fn separations() -> Vec<Check> {
    let mut sizes = Tally::new("C4 and C6 share a quotient");
    let c4 = consistent_cycle(4).expect("valid");
    let c6 = consistent_cycle(6).expect("valid");
    let same = quotient_isomorphic(&quotient(&c4).0, &quotient(&c6).0);
    sizes.record(same && c4.node_count() != c6.node_count(), || "quotients differ".into());
    let shapes = !quotient_isomorphic(&QuotientGraph::one_loop(), &QuotientGraph::loop_with_pendant());
    sizes.record(shapes, || "O and P isomorphic".into());
    let mut pair = Tally::new("same size and quotient, not isomorphic");
    let found = witness_same_quotient_nonisomorphic(8);
    let summary = match &found {
        Some(w) => {
            let ok = w.first.node_count() == w.second.node_count()
                && quotient_isomorphic(&quotient(&w.first).0, &quotient(&w.second).0)
                && quotient_isomorphic(&quotient(&w.first).0, &w.quotient)
                && !isomorphic(&w.first, &w.second);
            pair.record(ok, || witness_text(w));
            format!(
                "{} vs {}",
                serialize_graph_compact(&w.first),
                serialize_graph_compact(&w.second)
            )
        }
        None => {
            pair.record(false, || "no pair up to 8 nodes".into());
            String::new()
        }
    };
    vec![sizes.finish("quotient O, sizes 4 and 6"), pair.finish(summary)]
}

/// Problems checked for closure under automorphisms.
pub fn registered_problems() -> Vec<Problem> {
    let mut out: Vec<Problem> = crate::problems::BASE_PROBLEMS
        .iter()
        .filter(|n| !n.contains('<'))
        .map(|n| Problem::parse(n).expect("base names parse"))
        .collect();
    out.extend((1..=3).map(Problem::Degree));
    for extra in ["omega", "co-tree", "co-sun", "cycle*co-sun"] {
        out.push(Problem::parse(extra).expect("registered"));
    }
    out
}

fn closure() -> Vec<Check> {
    let graphs = corpus::exhaustive(4);
    let mut checks = Vec::new();
    let mut all = Tally::new("every registered problem is closed");
    for p in registered_problems() {
        for c in &graphs {
            all.record(closure_check(&p, &c.graph).is_ok(), || format!("{} on {}", p.name(), c.name));
        }
    }
    checks.push(all.finish(format!("{} problems, all graphs up to 4 nodes", registered_problems().len())));
    let mut control = Tally::new("negative control is caught");
    let c4 = consistent_cycle(4).expect("valid");
    control.record(closure_check(&even_start_index(), &c4).is_err(), || "no counterexample on C4".into());
    checks.push(control.finish("even start index on C4"));
    checks
}

fn indistinguishability() -> Vec<Check> {
    let mut same = Tally::new("path center and cycle agree to depth t");
    let mut differ = Tally::new("they differ at depth t+1");
    for t in 1..=5 {
        let line = path(2 * t + 3).expect("valid");
        let center = t + 1;
        let here = truncated_view(&line, center, t);
        let next = truncated_view(&line, center, t + 1);
        for m in [3, 2 * t + 3] {
            let ring = consistent_cycle(m).expect("valid");
            for v in 0..m {
                same.record(here == truncated_view(&ring, v, t), || format!("t = {t}, cycle {m}, node {v}"));
                differ.record(next != truncated_view(&ring, v, t + 1), || format!("t = {t}, cycle {m}, node {v}"));
            }
        }
    }
    vec![same.finish("t in 1..5, cycles of 3 and 2t+3 nodes"), differ.finish("")]
}

fn unanimity() -> Vec<Check> {
    let mut tallies = Vec::new();
    let classes = small_classes();
    let unanimous = |d: &[Option<bool>]| d.iter().all(|x| x.is_some() && *x == d[0]);

    let mut treesize = Tally::new("treesize decider");
    let mut reduced = Tally::new("reductions (tree, teamsize)");
    let mut odd = Tally::new("odd decider, one agent");
    let mut odd_split = 0;
    for c in &classes {
        let n = c.node_count();
        for k in 1..=3 {
            for starts in ordered_placements(n, k) {
                for w in [n.to_string(), (n + 1).to_string()] {
                    let cfg = team(&c.graph, &starts, &w);
                    let out = run(&cfg, &DecideTreesize, 10_000);
                    treesize.record(unanimous(&out.decisions), || format!("{}: {:?}", cfg.summary(), out.decisions));
                }
                for (p, w) in [(Problem::Tree, ""), (Problem::Teamsize, "1")] {
                    let cfg = team(&c.graph, &starts, w);
                    let out = reduce(&cfg, &p);
                    reduced.record(unanimous(&out.decisions), || format!("{}: {:?}", cfg.summary(), out.decisions));
                }
                let cfg = team(&c.graph, &starts, "");
                let out = run(&cfg, &DecideOdd, 10);
                if k == 1 {
                    odd.record(unanimous(&out.decisions), || cfg.summary());
                } else if !unanimous(&out.decisions) {
                    odd_split += 1;
                }
            }
        }
    }
    let mut single = Tally::new("single-agent deciders (dovetail, cycle x co-sun)");
    for c in &classes {
        for v in 0..c.node_count() {
            let cfg = team(&c.graph, &[v], &c.node_count().to_string());
            let out = run(&cfg, &DovetailTreesize::default(), 10_000_000);
            single.record(unanimous(&out.decisions), || cfg.summary());
            let cfg = team(&c.graph, &[v], "2");
            let oracle = oracle_env(&Problem::Quotient, &cfg).expect("uniform");
            let out = Simulation::new(&cfg, &CycleCoSun).oracle(&oracle).max_rounds(100_000_000).run().expect("legal");
            single.record(unanimous(&out.decisions), || cfg.summary());
        }
    }
    tallies.push(treesize.finish("n <= 4, k in {1, 2, 3}"));
    tallies.push(reduced.finish(""));
    tallies.push(odd.finish(format!(
        "with several agents the starts may differ in parity; {odd_split} such placements split"
    )));
    tallies.push(single.finish(""));
    tallies
}
