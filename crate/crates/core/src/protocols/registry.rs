use serde::Serialize;
use thiserror::Error;

use super::*;
use crate::config::Configuration;
use crate::graph::{serialize_graph_compact, serialize_quotient_compact};
use crate::problems::{oracle_env, Problem, ProblemError};
use crate::sim::{Oracle, OracleCall, Protocol, RunOutcome, SimError, Simulation, TraceRound};

/// Registered protocol names with a one-line description of their input
/// and certificate.
pub fn protocol_names() -> Vec<(&'static str, &'static str)> {
    vec![
        ("rdv", "rendezvous; input n"),
        ("gather", "gathering without knowing n; input k"),
        ("token-map", "one agent maps the graph with a token"),
        ("team-map", "gather k agents and map as a team; input k"),
        ("treesize", "decide treesize; input n"),
        ("odd", "decide odd"),
        ("verify-tree", "verify tree; certificate n in binary"),
        ("verify-path", "verify path; certificate n in binary"),
        ("verify-leaf", "verify leaf; certificate: ports to a leaf, e.g. 1,2"),
        ("verify-degree-<k>", "verify degree-k; certificate: ports to such a node"),
        ("omega-verify", "verify teamsize x quotient; input 1<k> or 2<quotient>, certificate n in binary"),
        ("reduce:<problem>", "decide a problem with a teamsize x quotient oracle"),
        ("dovetail-treesize", "single-agent treesize by alternating verifiers; input n"),
        ("cycle-cosun", "decide cycle x co-sun with a quotient oracle; input 1 or 2"),
    ]
}

#[derive(Debug, Clone, Default)]
pub struct RunRequest {
    pub protocol: String,
    /// One per agent, or a single one shared by all; empty means none.
    pub certificates: Vec<String>,
    /// Round budget; [`default_budget`] if absent.
    pub budget: Option<u64>,
    pub trace: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct NamedRun {
    pub protocol: String,
    pub ids: Vec<u64>,
    pub decisions: Vec<Option<bool>>,
    pub decision_rounds: Vec<Option<u64>>,
    pub rounds_used: u64,
    pub budget: u64,
    pub final_positions: Vec<usize>,
    pub oracle_log: Vec<OracleCall>,
    pub notes: Vec<String>,
    #[serde(skip)]
    pub trace: Vec<TraceRound>,
}

impl NamedRun {
    pub fn all_decided(&self) -> bool {
        self.decisions.iter().all(Option::is_some)
    }

    pub fn trace_json_lines(&self) -> String {
        self.trace
            .iter()
            .map(|r| serde_json::to_string(r).expect("trace serializes") + "\n")
            .collect()
    }
}

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("unknown protocol `{0}`")]
    Unknown(String),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error("simulation fault: {0}")]
    Sim(#[from] SimError),
}

/// Sum of the gathering phases up to the first one that is guaranteed to
/// succeed for `n` nodes and ids up to `max_id`.
pub fn gather_horizon(n: u64, max_id: u64) -> u64 {
    let need_b = (64 - max_id.leading_zeros()).max(1);
    let (mut pn, mut pb) = (1u64, 1u32);
    let mut total = 0u64;
    loop {
        total = total.saturating_add(tau_max(pn, pb));
        if (pn, pb) == (n, need_b) || total == u64::MAX {
            return total;
        }
        (pn, pb) = if pb > 1 { (pn + 1, pb - 1) } else { (1, pn as u32 + pb) };
    }
}

/// `4 (max id + 1) n^n` plus room for gathering and mapping.
pub fn default_budget(cfg: &Configuration) -> u64 {
    let n = cfg.graph().node_count() as u64;
    let base = slot(n).saturating_mul(2).saturating_mul(cfg.max_id().saturating_add(1));
    let mapping = n.saturating_pow(4).saturating_mul(64).saturating_add(1024);
    base.saturating_add(gather_horizon(n, cfg.max_id())).saturating_add(mapping)
}

fn execute<P: Protocol>(
    cfg: &Configuration,
    protocol: &P,
    req: &RunRequest,
    oracle: Option<&dyn Oracle>,
    notes: impl Fn(&Configuration, &RunOutcome<P::State>) -> Vec<String>,
) -> Result<NamedRun, RegistryError> {
    let budget = req.budget.unwrap_or_else(|| default_budget(cfg));
    let certs = match req.certificates.len() {
        0 => vec![String::new(); cfg.team_size()],
        1 => vec![req.certificates[0].clone(); cfg.team_size()],
        _ => req.certificates.clone(),
    };
    let mut sim = Simulation::new(cfg, protocol).certificates(certs).max_rounds(budget).trace(req.trace);
    if let Some(o) = oracle {
        sim = sim.oracle(o);
    }
    let out = sim.run()?;
    let notes = notes(cfg, &out);
    Ok(NamedRun {
        protocol: req.protocol.clone(),
        ids: cfg.agents().iter().map(|a| a.id).collect(),
        decisions: out.decisions,
        decision_rounds: out.decision_rounds,
        rounds_used: out.rounds_used,
        budget,
        final_positions: out.final_positions,
        oracle_log: out.oracle_log,
        notes,
        trace: out.trace,
    })
}

fn none<S>(_: &Configuration, _: &RunOutcome<S>) -> Vec<String> {
    Vec::new()
}

/// Runs a registered protocol by name. Oracle-based protocols get the
/// oracle they need bound to `cfg`.
pub fn run_named(cfg: &Configuration, req: &RunRequest) -> Result<NamedRun, RegistryError> {
    let name = req.protocol.as_str();
    if let Some(problem) = name.strip_prefix("reduce:") {
        let problem = Problem::parse(problem)?;
        let oracle = oracle_env(&Problem::omega(), cfg)?;
        return execute(cfg, &ReduceToOmega { problem }, req, Some(&oracle), |_, out| {
            let mut notes = Vec::new();
            if let Some(k) = out.final_states.first().and_then(|s| s.team_size) {
                notes.push(format!("team size {k}"));
            }
            if let Some(c) = out.final_states.first().and_then(|s| s.evaluated.as_ref()) {
                notes.push(format!("evaluated on {}", c.summary()));
            }
            notes
        });
    }
    if let Some(k) = name.strip_prefix("verify-degree-") {
        let k = k.parse().map_err(|_| RegistryError::Unknown(name.to_string()))?;
        return execute(cfg, &VerifyDegree { k }, req, None, none);
    }
    match name {
        "rdv" => execute(cfg, &Rdv, req, None, |cfg, out| {
            cfg.agents()
                .iter()
                .zip(&out.final_states)
                .map(|(a, s)| match s.met_at {
                    Some(r) => format!("agent {} met {:?} at round {r}", a.id, s.met),
                    None => format!("agent {} met nobody", a.id),
                })
                .collect()
        }),
        "gather" => execute(cfg, &Gather, req, None, |_, out| {
            out.final_states
                .first()
                .and_then(|s| s.gathered_at)
                .map(|r| vec![format!("gathered at round {r}")])
                .unwrap_or_default()
        }),
        "token-map" => execute(cfg, &TokenMap, req, None, |_, out| {
            out.final_states
                .iter()
                .filter_map(|s| s.map.as_ref())
                .map(|m| format!("map {}", serialize_graph_compact(m)))
                .collect()
        }),
        "team-map" => execute(cfg, &TeamMap, req, None, |_, out| {
            out.final_states
                .first()
                .and_then(|s| s.result.as_ref())
                .map(|c| vec![format!("rebuilt {}", c.summary())])
                .unwrap_or_default()
        }),
        "treesize" => execute(cfg, &DecideTreesize, req, None, none),
        "odd" => execute(cfg, &DecideOdd, req, None, none),
        "verify-tree" => execute(cfg, &VerifyTreeSize { path: false }, req, None, none),
        "verify-path" => execute(cfg, &VerifyTreeSize { path: true }, req, None, none),
        "verify-leaf" => execute(cfg, &VerifyDegree { k: 1 }, req, None, none),
        "omega-verify" => execute(cfg, &OmegaVerify, req, None, |_, out| {
            out.final_states
                .first()
                .and_then(|s| s.rebuilt.as_ref())
                .map(|q| vec![format!("quotient from view {}", serialize_quotient_compact(q))])
                .unwrap_or_default()
        }),
        "dovetail-treesize" => execute(cfg, &DovetailTreesize::default(), req, None, |_, out| {
            out.final_states
                .first()
                .map(|s| vec![format!("stopped at certificate `{}`", length_lex(s.index))])
                .unwrap_or_default()
        }),
        "cycle-cosun" => {
            let oracle = oracle_env(&Problem::Quotient, cfg)?;
            execute(cfg, &CycleCoSun, req, Some(&oracle), |_, out| {
                out.final_states
                    .first()
                    .and_then(|s| s.quotient.as_ref())
                    .map(|q| vec![format!("quotient {}", serialize_quotient_compact(q))])
                    .unwrap_or_default()
            })
        }
        _ => Err(RegistryError::Unknown(name.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::path;

    #[test]
    fn unknown_name() {
        let cfg = Configuration::with_starts(path(2).unwrap(), &[0]).unwrap();
        let req = RunRequest { protocol: "nope".into(), ..Default::default() };
        assert!(matches!(run_named(&cfg, &req), Err(RegistryError::Unknown(_))));
    }

    #[test]
    fn rdv_on_k2() {
        let cfg = Configuration::with_starts(path(2).unwrap(), &[0, 1]).unwrap().with_uniform_input("2");
        let run = run_named(&cfg, &RunRequest { protocol: "rdv".into(), ..Default::default() }).unwrap();
        assert_eq!(run.decisions, vec![Some(true); 2]);
        assert!(run.notes[0].contains("met"));
    }

    #[test]
    fn budget_covers_gathering() {
        let cfg = Configuration::with_starts(path(4).unwrap(), &[0, 3, 1]).unwrap();
        assert!(default_budget(&cfg) > gather_horizon(4, 3));
        assert_eq!(gather_horizon(1, 1), 4);
    }
}
