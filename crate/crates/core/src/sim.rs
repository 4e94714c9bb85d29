//! Synchronous, deterministic execution of agent protocols.
//!
//! Every round, each active agent observes its surroundings (degree, entry
//! port, co-located agents with their full state, the token) and returns one
//! [`Action`]; all actions then take effect at once. Agents meet only by
//! being at the same node at the end of a round.
//!
//! Two actions let the simulator skip ahead: [`Action::Wait`] parks an agent
//! until a given round or until the set of agents at its node changes, and
//! [`Action::CollectView`] runs a whole view-collecting walk in one step.
//! When no agent is active the clock jumps to the next wake-up.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;
use thiserror::Error;

use crate::config::Configuration;
use crate::graph::{NodeId, Port};
use crate::views::{truncated_view, ViewTree};

/// Static data an agent starts with.
#[derive(Debug, Clone, Copy)]
pub struct AgentInfo<'a> {
    pub id: u64,
    pub input: &'a str,
    pub certificate: &'a str,
}

/// Another agent at the same node at the start of the round.
#[derive(Debug)]
pub struct Peer<'a, S> {
    pub id: u64,
    pub decision: Option<bool>,
    pub state: &'a S,
}

/// Everything an agent perceives in one round. Contains no node names.
#[derive(Debug)]
pub struct Observation<'a, S> {
    pub round: u64,
    pub degree: usize,
    /// Port through which the agent arrived in the previous round.
    pub entry_port: Option<Port>,
    /// Co-located agents in ascending id order.
    pub peers: Vec<Peer<'a, S>>,
    pub token_here: bool,
    pub carrying_token: bool,
    /// Delivered in the round after a [`Action::CollectView`] completes.
    pub view: Option<ViewTree>,
}

impl<S> Observation<'_, S> {
    pub fn peer(&self, id: u64) -> Option<&Peer<'_, S>> {
        self.peers.iter().find(|p| p.id == id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Action {
    Stay,
    Move(Port),
    /// Make the same move as the given co-located agent this round.
    Follow(u64),
    /// Stay until round `until`, or until the agents at this node change.
    Wait { until: u64 },
    PlaceToken,
    PickToken,
    /// Walk every port sequence of length at most `depth` and return; the
    /// view arrives with the next observation.
    CollectView { depth: usize },
    Decide(bool),
}

impl Action {
    fn label(&self) -> String {
        match *self {
            Action::Stay => "stay".into(),
            Action::Move(p) => format!("move {p}"),
            Action::Follow(id) => format!("follow {id}"),
            Action::Wait { until } => format!("wait until {until}"),
            Action::PlaceToken => "place-token".into(),
            Action::PickToken => "pick-token".into(),
            Action::CollectView { depth } => format!("collect-view {depth}"),
            Action::Decide(true) => "decide yes".into(),
            Action::Decide(false) => "decide no".into(),
        }
    }
}

/// Answers membership queries for a fixed configuration.
pub trait Oracle {
    fn answer(&self, input: &str) -> bool;
}

impl<F: Fn(&str) -> bool> Oracle for F {
    fn answer(&self, input: &str) -> bool {
        self(input)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleCall {
    pub agent: u64,
    pub round: u64,
    pub input: String,
    pub answer: bool,
}

/// Handle through which a protocol step queries the oracle. Queries take no
/// rounds.
pub struct OracleCtx<'o> {
    oracle: Option<&'o dyn Oracle>,
    agent: u64,
    round: u64,
    log: &'o mut Vec<OracleCall>,
    missing: bool,
}

impl OracleCtx<'_> {
    pub fn query(&mut self, input: &str) -> bool {
        let Some(oracle) = self.oracle else {
            self.missing = true;
            return false;
        };
        let answer = oracle.answer(input);
        self.log.push(OracleCall {
            agent: self.agent,
            round: self.round,
            input: input.to_string(),
            answer,
        });
        answer
    }
}

/// An agent program. `step` is called once per active round.
pub trait Protocol {
    type State: Clone;

    fn init(&self, info: &AgentInfo<'_>) -> Self::State;

    fn step(
        &self,
        state: &mut Self::State,
        obs: &Observation<'_, Self::State>,
        oracle: &mut OracleCtx<'_>,
    ) -> Action;

    /// Whether the run starts with a token at the start node of the agent
    /// with the largest id.
    fn uses_token(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("agent {agent} tried port {port} at a node of degree {degree} in round {round}")]
    IllegalPort { agent: u64, round: u64, port: Port, degree: usize },
    #[error("agent {agent} follows agent {target}, which is not at its node in round {round}")]
    FollowNotColocated { agent: u64, round: u64, target: u64 },
    #[error("agent {agent} picked up a token that is not at its node in round {round}")]
    NoTokenHere { agent: u64, round: u64 },
    #[error("agent {agent} placed a token it does not carry in round {round}")]
    NotCarrying { agent: u64, round: u64 },
    #[error("agent {agent} queried an oracle in round {round} but none is bound")]
    NoOracle { agent: u64, round: u64 },
    #[error("{0} certificates given for {1} agents")]
    CertificateCount(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceAgent {
    pub id: u64,
    pub node: NodeId,
    pub action: String,
}

/// One round as seen by the harness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceRound {
    pub round: u64,
    pub agents: Vec<TraceAgent>,
    pub token_node: Option<NodeId>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome<S> {
    /// Per agent in configuration order; `None` if undecided.
    pub decisions: Vec<Option<bool>>,
    pub decision_rounds: Vec<Option<u64>>,
    /// Round of the last decision, or the budget if some agent is undecided.
    pub rounds_used: u64,
    /// Rounds in which at least one agent acted; skipped rounds are omitted.
    pub trace: Vec<TraceRound>,
    pub oracle_log: Vec<OracleCall>,
    pub final_positions: Vec<NodeId>,
    pub final_states: Vec<S>,
}

impl<S> RunOutcome<S> {
    pub fn all_decided(&self) -> bool {
        self.decisions.iter().all(Option::is_some)
    }

    /// `Some(b)` if every agent decided `b`.
    pub fn unanimous(&self) -> Option<bool> {
        let first = self.decisions.first().copied().flatten()?;
        self.decisions.iter().all(|&d| d == Some(first)).then_some(first)
    }

    /// True iff all agents decided and all said yes.
    pub fn accepted(&self) -> bool {
        self.decisions.iter().all(|&d| d == Some(true))
    }

    /// True iff some agent decided no.
    pub fn rejected(&self) -> bool {
        self.decisions.contains(&Some(false))
    }

    /// Trace as JSON lines.
    pub fn trace_json_lines(&self) -> String {
        self.trace
            .iter()
            .map(|r| serde_json::to_string(r).expect("trace serializes") + "\n")
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    Active,
    /// Parked until `until` or until the agents at its node differ from
    /// `Agent::company`.
    Waiting { until: u64 },
    Walking { until: u64, depth: usize },
    Done,
}

struct Agent<S> {
    id: u64,
    pos: NodeId,
    entry: Option<Port>,
    state: S,
    mode: Mode,
    company: Vec<u64>,
    decision: Option<bool>,
    decision_round: Option<u64>,
    carrying: bool,
    pending_view: Option<ViewTree>,
}

/// One simulation run, configured builder-style.
pub struct Simulation<'a, P: Protocol> {
    config: &'a Configuration,
    protocol: &'a P,
    certificates: Vec<String>,
    oracle: Option<&'a dyn Oracle>,
    max_rounds: u64,
    trace: bool,
}

impl<'a, P: Protocol> Simulation<'a, P> {
    pub fn new(config: &'a Configuration, protocol: &'a P) -> Self {
        Simulation {
            config,
            protocol,
            certificates: vec![String::new(); config.team_size()],
            oracle: None,
            max_rounds: u64::MAX,
            trace: false,
        }
    }

    /// The same certificate for every agent.
    pub fn certificate(mut self, cert: &str) -> Self {
        self.certificates = vec![cert.to_string(); self.config.team_size()];
        self
    }

    /// One certificate per agent, in configuration order.
    pub fn certificates(mut self, certs: Vec<String>) -> Self {
        self.certificates = certs;
        self
    }

    pub fn oracle(mut self, oracle: &'a dyn Oracle) -> Self {
        self.oracle = Some(oracle);
        self
    }

    pub fn max_rounds(mut self, rounds: u64) -> Self {
        self.max_rounds = rounds;
        self
    }

    pub fn trace(mut self, on: bool) -> Self {
        self.trace = on;
        self
    }

    pub fn run(self) -> Result<RunOutcome<P::State>, SimError> {
        let cfg = self.config;
        let g = cfg.graph();
        if self.certificates.len() != cfg.team_size() {
            return Err(SimError::CertificateCount(self.certificates.len(), cfg.team_size()));
        }
        let mut agents: Vec<Agent<P::State>> = cfg
            .agents()
            .iter()
            .zip(&self.certificates)
            .map(|(a, cert)| Agent {
                id: a.id,
                pos: a.start,
                entry: None,
                state: self.protocol.init(&AgentInfo {
                    id: a.id,
                    input: &a.input,
                    certificate: cert,
                }),
                mode: Mode::Active,
                company: Vec::new(),
                decision: None,
                decision_round: None,
                carrying: false,
                pending_view: None,
            })
            .collect();
        // step order: ascending id
        let mut order: Vec<usize> = (0..agents.len()).collect();
        order.sort_by_key(|&i| agents[i].id);
        let index_of: HashMap<u64, usize> = agents.iter().enumerate().map(|(i, a)| (a.id, i)).collect();
        let mut token: Option<NodeId> = if self.protocol.uses_token() {
            let leader = *order.last().expect("non-empty");
            Some(agents[leader].pos)
        } else {
            None
        };
        let mut trace = Vec::new();
        let mut oracle_log = Vec::new();
        let mut round: u64 = 0;

        loop {
            if agents.iter().all(|a| a.mode == Mode::Done) || round > self.max_rounds {
                break;
            }
            // occupancy at the start of the round
            let mut at: BTreeMap<NodeId, Vec<usize>> = BTreeMap::new();
            for &i in &order {
                at.entry(agents[i].pos).or_default().push(i);
            }
            // wake parked agents
            for a in agents.iter_mut() {
                match a.mode {
                    Mode::Waiting { until } => {
                        let here: Vec<u64> = at[&a.pos].iter().map(|&j| cfg.agents()[j].id).collect();
                        if until <= round || here != a.company {
                            a.mode = Mode::Active;
                        }
                    }
                    Mode::Walking { until, depth } if until <= round => {
                        a.pending_view = Some(truncated_view(g, a.pos, depth));
                        a.mode = Mode::Active;
                    }
                    _ => {}
                }
            }
            let active: Vec<usize> =
                order.iter().copied().filter(|&i| agents[i].mode == Mode::Active).collect();
            if active.is_empty() {
                let next = agents
                    .iter()
                    .filter_map(|a| match a.mode {
                        Mode::Waiting { until } | Mode::Walking { until, .. } => Some(until),
                        _ => None,
                    })
                    .min();
                match next {
                    Some(t) if t > round && t != u64::MAX => {
                        round = t;
                        continue;
                    }
                    _ => {
                        // nobody will ever act again
                        break;
                    }
                }
            }
            if round > self.max_rounds {
                break;
            }
            // snapshot states of agents sharing a node with an active agent
            let mut snapshot: HashMap<usize, P::State> = HashMap::new();
            for members in at.values() {
                if members.len() > 1 && members.iter().any(|i| active.contains(i)) {
                    for &j in members {
                        snapshot.insert(j, agents[j].state.clone());
                    }
                }
            }
            let mut actions: HashMap<usize, Action> = HashMap::new();
            for &i in &active {
                let peers: Vec<Peer<'_, P::State>> = at[&agents[i].pos]
                    .iter()
                    .filter(|&&j| j != i)
                    .map(|&j| Peer {
                        id: agents[j].id,
                        decision: agents[j].decision,
                        state: &snapshot[&j],
                    })
                    .collect();
                let obs = Observation {
                    round,
                    degree: g.degree(agents[i].pos),
                    entry_port: agents[i].entry,
                    peers,
                    token_here: token == Some(agents[i].pos) && !agents[i].carrying,
                    carrying_token: agents[i].carrying,
                    view: agents[i].pending_view.take(),
                };
                let mut ctx = OracleCtx {
                    oracle: self.oracle,
                    agent: agents[i].id,
                    round,
                    log: &mut oracle_log,
                    missing: false,
                };
                let action = self.protocol.step(&mut agents[i].state, &obs, &mut ctx);
                if ctx.missing {
                    return Err(SimError::NoOracle { agent: agents[i].id, round });
                }
                actions.insert(i, action);
            }
            drop(snapshot);

            // resolve moves, following chains of Follow
            let mut moves: HashMap<usize, Option<Port>> = HashMap::new();
            let mut parked: HashMap<usize, Mode> = HashMap::new();
            for &i in &active {
                let mut cur = i;
                let mut hops = 0;
                let resolved = loop {
                    match actions.get(&cur) {
                        Some(Action::Follow(target)) => {
                            let Some(&t) = index_of.get(target) else {
                                return Err(SimError::FollowNotColocated {
                                    agent: agents[cur].id,
                                    round,
                                    target: *target,
                                });
                            };
                            if agents[t].pos != agents[cur].pos {
                                return Err(SimError::FollowNotColocated {
                                    agent: agents[cur].id,
                                    round,
                                    target: *target,
                                });
                            }
                            hops += 1;
                            if hops > agents.len() {
                                break None;
                            }
                            cur = t;
                        }
                        Some(Action::Move(p)) => break Some(*p),
                        Some(Action::Wait { until }) if cur != i => {
                            parked.insert(i, Mode::Waiting { until: *until });
                            break None;
                        }
                        Some(_) => break None,
                        None => {
                            // target idle this round: wait as long as it does
                            if let Mode::Waiting { until } | Mode::Walking { until, .. } =
                                agents[cur].mode
                            {
                                parked.insert(i, Mode::Waiting { until });
                            }
                            break None;
                        }
                    }
                };
                if let Some(p) = resolved {
                    let degree = g.degree(agents[i].pos);
                    if p == 0 || p > degree {
                        return Err(SimError::IllegalPort { agent: agents[i].id, round, port: p, degree });
                    }
                }
                moves.insert(i, resolved);
            }

            if self.trace {
                let agents_trace = cfg
                    .agents()
                    .iter()
                    .enumerate()
                    .map(|(i, a)| TraceAgent {
                        id: a.id,
                        node: agents[i].pos,
                        action: match actions.get(&i) {
                            Some(act) => act.label(),
                            None if agents[i].mode == Mode::Done => "done".into(),
                            None => "idle".into(),
                        },
                    })
                    .collect();
                trace.push(TraceRound { round, agents: agents_trace, token_node: token });
            }

            // apply
            for &i in &active {
                let action = actions[&i];
                let a = &mut agents[i];
                match action {
                    Action::PickToken => {
                        if token != Some(a.pos) || a.carrying {
                            return Err(SimError::NoTokenHere { agent: a.id, round });
                        }
                        a.carrying = true;
                    }
                    Action::PlaceToken => {
                        if !a.carrying {
                            return Err(SimError::NotCarrying { agent: a.id, round });
                        }
                        a.carrying = false;
                    }
                    Action::Decide(b) => {
                        a.decision = Some(b);
                        a.decision_round = Some(round);
                        a.mode = Mode::Done;
                    }
                    Action::Wait { until } => a.mode = Mode::Waiting { until },
                    Action::CollectView { depth } => {
                        let cost = walk_cost(g, a.pos, depth);
                        a.mode = Mode::Walking { until: round.saturating_add(cost), depth };
                    }
                    _ => {}
                }
                if let Some(&mode) = parked.get(&i) {
                    a.mode = mode;
                }
                match moves[&i] {
                    Some(p) => {
                        let (w, q) = g.neighbor(a.pos, p);
                        a.pos = w;
                        a.entry = Some(q);
                        if a.carrying {
                            token = Some(w);
                        }
                    }
                    None => a.entry = None,
                }
            }
            // parked agents remember the company they observed, so an
            // arrival during this round wakes them next round
            for &i in &active {
                if matches!(agents[i].mode, Mode::Waiting { .. }) {
                    let company = at[&agents[i].pos].iter().map(|&j| agents[j].id).collect();
                    agents[i].company = company;
                }
            }
            round += 1;
        }

        let rounds_used = if agents.iter().all(|a| a.decision.is_some()) {
            agents.iter().filter_map(|a| a.decision_round).max().unwrap_or(0)
        } else {
            self.max_rounds
        };
        let mut decisions = Vec::new();
        let mut decision_rounds = Vec::new();
        let mut final_positions = Vec::new();
        let mut final_states = Vec::new();
        for a in agents {
            decisions.push(a.decision);
            decision_rounds.push(a.decision_round);
            final_positions.push(a.pos);
            final_states.push(a.state);
        }
        Ok(RunOutcome {
            decisions,
            decision_rounds,
            rounds_used,
            trace,
            oracle_log,
            final_positions,
            final_states,
        })
    }
}

/// Rounds needed to walk every port sequence of length at most `depth` from
/// `v` and come back: two per edge of the expanded view tree, at least one.
pub fn walk_cost(g: &crate::graph::PortGraph, v: NodeId, depth: usize) -> u64 {
    let edges = truncated_view(g, v, depth).expanded_size() - 1;
    edges.saturating_mul(2).max(1)
}
