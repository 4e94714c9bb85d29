use std::collections::VecDeque;

use super::{Gatherer, Schedule};
use crate::config::{AgentPlacement, Configuration};
use crate::graph::{Edge, NodeId, Port, PortGraph};
use crate::problems::decode_number;
use crate::sim::{Action, AgentInfo, Observation, OracleCtx, Protocol};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExplorerStep {
    Move(Port),
    Place,
    Pick,
    /// The map is complete and the explorer is back at the root.
    Finished,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Crossing {
    /// The far end is known to be a node not yet on the map.
    Discover { from: NodeId, port: Port },
    /// The far end is either the token's node or unmapped.
    Check { from: NodeId, port: Port },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Op {
    Go(Port),
    Cross(Crossing),
    Back { port: Port, to: NodeId },
    Place,
    Pick,
    Finish,
}

/// Ball-growing map construction with one movable token.
///
/// The map grows one distance layer at a time. For each edge end leaving
/// the known ball, the explorer carries the token across, creating a new
/// node `w`, leaves the token there and crosses every other pending end,
/// including the open ports of nodes created earlier in the same layer. An
/// end whose far side holds the token leads to `w`. Then it fetches the
/// token. When no end is pending, the map is complete.
#[derive(Debug, Clone)]
pub struct Explorer {
    ports: Vec<Vec<Option<(NodeId, Port)>>>,
    pos: NodeId,
    outside: Option<Crossing>,
    carrying: bool,
    layer: Vec<NodeId>,
    fresh: Vec<NodeId>,
    token_at: Option<NodeId>,
    checks: VecDeque<(NodeId, Port)>,
    plan: VecDeque<Op>,
    started: bool,
    finished: bool,
}

impl Explorer {
    /// `carrying`: whether the explorer holds the token at the start; if
    /// not, the token must lie at the start node.
    pub fn new(carrying: bool) -> Self {
        Explorer {
            ports: Vec::new(),
            pos: 0,
            outside: None,
            carrying,
            layer: vec![0],
            fresh: Vec::new(),
            token_at: None,
            checks: VecDeque::new(),
            plan: VecDeque::new(),
            started: false,
            finished: false,
        }
    }

    pub fn carrying(&self) -> bool {
        self.carrying
    }

    pub fn is_finished(&self) -> bool {
        self.finished
    }

    /// Map node the explorer stands on (the root is 0).
    pub fn position(&self) -> NodeId {
        self.pos
    }

    /// The map drawn so far, if it is a valid graph.
    pub fn map(&self) -> Option<PortGraph> {
        let mut edges = Vec::new();
        for (u, row) in self.ports.iter().enumerate() {
            for (i, end) in row.iter().enumerate() {
                let (v, q) = (*end)?;
                if u < v {
                    edges.push(Edge::new(u, i + 1, v, q));
                }
            }
        }
        PortGraph::new(self.ports.len(), edges).ok()
    }

    fn link(&mut self, a: NodeId, p: Port, b: NodeId, q: Port) {
        self.ports[a][p - 1] = Some((b, q));
        self.ports[b][q - 1] = Some((a, p));
    }

    fn open_ends(&self, nodes: &[NodeId]) -> Vec<(NodeId, Port)> {
        nodes
            .iter()
            .flat_map(|&u| {
                self.ports[u].iter().enumerate().filter(|(_, e)| e.is_none()).map(move |(i, _)| (u, i + 1))
            })
            .collect()
    }

    /// Shortest path on the map from the current node.
    fn navigate(&mut self, target: NodeId) {
        let mut prev: Vec<Option<(NodeId, Port)>> = vec![None; self.ports.len()];
        let mut seen = vec![false; self.ports.len()];
        let mut queue = VecDeque::from([self.pos]);
        seen[self.pos] = true;
        while let Some(u) = queue.pop_front() {
            if u == target {
                break;
            }
            for (i, end) in self.ports[u].iter().enumerate() {
                if let Some((v, _)) = *end {
                    if !seen[v] {
                        seen[v] = true;
                        prev[v] = Some((u, i + 1));
                        queue.push_back(v);
                    }
                }
            }
        }
        let mut route = Vec::new();
        let mut cur = target;
        while cur != self.pos {
            let (u, p) = prev[cur].expect("map is connected");
            route.push(p);
            cur = u;
        }
        self.plan.extend(route.into_iter().rev().map(Op::Go));
    }

    fn arrive(&mut self, crossing: Crossing, degree: usize, entry: Port, token_here: bool) {
        match crossing {
            Crossing::Discover { from, port } => {
                let w = self.ports.len();
                self.ports.push(vec![None; degree]);
                self.link(from, port, w, entry);
                self.pos = w;
                let mut checks = self.open_ends(&self.layer);
                checks.extend(self.open_ends(&self.fresh));
                self.fresh.push(w);
                self.token_at = Some(w);
                self.checks = checks.into();
                self.plan.push_back(Op::Place);
            }
            Crossing::Check { from, port } => {
                let w = self.token_at.expect("checking while the token is out");
                if token_here {
                    self.link(from, port, w, entry);
                    self.pos = w;
                } else {
                    self.plan.push_front(Op::Back { port: entry, to: from });
                }
            }
        }
    }

    fn refill(&mut self) {
        loop {
            if let Some(w) = self.token_at {
                while let Some((b, p)) = self.checks.pop_front() {
                    if self.ports[b][p - 1].is_none() {
                        self.navigate(b);
                        self.plan.push_back(Op::Cross(Crossing::Check { from: b, port: p }));
                        return;
                    }
                }
                self.navigate(w);
                self.plan.push_back(Op::Pick);
                self.token_at = None;
                return;
            }
            if let Some(&(a, p)) = self.open_ends(&self.layer).first() {
                self.navigate(a);
                self.plan.push_back(Op::Cross(Crossing::Discover { from: a, port: p }));
                return;
            }
            if !self.fresh.is_empty() {
                self.layer = std::mem::take(&mut self.fresh);
                continue;
            }
            self.navigate(0);
            self.plan.push_back(Op::Finish);
            return;
        }
    }

    /// Next step; `degree`, `entry` and `token_here` describe the node the
    /// explorer is on. `token_here` must be false while it carries the
    /// token.
    pub fn next(&mut self, degree: usize, entry: Option<Port>, token_here: bool) -> ExplorerStep {
        if self.finished {
            return ExplorerStep::Finished;
        }
        if !self.started {
            self.started = true;
            self.ports.push(vec![None; degree]);
            if !self.carrying {
                self.plan.push_back(Op::Pick);
            }
        }
        if let Some(crossing) = self.outside.take() {
            let entry = entry.expect("a crossing always has an entry port");
            self.arrive(crossing, degree, entry, token_here);
        }
        if self.plan.is_empty() {
            self.refill();
        }
        match self.plan.pop_front().expect("refill plans at least one op") {
            Op::Go(p) => {
                self.pos = self.ports[self.pos][p - 1].expect("known edge").0;
                ExplorerStep::Move(p)
            }
            Op::Cross(c) => {
                self.outside = Some(c);
                let (Crossing::Discover { port, .. } | Crossing::Check { port, .. }) = c;
                ExplorerStep::Move(port)
            }
            Op::Back { port, to } => {
                self.pos = to;
                ExplorerStep::Move(port)
            }
            Op::Place => {
                self.carrying = false;
                ExplorerStep::Place
            }
            Op::Pick => {
                self.carrying = true;
                ExplorerStep::Pick
            }
            Op::Finish => {
                self.finished = true;
                ExplorerStep::Finished
            }
        }
    }
}

/// One agent mapping the graph with a physical token that starts at its
/// node. Decides yes when done; the map is left in the final state.
#[derive(Debug, Clone, Copy, Default)]
pub struct TokenMap;

#[derive(Debug, Clone)]
pub struct TokenMapState {
    pub explorer: Explorer,
    pub map: Option<PortGraph>,
}

impl Protocol for TokenMap {
    type State = TokenMapState;

    fn init(&self, _: &AgentInfo<'_>) -> TokenMapState {
        TokenMapState { explorer: Explorer::new(false), map: None }
    }

    fn step(&self, st: &mut TokenMapState, obs: &Observation<'_, TokenMapState>, _: &mut OracleCtx<'_>) -> Action {
        match st.explorer.next(obs.degree, obs.entry_port, obs.token_here) {
            ExplorerStep::Move(p) => Action::Move(p),
            ExplorerStep::Place => Action::PlaceToken,
            ExplorerStep::Pick => Action::PickToken,
            ExplorerStep::Finished => {
                st.map = st.explorer.map();
                Action::Decide(st.map.is_some())
            }
        }
    }

    fn uses_token(&self) -> bool {
        true
    }
}

#[derive(Debug, Clone)]
enum Stage {
    Gathering(Gatherer),
    Mapping { leader: u64, explorer: Option<Explorer>, finished: bool },
}

/// Per-agent state of the team mapping procedure: gather all `k` agents,
/// let the largest id explore while the others act as its token, then
/// rebuild the whole initial configuration from the map and every agent's
/// record of entry ports.
#[derive(Debug, Clone)]
pub struct TeamMapState {
    id: u64,
    input: String,
    k: u64,
    /// Entry port of every move since round 0.
    trail: Vec<Port>,
    stage: Stage,
}

/// Outcome of one round of [`TeamMapState::step`].
#[derive(Debug, Clone)]
pub enum TeamStep {
    Act(Action),
    /// Everyone knows the configuration (up to automorphism).
    Ready(Configuration),
}

impl TeamMapState {
    pub fn new(id: u64, input: &str, k: u64) -> Self {
        TeamMapState {
            id,
            input: input.to_string(),
            k,
            trail: Vec::new(),
            stage: Stage::Gathering(Gatherer::new(id, Schedule::Phases)),
        }
    }

    pub fn is_mapping(&self) -> bool {
        matches!(self.stage, Stage::Mapping { .. })
    }

    /// Whether this agent, seen as a teammate, holds the token.
    fn carrying(&self) -> bool {
        match &self.stage {
            Stage::Gathering(_) => true,
            Stage::Mapping { explorer, .. } => explorer.as_ref().is_some_and(Explorer::carrying),
        }
    }

    fn finished(&self) -> bool {
        matches!(self.stage, Stage::Mapping { finished: true, .. })
    }

    /// Rebuilds the configuration; `explorer` is the state of the leader,
    /// `team` all agents' states (including the leader's).
    fn rebuild(explorer: &TeamMapState, team: &[&TeamMapState]) -> Option<Configuration> {
        let Stage::Mapping { explorer: Some(ex), .. } = &explorer.stage else {
            return None;
        };
        let map = ex.map()?;
        let here = ex.position();
        let mut agents = Vec::new();
        for member in team {
            let mut node = here;
            for &q in member.trail.iter().rev() {
                node = map.try_neighbor(node, q)?.0;
            }
            agents.push(AgentPlacement::new(node, member.id, member.input.clone()));
        }
        agents.sort_by_key(|a| a.id);
        Configuration::new(map, agents).ok()
    }

    /// One round. `team_of` extracts the team state from a peer's state.
    pub fn step<S>(
        &mut self,
        obs: &Observation<'_, S>,
        team_of: impl Fn(&S) -> Option<&TeamMapState>,
    ) -> TeamStep {
        if let Some(q) = obs.entry_port {
            self.trail.push(q);
        }
        let peers: Vec<&TeamMapState> = obs
            .peers
            .iter()
            .filter(|p| p.decision.is_none())
            .filter_map(|p| team_of(p.state))
            .collect();
        if let Stage::Gathering(g) = &mut self.stage {
            g.absorb(peers.iter().filter_map(|p| match &p.stage {
                Stage::Gathering(pg) => Some(pg.group()),
                Stage::Mapping { .. } => None,
            }));
            if (g.group().len() as u64) < self.k {
                return TeamStep::Act(g.act(obs.round, obs.degree, obs.entry_port));
            }
            let leader = g.leader();
            let explorer = (leader == self.id).then(|| Explorer::new(true));
            self.stage = Stage::Mapping { leader, explorer, finished: false };
        }
        let Stage::Mapping { leader, explorer, finished } = &mut self.stage else {
            unreachable!("switched to mapping above");
        };
        let leader = *leader;
        if let Some(ex) = explorer {
            if *finished {
                let mut team = peers.clone();
                team.push(self);
                return match TeamMapState::rebuild(self, &team) {
                    Some(cfg) => TeamStep::Ready(cfg),
                    None => TeamStep::Act(Action::Decide(false)),
                };
            }
            // teammates are the token
            let token_here = !ex.carrying() && !peers.is_empty();
            return TeamStep::Act(match ex.next(obs.degree, obs.entry_port, token_here) {
                ExplorerStep::Move(p) => Action::Move(p),
                ExplorerStep::Place | ExplorerStep::Pick => Action::Stay,
                ExplorerStep::Finished => {
                    *finished = true;
                    Action::Stay
                }
            });
        }
        let Some(lead) = peers.iter().find(|p| p.id == leader).copied() else {
            return TeamStep::Act(Action::Wait { until: u64::MAX });
        };
        if lead.finished() {
            let mut team = peers.clone();
            team.push(self);
            return match TeamMapState::rebuild(lead, &team) {
                Some(cfg) => TeamStep::Ready(cfg),
                None => TeamStep::Act(Action::Decide(false)),
            };
        }
        TeamStep::Act(if lead.carrying() { Action::Follow(leader) } else { Action::Stay })
    }
}

/// Gathers the `k` agents (input, decimal, at least 2) and maps the graph
/// as a team. Every agent decides yes once it knows the configuration.
#[derive(Debug, Clone, Copy, Default)]
pub struct TeamMap;

#[derive(Debug, Clone)]
pub struct TeamMapRun {
    pub team: Option<TeamMapState>,
    pub result: Option<Configuration>,
}

impl Protocol for TeamMap {
    type State = TeamMapRun;

    fn init(&self, info: &AgentInfo<'_>) -> TeamMapRun {
        let team = decode_number(info.input)
            .filter(|&k| k >= 2)
            .map(|k| TeamMapState::new(info.id, info.input, k));
        TeamMapRun { team, result: None }
    }

    fn step(&self, st: &mut TeamMapRun, obs: &Observation<'_, TeamMapRun>, _: &mut OracleCtx<'_>) -> Action {
        let Some(team) = st.team.as_mut() else {
            return Action::Decide(false);
        };
        match team.step(obs, |s: &TeamMapRun| s.team.as_ref()) {
            TeamStep::Act(a) => a,
            TeamStep::Ready(cfg) => {
                st.result = Some(cfg);
                Action::Decide(true)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete, consistent_cycle, isomorphic, path, star, sun};
    use crate::sim::Simulation;

    fn token_map(g: &PortGraph, start: NodeId) -> PortGraph {
        let cfg = Configuration::with_starts(g.clone(), &[start]).unwrap();
        let out = Simulation::new(&cfg, &TokenMap).max_rounds(1_000_000).run().unwrap();
        assert_eq!(out.decisions, vec![Some(true)]);
        assert_eq!(out.final_positions, vec![start]);
        out.final_states[0].map.clone().unwrap()
    }

    #[test]
    fn maps_small_graphs() {
        for g in [
            PortGraph::singleton(),
            path(2).unwrap(),
            consistent_cycle(5).unwrap(),
            star(4).unwrap(),
            complete(4).unwrap(),
        ] {
            for v in 0..g.node_count() {
                assert!(isomorphic(&token_map(&g, v), &g));
            }
        }
    }

    #[test]
    fn sun_from_a_leaf_marks_a_leaf() {
        let g = sun(3).unwrap();
        let map = token_map(&g, 4);
        let iso = crate::graph::isomorphism(&map, &g).unwrap();
        assert_eq!(g.degree(iso[0]), 1);
    }

    fn team_map(g: &PortGraph, starts: &[NodeId]) -> Configuration {
        let k = starts.len().to_string();
        let agents = starts
            .iter()
            .enumerate()
            .map(|(i, &s)| AgentPlacement::new(s, i as u64 + 1, k.clone()))
            .collect();
        let cfg = Configuration::new(g.clone(), agents).unwrap();
        let out = Simulation::new(&cfg, &TeamMap).max_rounds(10_000_000).run().unwrap();
        assert!(out.accepted(), "{:?}", out.decisions);
        let rebuilt = out.final_states[0].result.clone().unwrap();
        for s in &out.final_states {
            assert_eq!(s.result.as_ref(), Some(&rebuilt));
        }
        // the rebuilt configuration is the real one moved by an isomorphism
        let iso = crate::graph::isomorphism(rebuilt.graph(), g).unwrap();
        let fits = crate::graph::automorphisms(g).iter().any(|alpha| {
            rebuilt.agents().iter().zip(cfg.agents()).all(|(a, b)| a.id == b.id && alpha[iso[a.start]] == b.start)
        });
        assert!(fits);
        rebuilt
    }

    #[test]
    fn team_maps_k2() {
        team_map(&path(2).unwrap(), &[0, 1]);
    }

    #[test]
    fn team_maps_star_with_three() {
        team_map(&star(4).unwrap(), &[1, 0, 3]);
    }

    #[test]
    fn shared_start_is_a_multiset() {
        let cfg = team_map(&consistent_cycle(4).unwrap(), &[2, 2]);
        assert_eq!(cfg.agents()[0].start, cfg.agents()[1].start);
    }
}
