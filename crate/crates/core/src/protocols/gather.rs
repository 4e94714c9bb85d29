use std::collections::BTreeSet;

use super::{slot, tau, tau_max, DfsTour};
use crate::graph::Port;
use crate::problems::decode_number;
use crate::sim::{Action, AgentInfo, Observation, OracleCtx, Protocol};

/// How a group leader spends its time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schedule {
    /// Rendezvous attempts for every pair `(n, b)`, `b >= 1`, in order of
    /// `n + b` then `n`, each lasting `tau_max(n, b)` rounds.
    Phases,
    /// One rendezvous attempt for size `n`, starting at round 0.
    Single { n: u64 },
}

/// Group bookkeeping shared by every protocol that merges agents on
/// meeting. The leader of a group is its largest id; the other members
/// follow it. Only the leader's schedule matters.
#[derive(Debug, Clone)]
pub struct Gatherer {
    id: u64,
    schedule: Schedule,
    group: BTreeSet<u64>,
    phase: (u64, u32),
    phase_start: u64,
    tour: Option<(u64, DfsTour)>,
}

impl Gatherer {
    pub fn new(id: u64, schedule: Schedule) -> Self {
        Gatherer {
            id,
            schedule,
            group: BTreeSet::from([id]),
            phase: (1, 1),
            phase_start: 0,
            tour: None,
        }
    }

    pub fn group(&self) -> &BTreeSet<u64> {
        &self.group
    }

    pub fn leader(&self) -> u64 {
        *self.group.last().expect("a group contains its own agent")
    }

    pub fn is_leader(&self) -> bool {
        self.leader() == self.id
    }

    /// The `(n, b)` pair of the current phase under [`Schedule::Phases`].
    pub fn phase(&self) -> (u64, u32) {
        self.phase
    }

    pub fn absorb<'a>(&mut self, others: impl IntoIterator<Item = &'a BTreeSet<u64>>) {
        for g in others {
            self.group.extend(g.iter().copied());
        }
    }

    fn advance_phase(&mut self, round: u64) {
        loop {
            let (n, b) = self.phase;
            let end = self.phase_start.saturating_add(tau_max(n, b));
            if round < end {
                return;
            }
            self.phase_start = end;
            self.phase = if b > 1 { (n + 1, b - 1) } else { (1, n as u32 + b) };
            self.tour = None;
        }
    }

    /// This round's action for the agent's group.
    pub fn act(&mut self, round: u64, degree: usize, entry: Option<Port>) -> Action {
        if !self.is_leader() {
            return Action::Follow(self.leader());
        }
        let (n, start, end) = match self.schedule {
            Schedule::Phases => {
                self.advance_phase(round);
                let (n, b) = self.phase;
                (n, self.phase_start, self.phase_start.saturating_add(tau_max(n, b)))
            }
            Schedule::Single { n } => (n, 0, tau(n, self.id).max(round + 1)),
        };
        let len = slot(n);
        let s = (round - start) / len;
        if s >= self.id {
            return Action::Wait { until: end };
        }
        let key = start.saturating_add(s.saturating_mul(len));
        if self.tour.as_ref().map(|(k, _)| *k) != Some(key) {
            self.tour = Some((key, DfsTour::new(n as usize, len)));
        }
        let (_, tour) = self.tour.as_mut().expect("set above");
        match tour.next(degree, entry) {
            Some(p) => Action::Move(p),
            None => Action::Wait { until: key.saturating_add(len).min(end) },
        }
    }
}

/// Gathers `k` agents (the input, decimal) without knowing the graph size;
/// every agent decides yes once its group has `k` members.
#[derive(Debug, Clone, Copy, Default)]
pub struct Gather;

#[derive(Debug, Clone)]
pub struct GatherState {
    k: Option<u64>,
    pub gatherer: Gatherer,
    pub gathered_at: Option<u64>,
}

impl Protocol for Gather {
    type State = GatherState;

    fn init(&self, info: &AgentInfo<'_>) -> GatherState {
        GatherState {
            k: decode_number(info.input).filter(|&k| k > 0),
            gatherer: Gatherer::new(info.id, Schedule::Phases),
            gathered_at: None,
        }
    }

    fn step(&self, st: &mut GatherState, obs: &Observation<'_, GatherState>, _: &mut OracleCtx<'_>) -> Action {
        let Some(k) = st.k else {
            return Action::Decide(false);
        };
        st.gatherer.absorb(obs.peers.iter().map(|p| p.state.gatherer.group()));
        if st.gatherer.group().len() as u64 >= k {
            st.gathered_at = Some(obs.round);
            return Action::Decide(true);
        }
        st.gatherer.act(obs.round, obs.degree, obs.entry_port)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{AgentPlacement, Configuration};
    use crate::graph::{consistent_cycle, path, star};
    use crate::sim::Simulation;

    fn gather(g: crate::graph::PortGraph, starts: &[usize], k: &str) -> (Vec<usize>, Vec<GatherState>) {
        let agents = starts
            .iter()
            .enumerate()
            .map(|(i, &s)| AgentPlacement::new(s, i as u64 + 1, k))
            .collect();
        let cfg = Configuration::new(g, agents).unwrap();
        let out = Simulation::new(&cfg, &Gather).max_rounds(10_000_000).run().unwrap();
        assert!(out.accepted(), "{:?}", out.decisions);
        (out.final_positions, out.final_states)
    }

    #[test]
    fn phase_order_is_diagonal() {
        let mut g = Gatherer::new(1, Schedule::Phases);
        let mut seen = vec![g.phase()];
        let mut round = 0;
        while seen.len() < 6 {
            round = g.phase_start + tau_max(g.phase.0, g.phase.1);
            g.advance_phase(round);
            seen.push(g.phase());
        }
        assert_eq!(seen, vec![(1, 1), (1, 2), (2, 1), (1, 3), (2, 2), (3, 1)]);
        assert!(round > 0);
    }

    #[test]
    fn k2_gathers() {
        let (pos, _) = gather(path(2).unwrap(), &[0, 1], "2");
        assert_eq!(pos[0], pos[1]);
    }

    #[test]
    fn co_located_team_gathers_at_once() {
        let (_, states) = gather(star(4).unwrap(), &[2, 2, 2], "3");
        assert!(states.iter().all(|s| s.gathered_at == Some(0)));
    }

    #[test]
    fn cycle_five_gathers_in_a_phase_for_size_five() {
        let (pos, states) = gather(consistent_cycle(5).unwrap(), &[0, 2], "2");
        assert_eq!(pos[0], pos[1]);
        let (n, b) = states[1].gatherer.phase();
        assert!(n <= 5 && b <= 2, "{:?}", (n, b));
    }

    #[test]
    fn leader_is_largest_id() {
        let mut a = Gatherer::new(3, Schedule::Phases);
        let b = Gatherer::new(7, Schedule::Phases);
        a.absorb([b.group()]);
        assert_eq!(a.leader(), 7);
        assert!(!a.is_leader());
        assert_eq!(a.act(0, 2, None), Action::Follow(7));
    }
}
