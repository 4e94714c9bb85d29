use std::collections::BTreeSet;

use super::{slot, tau, DfsTour};
use crate::problems::decode_number;
use crate::sim::{Action, AgentInfo, Observation, OracleCtx, Protocol};

/// Two-agent rendezvous for a known size `n` (the input, in decimal).
///
/// Time is cut into slots of `2 n^n` rounds. The agent with id `i` makes one
/// depth-`n` tour in each of the slots `0..i`, then stays at its start. At
/// round `tau(n, i)` it decides yes iff it has met another agent.
#[derive(Debug, Clone, Copy, Default)]
pub struct Rdv;

#[derive(Debug, Clone)]
pub struct RdvState {
    id: u64,
    n: Option<u64>,
    tour: Option<(u64, DfsTour)>,
    /// First round at whose start another agent was present.
    pub met_at: Option<u64>,
    pub met: BTreeSet<u64>,
}

impl Protocol for Rdv {
    type State = RdvState;

    fn init(&self, info: &AgentInfo<'_>) -> RdvState {
        RdvState {
            id: info.id,
            n: decode_number(info.input).filter(|&n| n > 0),
            tour: None,
            met_at: None,
            met: BTreeSet::new(),
        }
    }

    fn step(&self, st: &mut RdvState, obs: &Observation<'_, RdvState>, _: &mut OracleCtx<'_>) -> Action {
        let Some(n) = st.n else {
            return Action::Decide(false);
        };
        if !obs.peers.is_empty() {
            st.met_at.get_or_insert(obs.round);
            st.met.extend(obs.peers.iter().map(|p| p.id));
        }
        let deadline = tau(n, st.id);
        if obs.round >= deadline {
            return Action::Decide(st.met_at.is_some());
        }
        let len = slot(n);
        let s = obs.round / len;
        if s >= st.id {
            return Action::Wait { until: deadline };
        }
        if st.tour.as_ref().map(|(k, _)| *k) != Some(s) {
            st.tour = Some((s, DfsTour::new(n as usize, len)));
        }
        let (_, tour) = st.tour.as_mut().expect("set above");
        match tour.next(obs.degree, obs.entry_port) {
            Some(p) => Action::Move(p),
            None => Action::Wait { until: (s + 1) * len },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{AgentPlacement, Configuration};
    use crate::graph::{consistent_cycle, path};
    use crate::sim::Simulation;

    fn run(g: crate::graph::PortGraph, starts: [usize; 2], ids: [u64; 2], n: &str) -> Vec<RdvState> {
        let agents = vec![AgentPlacement::new(starts[0], ids[0], n), AgentPlacement::new(starts[1], ids[1], n)];
        let cfg = Configuration::new(g, agents).unwrap();
        let out = Simulation::new(&cfg, &Rdv).max_rounds(100_000).run().unwrap();
        assert!(out.accepted());
        for (i, a) in cfg.agents().iter().enumerate() {
            assert_eq!(out.final_positions[i], a.start);
            assert_eq!(out.decision_rounds[i], Some(tau(n.parse().unwrap(), a.id)));
        }
        out.final_states
    }

    #[test]
    fn k2_meets_by_sixteen() {
        let states = run(path(2).unwrap(), [0, 1], [1, 2], "2");
        assert!(states.iter().all(|s| s.met_at.unwrap() <= 16));
    }

    #[test]
    fn same_start_meets_immediately() {
        let states = run(path(2).unwrap(), [1, 1], [1, 2], "2");
        assert_eq!(states[0].met_at, Some(0));
    }

    #[test]
    fn cycle_four_ids_two_and_five() {
        let states = run(consistent_cycle(4).unwrap(), [0, 1], [2, 5], "4");
        assert!(states.iter().all(|s| s.met_at.unwrap() <= 1536));
    }

    #[test]
    fn bad_input_rejects() {
        let cfg = Configuration::with_starts(path(2).unwrap(), &[0]).unwrap();
        let out = Simulation::new(&cfg, &Rdv).run().unwrap();
        assert_eq!(out.decisions, vec![Some(false)]);
    }
}
