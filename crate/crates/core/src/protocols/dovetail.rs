use super::walk::{decode_size_certificate, TreeWalk, WalkCheck};
use crate::problems::decode_number;
use crate::sim::{Action, AgentInfo, Observation, OracleCtx, Protocol};

/// The `i`-th binary string in length-lexicographic order: "", "0", "1",
/// "00", ...
pub fn length_lex(i: u64) -> String {
    // i + 1 in binary without its leading 1
    let bits = format!("{:b}", i + 1);
    bits[1..].to_string()
}

/// Verdict of one side, from the walk result (`Some(moves)` if it closed
/// within budget), the certificate value and the decoded input.
pub type Verdict = fn(Option<u64>, u64, Option<u64>) -> bool;

/// Accepts iff the certificate is the input size and the tree walk closes
/// after exactly `2 (x - 1)` moves.
fn treesize_yes(closed: Option<u64>, x: u64, n: Option<u64>) -> bool {
    n == Some(x) && closed == Some(2 * (x - 1))
}

/// Accepts iff the walk closes after exactly `2 (x - 1)` moves with
/// `x != n` (a tree of the wrong size), or does not close within
/// `2 (x - 1)` moves with `x >= n` (not a tree of size `n`).
fn treesize_no(closed: Option<u64>, x: u64, n: Option<u64>) -> bool {
    let Some(n) = n else {
        return true;
    };
    (closed == Some(2 * (x - 1)) && x != n) || (closed.is_none() && x >= n)
}

/// Single-agent decider for treesize obtained by alternating a verifier for
/// it and one for its complement over all certificates in length-lex order.
/// After each verifier run the agent is back at its start.
#[derive(Debug, Clone, Copy)]
pub struct DovetailTreesize {
    pub yes: Verdict,
    pub no: Verdict,
}

impl Default for DovetailTreesize {
    fn default() -> Self {
        DovetailTreesize { yes: treesize_yes, no: treesize_no }
    }
}

#[derive(Debug, Clone)]
pub struct DovetailState {
    n: Option<u64>,
    /// Index of the current certificate.
    pub index: u64,
    /// Working on the complement side.
    no_side: bool,
    run: Option<(u64, TreeWalk)>,
    closed: Option<u64>,
}

impl Protocol for DovetailTreesize {
    type State = DovetailState;

    fn init(&self, info: &AgentInfo<'_>) -> DovetailState {
        DovetailState { n: decode_number(info.input), index: 0, no_side: false, run: None, closed: None }
    }

    fn step(&self, st: &mut DovetailState, obs: &Observation<'_, DovetailState>, _: &mut OracleCtx<'_>) -> Action {
        if st.run.is_none() {
            let Some(x) = decode_size_certificate(&length_lex(st.index)) else {
                // an undecodable certificate costs one round
                return self.finish(st, None);
            };
            st.run = Some((x, TreeWalk::new(2 * (x - 1))));
            st.closed = None;
        }
        let (x, walk) = st.run.as_mut().expect("set above");
        let x = *x;
        match walk.next(obs.degree, obs.entry_port) {
            WalkCheck::Move(p) => Action::Move(p),
            WalkCheck::Exhausted => match walk.next(obs.degree, None) {
                WalkCheck::Move(p) => Action::Move(p),
                _ => self.finish(st, Some(x)),
            },
            WalkCheck::Completed(m) => {
                st.closed = Some(m);
                self.finish(st, Some(x))
            }
            WalkCheck::Home => self.finish(st, Some(x)),
        }
    }
}

impl DovetailTreesize {
    /// Ends one verifier run (the agent is at its start).
    fn finish(&self, st: &mut DovetailState, x: Option<u64>) -> Action {
        let accepted = match x {
            Some(x) if st.no_side => (self.no)(st.closed, x, st.n),
            Some(x) => (self.yes)(st.closed, x, st.n),
            None => false,
        };
        if accepted {
            return Action::Decide(!st.no_side);
        }
        st.run = None;
        if st.no_side {
            st.index += 1;
        }
        st.no_side = !st.no_side;
        Action::Stay
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Configuration;
    use crate::graph::{consistent_cycle, star, PortGraph};
    use crate::sim::Simulation;

    #[test]
    fn certificate_order() {
        let first: Vec<String> = (0..7).map(length_lex).collect();
        assert_eq!(first, ["", "0", "1", "00", "01", "10", "11"]);
    }

    fn decide(g: PortGraph, n: &str, p: &DovetailTreesize) -> (Option<bool>, bool) {
        let cfg = Configuration::with_starts(g, &[1]).unwrap().with_uniform_input(n);
        let out = Simulation::new(&cfg, p).max_rounds(5_000).run().unwrap();
        (out.decisions[0], out.final_positions[0] == 1)
    }

    #[test]
    fn examples() {
        let p = DovetailTreesize::default();
        assert_eq!(decide(star(4).unwrap(), "4", &p), (Some(true), true));
        assert_eq!(decide(star(4).unwrap(), "3", &p), (Some(false), true));
        assert_eq!(decide(consistent_cycle(4).unwrap(), "4", &p), (Some(false), true));
        assert_eq!(decide(consistent_cycle(4).unwrap(), "x", &p), (Some(false), true));
    }

    #[test]
    fn rejecting_everything_runs_out_of_budget() {
        let never = DovetailTreesize { yes: |_, _, _| false, no: |_, _, _| false };
        assert_eq!(decide(star(4).unwrap(), "4", &never).0, None);
    }
}
