use crate::graph::{quotient_isomorphic, serialize_quotient_compact, QuotientGraph};
use crate::sim::{Action, AgentInfo, Observation, OracleCtx, Protocol};
use crate::views::{quotient_from_view, ViewTree};

#[derive(Debug, Clone)]
pub enum ProbeStep {
    Act(Action),
    /// The quotient, with the agent's start in class 0.
    Found(QuotientGraph),
}

/// Learns the quotient of the graph with a single agent and an oracle
/// answering "is the quotient different from H?" for inputs `prefix + H`.
///
/// Candidates come from the agent's own views at depths 2, 4, 6, ...: each
/// new candidate is put to the oracle and the first one it denies is the
/// quotient. If it was found from a view shallower than twice its size,
/// one more view at that depth fixes the class of the start.
#[derive(Debug, Clone)]
pub struct QuotientProbe {
    prefix: String,
    half_depth: usize,
    asked: Vec<QuotientGraph>,
    confirming: Option<QuotientGraph>,
    requested: bool,
}

impl QuotientProbe {
    pub fn new(prefix: &str) -> Self {
        QuotientProbe {
            prefix: prefix.to_string(),
            half_depth: 0,
            asked: Vec::new(),
            confirming: None,
            requested: false,
        }
    }

    /// Candidates sent to the oracle so far.
    pub fn asked(&self) -> &[QuotientGraph] {
        &self.asked
    }

    pub fn step(&mut self, view: Option<&ViewTree>, oracle: &mut OracleCtx<'_>) -> ProbeStep {
        if let Some(view) = view {
            self.requested = false;
            let rebuilt = quotient_from_view(view).ok().map(|(q, _)| q);
            if let Some(found) = self.confirming.take() {
                return ProbeStep::Found(match rebuilt {
                    Some(q) if quotient_isomorphic(&q, &found) => q,
                    _ => found,
                });
            }
            if let Some(q) = rebuilt {
                if !self.asked.iter().any(|a| quotient_isomorphic(a, &q)) {
                    let differs = oracle.query(&format!("{}{}", self.prefix, serialize_quotient_compact(&q)));
                    self.asked.push(q.clone());
                    if !differs {
                        if self.half_depth >= q.node_count() {
                            return ProbeStep::Found(q);
                        }
                        let depth = 2 * q.node_count();
                        self.confirming = Some(q);
                        self.requested = true;
                        return ProbeStep::Act(Action::CollectView { depth });
                    }
                }
            }
        }
        if self.requested {
            return ProbeStep::Act(Action::Wait { until: u64::MAX });
        }
        self.half_depth += 1;
        self.requested = true;
        ProbeStep::Act(Action::CollectView { depth: 2 * self.half_depth })
    }
}

/// Decides cycle x co-sun with a quotient oracle: input `1` asks whether
/// the graph is a consistently labeled cycle (quotient O), input `2`
/// whether it is not a consistently labeled sun (quotient other than P).
#[derive(Debug, Clone, Copy, Default)]
pub struct CycleCoSun;

#[derive(Debug, Clone)]
pub struct CycleCoSunState {
    which: Option<u8>,
    pub probe: QuotientProbe,
    pub quotient: Option<QuotientGraph>,
}

impl Protocol for CycleCoSun {
    type State = CycleCoSunState;

    fn init(&self, info: &AgentInfo<'_>) -> CycleCoSunState {
        let which = match info.input {
            "1" => Some(1),
            "2" => Some(2),
            _ => None,
        };
        CycleCoSunState { which, probe: QuotientProbe::new(""), quotient: None }
    }

    fn step(&self, st: &mut CycleCoSunState, obs: &Observation<'_, CycleCoSunState>, oracle: &mut OracleCtx<'_>) -> Action {
        let Some(which) = st.which else {
            return Action::Decide(false);
        };
        match st.probe.step(obs.view.as_ref(), oracle) {
            ProbeStep::Act(a) => a,
            ProbeStep::Found(q) => {
                let answer = if which == 1 {
                    quotient_isomorphic(&q, &QuotientGraph::one_loop())
                } else {
                    !quotient_isomorphic(&q, &QuotientGraph::loop_with_pendant())
                };
                st.quotient = Some(q);
                Action::Decide(answer)
            }
        }
    }
}
