use super::{decode_size_certificate, tau, Gatherer, Schedule};
use crate::graph::{parse_quotient, quotient_isomorphic, QuotientGraph};
use crate::problems::decode_number;
use crate::sim::{Action, AgentInfo, Observation, OracleCtx, Protocol};
use crate::views::quotient_from_view;

/// Input of the product problem teamsize x quotient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OmegaInput {
    /// `1<k>`: more than `k` agents.
    TeamSize(u64),
    /// `2<quotient>`: the quotient is not this graph.
    Quotient(QuotientGraph),
}

pub fn decode_omega_input(w: &str) -> Option<OmegaInput> {
    if let Some(k) = w.strip_prefix('1') {
        return decode_number(k).map(OmegaInput::TeamSize);
    }
    if let Some(h) = w.strip_prefix('2') {
        return parse_quotient(h).ok().map(OmegaInput::Quotient);
    }
    None
}

/// Verifier for teamsize x quotient with the graph size `x` as a binary
/// certificate.
///
/// Team size branch: rendezvous as if the graph had `x` nodes, merging into
/// groups; at round `tau(x, leader)` every agent decides yes iff its group
/// has more than `k` members. Quotient branch: collect the view to depth
/// `2 max(x, |H|)`, rebuild the quotient from it and accept iff it differs
/// from `H`.
#[derive(Debug, Clone, Copy, Default)]
pub struct OmegaVerify;

#[derive(Debug, Clone)]
pub struct OmegaState {
    input: Option<OmegaInput>,
    x: Option<u64>,
    pub gatherer: Gatherer,
    requested: bool,
    /// Quotient rebuilt from the view, in the quotient branch.
    pub rebuilt: Option<QuotientGraph>,
}

impl Protocol for OmegaVerify {
    type State = OmegaState;

    fn init(&self, info: &AgentInfo<'_>) -> OmegaState {
        let x = decode_size_certificate(info.certificate);
        OmegaState {
            input: decode_omega_input(info.input),
            x,
            gatherer: Gatherer::new(info.id, Schedule::Single { n: x.unwrap_or(1) }),
            requested: false,
            rebuilt: None,
        }
    }

    fn step(&self, st: &mut OmegaState, obs: &Observation<'_, OmegaState>, _: &mut OracleCtx<'_>) -> Action {
        let (Some(input), Some(x)) = (&st.input, st.x) else {
            return Action::Decide(false);
        };
        match input {
            OmegaInput::TeamSize(k) => {
                let others = obs.peers.iter().filter(|p| p.decision.is_none());
                st.gatherer.absorb(others.map(|p| p.state.gatherer.group()));
                if obs.round >= tau(x, st.gatherer.leader()) {
                    return Action::Decide(st.gatherer.group().len() as u64 > *k);
                }
                st.gatherer.act(obs.round, obs.degree, obs.entry_port)
            }
            OmegaInput::Quotient(h) => {
                if let Some(view) = &obs.view {
                    return Action::Decide(match quotient_from_view(view) {
                        Ok((q, _)) => {
                            let differs = !quotient_isomorphic(&q, h);
                            st.rebuilt = Some(q);
                            differs
                        }
                        // no graph whose quotient is H has this view
                        Err(_) => true,
                    });
                }
                if st.requested {
                    return Action::Wait { until: u64::MAX };
                }
                st.requested = true;
                let depth = 2 * x.max(h.node_count() as u64);
                Action::CollectView { depth: depth as usize }
            }
        }
    }
}
