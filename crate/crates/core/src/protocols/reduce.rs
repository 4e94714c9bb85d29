use super::mapping::{TeamMapState, TeamStep};
use super::quotient_probe::{ProbeStep, QuotientProbe};
use crate::config::{AgentPlacement, Configuration};
use crate::graph::{quotient_isomorphic, NodeId, PortGraph, QuotientGraph};
use crate::lift::random_lift;
use crate::problems::Problem;
use crate::sim::{Action, AgentInfo, Observation, OracleCtx, Protocol};
use crate::views::quotient;

/// A simple connected graph whose quotient is `q`, and a node of it in
/// class `class`. Tries `q` itself, then seeded random covers of growing
/// size.
pub fn lift_with_class(q: &QuotientGraph, class: NodeId) -> Option<(PortGraph, NodeId)> {
    if let Some(g) = q.to_simple() {
        return Some((g, class));
    }
    for copies in 2..=64 {
        for seed in 0..64 {
            let Some(g) = random_lift(q, copies, seed) else {
                continue;
            };
            if quotient_isomorphic(&quotient(&g).0, q) {
                return Some((g, class * copies));
            }
        }
    }
    None
}

/// Decides a problem with an oracle for teamsize x quotient.
///
/// In round 0 every agent asks `1<k>` for `k = 1, 2, ...`; the first no
/// gives the team size. A team gathers, maps the graph with the largest
/// id as explorer and evaluates the problem on the rebuilt configuration.
/// A lone agent learns the quotient through `2<H>` queries, builds any
/// graph with that quotient and evaluates the problem there for a node in
/// its own class.
#[derive(Debug, Clone)]
pub struct ReduceToOmega {
    pub problem: Problem,
}

#[derive(Debug, Clone)]
enum Stage {
    Start,
    Team(Box<TeamMapState>),
    Solo(QuotientProbe),
}

#[derive(Debug, Clone)]
pub struct ReduceState {
    id: u64,
    input: String,
    stage: Stage,
    pub team_size: Option<u64>,
    /// The configuration the decision was based on.
    pub evaluated: Option<Configuration>,
}

fn team_of(s: &ReduceState) -> Option<&TeamMapState> {
    match &s.stage {
        Stage::Team(t) => Some(t.as_ref()),
        _ => None,
    }
}

impl Protocol for ReduceToOmega {
    type State = ReduceState;

    fn init(&self, info: &AgentInfo<'_>) -> ReduceState {
        ReduceState {
            id: info.id,
            input: info.input.to_string(),
            stage: Stage::Start,
            team_size: None,
            evaluated: None,
        }
    }

    fn step(&self, st: &mut ReduceState, obs: &Observation<'_, ReduceState>, oracle: &mut OracleCtx<'_>) -> Action {
        if let Stage::Start = st.stage {
            let mut k = 1u64;
            while oracle.query(&format!("1{k}")) {
                k += 1;
            }
            st.team_size = Some(k);
            st.stage = if k > 1 {
                Stage::Team(Box::new(TeamMapState::new(st.id, &st.input, k)))
            } else {
                Stage::Solo(QuotientProbe::new("2"))
            };
        }
        let cfg = match &mut st.stage {
            Stage::Team(team) => {
                match team.step(obs, team_of) {
                    TeamStep::Act(a) => return a,
                    TeamStep::Ready(cfg) => cfg,
                }
            }
            Stage::Solo(probe) => match probe.step(obs.view.as_ref(), oracle) {
                ProbeStep::Act(a) => return a,
                ProbeStep::Found(q) => {
                    let Some((g, t)) = lift_with_class(&q, 0) else {
                        return Action::Decide(false);
                    };
                    let agent = AgentPlacement::new(t, st.id, st.input.clone());
                    Configuration::new(g, vec![agent]).expect("valid single-agent configuration")
                }
            },
            Stage::Start => unreachable!("left above"),
        };
        let answer = self.problem.evaluate(&cfg);
        st.evaluated = Some(cfg);
        Action::Decide(answer)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{consistent_cycle, path, Edge};
    use crate::problems::oracle_env;
    use crate::sim::Simulation;

    fn reduce(problem: Problem, cfg: &Configuration) -> Vec<Option<bool>> {
        let oracle = oracle_env(&Problem::omega(), cfg).unwrap();
        let out = Simulation::new(cfg, &ReduceToOmega { problem })
            .oracle(&oracle)
            .max_rounds(10_000_000)
            .run()
            .unwrap();
        out.decisions
    }

    #[test]
    fn tree_alone_on_a_path() {
        let cfg = Configuration::with_starts(path(3).unwrap(), &[1]).unwrap();
        assert_eq!(reduce(Problem::Tree, &cfg), vec![Some(true)]);
    }

    #[test]
    fn tree_in_pairs_on_a_cycle() {
        let cfg = Configuration::with_starts(consistent_cycle(4).unwrap(), &[0, 2]).unwrap();
        assert_eq!(reduce(Problem::Tree, &cfg), vec![Some(false); 2]);
    }

    #[test]
    fn teamsize_in_pairs() {
        let cfg = Configuration::with_starts(path(2).unwrap(), &[0, 1]).unwrap().with_uniform_input("1");
        assert_eq!(reduce(Problem::Teamsize, &cfg), vec![Some(true); 2]);
    }

    #[test]
    fn lifts_keep_the_class() {
        let k2 = QuotientGraph::new(1, [Edge::new(0, 1, 0, 1)]).unwrap();
        let (g, t) = lift_with_class(&k2, 0).unwrap();
        assert_eq!((g.node_count(), t), (2, 0));
        let p = QuotientGraph::loop_with_pendant();
        let (g, t) = lift_with_class(&p, 1).unwrap();
        assert_eq!(g.degree(t), 1);
    }
}
