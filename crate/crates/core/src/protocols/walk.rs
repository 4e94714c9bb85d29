use crate::graph::Port;
use crate::problems::decode_number;
use crate::sim::{Action, AgentInfo, Observation, OracleCtx, Protocol};

#[derive(Debug, Clone, PartialEq, Eq)]
struct Frame {
    back: Port,
    next: Port,
    degree: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WalkCheck {
    Move(Port),
    /// Back at the start with every port explored, after this many moves.
    Completed(u64),
    /// The budget ran out first; further calls lead back to the start.
    Exhausted,
    /// Back at the start after running out of budget.
    Home,
}

/// Depth-first walk that never takes the port it arrived by, so it treats
/// the graph as a tree. On a tree with `n` nodes it returns to its start
/// after exactly `2 (n - 1)` moves; on a graph with a cycle it never does.
#[derive(Debug, Clone)]
pub struct TreeWalk {
    budget: u64,
    moves: u64,
    stack: Vec<Frame>,
    forward: bool,
    exhausted: bool,
    max_degree: usize,
}

impl TreeWalk {
    pub fn new(budget: u64) -> Self {
        TreeWalk { budget, moves: 0, stack: Vec::new(), forward: false, exhausted: false, max_degree: 0 }
    }

    /// Largest degree seen so far.
    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn next(&mut self, degree: usize, entry: Option<Port>) -> WalkCheck {
        if self.stack.is_empty() {
            self.stack.push(Frame { back: 0, next: 1, degree });
            self.max_degree = degree;
        } else if self.forward {
            let back = entry.expect("a forward move has an entry port");
            self.stack.push(Frame { back, next: 1, degree });
            self.max_degree = self.max_degree.max(degree);
        }
        self.forward = false;
        if self.exhausted {
            if self.stack.len() == 1 {
                return WalkCheck::Home;
            }
            return WalkCheck::Move(self.stack.pop().expect("non-root").back);
        }
        let at_root = self.stack.len() == 1;
        let top = self.stack.last_mut().expect("root frame");
        while top.next == top.back {
            top.next += 1;
        }
        let forward = (top.next <= top.degree).then_some(top.next);
        if forward.is_none() && at_root {
            return WalkCheck::Completed(self.moves);
        }
        if self.moves >= self.budget {
            self.exhausted = true;
            return WalkCheck::Exhausted;
        }
        self.moves += 1;
        match forward {
            Some(p) => {
                top.next += 1;
                self.forward = true;
                WalkCheck::Move(p)
            }
            None => WalkCheck::Move(self.stack.pop().expect("non-root").back),
        }
    }
}

/// A positive integer written in binary without leading zeros.
pub fn decode_size_certificate(cert: &str) -> Option<u64> {
    if !cert.starts_with('1') || !cert.bytes().all(|b| b == b'0' || b == b'1') || cert.len() > 63 {
        return None;
    }
    u64::from_str_radix(cert, 2).ok()
}

/// Decides treesize for the size given as input: walk `2 (n - 1)` moves
/// and accept iff the walk closes exactly then.
#[derive(Debug, Clone, Copy, Default)]
pub struct DecideTreesize;

#[derive(Debug, Clone)]
pub struct WalkState {
    target: Option<u64>,
    walk: TreeWalk,
    extra_ok: bool,
}

impl Protocol for DecideTreesize {
    type State = WalkState;

    fn init(&self, info: &AgentInfo<'_>) -> WalkState {
        let n = decode_number(info.input).filter(|&n| n > 0);
        let budget = n.map_or(0, |n| 2 * (n - 1));
        WalkState { target: n.map(|n| 2 * (n - 1)), walk: TreeWalk::new(budget), extra_ok: true }
    }

    fn step(&self, st: &mut WalkState, obs: &Observation<'_, WalkState>, _: &mut OracleCtx<'_>) -> Action {
        let Some(target) = st.target else {
            return Action::Decide(false);
        };
        match st.walk.next(obs.degree, obs.entry_port) {
            WalkCheck::Move(p) => Action::Move(p),
            WalkCheck::Completed(m) => Action::Decide(m == target),
            WalkCheck::Exhausted | WalkCheck::Home => Action::Decide(false),
        }
    }
}

/// Verifies tree (or path, with `path = true`) given the node count as a
/// binary certificate.
#[derive(Debug, Clone, Copy, Default)]
pub struct VerifyTreeSize {
    pub path: bool,
}

impl Protocol for VerifyTreeSize {
    type State = WalkState;

    fn init(&self, info: &AgentInfo<'_>) -> WalkState {
        let x = decode_size_certificate(info.certificate);
        let budget = x.map_or(0, |x| 2 * (x - 1));
        WalkState {
            target: x.map(|x| 2 * (x - 1)),
            walk: TreeWalk::new(budget),
            extra_ok: info.input.is_empty(),
        }
    }

    fn step(&self, st: &mut WalkState, obs: &Observation<'_, WalkState>, _: &mut OracleCtx<'_>) -> Action {
        let Some(target) = st.target.filter(|_| st.extra_ok) else {
            return Action::Decide(false);
        };
        match st.walk.next(obs.degree, obs.entry_port) {
            WalkCheck::Move(p) => Action::Move(p),
            WalkCheck::Completed(m) => {
                Action::Decide(m == target && (!self.path || st.walk.max_degree() <= 2))
            }
            WalkCheck::Exhausted | WalkCheck::Home => Action::Decide(false),
        }
    }
}

/// A comma-separated port sequence such as `1,3,2`; empty means stay.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathCertificate(pub Vec<Port>);

impl PathCertificate {
    pub fn parse(cert: &str) -> Option<PathCertificate> {
        if cert.is_empty() {
            return Some(PathCertificate(Vec::new()));
        }
        cert.split(',')
            .map(|w| decode_number(w).filter(|&p| p > 0).map(|p| p as Port))
            .collect::<Option<Vec<_>>>()
            .map(PathCertificate)
    }

    pub fn encode(ports: &[Port]) -> String {
        ports.iter().map(Port::to_string).collect::<Vec<_>>().join(",")
    }
}

/// Verifies that some node has degree `k` (`k = 1`: leaf) by following the
/// agent's certificate path.
#[derive(Debug, Clone, Copy)]
pub struct VerifyDegree {
    pub k: usize,
}

#[derive(Debug, Clone)]
pub struct FollowState {
    path: Option<Vec<Port>>,
    next: usize,
}

impl Protocol for VerifyDegree {
    type State = FollowState;

    fn init(&self, info: &AgentInfo<'_>) -> FollowState {
        let path = PathCertificate::parse(info.certificate).filter(|_| info.input.is_empty());
        FollowState { path: path.map(|p| p.0), next: 0 }
    }

    fn step(&self, st: &mut FollowState, obs: &Observation<'_, FollowState>, _: &mut OracleCtx<'_>) -> Action {
        let Some(path) = &st.path else {
            return Action::Decide(false);
        };
        match path.get(st.next) {
            None => Action::Decide(obs.degree == self.k),
            Some(&p) if p > obs.degree => Action::Decide(false),
            Some(&p) => {
                st.next += 1;
                Action::Move(p)
            }
        }
    }
}

/// Decides odd: yes iff the start node has odd degree.
#[derive(Debug, Clone, Copy, Default)]
pub struct DecideOdd;

impl Protocol for DecideOdd {
    type State = bool;

    fn init(&self, info: &AgentInfo<'_>) -> bool {
        info.input.is_empty()
    }

    fn step(&self, ok: &mut bool, obs: &Observation<'_, bool>, _: &mut OracleCtx<'_>) -> Action {
        Action::Decide(*ok && obs.degree % 2 == 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Configuration;
    use crate::graph::{consistent_cycle, path, star, sun, PortGraph};
    use crate::sim::Simulation;

    fn walk(g: &PortGraph, start: usize, budget: u64) -> (WalkCheck, usize) {
        let mut w = TreeWalk::new(budget);
        let (mut pos, mut entry) = (start, None);
        loop {
            match w.next(g.degree(pos), entry) {
                WalkCheck::Move(p) => {
                    let (v, q) = g.neighbor(pos, p);
                    pos = v;
                    entry = Some(q);
                }
                WalkCheck::Exhausted => {}
                done => return (done, pos),
            }
        }
    }

    #[test]
    fn tree_walk_closes_on_trees_only() {
        assert_eq!(walk(&star(4).unwrap(), 2, 100), (WalkCheck::Completed(6), 2));
        assert_eq!(walk(&path(5).unwrap(), 2, 100), (WalkCheck::Completed(8), 2));
        assert_eq!(walk(&consistent_cycle(4).unwrap(), 1, 100), (WalkCheck::Home, 1));
        assert_eq!(walk(&star(4).unwrap(), 0, 5), (WalkCheck::Home, 0));
    }

    fn single(g: PortGraph, start: usize, input: &str, cert: &str, p: &impl Protocol) -> Option<bool> {
        let cfg = Configuration::with_starts(g, &[start]).unwrap().with_uniform_input(input);
        let out = Simulation::new(&cfg, p).certificate(cert).max_rounds(10_000).run().unwrap();
        out.decisions[0]
    }

    #[test]
    fn treesize_examples() {
        assert_eq!(single(star(4).unwrap(), 0, "4", "", &DecideTreesize), Some(true));
        assert_eq!(single(consistent_cycle(4).unwrap(), 0, "4", "", &DecideTreesize), Some(false));
        assert_eq!(single(path(2).unwrap(), 1, "2", "", &DecideTreesize), Some(true));
        assert_eq!(single(path(3).unwrap(), 1, "4", "", &DecideTreesize), Some(false));
        assert_eq!(single(PortGraph::singleton(), 0, "1", "", &DecideTreesize), Some(true));
    }

    #[test]
    fn size_certificates() {
        assert_eq!(decode_size_certificate("101"), Some(5));
        assert_eq!(decode_size_certificate("0101"), None);
        assert_eq!(decode_size_certificate(""), None);
        let tree = VerifyTreeSize { path: false };
        let line = VerifyTreeSize { path: true };
        assert_eq!(single(path(3).unwrap(), 0, "", "11", &line), Some(true));
        assert_eq!(single(path(3).unwrap(), 0, "", "10", &line), Some(false));
        assert_eq!(single(star(4).unwrap(), 0, "", "100", &line), Some(false));
        assert_eq!(single(star(4).unwrap(), 0, "", "100", &tree), Some(true));
        for x in 1..=8u64 {
            let cert = format!("{x:b}");
            assert_eq!(single(consistent_cycle(4).unwrap(), 0, "", &cert, &tree), Some(false));
        }
    }

    #[test]
    fn degree_certificates() {
        let leaf = VerifyDegree { k: 1 };
        assert_eq!(single(star(4).unwrap(), 0, "", "1", &leaf), Some(true));
        assert_eq!(single(star(4).unwrap(), 0, "", "4", &leaf), Some(false));
        assert_eq!(single(star(4).unwrap(), 0, "", "x", &leaf), Some(false));
        assert_eq!(single(sun(3).unwrap(), 3, "", "1", &VerifyDegree { k: 3 }), Some(true));
        assert_eq!(PathCertificate::encode(&[1, 3]), "1,3");
        assert_eq!(PathCertificate::parse("1,3"), Some(PathCertificate(vec![1, 3])));
    }

    #[test]
    fn odd_degree() {
        assert_eq!(single(path(2).unwrap(), 0, "", "", &DecideOdd), Some(true));
        assert_eq!(single(consistent_cycle(4).unwrap(), 0, "", "", &DecideOdd), Some(false));
        assert_eq!(single(star(4).unwrap(), 0, "", "", &DecideOdd), Some(true));
    }
}
