use crate::graph::Port;

#[derive(Debug, Clone, PartialEq, Eq)]
struct Frame {
    back: Port,
    next: Port,
    degree: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Last {
    Nothing,
    Forward,
    Backward,
}

/// Depth-first walk over every port sequence of length at most `depth`,
/// ports in ascending order (the entry port included), returning to the
/// starting node. It never needs to recognize a node it has seen before.
///
/// A forward step is only taken if the walk can still get back within
/// `budget` moves, so with a wrong depth the tour is cut short instead of
/// overrunning its slot. With `depth = n` and `budget = 2 n^n` on a graph
/// with at most `n` nodes the cut never triggers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DfsTour {
    depth: usize,
    budget: u64,
    moves: u64,
    stack: Vec<Frame>,
    last: Last,
    done: bool,
}

impl DfsTour {
    pub fn new(depth: usize, budget: u64) -> Self {
        DfsTour { depth, budget, moves: 0, stack: Vec::new(), last: Last::Nothing, done: false }
    }

    pub fn moves(&self) -> u64 {
        self.moves
    }

    pub fn is_done(&self) -> bool {
        self.done
    }

    /// The next port to take, or `None` once the walk is back at its start.
    /// `degree` and `entry` describe the node reached by the previous move.
    pub fn next(&mut self, degree: usize, entry: Option<Port>) -> Option<Port> {
        if self.done {
            return None;
        }
        match self.last {
            Last::Nothing => self.stack.push(Frame { back: 0, next: 1, degree }),
            Last::Forward => {
                let back = entry.expect("a forward move always has an entry port");
                self.stack.push(Frame { back, next: 1, degree });
            }
            Last::Backward => {}
        }
        let level = self.stack.len() - 1;
        let room = self.moves + 1 + (level as u64 + 1) <= self.budget;
        let top = self.stack.last_mut().expect("root frame");
        if level < self.depth && top.next <= top.degree && room {
            let p = top.next;
            top.next += 1;
            self.moves += 1;
            self.last = Last::Forward;
            return Some(p);
        }
        if level == 0 {
            self.done = true;
            return None;
        }
        let frame = self.stack.pop().expect("non-root frame");
        self.moves += 1;
        self.last = Last::Backward;
        Some(frame.back)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{consistent_cycle, path, PortGraph};

    /// Drives a tour directly on a graph; returns (moves, nodes visited, end).
    fn drive(g: &PortGraph, start: usize, depth: usize, budget: u64) -> (u64, Vec<bool>, usize) {
        let mut tour = DfsTour::new(depth, budget);
        let mut pos = start;
        let mut entry = None;
        let mut seen = vec![false; g.node_count()];
        seen[start] = true;
        while let Some(p) = tour.next(g.degree(pos), entry) {
            let (w, q) = g.neighbor(pos, p);
            pos = w;
            entry = Some(q);
            seen[pos] = true;
        }
        (tour.moves(), seen, pos)
    }

    #[test]
    fn k2_depth_two() {
        // sequences: (1), (1,1) -> 2 tree edges -> 4 moves
        let (moves, seen, end) = drive(&path(2).unwrap(), 0, 2, 8);
        assert_eq!(moves, 4);
        assert!(seen.iter().all(|&s| s));
        assert_eq!(end, 0);
    }

    #[test]
    fn cycle_three() {
        // 2 + 4 + 8 sequences -> 28 moves
        let (moves, seen, end) = drive(&consistent_cycle(3).unwrap(), 1, 3, 54);
        assert_eq!(moves, 28);
        assert!(seen.iter().all(|&s| s));
        assert_eq!(end, 1);
    }

    #[test]
    fn budget_cuts_the_tour_but_it_still_returns() {
        let (moves, _, end) = drive(&consistent_cycle(3).unwrap(), 0, 3, 5);
        assert!(moves <= 5);
        assert_eq!(end, 0);
    }

    #[test]
    fn depth_zero_stays() {
        let (moves, _, end) = drive(&path(3).unwrap(), 1, 0, 10);
        assert_eq!((moves, end), (0, 1));
    }
}
