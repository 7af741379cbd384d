//! Search machinery shared by the per-game solvability oracles.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::fixed::ONE_RAW;
use crate::grid::{GridLayout, DIRS4};
use crate::physics::{Body, BodyParams};

/// Evidence that a level can be completed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Witness {
    /// Tile route from the spawn to the goal.
    Path(Vec<(i32, i32)>),
    /// Action indices that complete the level when replayed from reset.
    Actions(Vec<u8>),
}

impl Witness {
    /// Steps in the witness: path moves or actions.
    pub fn len(&self) -> usize {
        match self {
            Witness::Path(p) => p.len().saturating_sub(1),
            Witness::Actions(a) => a.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Solvable(Witness),
    Unsolvable,
    /// Search budget exhausted or the abstraction could not decide.
    Unknown,
}

impl Verdict {
    pub fn is_solvable(&self) -> bool {
        matches!(self, Verdict::Solvable(_))
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::Solvable(w) => Some(w),
            _ => None,
        }
    }
}

/// Shortest 4-connected tile path from `start` to `goal` through cells accepted by `passable`.
pub fn grid_path(
    layout: &GridLayout,
    start: (i32, i32),
    goal: (i32, i32),
    passable: impl Fn(i32, i32) -> bool,
) -> Option<Vec<(i32, i32)>> {
    if !passable(start.0, start.1) {
        return None;
    }
    let mut prev: Vec<u32> = vec![u32::MAX; layout.cells().len()];
    let si = layout.idx(start.0, start.1);
    prev[si] = si as u32;
    let mut queue = VecDeque::from([start]);
    while let Some((x, y)) = queue.pop_front() {
        if (x, y) == goal {
            let mut path = vec![goal];
            let mut i = layout.idx(x, y);
            while i != si {
                i = prev[i] as usize;
                let w = layout.width() as usize;
                path.push(((i % w) as i32, (i / w) as i32));
            }
            path.reverse();
            return Some(path);
        }
        for (dx, dy) in DIRS4 {
            let (nx, ny) = (x + dx, y + dy);
            if layout.in_bounds(nx, ny) && passable(nx, ny) {
                let ni = layout.idx(nx, ny);
                if prev[ni] == u32::MAX {
                    prev[ni] = layout.idx(x, y) as u32;
                    queue.push_back((nx, ny));
                }
            }
        }
    }
    None
}

/// Axis-aligned box in raw units: `(x0, y0, x1, y1)`, half-open.
pub type RawBox = (i32, i32, i32, i32);

#[inline]
pub fn body_hits(body: &Body, p: &BodyParams, b: &RawBox) -> bool {
    let (x, y) = (body.pos.x.raw(), body.pos.y.raw());
    x < b.2 && b.0 < x + p.width && y < b.3 && b.1 < y + p.height
}

/// Best-first search over platformer body states.
pub struct PlatformerProblem<'a> {
    pub layout: &'a GridLayout,
    pub body: BodyParams,
    pub start: Body,
    /// Lethal regions; the search never lets the body touch one.
    pub hazards: Vec<RawBox>,
    pub goal: RawBox,
    /// Candidate inputs as `(action index, horizontal, vertical)`.
    pub actions: Vec<(u8, i8, i8)>,
    pub max_ticks: u32,
}

type StateKey = (i32, i32, i32, bool, u8);

fn key(b: &Body) -> StateKey {
    (b.pos.x.raw(), b.pos.y.raw(), b.vel.y.raw(), b.grounded, b.charge)
}

impl PlatformerProblem<'_> {
    /// Greedy best-first toward the goal's x; returns the action script of the first success.
    pub fn solve(&self, budget: usize) -> Verdict {
        let bottom = self.layout.height() as i32 * ONE_RAW;
        let goal_x = (self.goal.0 + self.goal.2) / 2;
        let heuristic = |b: &Body| (goal_x - (b.pos.x.raw() + self.body.width / 2)).abs();

        // Node: (body, parent, action, depth)
        let mut nodes: Vec<(Body, u32, u8, u32)> = vec![(self.start, u32::MAX, 0, 0)];
        let mut seen: HashSet<StateKey> = HashSet::from([key(&self.start)]);
        let mut open = BinaryHeap::new();
        open.push(Reverse((heuristic(&self.start), 0u32, 0u32)));
        let mut expanded = 0usize;

        while let Some(Reverse((_, _, idx))) = open.pop() {
            expanded += 1;
            if expanded > budget {
                return Verdict::Unknown;
            }
            let (body, _, _, depth) = nodes[idx as usize];
            if depth >= self.max_ticks {
                continue;
            }
            for &(a, h, v) in &self.actions {
                let mut next = body;
                next.step(h, v, &self.body, self.layout);
                if next.pos.y.raw() >= bottom || self.hazards.iter().any(|hz| body_hits(&next, &self.body, hz)) {
                    continue;
                }
                if !seen.insert(key(&next)) {
                    continue;
                }
                nodes.push((next, idx, a, depth + 1));
                let child = (nodes.len() - 1) as u32;
                if body_hits(&next, &self.body, &self.goal) {
                    let mut script = Vec::new();
                    let mut i = child;
                    while nodes[i as usize].1 != u32::MAX {
                        script.push(nodes[i as usize].2);
                        i = nodes[i as usize].1;
                    }
                    script.reverse();
                    return Verdict::Solvable(Witness::Actions(script));
                }
                open.push(Reverse((heuristic(&next), depth + 1, child)));
            }
        }
        Verdict::Unsolvable
    }
}

/// Best-first search over cloned simulation states.
///
/// `step` advances a state by one action and reports `Some(true)` on
/// completion, `Some(false)` to continue and `None` when the state is dead.
/// Lower `h` is expanded first; ties go to the shallower node.
pub fn best_first<S: Clone, K: std::hash::Hash + Eq>(
    start: S,
    actions: &[u8],
    mut step: impl FnMut(&mut S, u8) -> Option<bool>,
    key: impl Fn(&S) -> K,
    h: impl Fn(&S) -> i64,
    max_depth: u32,
    budget: usize,
) -> Verdict {
    let mut nodes: Vec<(u32, u8)> = vec![(u32::MAX, 0)];
    let mut states: Vec<Option<S>> = vec![Some(start.clone())];
    let mut seen: HashSet<K> = HashSet::from([key(&start)]);
    let mut open = BinaryHeap::new();
    open.push(Reverse((h(&start), 0u32, 0u32)));
    let mut expanded = 0;
    while let Some(Reverse((_, depth, idx))) = open.pop() {
        expanded += 1;
        if expanded > budget {
            return Verdict::Unknown;
        }
        if depth >= max_depth {
            continue;
        }
        let state = states[idx as usize].take().expect("expanded once");
        for &a in actions {
            let mut next = state.clone();
            let Some(done) = step(&mut next, a) else { continue };
            if done {
                let mut script = vec![a];
                let mut i = idx;
                while nodes[i as usize].0 != u32::MAX {
                    script.push(nodes[i as usize].1);
                    i = nodes[i as usize].0;
                }
                script.reverse();
                return Verdict::Solvable(Witness::Actions(script));
            }
            if !seen.insert(key(&next)) {
                continue;
            }
            nodes.push((idx, a));
            let child = (nodes.len() - 1) as u32;
            open.push(Reverse((h(&next), depth + 1, child)));
            states.push(Some(next));
        }
    }
    Verdict::Unsolvable
}
