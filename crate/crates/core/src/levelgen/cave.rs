//! Cellular-automata caves.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridLayout, Tile};
use crate::rng::RngStream;

/// Probability as an exact ratio `num / den`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fraction {
    pub num: u32,
    pub den: u32,
}

impl Fraction {
    pub const fn new(num: u32, den: u32) -> Self {
        Fraction { num, den }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaveParams {
    /// Initial wall probability of interior cells.
    pub fill: Fraction,
    pub iterations: u32,
    /// An open cell becomes wall with at least this many wall neighbours.
    pub birth: u32,
    /// A wall cell stays wall with at least this many wall neighbours.
    pub survive: u32,
    /// Fill every open pocket except the largest.
    pub prune: bool,
}

impl Default for CaveParams {
    fn default() -> Self {
        CaveParams { fill: Fraction::new(45, 100), iterations: 4, birth: 5, survive: 4, prune: true }
    }
}

pub const MAX_ATTEMPTS: u64 = 50;
/// Accepted open fraction, as per-mille bounds (inclusive).
pub const OPEN_FRACTION_PERMILLE: (u64, u64) = (250, 750);

fn wall_neighbours(g: &GridLayout, x: i32, y: i32) -> u32 {
    let mut n = 0;
    for dy in -1..=1 {
        for dx in -1..=1 {
            if (dx, dy) != (0, 0) && g.get_or(x + dx, y + dy, Tile::Wall) == Tile::Wall {
                n += 1;
            }
        }
    }
    n
}

fn attempt(rng: &mut RngStream, w: u32, h: u32, p: &CaveParams) -> GridLayout {
    let mut g = GridLayout::filled(w, h, Tile::Wall);
    for y in 1..h as i32 - 1 {
        for x in 1..w as i32 - 1 {
            if !rng.chance(p.fill.num, p.fill.den) {
                g.set(x, y, Tile::Open);
            }
        }
    }
    for _ in 0..p.iterations {
        let mut next = g.clone();
        for y in 1..h as i32 - 1 {
            for x in 1..w as i32 - 1 {
                let n = wall_neighbours(&g, x, y);
                let wall = if g.get(x, y) == Some(Tile::Wall) { n >= p.survive } else { n >= p.birth };
                next.set(x, y, if wall { Tile::Wall } else { Tile::Open });
            }
        }
        g = next;
    }
    if p.prune {
        keep_largest_component(&mut g);
    }
    g
}

/// Fills every open component except the largest (ties: first in scan order).
pub fn keep_largest_component(g: &mut GridLayout) {
    let mut label = vec![u32::MAX; g.cells().len()];
    let mut sizes = Vec::new();
    for start in g.positions(Tile::Open) {
        if label[g.idx(start.0, start.1)] != u32::MAX {
            continue;
        }
        let id = sizes.len() as u32;
        let dist = g.bfs_distances(start, |t| t == Tile::Open);
        let mut size = 0;
        for (l, d) in label.iter_mut().zip(&dist) {
            if *d != u32::MAX {
                *l = id;
                size += 1;
            }
        }
        sizes.push(size);
    }
    let Some(best) = sizes.iter().enumerate().max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0))).map(|(i, _)| i as u32)
    else {
        return;
    };
    let w = g.width() as i32;
    for (i, l) in label.iter().enumerate() {
        if *l != u32::MAX && *l != best {
            g.set(i as i32 % w, i as i32 / w, Tile::Wall);
        }
    }
}

/// Cave by cellular automata; resamples until the open fraction lies in `[0.25, 0.75]`.
pub fn cellular_automata_cave(rng: &RngStream, w: u32, h: u32, p: &CaveParams) -> Result<GridLayout> {
    if p.fill.num == 0 || p.fill.num >= p.fill.den {
        return Err(Error::Domain(format!("fill probability {}/{} not in (0, 1)", p.fill.num, p.fill.den)));
    }
    if p.iterations == 0 {
        return Err(Error::Domain("cellular automata needs at least one iteration".into()));
    }
    if w < 3 || h < 3 {
        return Err(Error::Config(format!("cave {w}x{h} too small")));
    }
    let total = u64::from(w) * u64::from(h);
    for a in 0..MAX_ATTEMPTS {
        let mut stream = rng.fork(a);
        let g = attempt(&mut stream, w, h, p);
        let open = g.count(Tile::Open) as u64;
        let (lo, hi) = OPEN_FRACTION_PERMILLE;
        if open * 1000 >= lo * total && open * 1000 <= hi * total {
            return Ok(g);
        }
    }
    Err(Error::Generation(format!("no cave with open fraction in bounds after {MAX_ATTEMPTS} attempts")))
}
