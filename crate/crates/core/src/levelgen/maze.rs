//! Spanning-tree mazes and dead-end removal.
//!
//! A `w x h` cell maze is stored as a `(2w+1) x (2h+1)` tile grid: cell
//! `(i, j)` lives at tile `(2i+1, 2j+1)` and the tile between two adjacent
//! cells is a wall unless a passage was carved through it.

use crate::error::{Error, Result};
use crate::grid::{GridLayout, Tile, DIRS4};
use crate::rng::RngStream;

pub const MIN_CELLS: u32 = 3;
pub const MAX_CELLS: u32 = 25;

struct DisjointSet {
    parent: Vec<u32>,
    rank: Vec<u8>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        DisjointSet { parent: (0..n as u32).collect(), rank: vec![0; n] }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra as usize].cmp(&self.rank[rb as usize]) {
            std::cmp::Ordering::Less => self.parent[ra as usize] = rb,
            std::cmp::Ordering::Greater => self.parent[rb as usize] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb as usize] = ra;
                self.rank[ra as usize] += 1;
            }
        }
        true
    }
}

/// Tile coordinate of maze cell `(i, j)`.
#[inline]
pub fn cell_tile(i: i32, j: i32) -> (i32, i32) {
    (2 * i + 1, 2 * j + 1)
}

/// Random spanning-tree maze over a `w x h` cell graph by randomized Kruskal.
pub fn kruskal_maze(rng: &mut RngStream, w: u32, h: u32) -> Result<GridLayout> {
    if !(MIN_CELLS..=MAX_CELLS).contains(&w) || !(MIN_CELLS..=MAX_CELLS).contains(&h) {
        return Err(Error::Config(format!("maze dimensions {w}x{h} outside {MIN_CELLS}..={MAX_CELLS}")));
    }
    let mut grid = GridLayout::filled(2 * w + 1, 2 * h + 1, Tile::Wall);
    for j in 0..h as i32 {
        for i in 0..w as i32 {
            let (x, y) = cell_tile(i, j);
            grid.set(x, y, Tile::Open);
        }
    }

    // Edge (cell index, +x or +y neighbour).
    let mut edges: Vec<(u32, bool)> = Vec::with_capacity((2 * w * h) as usize);
    for j in 0..h {
        for i in 0..w {
            let c = j * w + i;
            if i + 1 < w {
                edges.push((c, true));
            }
            if j + 1 < h {
                edges.push((c, false));
            }
        }
    }
    rng.shuffle(&mut edges);

    let mut sets = DisjointSet::new((w * h) as usize);
    let mut carved = 0;
    for (c, horizontal) in edges {
        let other = if horizontal { c + 1 } else { c + w };
        if sets.union(c, other) {
            let (i, j) = ((c % w) as i32, (c / w) as i32);
            let (x, y) = cell_tile(i, j);
            if horizontal {
                grid.set(x + 1, y, Tile::Open);
            } else {
                grid.set(x, y + 1, Tile::Open);
            }
            carved += 1;
            if carved == w * h - 1 {
                break;
            }
        }
    }
    Ok(grid)
}

/// Opens walls until every open tile has at least two open 4-neighbours.
///
/// Only walls that sit between two open tiles (and off the border) are
/// candidates, so connectivity is preserved and the open set only grows.
pub fn remove_dead_ends(layout: &GridLayout, rng: &mut RngStream) -> GridLayout {
    let mut grid = layout.clone();
    let (w, h) = (grid.width() as i32, grid.height() as i32);
    let mut open = grid.positions(Tile::Open);
    rng.shuffle(&mut open);
    loop {
        let mut changed = false;
        for &(x, y) in &open {
            if grid.get(x, y) != Some(Tile::Open) || grid.degree(x, y, Tile::Open) >= 2 {
                continue;
            }
            let mut candidates = [(0, 0); 4];
            let mut n = 0;
            for (dx, dy) in DIRS4 {
                let (wx, wy) = (x + dx, y + dy);
                let interior = wx > 0 && wy > 0 && wx < w - 1 && wy < h - 1;
                if interior
                    && grid.get(wx, wy) == Some(Tile::Wall)
                    && grid.get(x + 2 * dx, y + 2 * dy) == Some(Tile::Open)
                {
                    candidates[n] = (wx, wy);
                    n += 1;
                }
            }
            if let Some(&(wx, wy)) = rng.pick(&candidates[..n]) {
                grid.set(wx, wy, Tile::Open);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    grid
}
