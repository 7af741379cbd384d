use std::collections::VecDeque;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

/// Terrain tag of one grid cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Tile {
    Wall,
    Open,
    Dirt,
    Water,
    Road,
    Platform,
    Hazard,
}

impl Tile {
    pub const COUNT: usize = 7;

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn ascii(self) -> char {
        match self {
            Tile::Wall => '#',
            Tile::Open => '.',
            Tile::Dirt => ':',
            Tile::Water => '~',
            Tile::Road => '=',
            Tile::Platform => '%',
            Tile::Hazard => '^',
        }
    }

    /// Blocks platformer and flyer bodies.
    pub fn is_solid(self) -> bool {
        matches!(self, Tile::Wall | Tile::Platform)
    }
}

pub const DIRS4: [(i32, i32); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];

/// Row-major tile grid; row 0 is the top of the world.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridLayout {
    width: u32,
    height: u32,
    cells: Vec<Tile>,
}

impl GridLayout {
    pub fn filled(width: u32, height: u32, tile: Tile) -> Self {
        GridLayout { width, height, cells: vec![tile; (width * height) as usize] }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn cells(&self) -> &[Tile] {
        &self.cells
    }

    #[inline]
    pub fn in_bounds(&self, x: i32, y: i32) -> bool {
        x >= 0 && y >= 0 && (x as u32) < self.width && (y as u32) < self.height
    }

    #[inline]
    pub fn idx(&self, x: i32, y: i32) -> usize {
        debug_assert!(self.in_bounds(x, y));
        y as usize * self.width as usize + x as usize
    }

    #[inline]
    pub fn get(&self, x: i32, y: i32) -> Option<Tile> {
        if self.in_bounds(x, y) {
            Some(self.cells[self.idx(x, y)])
        } else {
            None
        }
    }

    /// Out-of-bounds reads as `outside`.
    #[inline]
    pub fn get_or(&self, x: i32, y: i32, outside: Tile) -> Tile {
        self.get(x, y).unwrap_or(outside)
    }

    #[inline]
    pub fn set(&mut self, x: i32, y: i32, tile: Tile) {
        let i = self.idx(x, y);
        self.cells[i] = tile;
    }

    pub fn count(&self, tile: Tile) -> usize {
        self.cells.iter().filter(|&&t| t == tile).count()
    }

    pub fn positions(&self, tile: Tile) -> Vec<(i32, i32)> {
        let w = self.width as i32;
        self.cells.iter().enumerate().filter(|(_, &t)| t == tile).map(|(i, _)| (i as i32 % w, i as i32 / w)).collect()
    }

    /// Number of 4-neighbours of `(x, y)` carrying `tile`.
    pub fn degree(&self, x: i32, y: i32, tile: Tile) -> usize {
        DIRS4.iter().filter(|(dx, dy)| self.get(x + dx, y + dy) == Some(tile)).count()
    }

    /// BFS distances over cells satisfying `passable`; `u32::MAX` marks unreached cells.
    pub fn bfs_distances(&self, start: (i32, i32), passable: impl Fn(Tile) -> bool) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.cells.len()];
        if !self.get(start.0, start.1).is_some_and(&passable) {
            return dist;
        }
        let mut queue = VecDeque::new();
        dist[self.idx(start.0, start.1)] = 0;
        queue.push_back(start);
        while let Some((x, y)) = queue.pop_front() {
            let d = dist[self.idx(x, y)];
            for (dx, dy) in DIRS4 {
                let (nx, ny) = (x + dx, y + dy);
                if let Some(t) = self.get(nx, ny) {
                    let ni = self.idx(nx, ny);
                    if passable(t) && dist[ni] == u32::MAX {
                        dist[ni] = d + 1;
                        queue.push_back((nx, ny));
                    }
                }
            }
        }
        dist
    }

    /// Number of 4-connected components among cells equal to `tile`.
    pub fn components(&self, tile: Tile) -> usize {
        let mut seen = vec![false; self.cells.len()];
        let mut n = 0;
        for start in self.positions(tile) {
            if seen[self.idx(start.0, start.1)] {
                continue;
            }
            n += 1;
            let dist = self.bfs_distances(start, |t| t == tile);
            for (s, d) in seen.iter_mut().zip(dist) {
                if d != u32::MAX {
                    *s = true;
                }
            }
        }
        n
    }

    pub fn to_ascii(&self) -> String {
        let mut out = String::with_capacity(self.cells.len() + self.height as usize);
        for row in self.cells.chunks(self.width as usize) {
            for t in row {
                out.push(t.ascii());
            }
            let _ = writeln!(out);
        }
        out
    }
}
