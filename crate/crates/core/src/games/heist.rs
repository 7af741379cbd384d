//! Heist: collect coloured keys to open locks on the way to the gem.
//!
//! Locks sit on the unique maze path from the spawn to the gem, ordered
//! outward. Working back from the gem, the key for lock `j` is dropped in
//! the region the player can reach with locks `j..` still closed, so the
//! chain can always be walked in order.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::maze::distinct_pair;
use super::{grid_move, level_stream, move_action, GameId, GameLogic, Intent, Tick, COMPLETION_REWARD};
use crate::entity::{Entity, EntityKind};
use crate::error::Result;
use crate::grid::{GridLayout, Tile, DIRS4};
use crate::levelgen::maze::cell_tile;
use crate::levelgen::solve::grid_path;
use crate::levelgen::{kruskal_maze, Verdict, Witness};
use crate::render::{Camera, Hud, Scene};
use crate::rng::labels;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeistParams {
    pub cells: (u32, u32),
    /// Inclusive range of the lock count (at most three).
    pub locks: (u32, u32),
    pub memory_cells: u32,
    pub theme_pool: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lock {
    pub tile: (i32, i32),
    pub key: (i32, i32),
    pub color: u8,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeistLevel {
    pub layout: GridLayout,
    pub player: (i32, i32),
    pub gem: (i32, i32),
    /// Ordered from the spawn outward.
    pub locks: Vec<Lock>,
}

fn reachable(layout: &GridLayout, from: (i32, i32), blocked: &[(i32, i32)]) -> Vec<bool> {
    let mut seen = vec![false; layout.cells().len()];
    seen[layout.idx(from.0, from.1)] = true;
    let mut q = VecDeque::from([from]);
    while let Some((x, y)) = q.pop_front() {
        for (dx, dy) in DIRS4 {
            let (nx, ny) = (x + dx, y + dy);
            if layout.get(nx, ny) == Some(Tile::Open) && !blocked.contains(&(nx, ny)) {
                let i = layout.idx(nx, ny);
                if !seen[i] {
                    seen[i] = true;
                    q.push_back((nx, ny));
                }
            }
        }
    }
    seen
}

impl HeistLevel {
    pub fn generate(seed: u32, p: &HeistParams, memory: bool) -> Result<HeistLevel> {
        let mut rng = level_stream(GameId::Heist, seed, labels::LAYOUT);
        let (w, h) = if memory {
            (p.memory_cells, p.memory_cells)
        } else {
            (rng.range(p.cells.0 as i32, p.cells.1 as i32) as u32, rng.range(p.cells.0 as i32, p.cells.1 as i32) as u32)
        };
        let layout = kruskal_maze(&mut rng, w, h)?;
        let cells: Vec<(i32, i32)> = (0..h as i32).flat_map(|j| (0..w as i32).map(move |i| cell_tile(i, j))).collect();

        let mut ent = level_stream(GameId::Heist, seed, labels::ENTITIES);
        let (player, gem) = distinct_pair(&mut ent, &cells);
        let path = grid_path(&layout, player, gem, |x, y| layout.get(x, y) == Some(Tile::Open))
            .expect("spanning-tree maze is connected");

        let wanted = ent.range(p.locks.0 as i32, p.locks.1.min(3) as i32) as usize;
        let mut slots: Vec<usize> = (1..path.len() - 1).collect();
        ent.shuffle(&mut slots);
        let mut chosen: Vec<usize> = slots.into_iter().take(wanted).collect();
        chosen.sort_unstable();
        let mut colors = [0u8, 1, 2];
        ent.shuffle(&mut colors);

        let lock_tiles: Vec<(i32, i32)> = chosen.iter().map(|&i| path[i]).collect();
        let mut locks = Vec::new();
        let mut taken = vec![player, gem];
        for (j, &tile) in lock_tiles.iter().enumerate() {
            let region = reachable(&layout, player, &lock_tiles[j..]);
            let free: Vec<(i32, i32)> =
                cells.iter().copied().filter(|&(x, y)| region[layout.idx(x, y)] && !taken.contains(&(x, y))).collect();
            // No room behind the earlier locks: keep the chain that fits.
            let Some(&key) = ent.pick(&free) else { break };
            taken.push(key);
            locks.push(Lock { tile, key, color: colors[j] });
        }
        Ok(HeistLevel { layout, player, gem, locks })
    }

    /// Breadth-first search over (tile, held-key set).
    pub fn solve(&self) -> Verdict {
        let g = &self.layout;
        let n = g.cells().len();
        let lock_at = |x: i32, y: i32| self.locks.iter().find(|l| l.tile == (x, y)).map(|l| l.color);
        let key_at = |x: i32, y: i32| self.locks.iter().find(|l| l.key == (x, y)).map(|l| l.color);
        let state = |x: i32, y: i32, m: u8| (m as usize) * n + g.idx(x, y);
        let mut prev = vec![u32::MAX; n * 8];
        let start = state(self.player.0, self.player.1, 0);
        prev[start] = start as u32;
        let mut q = VecDeque::from([(self.player, 0u8)]);
        while let Some(((x, y), m)) = q.pop_front() {
            if (x, y) == self.gem {
                let mut actions = Vec::new();
                let mut s = state(x, y, m);
                while s != start {
                    let p = prev[s] as usize;
                    let (a, b) = (s % n, p % n);
                    let w = g.width() as usize;
                    let (dx, dy) = ((a % w) as i32 - (b % w) as i32, (a / w) as i32 - (b / w) as i32);
                    actions.push(move_action(dx as i8, -dy as i8));
                    s = p;
                }
                actions.reverse();
                return Verdict::Solvable(Witness::Actions(actions));
            }
            for (dx, dy) in DIRS4 {
                let (nx, ny) = (x + dx, y + dy);
                if g.get(nx, ny) != Some(Tile::Open) {
                    continue;
                }
                if let Some(c) = lock_at(nx, ny) {
                    if m & (1 << c) == 0 {
                        continue;
                    }
                }
                let nm = m | key_at(nx, ny).map_or(0, |c| 1 << c);
                let s = state(nx, ny, nm);
                if prev[s] == u32::MAX {
                    prev[s] = state(x, y, m) as u32;
                    q.push_back(((nx, ny), nm));
                }
            }
        }
        Verdict::Unsolvable
    }

    pub fn start(&self) -> HeistState {
        let mut entities = vec![Entity::at_tile(EntityKind::Goal, self.gem.0, self.gem.1)];
        for l in &self.locks {
            entities.push(Entity::at_tile(EntityKind::Lock, l.tile.0, l.tile.1).with_variant(l.color));
            entities.push(Entity::at_tile(EntityKind::Key, l.key.0, l.key.1).with_variant(l.color));
        }
        entities.push(Entity::at_tile(EntityKind::Player, self.player.0, self.player.1));
        HeistState { layout: self.layout.clone(), entities, player: self.player, held: [false; 3] }
    }
}

#[derive(Clone, Debug)]
pub struct HeistState {
    layout: GridLayout,
    entities: Vec<Entity>,
    player: (i32, i32),
    held: [bool; 3],
}

impl HeistState {
    pub fn held(&self) -> [bool; 3] {
        self.held
    }
}

impl GameLogic for HeistState {
    fn tick(&mut self, intent: Intent) -> Tick {
        let (held, ents, g) = (self.held, &self.entities, &self.layout);
        let target = grid_move(self.player, intent, |x, y| {
            g.get(x, y) == Some(Tile::Open)
                && !ents
                    .iter()
                    .any(|e| e.alive && e.kind == EntityKind::Lock && e.tile() == (x, y) && !held[e.variant as usize])
        });
        self.player = target;
        let mut won = false;
        for e in self.entities.iter_mut().filter(|e| e.alive && e.tile() == target) {
            match e.kind {
                EntityKind::Key => {
                    self.held[e.variant as usize] = true;
                    e.alive = false;
                }
                EntityKind::Lock => e.alive = false,
                EntityKind::Goal => {
                    e.alive = false;
                    won = true;
                }
                _ => {}
            }
        }
        let last = self.entities.len() - 1;
        self.entities[last] = Entity::at_tile(EntityKind::Player, target.0, target.1);
        if won {
            Tick::complete(COMPLETION_REWARD)
        } else {
            Tick::NOTHING
        }
    }

    fn scene(&self) -> Scene<'_> {
        Scene {
            layout: &self.layout,
            entities: &self.entities,
            camera: Camera::full(&self.layout, Tile::Wall),
            hud: Hud::Keys(self.held),
            patch: None,
        }
    }

    fn agent_tile(&self) -> (i32, i32) {
        self.player
    }

    fn boxed_clone(&self) -> Box<dyn GameLogic> {
        Box::new(self.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> HeistParams {
        HeistParams { cells: (5, 9), locks: (0, 3), memory_cells: 13, theme_pool: 8 }
    }

    #[test]
    fn locks_lie_on_the_gem_path_and_keys_precede_their_locks() {
        for seed in 0..300 {
            let l = HeistLevel::generate(seed, &params(), false).unwrap();
            let path = grid_path(&l.layout, l.player, l.gem, |x, y| l.layout.get(x, y) == Some(Tile::Open)).unwrap();
            let tiles: Vec<(i32, i32)> = l.locks.iter().map(|k| k.tile).collect();
            let mut last = 0;
            for (j, lock) in l.locks.iter().enumerate() {
                let at = path.iter().position(|&t| t == lock.tile).expect("lock on path");
                assert!(at > last || j == 0);
                last = at;
                let region = reachable(&l.layout, l.player, &tiles[j..]);
                assert!(region[l.layout.idx(lock.key.0, lock.key.1)], "seed {seed}: key {j} behind its lock");
            }
            assert!(l.solve().is_solvable());
        }
    }

    #[test]
    fn lock_blocks_without_key() {
        let mut layout = GridLayout::filled(5, 3, Tile::Wall);
        for x in 1..4 {
            layout.set(x, 1, Tile::Open);
        }
        let l = HeistLevel {
            layout,
            player: (1, 1),
            gem: (3, 1),
            locks: vec![Lock { tile: (2, 1), key: (9, 9), color: 0 }],
        };
        assert_eq!(l.solve(), Verdict::Unsolvable);
        let mut s = l.start();
        s.tick(Intent { dx: 1, dy: 0, special: None });
        assert_eq!(s.player, (1, 1));
    }
}
