//! Maze: walk the mouse to the cheese.

use serde::{Deserialize, Serialize};

use super::{grid_move, level_stream, path_to_actions, GameId, GameLogic, Intent, Tick, COMPLETION_REWARD};
use crate::entity::{Entity, EntityKind};
use crate::error::Result;
use crate::grid::{GridLayout, Tile};
use crate::levelgen::maze::cell_tile;
use crate::levelgen::solve::grid_path;
use crate::levelgen::{kruskal_maze, Verdict, Witness};
use crate::render::{Camera, Hud, Scene};
use crate::rng::labels;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MazeParams {
    /// Inclusive range each side's cell count is drawn from.
    pub cells: (u32, u32),
    pub memory_cells: u32,
    pub theme_pool: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MazeLevel {
    pub layout: GridLayout,
    pub cells: (u32, u32),
    pub player: (i32, i32),
    pub goal: (i32, i32),
}

/// Two distinct uniform picks from `items` (which must hold at least two).
pub(crate) fn distinct_pair<T: Copy>(rng: &mut crate::rng::RngStream, items: &[T]) -> (T, T) {
    let a = rng.below(items.len() as u32) as usize;
    let mut b = rng.below(items.len() as u32 - 1) as usize;
    if b >= a {
        b += 1;
    }
    (items[a], items[b])
}

impl MazeLevel {
    pub fn generate(seed: u32, p: &MazeParams, memory: bool) -> Result<MazeLevel> {
        let mut rng = level_stream(GameId::Maze, seed, labels::LAYOUT);
        let (w, h) = if memory {
            (p.memory_cells, p.memory_cells)
        } else {
            (rng.range(p.cells.0 as i32, p.cells.1 as i32) as u32, rng.range(p.cells.0 as i32, p.cells.1 as i32) as u32)
        };
        let layout = kruskal_maze(&mut rng, w, h)?;
        let cells: Vec<(i32, i32)> = (0..h as i32).flat_map(|j| (0..w as i32).map(move |i| cell_tile(i, j))).collect();
        let mut ent = level_stream(GameId::Maze, seed, labels::ENTITIES);
        let (player, goal) = distinct_pair(&mut ent, &cells);
        Ok(MazeLevel { layout, cells: (w, h), player, goal })
    }

    pub fn solve(&self) -> Verdict {
        match grid_path(&self.layout, self.player, self.goal, |x, y| self.layout.get(x, y) == Some(Tile::Open)) {
            Some(path) => Verdict::Solvable(Witness::Actions(path_to_actions(&path))),
            None => Verdict::Unsolvable,
        }
    }

    pub fn start(&self) -> MazeState {
        MazeState {
            layout: self.layout.clone(),
            entities: vec![
                Entity::at_tile(EntityKind::Goal, self.goal.0, self.goal.1),
                Entity::at_tile(EntityKind::Player, self.player.0, self.player.1),
            ],
            player: self.player,
            goal: self.goal,
        }
    }
}

#[derive(Clone, Debug)]
pub struct MazeState {
    layout: GridLayout,
    entities: Vec<Entity>,
    player: (i32, i32),
    goal: (i32, i32),
}

impl GameLogic for MazeState {
    fn tick(&mut self, intent: Intent) -> Tick {
        let g = &self.layout;
        self.player = grid_move(self.player, intent, |x, y| g.get(x, y) == Some(Tile::Open));
        self.entities[1] = Entity::at_tile(EntityKind::Player, self.player.0, self.player.1);
        if intent.dx < 0 {
            self.entities[1].variant |= crate::render::FLIP_BIT;
        }
        if self.player == self.goal {
            self.entities[0].alive = false;
            return Tick::complete(COMPLETION_REWARD);
        }
        Tick::NOTHING
    }

    fn scene(&self) -> Scene<'_> {
        Scene {
            layout: &self.layout,
            entities: &self.entities,
            camera: Camera::full(&self.layout, Tile::Wall),
            hud: Hud::None,
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
    use crate::games::{decode_action, Event};

    fn params() -> MazeParams {
        MazeParams { cells: (3, 25), memory_cells: 25, theme_pool: 16 }
    }

    #[test]
    fn mouse_and_cheese_differ_and_witness_completes() {
        for seed in 0..200 {
            let l = MazeLevel::generate(seed, &params(), false).unwrap();
            assert_ne!(l.player, l.goal);
            let Verdict::Solvable(Witness::Actions(script)) = l.solve() else { panic!("seed {seed}") };
            let mut s = l.start();
            let last = script.len() - 1;
            for (i, a) in script.iter().enumerate() {
                let t = s.tick(decode_action(*a).unwrap());
                assert_eq!(t.event == Event::Complete, i == last);
            }
        }
    }

    #[test]
    fn special_buttons_do_nothing() {
        let l = MazeLevel::generate(3, &params(), false).unwrap();
        let mut s = l.start();
        for a in 9..15 {
            assert_eq!(s.tick(decode_action(a).unwrap()), Tick::NOTHING);
            assert_eq!(s.player, l.player);
        }
    }
}
