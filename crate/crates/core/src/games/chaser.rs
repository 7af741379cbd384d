//! Chaser: eat every orb in a loopy maze while avoiding the enemies.
//!
//! Power stars make enemies vulnerable for a while. An eaten enemy leaves an
//! egg somewhere else on the map that hatches back into an enemy, so the
//! enemy population never changes.

use serde::{Deserialize, Serialize};

use super::{grid_move, level_stream, GameId, GameLogic, Intent, Tick, COMPLETION_REWARD};
use crate::entity::{Entity, EntityKind};
use crate::error::Result;
use crate::fixed::Fixed;
use crate::grid::{GridLayout, Tile, DIRS4};
use crate::levelgen::solve::grid_path;
use crate::levelgen::{kruskal_maze, remove_dead_ends, Verdict, Witness};
use crate::render::{Camera, Hud, Scene, VULNERABLE_BIT};
use crate::rng::{labels, RngStream};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChaserParams {
    pub cells: u32,
    pub enemies: u32,
    /// Enemies step once every this many ticks.
    pub enemy_period: u32,
    pub vulnerable_ticks: i32,
    pub hatch_ticks: i32,
    /// Enemy spawns keep at least this BFS distance from the player.
    pub spawn_distance: u32,
    pub egg_distance: u32,
    /// Target maximum return in 1/256 units; orbs share what the completion bonus leaves.
    pub max_return_raw: i32,
    pub theme_pool: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChaserLevel {
    pub layout: GridLayout,
    pub player: (i32, i32),
    pub stars: Vec<(i32, i32)>,
    pub enemies: Vec<(i32, i32)>,
    pub orbs: Vec<(i32, i32)>,
    pub orb_reward: Fixed,
    seed: u32,
}

pub fn quadrant(layout: &GridLayout, (x, y): (i32, i32)) -> u8 {
    let (w, h) = (layout.width() as i32, layout.height() as i32);
    u8::from(2 * x >= w) + 2 * u8::from(2 * y >= h)
}

impl ChaserLevel {
    pub fn generate(seed: u32, p: &ChaserParams) -> Result<ChaserLevel> {
        let mut rng = level_stream(GameId::Chaser, seed, labels::LAYOUT);
        let maze = kruskal_maze(&mut rng, p.cells, p.cells)?;
        let layout = remove_dead_ends(&maze, &mut rng);
        let open = layout.positions(Tile::Open);

        let mut ent = level_stream(GameId::Chaser, seed, labels::ENTITIES);
        let player = *ent.pick(&open).expect("maze has open tiles");
        let mut quads = [0u8, 1, 2, 3];
        ent.shuffle(&mut quads);
        let stars: Vec<(i32, i32)> = quads[..3]
            .iter()
            .map(|&q| {
                let pool: Vec<(i32, i32)> =
                    open.iter().copied().filter(|&t| quadrant(&layout, t) == q && t != player).collect();
                *ent.pick(&pool).expect("every quadrant of a maze has open tiles")
            })
            .collect();

        let dist = layout.bfs_distances(player, |t| t == Tile::Open);
        let far: Vec<(i32, i32)> =
            open.iter().copied().filter(|&(x, y)| dist[layout.idx(x, y)] >= p.spawn_distance).collect();
        let enemies: Vec<(i32, i32)> = (0..p.enemies).filter_map(|_| ent.pick(&far).copied()).collect();

        let orbs: Vec<(i32, i32)> = open.into_iter().filter(|t| *t != player && !stars.contains(t)).collect();
        let share = (p.max_return_raw - COMPLETION_REWARD.raw()).max(0) / orbs.len().max(1) as i32;
        Ok(ChaserLevel { layout, player, stars, enemies, orbs, orb_reward: Fixed::from_raw(share), seed })
    }

    /// Static reachability of every orb; enemies are not modelled.
    pub fn solve(&self) -> Verdict {
        let open = |x: i32, y: i32| self.layout.get(x, y) == Some(Tile::Open);
        let mut at = self.player;
        let mut tour = vec![at];
        let mut left = self.orbs.clone();
        while !left.is_empty() {
            let dist = self.layout.bfs_distances(at, |t| t == Tile::Open);
            let (i, _) =
                left.iter().enumerate().min_by_key(|(_, &(x, y))| dist[self.layout.idx(x, y)]).expect("nonempty");
            let Some(path) = grid_path(&self.layout, at, left[i], open) else {
                return Verdict::Unsolvable;
            };
            tour.extend_from_slice(&path[1..]);
            at = left.swap_remove(i);
            left.retain(|t| !path.contains(t));
        }
        Verdict::Solvable(Witness::Path(tour))
    }

    pub fn start(&self, p: &ChaserParams) -> ChaserState {
        let mut grid_items = vec![Item::None; self.layout.cells().len()];
        for &(x, y) in &self.orbs {
            grid_items[self.layout.idx(x, y)] = Item::Orb;
        }
        for &(x, y) in &self.stars {
            grid_items[self.layout.idx(x, y)] = Item::Star;
        }
        let enemies = self.enemies.iter().map(|&t| Enemy { tile: t, prev: t, egg_timer: 0 }).collect();
        let mut s = ChaserState {
            layout: self.layout.clone(),
            items: grid_items,
            orbs_left: self.orbs.len(),
            orb_reward: self.orb_reward,
            player: self.player,
            enemies,
            vulnerable: 0,
            ticks: 0,
            rng: level_stream(GameId::Chaser, self.seed, labels::DYNAMICS),
            p: p.clone(),
            entities: Vec::new(),
        };
        s.sync_entities();
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Item {
    None,
    Orb,
    Star,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Enemy {
    tile: (i32, i32),
    prev: (i32, i32),
    /// Positive while this slot is an unhatched egg.
    egg_timer: i32,
}

#[derive(Clone, Debug)]
pub struct ChaserState {
    layout: GridLayout,
    items: Vec<Item>,
    orbs_left: usize,
    orb_reward: Fixed,
    player: (i32, i32),
    enemies: Vec<Enemy>,
    vulnerable: i32,
    ticks: u32,
    rng: RngStream,
    p: ChaserParams,
    entities: Vec<Entity>,
}

impl ChaserState {
    /// Enemies plus eggs; constant over an episode.
    pub fn population(&self) -> usize {
        self.enemies.len()
    }

    pub fn active_enemies(&self) -> usize {
        self.enemies.iter().filter(|e| e.egg_timer == 0).count()
    }

    pub fn eggs(&self) -> usize {
        self.enemies.iter().filter(|e| e.egg_timer > 0).count()
    }

    fn sync_entities(&mut self) {
        self.entities.clear();
        let g = &self.layout;
        for (i, item) in self.items.iter().enumerate() {
            let (x, y) = ((i % g.width() as usize) as i32, (i / g.width() as usize) as i32);
            match item {
                Item::Orb => self.entities.push(Entity::centered_in_tile(EntityKind::Orb, x, y, Fixed::from_raw(96))),
                Item::Star => self.entities.push(Entity::at_tile(EntityKind::PowerStar, x, y)),
                Item::None => {}
            }
        }
        for e in &self.enemies {
            let kind = if e.egg_timer > 0 { EntityKind::Egg } else { EntityKind::Enemy };
            let v = if self.vulnerable > 0 { VULNERABLE_BIT } else { 0 };
            self.entities.push(Entity::at_tile(kind, e.tile.0, e.tile.1).with_variant(v));
        }
        self.entities.push(Entity::at_tile(EntityKind::Player, self.player.0, self.player.1));
    }

    /// Resolves player/enemy contact; returns true if the player died.
    fn contact(&mut self, from: (i32, i32)) -> bool {
        for i in 0..self.enemies.len() {
            let e = self.enemies[i];
            if e.egg_timer > 0 {
                continue;
            }
            // Swapping tiles with an enemy counts as meeting it.
            let met = e.tile == self.player || (e.tile == from && e.prev == self.player);
            if !met {
                continue;
            }
            if self.vulnerable == 0 {
                return true;
            }
            let dist = self.layout.bfs_distances(self.player, |t| t == Tile::Open);
            let spots: Vec<(i32, i32)> = self
                .layout
                .positions(Tile::Open)
                .into_iter()
                .filter(|&(x, y)| dist[self.layout.idx(x, y)] >= self.p.egg_distance)
                .collect();
            let spot = self.rng.pick(&spots).copied().unwrap_or(e.tile);
            self.enemies[i] = Enemy { tile: spot, prev: spot, egg_timer: self.p.hatch_ticks };
        }
        false
    }

    fn move_enemies(&mut self) {
        for i in 0..self.enemies.len() {
            let e = self.enemies[i];
            if e.egg_timer > 0 {
                continue;
            }
            let mut options = [(0, 0); 4];
            let mut n = 0;
            for (dx, dy) in DIRS4 {
                let t = (e.tile.0 + dx, e.tile.1 + dy);
                if self.layout.get(t.0, t.1) == Some(Tile::Open) && t != e.prev {
                    options[n] = t;
                    n += 1;
                }
            }
            let next = if n == 0 { e.prev } else { options[self.rng.below(n as u32) as usize] };
            self.enemies[i] = Enemy { tile: next, prev: e.tile, egg_timer: 0 };
        }
    }
}

impl GameLogic for ChaserState {
    fn tick(&mut self, intent: Intent) -> Tick {
        self.ticks += 1;
        let from = self.player;
        let g = &self.layout;
        self.player = grid_move(from, intent, |x, y| g.get(x, y) == Some(Tile::Open));

        let mut reward = Fixed::ZERO;
        let i = self.layout.idx(self.player.0, self.player.1);
        match self.items[i] {
            Item::Orb => {
                reward += self.orb_reward;
                self.orbs_left -= 1;
            }
            Item::Star => self.vulnerable = self.p.vulnerable_ticks,
            Item::None => {}
        }
        self.items[i] = Item::None;

        for e in &mut self.enemies {
            e.prev = e.tile;
        }
        if self.contact(from) {
            self.sync_entities();
            return Tick::fail();
        }
        if self.ticks.is_multiple_of(self.p.enemy_period) {
            self.move_enemies();
            if self.contact(from) {
                self.sync_entities();
                return Tick::fail();
            }
        }

        self.vulnerable = (self.vulnerable - 1).max(0);
        for e in &mut self.enemies {
            if e.egg_timer > 0 {
                e.egg_timer -= 1;
            }
        }
        self.sync_entities();
        if self.orbs_left == 0 {
            return Tick::complete(reward + COMPLETION_REWARD);
        }
        Tick::reward(reward)
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
    use crate::games::Event;

    pub(crate) fn params() -> ChaserParams {
        ChaserParams {
            cells: 6,
            enemies: 3,
            enemy_period: 2,
            vulnerable_ticks: 40,
            hatch_ticks: 30,
            spawn_distance: 6,
            egg_distance: 5,
            max_return_raw: 3635,
            theme_pool: 8,
        }
    }

    #[test]
    fn stars_occupy_distinct_quadrants() {
        for seed in 0..300 {
            let l = ChaserLevel::generate(seed, &params()).unwrap();
            let mut q: Vec<u8> = l.stars.iter().map(|&s| quadrant(&l.layout, s)).collect();
            q.sort_unstable();
            q.dedup();
            assert_eq!(q.len(), 3, "seed {seed}");
        }
    }

    #[test]
    fn full_clear_stays_within_target_return() {
        let p = params();
        for seed in 0..50 {
            let l = ChaserLevel::generate(seed, &p).unwrap();
            let total = l.orb_reward.raw() * l.orbs.len() as i32 + COMPLETION_REWARD.raw();
            assert!(total <= p.max_return_raw);
            assert!(p.max_return_raw - total < l.orbs.len() as i32);
        }
    }

    #[test]
    fn eaten_enemy_returns_as_egg_then_hatches() {
        let p = params();
        let l = ChaserLevel::generate(5, &p).unwrap();
        let mut s = l.start(&p);
        s.vulnerable = 100;
        let initial = s.active_enemies();
        // Drop an enemy onto the player.
        s.enemies[0].tile = s.player;
        assert!(!s.contact(s.player));
        assert_eq!(s.eggs(), 1);
        assert_eq!(s.population(), initial);
        for _ in 0..p.hatch_ticks {
            if s.tick(Intent::default()).event == Event::Fail {
                return;
            }
        }
        assert_eq!(s.eggs(), 0);
        assert_eq!(s.active_enemies(), initial);
    }

    #[test]
    fn touching_a_hard_enemy_kills() {
        let p = params();
        let l = ChaserLevel::generate(6, &p).unwrap();
        let mut s = l.start(&p);
        s.enemies[0].tile = s.player;
        assert!(s.contact(s.player));
    }
}
