//! Miner: dig through dirt, collect every diamond, then leave by the exit.
//!
//! Boulders and diamonds fall into free cells and roll sideways off other
//! boulders and diamonds. Anything that was already falling and lands on the
//! player ends the episode.

use serde::{Deserialize, Serialize};

use super::{grid_move, level_stream, move_action, GameId, GameLogic, Intent, Tick, COMPLETION_REWARD, NOOP};
use crate::entity::{Entity, EntityKind};
use crate::error::Result;
use crate::fixed::Fixed;
use crate::grid::{GridLayout, Tile};
use crate::levelgen::solve::best_first;
use crate::levelgen::{Fraction, Verdict};
use crate::render::{Camera, Hud, Scene};
use crate::rng::labels;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinerParams {
    pub size: (u32, u32),
    pub memory_size: (u32, u32),
    pub diamonds: u32,
    /// Share of interior cells holding a boulder, before jitter.
    pub boulders: Fraction,
    /// Boulder count varies by at most this much either way.
    pub boulder_jitter: u32,
    pub empty: Fraction,
    pub diamond_reward: i32,
    pub search_budget: usize,
    pub theme_pool: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Obj {
    None,
    Boulder,
    Diamond,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinerLevel {
    pub layout: GridLayout,
    pub objects: Vec<Obj>,
    pub player: (i32, i32),
    pub exit: (i32, i32),
    pub diamond_reward: Fixed,
    search_budget: usize,
}

fn adjacent8(a: (i32, i32), b: (i32, i32)) -> bool {
    (a.0 - b.0).abs() <= 1 && (a.1 - b.1).abs() <= 1
}

impl MinerLevel {
    pub fn generate(seed: u32, p: &MinerParams, memory: bool) -> Result<MinerLevel> {
        let (w, h) = if memory { p.memory_size } else { p.size };
        let mut layout = GridLayout::filled(w, h, Tile::Wall);
        for y in 1..h as i32 - 1 {
            for x in 1..w as i32 - 1 {
                layout.set(x, y, Tile::Dirt);
            }
        }
        let interior = layout.positions(Tile::Dirt);
        let mut rng = level_stream(GameId::Miner, seed, labels::ENTITIES);
        let player = *rng.pick(&interior).expect("interior is nonempty");
        let mut free: Vec<(i32, i32)> = interior.iter().copied().filter(|&c| !adjacent8(c, player)).collect();
        rng.shuffle(&mut free);

        let n = interior.len() as u32;
        let jitter = p.boulder_jitter as i32;
        let boulders = ((n * p.boulders.num / p.boulders.den) as i32 + rng.range(-jitter, jitter)).max(0) as usize;
        let empties = (n * p.empty.num / p.empty.den) as usize;
        let diamonds = p.diamonds as usize;

        let mut objects = vec![Obj::None; layout.cells().len()];
        let mut it = free.into_iter();
        let exit = it.next().expect("room for the exit");
        for (x, y) in it.by_ref().take(diamonds) {
            objects[layout.idx(x, y)] = Obj::Diamond;
        }
        for (x, y) in it.by_ref().take(boulders) {
            objects[layout.idx(x, y)] = Obj::Boulder;
        }
        for (x, y) in it.take(empties) {
            layout.set(x, y, Tile::Open);
        }
        layout.set(player.0, player.1, Tile::Open);
        layout.set(exit.0, exit.1, Tile::Open);
        Ok(MinerLevel {
            layout,
            objects,
            player,
            exit,
            diamond_reward: Fixed::from_int(p.diamond_reward),
            search_budget: p.search_budget,
        })
    }

    pub fn diamonds(&self) -> usize {
        self.objects.iter().filter(|o| **o == Obj::Diamond).count()
    }

    pub fn boulders(&self) -> usize {
        self.objects.iter().filter(|o| **o == Obj::Boulder).count()
    }

    pub fn start(&self) -> MinerState {
        let mut s = MinerState {
            layout: self.layout.clone(),
            objects: self.objects.clone(),
            falling: vec![false; self.objects.len()],
            moved: vec![false; self.objects.len()],
            player: self.player,
            exit: self.exit,
            left: self.diamonds(),
            diamond_reward: self.diamond_reward,
            entities: Vec::new(),
        };
        s.sync_entities();
        s
    }

    /// Best-first search over full simulation states, guided by the dig
    /// distance to the nearest remaining target.
    pub fn solve(&self) -> Verdict {
        let actions = [move_action(1, 0), move_action(-1, 0), move_action(0, 1), move_action(0, -1), NOOP];
        best_first(
            self.start(),
            &actions,
            |s, a| match s.tick(super::decode_action(a).expect("valid")).event {
                super::Event::Complete => Some(true),
                super::Event::Fail => None,
                super::Event::Continue => Some(false),
            },
            |s| (s.player, s.objects.clone(), s.falling.clone()),
            |s| s.left as i64 * 4096 + i64::from(s.target_distance()),
            1000,
            self.search_budget,
        )
    }
}

#[derive(Clone, Debug)]
pub struct MinerState {
    layout: GridLayout,
    objects: Vec<Obj>,
    falling: Vec<bool>,
    moved: Vec<bool>,
    player: (i32, i32),
    exit: (i32, i32),
    left: usize,
    diamond_reward: Fixed,
    entities: Vec<Entity>,
}

impl MinerState {
    pub fn object(&self, x: i32, y: i32) -> Obj {
        if self.layout.in_bounds(x, y) {
            self.objects[self.layout.idx(x, y)]
        } else {
            Obj::None
        }
    }

    pub fn player(&self) -> (i32, i32) {
        self.player
    }

    pub fn diamonds_left(&self) -> usize {
        self.left
    }

    /// Cell an object may move into.
    fn vacant(&self, x: i32, y: i32) -> bool {
        self.layout.get(x, y) == Some(Tile::Open)
            && self.objects[self.layout.idx(x, y)] == Obj::None
            && (x, y) != self.player
            && (x, y) != self.exit
    }

    fn shift(&mut self, from: usize, to: usize) {
        self.objects[to] = self.objects[from];
        self.objects[from] = Obj::None;
        self.falling[from] = false;
        self.falling[to] = true;
        self.moved[to] = true;
    }

    /// One gravity pass, bottom row first. Returns true if something fell on the player.
    fn gravity(&mut self) -> bool {
        let (w, h) = (self.layout.width() as i32, self.layout.height() as i32);
        self.moved.iter_mut().for_each(|m| *m = false);
        let mut crushed = false;
        for y in (1..h - 1).rev() {
            for x in 1..w - 1 {
                let i = self.layout.idx(x, y);
                if self.objects[i] == Obj::None || self.moved[i] {
                    continue;
                }
                let below = (x, y + 1);
                if self.vacant(below.0, below.1) {
                    self.shift(i, self.layout.idx(below.0, below.1));
                } else if below == self.player {
                    crushed |= self.falling[i];
                    self.falling[i] = false;
                } else if self.object(below.0, below.1) != Obj::None && !self.falling[self.layout.idx(below.0, below.1)]
                {
                    let roll = [-1, 1].into_iter().find(|dx| self.vacant(x + dx, y) && self.vacant(x + dx, y + 1));
                    match roll {
                        Some(dx) => self.shift(i, self.layout.idx(x + dx, y)),
                        None => self.falling[i] = false,
                    }
                } else {
                    self.falling[i] = false;
                }
            }
        }
        crushed
    }

    /// Dig distance to the nearest diamond, or to the exit once none remain.
    fn target_distance(&self) -> u32 {
        let g = &self.layout;
        let dist = g.bfs_distances(self.player, |t| t != Tile::Wall);
        let mut best = u32::MAX;
        for (i, d) in dist.iter().enumerate() {
            let (x, y) = ((i % g.width() as usize) as i32, (i / g.width() as usize) as i32);
            let target = if self.left > 0 { self.objects[i] == Obj::Diamond } else { (x, y) == self.exit };
            if target {
                best = best.min(*d);
            }
        }
        best.min(4095)
    }

    fn sync_entities(&mut self) {
        self.entities.clear();
        let w = self.layout.width() as usize;
        self.entities.push(Entity::at_tile(EntityKind::Exit, self.exit.0, self.exit.1));
        for (i, o) in self.objects.iter().enumerate() {
            let (x, y) = ((i % w) as i32, (i / w) as i32);
            match o {
                Obj::Boulder => self.entities.push(Entity::at_tile(EntityKind::Boulder, x, y)),
                Obj::Diamond => self.entities.push(Entity::at_tile(EntityKind::Diamond, x, y)),
                Obj::None => {}
            }
        }
        self.entities.push(Entity::at_tile(EntityKind::Player, self.player.0, self.player.1));
    }
}

impl GameLogic for MinerState {
    fn tick(&mut self, intent: Intent) -> Tick {
        let mut reward = Fixed::ZERO;
        let target = grid_move(self.player, intent, |x, y| {
            matches!(self.layout.get(x, y), Some(Tile::Open | Tile::Dirt)) && self.object(x, y) != Obj::Boulder
        });
        if target != self.player {
            let i = self.layout.idx(target.0, target.1);
            if self.objects[i] == Obj::Diamond {
                self.objects[i] = Obj::None;
                self.falling[i] = false;
                self.left -= 1;
                reward += self.diamond_reward;
            }
            self.layout.set(target.0, target.1, Tile::Open);
            self.player = target;
        }
        let complete = self.left == 0 && self.player == self.exit;
        let crushed = !complete && self.gravity();
        self.sync_entities();
        if complete {
            Tick::complete(reward + COMPLETION_REWARD)
        } else if crushed {
            Tick { reward, event: super::Event::Fail }
        } else {
            Tick::reward(reward)
        }
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
