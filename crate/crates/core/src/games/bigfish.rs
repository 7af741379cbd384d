//! BigFish: eat strictly narrower fish, avoid the rest, grow past every spawnable width.

use serde::{Deserialize, Serialize};

use super::{decode_action, level_stream, Event, GameId, GameLogic, Intent, Tick, NOOP};
use crate::entity::{Entity, EntityKind};
use crate::error::Result;
use crate::fixed::{Fixed, FixedVec, ONE_RAW};
use crate::grid::{GridLayout, Tile};
use crate::levelgen::cave::Fraction;
use crate::levelgen::{Verdict, Witness};
use crate::render::{Camera, Hud, Scene, FLIP_BIT};
use crate::rng::{labels, RngStream};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BigFishParams {
    pub world_tiles: u32,
    /// Widths in raw units; heights are three quarters of the width.
    pub start_width: i32,
    pub growth: i32,
    pub fish_width: (i32, i32),
    pub player_speed: i32,
    pub fish_speed: (i32, i32),
    pub spawn: Fraction,
    /// No spawns while this many fish are in the tank.
    pub max_fish: u32,
    pub eat_reward: i32,
    pub completion_bonus: i32,
    /// Ticks each move is held for in the oracle's plans.
    pub lookahead: u32,
    pub max_ticks: u32,
    pub theme_pool: u32,
}

impl BigFishParams {
    /// Eats needed before the player is wider than any fish that can spawn.
    pub fn eats_to_win(&self) -> i32 {
        (self.fish_width.1 - self.start_width) / self.growth + 1
    }
}

/// Layout is open water; the level itself is the spawn schedule keyed by tick.
#[derive(Clone, Debug, PartialEq)]
pub struct BigFishLevel {
    pub layout: GridLayout,
    pub spawns: RngStream,
}

impl BigFishLevel {
    pub fn generate(seed: u32, p: &BigFishParams) -> Result<BigFishLevel> {
        Ok(BigFishLevel {
            layout: GridLayout::filled(p.world_tiles, p.world_tiles, Tile::Water),
            spawns: level_stream(GameId::BigFish, seed, labels::SPAWNS),
        })
    }

    pub fn start(&self, p: &BigFishParams) -> BigFishState {
        let world = p.world_tiles as i32 * ONE_RAW;
        let h = height_of(p.start_width);
        let mut s = BigFishState {
            p: p.clone(),
            layout: self.layout.clone(),
            spawns: self.spawns,
            world,
            x: (world - p.start_width) / 2,
            y: (world - h) / 2,
            width: p.start_width,
            facing: 1,
            eaten: 0,
            fish: Vec::new(),
            ticks: 0,
            entities: Vec::new(),
        };
        s.sync_entities();
        s
    }

    /// Receding-horizon planner run through the real dynamics, retried with a
    /// few hold lengths. It never proves a level unsolvable; failure is unknown.
    pub fn solve(&self, p: &BigFishParams) -> Verdict {
        let k = p.lookahead.max(3);
        [k, k + 2, k - 2, k + 4]
            .into_iter()
            .map(|k| self.plan(p, k as usize))
            .find(Verdict::is_solvable)
            .unwrap_or(Verdict::Unknown)
    }

    /// Every move is held for `k` ticks; the best surviving two-move plan picks the next move.
    fn plan(&self, p: &BigFishParams, k: usize) -> Verdict {
        let mut s = self.start(p);
        let mut script: Vec<u8> = Vec::new();
        while script.len() < p.max_ticks as usize {
            let mut best: Option<(i64, u8)> = None;
            for a in 0..9u8 {
                let mut first = s.clone();
                match first.hold(a, k) {
                    Some(Event::Complete) => {
                        best = Some((i64::MAX, a));
                        break;
                    }
                    Some(Event::Fail) => continue,
                    _ => {}
                }
                for b in 0..9u8 {
                    let mut second = first.clone();
                    let score = match second.hold(b, k) {
                        Some(Event::Fail) => continue,
                        Some(Event::Complete) => i64::MAX - 1,
                        _ => i64::from(second.eaten) * (1 << 48) - second.distance_to_prey(),
                    };
                    if best.is_none_or(|(v, _)| score > v) {
                        best = Some((score, a));
                    }
                }
            }
            let a = best.map_or(NOOP, |(_, a)| a);
            for _ in 0..k {
                script.push(a);
                match s.tick_action(a).event {
                    Event::Complete => return Verdict::Solvable(Witness::Actions(script)),
                    Event::Fail => return Verdict::Unknown,
                    Event::Continue => {}
                }
            }
        }
        Verdict::Unknown
    }
}

fn height_of(width: i32) -> i32 {
    width * 3 / 4
}

#[derive(Clone, Debug)]
pub struct BigFishState {
    p: BigFishParams,
    layout: GridLayout,
    spawns: RngStream,
    world: i32,
    pub x: i32,
    pub y: i32,
    pub width: i32,
    facing: i32,
    pub eaten: u32,
    /// Fish bodies; `vel.x` carries the horizontal speed in raw units per tick.
    pub fish: Vec<Entity>,
    ticks: u64,
    entities: Vec<Entity>,
}

impl BigFishState {
    fn tick_action(&mut self, a: u8) -> Tick {
        self.tick(decode_action(a).expect("valid action"))
    }

    /// Repeats `a` for up to `n` ticks; `None` if the episode is still running.
    fn hold(&mut self, a: u8, n: usize) -> Option<Event> {
        for _ in 0..n {
            match self.tick_action(a).event {
                Event::Continue => {}
                e => return Some(e),
            }
        }
        None
    }

    pub fn player(&self) -> Entity {
        Entity::new(
            EntityKind::Player,
            FixedVec::from_raw(self.x, self.y),
            FixedVec::from_raw(self.width, height_of(self.width)),
        )
    }

    /// Places a fish directly, for scripted scenarios.
    pub fn push_fish(&mut self, x: i32, y: i32, width: i32, speed: i32) {
        let mut f =
            Entity::new(EntityKind::Fish, FixedVec::from_raw(x, y), FixedVec::from_raw(width, height_of(width)));
        f.vel = FixedVec::from_raw(speed, 0);
        self.fish.push(f);
    }

    fn spawn(&mut self) {
        let mut rng = self.spawns.fork(self.ticks);
        if !rng.chance(self.p.spawn.num, self.p.spawn.den) || self.fish.len() >= self.p.max_fish as usize {
            return;
        }
        // Squared uniform draw: small fish are common, large ones rare.
        let (lo, hi) = self.p.fish_width;
        let u = i64::from(rng.below(1024));
        let w = lo + ((i64::from(hi - lo) * u * u) >> 20) as i32;
        let y = rng.range(0, self.world - height_of(w));
        let speed = rng.range(self.p.fish_speed.0, self.p.fish_speed.1);
        if rng.chance(1, 2) {
            self.push_fish(-w, y, w, speed);
        } else {
            self.push_fish(self.world, y, w, -speed);
        }
    }

    /// Squared centre distance to the nearest edible fish, or to the middle of the tank.
    fn distance_to_prey(&self) -> i64 {
        let (cx, cy) = (self.x + self.width / 2, self.y + height_of(self.width) / 2);
        let d = |x: i32, y: i32| {
            let (dx, dy) = (i64::from(x - cx), i64::from(y - cy));
            dx * dx + dy * dy
        };
        self.fish
            .iter()
            .filter(|f| f.size.x.raw() < self.width && f.pos.x.raw() + f.size.x.raw() > 0 && f.pos.x.raw() < self.world)
            .map(|f| d(f.pos.x.raw() + f.size.x.raw() / 2, f.pos.y.raw() + f.size.y.raw() / 2))
            .min()
            .unwrap_or_else(|| d(self.world / 2, self.world / 2) + (1 << 40))
    }

    fn sync_entities(&mut self) {
        self.entities.clear();
        for f in &self.fish {
            let v = if f.vel.x.raw() < 0 { FLIP_BIT } else { 0 };
            self.entities.push(f.with_variant(v));
        }
        let v = if self.facing < 0 { FLIP_BIT } else { 0 };
        self.entities.push(self.player().with_variant(v));
    }
}

impl GameLogic for BigFishState {
    fn tick(&mut self, intent: Intent) -> Tick {
        self.ticks += 1;
        let sp = self.p.player_speed;
        if intent.dx != 0 {
            self.facing = i32::from(intent.dx);
        }
        let h = height_of(self.width);
        self.x = (self.x + i32::from(intent.dx) * sp).clamp(0, self.world - self.width);
        self.y = (self.y - i32::from(intent.dy) * sp).clamp(0, self.world - h);

        let world = self.world;
        for f in &mut self.fish {
            f.pos = f.pos + f.vel;
        }
        self.fish.retain(|f| {
            let x = f.pos.x.raw();
            if f.vel.x.raw() > 0 {
                x < world
            } else {
                x + f.size.x.raw() > 0
            }
        });
        self.spawn();

        let me = self.player();
        if self.fish.iter().any(|f| f.overlaps(&me) && f.size.x.raw() >= self.width) {
            self.sync_entities();
            return Tick::fail();
        }
        let before = self.fish.len();
        self.fish.retain(|f| !f.overlaps(&me));
        let mut reward = 0;
        let mut done = false;
        for _ in 0..before - self.fish.len() {
            if done {
                break;
            }
            self.eaten += 1;
            self.width += self.p.growth;
            reward += self.p.eat_reward;
            if self.width > self.p.fish_width.1 {
                reward += self.p.completion_bonus;
                done = true;
            }
        }
        let h = height_of(self.width);
        self.x = self.x.min(self.world - self.width);
        self.y = self.y.min(self.world - h);
        self.sync_entities();
        let r = Fixed::from_int(reward);
        if done {
            Tick::complete(r)
        } else {
            Tick::reward(r)
        }
    }

    fn scene(&self) -> Scene<'_> {
        Scene {
            layout: &self.layout,
            entities: &self.entities,
            camera: Camera::full(&self.layout, Tile::Water),
            hud: Hud::None,
            patch: None,
        }
    }

    fn agent_tile(&self) -> (i32, i32) {
        ((self.x + self.width / 2).div_euclid(ONE_RAW), (self.y + height_of(self.width) / 2).div_euclid(ONE_RAW))
    }

    fn boxed_clone(&self) -> Box<dyn GameLogic> {
        Box::new(self.clone())
    }
}
