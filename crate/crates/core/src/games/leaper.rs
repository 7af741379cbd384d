//! Leaper: cross the road lanes, then hop log to log across the river.
//!
//! Each lane is a cyclic occupancy pattern that shifts one tile every
//! `period` ticks. A player standing on a log is carried with it; being
//! carried out of the world, entering water without a log or sharing a
//! tile with a car ends the episode.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::{level_stream, move_action, GameId, GameLogic, Intent, Tick, COMPLETION_REWARD};
use crate::entity::{Entity, EntityKind};
use crate::error::Result;
use crate::grid::{GridLayout, Tile};
use crate::levelgen::{Verdict, Witness};
use crate::render::{Camera, Hud, Scene, FLIP_BIT};
use crate::rng::{labels, RngStream};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeaperParams {
    /// Lane width in tiles (at most 16).
    pub width: u32,
    /// Shared difficulty draw behind both lane counts.
    pub latent: (i32, i32),
    /// Per-count independent offset, drawn from `-noise..=noise`.
    pub noise: i32,
    pub lanes: (i32, i32),
    pub car_period: (u32, u32),
    pub log_period: (u32, u32),
    pub car_length: (u32, u32),
    pub car_gap: (u32, u32),
    pub log_length: (u32, u32),
    pub log_gap: (u32, u32),
    pub theme_pool: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lane {
    pub row: i32,
    pub water: bool,
    pub dir: i32,
    pub period: u32,
    /// Bit `i` set where a car or log covers column `i` at time zero.
    pub pattern: u16,
}

impl Lane {
    /// Occupancy of column `c` after `t` ticks.
    #[inline]
    pub fn occupied(&self, c: i32, t: u32, width: i32) -> bool {
        let shift = (t / self.period) as i64;
        let i = (i64::from(c) - i64::from(self.dir) * shift).rem_euclid(i64::from(width));
        self.pattern & (1 << i) != 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeaperLevel {
    pub layout: GridLayout,
    pub lanes: Vec<Lane>,
    pub road_lanes: u32,
    pub water_lanes: u32,
    pub start: (i32, i32),
}

fn pattern(rng: &mut RngStream, width: u32, len: (u32, u32), gap: (u32, u32)) -> u16 {
    let mut bits = 0u16;
    let mut x = rng.below(gap.1 + 1);
    while x < width {
        let l = rng.range(len.0 as i32, len.1 as i32) as u32;
        for i in x..(x + l).min(width) {
            bits |= 1 << i;
        }
        x += l + rng.range(gap.0 as i32, gap.1 as i32) as u32;
    }
    bits
}

fn lcm(a: u32, b: u32) -> u32 {
    fn gcd(a: u32, b: u32) -> u32 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

impl LeaperLevel {
    pub fn generate(seed: u32, p: &LeaperParams) -> Result<LeaperLevel> {
        assert!(p.width <= 16, "lane patterns are 16 bits wide");
        let mut rng = level_stream(GameId::Leaper, seed, labels::LAYOUT);
        let latent = rng.range(p.latent.0, p.latent.1);
        let road = (latent + rng.range(-p.noise, p.noise)).clamp(p.lanes.0, p.lanes.1) as u32;
        let water = (latent + rng.range(-p.noise, p.noise)).clamp(p.lanes.0, p.lanes.1) as u32;
        let height = road + water + 3;
        let mut layout = GridLayout::filled(p.width, height, Tile::Open);
        let median = water as i32 + 1;

        let mut spawns = level_stream(GameId::Leaper, seed, labels::SPAWNS);
        let mut lanes = Vec::new();
        for row in 1..=water as i32 {
            let period = spawns.range(p.log_period.0 as i32, p.log_period.1 as i32) as u32;
            let dir = if spawns.chance(1, 2) { 1 } else { -1 };
            let pattern = pattern(&mut spawns, p.width, p.log_length, p.log_gap);
            lanes.push(Lane { row, water: true, dir, period, pattern });
        }
        for row in median + 1..=median + road as i32 {
            let period = spawns.range(p.car_period.0 as i32, p.car_period.1 as i32) as u32;
            let dir = if spawns.chance(1, 2) { 1 } else { -1 };
            let pattern = pattern(&mut spawns, p.width, p.car_length, p.car_gap);
            lanes.push(Lane { row, water: false, dir, period, pattern });
        }
        for l in &lanes {
            for x in 0..p.width as i32 {
                layout.set(x, l.row, if l.water { Tile::Water } else { Tile::Road });
            }
        }
        let start = (p.width as i32 / 2, height as i32 - 1);
        Ok(LeaperLevel { layout, lanes, road_lanes: road, water_lanes: water, start })
    }

    fn lane_at(&self, row: i32) -> Option<&Lane> {
        self.lanes.iter().find(|l| l.row == row)
    }

    /// Transition of the oracle's abstract state, written from the rules
    /// rather than by calling the engine.
    fn successor(&self, (r, c): (i32, i32), t: u32, dx: i32, dy: i32) -> Option<(i32, i32)> {
        let w = self.layout.width() as i32;
        let h = self.layout.height() as i32;
        let (mut r2, mut c2) = (r, c);
        if dx != 0 && (0..w).contains(&(c + dx)) {
            c2 = c + dx;
        } else if dy != 0 && (0..h).contains(&(r - dy)) {
            r2 = r - dy;
        }
        if let Some(l) = self.lane_at(r2) {
            if l.water && t / l.period != (t + 1) / l.period && l.occupied(c2, t, w) {
                c2 += l.dir;
            }
            if !(0..w).contains(&c2) {
                return None;
            }
            if l.occupied(c2, t + 1, w) != l.water {
                return None;
            }
        }
        Some((r2, c2))
    }

    /// Breadth-first search over (row, column, time mod lane cycle).
    pub fn solve(&self) -> Verdict {
        let w = self.layout.width() as i32;
        let h = self.layout.height() as i32;
        let cycle = self.lanes.iter().fold(1u32, |acc, l| lcm(acc, l.period)) * w as u32;
        let n = (w * h) as usize * cycle as usize;
        let id =
            |(r, c): (i32, i32), t: u32| ((t % cycle) as usize * h as usize + r as usize) * w as usize + c as usize;
        let moves: [(i32, i32); 5] = [(0, 1), (1, 0), (-1, 0), (0, -1), (0, 0)];
        let mut prev: Vec<u32> = vec![u32::MAX; n];
        let mut how: Vec<u8> = vec![0; n];
        let s0 = id((self.start.1, self.start.0), 0);
        prev[s0] = s0 as u32;
        let mut q = VecDeque::from([((self.start.1, self.start.0), 0u32)]);
        while let Some((pos, t)) = q.pop_front() {
            if t >= 1000 {
                break;
            }
            for (dx, dy) in moves {
                let Some(next) = self.successor(pos, t, dx, dy) else { continue };
                let s = id(next, t + 1);
                if prev[s] != u32::MAX {
                    continue;
                }
                prev[s] = id(pos, t) as u32;
                how[s] = move_action(dx as i8, dy as i8);
                if next.0 == 0 {
                    let mut script = Vec::new();
                    let mut cur = s;
                    while cur != s0 {
                        script.push(how[cur]);
                        cur = prev[cur] as usize;
                    }
                    script.reverse();
                    return Verdict::Solvable(Witness::Actions(script));
                }
                q.push_back((next, t + 1));
            }
        }
        Verdict::Unsolvable
    }

    pub fn start(&self) -> LeaperState {
        let mut s = LeaperState {
            layout: self.layout.clone(),
            lanes: self.lanes.clone(),
            player: self.start,
            facing: 0,
            t: 0,
            entities: Vec::new(),
        };
        s.sync_entities();
        s
    }
}

#[derive(Clone, Debug)]
pub struct LeaperState {
    layout: GridLayout,
    lanes: Vec<Lane>,
    player: (i32, i32),
    facing: u8,
    t: u32,
    entities: Vec<Entity>,
}

impl LeaperState {
    pub fn player(&self) -> (i32, i32) {
        self.player
    }

    fn sync_entities(&mut self) {
        self.entities.clear();
        let w = self.layout.width() as i32;
        for l in &self.lanes {
            let kind = if l.water { EntityKind::Log } else { EntityKind::Car };
            let v = if l.dir < 0 { FLIP_BIT } else { 0 };
            for x in 0..w {
                if l.occupied(x, self.t, w) {
                    self.entities.push(Entity::at_tile(kind, x, l.row).with_variant(v));
                }
            }
        }
        self.entities.push(Entity::at_tile(EntityKind::Player, self.player.0, self.player.1).with_variant(self.facing));
    }
}

impl GameLogic for LeaperState {
    fn tick(&mut self, intent: Intent) -> Tick {
        let w = self.layout.width() as i32;
        let h = self.layout.height() as i32;
        let (mut x, mut y) = self.player;
        let dx = i32::from(intent.dx);
        let dy = i32::from(intent.dy);
        if dx != 0 && (0..w).contains(&(x + dx)) {
            x += dx;
            self.facing = if dx < 0 { FLIP_BIT } else { 0 };
        } else if dy != 0 && (0..h).contains(&(y - dy)) {
            y -= dy;
        }

        let before = self.t;
        self.t += 1;
        let mut dead = false;
        if let Some(lane) = self.lanes.iter().find(|l| l.row == y) {
            let shifted = before / lane.period != self.t / lane.period;
            if lane.water && shifted && lane.occupied(x, before, w) {
                x += lane.dir;
            }
            dead = !(0..w).contains(&x) || lane.occupied(x, self.t, w) != lane.water;
        }
        self.player = (x.clamp(0, w - 1), y);
        self.sync_entities();
        if dead {
            Tick::fail()
        } else if y == 0 {
            Tick::complete(COMPLETION_REWARD)
        } else {
            Tick::NOTHING
        }
    }

    fn scene(&self) -> Scene<'_> {
        Scene {
            layout: &self.layout,
            entities: &self.entities,
            camera: Camera::full(&self.layout, Tile::Open),
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
