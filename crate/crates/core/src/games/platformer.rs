//! Shared running state of the two side-scrolling platformers.

use crate::entity::{Entity, EntityKind};
use crate::fixed::{Angle, Fixed, FixedVec, ONE_RAW};
use crate::grid::{GridLayout, Tile};
use crate::levelgen::solve::{body_hits, RawBox};
use crate::levelgen::{Placement, PlatformLevel};
use crate::physics::{solid_at, Body, BodyParams};
use crate::render::{Camera, Hud, Scene, FLIP_BIT};

use super::{Intent, Tick, COMPLETION_REWARD};

/// Grid-locked enemy walking back and forth over columns `lo..=hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pacer {
    pub lo: i32,
    pub hi: i32,
    pub row: i32,
    pub col: i32,
    pub dir: i32,
}

impl Pacer {
    pub fn from_placement(p: &Placement) -> Pacer {
        Pacer { lo: p.span.0, hi: p.span.1, row: p.tile.1, col: p.span.0, dir: 1 }
    }

    pub fn advance(&mut self) {
        if self.lo == self.hi {
            return;
        }
        if self.col + self.dir > self.hi || self.col + self.dir < self.lo {
            self.dir = -self.dir;
        }
        self.col += self.dir;
    }

    pub fn hitbox(&self) -> RawBox {
        (self.col * ONE_RAW, self.row * ONE_RAW, (self.col + 1) * ONE_RAW, (self.row + 1) * ONE_RAW)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Star {
    pub pos: FixedVec,
    pub vel: FixedVec,
    pub ttl: i32,
}

pub const STAR_SIZE: i32 = 64;

#[derive(Clone, Debug)]
pub struct PlatformerState {
    pub layout: GridLayout,
    pub body_params: BodyParams,
    pub body: Body,
    pub pacers: Vec<Pacer>,
    pub pacer_period: u32,
    pub bombs: Vec<RawBox>,
    pub star: Option<Star>,
    pub star_speed: i32,
    pub star_ttl: i32,
    pub goal: RawBox,
    pub camera_tiles: i32,
    pub ticks: u32,
    saws: Vec<(i32, i32)>,
    entities: Vec<Entity>,
}

pub fn tile_box((x, y): (i32, i32)) -> RawBox {
    (x * ONE_RAW, y * ONE_RAW, (x + 1) * ONE_RAW, (y + 1) * ONE_RAW)
}

fn boxes_meet(a: &RawBox, b: &RawBox) -> bool {
    a.0 < b.2 && b.0 < a.2 && a.1 < b.3 && b.1 < a.3
}

impl PlatformerState {
    pub fn new(level: &PlatformLevel, body_params: BodyParams, camera_tiles: i32) -> PlatformerState {
        let goal = level.placements.iter().find(|p| p.kind == EntityKind::Goal).expect("goal placed");
        let body = Body::standing_at(level.spawn.0, level.spawn.1, &body_params);
        let mut s = PlatformerState {
            layout: level.layout.clone(),
            body_params,
            body,
            pacers: Vec::new(),
            pacer_period: 1,
            bombs: Vec::new(),
            star: None,
            star_speed: 0,
            star_ttl: 0,
            goal: tile_box(goal.tile),
            camera_tiles,
            ticks: 0,
            saws: level.layout.positions(Tile::Hazard),
            entities: Vec::new(),
        };
        s.sync_entities();
        s
    }

    /// Whether the body touches a hazard tile.
    fn touches_hazard(&self) -> bool {
        let ((x0, x1), (y0, y1)) = self.body.tile_span(&self.body_params);
        (y0..=y1).any(|y| (x0..=x1).any(|x| self.layout.get(x, y) == Some(Tile::Hazard)))
    }

    fn throw(&mut self, special: u8) {
        if self.star.is_some() || self.star_speed == 0 || special > 3 {
            return;
        }
        let forward: [u8; 4] = [0, 32, 64, 224];
        let a = forward[special as usize];
        let angle = if self.body.facing < 0 { Angle(128u8.wrapping_sub(a)) } else { Angle(a) };
        let d = angle.direction();
        let vel = FixedVec::from_raw(d.x.raw() * self.star_speed / ONE_RAW, d.y.raw() * self.star_speed / ONE_RAW);
        let p = &self.body_params;
        let pos = FixedVec::from_raw(
            self.body.pos.x.raw() + (p.width - STAR_SIZE) / 2,
            self.body.pos.y.raw() + (p.height - STAR_SIZE) / 2,
        );
        self.star = Some(Star { pos, vel, ttl: self.star_ttl });
    }

    fn move_star(&mut self) {
        let Some(mut s) = self.star else { return };
        s.pos = s.pos + s.vel;
        s.ttl -= 1;
        let b = (s.pos.x.raw(), s.pos.y.raw(), s.pos.x.raw() + STAR_SIZE, s.pos.y.raw() + STAR_SIZE);
        let (cx, cy) = ((b.0 + STAR_SIZE / 2).div_euclid(ONE_RAW), (b.1 + STAR_SIZE / 2).div_euclid(ONE_RAW));
        let mut alive = s.ttl > 0 && !solid_at(&self.layout, cx, cy);
        if alive {
            if let Some(i) = self.bombs.iter().position(|bomb| boxes_meet(bomb, &b)) {
                self.bombs.remove(i);
                alive = false;
            }
        }
        self.star = alive.then_some(s);
    }

    pub fn tick(&mut self, intent: Intent) -> Tick {
        self.ticks += 1;
        if let Some(sp) = intent.special {
            self.throw(sp);
        }
        let p = self.body_params;
        self.body.step(intent.dx, intent.dy, &p, &self.layout);
        self.move_star();
        if self.ticks.is_multiple_of(self.pacer_period) {
            self.pacers.iter_mut().for_each(Pacer::advance);
        }
        let dead = self.body.pos.y.raw() >= self.layout.height() as i32 * ONE_RAW
            || self.touches_hazard()
            || self.pacers.iter().any(|e| body_hits(&self.body, &p, &e.hitbox()))
            || self.bombs.iter().any(|b| body_hits(&self.body, &p, b));
        let won = body_hits(&self.body, &p, &self.goal);
        self.sync_entities();
        if dead {
            Tick::fail()
        } else if won {
            Tick::complete(COMPLETION_REWARD)
        } else {
            Tick::NOTHING
        }
    }

    fn sync_entities(&mut self) {
        self.entities.clear();
        let rect = |kind, b: &RawBox| {
            Entity::new(kind, FixedVec::from_raw(b.0, b.1), FixedVec::from_raw(b.2 - b.0, b.3 - b.1))
        };
        for &(x, y) in &self.saws {
            self.entities.push(Entity::at_tile(EntityKind::Saw, x, y));
        }
        self.entities.push(rect(EntityKind::Goal, &self.goal));
        for e in &self.pacers {
            let v = if e.dir < 0 { FLIP_BIT } else { 0 };
            self.entities.push(rect(EntityKind::Enemy, &e.hitbox()).with_variant(v));
        }
        for b in &self.bombs {
            self.entities.push(rect(EntityKind::Bomb, b));
        }
        if let Some(s) = self.star {
            self.entities.push(Entity::new(EntityKind::Shuriken, s.pos, FixedVec::from_raw(STAR_SIZE, STAR_SIZE)));
        }
        let p = &self.body_params;
        let v = if self.body.facing < 0 { FLIP_BIT } else { 0 };
        self.entities.push(
            Entity::new(
                EntityKind::Player,
                self.body.pos,
                FixedVec::new(Fixed::from_raw(p.width), Fixed::from_raw(p.height)),
            )
            .with_variant(v),
        );
    }

    pub fn scene(&self) -> Scene<'_> {
        let p = &self.body_params;
        let (cx, cy) = (self.body.pos.x.raw() + p.width / 2, self.body.pos.y.raw() + p.height / 2);
        Scene {
            layout: &self.layout,
            entities: &self.entities,
            camera: Camera::follow(&self.layout, cx, cy, self.camera_tiles, Tile::Open),
            hud: Hud::None,
            patch: None,
        }
    }

    pub fn agent_tile(&self) -> (i32, i32) {
        let p = &self.body_params;
        (
            (self.body.pos.x.raw() + p.width / 2).div_euclid(ONE_RAW),
            (self.body.pos.y.raw() + p.height / 2).div_euclid(ONE_RAW),
        )
    }
}
