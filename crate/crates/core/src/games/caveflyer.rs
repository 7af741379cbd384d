//! CaveFlyer: steer a rotating ship through a cave to the friendly ship, lasering targets on the way.

use serde::{Deserialize, Serialize};

use super::{level_stream, move_action, Event, GameId, GameLogic, Intent, Tick, COMPLETION_REWARD};
use crate::entity::{Entity, EntityKind};
use crate::error::Result;
use crate::fixed::{Angle, Fixed, FixedVec, ONE_RAW};
use crate::grid::{GridLayout, Tile};
use crate::levelgen::cave::{cellular_automata_cave, CaveParams};
use crate::levelgen::solve::{grid_path, RawBox};
use crate::levelgen::{Verdict, Witness};
use crate::render::{Camera, Hud, Scene, FLIP_BIT};
use crate::rng::labels;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaveFlyerParams {
    pub size: (u32, u32),
    pub memory_size: (u32, u32),
    pub cave: CaveParams,
    /// Side of the ship's square hitbox, raw units.
    pub ship_size: i32,
    /// Heading change per turning tick, in 1/256ths of a revolution.
    pub turn_rate: i32,
    /// Distance per thrusting tick, raw units; must divide a tile.
    pub thrust: i32,
    /// Route length to the goal, in tiles.
    pub goal_distance: (u32, u32),
    pub targets: u32,
    pub target_reward_raw: i32,
    pub obstacles: u32,
    pub movers: u32,
    pub track_len: (u32, u32),
    pub mover_speed: i32,
    pub laser_speed: i32,
    pub laser_ttl: i32,
    pub camera_tiles: i32,
    pub max_ticks: u32,
    pub theme_pool: u32,
}

impl CaveFlyerParams {
    /// Best possible return: every target plus the goal.
    pub fn max_return(&self) -> Fixed {
        Fixed::from_raw(self.targets as i32 * self.target_reward_raw) + COMPLETION_REWARD
    }
}

/// Horizontal run of tiles `lo..=hi` in `row` patrolled by one obstacle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Track {
    pub row: i32,
    pub lo: i32,
    pub hi: i32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CaveFlyerLevel {
    pub layout: GridLayout,
    pub start: (i32, i32),
    pub goal: (i32, i32),
    pub targets: Vec<(i32, i32)>,
    pub obstacles: Vec<(i32, i32)>,
    pub tracks: Vec<Track>,
}

const HEADINGS: [((i32, i32), u8); 4] = [((1, 0), 0), ((0, -1), 64), ((-1, 0), 128), ((0, 1), 192)];

impl CaveFlyerLevel {
    pub fn generate(seed: u32, p: &CaveFlyerParams, memory: bool) -> Result<CaveFlyerLevel> {
        // Memory variant: a larger world that keeps its side pockets.
        let (w, h) = if memory { p.memory_size } else { p.size };
        let cave = CaveParams { prune: p.cave.prune && !memory, ..p.cave };
        let layout = cellular_automata_cave(&level_stream(GameId::CaveFlyer, seed, labels::LAYOUT), w, h, &cave)?;
        let mut rng = level_stream(GameId::CaveFlyer, seed, labels::ENTITIES);
        let open = layout.positions(Tile::Open);
        let start = *rng.pick(&open).expect("cave has open cells");
        let dist = layout.bfs_distances(start, |t| t == Tile::Open);
        let (lo, hi) = p.goal_distance;
        let mut far: Vec<(i32, i32)> =
            open.iter().copied().filter(|&(x, y)| (lo..=hi).contains(&dist[layout.idx(x, y)])).collect();
        if far.is_empty() {
            let best = open.iter().map(|&(x, y)| dist[layout.idx(x, y)]).filter(|&d| d <= hi).max().unwrap_or(0);
            far = open.iter().copied().filter(|&(x, y)| dist[layout.idx(x, y)] == best).collect();
        }
        let goal = *rng.pick(&far).expect("start itself qualifies");

        let mut level =
            CaveFlyerLevel { layout, start, goal, targets: Vec::new(), obstacles: Vec::new(), tracks: Vec::new() };
        let mut blocked = vec![false; level.layout.cells().len()];
        let near_start = |(x, y): (i32, i32)| (x - start.0).abs() <= 1 && (y - start.1).abs() <= 1;
        let free = |blocked: &[bool], t: (i32, i32), lv: &CaveFlyerLevel| {
            lv.layout.get(t.0, t.1) == Some(Tile::Open)
                && !blocked[lv.layout.idx(t.0, t.1)]
                && !near_start(t)
                && t != goal
        };

        for _ in 0..p.obstacles {
            let t = *rng.pick(&open).expect("open");
            if free(&blocked, t, &level) && level.keeps_route(&blocked, &[t]) {
                blocked[level.layout.idx(t.0, t.1)] = true;
                level.obstacles.push(t);
            }
        }
        for _ in 0..p.movers {
            let t = *rng.pick(&open).expect("open");
            let len = rng.range(p.track_len.0 as i32, p.track_len.1 as i32);
            let mut tiles = Vec::new();
            let mut x = t.0;
            while tiles.len() < len as usize && free(&blocked, (x, t.1), &level) {
                tiles.push((x, t.1));
                x += 1;
            }
            if tiles.len() >= 2 && level.keeps_route(&blocked, &tiles) {
                for &(x, y) in &tiles {
                    blocked[level.layout.idx(x, y)] = true;
                }
                level.tracks.push(Track { row: t.1, lo: t.0, hi: x - 1 });
            }
        }
        let mut tries = 0;
        while (level.targets.len() as u32) < p.targets && tries < 64 * p.targets.max(1) {
            tries += 1;
            let t = *rng.pick(&open).expect("open");
            if free(&blocked, t, &level) && t != start && !level.targets.contains(&t) {
                level.targets.push(t);
            }
        }
        Ok(level)
    }

    fn hazard_mask(&self) -> Vec<bool> {
        let mut m = vec![false; self.layout.cells().len()];
        for &(x, y) in &self.obstacles {
            m[self.layout.idx(x, y)] = true;
        }
        for t in &self.tracks {
            for x in t.lo..=t.hi {
                m[self.layout.idx(x, t.row)] = true;
            }
        }
        m
    }

    fn keeps_route(&self, blocked: &[bool], extra: &[(i32, i32)]) -> bool {
        let g = &self.layout;
        grid_path(g, self.start, self.goal, |x, y| {
            g.get(x, y) == Some(Tile::Open) && !blocked[g.idx(x, y)] && !extra.contains(&(x, y))
        })
        .is_some()
    }

    pub fn start(&self, p: &CaveFlyerParams) -> CaveFlyerState {
        let inset = (ONE_RAW - p.ship_size) / 2;
        let mut s = CaveFlyerState {
            p: p.clone(),
            layout: self.layout.clone(),
            x: self.start.0 * ONE_RAW + inset,
            y: self.start.1 * ONE_RAW + inset,
            heading: Angle(0),
            laser: None,
            goal: self.goal,
            targets: self.targets.clone(),
            obstacles: self.obstacles.clone(),
            movers: self.tracks.iter().map(|t| Mover { track: *t, x: t.lo * ONE_RAW, dir: 1 }).collect(),
            entities: Vec::new(),
        };
        s.sync_entities();
        s
    }

    /// Shortest tile route avoiding every obstacle and track tile, flown along
    /// tile centres by turning in place and thrusting whole tiles.
    pub fn solve(&self, p: &CaveFlyerParams) -> Verdict {
        let hazard = self.hazard_mask();
        let g = &self.layout;
        let Some(path) =
            grid_path(g, self.start, self.goal, |x, y| g.get(x, y) == Some(Tile::Open) && !hazard[g.idx(x, y)])
        else {
            return Verdict::Unknown;
        };
        let script = flight_plan(&path, p);
        if script.len() > p.max_ticks as usize {
            return Verdict::Unknown;
        }
        Verdict::Solvable(Witness::Actions(script))
    }
}

/// Rotate-then-thrust actions flying a 4-connected tile path from heading 0.
pub fn flight_plan(path: &[(i32, i32)], p: &CaveFlyerParams) -> Vec<u8> {
    let mut heading: u8 = 0;
    let mut out = Vec::new();
    let per_tile = (ONE_RAW / p.thrust) as usize;
    let per_quarter = (64 / p.turn_rate) as usize;
    for w in path.windows(2) {
        let d = (w[1].0 - w[0].0, w[1].1 - w[0].1);
        let want = HEADINGS.iter().find(|h| h.0 == d).expect("4-connected").1;
        let diff = want.wrapping_sub(heading);
        let thrust = match diff {
            0 => move_action(0, 1),
            128 => move_action(0, -1),
            64 => {
                out.extend(std::iter::repeat_n(move_action(-1, 0), per_quarter));
                heading = want;
                move_action(0, 1)
            }
            _ => {
                out.extend(std::iter::repeat_n(move_action(1, 0), per_quarter));
                heading = want;
                move_action(0, 1)
            }
        };
        out.extend(std::iter::repeat_n(thrust, per_tile));
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Mover {
    pub track: Track,
    pub x: i32,
    pub dir: i32,
}

impl Mover {
    fn advance(&mut self, speed: i32) {
        let (lo, hi) = (self.track.lo * ONE_RAW, self.track.hi * ONE_RAW);
        let nx = self.x + self.dir * speed;
        if nx < lo || nx > hi {
            self.dir = -self.dir;
            self.x = (self.x + self.dir * speed).clamp(lo, hi);
        } else {
            self.x = nx;
        }
    }

    fn hitbox(&self) -> RawBox {
        let y = self.track.row * ONE_RAW;
        (self.x, y, self.x + ONE_RAW, y + ONE_RAW)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Laser {
    pub x: i32,
    pub y: i32,
    pub vx: i32,
    pub vy: i32,
    pub ttl: i32,
}

pub const LASER_SIZE: i32 = 32;
pub const TARGET_SIZE: i32 = 192;

#[derive(Clone, Debug)]
pub struct CaveFlyerState {
    p: CaveFlyerParams,
    layout: GridLayout,
    /// Ship hitbox top-left, raw units.
    pub x: i32,
    pub y: i32,
    pub heading: Angle,
    pub laser: Option<Laser>,
    goal: (i32, i32),
    pub targets: Vec<(i32, i32)>,
    obstacles: Vec<(i32, i32)>,
    pub movers: Vec<Mover>,
    entities: Vec<Entity>,
}

fn meets(a: RawBox, b: RawBox) -> bool {
    a.0 < b.2 && b.0 < a.2 && a.1 < b.3 && b.1 < a.3
}

fn inset_tile_box((x, y): (i32, i32), size: i32) -> RawBox {
    let i = (ONE_RAW - size) / 2;
    (x * ONE_RAW + i, y * ONE_RAW + i, x * ONE_RAW + i + size, y * ONE_RAW + i + size)
}

fn full_tile((x, y): (i32, i32)) -> RawBox {
    (x * ONE_RAW, y * ONE_RAW, (x + 1) * ONE_RAW, (y + 1) * ONE_RAW)
}

impl CaveFlyerState {
    fn ship_box(&self) -> RawBox {
        (self.x, self.y, self.x + self.p.ship_size, self.y + self.p.ship_size)
    }

    fn hits_wall(&self, b: RawBox) -> bool {
        let (x0, x1) = (b.0.div_euclid(ONE_RAW), (b.2 - 1).div_euclid(ONE_RAW));
        let (y0, y1) = (b.1.div_euclid(ONE_RAW), (b.3 - 1).div_euclid(ONE_RAW));
        (y0..=y1).any(|y| (x0..=x1).any(|x| self.layout.get_or(x, y, Tile::Wall) == Tile::Wall))
    }

    fn fire(&mut self) {
        if self.laser.is_some() {
            return;
        }
        let d = self.heading.direction();
        let c = (self.x + self.p.ship_size / 2, self.y + self.p.ship_size / 2);
        self.laser = Some(Laser {
            x: c.0 - LASER_SIZE / 2,
            y: c.1 - LASER_SIZE / 2,
            vx: d.x.raw() * self.p.laser_speed / ONE_RAW,
            vy: d.y.raw() * self.p.laser_speed / ONE_RAW,
            ttl: self.p.laser_ttl,
        });
    }

    /// Moves the laser; returns the reward for any target it destroys.
    fn move_laser(&mut self) -> i32 {
        let Some(mut l) = self.laser else { return 0 };
        l.x += l.vx;
        l.y += l.vy;
        l.ttl -= 1;
        let b = (l.x, l.y, l.x + LASER_SIZE, l.y + LASER_SIZE);
        self.laser = None;
        if l.ttl <= 0 || self.hits_wall(b) {
            return 0;
        }
        if self.obstacles.iter().any(|&t| meets(b, full_tile(t))) || self.movers.iter().any(|m| meets(b, m.hitbox())) {
            return 0;
        }
        if let Some(i) = self.targets.iter().position(|&t| meets(b, inset_tile_box(t, TARGET_SIZE))) {
            self.targets.remove(i);
            return self.p.target_reward_raw;
        }
        self.laser = Some(l);
        0
    }

    fn sync_entities(&mut self) {
        self.entities.clear();
        let sized =
            |kind, b: RawBox| Entity::new(kind, FixedVec::from_raw(b.0, b.1), FixedVec::from_raw(b.2 - b.0, b.3 - b.1));
        self.entities.push(sized(EntityKind::Goal, full_tile(self.goal)));
        for &t in &self.targets {
            self.entities.push(sized(EntityKind::Target, inset_tile_box(t, TARGET_SIZE)));
        }
        for &t in &self.obstacles {
            self.entities.push(sized(EntityKind::Obstacle, full_tile(t)));
        }
        for m in &self.movers {
            self.entities.push(sized(EntityKind::Obstacle, m.hitbox()));
        }
        if let Some(l) = self.laser {
            self.entities.push(sized(EntityKind::Laser, (l.x, l.y, l.x + LASER_SIZE, l.y + LASER_SIZE)));
        }
        let v = if self.heading.cos().raw() < 0 { FLIP_BIT } else { 0 };
        self.entities.push(sized(EntityKind::Player, self.ship_box()).with_variant(v));
    }
}

impl GameLogic for CaveFlyerState {
    fn tick(&mut self, intent: Intent) -> Tick {
        self.heading = self.heading.rotate(-i32::from(intent.dx) * self.p.turn_rate);
        if intent.dy != 0 {
            let d = self.heading.direction();
            let k = i32::from(intent.dy) * self.p.thrust;
            self.x += d.x.raw() * k / ONE_RAW;
            self.y += d.y.raw() * k / ONE_RAW;
        }
        if intent.special.is_some() {
            self.fire();
        }
        let speed = self.p.mover_speed;
        self.movers.iter_mut().for_each(|m| m.advance(speed));
        let gained = self.move_laser();
        let ship = self.ship_box();
        let dead = self.hits_wall(ship)
            || self.obstacles.iter().any(|&t| meets(ship, full_tile(t)))
            || self.movers.iter().any(|m| meets(ship, m.hitbox()));
        let won = meets(ship, full_tile(self.goal));
        self.sync_entities();
        let r = Fixed::from_raw(gained);
        if dead {
            Tick { reward: r, event: Event::Fail }
        } else if won {
            Tick::complete(r + COMPLETION_REWARD)
        } else {
            Tick::reward(r)
        }
    }

    fn scene(&self) -> Scene<'_> {
        let c = (self.x + self.p.ship_size / 2, self.y + self.p.ship_size / 2);
        Scene {
            layout: &self.layout,
            entities: &self.entities,
            camera: Camera::follow(&self.layout, c.0, c.1, self.p.camera_tiles, Tile::Wall),
            hud: Hud::None,
            patch: None,
        }
    }

    fn agent_tile(&self) -> (i32, i32) {
        ((self.x + self.p.ship_size / 2).div_euclid(ONE_RAW), (self.y + self.p.ship_size / 2).div_euclid(ONE_RAW))
    }

    fn boxed_clone(&self) -> Box<dyn GameLogic> {
        Box::new(self.clone())
    }
}
