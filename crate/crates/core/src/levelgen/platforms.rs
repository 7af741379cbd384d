//! Sequential reachable-platform generation for the side-scrolling platformers.
//!
//! Platforms are laid out left to right. Each candidate successor is accepted
//! only if an ideal jump (simulated with the game's real body kinematics)
//! carries the player from the previous platform onto it.

use serde::{Deserialize, Serialize};

use crate::entity::EntityKind;
use crate::fixed::ONE_RAW;
use crate::grid::{GridLayout, Tile};
use crate::levelgen::cave::Fraction;
use crate::physics::{solid_at, Body, BodyParams};
use crate::rng::RngStream;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PlatformGame {
    /// Ground columns down to the floor of the world, fixed jump impulse.
    CoinRun,
    /// One-tile-thick ledges, charged jump.
    Ninja,
}

/// Generation parameters for one difficulty of one platformer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlatformRecipe {
    pub sections: (u32, u32),
    pub world_height: u32,
    pub body: BodyParams,
    pub platform_width: (i32, i32),
    pub max_gap: i32,
    pub max_rise: i32,
    pub max_drop: i32,
    /// Highest and lowest rows a critical surface may occupy.
    pub surface_rows: (i32, i32),
    pub chasm_chance: Fraction,
    pub crate_chance: Fraction,
    pub saw_chance: Fraction,
    pub enemy_chance: Fraction,
    pub enemy_span: (i32, i32),
    pub bomb_chance: Fraction,
    pub decoy_chance: Fraction,
}

/// A walkable surface: columns `x0..=x1`, standing on row `top`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Platform {
    pub x0: i32,
    pub x1: i32,
    pub top: i32,
    /// False for superfluous decoys that no route needs.
    pub critical: bool,
}

impl Platform {
    pub fn width(&self) -> i32 {
        self.x1 - self.x0 + 1
    }
}

/// An entity to spawn, tied to a tile; `span` is the patrol column range for pacing enemies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Placement {
    pub kind: EntityKind,
    pub tile: (i32, i32),
    pub span: (i32, i32),
    pub critical: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlatformLevel {
    pub layout: GridLayout,
    pub platforms: Vec<Platform>,
    pub placements: Vec<Placement>,
    pub sections: u32,
    /// Spawn position: body x in raw units and the row the feet stand on.
    pub spawn: (i32, i32),
}

const START_WIDTH: i32 = 4;
const GOAL_WIDTH: i32 = 4;
const CANDIDATE_DRAWS: u32 = 8;

fn paint(layout: &mut GridLayout, p: &Platform, game: PlatformGame) {
    let bottom = match game {
        PlatformGame::CoinRun => layout.height() as i32 - 1,
        PlatformGame::Ninja => p.top,
    };
    for x in p.x0..=p.x1 {
        for y in p.top..=bottom {
            layout.set(x, y, Tile::Platform);
        }
    }
}

/// Rightmost raw x at which the body can stand on `p` without intersecting solids.
fn edge_start(layout: &GridLayout, body: &BodyParams, p: &Platform) -> Option<i32> {
    let step = body.run_speed.max(1);
    let mut x = (p.x1 + 1) * ONE_RAW - step;
    let feet_row = p.top;
    let row_above = (feet_row * ONE_RAW - body.height).div_euclid(ONE_RAW);
    while x + body.width > p.x0 * ONE_RAW {
        let (c0, c1) = (x.div_euclid(ONE_RAW), (x + body.width - 1).div_euclid(ONE_RAW));
        let clear = (c0..=c1).all(|c| (row_above..feet_row).all(|r| !solid_at(layout, c, r)));
        if clear {
            return Some(x);
        }
        x -= step;
    }
    None
}

/// Whether an ideal jump carries the body from `from` onto `to` in `layout`.
///
/// Tries every charge level (just one for non-charging bodies), holding the
/// run direction until the body's centre passes the target's centre.
pub fn ideal_jump(layout: &GridLayout, body: &BodyParams, from: &Platform, to: &Platform) -> bool {
    let Some(x) = edge_start(layout, body, from) else {
        return false;
    };
    let world_bottom = layout.height() as i32 * ONE_RAW;
    let target_mid = (to.x0 + to.x1 + 1) * ONE_RAW / 2;
    let charges = if body.charges() { 0..=body.charge_cap } else { 0..=0 };
    for charge in charges {
        let mut b = Body::standing_at(x, from.top, body);
        if body.charges() {
            for _ in 0..charge {
                b.step(0, 1, body, layout);
            }
            // Releasing with zero charge is a plain walk-off.
            b.step(1, 0, body, layout);
        } else {
            b.step(1, 1, body, layout);
        }
        for _ in 0..400 {
            if b.grounded {
                let (cx0, cx1) =
                    (b.pos.x.raw().div_euclid(ONE_RAW), (b.pos.x.raw() + body.width - 1).div_euclid(ONE_RAW));
                let on_target = b.feet(body) == to.top * ONE_RAW && cx1 >= to.x0 && cx0 <= to.x1;
                if on_target {
                    return true;
                }
                let on_source = b.feet(body) == from.top * ONE_RAW && cx0 <= from.x1;
                if !on_source {
                    break;
                }
            }
            if b.pos.y.raw() > world_bottom {
                break;
            }
            let centre = b.pos.x.raw() + body.width / 2;
            let h = if centre < target_mid { 1 } else { 0 };
            b.step(h, 0, body, layout);
        }
    }
    false
}

fn scratch_pair(height: u32, a: &Platform, b: &Platform, game: PlatformGame) -> GridLayout {
    let mut g = GridLayout::filled((b.x1 + 2) as u32, height, Tile::Open);
    paint(&mut g, a, game);
    paint(&mut g, b, game);
    g
}

/// Draws the next critical platform, falling back to a trivially reachable one.
fn next_platform(rng: &mut RngStream, r: &PlatformRecipe, game: PlatformGame, prev: &Platform) -> Platform {
    let (lo_row, hi_row) = r.surface_rows;
    let chasm = game == PlatformGame::Ninja || rng.chance(r.chasm_chance.num, r.chasm_chance.den);
    for _ in 0..CANDIDATE_DRAWS {
        let gap = if chasm { rng.range(1, r.max_gap) } else { 0 };
        let dy = rng.range(-r.max_rise, r.max_drop);
        let top = (prev.top + dy).clamp(lo_row, hi_row);
        let width = rng.range(r.platform_width.0, r.platform_width.1);
        let x0 = prev.x1 + 1 + gap;
        let cand = Platform { x0, x1: x0 + width - 1, top, critical: true };
        let scratch = scratch_pair(r.world_height, prev, &cand, game);
        if ideal_jump(&scratch, &r.body, prev, &cand) {
            return cand;
        }
    }
    let gap = if game == PlatformGame::Ninja { 1 } else { 0 };
    let x0 = prev.x1 + 1 + gap;
    Platform { x0, x1: x0 + r.platform_width.1 - 1, top: prev.top, critical: true }
}

/// Generates a platform sequence ending at a goal platform on the far right.
pub fn platform_sequence(rng: &mut RngStream, r: &PlatformRecipe, game: PlatformGame) -> PlatformLevel {
    let sections = rng.range(r.sections.0 as i32, r.sections.1 as i32) as u32;
    let start_top = r.surface_rows.1.min(rng.range(r.surface_rows.0, r.surface_rows.1));
    let start = Platform { x0: 0, x1: START_WIDTH - 1, top: start_top, critical: true };
    let mut platforms = vec![start];
    for _ in 0..sections {
        let prev = *platforms.last().unwrap();
        platforms.push(next_platform(rng, r, game, &prev));
    }
    // Goal platform, reached like any other section.
    let prev = *platforms.last().unwrap();
    let mut goal = next_platform(rng, r, game, &prev);
    goal.x1 = goal.x0 + GOAL_WIDTH.max(goal.width()) - 1;
    let goal_scratch = scratch_pair(r.world_height, &prev, &goal, game);
    if !ideal_jump(&goal_scratch, &r.body, &prev, &goal) {
        let gap = if game == PlatformGame::Ninja { 1 } else { 0 };
        goal = Platform { x0: prev.x1 + 1 + gap, x1: prev.x1 + gap + GOAL_WIDTH, top: prev.top, critical: true };
    }
    platforms.push(goal);

    let width = (goal.x1 + 2) as u32;
    let mut layout = GridLayout::filled(width, r.world_height, Tile::Open);
    for p in &platforms {
        paint(&mut layout, p, game);
    }

    let mut placements = Vec::new();
    let last = platforms.len() - 1;
    for (i, p) in platforms.iter().enumerate() {
        if i == 0 || i == last {
            continue;
        }
        match game {
            PlatformGame::CoinRun => place_coinrun_obstacle(rng, r, p, &mut layout, &mut placements),
            PlatformGame::Ninja => {
                if p.width() >= 3 && rng.chance(r.bomb_chance.num, r.bomb_chance.den) {
                    let col = rng.range(p.x0 + 1, p.x1 - 1);
                    placements.push(Placement {
                        kind: EntityKind::Bomb,
                        tile: (col, p.top - 4),
                        span: (col, col),
                        critical: false,
                    });
                }
            }
        }
    }
    if game == PlatformGame::Ninja {
        add_decoys(rng, r, &mut platforms, &mut layout);
    }
    let goal = platforms[last];
    placements.push(Placement {
        kind: EntityKind::Goal,
        tile: (goal.x1 - 1, goal.top - 1),
        span: (goal.x1 - 1, goal.x1 - 1),
        critical: true,
    });

    PlatformLevel { layout, platforms, placements, sections, spawn: (ONE_RAW, start_top) }
}

fn place_coinrun_obstacle(
    rng: &mut RngStream,
    r: &PlatformRecipe,
    p: &Platform,
    layout: &mut GridLayout,
    out: &mut Vec<Placement>,
) {
    let w = p.width();
    let row = p.top - 1;
    let (smin, smax) = r.enemy_span;
    if w >= smax + 4 && rng.chance(r.enemy_chance.num, r.enemy_chance.den) {
        let len = rng.range(smin, smax);
        let a = rng.range(p.x0 + 2, p.x1 - 1 - len);
        out.push(Placement { kind: EntityKind::Enemy, tile: (a, row), span: (a, a + len - 1), critical: false });
    } else if w >= 5 && rng.chance(r.saw_chance.num, r.saw_chance.den) {
        let c = rng.range(p.x0 + 2, p.x1 - 2);
        layout.set(c, row, Tile::Hazard);
        out.push(Placement { kind: EntityKind::Saw, tile: (c, row), span: (c, c), critical: false });
    } else if w >= 4 && rng.chance(r.crate_chance.num, r.crate_chance.den) {
        let c = rng.range(p.x0 + 1, p.x1 - 2);
        layout.set(c, row, Tile::Platform);
    }
}

/// Superfluous ledges placed above the apex of every critical jump.
fn add_decoys(rng: &mut RngStream, r: &PlatformRecipe, platforms: &mut Vec<Platform>, layout: &mut GridLayout) {
    let highest = platforms.iter().map(|p| p.top).min().unwrap_or(0);
    let reach_rows = max_rise_rows(&r.body) + 2;
    let ceiling = highest - reach_rows - 1;
    if ceiling < 1 {
        return;
    }
    let n = platforms.len();
    for i in 1..n - 1 {
        if !rng.chance(r.decoy_chance.num, r.decoy_chance.den) {
            continue;
        }
        let base = platforms[i];
        let width = rng.range(r.platform_width.0, r.platform_width.1);
        let x0 = (base.x0 + rng.range(-1, 1)).max(0);
        let x1 = (x0 + width - 1).min(layout.width() as i32 - 1);
        let top = rng.range(1, ceiling);
        let d = Platform { x0, x1, top, critical: false };
        let clash =
            platforms.iter().any(|q| !q.critical && q.top.abs_diff(top) <= 1 && q.x0 <= x1 + 1 && x0 <= q.x1 + 1);
        if clash {
            continue;
        }
        paint(layout, &d, PlatformGame::Ninja);
        platforms.push(d);
    }
}

/// Tiles the head can rise above the standing surface under the strongest jump.
pub fn max_rise_rows(body: &BodyParams) -> i32 {
    let v = body.jump_impulse(body.charge_cap);
    let mut h = 0;
    let mut vy = -v;
    let mut best = 0;
    loop {
        vy += body.gravity;
        if vy >= 0 {
            break;
        }
        h -= vy;
        best = best.max(h);
    }
    (best + body.height + ONE_RAW - 1) / ONE_RAW
}
