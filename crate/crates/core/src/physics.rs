//! Axis-aligned box kinematics for the platformer games.
//!
//! Bodies move in 1/256-tile units against the solid tiles of a grid. Every
//! speed is below one tile per tick, so a single leading row or column check
//! per axis is enough to resolve collisions.

use serde::{Deserialize, Serialize};

use crate::fixed::{Fixed, FixedVec, ONE_RAW};
use crate::grid::GridLayout;

/// Kinematic constants of a platformer body, all in raw 1/256-tile units.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BodyParams {
    pub width: i32,
    pub height: i32,
    pub run_speed: i32,
    pub gravity: i32,
    pub max_fall: i32,
    /// Upward speed of an uncharged jump.
    pub jump_base: i32,
    /// Extra upward speed per charge tick; zero disables charging.
    pub jump_per_charge: i32,
    pub charge_cap: u8,
}

impl BodyParams {
    pub fn charges(&self) -> bool {
        self.charge_cap > 0
    }

    /// Launch speed after `charge` ticks of charging. Nondecreasing, saturating at the cap.
    pub fn jump_impulse(&self, charge: u8) -> i32 {
        self.jump_base + self.jump_per_charge * i32::from(charge.min(self.charge_cap))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Body {
    pub pos: FixedVec,
    pub vel: FixedVec,
    pub grounded: bool,
    pub charge: u8,
    pub facing: i8,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StepFlags {
    pub hit_wall: bool,
    pub landed: bool,
    pub hit_ceiling: bool,
    pub jumped: bool,
}

/// Solid-tile query; columns outside the world are solid, rows outside are empty.
#[inline]
pub fn solid_at(layout: &GridLayout, tx: i32, ty: i32) -> bool {
    if tx < 0 || tx >= layout.width() as i32 {
        return true;
    }
    layout.get(tx, ty).is_some_and(|t| t.is_solid())
}

#[inline]
fn span(lo: i32, len: i32) -> (i32, i32) {
    (lo.div_euclid(ONE_RAW), (lo + len - 1).div_euclid(ONE_RAW))
}

impl Body {
    pub fn standing_at(x_raw: i32, feet_row: i32, p: &BodyParams) -> Body {
        Body {
            pos: FixedVec::from_raw(x_raw, feet_row * ONE_RAW - p.height),
            vel: FixedVec::ZERO,
            grounded: true,
            charge: 0,
            facing: 1,
        }
    }

    /// Bottom edge in raw units.
    pub fn feet(&self, p: &BodyParams) -> i32 {
        self.pos.y.raw() + p.height
    }

    /// Inclusive tile ranges overlapped by the body: `((x0, x1), (y0, y1))`.
    pub fn tile_span(&self, p: &BodyParams) -> ((i32, i32), (i32, i32)) {
        (span(self.pos.x.raw(), p.width), span(self.pos.y.raw(), p.height))
    }

    /// Advances one tick under the horizontal/vertical intent (`vertical > 0` is up).
    pub fn step(&mut self, horizontal: i8, vertical: i8, p: &BodyParams, layout: &GridLayout) -> StepFlags {
        let mut flags = StepFlags::default();
        let mut vx = i32::from(horizontal) * p.run_speed;
        let mut vy = self.vel.y.raw();
        if horizontal != 0 {
            self.facing = horizontal.signum();
        }

        if p.charges() {
            if self.grounded && vertical > 0 {
                self.charge = (self.charge + 1).min(p.charge_cap);
                vx = 0;
            } else {
                if self.grounded && self.charge > 0 {
                    vy = -p.jump_impulse(self.charge);
                    flags.jumped = true;
                }
                self.charge = 0;
            }
        } else if self.grounded && vertical > 0 {
            vy = -p.jump_base;
            flags.jumped = true;
        }
        vy = (vy + p.gravity).min(p.max_fall);

        // Horizontal sweep.
        let mut x = self.pos.x.raw() + vx;
        let (ty0, ty1) = span(self.pos.y.raw(), p.height);
        if vx > 0 {
            let col = (x + p.width - 1).div_euclid(ONE_RAW);
            if (ty0..=ty1).any(|ty| solid_at(layout, col, ty)) {
                x = col * ONE_RAW - p.width;
                flags.hit_wall = true;
            }
        } else if vx < 0 {
            let col = x.div_euclid(ONE_RAW);
            if (ty0..=ty1).any(|ty| solid_at(layout, col, ty)) {
                x = (col + 1) * ONE_RAW;
                flags.hit_wall = true;
            }
        }

        // Vertical sweep.
        let mut y = self.pos.y.raw() + vy;
        let (tx0, tx1) = span(x, p.width);
        self.grounded = false;
        if vy > 0 {
            let row = (y + p.height - 1).div_euclid(ONE_RAW);
            if (tx0..=tx1).any(|tx| solid_at(layout, tx, row)) {
                y = row * ONE_RAW - p.height;
                vy = 0;
                self.grounded = true;
                flags.landed = true;
            }
        } else if vy < 0 {
            let row = y.div_euclid(ONE_RAW);
            if (tx0..=tx1).any(|tx| solid_at(layout, tx, row)) {
                y = (row + 1) * ONE_RAW;
                vy = 0;
                flags.hit_ceiling = true;
            }
        }

        self.pos = FixedVec::from_raw(x, y);
        self.vel = FixedVec::new(Fixed::from_raw(vx), Fixed::from_raw(vy));
        flags
    }
}
