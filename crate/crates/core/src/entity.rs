use serde::{Deserialize, Serialize};

use crate::fixed::{Fixed, FixedVec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EntityKind {
    Player,
    /// Cheese, gem, coin, mushroom, friendly ship: the level's completion object.
    Goal,
    Enemy,
    Egg,
    Orb,
    PowerStar,
    Key,
    Lock,
    Boulder,
    Diamond,
    Exit,
    Car,
    Log,
    Saw,
    Bomb,
    Shuriken,
    Fish,
    Target,
    Obstacle,
    Laser,
}

impl EntityKind {
    pub const COUNT: usize = 20;

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn ascii(self) -> char {
        match self {
            EntityKind::Player => '@',
            EntityKind::Goal => '$',
            EntityKind::Enemy => 'E',
            EntityKind::Egg => 'o',
            EntityKind::Orb => '\'',
            EntityKind::PowerStar => '*',
            EntityKind::Key => 'k',
            EntityKind::Lock => 'L',
            EntityKind::Boulder => 'O',
            EntityKind::Diamond => 'd',
            EntityKind::Exit => 'X',
            EntityKind::Car => 'c',
            EntityKind::Log => '-',
            EntityKind::Saw => 'w',
            EntityKind::Bomb => 'b',
            EntityKind::Shuriken => '+',
            EntityKind::Fish => 'f',
            EntityKind::Target => 't',
            EntityKind::Obstacle => 'x',
            EntityKind::Laser => '|',
        }
    }
}

/// A world object. Positions are top-left corners in tile units.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Entity {
    pub kind: EntityKind,
    pub pos: FixedVec,
    pub size: FixedVec,
    pub vel: FixedVec,
    /// Game-specific countdown (vulnerability, hatch, lifetime).
    pub timer: i32,
    /// Color or style index (lock/key color, vulnerable flag, fish facing).
    pub variant: u8,
    pub alive: bool,
}

impl Entity {
    pub fn new(kind: EntityKind, pos: FixedVec, size: FixedVec) -> Self {
        Entity { kind, pos, size, vel: FixedVec::ZERO, timer: 0, variant: 0, alive: true }
    }

    /// One-tile entity occupying grid cell `(x, y)`.
    pub fn at_tile(kind: EntityKind, x: i32, y: i32) -> Self {
        Entity::new(kind, FixedVec::from_tile(x, y), FixedVec::new(Fixed::ONE, Fixed::ONE))
    }

    /// Entity of `size` centred in grid cell `(x, y)`.
    pub fn centered_in_tile(kind: EntityKind, x: i32, y: i32, size: Fixed) -> Self {
        let inset = (Fixed::ONE - size).raw() / 2;
        let pos = FixedVec::from_raw(x * 256 + inset, y * 256 + inset);
        Entity::new(kind, pos, FixedVec::new(size, size))
    }

    pub fn with_variant(mut self, variant: u8) -> Self {
        self.variant = variant;
        self
    }

    /// Grid cell containing the entity's top-left corner.
    pub fn tile(&self) -> (i32, i32) {
        (self.pos.x.floor_int(), self.pos.y.floor_int())
    }

    /// Grid cell containing the entity's centre.
    pub fn center_tile(&self) -> (i32, i32) {
        (
            (self.pos.x.raw() + self.size.x.raw() / 2).div_euclid(256),
            (self.pos.y.raw() + self.size.y.raw() / 2).div_euclid(256),
        )
    }

    /// Strict AABB overlap (touching edges do not count).
    pub fn overlaps(&self, other: &Entity) -> bool {
        boxes_overlap(self.pos, self.size, other.pos, other.size)
    }
}

#[inline]
pub fn boxes_overlap(a_pos: FixedVec, a_size: FixedVec, b_pos: FixedVec, b_size: FixedVec) -> bool {
    a_pos.x.raw() < b_pos.x.raw() + b_size.x.raw()
        && b_pos.x.raw() < a_pos.x.raw() + a_size.x.raw()
        && a_pos.y.raw() < b_pos.y.raw() + b_size.y.raw()
        && b_pos.y.raw() < a_pos.y.raw() + a_size.y.raw()
}
