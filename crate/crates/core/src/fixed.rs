//! 24.8 fixed-point arithmetic for world-space quantities.
//!
//! Every continuous quantity that feeds the transition function (positions,
//! velocities, rewards) is a [`Fixed`]. Arithmetic is exact integer math and
//! overflow is reported, never wrapped: the `checked_*` methods return an
//! [`Error::Arithmetic`], while the operator impls panic on overflow.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_traits::{Bounded, CheckedAdd, CheckedMul, CheckedSub, One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const FRAC_BITS: u32 = 8;
pub const ONE_RAW: i32 = 1 << FRAC_BITS;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Fixed(i32);

impl Fixed {
    pub const ZERO: Fixed = Fixed(0);
    pub const ONE: Fixed = Fixed(ONE_RAW);
    pub const HALF: Fixed = Fixed(ONE_RAW / 2);

    #[inline]
    pub const fn from_raw(raw: i32) -> Self {
        Fixed(raw)
    }

    #[inline]
    pub const fn raw(self) -> i32 {
        self.0
    }

    /// Panics if `n` is outside the representable integer range (±2^23).
    #[inline]
    pub const fn from_int(n: i32) -> Self {
        assert!(n >= -(1 << 23) && n < (1 << 23), "integer out of 24.8 range");
        Fixed(n << FRAC_BITS)
    }

    /// Exact conversion for rational constants `num/den`, rounded toward negative infinity.
    pub fn from_ratio(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::Domain("zero denominator".into()));
        }
        let raw = (num << FRAC_BITS).div_euclid(den);
        i32::try_from(raw).map(Fixed).map_err(|_| Error::Arithmetic("from_ratio"))
    }

    /// Largest integer not greater than self.
    #[inline]
    pub const fn floor_int(self) -> i32 {
        self.0 >> FRAC_BITS
    }

    #[inline]
    pub const fn frac_raw(self) -> i32 {
        self.0 & (ONE_RAW - 1)
    }

    pub fn checked_add(self, rhs: Fixed) -> Result<Fixed> {
        self.0.checked_add(rhs.0).map(Fixed).ok_or(Error::Arithmetic("add"))
    }

    pub fn checked_sub(self, rhs: Fixed) -> Result<Fixed> {
        self.0.checked_sub(rhs.0).map(Fixed).ok_or(Error::Arithmetic("sub"))
    }

    pub fn checked_mul(self, rhs: Fixed) -> Result<Fixed> {
        fixed_mul(self, rhs)
    }

    /// Multiplication by an integer factor.
    pub fn checked_scale(self, k: i32) -> Result<Fixed> {
        self.0.checked_mul(k).map(Fixed).ok_or(Error::Arithmetic("scale"))
    }

    #[inline]
    pub fn scale(self, k: i32) -> Fixed {
        self.checked_scale(k).expect("fixed-point overflow in scale")
    }

    #[inline]
    pub fn abs(self) -> Fixed {
        Fixed(self.0.checked_abs().expect("fixed-point overflow in abs"))
    }

    #[inline]
    pub fn min(self, other: Fixed) -> Fixed {
        Fixed(self.0.min(other.0))
    }

    #[inline]
    pub fn max(self, other: Fixed) -> Fixed {
        Fixed(self.0.max(other.0))
    }

    #[inline]
    pub fn clamp(self, lo: Fixed, hi: Fixed) -> Fixed {
        Fixed(self.0.clamp(lo.0, hi.0))
    }

    /// Lossless for every representable value; used only at output boundaries.
    #[inline]
    pub fn to_f64(self) -> f64 {
        f64::from(self.0) / f64::from(ONE_RAW)
    }

    #[inline]
    pub fn to_f32(self) -> f32 {
        // |raw| < 2^24 is exact in f32; larger values only appear in out-of-range debug output.
        self.0 as f32 / ONE_RAW as f32
    }
}

/// Product `floor(a * b / 256)` through a 64-bit intermediate.
pub fn fixed_mul(a: Fixed, b: Fixed) -> Result<Fixed> {
    let wide = (i64::from(a.0) * i64::from(b.0)) >> FRAC_BITS;
    i32::try_from(wide).map(Fixed).map_err(|_| Error::Arithmetic("mul"))
}

impl fmt::Display for Fixed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_f64())
    }
}

impl Add for Fixed {
    type Output = Fixed;
    #[inline]
    fn add(self, rhs: Fixed) -> Fixed {
        Fixed(self.0.checked_add(rhs.0).expect("fixed-point overflow in add"))
    }
}

impl Sub for Fixed {
    type Output = Fixed;
    #[inline]
    fn sub(self, rhs: Fixed) -> Fixed {
        Fixed(self.0.checked_sub(rhs.0).expect("fixed-point overflow in sub"))
    }
}

impl Mul for Fixed {
    type Output = Fixed;
    #[inline]
    fn mul(self, rhs: Fixed) -> Fixed {
        fixed_mul(self, rhs).expect("fixed-point overflow in mul")
    }
}

impl Neg for Fixed {
    type Output = Fixed;
    #[inline]
    fn neg(self) -> Fixed {
        Fixed(self.0.checked_neg().expect("fixed-point overflow in neg"))
    }
}

impl AddAssign for Fixed {
    #[inline]
    fn add_assign(&mut self, rhs: Fixed) {
        *self = *self + rhs;
    }
}

impl SubAssign for Fixed {
    #[inline]
    fn sub_assign(&mut self, rhs: Fixed) {
        *self = *self - rhs;
    }
}

impl Zero for Fixed {
    fn zero() -> Self {
        Fixed::ZERO
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

impl One for Fixed {
    fn one() -> Self {
        Fixed::ONE
    }
}

impl Bounded for Fixed {
    fn min_value() -> Self {
        Fixed(i32::MIN)
    }
    fn max_value() -> Self {
        Fixed(i32::MAX)
    }
}

impl CheckedAdd for Fixed {
    fn checked_add(&self, v: &Self) -> Option<Self> {
        self.0.checked_add(v.0).map(Fixed)
    }
}

impl CheckedSub for Fixed {
    fn checked_sub(&self, v: &Self) -> Option<Self> {
        self.0.checked_sub(v.0).map(Fixed)
    }
}

impl CheckedMul for Fixed {
    fn checked_mul(&self, v: &Self) -> Option<Self> {
        fixed_mul(*self, *v).ok()
    }
}

/// A 2-vector of fixed-point world coordinates (tile units, y grows downward).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FixedVec {
    pub x: Fixed,
    pub y: Fixed,
}

impl FixedVec {
    pub const ZERO: FixedVec = FixedVec { x: Fixed::ZERO, y: Fixed::ZERO };

    #[inline]
    pub const fn new(x: Fixed, y: Fixed) -> Self {
        FixedVec { x, y }
    }

    #[inline]
    pub const fn from_raw(x: i32, y: i32) -> Self {
        FixedVec { x: Fixed::from_raw(x), y: Fixed::from_raw(y) }
    }

    #[inline]
    pub const fn from_tile(x: i32, y: i32) -> Self {
        FixedVec { x: Fixed::from_int(x), y: Fixed::from_int(y) }
    }
}

impl Add for FixedVec {
    type Output = FixedVec;
    #[inline]
    fn add(self, rhs: FixedVec) -> FixedVec {
        FixedVec { x: self.x + rhs.x, y: self.y + rhs.y }
    }
}

impl Sub for FixedVec {
    type Output = FixedVec;
    #[inline]
    fn sub(self, rhs: FixedVec) -> FixedVec {
        FixedVec { x: self.x - rhs.x, y: self.y - rhs.y }
    }
}

/// Heading in 1/256ths of a revolution. Wraps modulo a full turn.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Angle(pub u8);

impl Angle {
    #[inline]
    pub fn rotate(self, steps: i32) -> Angle {
        Angle(((i32::from(self.0) + steps).rem_euclid(256)) as u8)
    }

    #[inline]
    pub fn sin(self) -> Fixed {
        Fixed::from_raw(sin_raw(self.0))
    }

    #[inline]
    pub fn cos(self) -> Fixed {
        Fixed::from_raw(sin_raw(self.0.wrapping_add(64)))
    }

    /// Unit direction in screen coordinates: angle 0 points +x, 64 points up (-y).
    #[inline]
    pub fn direction(self) -> FixedVec {
        FixedVec::new(self.cos(), -self.sin())
    }
}

// round(sin(2*pi*i/256) * 256) for the first quadrant, inclusive of both ends.
const QUARTER_SINE: [i16; 65] = [
    0, 6, 13, 19, 25, 31, 38, 44, 50, 56, 62, 68, 74, 80, 86, 92, 98, 104, 109, 115, 121, 126, 132, 137, 142, 147, 152,
    157, 162, 167, 172, 177, 181, 185, 190, 194, 198, 202, 206, 209, 213, 216, 220, 223, 226, 229, 231, 234, 237, 239,
    241, 243, 245, 247, 248, 250, 251, 252, 253, 254, 255, 255, 256, 256, 256,
];

fn sin_raw(step: u8) -> i32 {
    let s = step as usize;
    let v = match s {
        0..=64 => QUARTER_SINE[s],
        65..=128 => QUARTER_SINE[128 - s],
        129..=192 => -QUARTER_SINE[s - 128],
        _ => -QUARTER_SINE[256 - s],
    };
    i32::from(v)
}
