//! Integer nearest-neighbour rasterizer for 64x64 RGB observations.
//!
//! Each output pixel samples the world at its centre: terrain first, then
//! entity sprites in list order, then HUD icons, then the memory-mode mask.

pub mod theme;

use crate::entity::Entity;
use crate::fixed::ONE_RAW;
use crate::grid::{GridLayout, Tile};

pub use theme::{derive_theme, Rgb, SpriteAtlas, KEY_COLORS, MASK_COLOR};

pub const OBS_W: usize = 64;
pub const OBS_H: usize = 64;
pub const OBS_BYTES: usize = OBS_W * OBS_H * 3;

/// World rectangle mapped onto the frame, in raw units.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Camera {
    pub x: i32,
    pub y: i32,
    pub w: i32,
    pub h: i32,
    /// Terrain drawn for samples outside the grid.
    pub outside: Tile,
}

impl Camera {
    /// Whole grid, letterboxed into a square with `outside` filling the rest.
    pub fn full(layout: &GridLayout, outside: Tile) -> Camera {
        let (w, h) = (layout.width() as i32 * ONE_RAW, layout.height() as i32 * ONE_RAW);
        let s = w.max(h);
        Camera { x: (w - s) / 2, y: (h - s) / 2, w: s, h: s, outside }
    }

    /// `tiles x tiles` window centred on a raw point.
    pub fn centered(cx: i32, cy: i32, tiles: i32, outside: Tile) -> Camera {
        let s = tiles * ONE_RAW;
        Camera { x: cx - s / 2, y: cy - s / 2, w: s, h: s, outside }
    }

    /// Like [`Camera::centered`] but kept inside the grid on each axis the grid spans.
    pub fn follow(layout: &GridLayout, cx: i32, cy: i32, tiles: i32, outside: Tile) -> Camera {
        let mut c = Camera::centered(cx, cy, tiles, outside);
        let (w, h) = (layout.width() as i32 * ONE_RAW, layout.height() as i32 * ONE_RAW);
        if w >= c.w {
            c.x = c.x.clamp(0, w - c.w);
        }
        if h >= c.h {
            c.y = c.y.clamp(0, h - c.h);
        }
        c
    }

    #[inline]
    fn sample_x(&self, px: usize) -> i32 {
        self.x + (((2 * px as i64 + 1) * self.w as i64).div_euclid(2 * OBS_W as i64)) as i32
    }

    #[inline]
    fn sample_y(&self, py: usize) -> i32 {
        self.y + (((2 * py as i64 + 1) * self.h as i64).div_euclid(2 * OBS_H as i64)) as i32
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Hud {
    None,
    /// Held key colours, drawn as swatches in the top-right corner.
    Keys([bool; 3]),
}

/// Everything the rasterizer needs from a game state.
pub struct Scene<'a> {
    pub layout: &'a GridLayout,
    pub entities: &'a [Entity],
    pub camera: Camera,
    pub hud: Hud,
    /// Memory mode: tile the patch is centred on and its radius in tiles.
    pub patch: Option<((i32, i32), i32)>,
}

/// Rasterizes `scene` into `out` (64*64*3 bytes, row-major RGB).
pub fn render(scene: &Scene, atlas: &SpriteAtlas, out: &mut [u8]) {
    assert_eq!(out.len(), OBS_BYTES, "frame buffer must be 64x64x3");
    let cam = scene.camera;
    let xs: [i32; OBS_W] = std::array::from_fn(|px| cam.sample_x(px));
    let ys: [i32; OBS_H] = std::array::from_fn(|py| cam.sample_y(py));

    for (py, &wy) in ys.iter().enumerate() {
        let (ty, vy) = (wy.div_euclid(ONE_RAW), (wy.rem_euclid(ONE_RAW) >> 5) as usize);
        let row = &mut out[py * OBS_W * 3..(py + 1) * OBS_W * 3];
        for (px, &wx) in xs.iter().enumerate() {
            let (tx, vx) = (wx.div_euclid(ONE_RAW), (wx.rem_euclid(ONE_RAW) >> 5) as usize);
            let tile = scene.layout.get(tx, ty).unwrap_or(cam.outside);
            let c = atlas.tile(tile).texels[vy * 8 + vx];
            row[px * 3..px * 3 + 3].copy_from_slice(&c);
        }
    }

    for e in scene.entities.iter().filter(|e| e.alive) {
        draw_entity(e, atlas, &xs, &ys, out);
    }

    if let Hud::Keys(held) = scene.hud {
        for (slot, (color, _)) in KEY_COLORS.iter().zip(held).filter(|(_, h)| *h).enumerate() {
            let x0 = OBS_W - 7 * (slot + 1);
            for y in 1..6 {
                for x in x0..x0 + 5 {
                    out[(y * OBS_W + x) * 3..(y * OBS_W + x) * 3 + 3].copy_from_slice(color);
                }
            }
        }
    }

    if let Some(((ax, ay), r)) = scene.patch {
        for (py, &wy) in ys.iter().enumerate() {
            let ty = wy.div_euclid(ONE_RAW);
            for (px, &wx) in xs.iter().enumerate() {
                let tx = wx.div_euclid(ONE_RAW);
                if (tx - ax).abs() > r || (ty - ay).abs() > r {
                    out[(py * OBS_W + px) * 3..(py * OBS_W + px) * 3 + 3].copy_from_slice(&MASK_COLOR);
                }
            }
        }
    }
}

/// Index range of samples inside `[lo, hi)`; samples are increasing.
fn covered(samples: &[i32], lo: i32, hi: i32) -> (usize, usize) {
    let a = samples.partition_point(|&s| s < lo);
    let b = samples.partition_point(|&s| s < hi);
    (a, b)
}

fn draw_entity(e: &Entity, atlas: &SpriteAtlas, xs: &[i32; OBS_W], ys: &[i32; OBS_H], out: &mut [u8]) {
    let (ex, ey) = (e.pos.x.raw(), e.pos.y.raw());
    let (ew, eh) = (e.size.x.raw().max(1), e.size.y.raw().max(1));
    let (mut x0, mut x1) = covered(xs, ex, ex + ew);
    let (mut y0, mut y1) = covered(ys, ey, ey + eh);
    // Boxes smaller than a pixel still show up as one pixel.
    if x0 == x1 {
        let (a, _) = covered(xs, ex + ew / 2, i32::MAX);
        if a == 0 || a >= OBS_W || xs[a] - (ex + ew / 2) > xs[1] - xs[0] {
            return;
        }
        (x0, x1) = (a, a + 1);
    }
    if y0 == y1 {
        let (a, _) = covered(ys, ey + eh / 2, i32::MAX);
        if a == 0 || a >= OBS_H || ys[a] - (ey + eh / 2) > ys[1] - ys[0] {
            return;
        }
        (y0, y1) = (a, a + 1);
    }
    let sprite = atlas.sprite(e.kind);
    let tint = tint_for(e);
    for py in y0..y1 {
        let sy = (((ys[py] - ey).clamp(0, eh - 1) as i64 * 8) / eh as i64) as usize;
        for px in x0..x1 {
            let sx = (((xs[px] - ex).clamp(0, ew - 1) as i64 * 8) / ew as i64) as usize;
            let sx = if e.variant & FLIP_BIT != 0 { 7 - sx } else { sx };
            let i = sy * 8 + sx;
            if sprite.coverage & (1 << i) == 0 {
                continue;
            }
            let c = match tint {
                Some(t) => t,
                None => sprite.texels[i],
            };
            out[(py * OBS_W + px) * 3..(py * OBS_W + px) * 3 + 3].copy_from_slice(&c);
        }
    }
}

/// Variant bit that mirrors a sprite horizontally.
pub const FLIP_BIT: u8 = 0x80;
/// Variant bit that draws an enemy in its vulnerable colour.
pub const VULNERABLE_BIT: u8 = 0x40;

fn tint_for(e: &Entity) -> Option<Rgb> {
    use crate::entity::EntityKind;
    match e.kind {
        EntityKind::Key | EntityKind::Lock => Some(KEY_COLORS[(e.variant & 3) as usize % 3]),
        EntityKind::Enemy if e.variant & VULNERABLE_BIT != 0 => Some([70, 90, 255]),
        _ => None,
    }
}

/// Frame as text: one character per 2x2 pixel block, by luminance.
pub fn frame_to_ascii(frame: &[u8]) -> String {
    const RAMP: &[u8] = b" .:-=+*#%@";
    let mut s = String::with_capacity(33 * 32);
    for by in 0..OBS_H / 2 {
        for bx in 0..OBS_W / 2 {
            let mut lum = 0u32;
            for (dy, dx) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                let i = ((by * 2 + dy) * OBS_W + bx * 2 + dx) * 3;
                lum += 2 * u32::from(frame[i]) + 5 * u32::from(frame[i + 1]) + u32::from(frame[i + 2]);
            }
            s.push(RAMP[(lum * (RAMP.len() as u32 - 1) / (4 * 8 * 255)) as usize] as char);
        }
        s.push('\n');
    }
    s
}
