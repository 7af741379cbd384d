//! Procedural sprite atlases.
//!
//! Every texture is an 8x8 bitmap. Tiles are opaque; entity sprites carry a
//! coverage mask. Colours come from a palette chosen by the level's theme
//! stream, except for completion objects, keys and locks, whose hues are
//! fixed so they stay identifiable across themes.

use crate::entity::EntityKind;
use crate::games::GameId;
use crate::grid::Tile;
use crate::rng::{derive_stream, labels, RngStream};

pub type Rgb = [u8; 3];

pub const KEY_COLORS: [Rgb; 3] = [[230, 40, 40], [40, 200, 60], [60, 90, 240]];
pub const MASK_COLOR: Rgb = [0, 0, 0];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Texture {
    pub texels: [Rgb; 64],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sprite {
    /// Bit `y * 8 + x` set where the sprite covers the cell.
    pub coverage: u64,
    pub texels: [Rgb; 64],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpriteAtlas {
    pub palette_id: u32,
    pub tiles: [Texture; Tile::COUNT],
    pub sprites: Vec<Sprite>,
}

/// Integer hue wheel: `hue` in `0..1536`.
fn hue_rgb(hue: u32, sat: u32, val: u32) -> Rgb {
    let h = hue % 1536;
    let (sector, f) = (h / 256, h % 256);
    let (r, g, b) = match sector {
        0 => (255, f, 0),
        1 => (255 - f, 255, 0),
        2 => (0, 255, f),
        3 => (0, 255 - f, 255),
        4 => (f, 0, 255),
        _ => (255, 0, 255 - f),
    };
    let mix = |c: u32| {
        let c = 255 - ((255 - c) * sat / 255);
        (c * val / 255) as u8
    };
    [mix(r), mix(g), mix(b)]
}

fn shade(c: Rgb, num: u32) -> Rgb {
    c.map(|v| (u32::from(v) * num / 8).min(255) as u8)
}

/// Bitmaps for fixed-shape sprites, one row per byte (bit 7 = leftmost).
fn shape(kind: EntityKind) -> u64 {
    let rows: [u8; 8] = match kind {
        EntityKind::Player => [0x3C, 0x7E, 0xDB, 0xFF, 0xFF, 0x7E, 0x24, 0x66],
        EntityKind::Goal => [0x18, 0x3C, 0x7E, 0xFF, 0xFF, 0x7E, 0x3C, 0x18],
        EntityKind::Egg => [0x00, 0x18, 0x3C, 0x7E, 0x7E, 0x7E, 0x3C, 0x00],
        EntityKind::Orb => [0x00, 0x00, 0x00, 0x18, 0x18, 0x00, 0x00, 0x00],
        EntityKind::PowerStar => [0x18, 0x18, 0xFF, 0x7E, 0x3C, 0x7E, 0x66, 0x00],
        EntityKind::Key => [0x70, 0x88, 0x88, 0x70, 0x20, 0x38, 0x20, 0x38],
        EntityKind::Lock => [0xFF, 0xFF, 0xE7, 0xC3, 0xE7, 0xE7, 0xFF, 0xFF],
        EntityKind::Boulder => [0x3C, 0x7E, 0xFF, 0xFF, 0xFF, 0xFF, 0x7E, 0x3C],
        EntityKind::Diamond => [0x18, 0x3C, 0x7E, 0xFF, 0x7E, 0x3C, 0x18, 0x00],
        EntityKind::Exit => [0xFF, 0x81, 0xBD, 0xA5, 0xA5, 0xBD, 0x81, 0xFF],
        EntityKind::Car => [0x00, 0x3C, 0x7E, 0xFF, 0xFF, 0xFF, 0x66, 0x00],
        EntityKind::Log => [0x00, 0xFF, 0xFF, 0xFF, 0xFF, 0xFF, 0xFF, 0x00],
        EntityKind::Saw => [0x99, 0x5A, 0x3C, 0xFF, 0xFF, 0x3C, 0x5A, 0x99],
        EntityKind::Bomb => [0x04, 0x08, 0x3C, 0x7E, 0x7E, 0x7E, 0x3C, 0x00],
        EntityKind::Shuriken => [0x00, 0x10, 0x38, 0x7C, 0x38, 0x10, 0x00, 0x00],
        EntityKind::Fish => [0x00, 0x38, 0x7D, 0xFF, 0xFF, 0x7D, 0x38, 0x00],
        EntityKind::Target => [0x3C, 0x42, 0x99, 0xA5, 0xA5, 0x99, 0x42, 0x3C],
        EntityKind::Obstacle => [0x81, 0x42, 0x3C, 0x3C, 0x3C, 0x3C, 0x42, 0x81],
        EntityKind::Laser => [0x00, 0x00, 0x00, 0xFF, 0xFF, 0x00, 0x00, 0x00],
        EntityKind::Enemy => [0x3C, 0x7E, 0xDB, 0xFF, 0xFF, 0xFF, 0xDB, 0x81],
    };
    rows_to_mask(rows)
}

fn rows_to_mask(rows: [u8; 8]) -> u64 {
    let mut m = 0u64;
    for (y, row) in rows.iter().enumerate() {
        for x in 0..8 {
            if row & (0x80 >> x) != 0 {
                m |= 1 << (y * 8 + x);
            }
        }
    }
    m
}

/// Left-right symmetric random silhouette with a solid core.
fn random_silhouette(rng: &mut RngStream) -> u64 {
    let mut rows = [0u8; 8];
    for row in rows.iter_mut() {
        let half = (rng.below(16) as u8) | 0x01;
        *row = (half << 4) | (half.reverse_bits() >> 4);
    }
    rows_to_mask(rows) | rows_to_mask([0, 0x18, 0x3C, 0x3C, 0x3C, 0x3C, 0x18, 0])
}

fn fixed_goal_color(game: GameId) -> Rgb {
    match game {
        GameId::Maze => [250, 220, 60],
        GameId::Heist => [80, 240, 240],
        GameId::CoinRun => [255, 200, 0],
        GameId::Ninja => [230, 60, 60],
        GameId::CaveFlyer => [60, 240, 90],
        GameId::Leaper | GameId::Miner | GameId::Chaser | GameId::BigFish => [255, 255, 255],
    }
}

fn pattern_texture(base: Rgb, accent: Rgb, pattern: u64) -> Texture {
    let mut texels = [base; 64];
    for (i, t) in texels.iter_mut().enumerate() {
        if pattern & (1 << i) != 0 {
            *t = accent;
        }
    }
    Texture { texels }
}

fn sprite(coverage: u64, body: Rgb, detail: Rgb) -> Sprite {
    let mut texels = [body; 64];
    // Darken the lowest covered row for a little depth.
    for x in 0..8 {
        for y in (0..8).rev() {
            if coverage & (1 << (y * 8 + x)) != 0 {
                texels[y * 8 + x] = detail;
                break;
            }
        }
    }
    Sprite { coverage, texels }
}

impl SpriteAtlas {
    /// Flat atlas: every tile `color`, sprites white. Test and debug helper.
    pub fn solid(color: Rgb) -> Self {
        let tiles = std::array::from_fn(|_| Texture { texels: [color; 64] });
        let sprites = (0..EntityKind::COUNT).map(|_| sprite(!0, [255; 3], [255; 3])).collect();
        SpriteAtlas { palette_id: 0, tiles, sprites }
    }

    pub fn tile(&self, t: Tile) -> &Texture {
        &self.tiles[t.index()]
    }

    pub fn sprite(&self, k: EntityKind) -> &Sprite {
        &self.sprites[k.index()]
    }

    pub fn background(&self) -> Rgb {
        self.tiles[Tile::Open.index()].texels[0]
    }
}

/// Atlas for one level, drawn from the level's theme stream.
pub fn derive_theme(game: GameId, level_seed: u32, pool_size: u32) -> SpriteAtlas {
    let mut rng = derive_stream(0, level_seed, labels::THEME).fork(game as u64);
    let palette_id = rng.below(pool_size.max(1));
    let mut pal = derive_stream(game as u32, palette_id, labels::THEME);

    let base_hue = pal.below(1536);
    let bg = hue_rgb(base_hue, 60 + pal.below(80), 40 + pal.below(50));
    let wall = hue_rgb(base_hue + 512 + pal.below(512), 120 + pal.below(120), 110 + pal.below(90));
    let dirt = hue_rgb(120 + pal.below(120), 150, 110 + pal.below(40));
    let water = hue_rgb(800 + pal.below(200), 200, 150 + pal.below(80));
    let road = hue_rgb(pal.below(1536), 20, 70 + pal.below(40));
    let plat = hue_rgb(base_hue + 256 + pal.below(1024), 140 + pal.below(100), 120 + pal.below(100));
    let hazard = [220, 40 + pal.below(40) as u8, 40];

    let bg_pattern = if pal.chance(1, 2) { 0 } else { rng.next_u64() & rng.next_u64() & rng.next_u64() };
    let wall_pattern = match pal.below(3) {
        0 => 0x8080_80FF_0808_08FF,
        1 => rng.next_u64() & rng.next_u64(),
        _ => 0xAA55_AA55_AA55_AA55 & rng.next_u64(),
    };
    let tiles = [
        pattern_texture(wall, shade(wall, 5), wall_pattern),
        pattern_texture(bg, shade(bg, 10), bg_pattern),
        pattern_texture(dirt, shade(dirt, 6), rng.next_u64() & rng.next_u64()),
        pattern_texture(water, shade(water, 10), 0x0000_6600_0000_0066 << pal.below(2)),
        pattern_texture(road, [200, 200, 200], 0x0000_0000_3C00_0000),
        pattern_texture(plat, shade(plat, 6), 0xFF00_0000_0000_0000 | (wall_pattern & 0x00FF_FF00)),
        pattern_texture(hazard, [250, 250, 250], 0x8142_2418_1824_4281),
    ];

    let themed = |pal: &mut RngStream| hue_rgb(pal.below(1536), 160 + pal.below(95), 170 + pal.below(85));
    let mut sprites = Vec::with_capacity(EntityKind::COUNT);
    for i in 0..EntityKind::COUNT {
        let kind = kind_from_index(i);
        let s = match kind {
            EntityKind::Goal => sprite(shape(kind), fixed_goal_color(game), shade(fixed_goal_color(game), 6)),
            EntityKind::Player => sprite(shape(kind), [240, 240, 240], [150, 150, 150]),
            EntityKind::Key | EntityKind::Lock => sprite(shape(kind), [255, 255, 255], [200, 200, 200]),
            EntityKind::Enemy => {
                let c = themed(&mut pal);
                sprite(random_silhouette(&mut rng), c, shade(c, 5))
            }
            EntityKind::Diamond => sprite(shape(kind), [120, 230, 255], [60, 150, 200]),
            EntityKind::Bomb | EntityKind::Saw | EntityKind::Obstacle => {
                sprite(shape(kind), [40, 40, 40], [200, 30, 30])
            }
            _ => {
                let c = themed(&mut pal);
                sprite(shape(kind), c, shade(c, 5))
            }
        };
        sprites.push(s);
    }
    SpriteAtlas { palette_id, tiles, sprites }
}

fn kind_from_index(i: usize) -> EntityKind {
    use EntityKind::*;
    const ALL: [EntityKind; EntityKind::COUNT] = [
        Player, Goal, Enemy, Egg, Orb, PowerStar, Key, Lock, Boulder, Diamond, Exit, Car, Log, Saw, Bomb, Shuriken,
        Fish, Target, Obstacle, Laser,
    ];
    ALL[i]
}
