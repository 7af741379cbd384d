//! Per-difficulty parameter tables, shipped as TOML and compiled into the library.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::games::bigfish::BigFishParams;
use crate::games::caveflyer::CaveFlyerParams;
use crate::games::chaser::ChaserParams;
use crate::games::coinrun::CoinRunParams;
use crate::games::heist::HeistParams;
use crate::games::leaper::LeaperParams;
use crate::games::maze::MazeParams;
use crate::games::miner::MinerParams;
use crate::games::ninja::NinjaParams;
use crate::games::{Difficulty, GameId};

pub const EASY_TOML: &str = include_str!("../params/easy.toml");
pub const HARD_TOML: &str = include_str!("../params/hard.toml");
pub const NORM_TOML: &str = include_str!("../params/norm.toml");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub version: u32,
    pub difficulty: Difficulty,
    pub max_episode_steps: u32,
    /// Handpicked level seed per game for exploration mode.
    #[serde(default)]
    pub exploration: BTreeMap<GameId, u32>,
    pub maze: MazeParams,
    pub heist: HeistParams,
    pub chaser: ChaserParams,
    pub miner: MinerParams,
    pub leaper: LeaperParams,
    pub coinrun: CoinRunParams,
    pub ninja: NinjaParams,
    pub bigfish: BigFishParams,
    pub caveflyer: CaveFlyerParams,
    /// SHA-256 of the source text.
    #[serde(skip)]
    pub digest: [u8; 32],
}

impl Params {
    pub fn parse(text: &str) -> Result<Params> {
        let mut p: Params = toml::from_str(text).map_err(|e| Error::Config(format!("parameter table: {e}")))?;
        p.digest = Sha256::digest(text.as_bytes()).into();
        p.validate()?;
        Ok(p)
    }

    /// The shipped table for a difficulty.
    pub fn builtin(d: Difficulty) -> &'static Params {
        static EASY: OnceLock<Params> = OnceLock::new();
        static HARD: OnceLock<Params> = OnceLock::new();
        let (cell, text) = match d {
            Difficulty::Easy => (&EASY, EASY_TOML),
            Difficulty::Hard => (&HARD, HARD_TOML),
        };
        cell.get_or_init(|| Params::parse(text).expect("shipped parameter table is valid"))
    }

    pub fn theme_pool(&self, game: GameId) -> u32 {
        match game {
            GameId::Maze => self.maze.theme_pool,
            GameId::Heist => self.heist.theme_pool,
            GameId::Chaser => self.chaser.theme_pool,
            GameId::Miner => self.miner.theme_pool,
            GameId::Leaper => self.leaper.theme_pool,
            GameId::CoinRun => self.coinrun.theme_pool,
            GameId::Ninja => self.ninja.theme_pool,
            GameId::BigFish => self.bigfish.theme_pool,
            GameId::CaveFlyer => self.caveflyer.theme_pool,
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.max_episode_steps == 0 {
            return bad("max_episode_steps must be positive".into());
        }
        for g in GameId::ALL {
            if self.theme_pool(g) == 0 {
                return bad(format!("{g}: theme_pool must be positive"));
            }
        }
        let c = &self.caveflyer;
        if c.thrust <= 0 || crate::fixed::ONE_RAW % c.thrust != 0 || c.turn_rate <= 0 || 64 % c.turn_rate != 0 {
            return bad("caveflyer: thrust must divide a tile and turn_rate a quarter turn".into());
        }
        if self.leaper.width > 16 {
            return bad("leaper: width above 16".into());
        }
        if self.heist.locks.1 > 3 {
            return bad("heist: at most three lock colours".into());
        }
        let f = &self.bigfish;
        if f.growth <= 0 || f.start_width <= f.fish_width.0 {
            return bad("bigfish: the player must grow and start wider than the smallest fish".into());
        }
        Ok(())
    }
}

/// `(R_min, R_max)` for one game at one difficulty.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormRow {
    pub min: f64,
    pub max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormEntry {
    pub easy: NormRow,
    pub hard: NormRow,
}

/// Normalization constants for all sixteen games of the original suite, keyed by lowercase name.
pub fn norm_table() -> &'static BTreeMap<String, NormEntry> {
    static T: OnceLock<BTreeMap<String, NormEntry>> = OnceLock::new();
    T.get_or_init(|| toml::from_str(NORM_TOML).expect("shipped normalization table is valid"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_tables_parse_and_differ() {
        let e = Params::builtin(Difficulty::Easy);
        let h = Params::builtin(Difficulty::Hard);
        assert_eq!(e.difficulty, Difficulty::Easy);
        assert_eq!(h.difficulty, Difficulty::Hard);
        assert_ne!(e.digest, h.digest);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = format!("bogus = 1\n{HARD_TOML}");
        assert!(matches!(Params::parse(&text), Err(Error::Config(_))));
    }

    #[test]
    fn norm_rows_are_ordered() {
        let t = norm_table();
        assert_eq!(t.len(), 16);
        for (name, e) in t {
            assert!(e.easy.max > e.easy.min && e.hard.max > e.hard.min, "{name}");
        }
    }
}
