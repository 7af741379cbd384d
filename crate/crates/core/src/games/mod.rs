//! The nine environments: level generation, tick dynamics and solvability oracles.

pub mod bigfish;
pub mod caveflyer;
pub mod chaser;
pub mod coinrun;
pub mod heist;
pub mod leaper;
pub mod maze;
pub mod miner;
pub mod ninja;
pub mod platformer;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::fixed::Fixed;
use crate::grid::GridLayout;
use crate::levelgen::{Verdict, Witness};
use crate::params::Params;
use crate::render::Scene;
use crate::rng::{derive_stream, RngStream};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GameId {
    Maze,
    Heist,
    Chaser,
    Miner,
    Leaper,
    CoinRun,
    Ninja,
    BigFish,
    CaveFlyer,
}

impl GameId {
    pub const ALL: [GameId; 9] = [
        GameId::Maze,
        GameId::Heist,
        GameId::Chaser,
        GameId::Miner,
        GameId::Leaper,
        GameId::CoinRun,
        GameId::Ninja,
        GameId::BigFish,
        GameId::CaveFlyer,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GameId::Maze => "maze",
            GameId::Heist => "heist",
            GameId::Chaser => "chaser",
            GameId::Miner => "miner",
            GameId::Leaper => "leaper",
            GameId::CoinRun => "coinrun",
            GameId::Ninja => "ninja",
            GameId::BigFish => "bigfish",
            GameId::CaveFlyer => "caveflyer",
        }
    }

    pub fn from_name(s: &str) -> Result<GameId> {
        GameId::ALL
            .into_iter()
            .find(|g| g.name() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::Config(format!("unknown env_name `{s}`")))
    }

    /// Memory variant exists (larger world; partial observability where masked).
    pub fn supports_memory(self) -> bool {
        matches!(self, GameId::Maze | GameId::Heist | GameId::Miner | GameId::CaveFlyer | GameId::CoinRun)
    }

    /// Memory variant restricts the observation to a patch around the agent.
    pub fn memory_masks_view(self) -> bool {
        matches!(self, GameId::Maze | GameId::Heist | GameId::Miner)
    }

    pub fn supports_exploration(self) -> bool {
        matches!(
            self,
            GameId::CoinRun | GameId::CaveFlyer | GameId::Leaper | GameId::Maze | GameId::Heist | GameId::Ninja
        )
    }

    /// Games whose maximum return follows directly from the reward table.
    pub fn trivially_bounded(self) -> bool {
        !matches!(self, GameId::Chaser | GameId::CaveFlyer)
    }
}

impl std::fmt::Display for GameId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Difficulty {
    Easy,
    Hard,
}

impl Difficulty {
    pub fn name(self) -> &'static str {
        match self {
            Difficulty::Easy => "easy",
            Difficulty::Hard => "hard",
        }
    }
}

/// Decoded action: movement axes (`dy > 0` is up) and an optional special button `0..=5`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Intent {
    pub dx: i8,
    pub dy: i8,
    pub special: Option<u8>,
}

pub const NUM_ACTIONS: u8 = 15;
pub const NOOP: u8 = 4;

/// Fixed action table: `0..=8` are `(dx + 1) * 3 + (dy + 1)`, `9..=14` are specials `0..=5`.
pub fn decode_action(a: u8) -> Result<Intent> {
    match a {
        0..=8 => Ok(Intent { dx: (a / 3) as i8 - 1, dy: (a % 3) as i8 - 1, special: None }),
        9..=14 => Ok(Intent { dx: 0, dy: 0, special: Some(a - 9) }),
        _ => Err(Error::Domain(format!("action {a} outside 0..=14"))),
    }
}

pub fn move_action(dx: i8, dy: i8) -> u8 {
    ((dx + 1) * 3 + (dy + 1)) as u8
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Event {
    Continue,
    Complete,
    Fail,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Tick {
    pub reward: Fixed,
    pub event: Event,
}

impl Tick {
    pub const NOTHING: Tick = Tick { reward: Fixed::ZERO, event: Event::Continue };

    pub fn reward(r: Fixed) -> Tick {
        Tick { reward: r, event: Event::Continue }
    }

    pub fn complete(r: Fixed) -> Tick {
        Tick { reward: r, event: Event::Complete }
    }

    pub fn fail() -> Tick {
        Tick { reward: Fixed::ZERO, event: Event::Fail }
    }
}

pub const COMPLETION_REWARD: Fixed = Fixed::from_int(10);

/// A running level.
pub trait GameLogic: Send + Sync {
    fn tick(&mut self, intent: Intent) -> Tick;
    /// Frame contents; the engine may replace the camera and add a patch mask.
    fn scene(&self) -> Scene<'_>;
    /// Tile the agent occupies, for agent-centred views.
    fn agent_tile(&self) -> (i32, i32);
    fn boxed_clone(&self) -> Box<dyn GameLogic>;
}

/// Stream for one aspect of one level; independent of the global seed.
pub fn level_stream(game: GameId, level_seed: u32, label: &str) -> RngStream {
    derive_stream(0, level_seed, label).fork(game as u64)
}

/// Grid step for tile games: the horizontal component wins if passable,
/// otherwise the vertical one (`dy > 0` moves toward row 0).
pub fn grid_move(pos: (i32, i32), intent: Intent, passable: impl Fn(i32, i32) -> bool) -> (i32, i32) {
    if intent.dx != 0 {
        let p = (pos.0 + i32::from(intent.dx), pos.1);
        if passable(p.0, p.1) {
            return p;
        }
    }
    if intent.dy != 0 {
        let p = (pos.0, pos.1 - i32::from(intent.dy));
        if passable(p.0, p.1) {
            return p;
        }
    }
    pos
}

/// Actions that walk a 4-connected tile path.
pub fn path_to_actions(path: &[(i32, i32)]) -> Vec<u8> {
    path.windows(2)
        .map(|w| {
            let (dx, dy) = (w[1].0 - w[0].0, w[1].1 - w[0].1);
            move_action(dx as i8, -dy as i8)
        })
        .collect()
}

/// A generated level of any game.
#[derive(Clone, Debug)]
pub enum Level {
    Maze(maze::MazeLevel),
    Heist(heist::HeistLevel),
    Chaser(chaser::ChaserLevel),
    Miner(miner::MinerLevel),
    Leaper(leaper::LeaperLevel),
    CoinRun(coinrun::CoinRunLevel),
    Ninja(ninja::NinjaLevel),
    BigFish(bigfish::BigFishLevel),
    CaveFlyer(caveflyer::CaveFlyerLevel),
}

impl Level {
    pub fn generate(game: GameId, params: &Params, seed: u32, memory: bool) -> Result<Level> {
        Ok(match game {
            GameId::Maze => Level::Maze(maze::MazeLevel::generate(seed, &params.maze, memory)?),
            GameId::Heist => Level::Heist(heist::HeistLevel::generate(seed, &params.heist, memory)?),
            GameId::Chaser => Level::Chaser(chaser::ChaserLevel::generate(seed, &params.chaser)?),
            GameId::Miner => Level::Miner(miner::MinerLevel::generate(seed, &params.miner, memory)?),
            GameId::Leaper => Level::Leaper(leaper::LeaperLevel::generate(seed, &params.leaper)?),
            GameId::CoinRun => Level::CoinRun(coinrun::CoinRunLevel::generate(seed, &params.coinrun, memory)?),
            GameId::Ninja => Level::Ninja(ninja::NinjaLevel::generate(seed, &params.ninja)?),
            GameId::BigFish => Level::BigFish(bigfish::BigFishLevel::generate(seed, &params.bigfish)?),
            GameId::CaveFlyer => {
                Level::CaveFlyer(caveflyer::CaveFlyerLevel::generate(seed, &params.caveflyer, memory)?)
            }
        })
    }

    pub fn game(&self) -> GameId {
        match self {
            Level::Maze(_) => GameId::Maze,
            Level::Heist(_) => GameId::Heist,
            Level::Chaser(_) => GameId::Chaser,
            Level::Miner(_) => GameId::Miner,
            Level::Leaper(_) => GameId::Leaper,
            Level::CoinRun(_) => GameId::CoinRun,
            Level::Ninja(_) => GameId::Ninja,
            Level::BigFish(_) => GameId::BigFish,
            Level::CaveFlyer(_) => GameId::CaveFlyer,
        }
    }

    pub fn start(&self, params: &Params) -> Box<dyn GameLogic> {
        match self {
            Level::Maze(l) => Box::new(l.start()),
            Level::Heist(l) => Box::new(l.start()),
            Level::Chaser(l) => Box::new(l.start(&params.chaser)),
            Level::Miner(l) => Box::new(l.start()),
            Level::Leaper(l) => Box::new(l.start()),
            Level::CoinRun(l) => Box::new(l.start(&params.coinrun)),
            Level::Ninja(l) => Box::new(l.start(&params.ninja)),
            Level::BigFish(l) => Box::new(l.start(&params.bigfish)),
            Level::CaveFlyer(l) => Box::new(l.start(&params.caveflyer)),
        }
    }

    /// Runs the game's oracle.
    pub fn solve(&self, params: &Params) -> Verdict {
        match self {
            Level::Maze(l) => l.solve(),
            Level::Heist(l) => l.solve(),
            Level::Chaser(l) => l.solve(),
            Level::Miner(l) => l.solve(),
            Level::Leaper(l) => l.solve(),
            Level::CoinRun(l) => l.solve(&params.coinrun),
            Level::Ninja(l) => l.solve(&params.ninja),
            Level::BigFish(l) => l.solve(&params.bigfish),
            Level::CaveFlyer(l) => l.solve(&params.caveflyer),
        }
    }

    /// Oracle verdict with action witnesses replayed through the real dynamics;
    /// a witness that fails to complete the level downgrades to `Unknown`.
    pub fn verified_verdict(&self, params: &Params) -> Verdict {
        let v = self.solve(params);
        if let Some(Witness::Actions(script)) = v.witness() {
            if !replay_completes(self.start(params).as_mut(), script) {
                return Verdict::Unknown;
            }
        }
        v
    }

    pub fn layout(&self) -> &GridLayout {
        match self {
            Level::Maze(l) => &l.layout,
            Level::Heist(l) => &l.layout,
            Level::Chaser(l) => &l.layout,
            Level::Miner(l) => &l.layout,
            Level::Leaper(l) => &l.layout,
            Level::CoinRun(l) => &l.level.layout,
            Level::Ninja(l) => &l.level.layout,
            Level::BigFish(l) => &l.layout,
            Level::CaveFlyer(l) => &l.layout,
        }
    }

    /// Layout statistics for reports.
    pub fn stats(&self) -> Map<String, Value> {
        let mut m = Map::new();
        let g = self.layout();
        m.insert("width".into(), g.width().into());
        m.insert("height".into(), g.height().into());
        match self {
            Level::Maze(l) => {
                m.insert("cells_w".into(), l.cells.0.into());
                m.insert("cells_h".into(), l.cells.1.into());
            }
            Level::Heist(l) => {
                m.insert("locks".into(), l.locks.len().into());
            }
            Level::Chaser(l) => {
                m.insert("orbs".into(), l.orbs.len().into());
                m.insert("enemies".into(), l.enemies.len().into());
            }
            Level::Miner(l) => {
                m.insert("diamonds".into(), l.diamonds().into());
                m.insert("boulders".into(), l.boulders().into());
            }
            Level::Leaper(l) => {
                m.insert("road_lanes".into(), l.road_lanes.into());
                m.insert("water_lanes".into(), l.water_lanes.into());
            }
            Level::CoinRun(l) => {
                m.insert("sections".into(), l.level.sections.into());
                m.insert("platforms".into(), l.level.platforms.len().into());
            }
            Level::Ninja(l) => {
                m.insert("sections".into(), l.level.sections.into());
                m.insert("platforms".into(), l.level.platforms.len().into());
                m.insert("decoys".into(), l.level.platforms.iter().filter(|p| !p.critical).count().into());
            }
            Level::BigFish(_) => {}
            Level::CaveFlyer(l) => {
                m.insert("targets".into(), l.targets.len().into());
                m.insert("obstacles".into(), l.obstacles.len().into());
            }
        }
        m
    }
}

/// Whether `script` completes the level from its initial state.
pub fn replay_completes(state: &mut dyn GameLogic, script: &[u8]) -> bool {
    for &a in script {
        let Ok(intent) = decode_action(a) else { return false };
        match state.tick(intent).event {
            Event::Complete => return true,
            Event::Fail => return false,
            Event::Continue => {}
        }
    }
    false
}
