//! Episode lifecycle shared by every game: level selection, stepping, timeouts and modes.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fixed::{Fixed, ONE_RAW};
use crate::games::{decode_action, Difficulty, Event, GameId, GameLogic, Level};
use crate::grid::Tile;
use crate::params::Params;
use crate::render::{render, Camera, SpriteAtlas, OBS_BYTES};
use crate::rng::{derive_stream, fnv1a64, labels, RngStream};

/// Side of the agent-centred view in memory mode, in tiles.
pub const MEMORY_VIEW_TILES: i32 = 16;
/// Memory-mode patch radius: a 7x7 tile window around the agent stays visible.
pub const MEMORY_PATCH_RADIUS: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Standard,
    /// One episode walks consecutive level seeds until a failure.
    Sequential,
    /// A single handpicked level, every episode.
    Exploration,
    /// Larger worlds; tile games see only a patch around the agent.
    Memory,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Standard => "standard",
            Mode::Sequential => "sequential",
            Mode::Exploration => "exploration",
            Mode::Memory => "memory",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnvConfig {
    pub game: GameId,
    pub difficulty: Difficulty,
    /// Size of the level-seed window; 0 draws from the whole distribution.
    pub num_levels: u32,
    pub start_level: u32,
    pub rand_seed: u32,
    pub mode: Mode,
    pub max_episode_steps: u32,
}

impl EnvConfig {
    pub fn new(game: GameId) -> EnvConfig {
        EnvConfig {
            game,
            difficulty: Difficulty::Hard,
            num_levels: 0,
            start_level: 0,
            rand_seed: 0,
            mode: Mode::Standard,
            max_episode_steps: Params::builtin(Difficulty::Hard).max_episode_steps,
        }
    }

    /// Checks mode support and applies mode-implied settings. Exploration
    /// pins the window to the game's handpicked seed under hard parameters.
    pub fn resolved(&self, params: &Params) -> Result<EnvConfig> {
        let mut c = self.clone();
        if c.max_episode_steps == 0 {
            return Err(Error::Config("max_episode_steps must be positive".into()));
        }
        match c.mode {
            Mode::Memory if !c.game.supports_memory() => {
                return Err(Error::Config(format!("{} has no memory mode", c.game)));
            }
            Mode::Exploration => {
                let seed = params
                    .exploration
                    .get(&c.game)
                    .filter(|_| c.game.supports_exploration())
                    .ok_or_else(|| Error::Config(format!("{} has no exploration mode", c.game)))?;
                c.num_levels = 1;
                c.start_level = *seed;
            }
            _ => {}
        }
        Ok(c)
    }

    /// Difficulty whose parameter table the mode uses.
    pub fn table(&self) -> Difficulty {
        match self.mode {
            Mode::Exploration | Mode::Memory => Difficulty::Hard,
            _ => self.difficulty,
        }
    }
}

/// Level seed for the next level of an episode.
pub fn select_level_seed(config: &EnvConfig, episode_rng: &mut RngStream, completed_this_episode: u32) -> u32 {
    if config.mode == Mode::Sequential {
        return config.start_level.wrapping_add(completed_this_episode);
    }
    if config.num_levels == 0 {
        episode_rng.below(1 << 31)
    } else {
        config.start_level.wrapping_add(episode_rng.below(config.num_levels))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StepInfo {
    /// Seed of the level the step was taken in.
    pub level_seed: u32,
    pub level_complete: bool,
    /// Set on the step that ended the episode by running out of time.
    pub timeout: bool,
    /// Levels finished so far this episode (sequential mode chains several).
    pub levels_completed: u32,
    /// Return of the finished episode, on done steps only.
    pub episode_return: Option<f64>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StepResult {
    pub reward: f64,
    pub done: bool,
    pub info: StepInfo,
}

/// One environment instance.
pub struct Env {
    config: EnvConfig,
    params: Arc<Params>,
    episode_rng: RngStream,
    level_seed: u32,
    state: Box<dyn GameLogic>,
    atlas: SpriteAtlas,
    steps: u32,
    episode_return: Fixed,
    completed: u32,
    done: bool,
    render_enabled: bool,
}

impl Env {
    /// Environment with the shipped parameter tables.
    pub fn new(config: &EnvConfig) -> Result<Env> {
        Env::with_slot(config, Arc::new(Params::builtin(config.table()).clone()), 0)
    }

    /// Environment `slot` of a batch; the slot index salts the episode stream.
    pub fn with_slot(config: &EnvConfig, params: Arc<Params>, slot: u32) -> Result<Env> {
        if params.difficulty != config.table() {
            return Err(Error::Config(format!(
                "{} mode needs the {} table, got {}",
                config.mode.name(),
                config.table().name(),
                params.difficulty.name()
            )));
        }
        let config = config.resolved(&params)?;
        let mut episode_rng = derive_stream(config.rand_seed, slot, labels::EPISODE);
        let level_seed = select_level_seed(&config, &mut episode_rng, 0);
        let (state, atlas) = Env::build(&config, &params, level_seed)?;
        Ok(Env {
            config,
            params,
            episode_rng,
            level_seed,
            state,
            atlas,
            steps: 0,
            episode_return: Fixed::ZERO,
            completed: 0,
            done: false,
            render_enabled: true,
        })
    }

    fn build(config: &EnvConfig, params: &Params, seed: u32) -> Result<(Box<dyn GameLogic>, SpriteAtlas)> {
        let level = Level::generate(config.game, params, seed, config.mode == Mode::Memory)
            .map_err(|e| Error::Generation(format!("{} level {seed}: {e}", config.game)))?;
        let atlas = crate::render::derive_theme(config.game, seed, params.theme_pool(config.game));
        Ok((level.start(params), atlas))
    }

    fn load_level(&mut self, seed: u32) -> Result<()> {
        let (state, atlas) = Env::build(&self.config, &self.params, seed)?;
        self.state = state;
        self.atlas = atlas;
        self.level_seed = seed;
        self.steps = 0;
        Ok(())
    }

    fn begin_episode(&mut self) -> Result<()> {
        self.completed = 0;
        self.episode_return = Fixed::ZERO;
        self.done = false;
        let seed = select_level_seed(&self.config, &mut self.episode_rng, 0);
        self.load_level(seed)
    }

    /// Starts a new episode and renders its first frame into `obs`.
    pub fn reset(&mut self, obs: &mut [u8]) -> Result<()> {
        self.begin_episode()?;
        self.observe(obs);
        Ok(())
    }

    /// Advances one tick. The frame written to `obs` is the post-step state,
    /// or, if `auto_reset` is set and the episode ended, the first frame of the next one.
    pub fn step_into(&mut self, action: u8, obs: &mut [u8], auto_reset: bool) -> Result<StepResult> {
        if self.done {
            return Err(Error::Usage("step called on a finished episode; reset first".into()));
        }
        let intent = decode_action(action)?;
        let tick = self.state.tick(intent);
        self.steps += 1;
        self.episode_return += tick.reward;
        let mut info = StepInfo { level_seed: self.level_seed, ..StepInfo::default() };
        let mut done = false;
        match tick.event {
            Event::Complete => {
                info.level_complete = true;
                self.completed += 1;
                if self.config.mode == Mode::Sequential {
                    let next = select_level_seed(&self.config, &mut self.episode_rng, self.completed);
                    self.load_level(next)?;
                } else {
                    done = true;
                }
            }
            Event::Fail => done = true,
            Event::Continue => {}
        }
        if !done && self.steps >= self.config.max_episode_steps {
            done = true;
            info.timeout = true;
        }
        info.levels_completed = self.completed;
        if done {
            info.episode_return = Some(self.episode_return.to_f64());
            self.done = true;
            if auto_reset {
                self.begin_episode()?;
            }
        }
        self.observe(obs);
        Ok(StepResult { reward: tick.reward.to_f64(), done, info })
    }

    pub fn step(&mut self, action: u8, obs: &mut [u8]) -> Result<StepResult> {
        self.step_into(action, obs, false)
    }

    /// Renders the current state. Memory mode on masked games swaps in an
    /// agent-centred camera and a 7x7 tile patch.
    pub fn observe(&self, obs: &mut [u8]) {
        debug_assert_eq!(obs.len(), OBS_BYTES);
        if !self.render_enabled {
            return;
        }
        let mut scene = self.state.scene();
        if self.config.mode == Mode::Memory && self.config.game.memory_masks_view() {
            let (ax, ay) = self.state.agent_tile();
            let c = ONE_RAW / 2;
            scene.camera = Camera::centered(ax * ONE_RAW + c, ay * ONE_RAW + c, MEMORY_VIEW_TILES, Tile::Wall);
            scene.patch = Some(((ax, ay), MEMORY_PATCH_RADIUS));
        }
        render(&scene, &self.atlas, obs);
    }

    /// Skips rasterization in `observe`; buffers keep their previous contents.
    pub fn set_render(&mut self, on: bool) {
        self.render_enabled = on;
    }

    pub fn config(&self) -> &EnvConfig {
        &self.config
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn level_seed(&self) -> u32 {
        self.level_seed
    }

    pub fn step_count(&self) -> u32 {
        self.steps
    }

    pub fn episode_return(&self) -> Fixed {
        self.episode_return
    }

    pub fn is_done(&self) -> bool {
        self.done
    }

    pub fn agent_tile(&self) -> (i32, i32) {
        self.state.agent_tile()
    }
}

/// Chained digest over an observation/reward stream, seeded with the
/// parameter-table digest so that retuning a table changes every hash.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StreamHash(u64);

impl StreamHash {
    pub fn new(params: &Params) -> StreamHash {
        StreamHash(fnv1a64(&params.digest))
    }

    pub fn absorb(&mut self, obs: &[u8], reward: f64, done: bool) -> u64 {
        let mut buf = [0u8; 17];
        buf[..8].copy_from_slice(&self.0.to_le_bytes());
        buf[8..16].copy_from_slice(&reward.to_bits().to_le_bytes());
        buf[16] = u8::from(done);
        self.0 = fnv1a64(&buf) ^ fnv1a64(obs).rotate_left(1);
        self.0
    }

    pub fn value(self) -> u64 {
        self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singleton_window_always_selects_its_seed() {
        let mut c = EnvConfig::new(GameId::Maze);
        c.num_levels = 1;
        c.start_level = 42;
        let mut rng = derive_stream(7, 0, labels::EPISODE);
        assert!((0..1000).all(|_| select_level_seed(&c, &mut rng, 0) == 42));
    }

    #[test]
    fn sequential_seed_counts_completions() {
        let mut c = EnvConfig::new(GameId::CoinRun);
        c.mode = Mode::Sequential;
        c.start_level = 100;
        let mut rng = derive_stream(0, 0, labels::EPISODE);
        assert_eq!(select_level_seed(&c, &mut rng, 3), 103);
    }

    #[test]
    fn unbounded_draws_stay_below_two_to_the_31() {
        let c = EnvConfig::new(GameId::Maze);
        let mut rng = derive_stream(3, 0, labels::EPISODE);
        assert!((0..10_000).all(|_| select_level_seed(&c, &mut rng, 0) < 1 << 31));
    }

    #[test]
    fn memory_mode_needs_support() {
        let mut c = EnvConfig::new(GameId::Leaper);
        c.mode = Mode::Memory;
        assert!(matches!(Env::new(&c), Err(Error::Config(_))));
        c.game = GameId::Maze;
        assert!(Env::new(&c).is_ok());
    }

    #[test]
    fn exploration_mode_needs_support() {
        let mut c = EnvConfig::new(GameId::BigFish);
        c.mode = Mode::Exploration;
        assert!(matches!(Env::new(&c), Err(Error::Config(_))));
    }

    #[test]
    fn stepping_a_finished_episode_is_a_usage_error() {
        let mut c = EnvConfig::new(GameId::Maze);
        c.max_episode_steps = 2;
        let mut env = Env::new(&c).unwrap();
        let mut obs = vec![0; OBS_BYTES];
        assert!(!env.step(4, &mut obs).unwrap().done);
        let r = env.step(4, &mut obs).unwrap();
        assert!(r.done && r.info.timeout && !r.info.level_complete);
        assert_eq!(r.reward, 0.0);
        assert!(matches!(env.step(4, &mut obs), Err(Error::Usage(_))));
        assert!(matches!(Env::new(&c).unwrap().step(15, &mut obs), Err(Error::Domain(_))));
    }

    #[test]
    fn maze_noop_does_nothing_and_special_is_ignored() {
        let mut env = Env::new(&EnvConfig::new(GameId::Maze)).unwrap();
        let mut obs = vec![0; OBS_BYTES];
        let start = env.agent_tile();
        for a in [4, 9, 10, 14] {
            let r = env.step(a, &mut obs).unwrap();
            assert_eq!(r.reward, 0.0);
            assert!(!r.done);
            assert_eq!(env.agent_tile(), start);
        }
    }
}
