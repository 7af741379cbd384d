use std::collections::BTreeSet;

use arcadia_core::engine::{Env, EnvConfig, Mode, StreamHash};
use arcadia_core::games::{Difficulty, GameId, Level, NOOP, NUM_ACTIONS};
use arcadia_core::levelgen::{Verdict, Witness};
use arcadia_core::params::Params;
use arcadia_core::render::{MASK_COLOR, OBS_BYTES};
use arcadia_core::rng::RngStream;

fn run(config: &EnvConfig, steps: usize) -> (u64, Vec<u32>) {
    let mut env = Env::new(config).unwrap();
    let mut obs = vec![0u8; OBS_BYTES];
    env.reset(&mut obs).unwrap();
    let mut h = StreamHash::new(env.params());
    let mut rng = RngStream::from_key(42);
    let mut seeds = vec![env.level_seed()];
    for _ in 0..steps {
        let r = env.step_into(rng.below(u32::from(NUM_ACTIONS)) as u8, &mut obs, true).unwrap();
        h.absorb(&obs, r.reward, r.done);
        if r.done {
            seeds.push(env.level_seed());
        }
    }
    (h.value(), seeds)
}

#[test]
fn reset_and_step_are_deterministic() {
    for g in GameId::ALL {
        let mut c = EnvConfig::new(g);
        c.rand_seed = 3;
        c.max_episode_steps = 150;
        assert_eq!(run(&c, 600), run(&c, 600), "{g}");
    }
}

#[test]
fn rand_seed_changes_the_episode_sequence() {
    let mut c = EnvConfig::new(GameId::Maze);
    c.max_episode_steps = 20;
    let a = run(&c, 400).1;
    c.rand_seed = 1;
    let b = run(&c, 400).1;
    assert_ne!(a, b);
}

#[test]
fn window_seeds_stay_in_window() {
    let mut c = EnvConfig::new(GameId::Heist);
    c.num_levels = 10;
    c.start_level = 300;
    c.max_episode_steps = 5;
    let (_, seeds) = run(&c, 2000);
    let distinct: BTreeSet<u32> = seeds.iter().copied().collect();
    assert!(distinct.iter().all(|s| (300..310).contains(s)));
    assert_eq!(distinct.len(), 10);
}

#[test]
fn exploration_pins_the_level_and_uses_hard_parameters() {
    let hard = Params::builtin(Difficulty::Hard);
    for g in GameId::ALL.into_iter().filter(|g| g.supports_exploration()) {
        let mut c = EnvConfig::new(g);
        c.mode = Mode::Exploration;
        c.difficulty = Difficulty::Easy;
        c.max_episode_steps = 10;
        let env = Env::new(&c).unwrap();
        assert_eq!(env.params().difficulty, Difficulty::Hard);
        assert_eq!(Some(&env.level_seed()), hard.exploration.get(&g));
        let (_, seeds) = run(&c, 300);
        assert!(seeds.iter().all(|s| Some(s) == hard.exploration.get(&g)));
    }
    let mut c = EnvConfig::new(GameId::Miner);
    c.mode = Mode::Exploration;
    assert_eq!(Env::new(&c).err().map(|e| e.code()), Some(2));
}

#[test]
fn memory_mode_masks_everything_but_the_patch() {
    for g in GameId::ALL.into_iter().filter(|g| g.memory_masks_view()) {
        let mut c = EnvConfig::new(g);
        c.mode = Mode::Memory;
        let env = Env::new(&c).unwrap();
        let mut obs = vec![0u8; OBS_BYTES];
        env.observe(&mut obs);
        let masked = obs.chunks_exact(3).filter(|p| *p == MASK_COLOR).count();
        // 7x7 tiles of a 16-tile view are visible: 28x28 of the 64x64 pixels.
        assert!(masked >= 64 * 64 - 28 * 28, "{g}: only {masked} masked pixels");
        assert!(masked < 64 * 64);
    }
}

#[test]
fn memory_mode_enlarges_the_world() {
    let hard = Params::builtin(Difficulty::Hard);
    for g in GameId::ALL.into_iter().filter(|g| g.supports_memory()) {
        let size = |memory: bool| {
            (0..100)
                .map(|s| {
                    let l = Level::generate(g, hard, s, memory).unwrap();
                    f64::from(l.layout().width() * l.layout().height())
                })
                .sum::<f64>()
        };
        assert!(size(true) > size(false), "{g}");
    }
}

#[test]
fn sequential_coinrun_chains_and_counts_levels() {
    let hard = Params::builtin(Difficulty::Hard);
    let mut c = EnvConfig::new(GameId::CoinRun);
    c.mode = Mode::Sequential;
    c.start_level = 12;
    let mut env = Env::new(&c).unwrap();
    let mut obs = vec![0u8; OBS_BYTES];
    env.reset(&mut obs).unwrap();
    let mut total = 0.0;
    for k in 0..2u32 {
        let level = Level::generate(GameId::CoinRun, hard, 12 + k, false).unwrap();
        let Verdict::Solvable(Witness::Actions(script)) = level.solve(hard) else { panic!("level {k}") };
        let mut last = None;
        for &a in &script {
            let r = env.step(a, &mut obs).unwrap();
            total += r.reward;
            last = Some(r);
        }
        let r = last.unwrap();
        assert!(r.info.level_complete && !r.done);
        assert_eq!(r.info.levels_completed, k + 1);
    }
    assert_eq!(env.level_seed(), 14);
    assert_eq!(total, 20.0);
    assert_eq!(env.episode_return().to_f64(), 20.0);
}

#[test]
fn timeout_ends_the_episode_with_a_flag() {
    let mut c = EnvConfig::new(GameId::Maze);
    c.max_episode_steps = 7;
    let mut env = Env::new(&c).unwrap();
    let mut obs = vec![0u8; OBS_BYTES];
    for t in 1..=7 {
        let r = env.step(NOOP, &mut obs).unwrap();
        assert_eq!(r.done, t == 7);
        assert_eq!(r.info.timeout, t == 7);
    }
    assert_eq!(env.step(NOOP, &mut obs).unwrap_err().code(), 1);
}
