#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use arcadia_core::engine::{EnvConfig, Mode, StreamHash};
use arcadia_core::games::{Difficulty, GameId, NUM_ACTIONS};
use arcadia_core::render::OBS_BYTES;
use arcadia_core::rng::{fnv1a64, RngStream};
use arcadia_core::vec_env::VecEnv;

pub const SCRIPT_LEN: usize = 1000;

/// Twenty fixed (config, action script) cases: every game on two level
/// seeds, plus a memory-mode maze and a sequential coinrun.
pub fn golden_cases() -> Vec<(String, EnvConfig, Vec<u8>)> {
    let mut out = Vec::new();
    for (i, g) in GameId::ALL.into_iter().enumerate() {
        for (j, seed) in [11u32, 2024].into_iter().enumerate() {
            let mut c = EnvConfig::new(g);
            c.num_levels = 1;
            c.start_level = seed;
            c.difficulty = if j == 0 { Difficulty::Hard } else { Difficulty::Easy };
            out.push((format!("{}-{}-{}", g.name(), c.difficulty.name(), seed), c, script(i as u64 * 31 + j as u64)));
        }
    }
    let mut m = EnvConfig::new(GameId::Maze);
    m.mode = Mode::Memory;
    m.num_levels = 1;
    m.start_level = 7;
    out.push(("maze-memory-7".into(), m, script(900)));
    let mut s = EnvConfig::new(GameId::CoinRun);
    s.mode = Mode::Sequential;
    s.start_level = 3;
    out.push(("coinrun-sequential-3".into(), s, script(901)));
    out
}

pub fn script(seed: u64) -> Vec<u8> {
    let mut r = RngStream::from_key(seed);
    (0..SCRIPT_LEN).map(|_| r.below(u32::from(NUM_ACTIONS)) as u8).collect()
}

/// Final observation/reward digest of every slot after the script, with the
/// same script applied to all `slots` slots.
pub fn run_hashes(config: &EnvConfig, script: &[u8], slots: usize, threads: usize) -> Vec<u64> {
    let mut env = VecEnv::new(config, slots, Some(threads)).expect("valid config");
    let mut hashes = vec![StreamHash::new(env.env(0).params()); slots];
    let mut actions = vec![0u8; slots];
    for &a in script {
        actions.fill(a);
        env.step(&actions).expect("step");
        for (i, h) in hashes.iter_mut().enumerate() {
            h.absorb(env.observation(i), f64::from(env.rewards()[i]), env.dones()[i] == 1);
        }
    }
    hashes.iter().map(|h| h.value()).collect()
}

pub fn first_frame_hash(config: &EnvConfig) -> u64 {
    let env = VecEnv::new(config, 1, Some(1)).expect("valid config");
    assert_eq!(env.observations().len(), OBS_BYTES);
    fnv1a64(env.observations())
}

pub fn goldens_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("goldens.json")
}

/// `name -> (first frame hash, final stream hash)` as recorded.
pub fn load_goldens() -> BTreeMap<String, (String, String)> {
    let text = std::fs::read_to_string(goldens_path()).expect("goldens file");
    serde_json::from_str(&text).expect("goldens parse")
}

pub fn hex(h: u64) -> String {
    format!("{h:016x}")
}
