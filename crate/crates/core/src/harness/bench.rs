use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::engine::EnvConfig;
use crate::error::Result;
use crate::games::{GameId, NUM_ACTIONS};
use crate::rng::RngStream;
use crate::vec_env::VecEnv;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchResult {
    pub game: GameId,
    pub num_envs: usize,
    pub threads: usize,
    pub render: bool,
    /// Environment steps taken (batch steps times slots).
    pub steps: u64,
    pub seconds: f64,
    pub steps_per_sec: f64,
    pub steps_per_sec_per_thread: f64,
}

/// Steps a batch under a uniform random policy for at least `duration`.
pub fn bench(
    config: &EnvConfig,
    num_envs: usize,
    threads: usize,
    duration: Duration,
    render: bool,
) -> Result<BenchResult> {
    let mut env = VecEnv::new(config, num_envs, Some(threads))?;
    env.set_render(render);
    let mut rng = RngStream::from_key(0xBE7C);
    let mut actions = vec![0u8; num_envs];
    // Warm-up so the measurement sees steady-state buffers.
    for _ in 0..10 {
        actions.iter_mut().for_each(|a| *a = rng.below(u32::from(NUM_ACTIONS)) as u8);
        env.step(&actions)?;
    }
    let start = Instant::now();
    let mut batches = 0u64;
    while start.elapsed() < duration {
        for _ in 0..16 {
            actions.iter_mut().for_each(|a| *a = rng.below(u32::from(NUM_ACTIONS)) as u8);
            env.step(&actions)?;
        }
        batches += 16;
    }
    let seconds = start.elapsed().as_secs_f64();
    let steps = batches * num_envs as u64;
    let steps_per_sec = steps as f64 / seconds;
    Ok(BenchResult {
        game: config.game,
        num_envs,
        threads,
        render,
        steps,
        seconds,
        steps_per_sec,
        steps_per_sec_per_thread: steps_per_sec / threads as f64,
    })
}
