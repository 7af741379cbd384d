//! Batched stepping with auto-reset over caller-visible contiguous buffers.
//!
//! Layout: `observations` holds `n` frames back to back, slot-major, each
//! 64 rows of 64 RGB pixels. `rewards`, `dones` and `infos` are indexed by slot.

use std::sync::Arc;

use rayon::prelude::*;

use crate::engine::{Env, EnvConfig, StepInfo};
use crate::error::{Error, Result};
use crate::games::NUM_ACTIONS;
use crate::params::Params;
use crate::render::OBS_BYTES;

/// Environment variable consulted when no thread count is configured.
pub const THREADS_ENV: &str = "ARCADIA_NUM_THREADS";

pub struct VecEnv {
    envs: Vec<Env>,
    obs: Vec<u8>,
    rewards: Vec<f32>,
    dones: Vec<u8>,
    infos: Vec<StepInfo>,
    pool: Option<rayon::ThreadPool>,
}

impl VecEnv {
    /// `threads`: worker count; `None` reads [`THREADS_ENV`] and defaults to 1.
    pub fn new(config: &EnvConfig, n: usize, threads: Option<usize>) -> Result<VecEnv> {
        VecEnv::with_params(config, Arc::new(Params::builtin(config.table()).clone()), n, threads)
    }

    pub fn with_params(config: &EnvConfig, params: Arc<Params>, n: usize, threads: Option<usize>) -> Result<VecEnv> {
        if n == 0 {
            return Err(Error::Config("num_envs must be at least 1".into()));
        }
        let threads = match threads {
            Some(t) => t,
            None => match std::env::var(THREADS_ENV) {
                Ok(v) => v.parse().map_err(|_| Error::Config(format!("{THREADS_ENV}={v} is not a count")))?,
                Err(_) => 1,
            },
        };
        if threads == 0 {
            return Err(Error::Config("num_threads must be at least 1".into()));
        }
        let slot = |i: usize| u32::try_from(i).map_err(|_| Error::Config("too many slots".into()));
        let envs = (0..n).map(|i| Env::with_slot(config, params.clone(), slot(i)?)).collect::<Result<Vec<_>>>()?;
        let pool = if threads > 1 {
            let p = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
            Some(p)
        } else {
            None
        };
        let mut v = VecEnv {
            envs,
            obs: vec![0; n * OBS_BYTES],
            rewards: vec![0.0; n],
            dones: vec![0; n],
            infos: vec![StepInfo::default(); n],
            pool,
        };
        for (env, frame) in v.envs.iter().zip(v.obs.chunks_exact_mut(OBS_BYTES)) {
            env.observe(frame);
        }
        for (env, info) in v.envs.iter().zip(&mut v.infos) {
            info.level_seed = env.level_seed();
        }
        Ok(v)
    }

    pub fn len(&self) -> usize {
        self.envs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.envs.is_empty()
    }

    /// Advances every slot one tick. Actions are validated before any slot moves.
    pub fn step(&mut self, actions: &[u8]) -> Result<()> {
        if actions.len() != self.envs.len() {
            return Err(Error::Domain(format!("expected {} actions, got {}", self.envs.len(), actions.len())));
        }
        if let Some(&a) = actions.iter().find(|&&a| a >= NUM_ACTIONS) {
            return Err(Error::Domain(format!("action {a} outside 0..=14")));
        }
        match &self.pool {
            Some(p) => p.install(|| {
                self.envs
                    .par_iter_mut()
                    .zip(self.obs.par_chunks_exact_mut(OBS_BYTES))
                    .zip(self.rewards.par_iter_mut())
                    .zip(self.dones.par_iter_mut())
                    .zip(self.infos.par_iter_mut())
                    .zip(actions.par_iter())
                    .try_for_each(|(((((e, f), r), d), i), &a)| step_slot(e, f, r, d, i, a))
            }),
            None => self
                .envs
                .iter_mut()
                .zip(self.obs.chunks_exact_mut(OBS_BYTES))
                .zip(self.rewards.iter_mut())
                .zip(self.dones.iter_mut())
                .zip(self.infos.iter_mut())
                .zip(actions)
                .try_for_each(|(((((e, f), r), d), i), &a)| step_slot(e, f, r, d, i, a)),
        }
    }

    /// Observations, `len() * 64 * 64 * 3` bytes.
    pub fn observations(&self) -> &[u8] {
        &self.obs
    }

    pub fn observation(&self, slot: usize) -> &[u8] {
        &self.obs[slot * OBS_BYTES..(slot + 1) * OBS_BYTES]
    }

    pub fn rewards(&self) -> &[f32] {
        &self.rewards
    }

    /// 1 where the last step ended an episode (the slot has already been reset).
    pub fn dones(&self) -> &[u8] {
        &self.dones
    }

    pub fn infos(&self) -> &[StepInfo] {
        &self.infos
    }

    pub fn set_render(&mut self, on: bool) {
        for e in &mut self.envs {
            e.set_render(on);
        }
    }

    pub fn env(&self, slot: usize) -> &Env {
        &self.envs[slot]
    }

    pub fn threads(&self) -> usize {
        self.pool.as_ref().map_or(1, |p| p.current_num_threads())
    }
}

fn step_slot(
    env: &mut Env,
    frame: &mut [u8],
    reward: &mut f32,
    done: &mut u8,
    info: &mut StepInfo,
    a: u8,
) -> Result<()> {
    let r = env.step_into(a, frame, true)?;
    *reward = r.reward as f32;
    *done = u8::from(r.done);
    *info = r.info;
    Ok(())
}
