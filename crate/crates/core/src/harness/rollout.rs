use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::norm::{score, ScoreReport};
use crate::engine::{EnvConfig, StreamHash};
use crate::error::{Error, Result};
use crate::games::NUM_ACTIONS;
use crate::rng::RngStream;
use crate::vec_env::VecEnv;

/// One line of an episode log.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub t: u64,
    pub action: u8,
    pub reward: f64,
    pub done: bool,
    pub level_seed: u32,
    /// Running observation/reward digest, 16 hex digits.
    pub state_hash: String,
}

pub enum Policy {
    /// Uniform over the 15 actions, from a stream keyed by the seed.
    Random { seed: u64 },
    /// Fixed action list; the rollout ends early if it runs out.
    Script(Vec<u8>),
    /// Re-executes a log and checks every record against the new run.
    Replay(Vec<StepRecord>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RolloutSummary {
    pub config: EnvConfig,
    pub episodes: usize,
    pub steps: u64,
    pub returns: Vec<f64>,
    pub mean_return: f64,
    /// Levels finished per episode, as a histogram keyed by count.
    pub levels_completed: BTreeMap<u32, usize>,
    pub report: ScoreReport,
    /// Digest after the final step.
    pub final_hash: String,
}

pub fn hash_hex(h: u64) -> String {
    format!("{h:016x}")
}

/// Runs `episodes` complete episodes (or the whole log, for a replay) on a
/// single-slot batch, writing one JSON line per step to `log`.
pub fn rollout(
    config: &EnvConfig,
    policy: Policy,
    episodes: usize,
    mut log: Option<&mut dyn Write>,
) -> Result<RolloutSummary> {
    let mut env = VecEnv::new(config, 1, Some(1))?;
    let mut hash = StreamHash::new(env.env(0).params());
    let mut rng = match policy {
        Policy::Random { seed } => Some(RngStream::from_key(seed)),
        _ => None,
    };
    let (script, recorded): (Vec<u8>, Option<&[StepRecord]>) = match &policy {
        Policy::Script(s) => (s.clone(), None),
        Policy::Replay(r) => (r.iter().map(|s| s.action).collect(), Some(r.as_slice())),
        Policy::Random { .. } => (Vec::new(), None),
    };
    let target = if recorded.is_some() { usize::MAX } else { episodes };

    let mut returns = Vec::new();
    let mut levels = BTreeMap::new();
    let mut t = 0u64;
    while returns.len() < target {
        let action = match &mut rng {
            Some(r) => r.below(u32::from(NUM_ACTIONS)) as u8,
            None => match script.get(t as usize) {
                Some(&a) => a,
                None => break,
            },
        };
        env.step(&[action])?;
        let (reward, done, info) = (f64::from(env.rewards()[0]), env.dones()[0] == 1, env.infos()[0]);
        let rec = StepRecord {
            t,
            action,
            reward,
            done,
            level_seed: info.level_seed,
            state_hash: hash_hex(hash.absorb(env.observation(0), reward, done)),
        };
        if let Some(expected) = recorded.and_then(|r| r.get(t as usize)) {
            if *expected != rec {
                return Err(Error::DeterminismViolation {
                    step: t,
                    detail: format!(
                        "recorded {}, replayed {}",
                        serde_json::to_string(expected).unwrap_or_default(),
                        serde_json::to_string(&rec).unwrap_or_default()
                    ),
                });
            }
        }
        if let Some(w) = log.as_deref_mut() {
            serde_json::to_writer(&mut *w, &rec).map_err(|e| Error::Io(e.to_string()))?;
            w.write_all(b"\n")?;
        }
        if done {
            returns.push(info.episode_return.unwrap_or(0.0));
            *levels.entry(info.levels_completed).or_insert(0) += 1;
        }
        t += 1;
    }

    let cfg = env.env(0).config().clone();
    let game = cfg.game.name().to_string();
    let eps: Vec<_> = returns.iter().map(|&r| (game.clone(), cfg.table(), r)).collect();
    Ok(RolloutSummary {
        episodes: returns.len(),
        steps: t,
        mean_return: if returns.is_empty() { f64::NAN } else { returns.iter().sum::<f64>() / returns.len() as f64 },
        returns,
        levels_completed: levels,
        report: score(&eps)?,
        final_hash: hash_hex(hash.value()),
        config: cfg,
    })
}

/// Parses a JSONL episode log.
pub fn read_log(text: &str) -> Result<Vec<StepRecord>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| Error::Config(format!("log line {}: {e}", i + 1))))
        .collect()
}
