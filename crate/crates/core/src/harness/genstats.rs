use std::collections::BTreeMap;
use std::ops::Range;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::games::{GameId, Level};
use crate::levelgen::Verdict;
use crate::params::Params;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenStats {
    pub game: GameId,
    pub difficulty: crate::games::Difficulty,
    pub memory: bool,
    pub seeds: u32,
    pub first_seed: u32,
    pub solvable: u32,
    pub unsolvable: u32,
    pub unknown: u32,
    pub generation_errors: u32,
    pub solvable_rate: f64,
    pub unknown_rate: f64,
    /// Every seed regenerated to an identical level.
    pub reproducible: bool,
    /// Per numeric layout statistic.
    pub layout: BTreeMap<String, Summary>,
    /// Seeds whose verdict was not solvable, at most 100.
    pub failures: Vec<u32>,
    /// Pearson correlation of road and water lane counts (Leaper only).
    pub lane_correlation: Option<f64>,
}

enum Outcome {
    Solved,
    Unsolvable,
    Unknown,
    Error,
}

struct SeedResult {
    seed: u32,
    outcome: Outcome,
    reproducible: bool,
    stats: serde_json::Map<String, Value>,
}

fn examine(game: GameId, params: &Params, seed: u32, memory: bool) -> SeedResult {
    let Ok(level) = Level::generate(game, params, seed, memory) else {
        return SeedResult { seed, outcome: Outcome::Error, reproducible: true, stats: Default::default() };
    };
    let stats = level.stats();
    let reproducible = Level::generate(game, params, seed, memory)
        .map(|again| again.layout() == level.layout() && again.stats() == stats)
        .unwrap_or(false);
    let outcome = match level.verified_verdict(params) {
        Verdict::Solvable(_) => Outcome::Solved,
        Verdict::Unsolvable => Outcome::Unsolvable,
        Verdict::Unknown => Outcome::Unknown,
    };
    SeedResult { seed, outcome, reproducible, stats }
}

/// Generates and solves every seed in `seeds`, on `threads` workers.
pub fn genstats(game: GameId, params: &Params, seeds: Range<u32>, memory: bool, threads: usize) -> Result<GenStats> {
    if seeds.is_empty() {
        return Err(Error::Config("empty seed range".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    let results: Vec<SeedResult> =
        pool.install(|| seeds.clone().into_par_iter().map(|s| examine(game, params, s, memory)).collect());

    let n = results.len() as u32;
    let count = |f: fn(&Outcome) -> bool| results.iter().filter(|r| f(&r.outcome)).count() as u32;
    let solvable = count(|o| matches!(o, Outcome::Solved));
    let unknown = count(|o| matches!(o, Outcome::Unknown));

    let mut columns: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for r in &results {
        for (k, v) in &r.stats {
            if let Some(x) = v.as_f64() {
                columns.entry(k.clone()).or_default().push(x);
            }
        }
    }
    let layout = columns
        .iter()
        .map(|(k, xs)| {
            let s = Summary {
                min: xs.iter().copied().fold(f64::INFINITY, f64::min),
                max: xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                mean: xs.iter().sum::<f64>() / xs.len() as f64,
            };
            (k.clone(), s)
        })
        .collect();
    let lane_correlation = match (columns.get("road_lanes"), columns.get("water_lanes")) {
        (Some(a), Some(b)) => Some(pearson(a, b)),
        _ => None,
    };
    Ok(GenStats {
        game,
        difficulty: params.difficulty,
        memory,
        seeds: n,
        first_seed: seeds.start,
        solvable,
        unsolvable: count(|o| matches!(o, Outcome::Unsolvable)),
        unknown,
        generation_errors: count(|o| matches!(o, Outcome::Error)),
        solvable_rate: f64::from(solvable) / f64::from(n),
        unknown_rate: f64::from(unknown) / f64::from(n),
        reproducible: results.iter().all(|r| r.reproducible),
        layout,
        failures: results.iter().filter(|r| !matches!(r.outcome, Outcome::Solved)).map(|r| r.seed).take(100).collect(),
        lane_correlation,
    })
}

pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len()) as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    sab / (saa * sbb).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::Difficulty;

    #[test]
    fn maze_is_always_solvable() {
        let s = genstats(GameId::Maze, Params::builtin(Difficulty::Hard), 0..300, false, 1).unwrap();
        assert_eq!(s.solvable, 300);
        assert!(s.reproducible);
        assert_eq!(s.layout["cells_w"].min, 3.0);
        assert!(s.lane_correlation.is_none());
    }

    #[test]
    fn pearson_of_a_line_is_one() {
        let a = [1.0, 2.0, 3.0, 4.0];
        let b = [3.0, 5.0, 7.0, 9.0];
        assert!((pearson(&a, &b) - 1.0).abs() < 1e-12);
    }
}
