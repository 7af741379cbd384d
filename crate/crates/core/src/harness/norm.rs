use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::games::Difficulty;
use crate::params::{norm_table, NormRow};

pub fn norm_row(game: &str, difficulty: Difficulty) -> Result<NormRow> {
    let e = norm_table()
        .get(&game.to_ascii_lowercase())
        .ok_or_else(|| Error::Config(format!("no normalization constants for `{game}`")))?;
    Ok(match difficulty {
        Difficulty::Easy => e.easy,
        Difficulty::Hard => e.hard,
    })
}

/// `(r - r_min) / (r_max - r_min)`, unclamped.
pub fn normalized_return(r: f64, game: &str, difficulty: Difficulty) -> Result<f64> {
    let row = norm_row(game, difficulty)?;
    Ok((r - row.min) / (row.max - row.min))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameScore {
    pub game: String,
    pub difficulty: Difficulty,
    pub episodes: usize,
    pub mean_return: f64,
    pub mean_normalized: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub games: Vec<GameScore>,
    /// Unweighted mean of the per-game normalized means.
    pub mean_normalized: f64,
}

/// Aggregates `(game, difficulty, episode return)` triples.
pub fn score(episodes: &[(String, Difficulty, f64)]) -> Result<ScoreReport> {
    let mut groups: BTreeMap<(String, &str), (Difficulty, Vec<f64>)> = BTreeMap::new();
    for (g, d, r) in episodes {
        groups.entry((g.to_ascii_lowercase(), d.name())).or_insert((*d, Vec::new())).1.push(*r);
    }
    let mut games = Vec::with_capacity(groups.len());
    for ((game, _), (difficulty, rs)) in groups {
        let mean_return = rs.iter().sum::<f64>() / rs.len() as f64;
        let norm = rs.iter().map(|&r| normalized_return(r, &game, difficulty)).collect::<Result<Vec<_>>>()?;
        games.push(GameScore {
            mean_normalized: norm.iter().sum::<f64>() / norm.len() as f64,
            game,
            difficulty,
            episodes: rs.len(),
            mean_return,
        });
    }
    let mean_normalized = if games.is_empty() {
        f64::NAN
    } else {
        games.iter().map(|g| g.mean_normalized).sum::<f64>() / games.len() as f64
    };
    Ok(ScoreReport { games, mean_normalized })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_examples() {
        assert_eq!(normalized_return(10.0, "coinrun", Difficulty::Hard).unwrap(), 1.0);
        assert_eq!(normalized_return(4.0, "maze", Difficulty::Hard).unwrap(), 0.0);
        assert_eq!(normalized_return(20.0, "bigfish", Difficulty::Hard).unwrap(), 0.5);
        assert!(normalized_return(-1.0, "maze", Difficulty::Hard).unwrap() < 0.0);
        assert!(normalized_return(1.0, "pong", Difficulty::Hard).is_err());
    }

    #[test]
    fn aggregate_is_unweighted_over_games() {
        let eps = vec![
            ("maze".to_string(), Difficulty::Hard, 10.0),
            ("maze".to_string(), Difficulty::Hard, 10.0),
            ("maze".to_string(), Difficulty::Hard, 10.0),
            ("coinrun".to_string(), Difficulty::Hard, 5.0),
        ];
        let r = score(&eps).unwrap();
        assert_eq!(r.games.len(), 2);
        assert_eq!(r.mean_normalized, 0.5);
    }
}
