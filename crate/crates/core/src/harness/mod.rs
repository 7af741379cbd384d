//! Evaluation tooling: normalized scores, rollouts with replay checking,
//! generation statistics and throughput measurement.

pub mod bench;
pub mod genstats;
pub mod norm;
pub mod rollout;

pub use bench::{bench, BenchResult};
pub use genstats::{genstats, GenStats};
pub use norm::{normalized_return, score, GameScore, ScoreReport};
pub use rollout::{rollout, Policy, RolloutSummary, StepRecord};
