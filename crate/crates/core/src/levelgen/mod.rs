//! Procedural generation algorithms and solvability search.

pub mod cave;
pub mod maze;
pub mod platforms;
pub mod solve;

pub use cave::{cellular_automata_cave, CaveParams, Fraction};
pub use maze::{kruskal_maze, remove_dead_ends};
pub use platforms::{platform_sequence, Placement, Platform, PlatformGame, PlatformLevel, PlatformRecipe};
pub use solve::{Verdict, Witness};
