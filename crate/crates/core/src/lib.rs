pub mod engine;
pub mod entity;
pub mod error;
pub mod ffi;
pub mod fixed;
pub mod games;
pub mod grid;
pub mod harness;
pub mod levelgen;
pub mod params;
pub mod physics;
pub mod render;
pub mod rng;
pub mod vec_env;
