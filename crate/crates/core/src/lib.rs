pub mod analysis;
pub mod cli;
pub mod config;
pub mod executor;
pub mod geometry;
pub mod mission;
pub mod rng;
pub mod scene;
pub mod sensor;
pub mod targeting;
