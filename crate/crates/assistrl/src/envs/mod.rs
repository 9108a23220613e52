//! Benchmark environments with dual rewards.

pub mod four_tank;
pub mod random_walk;
pub mod temp_control;

pub use four_tank::FourTankEnv;
pub use random_walk::{rms_error, RandomWalkEnv};
pub use temp_control::TempControlEnv;
