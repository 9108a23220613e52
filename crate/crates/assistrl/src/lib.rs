//! Assistant-reward annealing for reinforcement learning.
//!
//! Environments report two rewards per transition: the target reward that
//! defines the task, and a denser assistant reward aligned with it. A
//! per-episode weight `beta(e)` blends the two during training and decays to
//! zero, so late training optimizes exactly the target objective while early
//! training rides the richer feedback. Value tables and network weights
//! persist across episodes, carrying what was learned on each intermediate
//! objective into the next.
//!
//! The crate provides:
//!
//! - [`schedule`]: the annealing weight and the reward blend;
//! - [`mdp`]: the dual-reward environment contract, trajectories, returns;
//! - [`envs`]: a random-walk MRP with exact value oracles, a linear
//!   temperature-control task, and a nonlinear four-tank process;
//! - [`td`]: tabular TD(0) with the random-walk experiment loop;
//! - [`nn`]: a small dense-network kernel (forward, backprop, Adam, gradient
//!   checking, checkpoints);
//! - [`ppo`]: a clipped-surrogate policy-gradient learner with GAE;
//! - [`harness`]: config-driven seeded experiments with CSV and SVG output.

pub mod envs;
pub mod error;
pub mod harness;
pub mod mdp;
pub mod nn;
pub mod ppo;
pub mod rng;
pub mod schedule;
pub mod td;

pub use error::{Error, Result};
