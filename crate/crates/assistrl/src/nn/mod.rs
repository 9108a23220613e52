//! Minimal dense-network kernel: forward pass, reverse-mode gradients,
//! scaled-uniform initialization, Adam, and a finite-difference checker.

pub mod adam;
pub mod checkpoint;
pub mod grad_check;
pub mod mlp;

pub use adam::{adam_step, AdamState, DEFAULT_LR};
pub use checkpoint::{load_params, save_params, Checkpoint};
pub use grad_check::{grad_check, DEFAULT_PERTURBATION};
pub use mlp::{Activation, ForwardCache, Layer, MlpGrads, MlpParams};
