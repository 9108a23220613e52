//! The annealing weight `beta(e)` and the per-step reward blend.
//!
//! An episode-indexed weight decays from `beta(0)` toward zero, so training
//! starts on the assistant reward and ends exactly on the target reward. The
//! blend `beta * r_assist + (1 - beta) * r_target` is applied by the learner
//! at collection time; environments always report both rewards.

use crate::error::{Error, Result};

/// Below this value an exponential schedule snaps to exactly zero, so the
/// blended objective eventually coincides with the target objective.
pub const DEFAULT_EXP_CUTOFF: f64 = 1e-6;

/// Annealing schedule for the assistant-reward weight.
#[derive(Debug, Clone, PartialEq)]
pub enum BetaSchedule {
    /// `beta(e) = beta0 * lambda^e`, snapped to 0 below `cutoff`.
    Exponential {
        beta0: f64,
        lambda: f64,
        cutoff: f64,
    },
    /// `beta(e) = max(0, (end_episode - e) * beta0 / end_episode)`; exactly 0
    /// for every `e >= end_episode`.
    Linear { beta0: f64, end_episode: usize },
    /// `beta(e) = 0` for all e: the target-reward-only baseline.
    ConstantZero,
}

impl BetaSchedule {
    pub fn exponential(beta0: f64, lambda: f64) -> Result<Self> {
        Self::exponential_with_cutoff(beta0, lambda, DEFAULT_EXP_CUTOFF)
    }

    pub fn exponential_with_cutoff(beta0: f64, lambda: f64, cutoff: f64) -> Result<Self> {
        check_beta0(beta0)?;
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(Error::invalid(format!(
                "exponential schedule requires lambda in (0, 1), got {lambda}"
            )));
        }
        if !(cutoff >= 0.0 && cutoff.is_finite()) {
            return Err(Error::invalid(format!(
                "cutoff must be a finite non-negative real, got {cutoff}"
            )));
        }
        Ok(BetaSchedule::Exponential {
            beta0,
            lambda,
            cutoff,
        })
    }

    pub fn linear(beta0: f64, end_episode: usize) -> Result<Self> {
        check_beta0(beta0)?;
        if end_episode == 0 {
            return Err(Error::invalid(
                "linear schedule requires end_episode >= 1".to_string(),
            ));
        }
        Ok(BetaSchedule::Linear {
            beta0,
            end_episode,
        })
    }

    pub fn constant_zero() -> Self {
        BetaSchedule::ConstantZero
    }

    /// Weight at episode `e`. Always in `[0, beta0]` and non-increasing in `e`.
    pub fn beta_at(&self, episode: usize) -> f64 {
        match *self {
            BetaSchedule::Exponential {
                beta0,
                lambda,
                cutoff,
            } => {
                let beta = if episode <= i32::MAX as usize {
                    beta0 * lambda.powi(episode as i32)
                } else {
                    0.0
                };
                if beta < cutoff {
                    0.0
                } else {
                    beta.min(beta0)
                }
            }
            BetaSchedule::Linear {
                beta0,
                end_episode,
            } => {
                if episode >= end_episode {
                    0.0
                } else {
                    (end_episode - episode) as f64 * beta0 / end_episode as f64
                }
            }
            BetaSchedule::ConstantZero => 0.0,
        }
    }

    pub fn beta0(&self) -> f64 {
        match *self {
            BetaSchedule::Exponential { beta0, .. } | BetaSchedule::Linear { beta0, .. } => beta0,
            BetaSchedule::ConstantZero => 0.0,
        }
    }
}

fn check_beta0(beta0: f64) -> Result<()> {
    if (0.0..=1.0).contains(&beta0) {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "beta0 must lie in [0, 1], got {beta0}"
        )))
    }
}

/// `beta * r_assist + (1 - beta) * r_target`.
///
/// The endpoints are exact: `beta = 0` returns `r_target` bitwise and
/// `beta = 1` returns `r_assist` bitwise.
pub fn blend(r_target: f64, r_assist: f64, beta: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&beta), "beta out of range: {beta}");
    if beta == 0.0 {
        r_target
    } else if beta == 1.0 {
        r_assist
    } else {
        beta * r_assist + (1.0 - beta) * r_target
    }
}
