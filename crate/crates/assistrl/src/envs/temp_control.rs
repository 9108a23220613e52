//! Linear temperature-control environment: three coupled heat sources.
//!
//! Dynamics `s' = A s + a + e` with a fixed tridiagonal `A` whose spectral
//! radius exceeds 1, so the uncontrolled system drifts out of the allowed
//! box `[-2, 2]^3`. The target reward charges for control power and adds a
//! flat penalty on constraint violation; the assistant reward carries only
//! the penalty term.

use crate::error::{Error, Result};
use crate::mdp::{DualRewardStep, EnvSpec, Environment};
use crate::rng::RngStream;

/// Heat-coupling matrix. Eigenvalues are `1.01 + 0.02 cos(k pi / 4)`,
/// k = 1..3, so the spectral radius is about 1.0241.
pub const COUPLING_MATRIX: [[f64; 3]; 3] = [
    [1.01, 0.01, 0.0],
    [0.01, 1.01, 0.01],
    [0.0, 0.01, 1.01],
];

pub const STATE_BOUND: f64 = 2.0;
pub const VIOLATION_PENALTY: f64 = 100.0;
pub const DEFAULT_NOISE_STD: f64 = 0.01;
pub const HORIZON: usize = 100;

#[derive(Debug, Clone)]
pub struct TempControlEnv {
    omega: f64,
    noise_std: f64,
    action_scale: f64,
    spec: EnvSpec,
}

impl TempControlEnv {
    /// `omega` weighs the control-power term of the target reward.
    pub fn new(omega: f64) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::invalid(format!(
                "omega must be a positive finite real, got {omega}"
            )));
        }
        Ok(TempControlEnv {
            omega,
            noise_std: DEFAULT_NOISE_STD,
            action_scale: 1.0,
            spec: EnvSpec::new(3, 3, 0.99, HORIZON, 1)?,
        })
    }

    /// Overrides the dynamics-noise standard deviation (0 for exact tests).
    pub fn with_noise_std(mut self, noise_std: f64) -> Self {
        self.noise_std = noise_std;
        self
    }

    /// Multiplier on the `[-1, 1]` action range.
    pub fn with_action_scale(mut self, action_scale: f64) -> Self {
        self.action_scale = action_scale;
        self
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Noise-free, clamp-free transition `A s + a`.
    pub fn transition(&self, state: &[f64; 3], action: &[f64; 3]) -> [f64; 3] {
        let mut next = [0.0; 3];
        for (i, row) in COUPLING_MATRIX.iter().enumerate() {
            next[i] = row[0] * state[0] + row[1] * state[1] + row[2] * state[2] + action[i];
        }
        next
    }

    fn within_bounds(state: &[f64; 3]) -> bool {
        state.iter().all(|s| s.abs() <= STATE_BOUND)
    }
}

impl Environment for TempControlEnv {
    fn spec(&self) -> &EnvSpec {
        &self.spec
    }

    /// Initial temperatures are iid standard normal.
    fn reset(&self, rng: &mut RngStream) -> Vec<f64> {
        rng.standard_normal_vec(3)
    }

    fn step(&self, state: &[f64], action: &[f64], rng: &mut RngStream) -> Result<DualRewardStep> {
        if state.len() != 3 {
            return Err(Error::DimensionMismatch {
                what: "temperature state",
                expected: 3,
                got: state.len(),
            });
        }
        if action.len() != 3 {
            return Err(Error::DimensionMismatch {
                what: "cooling action",
                expected: 3,
                got: action.len(),
            });
        }
        let bound = self.action_scale;
        let mut applied = [0.0; 3];
        for (dst, &a) in applied.iter_mut().zip(action) {
            *dst = a.clamp(-bound, bound);
        }
        let s = [state[0], state[1], state[2]];
        let mut next = self.transition(&s, &applied);
        if self.noise_std > 0.0 {
            for component in &mut next {
                *component += self.noise_std * rng.standard_normal();
            }
        }

        let satisfied = Self::within_bounds(&next);
        let power: f64 = applied.iter().map(|a| a * a).sum();
        let mut r_target = -self.omega * power;
        let r_assist = if satisfied {
            0.0
        } else {
            r_target -= VIOLATION_PENALTY;
            -VIOLATION_PENALTY
        };

        Ok(DualRewardStep {
            next_state: next.to_vec(),
            r_target,
            r_assist,
            // Violations are penalized, never terminal; episodes run the full
            // horizon.
            terminated: false,
        })
    }

    fn action_bounds(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        Some((
            vec![-self.action_scale; 3],
            vec![self.action_scale; 3],
        ))
    }
}
