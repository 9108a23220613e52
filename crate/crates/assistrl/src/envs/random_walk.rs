//! N-state random walk, a Markov reward process.
//!
//! States sit on a line: index 0 is the left terminal, `n + 1` the right
//! terminal, and `1..=n` are non-terminal. Every episode starts at the center
//! and moves left or right with equal probability. The target reward pays
//! only on entering the right terminal; the assistant reward additionally
//! pays a small amount for every rightward move, giving the learner feedback
//! on almost every step.

use crate::error::{Error, Result};
use crate::mdp::{DualRewardStep, EnvSpec, Environment, RewardChoice};
use crate::rng::RngStream;

/// Hard cap on steps per episode; exceeding it is an error, not a truncation.
pub const STEP_CAP: usize = 1_000_000;

#[derive(Debug, Clone)]
pub struct RandomWalkEnv {
    n_nonterminal: usize,
    assist_step_reward: f64,
    terminal_reward: f64,
    spec: EnvSpec,
}

impl RandomWalkEnv {
    /// Walk with `n_nonterminal` interior states (odd, so a unique center
    /// exists). The classic sizes 5/11/33 count both terminals and map to
    /// 3/9/31 interior states; see [`RandomWalkEnv::from_total_states`].
    pub fn new(n_nonterminal: usize) -> Result<Self> {
        if n_nonterminal == 0 || n_nonterminal % 2 == 0 {
            return Err(Error::invalid(format!(
                "n_nonterminal must be a positive odd integer, got {n_nonterminal}"
            )));
        }
        Ok(RandomWalkEnv {
            n_nonterminal,
            assist_step_reward: 0.1,
            terminal_reward: 1.0,
            spec: EnvSpec::new(1, 0, 1.0, STEP_CAP, 1)?,
        })
    }

    /// Walk sized by its total state count (terminals included): 5, 11, 33...
    pub fn from_total_states(total: usize) -> Result<Self> {
        if total < 5 {
            return Err(Error::invalid(format!(
                "total state count must be at least 5, got {total}"
            )));
        }
        Self::new(total - 2)
    }

    pub fn with_rewards(mut self, assist_step_reward: f64, terminal_reward: f64) -> Self {
        self.assist_step_reward = assist_step_reward;
        self.terminal_reward = terminal_reward;
        self
    }

    pub fn n_nonterminal(&self) -> usize {
        self.n_nonterminal
    }

    pub fn left_terminal(&self) -> usize {
        0
    }

    pub fn right_terminal(&self) -> usize {
        self.n_nonterminal + 1
    }

    pub fn center(&self) -> usize {
        (self.n_nonterminal + 1) / 2
    }

    pub fn is_terminal(&self, state: usize) -> bool {
        state == self.left_terminal() || state == self.right_terminal()
    }

    /// Reward for the transition `state -> next`.
    fn rewards(&self, state: usize, next: usize) -> (f64, f64) {
        let r_target = if next == self.right_terminal() {
            self.terminal_reward
        } else {
            0.0
        };
        let r_assist = if next == self.right_terminal() {
            self.terminal_reward
        } else if next == state + 1 {
            self.assist_step_reward
        } else {
            0.0
        };
        (r_target, r_assist)
    }

    /// Deterministic transition used by tests and by `step` after the coin
    /// flip.
    pub fn step_in_direction(&self, state: usize, right: bool) -> Result<DualRewardStep> {
        if self.is_terminal(state) || state > self.right_terminal() {
            return Err(Error::contract(format!(
                "step called on terminal or out-of-range state {state}"
            )));
        }
        let next = if right { state + 1 } else { state - 1 };
        let (r_target, r_assist) = self.rewards(state, next);
        Ok(DualRewardStep {
            next_state: vec![next as f64],
            r_target,
            r_assist,
            terminated: self.is_terminal(next),
        })
    }

    /// Exact state values for the chosen reward stream, over non-terminal
    /// states `1..=n`, by direct tridiagonal elimination of the undiscounted
    /// Bellman system `v(i) = 0.5 * [r(i,i-1) + v(i-1)] + 0.5 * [r(i,i+1) + v(i+1)]`
    /// with terminal values pinned to 0.
    pub fn true_values(&self, which: RewardChoice) -> Vec<f64> {
        let n = self.n_nonterminal;
        // v_i - 0.5 v_{i-1} - 0.5 v_{i+1} = b_i, b_i = expected one-step reward.
        let mut rhs: Vec<f64> = (1..=n)
            .map(|i| {
                let (lt, la) = self.rewards(i, i - 1);
                let (rt, ra) = self.rewards(i, i + 1);
                0.5 * (which.select(lt, la) + which.select(rt, ra))
            })
            .collect();

        // Thomas algorithm; sub- and super-diagonals are both -0.5.
        let mut sup = vec![0.0; n];
        let mut diag = 1.0;
        sup[0] = -0.5 / diag;
        rhs[0] /= diag;
        for i in 1..n {
            diag = 1.0 - (-0.5) * sup[i - 1];
            sup[i] = -0.5 / diag;
            rhs[i] = (rhs[i] - (-0.5) * rhs[i - 1]) / diag;
        }
        let mut values = vec![0.0; n];
        values[n - 1] = rhs[n - 1];
        for i in (0..n - 1).rev() {
            values[i] = rhs[i] - sup[i] * values[i + 1];
        }
        values
    }

    /// Componentwise Bellman residual of `values` (indexed over `1..=n`)
    /// under the chosen reward stream.
    pub fn bellman_residual(&self, values: &[f64], which: RewardChoice) -> Result<Vec<f64>> {
        let n = self.n_nonterminal;
        if values.len() != n {
            return Err(Error::DimensionMismatch {
                what: "value vector",
                expected: n,
                got: values.len(),
            });
        }
        let v = |idx: usize| -> f64 {
            if idx == 0 || idx == n + 1 {
                0.0
            } else {
                values[idx - 1]
            }
        };
        Ok((1..=n)
            .map(|i| {
                let (lt, la) = self.rewards(i, i - 1);
                let (rt, ra) = self.rewards(i, i + 1);
                let expected = 0.5 * (which.select(lt, la) + v(i - 1))
                    + 0.5 * (which.select(rt, ra) + v(i + 1));
                v(i) - expected
            })
            .collect())
    }

    fn state_index(&self, state: &[f64]) -> Result<usize> {
        if state.len() != 1 {
            return Err(Error::DimensionMismatch {
                what: "random walk state",
                expected: 1,
                got: state.len(),
            });
        }
        let raw = state[0];
        if raw.fract() != 0.0 || raw < 0.0 || raw > self.right_terminal() as f64 {
            return Err(Error::contract(format!(
                "random walk state must be an integer index in [0, {}], got {raw}",
                self.right_terminal()
            )));
        }
        Ok(raw as usize)
    }
}

impl Environment for RandomWalkEnv {
    fn spec(&self) -> &EnvSpec {
        &self.spec
    }

    fn reset(&self, _rng: &mut RngStream) -> Vec<f64> {
        vec![self.center() as f64]
    }

    fn step(&self, state: &[f64], action: &[f64], rng: &mut RngStream) -> Result<DualRewardStep> {
        if !action.is_empty() {
            return Err(Error::DimensionMismatch {
                what: "random walk action",
                expected: 0,
                got: action.len(),
            });
        }
        let idx = self.state_index(state)?;
        self.step_in_direction(idx, rng.coin())
    }
}

/// Root-mean-square deviation between two value vectors of equal length.
pub fn rms_error(values: &[f64], reference: &[f64]) -> Result<f64> {
    if values.len() != reference.len() {
        return Err(Error::DimensionMismatch {
            what: "rms operands",
            expected: reference.len(),
            got: values.len(),
        });
    }
    if values.is_empty() {
        return Err(Error::invalid("rms of empty vectors is undefined"));
    }
    let sum_sq: f64 = values
        .iter()
        .zip(reference)
        .map(|(v, r)| (v - r) * (v - r))
        .sum();
    Ok((sum_sq / values.len() as f64).sqrt())
}
