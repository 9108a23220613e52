//! Tabular TD(0) value learner and the random-walk experiment loop.
//!
//! The value table persists across episodes, so the values learned under one
//! blend weight become the initialization for the next — this carry-over is
//! the whole transfer mechanism for the tabular case.

use rayon::prelude::*;

use crate::envs::random_walk::{rms_error, RandomWalkEnv, STEP_CAP};
use crate::error::{Error, Result};
use crate::mdp::{Environment, RewardChoice};
use crate::rng::{RngStream, StreamPurpose};
use crate::schedule::{blend, BetaSchedule};

/// Step-size rule for the TD(0) update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepSize {
    /// Fixed alpha; the experiment default is 0.1.
    Constant(f64),
    /// `alpha(s) = 1 / (1 + visits(s))`, a diminishing rule used only by
    /// convergence tests.
    VisitDecay,
}

pub const DEFAULT_ALPHA: f64 = 0.1;

/// State-value table over walk states `0..=n+1`; terminal entries stay
/// exactly 0 forever.
#[derive(Debug, Clone)]
pub struct ValueTable {
    values: Vec<f64>,
    visits: Vec<u64>,
    step_size: StepSize,
    n_nonterminal: usize,
}

impl ValueTable {
    pub fn zeros(n_nonterminal: usize, step_size: StepSize) -> Self {
        ValueTable {
            values: vec![0.0; n_nonterminal + 2],
            visits: vec![0; n_nonterminal + 2],
            step_size,
            n_nonterminal,
        }
    }

    pub fn value(&self, state: usize) -> f64 {
        self.values[state]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Values over non-terminal states `1..=n`.
    pub fn non_terminal_values(&self) -> &[f64] {
        &self.values[1..=self.n_nonterminal]
    }

    fn is_terminal(&self, state: usize) -> bool {
        state == 0 || state == self.n_nonterminal + 1
    }

    /// One TD(0) update: `v(s) += alpha * [r + gamma v(s') - v(s)]`.
    pub fn td0_update(&mut self, s: usize, r: f64, s_next: usize, gamma: f64) -> Result<()> {
        if s >= self.values.len() || s_next >= self.values.len() {
            return Err(Error::contract(format!(
                "state index out of range: s={s}, s'={s_next}"
            )));
        }
        if self.is_terminal(s) {
            return Err(Error::contract(format!(
                "TD update on terminal state {s}"
            )));
        }
        self.visits[s] += 1;
        let alpha = match self.step_size {
            StepSize::Constant(a) => a,
            StepSize::VisitDecay => 1.0 / (1.0 + self.visits[s] as f64),
        };
        let td_error = r + gamma * self.values[s_next] - self.values[s];
        self.values[s] += alpha * td_error;
        Ok(())
    }
}

/// One experiment row: the RMS error against the target-reward true values,
/// recorded after the episode's updates.
#[derive(Debug, Clone, PartialEq)]
pub struct TdEpisodeRecord {
    pub episode: usize,
    pub beta: f64,
    pub rms: f64,
}

#[derive(Debug, Clone)]
pub struct TdRunCurve {
    pub run: usize,
    pub records: Vec<TdEpisodeRecord>,
}

#[derive(Debug, Clone)]
pub struct TdExperimentResult {
    pub runs: Vec<TdRunCurve>,
    /// Per-episode RMS, averaged over runs.
    pub mean_rms: Vec<f64>,
}

/// Runs one seeded training run and returns its per-episode RMS curve.
pub fn run_td_single(
    env: &RandomWalkEnv,
    sched: &BetaSchedule,
    episodes: usize,
    step_size: StepSize,
    master_seed: u64,
    run: usize,
) -> Result<TdRunCurve> {
    let reference = env.true_values(RewardChoice::Target);
    let mut table = ValueTable::zeros(env.n_nonterminal(), step_size);
    let mut dynamics = RngStream::for_run(master_seed, run as u64, StreamPurpose::DynamicsNoise);
    let mut init = RngStream::for_run(master_seed, run as u64, StreamPurpose::InitState);
    let gamma = env.spec().gamma;

    let mut records = Vec::with_capacity(episodes);
    for episode in 0..episodes {
        let beta = sched.beta_at(episode);
        let mut state = env.reset(&mut init)[0] as usize;
        let mut steps = 0usize;
        loop {
            let step = env.step(&[state as f64], &[], &mut dynamics)?;
            let next = step.next_state[0] as usize;
            let reward = blend(step.r_target, step.r_assist, beta);
            table.td0_update(state, reward, next, gamma)?;
            state = next;
            steps += 1;
            if step.terminated {
                break;
            }
            if steps >= STEP_CAP {
                return Err(Error::EpisodeOverflow { cap: STEP_CAP });
            }
        }
        let rms = rms_error(table.non_terminal_values(), &reference)?;
        records.push(TdEpisodeRecord { episode, beta, rms });
    }
    Ok(TdRunCurve { run, records })
}

/// Runs `runs` independent seeded runs (in parallel) and averages the
/// per-episode RMS curves.
pub fn run_td_experiment(
    env: &RandomWalkEnv,
    sched: &BetaSchedule,
    episodes: usize,
    runs: usize,
    step_size: StepSize,
    master_seed: u64,
) -> Result<TdExperimentResult> {
    if episodes == 0 || runs == 0 {
        return Err(Error::invalid("episodes and runs must both be at least 1"));
    }
    let mut curves = (0..runs)
        .into_par_iter()
        .map(|run| {
            run_td_single(env, sched, episodes, step_size, master_seed, run).map_err(|e| {
                Error::RunFailed {
                    run,
                    source: Box::new(e),
                }
            })
        })
        .collect::<Result<Vec<_>>>()?;
    curves.sort_by_key(|c| c.run);

    let mut mean_rms = vec![0.0; episodes];
    for curve in &curves {
        for (acc, rec) in mean_rms.iter_mut().zip(&curve.records) {
            *acc += rec.rms;
        }
    }
    for acc in &mut mean_rms {
        *acc /= runs as f64;
    }
    Ok(TdExperimentResult {
        runs: curves,
        mean_rms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn update_examples() {
        let mut table = ValueTable::zeros(3, StepSize::Constant(0.1));
        table.td0_update(2, 1.0, 3, 1.0).unwrap();
        assert!((table.value(2) - 0.1).abs() < 1e-15);

        // Zero TD error leaves the value unchanged.
        let mut table = ValueTable::zeros(3, StepSize::Constant(0.1));
        table.td0_update(1, 0.0, 2, 1.0).unwrap();
        assert_eq!(table.value(1), 0.0);

        let mut table = ValueTable::zeros(3, StepSize::Constant(0.1));
        table.values[1] = 0.5;
        table.values[2] = 0.75;
        table.td0_update(1, 0.0, 2, 1.0).unwrap();
        assert!((table.value(1) - 0.525).abs() < 1e-15);
    }

    #[test]
    fn terminals_stay_pinned_to_zero() {
        let env = RandomWalkEnv::new(3).unwrap();
        let sched = BetaSchedule::exponential(1.0, 0.9).unwrap();
        let curve = run_td_single(&env, &sched, 50, StepSize::Constant(0.1), 1, 0).unwrap();
        assert_eq!(curve.records.len(), 50);
        // Terminal pinning is structural: updates on terminals are rejected.
        let mut table = ValueTable::zeros(3, StepSize::Constant(0.1));
        assert!(table.td0_update(0, 1.0, 1, 1.0).is_err());
        assert!(table.td0_update(4, 1.0, 3, 1.0).is_err());
    }

    #[test]
    fn values_stay_in_unit_interval_under_baseline() {
        // Rewards in {0, 1}, gamma 1, zero init: every update is a convex
        // combination of quantities in [0, 1].
        let env = RandomWalkEnv::new(9).unwrap();
        let sched = BetaSchedule::constant_zero();
        let mut dynamics = RngStream::for_run(3, 0, StreamPurpose::DynamicsNoise);
        let mut table = ValueTable::zeros(9, StepSize::Constant(0.1));
        for _ in 0..500 {
            let mut state = env.center();
            loop {
                let step = env.step(&[state as f64], &[], &mut dynamics).unwrap();
                let next = step.next_state[0] as usize;
                table.td0_update(state, step.r_target, next, 1.0).unwrap();
                state = next;
                if step.terminated {
                    break;
                }
            }
            for v in table.values() {
                assert!((0.0..=1.0).contains(v), "value {v} escaped [0, 1]");
            }
        }
    }

    #[test]
    fn constant_zero_schedule_is_plain_td() {
        // Blending with beta = 0 must replay exactly the same table as using
        // the target reward directly.
        let env = RandomWalkEnv::new(3).unwrap();
        let zero = BetaSchedule::constant_zero();
        let a = run_td_single(&env, &zero, 30, StepSize::Constant(0.1), 9, 0).unwrap();

        // Manual loop with the raw target reward and the same streams.
        let reference = env.true_values(RewardChoice::Target);
        let mut dynamics = RngStream::for_run(9, 0, StreamPurpose::DynamicsNoise);
        let mut table = ValueTable::zeros(3, StepSize::Constant(0.1));
        let mut manual = Vec::new();
        for _ in 0..30 {
            let mut state = env.center();
            loop {
                let step = env.step(&[state as f64], &[], &mut dynamics).unwrap();
                let next = step.next_state[0] as usize;
                table.td0_update(state, step.r_target, next, 1.0).unwrap();
                state = next;
                if step.terminated {
                    break;
                }
            }
            manual.push(rms_error(table.non_terminal_values(), &reference).unwrap());
        }
        for (rec, m) in a.records.iter().zip(manual) {
            assert_eq!(rec.rms.to_bits(), m.to_bits());
        }
    }

    #[test]
    fn mean_of_single_run_is_that_run() {
        let env = RandomWalkEnv::new(3).unwrap();
        let sched = BetaSchedule::exponential(1.0, 0.95).unwrap();
        let result = run_td_experiment(&env, &sched, 20, 1, StepSize::Constant(0.1), 4).unwrap();
        for (mean, rec) in result.mean_rms.iter().zip(&result.runs[0].records) {
            assert_eq!(mean.to_bits(), rec.rms.to_bits());
        }
    }

    #[test]
    fn experiment_is_deterministic() {
        let env = RandomWalkEnv::new(3).unwrap();
        let sched = BetaSchedule::exponential(1.0, 0.9).unwrap();
        let a = run_td_experiment(&env, &sched, 25, 8, StepSize::Constant(0.1), 77).unwrap();
        let b = run_td_experiment(&env, &sched, 25, 8, StepSize::Constant(0.1), 77).unwrap();
        for (x, y) in a.mean_rms.iter().zip(&b.mean_rms) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }
}
