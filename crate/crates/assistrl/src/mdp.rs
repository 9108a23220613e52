//! Environment contract with dual rewards, trajectories, and returns.
//!
//! Every environment reports a target reward and an assistant reward for each
//! transition. Blending the two is the learner's job, so one trajectory can be
//! re-scored under any weight without re-simulation.

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::schedule::blend;

/// Static description of an environment.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvSpec {
    pub state_dim: usize,
    /// 0 for Markov reward processes (no actions).
    pub action_dim: usize,
    /// Discount in `[0, 1]`; 1 marks an undiscounted task.
    pub gamma: f64,
    /// Maximum steps per episode.
    pub horizon: usize,
    /// Total training episodes of the experiment this spec belongs to.
    pub episode_count: usize,
}

impl EnvSpec {
    pub fn new(
        state_dim: usize,
        action_dim: usize,
        gamma: f64,
        horizon: usize,
        episode_count: usize,
    ) -> Result<Self> {
        if state_dim == 0 {
            return Err(Error::invalid("state_dim must be positive"));
        }
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::invalid(format!("gamma must lie in [0, 1], got {gamma}")));
        }
        if horizon == 0 {
            return Err(Error::invalid("horizon must be at least 1"));
        }
        if episode_count == 0 {
            return Err(Error::invalid("episode_count must be at least 1"));
        }
        Ok(EnvSpec {
            state_dim,
            action_dim,
            gamma,
            horizon,
            episode_count,
        })
    }
}

/// Result of one environment transition, carrying both rewards.
#[derive(Debug, Clone, PartialEq)]
pub struct DualRewardStep {
    pub next_state: Vec<f64>,
    pub r_target: f64,
    pub r_assist: f64,
    pub terminated: bool,
}

/// Which reward stream a return is computed on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RewardChoice {
    Target,
    Assist,
    Blend(f64),
}

impl RewardChoice {
    pub fn select(&self, r_target: f64, r_assist: f64) -> f64 {
        match *self {
            RewardChoice::Target => r_target,
            RewardChoice::Assist => r_assist,
            RewardChoice::Blend(beta) => blend(r_target, r_assist, beta),
        }
    }
}

/// One episode's states, actions, and dual-reward steps.
///
/// `states.len() == steps.len() + 1` always; only the final step may be
/// terminated.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub states: Vec<Vec<f64>>,
    /// Empty for MRPs.
    pub actions: Vec<Vec<f64>>,
    pub steps: Vec<DualRewardStep>,
    pub episode_index: usize,
}

impl Trajectory {
    pub fn start(initial_state: Vec<f64>, episode_index: usize) -> Self {
        Trajectory {
            states: vec![initial_state],
            actions: Vec::new(),
            steps: Vec::new(),
            episode_index,
        }
    }

    /// Appends a transition. `action` is `None` for MRPs.
    pub fn push(&mut self, action: Option<Vec<f64>>, step: DualRewardStep) -> Result<()> {
        if self.terminated() {
            return Err(Error::contract(
                "cannot extend a trajectory past a terminated step",
            ));
        }
        self.states.push(step.next_state.clone());
        if let Some(a) = action {
            self.actions.push(a);
        }
        self.steps.push(step);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn terminated(&self) -> bool {
        self.steps.last().is_some_and(|s| s.terminated)
    }
}

/// Discounted return `sum_t gamma^t r_t` over the chosen reward stream.
pub fn episode_return(traj: &Trajectory, gamma: f64, which: RewardChoice) -> f64 {
    let mut total = 0.0;
    let mut discount = 1.0;
    for step in &traj.steps {
        total += discount * which.select(step.r_target, step.r_assist);
        discount *= gamma;
    }
    total
}

/// An environment with dual rewards. Instances are state-free: the caller
/// owns the current state and the random streams, so a single instance can
/// serve many deterministic replays.
pub trait Environment: Send + Sync {
    fn spec(&self) -> &EnvSpec;

    /// Samples an initial state from the environment's start distribution.
    fn reset(&self, rng: &mut RngStream) -> Vec<f64>;

    /// Advances one transition. `action` must have length `action_dim`
    /// (empty for MRPs).
    fn step(&self, state: &[f64], action: &[f64], rng: &mut RngStream) -> Result<DualRewardStep>;

    /// Per-dimension `(low, high)` action bounds; `None` for MRPs.
    fn action_bounds(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        None
    }

    /// Nominal per-dimension state box, used by function-approximation
    /// learners to scale network inputs. States may exceed it transiently;
    /// `None` means inputs are consumed as-is.
    fn state_bounds(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        None
    }
}

/// Rolls one full episode of an action-free environment, stopping at
/// termination or erroring once `cap` steps are exceeded.
pub fn rollout_mrp<E: Environment + ?Sized>(
    env: &E,
    rng: &mut RngStream,
    episode_index: usize,
    cap: usize,
) -> Result<Trajectory> {
    let mut traj = Trajectory::start(env.reset(rng), episode_index);
    loop {
        let state = traj.states.last().expect("trajectory holds >= 1 state");
        let step = env.step(state, &[], rng)?;
        let terminated = step.terminated;
        traj.push(None, step)?;
        if terminated {
            return Ok(traj);
        }
        if traj.len() >= cap {
            return Err(Error::EpisodeOverflow { cap });
        }
    }
}
