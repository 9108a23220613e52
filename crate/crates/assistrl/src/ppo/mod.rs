//! Clipped-surrogate policy-gradient learner with generalized advantage
//! estimation.
//!
//! Training consumes per-episode blended rewards; the evaluation metric is
//! always the undiscounted target-reward return, no matter what schedule is
//! training. Network weights persist across episodes and updates, which is
//! what carries knowledge from one blend weight to the next.

pub mod buffer;
pub mod policy;

pub use buffer::{gae_compute, RolloutBuffer, RolloutRecord};
pub use policy::{log_prob, log_prob_batch, map_to_bounds, policy_sample, PolicySample};

use ndarray::{Array1, Array2, Axis};

use crate::error::{Error, Result};
use crate::mdp::Environment;
use crate::nn::adam::{adam_step, AdamState};
use crate::nn::mlp::{Activation, MlpParams};
use crate::rng::{RngStream, StreamPurpose};
use crate::schedule::{blend, BetaSchedule};

#[derive(Debug, Clone, PartialEq)]
pub struct PpoConfig {
    pub minibatch_size: usize,
    pub epochs_per_update: usize,
    pub lr: f64,
    pub gamma: f64,
    pub gae_lambda: f64,
    pub clip_epsilon: f64,
    pub rollout_min_steps: usize,
    pub value_loss_coef: f64,
    pub entropy_coef: f64,
    pub max_grad_norm: f64,
    pub hidden_sizes: Vec<usize>,
}

impl Default for PpoConfig {
    fn default() -> Self {
        PpoConfig {
            minibatch_size: 512,
            epochs_per_update: 10,
            lr: 0.00025,
            gamma: 0.99,
            gae_lambda: 0.9,
            clip_epsilon: 0.2,
            rollout_min_steps: 2048,
            value_loss_coef: 0.5,
            entropy_coef: 0.0,
            max_grad_norm: 0.5,
            hidden_sizes: vec![512, 256, 64],
        }
    }
}

impl PpoConfig {
    pub fn validate(&self) -> Result<()> {
        if self.clip_epsilon <= 0.0 {
            return Err(Error::invalid("clip_epsilon must be positive"));
        }
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(Error::invalid("gamma must lie in (0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.gae_lambda) {
            return Err(Error::invalid("gae_lambda must lie in [0, 1]"));
        }
        if self.minibatch_size == 0 || self.epochs_per_update == 0 {
            return Err(Error::invalid(
                "minibatch_size and epochs_per_update must be positive",
            ));
        }
        if self.rollout_min_steps < self.minibatch_size {
            return Err(Error::invalid(
                "rollout_min_steps must be at least one minibatch",
            ));
        }
        if self.hidden_sizes.is_empty() || self.hidden_sizes.contains(&0) {
            return Err(Error::invalid("hidden_sizes must be non-empty and positive"));
        }
        if !(self.lr > 0.0) || !(self.max_grad_norm > 0.0) {
            return Err(Error::invalid("lr and max_grad_norm must be positive"));
        }
        Ok(())
    }
}

/// Per-sample clipped objective `min(ratio * adv, clip(ratio) * adv)`;
/// never exceeds the unclipped `ratio * adv`.
pub fn clipped_surrogate(ratio: f64, advantage: f64, epsilon: f64) -> f64 {
    let unclipped = ratio * advantage;
    let clipped = ratio.clamp(1.0 - epsilon, 1.0 + epsilon) * advantage;
    unclipped.min(clipped)
}

/// Shifts and scales to zero mean and unit variance over the whole buffer.
pub fn normalize_advantages(advantages: &mut [f64]) {
    let n = advantages.len();
    if n == 0 {
        return;
    }
    let mean: f64 = advantages.iter().sum::<f64>() / n as f64;
    let var: f64 = advantages.iter().map(|a| (a - mean) * (a - mean)).sum::<f64>() / n as f64;
    let std = var.sqrt();
    for a in advantages.iter_mut() {
        *a = (*a - mean) / (std + 1e-8);
    }
}

#[derive(Debug, Clone, Default)]
pub struct UpdateDiagnostics {
    pub policy_loss: f64,
    pub value_loss: f64,
    pub entropy: f64,
    pub clip_fraction: f64,
    pub minibatches: usize,
}

/// One PPO update over a full buffer: advantages normalized buffer-wide,
/// then `epochs_per_update` passes of shuffled minibatches. Actor and critic
/// gradients are norm-clipped separately and applied with Adam.
pub fn ppo_update(
    actor: &mut MlpParams,
    critic: &mut MlpParams,
    actor_adam: &mut AdamState,
    critic_adam: &mut AdamState,
    buffer: &RolloutBuffer,
    config: &PpoConfig,
    rng: &mut RngStream,
) -> Result<UpdateDiagnostics> {
    if buffer.len() < config.rollout_min_steps {
        return Err(Error::contract(format!(
            "rollout buffer holds {} records, need at least {}",
            buffer.len(),
            config.rollout_min_steps
        )));
    }
    let records = buffer.records();
    let n = records.len();
    let state_dim = records[0].state.len();
    let action_dim = records[0].raw_action.len();

    let (mut advantages, targets) = gae_compute(buffer, config.gamma, config.gae_lambda);
    normalize_advantages(&mut advantages);

    let states = Array2::from_shape_fn((n, state_dim), |(i, j)| records[i].state[j]);
    let raws = Array2::from_shape_fn((n, action_dim), |(i, j)| records[i].raw_action[j]);
    let old_log_probs: Vec<f64> = records.iter().map(|r| r.log_prob).collect();

    let mut diag = UpdateDiagnostics::default();
    let mut indices: Vec<usize> = (0..n).collect();

    for _epoch in 0..config.epochs_per_update {
        rng.shuffle(&mut indices);
        for chunk in indices.chunks(config.minibatch_size) {
            let m = chunk.len();
            let x = states.select(Axis(0), chunk);
            let u = raws.select(Axis(0), chunk);
            let adv: Vec<f64> = chunk.iter().map(|&i| advantages[i]).collect();
            let old_lp: Vec<f64> = chunk.iter().map(|&i| old_log_probs[i]).collect();
            let tgt: Vec<f64> = chunk.iter().map(|&i| targets[i]).collect();

            // Actor pass.
            let (means, actor_cache) = actor.forward_batch(x.view())?;
            let log_spread = actor.log_spread.as_ref().unwrap().clone();
            let new_lp = log_prob_batch(&means, log_spread.view(), &u);

            let mut surrogate_sum = 0.0;
            let mut clipped_count = 0usize;
            // dL/dlogp per sample; L = -mean(surrogate).
            let mut dlogp = vec![0.0; m];
            for i in 0..m {
                let ratio = (new_lp[i] - old_lp[i]).exp();
                let unclipped = ratio * adv[i];
                let clipped =
                    ratio.clamp(1.0 - config.clip_epsilon, 1.0 + config.clip_epsilon) * adv[i];
                surrogate_sum += unclipped.min(clipped);
                if (ratio - 1.0).abs() > config.clip_epsilon {
                    clipped_count += 1;
                }
                // Gradient flows only where the unclipped branch is active.
                if unclipped <= clipped {
                    dlogp[i] = -(ratio * adv[i]) / m as f64;
                }
            }

            // Chain rule into the mean head and the log-spread head.
            let mut dmean = Array2::zeros((m, action_dim));
            let mut dspread = Array1::zeros(action_dim);
            for i in 0..m {
                for j in 0..action_dim {
                    let inv_var = (-2.0 * log_spread[j]).exp();
                    let d = u[[i, j]] - means[[i, j]];
                    dmean[[i, j]] = dlogp[i] * d * inv_var;
                    dspread[j] += dlogp[i] * (d * d * inv_var - 1.0);
                }
            }
            // Entropy bonus: L -= entropy_coef * H, dH/dls_j = 1.
            for j in 0..action_dim {
                dspread[j] -= config.entropy_coef;
            }

            let mut actor_grads = actor.backward_batch(&actor_cache, dmean.view())?;
            actor_grads.log_spread = Some(dspread);
            actor_grads.clip_global_norm(config.max_grad_norm);
            adam_step(actor, &actor_grads, actor_adam)?;

            // Critic pass.
            let (values, critic_cache) = critic.forward_batch(x.view())?;
            let mut dvalue = Array2::zeros((m, 1));
            let mut value_loss = 0.0;
            for i in 0..m {
                let err = values[[i, 0]] - tgt[i];
                value_loss += err * err;
                dvalue[[i, 0]] = config.value_loss_coef * 2.0 * err / m as f64;
            }
            value_loss = config.value_loss_coef * value_loss / m as f64;

            let mut critic_grads = critic.backward_batch(&critic_cache, dvalue.view())?;
            critic_grads.clip_global_norm(config.max_grad_norm);
            adam_step(critic, &critic_grads, critic_adam)?;

            diag.policy_loss += -surrogate_sum / m as f64;
            diag.value_loss += value_loss;
            diag.entropy += policy::entropy(log_spread.view());
            diag.clip_fraction += clipped_count as f64 / m as f64;
            diag.minibatches += 1;
        }
    }
    if diag.minibatches > 0 {
        let k = diag.minibatches as f64;
        diag.policy_loss /= k;
        diag.value_loss /= k;
        diag.entropy /= k;
        diag.clip_fraction /= k;
    }
    Ok(diag)
}

/// Per-episode training record. `return_target` is the undiscounted sum of
/// target rewards — the evaluation metric, independent of the schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct PpoEpisodeRecord {
    pub episode: usize,
    pub beta: f64,
    pub return_target: f64,
    /// Steps on which the constraint was violated (assistant reward < 0).
    pub violations: usize,
    pub steps: usize,
}

#[derive(Debug)]
pub struct PpoTrainResult {
    pub records: Vec<PpoEpisodeRecord>,
    pub actor: MlpParams,
    pub critic: MlpParams,
}

/// Full training run: one seeded loop over `episodes` episodes, updating
/// whenever the rollout buffer has at least `rollout_min_steps` records at an
/// episode boundary. Weights persist across episodes and updates.
pub fn ppo_train<E: Environment + ?Sized>(
    env: &E,
    sched: &BetaSchedule,
    config: &PpoConfig,
    episodes: usize,
    master_seed: u64,
    run: u64,
) -> Result<PpoTrainResult> {
    config.validate()?;
    let spec = env.spec().clone();
    let bounds = env.action_bounds().ok_or_else(|| {
        Error::contract("policy-gradient training needs an environment with actions")
    })?;

    let mut init_rng = RngStream::for_run(master_seed, run, StreamPurpose::InitState);
    let mut dyn_rng = RngStream::for_run(master_seed, run, StreamPurpose::DynamicsNoise);
    let mut policy_rng = RngStream::for_run(master_seed, run, StreamPurpose::PolicySample);
    let mut weight_rng = RngStream::for_run(master_seed, run, StreamPurpose::WeightInit);
    let mut shuffle_rng = RngStream::for_run(master_seed, run, StreamPurpose::UpdateShuffle);

    let mut actor_sizes = vec![spec.state_dim];
    actor_sizes.extend(&config.hidden_sizes);
    actor_sizes.push(spec.action_dim);
    let mut critic_sizes = vec![spec.state_dim];
    critic_sizes.extend(&config.hidden_sizes);
    critic_sizes.push(1);

    let mut actor = MlpParams::init(
        &actor_sizes,
        Activation::Relu,
        Activation::Tanh,
        true,
        &mut weight_rng,
    )?;
    let mut critic = MlpParams::init(
        &critic_sizes,
        Activation::Relu,
        Activation::Identity,
        false,
        &mut weight_rng,
    )?;
    let mut actor_adam = AdamState::with_lr(&actor, config.lr);
    let mut critic_adam = AdamState::with_lr(&critic, config.lr);

    let mut buffer = RolloutBuffer::new();
    let mut records = Vec::with_capacity(episodes);

    for episode in 0..episodes {
        let beta = sched.beta_at(episode);
        let mut state = env.reset(&mut init_rng);
        let mut return_target = 0.0;
        let mut violations = 0usize;
        let mut steps = 0usize;

        for t in 0..spec.horizon {
            let value = critic.forward(ndarray::ArrayView1::from(&state[..]))?[0];
            let sample = policy_sample(&actor, &state, &bounds, &mut policy_rng)?;
            let dual = env.step(&state, &sample.env_action, &mut dyn_rng)?;

            return_target += dual.r_target;
            if dual.r_assist != 0.0 {
                violations += 1;
            }
            steps += 1;
            let done = dual.terminated || t + 1 == spec.horizon;
            buffer.push(RolloutRecord {
                state: state.clone(),
                raw_action: sample.raw,
                log_prob: sample.log_prob,
                reward: blend(dual.r_target, dual.r_assist, beta),
                value,
                done,
                beta,
            });
            state = dual.next_state;
            if dual.terminated {
                break;
            }
        }

        records.push(PpoEpisodeRecord {
            episode,
            beta,
            return_target,
            violations,
            steps,
        });

        if buffer.len() >= config.rollout_min_steps {
            ppo_update(
                &mut actor,
                &mut critic,
                &mut actor_adam,
                &mut critic_adam,
                &buffer,
                config,
                &mut shuffle_rng,
            )?;
            buffer.clear();
        }
    }

    Ok(PpoTrainResult {
        records,
        actor,
        critic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::{DualRewardStep, EnvSpec};

    #[test]
    fn surrogate_never_exceeds_unclipped() {
        let mut rng = RngStream::new(1, 0);
        for _ in 0..10_000 {
            let ratio = (rng.standard_normal()).exp();
            let adv = rng.standard_normal() * 3.0;
            let s = clipped_surrogate(ratio, adv, 0.2);
            assert!(s <= ratio * adv);
        }
    }

    #[test]
    fn normalization_hits_zero_mean_unit_variance() {
        let mut rng = RngStream::new(2, 0);
        let mut adv: Vec<f64> = (0..4096).map(|_| rng.standard_normal() * 7.0 + 3.0).collect();
        normalize_advantages(&mut adv);
        let mean: f64 = adv.iter().sum::<f64>() / adv.len() as f64;
        let var: f64 = adv.iter().map(|a| (a - mean) * (a - mean)).sum::<f64>() / adv.len() as f64;
        assert!(mean.abs() < 1e-10, "mean {mean}");
        assert!((var - 1.0).abs() < 1e-6, "var {var}");
    }

    #[test]
    fn degenerate_advantages_normalize_to_zero() {
        let mut adv = vec![2.5; 64];
        normalize_advantages(&mut adv);
        assert!(adv.iter().all(|&a| a == 0.0));
    }

    /// Deterministic scripted environment: reward pattern independent of
    /// actions, for metric-definition tests.
    struct ScriptedEnv {
        spec: EnvSpec,
    }

    impl ScriptedEnv {
        fn new() -> Self {
            ScriptedEnv {
                spec: EnvSpec::new(1, 1, 1.0, 5, 1).unwrap(),
            }
        }
    }

    impl Environment for ScriptedEnv {
        fn spec(&self) -> &EnvSpec {
            &self.spec
        }

        fn reset(&self, _rng: &mut RngStream) -> Vec<f64> {
            vec![0.0]
        }

        fn step(
            &self,
            state: &[f64],
            _action: &[f64],
            _rng: &mut RngStream,
        ) -> Result<DualRewardStep> {
            let t = state[0];
            Ok(DualRewardStep {
                next_state: vec![t + 1.0],
                // Target pays t+1; assistant pays something wildly different.
                r_target: t + 1.0,
                r_assist: -1000.0,
                terminated: false,
            })
        }

        fn action_bounds(&self) -> Option<(Vec<f64>, Vec<f64>)> {
            Some((vec![-1.0], vec![1.0]))
        }
    }

    #[test]
    fn recorded_metric_uses_target_reward_regardless_of_schedule() {
        let env = ScriptedEnv::new();
        let config = PpoConfig {
            hidden_sizes: vec![8],
            rollout_min_steps: 64,
            minibatch_size: 32,
            epochs_per_update: 1,
            ..PpoConfig::default()
        };
        // Schedule that trains almost entirely on the assistant reward.
        let sched = BetaSchedule::linear(1.0, 1_000_000).unwrap();
        let result = ppo_train(&env, &sched, &config, 3, 0, 0).unwrap();
        for rec in &result.records {
            // Sum of target rewards over 5 steps: 1+2+3+4+5 = 15.
            assert_eq!(rec.return_target, 15.0);
            assert_eq!(rec.steps, 5);
            assert_eq!(rec.violations, 5);
        }
    }

    #[test]
    fn ratio_is_one_immediately_after_collection() {
        let env = ScriptedEnv::new();
        let mut weight_rng = RngStream::for_run(3, 0, StreamPurpose::WeightInit);
        let actor = MlpParams::init(
            &[1, 8, 1],
            Activation::Relu,
            Activation::Tanh,
            true,
            &mut weight_rng,
        )
        .unwrap();
        let bounds = env.action_bounds().unwrap();
        let mut policy_rng = RngStream::for_run(3, 0, StreamPurpose::PolicySample);
        let mut dyn_rng = RngStream::for_run(3, 0, StreamPurpose::DynamicsNoise);

        let mut buffer = RolloutBuffer::new();
        let mut state = vec![0.0];
        for _ in 0..4096 {
            let sample = policy_sample(&actor, &state, &bounds, &mut policy_rng).unwrap();
            let dual = env.step(&state, &sample.env_action, &mut dyn_rng).unwrap();
            buffer.push(RolloutRecord {
                state: state.clone(),
                raw_action: sample.raw,
                log_prob: sample.log_prob,
                reward: dual.r_target,
                value: 0.0,
                done: false,
                beta: 0.0,
            });
            state = dual.next_state;
        }

        let log_spread = actor.log_spread.as_ref().unwrap();
        for rec in buffer.records() {
            let mean = actor
                .forward(ndarray::ArrayView1::from(&rec.state[..]))
                .unwrap();
            let new_lp = log_prob(mean.view(), log_spread.view(), &rec.raw_action);
            let ratio = (new_lp - rec.log_prob).exp();
            assert!((ratio - 1.0).abs() < 1e-12, "ratio {ratio}");
        }
    }

    #[test]
    fn underfull_buffer_is_rejected() {
        let mut rng = RngStream::new(4, 0);
        let mut actor = MlpParams::init(
            &[1, 4, 1],
            Activation::Relu,
            Activation::Tanh,
            true,
            &mut RngStream::new(4, 1),
        )
        .unwrap();
        let mut critic = MlpParams::init(
            &[1, 4, 1],
            Activation::Relu,
            Activation::Identity,
            false,
            &mut RngStream::new(4, 2),
        )
        .unwrap();
        let mut a_adam = AdamState::new(&actor);
        let mut c_adam = AdamState::new(&critic);
        let buffer = RolloutBuffer::new();
        let config = PpoConfig::default();
        let err = ppo_update(
            &mut actor,
            &mut critic,
            &mut a_adam,
            &mut c_adam,
            &buffer,
            &config,
            &mut rng,
        );
        assert!(err.is_err());
    }

    #[test]
    fn training_run_is_deterministic() {
        let env = ScriptedEnv::new();
        let config = PpoConfig {
            hidden_sizes: vec![8],
            rollout_min_steps: 32,
            minibatch_size: 16,
            epochs_per_update: 2,
            ..PpoConfig::default()
        };
        let sched = BetaSchedule::linear(0.5, 10).unwrap();
        let a = ppo_train(&env, &sched, &config, 12, 99, 0).unwrap();
        let b = ppo_train(&env, &sched, &config, 12, 99, 0).unwrap();
        assert_eq!(a.records, b.records);
        assert_eq!(a.actor, b.actor);
        assert_eq!(a.critic, b.critic);
    }

    #[test]
    fn zero_advantages_leave_actor_unchanged() {
        // With all advantages equal, normalization zeroes them and the policy
        // gradient vanishes; only the critic moves.
        let env = ScriptedEnv::new();
        let bounds = env.action_bounds().unwrap();
        let mut actor = MlpParams::init(
            &[1, 6, 1],
            Activation::Relu,
            Activation::Tanh,
            true,
            &mut RngStream::new(7, 0),
        )
        .unwrap();
        let mut critic = MlpParams::init(
            &[1, 6, 1],
            Activation::Relu,
            Activation::Identity,
            false,
            &mut RngStream::new(7, 1),
        )
        .unwrap();
        let actor_before = actor.clone();
        let critic_before = critic.clone();

        // Constant reward 1 per step, single-step episodes, zero values:
        // every advantage is 1 before normalization, 0 after.
        let mut buffer = RolloutBuffer::new();
        let mut policy_rng = RngStream::new(7, 2);
        for _ in 0..64 {
            let sample = policy_sample(&actor, &[0.0], &bounds, &mut policy_rng).unwrap();
            buffer.push(RolloutRecord {
                state: vec![0.0],
                raw_action: sample.raw,
                log_prob: sample.log_prob,
                reward: 1.0,
                value: 0.0,
                done: true,
                beta: 0.0,
            });
        }
        let config = PpoConfig {
            hidden_sizes: vec![6],
            rollout_min_steps: 64,
            minibatch_size: 64,
            epochs_per_update: 1,
            entropy_coef: 0.0,
            ..PpoConfig::default()
        };
        let mut a_adam = AdamState::with_lr(&actor, config.lr);
        let mut c_adam = AdamState::with_lr(&critic, config.lr);
        let mut rng = RngStream::new(7, 3);
        ppo_update(
            &mut actor,
            &mut critic,
            &mut a_adam,
            &mut c_adam,
            &buffer,
            &config,
            &mut rng,
        )
        .unwrap();
        assert_eq!(actor, actor_before);
        assert_ne!(critic, critic_before);
    }
}
