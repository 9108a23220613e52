//! Experiment configuration: TOML on disk, validated and default-filled in
//! memory. The resolved form (every default made explicit) is echoed next to
//! the results so a run can be reproduced from its output directory alone.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::envs::four_tank::DEFAULT_COEFFS;
use crate::error::{Error, Result};
use crate::ppo::PpoConfig;
use crate::schedule::{BetaSchedule, DEFAULT_EXP_CUTOFF};
use crate::td::DEFAULT_ALPHA;

pub const DEFAULT_TD_RUNS: usize = 100;
pub const DEFAULT_PPO_RUNS: usize = 5;
pub const DEFAULT_OUT_DIR: &str = "results";

/// Environment variable that overrides the configured output directory.
pub const OUT_DIR_ENV_VAR: &str = "ASSISTRL_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnvKind {
    Randomwalk,
    Tempcontrol,
    Fourtank,
}

impl EnvKind {
    pub fn name(&self) -> &'static str {
        match self {
            EnvKind::Randomwalk => "randomwalk",
            EnvKind::Tempcontrol => "tempcontrol",
            EnvKind::Fourtank => "fourtank",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Td0,
    Ppo,
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Td0 => "td0",
            Algorithm::Ppo => "ppo",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScheduleKind {
    #[serde(rename = "exponential")]
    Exponential,
    #[serde(rename = "linear")]
    Linear,
    #[serde(rename = "constant-zero")]
    ConstantZero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleConfig {
    pub kind: ScheduleKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end_episode: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<f64>,
}

impl ScheduleConfig {
    fn resolve(&mut self) -> Result<()> {
        match self.kind {
            ScheduleKind::Exponential => {
                self.beta0.get_or_insert(1.0);
                self.cutoff.get_or_insert(DEFAULT_EXP_CUTOFF);
                if self.lambda.is_none() {
                    return Err(Error::config(
                        "schedule.lambda is required for exponential schedules",
                    ));
                }
                if self.end_episode.is_some() {
                    return Err(Error::config(
                        "schedule.end_episode does not apply to exponential schedules",
                    ));
                }
            }
            ScheduleKind::Linear => {
                self.beta0.get_or_insert(1.0);
                if self.end_episode.is_none() {
                    return Err(Error::config(
                        "schedule.end_episode is required for linear schedules",
                    ));
                }
                if self.lambda.is_some() || self.cutoff.is_some() {
                    return Err(Error::config(
                        "schedule.lambda/cutoff do not apply to linear schedules",
                    ));
                }
            }
            ScheduleKind::ConstantZero => {
                if self.beta0.is_some()
                    || self.lambda.is_some()
                    || self.end_episode.is_some()
                    || self.cutoff.is_some()
                {
                    return Err(Error::config(
                        "constant-zero schedules take no parameters",
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn to_schedule(&self) -> Result<BetaSchedule> {
        match self.kind {
            ScheduleKind::Exponential => BetaSchedule::exponential_with_cutoff(
                self.beta0.unwrap_or(1.0),
                self.lambda
                    .ok_or_else(|| Error::config("schedule.lambda is required"))?,
                self.cutoff.unwrap_or(DEFAULT_EXP_CUTOFF),
            ),
            ScheduleKind::Linear => BetaSchedule::linear(
                self.beta0.unwrap_or(1.0),
                self.end_episode
                    .ok_or_else(|| Error::config("schedule.end_episode is required"))?,
            ),
            ScheduleKind::ConstantZero => Ok(BetaSchedule::constant_zero()),
        }
    }

    /// Short label for plot legends and summaries.
    pub fn label(&self) -> String {
        match self.kind {
            ScheduleKind::Exponential => format!(
                "exp b0={} lambda={}",
                self.beta0.unwrap_or(1.0),
                self.lambda.unwrap_or(f64::NAN)
            ),
            ScheduleKind::Linear => format!(
                "linear b0={} E={}",
                self.beta0.unwrap_or(1.0),
                self.end_episode.unwrap_or(0)
            ),
            ScheduleKind::ConstantZero => "target-only".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TdSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PpoSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub minibatch_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epochs_per_update: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lr: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gae_lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clip_epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rollout_min_steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value_loss_coef: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entropy_coef: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_grad_norm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hidden_sizes: Option<Vec<usize>>,
}

impl PpoSection {
    fn resolve(&mut self) {
        let d = PpoConfig::default();
        self.minibatch_size.get_or_insert(d.minibatch_size);
        self.epochs_per_update.get_or_insert(d.epochs_per_update);
        self.lr.get_or_insert(d.lr);
        self.gamma.get_or_insert(d.gamma);
        self.gae_lambda.get_or_insert(d.gae_lambda);
        self.clip_epsilon.get_or_insert(d.clip_epsilon);
        self.rollout_min_steps.get_or_insert(d.rollout_min_steps);
        self.value_loss_coef.get_or_insert(d.value_loss_coef);
        self.entropy_coef.get_or_insert(d.entropy_coef);
        self.max_grad_norm.get_or_insert(d.max_grad_norm);
        self.hidden_sizes.get_or_insert(d.hidden_sizes);
    }

    pub fn to_ppo_config(&self) -> PpoConfig {
        let d = PpoConfig::default();
        PpoConfig {
            minibatch_size: self.minibatch_size.unwrap_or(d.minibatch_size),
            epochs_per_update: self.epochs_per_update.unwrap_or(d.epochs_per_update),
            lr: self.lr.unwrap_or(d.lr),
            gamma: self.gamma.unwrap_or(d.gamma),
            gae_lambda: self.gae_lambda.unwrap_or(d.gae_lambda),
            clip_epsilon: self.clip_epsilon.unwrap_or(d.clip_epsilon),
            rollout_min_steps: self.rollout_min_steps.unwrap_or(d.rollout_min_steps),
            value_loss_coef: self.value_loss_coef.unwrap_or(d.value_loss_coef),
            entropy_coef: self.entropy_coef.unwrap_or(d.entropy_coef),
            max_grad_norm: self.max_grad_norm.unwrap_or(d.max_grad_norm),
            hidden_sizes: self.hidden_sizes.clone().unwrap_or(d.hidden_sizes),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub env: EnvKind,
    pub algorithm: Algorithm,
    pub episodes: usize,
    pub master_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runs: Option<usize>,
    /// Total state count of the random walk (terminals included).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub size: Option<usize>,
    /// Control-power weight for the control environments.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    /// Ten model coefficients of the four-tank process.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    /// Metric thresholds reported as episodes-to-threshold in the summary.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub thresholds: Vec<f64>,
    pub schedule: ScheduleConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub td: Option<TdSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ppo: Option<PpoSection>,
}

impl ExperimentConfig {
    /// Fills defaults and validates pairings and ranges; idempotent.
    pub fn resolve(&mut self) -> Result<()> {
        if self.episodes == 0 {
            return Err(Error::config("episodes must be at least 1"));
        }
        match self.algorithm {
            Algorithm::Td0 => {
                if self.env != EnvKind::Randomwalk {
                    return Err(Error::config(format!(
                        "algorithm td0 only pairs with env randomwalk, got {}",
                        self.env.name()
                    )));
                }
                self.runs.get_or_insert(DEFAULT_TD_RUNS);
                let td = self.td.get_or_insert_with(TdSection::default);
                let alpha = *td.alpha.get_or_insert(DEFAULT_ALPHA);
                if !(alpha > 0.0 && alpha <= 1.0) {
                    return Err(Error::config(format!(
                        "td.alpha must lie in (0, 1], got {alpha}"
                    )));
                }
                if self.ppo.is_some() {
                    return Err(Error::config("a td0 experiment takes no [ppo] section"));
                }
            }
            Algorithm::Ppo => {
                if self.env == EnvKind::Randomwalk {
                    return Err(Error::config(
                        "algorithm ppo pairs with tempcontrol or fourtank, not randomwalk",
                    ));
                }
                self.runs.get_or_insert(DEFAULT_PPO_RUNS);
                let ppo = self.ppo.get_or_insert_with(PpoSection::default);
                ppo.resolve();
                ppo.to_ppo_config().validate().map_err(|e| {
                    Error::config(format!("[ppo] section invalid: {e}"))
                })?;
                if self.td.is_some() {
                    return Err(Error::config("a ppo experiment takes no [td] section"));
                }
            }
        }
        match self.env {
            EnvKind::Randomwalk => {
                let size = self.size.ok_or_else(|| {
                    Error::config("env randomwalk requires `size` (total states: 5, 11, 33, ...)")
                })?;
                if size < 5 || size % 2 == 0 {
                    return Err(Error::config(format!(
                        "size must be an odd total state count >= 5, got {size}"
                    )));
                }
                if self.omega.is_some() || self.c.is_some() {
                    return Err(Error::config(
                        "`omega` and `c` do not apply to the random walk",
                    ));
                }
            }
            EnvKind::Tempcontrol => {
                self.omega.get_or_insert(1.0);
                if self.size.is_some() || self.c.is_some() {
                    return Err(Error::config(
                        "`size` and `c` do not apply to tempcontrol",
                    ));
                }
            }
            EnvKind::Fourtank => {
                self.omega.get_or_insert(1.0);
                let c = self.c.get_or_insert_with(|| DEFAULT_COEFFS.to_vec());
                if c.len() != 10 {
                    return Err(Error::config(format!(
                        "`c` must hold exactly 10 coefficients, got {}",
                        c.len()
                    )));
                }
                if self.size.is_some() {
                    return Err(Error::config("`size` does not apply to fourtank"));
                }
            }
        }
        if self.runs == Some(0) {
            return Err(Error::config("runs must be at least 1"));
        }
        if self.thresholds.iter().any(|t| !t.is_finite()) {
            return Err(Error::config("thresholds must be finite"));
        }
        self.schedule.resolve()?;
        self.out_dir
            .get_or_insert_with(|| PathBuf::from(DEFAULT_OUT_DIR));
        // Constructing the schedule exercises its own range checks.
        self.schedule.to_schedule()?;
        Ok(())
    }

    pub fn runs(&self) -> usize {
        self.runs.unwrap_or(1)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::config(e.to_string()))
    }
}

/// Parses, default-fills, and validates a config file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path).map_err(|e| {
        Error::config(format!("cannot read {}: {e}", path.display()))
    })?;
    let mut config: ExperimentConfig = toml::from_str(&text).map_err(|e| {
        Error::config(format!("{}: {e}", path.display()))
    })?;
    config.resolve()?;
    Ok(config)
}

/// Output-directory precedence: CLI flag, then the `ASSISTRL_OUT_DIR`
/// environment variable, then the config, then `results`.
pub fn resolve_out_dir(cli: Option<&Path>, config: &ExperimentConfig) -> PathBuf {
    if let Some(dir) = cli {
        return dir.to_path_buf();
    }
    if let Ok(dir) = std::env::var(OUT_DIR_ENV_VAR) {
        if !dir.is_empty() {
            return PathBuf::from(dir);
        }
    }
    config
        .out_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}
