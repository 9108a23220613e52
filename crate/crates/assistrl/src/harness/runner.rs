//! Config-driven experiment execution: fan out seeded runs, aggregate
//! per-episode curves, emit CSVs, a summary, and a plot.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::envs::{FourTankEnv, RandomWalkEnv, TempControlEnv};
use crate::error::{Error, Result};
use crate::harness::config::{Algorithm, EnvKind, ExperimentConfig};
use crate::harness::csvio::{write_mean_csv, write_runs_csv, MeanCurveRow, RunRecord};
use crate:: harness::plot::{render_svg, Series};
use crate::harness::stats::{episodes_to_threshold, mean, moving_average, stderr, Direction};
use crate::nn::checkpoint::save_params;
use crate::ppo::{ppo_train, PpoConfig};
use crate::schedule::BetaSchedule;
use crate::td::{run_td_experiment, StepSize};

pub const SUMMARY_MA_WINDOW: usize = 50;

#[derive(Debug)]
pub struct ExperimentOutput {
    pub out_dir: PathBuf,
    pub runs_csv: PathBuf,
    pub mean_csv: PathBuf,
    pub summary_path: PathBuf,
    pub plot_path: PathBuf,
    pub resolved_config_path: PathBuf,
    /// Per-episode mean of the metric over runs.
    pub mean_curve: Vec<f64>,
}

#[derive(Debug, Serialize)]
struct ThresholdEntry {
    threshold: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    episode: Option<usize>,
}

#[derive(Debug, Serialize)]
struct Summary {
    env: String,
    algorithm: String,
    schedule: String,
    episodes: usize,
    runs: usize,
    master_seed: u64,
    final_metric_mean: f64,
    best_metric_mean: f64,
    moving_average_window: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    thresholds: Vec<ThresholdEntry>,
}

fn all_records(config: &ExperimentConfig, sched: &BetaSchedule, out_dir: &Path) -> Result<Vec<RunRecord>> {
    let runs = config.runs();
    match config.algorithm {
        Algorithm::Td0 => {
            let size = config.size.expect("resolved config has a size");
            let env = RandomWalkEnv::from_total_states(size)?;
            let alpha = config
                .td
                .as_ref()
                .and_then(|t| t.alpha)
                .unwrap_or(crate::td::DEFAULT_ALPHA);
            let result = run_td_experiment(
                &env,
                sched,
                config.episodes,
                runs,
                StepSize::Constant(alpha),
                config.master_seed,
            )?;
            let mut rows = Vec::with_capacity(runs * config.episodes);
            for curve in &result.runs {
                for rec in &curve.records {
                    rows.push(RunRecord {
                        run: curve.run,
                        episode: rec.episode,
                        beta: rec.beta,
                        metric: rec.rms,
                    });
                }
            }
            Ok(rows)
        }
        Algorithm::Ppo => {
            let ppo_config: PpoConfig = config
                .ppo
                .as_ref()
                .expect("resolved config has a ppo section")
                .to_ppo_config();
            let omega = config.omega.unwrap_or(1.0);
            enum ControlEnv {
                Temp(TempControlEnv),
                Tank(FourTankEnv),
            }
            let env = match config.env {
                EnvKind::Tempcontrol => ControlEnv::Temp(TempControlEnv::new(omega)?),
                EnvKind::Fourtank => {
                    let coeffs = config.c.as_ref().expect("resolved config has coefficients");
                    let mut c = [0.0; 10];
                    c.copy_from_slice(coeffs);
                    ControlEnv::Tank(FourTankEnv::with_coeffs(c)?.with_omega(omega)?)
                }
                EnvKind::Randomwalk => unreachable!("pairing validated at load time"),
            };

            let checkpoints = out_dir.join("checkpoints");
            fs::create_dir_all(&checkpoints)?;

            let results = (0..runs)
                .into_par_iter()
                .map(|run| {
                    let trained = match &env {
                        ControlEnv::Temp(e) => ppo_train(
                            e,
                            sched,
                            &ppo_config,
                            config.episodes,
                            config.master_seed,
                            run as u64,
                        ),
                        ControlEnv::Tank(e) => ppo_train(
                            e,
                            sched,
                            &ppo_config,
                            config.episodes,
                            config.master_seed,
                            run as u64,
                        ),
                    };
                    trained.map(|t| (run, t)).map_err(|e| Error::RunFailed {
                        run,
                        source: Box::new(e),
                    })
                })
                .collect::<Result<Vec<_>>>()?;

            let mut rows = Vec::with_capacity(runs * config.episodes);
            let mut sorted = results;
            sorted.sort_by_key(|(run, _)| *run);
            for (run, trained) in sorted {
                save_params(&trained.actor, &checkpoints.join(format!("run{run}_actor.json")))?;
                save_params(&trained.critic, &checkpoints.join(format!("run{run}_critic.json")))?;
                for rec in &trained.records {
                    rows.push(RunRecord {
                        run,
                        episode: rec.episode,
                        beta: rec.beta,
                        metric: rec.return_target,
                    });
                }
            }
            Ok(rows)
        }
    }
}

fn aggregate(rows: &[RunRecord], episodes: usize, runs: usize) -> Result<Vec<MeanCurveRow>> {
    let mut per_episode: Vec<Vec<f64>> = vec![Vec::with_capacity(runs); episodes];
    let mut betas = vec![0.0; episodes];
    for row in rows {
        if row.episode >= episodes {
            return Err(Error::contract(format!(
                "episode index {} out of range",
                row.episode
            )));
        }
        per_episode[row.episode].push(row.metric);
        betas[row.episode] = row.beta;
    }
    per_episode
        .iter()
        .enumerate()
        .map(|(episode, metrics)| {
            if metrics.len() != runs {
                return Err(Error::contract(format!(
                    "episode {episode} has {} rows, expected {runs}",
                    metrics.len()
                )));
            }
            Ok(MeanCurveRow {
                episode,
                beta: betas[episode],
                metric_mean: mean(metrics),
                metric_stderr: stderr(metrics),
            })
        })
        .collect()
}

/// Runs the whole experiment into `out_dir`, never mutating the config.
/// A failing run aborts with an error and leaves a `FAILED` marker file next
/// to whatever partial outputs exist.
pub fn run_experiment(
    config: &ExperimentConfig,
    out_dir: &Path,
    workers: Option<usize>,
) -> Result<ExperimentOutput> {
    let mut resolved = config.clone();
    resolved.resolve()?;

    fs::create_dir_all(out_dir)?;
    let resolved_config_path = out_dir.join("resolved_config.toml");
    fs::write(&resolved_config_path, resolved.to_toml()?)?;

    let sched = resolved.schedule.to_schedule()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(|e| Error::config(e.to_string()))?;
    let rows = match pool.install(|| all_records(&resolved, &sched, out_dir)) {
        Ok(rows) => rows,
        Err(e) => {
            let marker = out_dir.join("FAILED");
            let _ = fs::write(&marker, format!("partial results; aborted: {e}\n"));
            return Err(e);
        }
    };

    let runs_csv = out_dir.join("runs.csv");
    write_runs_csv(&runs_csv, &rows)?;

    let aggregated = aggregate(&rows, resolved.episodes, resolved.runs())?;
    let mean_csv = out_dir.join("mean_curve.csv");
    write_mean_csv(&mean_csv, &aggregated)?;

    let mean_curve: Vec<f64> = aggregated.iter().map(|r| r.metric_mean).collect();
    let smoothed = moving_average(&mean_curve, SUMMARY_MA_WINDOW);
    let direction = match resolved.algorithm {
        Algorithm::Td0 => Direction::Below,
        Algorithm::Ppo => Direction::Above,
    };
    let thresholds = resolved
        .thresholds
        .iter()
        .map(|&threshold| ThresholdEntry {
            threshold,
            episode: episodes_to_threshold(&smoothed, threshold, direction),
        })
        .collect();

    let best = match direction {
        Direction::Below => mean_curve.iter().cloned().fold(f64::INFINITY, f64::min),
        Direction::Above => mean_curve.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    };
    let summary = Summary {
        env: resolved.env.name().to_string(),
        algorithm: resolved.algorithm.name().to_string(),
        schedule: resolved.schedule.label(),
        episodes: resolved.episodes,
        runs: resolved.runs(),
        master_seed: resolved.master_seed,
        final_metric_mean: *mean_curve.last().unwrap_or(&f64::NAN),
        best_metric_mean: best,
        moving_average_window: SUMMARY_MA_WINDOW,
        thresholds,
    };
    let summary_path = out_dir.join("summary.toml");
    fs::write(
        &summary_path,
        toml::to_string_pretty(&summary).map_err(|e| Error::config(e.to_string()))?,
    )?;

    // Control experiments are plotted with the customary 50-episode smoothing;
    // the tabular RMS curve is plotted raw.
    let plot_window = match resolved.algorithm {
        Algorithm::Td0 => 1,
        Algorithm::Ppo => SUMMARY_MA_WINDOW,
    };
    let plotted = if plot_window > 1 {
        moving_average(&mean_curve, plot_window)
    } else {
        mean_curve.clone()
    };
    let series = vec![Series {
        label: resolved.schedule.label(),
        points: plotted
            .iter()
            .enumerate()
            .map(|(e, &v)| (e as f64, v))
            .collect(),
    }];
    let metric_name = match resolved.algorithm {
        Algorithm::Td0 => "RMS error",
        Algorithm::Ppo => "target-reward return",
    };
    let svg = render_svg(
        &series,
        &format!("{} / {}", resolved.env.name(), resolved.algorithm.name()),
        "episode",
        metric_name,
    )?;
    let plot_path = out_dir.join("curve.svg");
    fs::write(&plot_path, svg)?;

    Ok(ExperimentOutput {
        out_dir: out_dir.to_path_buf(),
        runs_csv,
        mean_csv,
        summary_path,
        plot_path,
        resolved_config_path,
        mean_curve,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::load_config;
    use crate::harness::csvio::read_runs_csv;
    use std::io::Write;

    fn rw_config(dir: &Path) -> ExperimentConfig {
        let text = r#"
env = "randomwalk"
algorithm = "td0"
episodes = 30
runs = 6
master_seed = 11
size = 5
thresholds = [0.35]

[schedule]
kind = "exponential"
lambda = 0.95
"#;
        let path = dir.join("config.toml");
        let mut f = fs::File::create(&path).unwrap();
        f.write_all(text.as_bytes()).unwrap();
        load_config(&path).unwrap()
    }

    #[test]
    fn runner_emits_all_artifacts() {
        let dir = tempfile::tempdir().unwrap();
        let config = rw_config(dir.path());
        let out = run_experiment(&config, &dir.path().join("out"), Some(1)).unwrap();
        assert!(out.runs_csv.exists());
        assert!(out.mean_csv.exists());
        assert!(out.summary_path.exists());
        assert!(out.plot_path.exists());
        assert!(out.resolved_config_path.exists());
        assert_eq!(out.mean_curve.len(), 30);

        // Aggregation cross-check: recompute the mean from the per-run file.
        let rows = read_runs_csv(&out.runs_csv).unwrap();
        let episodes = 30;
        for episode in 0..episodes {
            let metrics: Vec<f64> = rows
                .iter()
                .filter(|r| r.episode == episode)
                .map(|r| r.metric)
                .collect();
            assert_eq!(metrics.len(), 6);
            let m = mean(&metrics);
            assert!((m - out.mean_curve[episode]).abs() < 1e-12);
        }
    }

    #[test]
    fn identical_seeds_give_byte_identical_csvs() {
        let dir = tempfile::tempdir().unwrap();
        let config = rw_config(dir.path());
        let a = run_experiment(&config, &dir.path().join("a"), Some(2)).unwrap();
        let b = run_experiment(&config, &dir.path().join("b"), Some(1)).unwrap();
        assert_eq!(
            fs::read(&a.runs_csv).unwrap(),
            fs::read(&b.runs_csv).unwrap()
        );
        assert_eq!(
            fs::read(&a.mean_csv).unwrap(),
            fs::read(&b.mean_csv).unwrap()
        );
    }

    #[test]
    fn config_is_not_mutated_by_the_runner() {
        let dir = tempfile::tempdir().unwrap();
        let config = rw_config(dir.path());
        let before = config.clone();
        run_experiment(&config, &dir.path().join("out"), Some(1)).unwrap();
        assert_eq!(config, before);
    }
}
