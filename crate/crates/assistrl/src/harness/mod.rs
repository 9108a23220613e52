//! Configuration-driven experiment harness: seeded runs, CSV curves,
//! summaries, and SVG plots.

pub mod config;
pub mod csvio;
pub mod plot;
pub mod runner;
pub mod stats;

pub use config::{load_config, resolve_out_dir, Algorithm, EnvKind, ExperimentConfig};
pub use csvio::{read_mean_csv, read_runs_csv, MeanCurveRow, RunRecord};
pub use plot::{plot_curve_files, render_svg, Series};
pub use runner::{run_experiment, ExperimentOutput};
pub use stats::{
    episodes_to_threshold, linear_trend_slope, moving_average, tail_mean, Direction,
};
