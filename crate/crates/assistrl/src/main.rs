use std::path::PathBuf;

use anyhow::Context;
use clap::{Parser, Subcommand};

use assistrl::harness::{load_config, plot_curve_files, resolve_out_dir, run_experiment};
use assistrl::mdp::RewardChoice;

#[derive(Parser)]
#[command(name = "assistrl", version, about = "Assistant-reward annealing experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a configured experiment and write CSV curves, a summary, and a plot.
    Run {
        /// Path to the experiment config (TOML).
        config: PathBuf,
        /// Output directory (overrides config and ASSISTRL_OUT_DIR).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads for parallel runs (default: all cores).
        #[arg(long)]
        workers: Option<usize>,
        /// Master seed override.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Plot one or more aggregated mean-curve CSVs into a single SVG.
    Plot {
        /// Aggregated curve files (mean_curve.csv outputs).
        #[arg(required = true)]
        curves: Vec<PathBuf>,
        /// Output SVG path.
        #[arg(long, default_value = "curves.svg")]
        out: PathBuf,
        /// Plot title.
        #[arg(long)]
        title: Option<String>,
        /// Trailing moving-average window applied before plotting.
        #[arg(long, default_value_t = 50)]
        window: usize,
    },
    /// Print the exact random-walk state values (target reward, solved
    /// directly from the Bellman system).
    TrueValues {
        /// Total state count, terminals included: 5, 11, 33, ...
        #[arg(long)]
        size: usize,
    },
}

fn main() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Run {
            config,
            out,
            workers,
            seed,
        } => {
            let mut experiment = load_config(&config)
                .with_context(|| format!("loading {}", config.display()))?;
            if let Some(seed) = seed {
                experiment.master_seed = seed;
            }
            let out_dir = resolve_out_dir(out.as_deref(), &experiment);
            let output = run_experiment(&experiment, &out_dir, workers)?;
            println!("wrote {}", output.runs_csv.display());
            println!("wrote {}", output.mean_csv.display());
            println!("wrote {}", output.summary_path.display());
            println!("wrote {}", output.plot_path.display());
            Ok(())
        }
        Command::Plot {
            curves,
            out,
            title,
            window,
        } => {
            plot_curve_files(&curves, &out, title.as_deref(), window.max(1))?;
            println!("wrote {}", out.display());
            Ok(())
        }
        Command::TrueValues { size } => {
            let env = assistrl::envs::RandomWalkEnv::from_total_states(size)?;
            let values = env.true_values(RewardChoice::Target);
            println!("state,value");
            for (i, v) in values.iter().enumerate() {
                println!("{},{}", i + 1, v);
            }
            Ok(())
        }
    }
}
