//! CSV emission and parsing. Period decimal separator, comma fields, Unix
//! newlines; floats printed in shortest round-trip form so identical runs
//! produce byte-identical files.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// One per-episode row of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub run: usize,
    pub episode: usize,
    pub beta: f64,
    /// RMS error for td0 experiments, episodic target-reward return for ppo.
    pub metric: f64,
}

pub const RUNS_HEADER: &str = "run,episode,beta,metric";
pub const MEAN_HEADER: &str = "episode,beta,metric_mean,metric_stderr";

pub fn write_runs_csv(path: &Path, rows: &[RunRecord]) -> Result<()> {
    let mut out = String::with_capacity(rows.len() * 32 + 32);
    out.push_str(RUNS_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            row.run, row.episode, row.beta, row.metric
        ));
    }
    fs::write(path, out)?;
    Ok(())
}

/// Aggregated curve: one row per episode.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanCurveRow {
    pub episode: usize,
    pub beta: f64,
    pub metric_mean: f64,
    pub metric_stderr: f64,
}

pub fn write_mean_csv(path: &Path, rows: &[MeanCurveRow]) -> Result<()> {
    let mut out = String::with_capacity(rows.len() * 32 + 32);
    out.push_str(MEAN_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            row.episode, row.beta, row.metric_mean, row.metric_stderr
        ));
    }
    fs::write(path, out)?;
    Ok(())
}

fn find_column(path: &Path, header: &str, name: &str) -> Result<usize> {
    header
        .split(',')
        .position(|c| c.trim() == name)
        .ok_or_else(|| Error::MissingColumn {
            path: path.to_path_buf(),
            column: name.to_string(),
        })
}

/// Reads an aggregated curve, tolerant of column order but strict about the
/// column set.
pub fn read_mean_csv(path: &Path) -> Result<Vec<MeanCurveRow>> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::config(format!("{}: empty file", path.display())))?;
    let episode_col = find_column(path, header, "episode")?;
    let beta_col = find_column(path, header, "beta")?;
    let mean_col = find_column(path, header, "metric_mean")?;
    let stderr_col = find_column(path, header, "metric_stderr")?;

    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let get = |col: usize| -> Result<&str> {
            fields.get(col).copied().ok_or_else(|| {
                Error::config(format!(
                    "{}:{}: row has {} fields",
                    path.display(),
                    lineno + 2,
                    fields.len()
                ))
            })
        };
        let parse = |s: &str| -> Result<f64> {
            s.trim().parse::<f64>().map_err(|e| {
                Error::config(format!("{}:{}: {e}", path.display(), lineno + 2))
            })
        };
        rows.push(MeanCurveRow {
            episode: get(episode_col)?.trim().parse().map_err(|e| {
                Error::config(format!("{}:{}: {e}", path.display(), lineno + 2))
            })?,
            beta: parse(get(beta_col)?)?,
            metric_mean: parse(get(mean_col)?)?,
            metric_stderr: parse(get(stderr_col)?)?,
        });
    }
    Ok(rows)
}

/// Reads a per-run CSV back into records (used by aggregation cross-checks).
pub fn read_runs_csv(path: &Path) -> Result<Vec<RunRecord>> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::config(format!("{}: empty file", path.display())))?;
    let run_col = find_column(path, header, "run")?;
    let episode_col = find_column(path, header, "episode")?;
    let beta_col = find_column(path, header, "beta")?;
    let metric_col = find_column(path, header, "metric")?;

    let mut rows = Vec::new();
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        rows.push(RunRecord {
            run: fields[run_col].trim().parse().map_err(|e| Error::config(format!("{e}")))?,
            episode: fields[episode_col]
                .trim()
                .parse()
                .map_err(|e| Error::config(format!("{e}")))?,
            beta: fields[beta_col]
                .trim()
                .parse()
                .map_err(|e| Error::config(format!("{e}")))?,
            metric: fields[metric_col]
                .trim()
                .parse()
                .map_err(|e| Error::config(format!("{e}")))?,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let rows = vec![
            RunRecord {
                run: 0,
                episode: 0,
                beta: 0.95,
                metric: 0.540_062_5,
            },
            RunRecord {
                run: 1,
                episode: 1,
                beta: 0.902_5,
                metric: 1.0 / 3.0,
            },
        ];
        let path = dir.path().join("runs.csv");
        write_runs_csv(&path, &rows).unwrap();
        let loaded = read_runs_csv(&path).unwrap();
        assert_eq!(rows, loaded);
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("run,episode,beta,metric\n"));
        assert!(!text.contains('\r'));
    }

    #[test]
    fn missing_column_names_the_column() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "episode,beta,metric_mean\n0,1,2\n").unwrap();
        let err = read_mean_csv(&path).unwrap_err();
        assert!(err.to_string().contains("metric_stderr"), "{err}");
    }
}
