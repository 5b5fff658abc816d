//! CSV and manifest writers.
//!
//! Curve files use the columns
//! `experiment_id,policy,k,checkpoint_step,metric,mean,stderr,trials`, rows
//! sorted by policy, then checkpoint, then metric. Grid files use
//! `alpha,m,mean_final_regret,stderr` or `c,mean_final_regret,stderr`, sorted
//! by the grid coordinates. Floats are written in shortest round-trip form.

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use gwa_bandit::sim::{GridPoint, Metric, SweepResult};
use gwa_bandit::AggregateCurve;
use serde::Serialize;

use crate::error::CliError;

pub const CURVE_HEADER: [&str; 8] = [
    "experiment_id",
    "policy",
    "k",
    "checkpoint_step",
    "metric",
    "mean",
    "stderr",
    "trials",
];

/// One data row of a curve file.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveRow {
    pub experiment_id: String,
    pub policy: String,
    pub k: usize,
    pub checkpoint_step: u64,
    pub metric: Metric,
    pub mean: f64,
    pub stderr: f64,
    pub trials: usize,
}

/// Flattens curves into sorted rows.
pub fn curve_rows(experiment_id: &str, k: usize, curves: &[AggregateCurve]) -> Vec<CurveRow> {
    let mut rows: Vec<CurveRow> = curves
        .iter()
        .flat_map(|c| {
            c.points.iter().map(move |p| CurveRow {
                experiment_id: experiment_id.to_string(),
                policy: c.policy.clone(),
                k,
                checkpoint_step: p.step,
                metric: c.metric,
                mean: p.mean,
                stderr: p.stderr,
                trials: p.trials,
            })
        })
        .collect();
    rows.sort_by(|a, b| {
        (&a.policy, a.checkpoint_step, a.metric).cmp(&(&b.policy, b.checkpoint_step, b.metric))
    });
    rows
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_err(path: &Path, e: csv::Error) -> CliError {
    match e.into_kind() {
        csv::ErrorKind::Io(source) => CliError::Io {
            path: path.to_path_buf(),
            source,
        },
        other => CliError::Csv {
            path: path.to_path_buf(),
            message: format!("{other:?}"),
        },
    }
}

fn write_records(path: &Path, header: &[&str], rows: Vec<Vec<String>>) -> Result<(), CliError> {
    if rows.is_empty() {
        return Err(CliError::Csv {
            path: path.to_path_buf(),
            message: "refusing to write a file without data rows".into(),
        });
    }
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record(header).map_err(|e| csv_err(path, e))?;
    for row in rows {
        w.write_record(&row).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn write_curves_csv(path: &Path, rows: &[CurveRow]) -> Result<(), CliError> {
    let records = rows
        .iter()
        .map(|r| {
            vec![
                r.experiment_id.clone(),
                r.policy.clone(),
                r.k.to_string(),
                r.checkpoint_step.to_string(),
                r.metric.to_string(),
                r.mean.to_string(),
                r.stderr.to_string(),
                r.trials.to_string(),
            ]
        })
        .collect();
    write_records(path, &CURVE_HEADER, records)
}

fn read_records(path: &Path, header: &[&str]) -> Result<Vec<csv::StringRecord>, CliError> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
    let found = rdr.headers().map_err(|e| csv_err(path, e))?.clone();
    if found.iter().ne(header.iter().copied()) {
        return Err(CliError::Csv {
            path: path.to_path_buf(),
            message: format!("unexpected header {found:?}"),
        });
    }
    rdr.records()
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| csv_err(path, e))
}

fn field<T: std::str::FromStr>(
    path: &Path,
    rec: &csv::StringRecord,
    i: usize,
) -> Result<T, CliError> {
    rec.get(i)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| CliError::Csv {
            path: path.to_path_buf(),
            message: format!("bad field {i} in record {rec:?}"),
        })
}

pub fn read_curves_csv(path: &Path) -> Result<Vec<CurveRow>, CliError> {
    read_records(path, &CURVE_HEADER)?
        .iter()
        .map(|rec| {
            Ok(CurveRow {
                experiment_id: field(path, rec, 0)?,
                policy: field(path, rec, 1)?,
                k: field(path, rec, 2)?,
                checkpoint_step: field(path, rec, 3)?,
                metric: field(path, rec, 4)?,
                mean: field(path, rec, 5)?,
                stderr: field(path, rec, 6)?,
                trials: field(path, rec, 7)?,
            })
        })
        .collect()
}

/// One data row of a grid file; `m` is `None` for G-UCB1 sweeps, where
/// `param` holds `c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridRow {
    pub param: f64,
    pub m: Option<f64>,
    pub mean_final_regret: f64,
    pub stderr: f64,
}

pub const GWA_GRID_HEADER: [&str; 4] = ["alpha", "m", "mean_final_regret", "stderr"];
pub const C_GRID_HEADER: [&str; 3] = ["c", "mean_final_regret", "stderr"];

pub fn grid_rows(result: &SweepResult) -> Vec<GridRow> {
    let mut rows: Vec<GridRow> = result
        .cells
        .iter()
        .map(|cell| {
            let (param, m) = match cell.point {
                GridPoint::Exploration { c } => (c, None),
                GridPoint::Gwa { alpha, m } => (alpha, Some(m)),
            };
            GridRow {
                param,
                m,
                mean_final_regret: cell.mean_final_regret,
                stderr: cell.stderr,
            }
        })
        .collect();
    rows.sort_by(|a, b| {
        a.param
            .total_cmp(&b.param)
            .then(a.m.unwrap_or(0.0).total_cmp(&b.m.unwrap_or(0.0)))
    });
    rows
}

pub fn write_grid_csv(path: &Path, rows: &[GridRow]) -> Result<(), CliError> {
    let is_gwa = rows.first().is_some_and(|r| r.m.is_some());
    let records = rows
        .iter()
        .map(|r| {
            let mut rec = vec![r.param.to_string()];
            if let Some(m) = r.m {
                rec.push(m.to_string());
            }
            rec.push(r.mean_final_regret.to_string());
            rec.push(r.stderr.to_string());
            rec
        })
        .collect();
    let header: &[&str] = if is_gwa {
        &GWA_GRID_HEADER
    } else {
        &C_GRID_HEADER
    };
    write_records(path, header, records)
}

pub fn read_grid_csv(path: &Path) -> Result<Vec<GridRow>, CliError> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    let is_gwa = text.starts_with("alpha,");
    if is_gwa {
        read_records(path, &GWA_GRID_HEADER)?
            .iter()
            .map(|rec| {
                Ok(GridRow {
                    param: field(path, rec, 0)?,
                    m: Some(field(path, rec, 1)?),
                    mean_final_regret: field(path, rec, 2)?,
                    stderr: field(path, rec, 3)?,
                })
            })
            .collect()
    } else {
        read_records(path, &C_GRID_HEADER)?
            .iter()
            .map(|rec| {
                Ok(GridRow {
                    param: field(path, rec, 0)?,
                    m: None,
                    mean_final_regret: field(path, rec, 1)?,
                    stderr: field(path, rec, 2)?,
                })
            })
            .collect()
    }
}

/// Record of one CLI run.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config: crate::config::ConfigFile,
    pub master_seed: u64,
    pub threads: usize,
    pub wall_clock_seconds: f64,
    /// Output files keyed by policy id, plus `all` for the combined file.
    pub outputs: std::collections::BTreeMap<String, PathBuf>,
}

pub fn write_manifest(path: &Path, manifest: &RunManifest) -> Result<(), CliError> {
    let mut f = File::create(path).map_err(io_err(path))?;
    serde_json::to_writer_pretty(&mut f, manifest).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        source: e.into(),
    })?;
    writeln!(f).map_err(io_err(path))
}
