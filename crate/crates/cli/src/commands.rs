//! `experiment` and `sweep` subcommands.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use gwa_bandit::sim::{run_experiment, run_sweep, GridPoint, Metric, SweepResult};
use gwa_bandit::{AggregateCurve, ExperimentConfig, SweepConfig};

use crate::config::{parse_config_str, ConfigFile, Parsed};
use crate::error::CliError;
use crate::output::{
    curve_rows, grid_rows, write_curves_csv, write_grid_csv, write_manifest, RunManifest,
};
use crate::presets::{preset, Scale};

/// Where a configuration comes from.
#[derive(Debug, Clone)]
pub enum Source {
    Preset(String),
    File(PathBuf),
}

/// Flags shared by both subcommands; `Some` values override the config.
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    /// 0 uses every core.
    pub threads: usize,
    pub out_dir: PathBuf,
    pub full_scale: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            trials: None,
            seed: None,
            threads: 0,
            out_dir: PathBuf::from("results"),
            full_scale: false,
        }
    }
}

/// Loads a config and applies flag overrides.
pub fn load(source: &Source, opts: &RunOptions) -> Result<ConfigFile, CliError> {
    let mut file = match source {
        Source::Preset(name) => {
            let scale = if opts.full_scale {
                Scale::Full
            } else {
                Scale::Desk
            };
            preset(name, scale)?
        }
        Source::File(path) => {
            let text = fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            parse_config_str(&text).map_err(|e| match e {
                CliError::Parse { message, .. } => CliError::Parse {
                    origin: path.display().to_string(),
                    message,
                },
                other => other,
            })?
        }
    };
    if let Some(t) = opts.trials {
        file.set_trials(t);
    }
    if let Some(s) = opts.seed {
        file.set_seed(s);
    }
    Ok(file)
}

fn source_name(source: &Source) -> String {
    match source {
        Source::Preset(p) => p.clone(),
        Source::File(f) => f.display().to_string(),
    }
}

/// Removes every file it tracks unless disarmed.
struct PartialOutputs(Vec<PathBuf>);

impl PartialOutputs {
    fn track(&mut self, p: &Path) {
        self.0.push(p.to_path_buf());
    }

    fn keep(mut self) {
        self.0.clear();
    }
}

impl Drop for PartialOutputs {
    fn drop(&mut self) {
        for p in &self.0 {
            let _ = fs::remove_file(p);
        }
    }
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })
}

pub struct ExperimentRun {
    pub config: ExperimentConfig,
    pub curves: Vec<AggregateCurve>,
    pub combined_csv: PathBuf,
    pub manifest: PathBuf,
}

pub fn experiment(source: &Source, opts: &RunOptions) -> Result<ExperimentRun, CliError> {
    let file = load(source, opts)?;
    let config = match file.validate()? {
        Parsed::Experiment(c) => c,
        Parsed::Sweep(_) => {
            return Err(CliError::WrongKind {
                preset: source_name(source),
                expected: "experiment",
                actual: "sweep",
            })
        }
    };
    let started = Instant::now();
    let curves = run_experiment(&config, opts.threads)?;
    let elapsed = started.elapsed().as_secs_f64();

    ensure_dir(&opts.out_dir)?;
    let id = &config.experiment_id;
    let mut written = PartialOutputs(Vec::new());
    let mut outputs = BTreeMap::new();

    let rows = curve_rows(id, config.k, &curves);
    let combined = opts.out_dir.join(format!("{id}_curves.csv"));
    written.track(&combined);
    write_curves_csv(&combined, &rows)?;
    outputs.insert("all".to_string(), combined.clone());

    for policy in &config.policies {
        let pid = policy.id();
        let path = opts.out_dir.join(format!("{id}_{pid}.csv"));
        let mine: Vec<_> = rows.iter().filter(|r| r.policy == pid).cloned().collect();
        written.track(&path);
        write_curves_csv(&path, &mine)?;
        outputs.insert(pid, path);
    }

    let manifest = opts.out_dir.join(format!("{id}_manifest.json"));
    written.track(&manifest);
    write_manifest(
        &manifest,
        &RunManifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: "experiment",
            config: file,
            master_seed: config.master_seed,
            threads: opts.threads,
            wall_clock_seconds: elapsed,
            outputs,
        },
    )?;
    written.keep();
    Ok(ExperimentRun {
        config,
        curves,
        combined_csv: combined,
        manifest,
    })
}

pub struct SweepRun {
    pub config: SweepConfig,
    pub result: SweepResult,
    pub grid_csv: PathBuf,
    pub manifest: PathBuf,
}

pub fn sweep(source: &Source, opts: &RunOptions) -> Result<SweepRun, CliError> {
    let file = load(source, opts)?;
    let config = match file.validate()? {
        Parsed::Sweep(s) => s,
        Parsed::Experiment(_) => {
            return Err(CliError::WrongKind {
                preset: source_name(source),
                expected: "sweep",
                actual: "experiment",
            })
        }
    };
    let started = Instant::now();
    let result = run_sweep(&config, opts.threads)?;
    let elapsed = started.elapsed().as_secs_f64();

    ensure_dir(&opts.out_dir)?;
    let id = &config.base.experiment_id;
    let mut written = PartialOutputs(Vec::new());
    let grid_csv = opts.out_dir.join(format!("{id}_grid.csv"));
    written.track(&grid_csv);
    write_grid_csv(&grid_csv, &grid_rows(&result))?;

    let manifest = opts.out_dir.join(format!("{id}_manifest.json"));
    written.track(&manifest);
    write_manifest(
        &manifest,
        &RunManifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: "sweep",
            config: file,
            master_seed: config.base.master_seed,
            threads: opts.threads,
            wall_clock_seconds: elapsed,
            outputs: BTreeMap::from([("grid".to_string(), grid_csv.clone())]),
        },
    )?;
    written.keep();
    Ok(SweepRun {
        config,
        result,
        grid_csv,
        manifest,
    })
}

/// Final value per policy: mean ± stderr, or survival rate and budget.
pub fn experiment_summary(run: &ExperimentRun) -> String {
    let mut out = String::new();
    let cfg = &run.config;
    let _ = writeln!(
        out,
        "{}: k={}, horizon={}, trials={}",
        cfg.experiment_id, cfg.k, cfg.horizon, cfg.trials
    );
    let by_policy = |metric: Metric| {
        run.curves
            .iter()
            .filter(move |c| c.metric == metric)
            .map(|c| (c.policy.as_str(), c.last()))
    };
    if cfg.is_survival() {
        let _ = writeln!(
            out,
            "{:<28} {:>22} {:>24}",
            "policy", "survival rate", "mean budget"
        );
        for ((policy, s), (_, b)) in
            by_policy(Metric::SurvivalRate).zip(by_policy(Metric::MeanBudget))
        {
            let _ = writeln!(
                out,
                "{policy:<28} {:>13.4} ± {:<6.4} {:>13.2} ± {:<8.2}",
                s.mean, s.stderr, b.mean, b.stderr
            );
        }
    } else {
        let _ = writeln!(out, "{:<28} {:>26}", "policy", "final regret");
        for (policy, p) in by_policy(Metric::Regret) {
            let _ = writeln!(out, "{policy:<28} {:>15.3} ± {:<8.3}", p.mean, p.stderr);
        }
    }
    out
}

pub fn sweep_summary(run: &SweepRun) -> String {
    let best = run.result.best();
    let at = match best.point {
        GridPoint::Exploration { c } => format!("c = {c}"),
        GridPoint::Gwa { alpha, m } => format!("alpha = {alpha}, m = {m}"),
    };
    format!(
        "{}: {} cells, argmin {at} with mean final regret {:.3} ± {:.3}\n",
        run.config.base.experiment_id,
        run.result.cells.len(),
        best.mean_final_regret,
        best.stderr
    )
}
