//! JSON experiment and sweep files.
//!
//! Files are parsed strictly: unknown keys are rejected, and every semantic
//! error names the offending key.

use std::fs;
use std::path::Path;

use gwa_bandit::sim::{default_checkpoints, ValueRange};
use gwa_bandit::{EnvKind, ExperimentConfig, PolicySpec, RewardScheme, SweepConfig, SweepGrid};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Default cap on sweep grid size.
pub const DEFAULT_MAX_CELLS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ConfigFile {
    Experiment(ExperimentFile),
    Sweep(SweepFile),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvFile {
    Uniform,
    Normal,
    SurvivalFixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeFile {
    ZeroOne,
    PlusMinusOne,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PolicyFile {
    Ucb1,
    Ucb1Tuned,
    GUcb1 { c: f64 },
    GwaUcb1 { alpha: f64, m: f64 },
    Thompson,
    UniformRandom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentFile {
    pub experiment_id: String,
    pub k: usize,
    pub horizon: u64,
    pub trials: usize,
    pub env: EnvFile,
    /// Defaults to `plus_minus_one` for `survival_fixed`, else `zero_one`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reward_scheme: Option<SchemeFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_budget: Option<i64>,
    pub policies: Vec<PolicyFile>,
    #[serde(default)]
    pub master_seed: u64,
    /// Defaults to the 1-2-5 decade schedule plus the horizon.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checkpoints: Option<Vec<u64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeFile {
    pub start: f64,
    pub end: f64,
    pub step: f64,
}

/// Either `c` alone (G-UCB1) or `alpha` and `m` together (GWA-UCB1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<RangeFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<RangeFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<RangeFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepFile {
    pub experiment_id: String,
    pub k: usize,
    pub horizon: u64,
    pub trials: usize,
    pub env: EnvFile,
    #[serde(default)]
    pub master_seed: u64,
    pub grid: GridFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_cells: Option<usize>,
}

/// A validated configuration ready to run.
#[derive(Debug, Clone, PartialEq)]
pub enum Parsed {
    Experiment(ExperimentConfig),
    Sweep(SweepConfig),
}

/// Reads and validates a config file.
pub fn parse_config(path: &Path) -> Result<Parsed, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let file = parse_config_str(&text).map_err(|e| match e {
        CliError::Parse { message, .. } => CliError::Parse {
            origin: path.display().to_string(),
            message,
        },
        other => other,
    })?;
    file.validate()
}

/// Parses config text without semantic validation.
pub fn parse_config_str(text: &str) -> Result<ConfigFile, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Parse {
        origin: "<config>".into(),
        message: with_location(text, e),
    })
}

/// Tagged enums are buffered before decoding, so serde reports unknown or
/// invalid names without a position; recover the line from the text.
fn with_location(text: &str, err: serde_json::Error) -> String {
    let message = err.to_string();
    if err.line() > 0 {
        return message;
    }
    let quoted = message.split('`').nth(1).map(|name| format!("\"{name}\""));
    match quoted.and_then(|q| text.lines().position(|l| l.contains(&q))) {
        Some(i) => format!("{message} at line {}", i + 1),
        None => message,
    }
}

fn invalid(key: impl Into<String>, message: impl ToString) -> CliError {
    CliError::Invalid {
        key: key.into(),
        message: message.to_string(),
    }
}

impl ConfigFile {
    pub fn validate(&self) -> Result<Parsed, CliError> {
        match self {
            ConfigFile::Experiment(e) => e.to_config().map(Parsed::Experiment),
            ConfigFile::Sweep(s) => s.to_config().map(Parsed::Sweep),
        }
    }

    pub fn experiment_id(&self) -> &str {
        match self {
            ConfigFile::Experiment(e) => &e.experiment_id,
            ConfigFile::Sweep(s) => &s.experiment_id,
        }
    }

    pub fn set_trials(&mut self, trials: usize) {
        match self {
            ConfigFile::Experiment(e) => e.trials = trials,
            ConfigFile::Sweep(s) => s.trials = trials,
        }
    }

    pub fn set_seed(&mut self, seed: u64) {
        match self {
            ConfigFile::Experiment(e) => e.master_seed = seed,
            ConfigFile::Sweep(s) => s.master_seed = seed,
        }
    }
}

impl EnvFile {
    fn kind(self) -> EnvKind {
        match self {
            EnvFile::Uniform => EnvKind::Uniform,
            EnvFile::Normal => EnvKind::Normal,
            EnvFile::SurvivalFixed => EnvKind::SurvivalFixed,
        }
    }
}

impl PolicyFile {
    pub fn to_spec(self, key: &str) -> Result<PolicySpec, CliError> {
        Ok(match self {
            PolicyFile::Ucb1 => PolicySpec::Ucb1,
            PolicyFile::Ucb1Tuned => PolicySpec::Ucb1Tuned,
            PolicyFile::GUcb1 { c } => {
                PolicySpec::g_ucb1(c).map_err(|e| invalid(format!("{key}.c"), e))?
            }
            PolicyFile::GwaUcb1 { alpha, m } => {
                let field = if (0.0..=1.0).contains(&alpha) {
                    "m"
                } else {
                    "alpha"
                };
                PolicySpec::gwa_ucb1(alpha, m).map_err(|e| invalid(format!("{key}.{field}"), e))?
            }
            PolicyFile::Thompson => PolicySpec::Thompson,
            PolicyFile::UniformRandom => PolicySpec::UniformRandom,
        })
    }
}

impl ExperimentFile {
    pub fn to_config(&self) -> Result<ExperimentConfig, CliError> {
        let policies = self
            .policies
            .iter()
            .enumerate()
            .map(|(i, p)| p.to_spec(&format!("policies[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        let reward_scheme = match self.reward_scheme {
            Some(SchemeFile::ZeroOne) => RewardScheme::ZeroOne,
            Some(SchemeFile::PlusMinusOne) => RewardScheme::PlusMinusOne,
            None if self.env == EnvFile::SurvivalFixed => RewardScheme::PlusMinusOne,
            None => RewardScheme::ZeroOne,
        };
        let config = ExperimentConfig {
            experiment_id: self.experiment_id.clone(),
            k: self.k,
            horizon: self.horizon,
            trials: self.trials,
            env_kind: self.env.kind(),
            reward_scheme,
            initial_budget: self.initial_budget,
            policies,
            master_seed: self.master_seed,
            checkpoints: self
                .checkpoints
                .clone()
                .unwrap_or_else(|| default_checkpoints(self.horizon)),
        };
        config
            .validate()
            .map_err(|e| invalid(key_for(&e, self), e))?;
        Ok(config)
    }
}

/// Best-effort mapping from a validation failure to the config key at fault.
fn key_for(err: &gwa_bandit::Error, file: &ExperimentFile) -> &'static str {
    use gwa_bandit::Error;
    match err {
        Error::TooFewArms(_) => "k",
        Error::Config(msg) if msg.contains("horizon") && file.checkpoints.is_none() => "horizon",
        Error::Config(msg) if msg.contains("checkpoint") => "checkpoints",
        Error::Config(msg) if msg.contains("initial_budget") || msg.contains("initial budget") => {
            "initial_budget"
        }
        Error::Config(msg) if msg.contains("trials") => "trials",
        Error::Config(msg) if msg.contains("polic") => "policies",
        Error::Config(msg) if msg.contains("experiment_id") => "experiment_id",
        Error::Config(msg) if msg.contains("horizon") => "horizon",
        _ => "<root>",
    }
}

fn range(key: &str, r: RangeFile) -> Result<ValueRange, CliError> {
    ValueRange::new(r.start, r.end, r.step).map_err(|e| invalid(key, e))
}

impl SweepFile {
    pub fn to_config(&self) -> Result<SweepConfig, CliError> {
        if self.env == EnvFile::SurvivalFixed {
            return Err(invalid(
                "env",
                "sweeps measure regret; survival_fixed is not allowed",
            ));
        }
        let grid = match (self.grid.c, self.grid.alpha, self.grid.m) {
            (Some(c), None, None) => SweepGrid::Exploration {
                c: range("grid.c", c)?,
            },
            (None, Some(a), Some(m)) => SweepGrid::Gwa {
                alpha: range("grid.alpha", a)?,
                m: range("grid.m", m)?,
            },
            _ => {
                return Err(invalid(
                    "grid",
                    "give either `c` alone or both `alpha` and `m`",
                ))
            }
        };
        // Validate grid values against the policy constructors up front.
        let base = ExperimentConfig {
            experiment_id: self.experiment_id.clone(),
            k: self.k,
            horizon: self.horizon,
            trials: self.trials,
            env_kind: self.env.kind(),
            reward_scheme: RewardScheme::ZeroOne,
            initial_budget: None,
            policies: vec![PolicySpec::Ucb1],
            master_seed: self.master_seed,
            checkpoints: vec![self.horizon],
        };
        base.validate().map_err(|e| {
            let key = match e {
                gwa_bandit::Error::TooFewArms(_) => "k",
                gwa_bandit::Error::Config(ref m) if m.contains("trials") => "trials",
                _ => "horizon",
            };
            invalid(key, e)
        })?;
        if grid.cell_count() <= self.max_cells.unwrap_or(DEFAULT_MAX_CELLS) {
            grid.points().map_err(|e| invalid("grid", e))?;
        }
        Ok(SweepConfig {
            base,
            grid,
            max_cells: self.max_cells.unwrap_or(DEFAULT_MAX_CELLS),
        })
    }
}
