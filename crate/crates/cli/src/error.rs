use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot access {}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("cannot parse {origin}: {message}")]
    Parse { origin: String, message: String },
    #[error("invalid value for `{key}`: {message}")]
    Invalid { key: String, message: String },
    #[error("unknown preset {0:?}; run `gwa-bandit presets` for the list")]
    UnknownPreset(String),
    #[error("preset {preset:?} is a {actual}, not a {expected}")]
    WrongKind {
        preset: String,
        expected: &'static str,
        actual: &'static str,
    },
    #[error("malformed CSV {}: {message}", path.display())]
    Csv { path: PathBuf, message: String },
    #[error(transparent)]
    Sim(#[from] gwa_bandit::Error),
}
