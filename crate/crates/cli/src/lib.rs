//! Command-line front end for the `gwa-bandit` simulator: strict JSON
//! configs, built-in presets, CSV curve and grid output, run manifests.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod presets;

pub use error::CliError;
