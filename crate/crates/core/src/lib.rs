//! Multi-armed bandit policies and a deterministic simulation harness.
//!
//! The crate provides UCB1, UCB1-Tuned, G-UCB1, GWA-UCB1 and Beta-Bernoulli
//! Thompson sampling over shared per-arm statistics, Bernoulli environments
//! (including the ±1 survival game with a budget), and a seeded, parallel
//! experiment runner that aggregates regret, survival and budget curves.
//!
//! GWA-UCB1 replaces the sum `mean + bonus` of UCB1 by the two-parameter
//! generalized weighted average
//!
//! ```text
//! mu(x, y | alpha, m) = ((1 - alpha) * x^m + alpha * y^m)^(1/m)
//! ```
//!
//! with `x` the empirical mean and `y = sqrt(2 ln n / T_i)` the exploration
//! bonus. See [`means::gwa`].

pub mod envs;
pub mod error;
pub mod means;
pub mod policies;
pub mod sim;

pub use envs::{BanditEnv, PullOutcome, RewardScheme, SurvivalState};
pub use error::{Error, Result};
pub use means::{gwa, GwaParams};
pub use policies::{ArmStats, PolicySpec, PolicyState};
pub use sim::{
    AggregateCurve, EnvKind, ExperimentConfig, Metric, SweepConfig, SweepGrid, SweepResult,
    TrialRecord,
};
