use thiserror::Error;

/// Errors raised by the policy, environment and simulation layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("alpha must lie in [0, 1], got {0}")]
    AlphaOutOfRange(f64),
    #[error("mean exponent m must be finite, got {0}")]
    NonFiniteExponent(f64),
    #[error("mean exponent m = {m} outside the configured range [{lo}, {hi}]")]
    ExponentOutOfRange { m: f64, lo: f64, hi: f64 },
    #[error("generalized mean arguments must be nonnegative, got {0}")]
    NegativeArgument(f64),
    #[error("generalized mean overflowed for x = {x}, y = {y}")]
    Overflow { x: f64, y: f64 },
    #[error("arm has not been pulled yet; scores need at least one observation")]
    UnpulledArm,
    #[error("total pull count must be at least 1")]
    NoPulls,
    #[error("exploration weight c must be finite and nonnegative, got {0}")]
    InvalidExploration(f64),
    #[error("arm index {arm} out of range for {k} arms")]
    ArmOutOfRange { arm: usize, k: usize },
    #[error("observed reward must lie in [0, 1], got {0}")]
    RewardOutOfRange(f64),
    #[error("arm probability must lie in [0, 1], got {0}")]
    ProbabilityOutOfRange(f64),
    #[error("at least 2 arms are required, got {0}")]
    TooFewArms(usize),
    #[error("survival state is already ruined")]
    AlreadyRuined,
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("sweep grid has {cells} cells, exceeding the configured limit of {limit}")]
    GridTooLarge { cells: usize, limit: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
