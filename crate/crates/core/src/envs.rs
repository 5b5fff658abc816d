//! Bernoulli bandit environments, arm-probability samplers and the survival
//! budget.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};

/// How a Bernoulli success is paid out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RewardScheme {
    /// 1 on success, 0 on failure.
    ZeroOne,
    /// +1 on success, -1 on failure (survival game).
    PlusMinusOne,
}

/// Result of one pull.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PullOutcome {
    /// Reward as paid by the environment (drives the survival budget).
    pub raw: f64,
    /// Reward mapped into {0, 1}, as seen by the policy.
    pub policy: f64,
}

/// Stationary Bernoulli bandit.
#[derive(Debug, Clone, PartialEq)]
pub struct BanditEnv {
    probs: Vec<f64>,
    best_prob: f64,
    scheme: RewardScheme,
}

impl BanditEnv {
    pub fn new(probs: Vec<f64>, scheme: RewardScheme) -> Result<Self> {
        if probs.len() < 2 {
            return Err(Error::TooFewArms(probs.len()));
        }
        if let Some(&bad) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::ProbabilityOutOfRange(bad));
        }
        let best_prob = probs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(Self {
            probs,
            best_prob,
            scheme,
        })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn best_prob(&self) -> f64 {
        self.best_prob
    }

    pub fn scheme(&self) -> RewardScheme {
        self.scheme
    }

    pub fn k(&self) -> usize {
        self.probs.len()
    }

    /// Pulls `arm`, succeeding with probability `probs[arm]`.
    ///
    /// # Panics
    /// If `arm >= k`.
    pub fn pull<R: Rng + ?Sized>(&self, arm: usize, rng: &mut R) -> PullOutcome {
        let success = rng.random::<f64>() < self.probs[arm];
        match (self.scheme, success) {
            (RewardScheme::ZeroOne, true) => PullOutcome {
                raw: 1.0,
                policy: 1.0,
            },
            (RewardScheme::ZeroOne, false) => PullOutcome {
                raw: 0.0,
                policy: 0.0,
            },
            (RewardScheme::PlusMinusOne, true) => PullOutcome {
                raw: 1.0,
                policy: 1.0,
            },
            (RewardScheme::PlusMinusOne, false) => PullOutcome {
                raw: -1.0,
                policy: 0.0,
            },
        }
    }
}

fn check_k(k: usize) -> Result<()> {
    if k < 2 {
        Err(Error::TooFewArms(k))
    } else {
        Ok(())
    }
}

/// `k` i.i.d. uniform[0, 1] arm probabilities.
pub fn sample_uniform_arms<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Result<Vec<f64>> {
    check_k(k)?;
    Ok((0..k).map(|_| rng.random::<f64>()).collect())
}

/// `k` draws from Normal(0.5, 0.1), each redrawn until it lands in [0, 1].
pub fn sample_normal_arms<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Result<Vec<f64>> {
    check_k(k)?;
    let normal = Normal::new(0.5, 0.1).expect("valid normal parameters");
    Ok((0..k)
        .map(|_| loop {
            let p: f64 = normal.sample(rng);
            if (0.0..=1.0).contains(&p) {
                break p;
            }
        })
        .collect())
}

pub const SURVIVAL_BEST_PROB: f64 = 0.55;
pub const SURVIVAL_OTHER_PROB: f64 = 0.45;

/// One arm at 0.55 (index 0) and `k - 1` arms at 0.45. The simulator moves
/// the best arm to a random position per trial.
pub fn fixed_survival_arms(k: usize) -> Result<Vec<f64>> {
    check_k(k)?;
    let mut probs = vec![SURVIVAL_OTHER_PROB; k];
    probs[0] = SURVIVAL_BEST_PROB;
    Ok(probs)
}

/// Budget of the survival game. Reaching a budget of 0 is ruin, which is
/// absorbing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SurvivalState {
    budget: i64,
    initial_budget: i64,
    ruined: bool,
}

impl SurvivalState {
    pub fn new(initial_budget: i64) -> Result<Self> {
        if initial_budget <= 0 {
            return Err(Error::Config(format!(
                "initial budget must be positive, got {initial_budget}"
            )));
        }
        Ok(Self {
            budget: initial_budget,
            initial_budget,
            ruined: false,
        })
    }

    pub fn budget(&self) -> i64 {
        self.budget
    }

    pub fn initial_budget(&self) -> i64 {
        self.initial_budget
    }

    pub fn is_ruined(&self) -> bool {
        self.ruined
    }

    /// Adds a ±1 reward to the budget.
    pub fn step(&mut self, raw_reward: i64) -> Result<()> {
        if self.ruined {
            return Err(Error::AlreadyRuined);
        }
        self.budget += raw_reward;
        if self.budget <= 0 {
            self.budget = 0;
            self.ruined = true;
        }
        Ok(())
    }
}
