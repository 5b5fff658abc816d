//! Arm-selection policies over shared per-arm sufficient statistics.
//!
//! Every score policy first plays each arm once in ascending index order, then
//! picks the arm with the largest score. Exact ties are broken uniformly at
//! random with the caller's random stream. All logarithms are natural.

use std::fmt;

use rand::Rng;
use rand_distr::{Beta, Distribution};

use crate::error::{Error, Result};
use crate::means::{gwa, GwaParams};

/// Pull count, reward sum and reward-square sum of one arm.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ArmStats {
    pub pulls: u64,
    pub reward_sum: f64,
    pub reward_sq_sum: f64,
}

impl ArmStats {
    /// Statistics of an arm that observed `rewards`.
    pub fn from_rewards(rewards: &[f64]) -> Self {
        let mut stats = Self::default();
        for &r in rewards {
            stats.record(r);
        }
        stats
    }

    /// Empirical mean, `None` before the first pull.
    pub fn mean(&self) -> Option<f64> {
        (self.pulls > 0).then(|| self.reward_sum / self.pulls as f64)
    }

    fn record(&mut self, reward: f64) {
        self.pulls += 1;
        self.reward_sum += reward;
        self.reward_sq_sum += reward * reward;
    }

    fn checked_mean(&self) -> Result<f64> {
        self.mean().ok_or(Error::UnpulledArm)
    }
}

fn ln_total(n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::NoPulls);
    }
    Ok((n as f64).ln())
}

/// `sqrt(2 ln n / pulls)`.
fn exploration_bonus(ln_n: f64, pulls: u64) -> f64 {
    (2.0 * ln_n / pulls as f64).sqrt()
}

/// UCB1: `mean + sqrt(2 ln n / T_i)`.
pub fn ucb1_score(stats: &ArmStats, n: u64) -> Result<f64> {
    let mean = stats.checked_mean()?;
    Ok(mean + exploration_bonus(ln_total(n)?, stats.pulls))
}

/// UCB1-Tuned: `mean + sqrt(ln n / s * min(1/4, V))` with the variance
/// estimate `V = sum(x^2)/s - mean^2 + sqrt(2 ln n / s)`.
pub fn ucb1_tuned_score(stats: &ArmStats, n: u64) -> Result<f64> {
    let mean = stats.checked_mean()?;
    Ok(tuned_from_parts(stats, mean, ln_total(n)?))
}

fn tuned_from_parts(stats: &ArmStats, mean: f64, ln_n: f64) -> f64 {
    let s = stats.pulls as f64;
    let variance = (stats.reward_sq_sum / s - mean * mean).max(0.0);
    let v = variance + (2.0 * ln_n / s).sqrt();
    mean + (ln_n / s * v.min(0.25)).sqrt()
}

/// G-UCB1: `mean + c * sqrt(2 ln n / T_i)`.
pub fn g_ucb1_score(stats: &ArmStats, n: u64, c: f64) -> Result<f64> {
    check_exploration(c)?;
    let mean = stats.checked_mean()?;
    Ok(mean + c * exploration_bonus(ln_total(n)?, stats.pulls))
}

/// GWA-UCB1: generalized weighted average of the empirical mean and the
/// UCB1 exploration bonus.
pub fn gwa_ucb1_score(stats: &ArmStats, n: u64, params: GwaParams) -> Result<f64> {
    let mean = stats.checked_mean()?;
    gwa(mean, exploration_bonus(ln_total(n)?, stats.pulls), params)
}

/// One draw from the Beta(successes + 1, failures + 1) posterior of an arm
/// whose rewards are in {0, 1}.
pub fn thompson_sample<R: Rng + ?Sized>(stats: &ArmStats, rng: &mut R) -> f64 {
    let successes = stats.reward_sum;
    let failures = stats.pulls as f64 - successes;
    // Both shape parameters are >= 1 so construction cannot fail.
    Beta::new(successes + 1.0, failures + 1.0)
        .expect("beta shapes are at least one")
        .sample(rng)
}

fn check_exploration(c: f64) -> Result<()> {
    if c.is_finite() && c >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidExploration(c))
    }
}

/// Policy kind together with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PolicySpec {
    Ucb1,
    Ucb1Tuned,
    GUcb1 {
        c: f64,
    },
    GwaUcb1(GwaParams),
    Thompson,
    /// Uniformly random arm after initialization; a sanity baseline.
    UniformRandom,
}

impl PolicySpec {
    pub fn g_ucb1(c: f64) -> Result<Self> {
        check_exploration(c)?;
        Ok(Self::GUcb1 { c })
    }

    pub fn gwa_ucb1(alpha: f64, m: f64) -> Result<Self> {
        Ok(Self::GwaUcb1(GwaParams::new(alpha, m)?))
    }

    /// Stable identifier used in output files, e.g. `gwa_ucb1_a0.21_m1.3`.
    pub fn id(&self) -> String {
        match self {
            Self::Ucb1 => "ucb1".into(),
            Self::Ucb1Tuned => "ucb1_tuned".into(),
            Self::GUcb1 { c } => format!("g_ucb1_c{c}"),
            Self::GwaUcb1(p) => format!("gwa_ucb1_a{}_m{}", p.alpha(), p.m()),
            Self::Thompson => "thompson".into(),
            Self::UniformRandom => "uniform_random".into(),
        }
    }
}

impl fmt::Display for PolicySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Ucb1 => write!(f, "UCB1"),
            Self::Ucb1Tuned => write!(f, "UCB1-Tuned"),
            Self::GUcb1 { c } => write!(f, "G-UCB1(c={c})"),
            Self::GwaUcb1(p) => write!(f, "GWA-UCB1(alpha={}, m={})", p.alpha(), p.m()),
            Self::Thompson => write!(f, "Thompson"),
            Self::UniformRandom => write!(f, "UniformRandom"),
        }
    }
}

/// Full decision state of one policy over `k` arms.
#[derive(Debug, Clone)]
pub struct PolicyState {
    spec: PolicySpec,
    total_pulls: u64,
    arms: Vec<ArmStats>,
    scores: Vec<f64>,
    ties: Vec<usize>,
}

impl PolicyState {
    pub fn new(spec: PolicySpec, k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::TooFewArms(k));
        }
        if let PolicySpec::GUcb1 { c } = spec {
            check_exploration(c)?;
        }
        Ok(Self {
            spec,
            total_pulls: 0,
            arms: vec![ArmStats::default(); k],
            scores: Vec::with_capacity(k),
            ties: Vec::with_capacity(k),
        })
    }

    pub fn spec(&self) -> PolicySpec {
        self.spec
    }

    pub fn total_pulls(&self) -> u64 {
        self.total_pulls
    }

    pub fn arms(&self) -> &[ArmStats] {
        &self.arms
    }

    pub fn k(&self) -> usize {
        self.arms.len()
    }

    /// Chooses the next arm to play.
    pub fn select_arm<R: Rng + ?Sized>(&mut self, rng: &mut R) -> usize {
        if let Some(unplayed) = self.arms.iter().position(|a| a.pulls == 0) {
            return unplayed;
        }
        // Every arm has been pulled, so n >= k >= 2 and all means exist.
        let ln_n = (self.total_pulls as f64).ln();
        self.scores.clear();
        match self.spec {
            PolicySpec::Ucb1 => self.scores.extend(
                self.arms
                    .iter()
                    .map(|a| mean_of(a) + exploration_bonus(ln_n, a.pulls)),
            ),
            PolicySpec::Ucb1Tuned => self.scores.extend(
                self.arms
                    .iter()
                    .map(|a| tuned_from_parts(a, mean_of(a), ln_n)),
            ),
            PolicySpec::GUcb1 { c } => self.scores.extend(
                self.arms
                    .iter()
                    .map(|a| mean_of(a) + c * exploration_bonus(ln_n, a.pulls)),
            ),
            PolicySpec::GwaUcb1(params) => self.scores.extend(self.arms.iter().map(|a| {
                // Both arguments are finite and nonnegative, and the bonus is
                // bounded by sqrt(2 ln n), so the mean cannot overflow.
                gwa(mean_of(a), exploration_bonus(ln_n, a.pulls), params)
                    .expect("finite nonnegative arguments")
            })),
            PolicySpec::Thompson => {
                for a in &self.arms {
                    let draw = thompson_sample(a, rng);
                    self.scores.push(draw);
                }
            }
            PolicySpec::UniformRandom => return rng.random_range(0..self.arms.len()),
        }
        argmax_uniform_ties(&self.scores, &mut self.ties, rng)
    }

    /// Records `reward ∈ [0, 1]` for `arm`.
    pub fn update(&mut self, arm: usize, reward: f64) -> Result<()> {
        let k = self.arms.len();
        let stats = self
            .arms
            .get_mut(arm)
            .ok_or(Error::ArmOutOfRange { arm, k })?;
        if !(0.0..=1.0).contains(&reward) {
            return Err(Error::RewardOutOfRange(reward));
        }
        stats.record(reward);
        self.total_pulls += 1;
        Ok(())
    }
}

#[inline]
fn mean_of(a: &ArmStats) -> f64 {
    a.reward_sum / a.pulls as f64
}

/// Index of the largest score; exact ties are resolved by one uniform draw.
fn argmax_uniform_ties<R: Rng + ?Sized>(
    scores: &[f64],
    ties: &mut Vec<usize>,
    rng: &mut R,
) -> usize {
    let best = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    ties.clear();
    ties.extend(
        scores
            .iter()
            .enumerate()
            .filter(|&(_, &s)| s == best)
            .map(|(i, _)| i),
    );
    match ties.len() {
        1 => ties[0],
        n => ties[rng.random_range(0..n)],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn stats(mean: f64, pulls: u64) -> ArmStats {
        // Scores depend on the square sum only through UCB1-Tuned.
        ArmStats {
            pulls,
            reward_sum: mean * pulls as f64,
            reward_sq_sum: mean * pulls as f64,
        }
    }

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn ucb1_values() {
        close(ucb1_score(&stats(0.0, 1), 1).unwrap(), 0.0, 0.0);
        close(
            ucb1_score(&stats(0.5, 10), 100).unwrap(),
            1.459_705_182_437_616_2,
            1e-14,
        );
        close(
            ucb1_score(&stats(1.0, 1), 2).unwrap(),
            2.177_410_022_515_474_7,
            1e-14,
        );
    }

    #[test]
    fn ucb1_tuned_values() {
        close(ucb1_tuned_score(&stats(0.0, 1), 1).unwrap(), 0.0, 0.0);
        let mixed = ArmStats::from_rewards(&[1.0, 0.0, 1.0, 1.0]);
        close(
            ucb1_tuned_score(&mixed, 10).unwrap(),
            1.129_356_782_346_286_6,
            1e-14,
        );
        let ones = ArmStats::from_rewards(&[1.0; 4]);
        close(
            ucb1_tuned_score(&ones, 10).unwrap(),
            1.379_356_782_346_286_6,
            1e-14,
        );
    }

    #[test]
    fn g_ucb1_values() {
        let s = stats(0.5, 10);
        assert_eq!(g_ucb1_score(&s, 100, 0.0).unwrap(), 0.5);
        assert_eq!(
            g_ucb1_score(&s, 100, 1.0).unwrap(),
            ucb1_score(&s, 100).unwrap()
        );
        close(
            g_ucb1_score(&s, 100, 0.30).unwrap(),
            0.787_911_554_731_284_9,
            1e-14,
        );
        assert_eq!(
            g_ucb1_score(&s, 100, -0.1),
            Err(Error::InvalidExploration(-0.1))
        );
    }

    #[test]
    fn gwa_ucb1_values() {
        let s = stats(0.5, 10);
        let arith = GwaParams::new(0.5, 1.0).unwrap();
        close(
            gwa_ucb1_score(&s, 100, arith).unwrap(),
            0.729_852_591_218_808_1,
            1e-14,
        );
        let tuned = GwaParams::new(0.21, 1.30).unwrap();
        close(
            gwa_ucb1_score(&s, 100, tuned).unwrap(),
            0.604_617_696_679_576_1,
            1e-13,
        );
        let first = GwaParams::new(0.0, 2.7).unwrap();
        assert_eq!(gwa_ucb1_score(&stats(0.7, 10), 100, first).unwrap(), 0.7);
    }

    #[test]
    fn scores_reject_unpulled_arms() {
        let fresh = ArmStats::default();
        assert_eq!(ucb1_score(&fresh, 5), Err(Error::UnpulledArm));
        assert_eq!(ucb1_tuned_score(&fresh, 5), Err(Error::UnpulledArm));
        assert_eq!(g_ucb1_score(&fresh, 5, 0.3), Err(Error::UnpulledArm));
        let p = GwaParams::new(0.21, 1.3).unwrap();
        assert_eq!(gwa_ucb1_score(&fresh, 5, p), Err(Error::UnpulledArm));
        assert_eq!(ucb1_score(&stats(0.5, 1), 0), Err(Error::NoPulls));
    }

    #[test]
    fn initialization_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for spec in [
            PolicySpec::Ucb1,
            PolicySpec::Thompson,
            PolicySpec::UniformRandom,
        ] {
            let mut state = PolicyState::new(spec, 3).unwrap();
            for expected in 0..3 {
                let arm = state.select_arm(&mut rng);
                assert_eq!(arm, expected);
                state.update(arm, 0.0).unwrap();
            }
        }
    }

    #[test]
    fn update_maintains_statistics() {
        let mut state = PolicyState::new(PolicySpec::Ucb1, 2).unwrap();
        state.update(0, 1.0).unwrap();
        assert_eq!(state.arms()[0].pulls, 1);
        assert_eq!(state.arms()[0].mean(), Some(1.0));
        state.update(0, 0.0).unwrap();
        assert_eq!(state.arms()[0].mean(), Some(0.5));
        assert_eq!(state.arms()[0].reward_sq_sum, 1.0);
        assert_eq!(state.arms()[1], ArmStats::default());
        assert_eq!(state.total_pulls(), 2);
    }

    #[test]
    fn update_rejects_bad_input() {
        let mut state = PolicyState::new(PolicySpec::Ucb1, 2).unwrap();
        assert_eq!(
            state.update(2, 1.0),
            Err(Error::ArmOutOfRange { arm: 2, k: 2 })
        );
        assert_eq!(state.update(0, 1.5), Err(Error::RewardOutOfRange(1.5)));
        assert!(state.update(0, f64::NAN).is_err());
        assert_eq!(state.total_pulls(), 0);
    }

    #[test]
    fn constructor_rejects_bad_input() {
        assert_eq!(
            PolicyState::new(PolicySpec::Ucb1, 1).unwrap_err(),
            Error::TooFewArms(1)
        );
        assert!(PolicyState::new(PolicySpec::GUcb1 { c: -1.0 }, 2).is_err());
        assert!(PolicySpec::gwa_ucb1(1.5, 1.0).is_err());
        assert!(PolicySpec::g_ucb1(f64::NAN).is_err());
    }

    #[test]
    fn ties_are_split_uniformly() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut state = PolicyState::new(PolicySpec::Ucb1, 2).unwrap();
        state.update(0, 1.0).unwrap();
        state.update(1, 1.0).unwrap();
        let draws = 10_000;
        let zeros = (0..draws)
            .filter(|_| state.select_arm(&mut rng) == 0)
            .count();
        // Binomial(10^4, 1/2): sigma = 50.
        let dev = (zeros as f64 - 5_000.0).abs();
        assert!(dev <= 150.0, "arm 0 chosen {zeros} times");
    }

    #[test]
    fn thompson_fresh_arm_is_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let draws: Vec<f64> = (0..20_000)
            .map(|_| thompson_sample(&ArmStats::default(), &mut rng))
            .collect();
        assert!(draws.iter().all(|d| (0.0..=1.0).contains(d)));
        let below_quarter = draws.iter().filter(|&&d| d < 0.25).count() as f64 / 20_000.0;
        // sigma = sqrt(0.25 * 0.75 / 2e4) ~ 0.0031
        assert!((below_quarter - 0.25).abs() < 0.01, "{below_quarter}");
    }

    #[test]
    fn thompson_is_deterministic_under_seed() {
        let s = ArmStats::from_rewards(&[1.0, 0.0, 1.0]);
        let a: Vec<f64> = {
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            (0..50).map(|_| thompson_sample(&s, &mut rng)).collect()
        };
        let b: Vec<f64> = {
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            (0..50).map(|_| thompson_sample(&s, &mut rng)).collect()
        };
        assert_eq!(a, b);
    }

    #[test]
    fn policy_ids_are_stable() {
        assert_eq!(
            PolicySpec::gwa_ucb1(0.21, 1.3).unwrap().id(),
            "gwa_ucb1_a0.21_m1.3"
        );
        assert_eq!(PolicySpec::g_ucb1(0.3).unwrap().id(), "g_ucb1_c0.3");
        assert_eq!(PolicySpec::Ucb1Tuned.id(), "ucb1_tuned");
    }
}
