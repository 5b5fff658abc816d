//! Deterministic experiment runner.
//!
//! # Random streams
//!
//! Every trial owns a 64-bit seed
//!
//! ```text
//! seed = mix64(mix64(master_seed ^ fnv1a64(experiment_id)) ^ trial_index)
//! ```
//!
//! where `mix64` is the SplitMix64 output function and `fnv1a64` the 64-bit
//! FNV-1a hash of the UTF-8 id. The seed keys a ChaCha8 generator from which
//! independent streams are taken with `set_stream`: stream 0 samples the
//! environment, stream 1 feeds the policy (tie-breaks, posterior draws) and
//! stream `2 + i` draws the rewards of arm `i`. The policy is deliberately not
//! part of the seed: all policies, and all cells of a sweep, replay the same
//! environments, the same per-arm reward sequences and the same tie-break
//! stream for a given trial index.
//!
//! Trials are independent work items. Results are collected in trial order
//! and reduced sequentially, so aggregates do not depend on the number of
//! worker threads.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::envs::{
    fixed_survival_arms, sample_normal_arms, sample_uniform_arms, BanditEnv, RewardScheme,
    SurvivalState,
};
use crate::error::{Error, Result};
use crate::means::GwaParams;
use crate::policies::{PolicySpec, PolicyState};

/// How arm probabilities are drawn for each trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EnvKind {
    /// i.i.d. uniform on [0, 1].
    Uniform,
    /// i.i.d. Normal(0.5, 0.1) restricted to [0, 1].
    Normal,
    /// One arm at 0.55 in a random position, all others at 0.45.
    SurvivalFixed,
}

/// Quantity tracked by an [`AggregateCurve`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Metric {
    Regret,
    SurvivalRate,
    MeanBudget,
}

impl Metric {
    pub fn as_str(&self) -> &'static str {
        match self {
            Metric::Regret => "regret",
            Metric::SurvivalRate => "survival_rate",
            Metric::MeanBudget => "mean_budget",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "regret" => Ok(Metric::Regret),
            "survival_rate" => Ok(Metric::SurvivalRate),
            "mean_budget" => Ok(Metric::MeanBudget),
            other => Err(Error::Config(format!("unknown metric {other:?}"))),
        }
    }
}

/// Declarative description of one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment_id: String,
    pub k: usize,
    pub horizon: u64,
    pub trials: usize,
    pub env_kind: EnvKind,
    pub reward_scheme: RewardScheme,
    /// Starting budget; required for, and only allowed with, the ±1 scheme.
    pub initial_budget: Option<i64>,
    pub policies: Vec<PolicySpec>,
    pub master_seed: u64,
    pub checkpoints: Vec<u64>,
}

impl ExperimentConfig {
    pub fn is_survival(&self) -> bool {
        self.reward_scheme == RewardScheme::PlusMinusOne
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.experiment_id.is_empty() {
            return fail("experiment_id must not be empty".into());
        }
        if self.k < 2 {
            return Err(Error::TooFewArms(self.k));
        }
        if self.horizon < self.k as u64 {
            return fail(format!(
                "horizon {} is shorter than the {} initialization pulls",
                self.horizon, self.k
            ));
        }
        if self.trials == 0 {
            return fail("trials must be at least 1".into());
        }
        if self.policies.is_empty() {
            return fail("at least one policy is required".into());
        }
        for (i, p) in self.policies.iter().enumerate() {
            if self.policies[..i].iter().any(|q| q.id() == p.id()) {
                return fail(format!("policy {} listed twice", p.id()));
            }
            if let PolicySpec::GUcb1 { c } = p {
                PolicySpec::g_ucb1(*c)?;
            }
        }
        match (self.reward_scheme, self.initial_budget) {
            (RewardScheme::PlusMinusOne, None) => {
                return fail("the plus_minus_one reward scheme needs an initial_budget".into())
            }
            (RewardScheme::PlusMinusOne, Some(b)) if b <= 0 => {
                return fail(format!("initial_budget must be positive, got {b}"))
            }
            (RewardScheme::ZeroOne, Some(_)) => {
                return fail("initial_budget only applies to the plus_minus_one scheme".into())
            }
            _ => {}
        }
        let cps = &self.checkpoints;
        if cps.is_empty() {
            return fail("checkpoints must not be empty".into());
        }
        if cps[0] < 1 || cps.windows(2).any(|w| w[0] >= w[1]) {
            return fail("checkpoints must be strictly ascending and start at 1 or later".into());
        }
        if *cps.last().unwrap() != self.horizon {
            return fail(format!(
                "last checkpoint {} must equal the horizon {}",
                cps.last().unwrap(),
                self.horizon
            ));
        }
        Ok(())
    }
}

/// `{1, 2, 5, 10, 20, 50, ...}` up to `horizon`, plus `horizon` itself.
pub fn default_checkpoints(horizon: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut decade = 1u64;
    'outer: loop {
        for mult in [1, 2, 5] {
            let step = decade.saturating_mul(mult);
            if step >= horizon {
                break 'outer;
            }
            out.push(step);
        }
        decade = decade.saturating_mul(10);
    }
    if horizon > 0 {
        out.push(horizon);
    }
    out
}

/// SplitMix64 output function.
pub fn mix64(z: u64) -> u64 {
    let mut z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// 64-bit FNV-1a.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Seed of trial `trial_index`, shared by every policy in the experiment.
pub fn trial_seed(master_seed: u64, experiment_id: &str, trial_index: usize) -> u64 {
    mix64(mix64(master_seed ^ fnv1a64(experiment_id.as_bytes())) ^ trial_index as u64)
}

const ENV_STREAM: u64 = 0;
const POLICY_STREAM: u64 = 1;
const FIRST_ARM_STREAM: u64 = 2;

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Environment of trial `trial_index`; identical for every policy.
pub fn trial_env(config: &ExperimentConfig, trial_index: usize) -> Result<BanditEnv> {
    let seed = trial_seed(config.master_seed, &config.experiment_id, trial_index);
    let mut rng = stream(seed, ENV_STREAM);
    let probs = match config.env_kind {
        EnvKind::Uniform => sample_uniform_arms(config.k, &mut rng)?,
        EnvKind::Normal => sample_normal_arms(config.k, &mut rng)?,
        EnvKind::SurvivalFixed => {
            let mut probs = fixed_survival_arms(config.k)?;
            let pos = rng.random_range(0..config.k);
            probs.swap(0, pos);
            probs
        }
    };
    BanditEnv::new(probs, config.reward_scheme)
}

/// `sum_t (p* - p_{a_t})`.
pub fn pseudo_regret(env: &BanditEnv, actions: &[usize]) -> Result<f64> {
    actions.iter().try_fold(0.0, |acc, &a| {
        let p = env
            .probs()
            .get(a)
            .ok_or(Error::ArmOutOfRange { arm: a, k: env.k() })?;
        Ok(acc + (env.best_prob() - p))
    })
}

/// Metrics of one trial at each checkpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub policy: String,
    pub trial_index: usize,
    /// Cumulative pseudo-regret; frozen after ruin.
    pub regret: Vec<f64>,
    /// Survival runs only.
    pub survived: Option<Vec<bool>>,
    /// Survival runs only; 0 once ruined.
    pub budget: Option<Vec<i64>>,
}

/// Runs one trial of `policy`.
pub fn run_trial(
    config: &ExperimentConfig,
    policy: &PolicySpec,
    trial_index: usize,
) -> Result<TrialRecord> {
    config.validate()?;
    simulate(config, policy, trial_index, None)
}

/// Like [`run_trial`], also returning the sequence of chosen arms.
pub fn run_trial_traced(
    config: &ExperimentConfig,
    policy: &PolicySpec,
    trial_index: usize,
) -> Result<(TrialRecord, Vec<usize>)> {
    config.validate()?;
    let mut actions = Vec::with_capacity(config.horizon as usize);
    let record = simulate(config, policy, trial_index, Some(&mut actions))?;
    Ok((record, actions))
}

fn simulate(
    config: &ExperimentConfig,
    policy: &PolicySpec,
    trial_index: usize,
    mut trace: Option<&mut Vec<usize>>,
) -> Result<TrialRecord> {
    let env = trial_env(config, trial_index)?;
    let seed = trial_seed(config.master_seed, &config.experiment_id, trial_index);
    let mut policy_rng = stream(seed, POLICY_STREAM);
    let mut arm_rngs: Vec<ChaCha8Rng> = (0..config.k as u64)
        .map(|i| stream(seed, FIRST_ARM_STREAM + i))
        .collect();

    let mut state = PolicyState::new(*policy, config.k)?;
    let mut survival = match config.initial_budget {
        Some(b) if config.is_survival() => Some(SurvivalState::new(b)?),
        _ => None,
    };

    let n_cp = config.checkpoints.len();
    let mut regret_at = Vec::with_capacity(n_cp);
    let mut survived_at = survival.as_ref().map(|_| Vec::with_capacity(n_cp));
    let mut budget_at = survival.as_ref().map(|_| Vec::with_capacity(n_cp));

    let best = env.best_prob();
    let mut regret = 0.0;
    let mut next_cp = 0;
    for step in 1..=config.horizon {
        if survival.is_some_and(|s| s.is_ruined()) {
            break;
        }
        let arm = state.select_arm(&mut policy_rng);
        let outcome = env.pull(arm, &mut arm_rngs[arm]);
        state.update(arm, outcome.policy)?;
        regret += best - env.probs()[arm];
        if let Some(s) = survival.as_mut() {
            s.step(outcome.raw as i64)?;
        }
        if let Some(t) = trace.as_deref_mut() {
            t.push(arm);
        }
        if config.checkpoints[next_cp] == step {
            regret_at.push(regret);
            if let (Some(s), Some(sv), Some(bg)) =
                (survival, survived_at.as_mut(), budget_at.as_mut())
            {
                sv.push(!s.is_ruined());
                bg.push(s.budget());
            }
            next_cp += 1;
        }
    }
    // Checkpoints after ruin.
    while regret_at.len() < n_cp {
        regret_at.push(regret);
        if let (Some(sv), Some(bg)) = (survived_at.as_mut(), budget_at.as_mut()) {
            sv.push(false);
            bg.push(0);
        }
    }

    Ok(TrialRecord {
        policy: policy.id(),
        trial_index,
        regret: regret_at,
        survived: survived_at,
        budget: budget_at,
    })
}

/// Mean, standard error and trial count at one checkpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub step: u64,
    pub mean: f64,
    pub stderr: f64,
    pub trials: usize,
}

/// Per-checkpoint summary of one metric for one policy.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateCurve {
    pub policy: String,
    pub metric: Metric,
    pub points: Vec<CurvePoint>,
}

impl AggregateCurve {
    pub fn last(&self) -> &CurvePoint {
        self.points
            .last()
            .expect("curves have at least one checkpoint")
    }
}

/// Mean and standard error (`sample sd / sqrt(n)`), summed in input order.
pub fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (n - 1) as f64).sqrt() / (n as f64).sqrt())
}

fn with_pool<T: Send>(threads: usize, job: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("cannot build thread pool: {e}")))?;
    Ok(pool.install(job))
}

fn run_policy_trials(
    config: &ExperimentConfig,
    policy: &PolicySpec,
    threads: usize,
) -> Result<Vec<TrialRecord>> {
    if threads == 1 {
        (0..config.trials)
            .map(|t| simulate(config, policy, t, None))
            .collect()
    } else {
        (0..config.trials)
            .into_par_iter()
            .map(|t| simulate(config, policy, t, None))
            .collect()
    }
}

/// Runs every (policy, trial) pair. `threads == 0` uses all cores;
/// `threads == 1` runs on the calling thread.
pub fn run_trials(config: &ExperimentConfig, threads: usize) -> Result<Vec<Vec<TrialRecord>>> {
    config.validate()?;
    let all = || {
        config
            .policies
            .iter()
            .map(|p| run_policy_trials(config, p, threads))
            .collect()
    };
    if threads == 1 {
        all()
    } else {
        with_pool(threads, all)?
    }
}

/// Reduces per-trial records (in trial order) to curves: one regret curve per
/// policy, or survival-rate and mean-budget curves for survival runs.
pub fn aggregate(config: &ExperimentConfig, records: &[Vec<TrialRecord>]) -> Vec<AggregateCurve> {
    let mut curves = Vec::new();
    for per_policy in records {
        let Some(first) = per_policy.first() else {
            continue;
        };
        let policy = first.policy.clone();
        let n = per_policy.len();
        let curve = |metric: Metric, value: &dyn Fn(&TrialRecord, usize) -> f64| {
            let points = config
                .checkpoints
                .iter()
                .enumerate()
                .map(|(ci, &step)| {
                    let vals: Vec<f64> = per_policy.iter().map(|r| value(r, ci)).collect();
                    let (mean, stderr) = mean_stderr(&vals);
                    CurvePoint {
                        step,
                        mean,
                        stderr,
                        trials: n,
                    }
                })
                .collect();
            AggregateCurve {
                policy: policy.clone(),
                metric,
                points,
            }
        };
        if config.is_survival() {
            curves.push(curve(Metric::SurvivalRate, &|r, ci| {
                let alive = r.survived.as_ref().map_or(true, |s| s[ci]);
                if alive {
                    1.0
                } else {
                    0.0
                }
            }));
            curves.push(curve(Metric::MeanBudget, &|r, ci| {
                r.budget.as_ref().map_or(0.0, |b| b[ci] as f64)
            }));
        } else {
            curves.push(curve(Metric::Regret, &|r, ci| r.regret[ci]));
        }
    }
    curves
}

/// Runs all trials and aggregates them.
pub fn run_experiment(config: &ExperimentConfig, threads: usize) -> Result<Vec<AggregateCurve>> {
    let records = run_trials(config, threads)?;
    Ok(aggregate(config, &records))
}

/// Inclusive arithmetic grid `start, start + step, ...` not exceeding `end`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValueRange {
    pub start: f64,
    pub end: f64,
    pub step: f64,
}

impl ValueRange {
    pub fn new(start: f64, end: f64, step: f64) -> Result<Self> {
        let r = Self { start, end, step };
        r.validate()?;
        Ok(r)
    }

    fn validate(&self) -> Result<()> {
        if !(self.start.is_finite() && self.end.is_finite() && self.step.is_finite()) {
            return Err(Error::Config("grid bounds must be finite".into()));
        }
        if self.step <= 0.0 {
            return Err(Error::Config(format!(
                "grid step must be positive, got {}",
                self.step
            )));
        }
        if self.end < self.start {
            return Err(Error::Config(format!(
                "empty grid range [{}, {}]",
                self.start, self.end
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        ((self.end - self.start) / self.step + 1e-9).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Grid values, rounded to 10 decimals to strip accumulated float noise.
    pub fn values(&self) -> Vec<f64> {
        (0..self.len())
            .map(|i| ((self.start + i as f64 * self.step) * 1e10).round() / 1e10)
            .collect()
    }
}

/// Parameter grid of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SweepGrid {
    /// G-UCB1 over exploration weights `c`.
    Exploration { c: ValueRange },
    /// GWA-UCB1 over `alpha x m`.
    Gwa { alpha: ValueRange, m: ValueRange },
}

impl SweepGrid {
    pub fn cell_count(&self) -> usize {
        match self {
            SweepGrid::Exploration { c } => c.len(),
            SweepGrid::Gwa { alpha, m } => alpha.len().saturating_mul(m.len()),
        }
    }

    /// Grid points sorted by `c`, or by `(alpha, m)`.
    pub fn points(&self) -> Result<Vec<GridPoint>> {
        match self {
            SweepGrid::Exploration { c } => c
                .values()
                .into_iter()
                .map(|c| PolicySpec::g_ucb1(c).map(|_| GridPoint::Exploration { c }))
                .collect(),
            SweepGrid::Gwa { alpha, m } => {
                let ms = m.values();
                let mut out = Vec::with_capacity(self.cell_count());
                for a in alpha.values() {
                    for &mm in &ms {
                        GwaParams::new(a, mm)?;
                        out.push(GridPoint::Gwa { alpha: a, m: mm });
                    }
                }
                Ok(out)
            }
        }
    }
}

/// One sweep parameter setting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridPoint {
    Exploration { c: f64 },
    Gwa { alpha: f64, m: f64 },
}

impl GridPoint {
    pub fn policy(&self) -> Result<PolicySpec> {
        match *self {
            GridPoint::Exploration { c } => PolicySpec::g_ucb1(c),
            GridPoint::Gwa { alpha, m } => PolicySpec::gwa_ucb1(alpha, m),
        }
    }
}

/// A sweep: the base experiment is re-run once per grid point with that
/// point's policy. The base policies and checkpoints are ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub base: ExperimentConfig,
    pub grid: SweepGrid,
    /// Refuse grids with more cells than this.
    pub max_cells: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepCell {
    pub point: GridPoint,
    pub mean_final_regret: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub cells: Vec<SweepCell>,
    /// Index into `cells` of the smallest mean final regret (first on ties).
    pub argmin: usize,
}

impl SweepResult {
    pub fn best(&self) -> &SweepCell {
        &self.cells[self.argmin]
    }
}

/// Mean final pseudo-regret at every grid point. All cells share trial seeds.
pub fn run_sweep(sweep: &SweepConfig, threads: usize) -> Result<SweepResult> {
    match &sweep.grid {
        SweepGrid::Exploration { c } => c.validate()?,
        SweepGrid::Gwa { alpha, m } => {
            alpha.validate()?;
            m.validate()?;
        }
    }
    let cells = sweep.grid.cell_count();
    if cells > sweep.max_cells {
        return Err(Error::GridTooLarge {
            cells,
            limit: sweep.max_cells,
        });
    }
    if sweep.base.is_survival() {
        return Err(Error::Config(
            "sweeps measure regret; use the zero_one scheme".into(),
        ));
    }
    let points = sweep.grid.points()?;
    let mut config = sweep.base.clone();
    config.checkpoints = vec![config.horizon];
    config.policies = vec![points[0].policy()?];
    config.validate()?;

    let run_all = || -> Result<Vec<SweepCell>> {
        points
            .iter()
            .map(|point| {
                let policy = point.policy()?;
                let records = run_policy_trials(&config, &policy, threads)?;
                let finals: Vec<f64> = records.iter().map(|r| r.regret[0]).collect();
                let (mean, stderr) = mean_stderr(&finals);
                Ok(SweepCell {
                    point: *point,
                    mean_final_regret: mean,
                    stderr,
                })
            })
            .collect()
    };
    let cells = if threads == 1 {
        run_all()?
    } else {
        with_pool(threads, run_all)??
    };
    let argmin = cells.iter().enumerate().fold(0, |best, (i, c)| {
        if c.mean_final_regret < cells[best].mean_final_regret {
            i
        } else {
            best
        }
    });
    Ok(SweepResult { cells, argmin })
}
