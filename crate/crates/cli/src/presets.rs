//! Built-in experiment setups.
//!
//! Every preset exists at two scales. Desk scale keeps the original arm
//! counts, arm distributions, budgets and tuned parameters but runs fewer
//! trials (and, for the sweeps and the normal-arm experiment, shorter
//! horizons). Full scale restores the full trial counts, horizons and grid
//! resolution.

use crate::config::{
    ConfigFile, EnvFile, ExperimentFile, GridFile, PolicyFile, RangeFile, SweepFile,
};
use crate::error::CliError;

pub const DEFAULT_SEED: u64 = 42;

/// Tuned exploration weight of G-UCB1 for two arms.
pub const TUNED_C: f64 = 0.30;
/// Tuned (alpha, m) of GWA-UCB1 for two arms.
pub const TUNED_GWA: (f64, f64) = (0.21, 1.30);
/// Tuned (alpha, m) of GWA-UCB1 for ten arms.
pub const TUNED_GWA_K10: (f64, f64) = (0.11, 1.47);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Desk,
    Full,
}

pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
}

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "exp1-k2",
        description: "uniform arms, k=2, 10,000 steps",
    },
    Preset {
        name: "exp1-k8",
        description: "uniform arms, k=8, 10,000 steps",
    },
    Preset {
        name: "exp1-k32",
        description: "uniform arms, k=32, 10,000 steps",
    },
    Preset {
        name: "exp2-k32",
        description: "Normal(0.5, 0.1) arms, k=32",
    },
    Preset {
        name: "exp2-k128",
        description: "Normal(0.5, 0.1) arms, k=128",
    },
    Preset {
        name: "exp2-k512",
        description: "Normal(0.5, 0.1) arms, k=512",
    },
    Preset {
        name: "exp3-k8",
        description: "survival, one 0.55 arm among 0.45 arms, k=8, b0=80",
    },
    Preset {
        name: "exp3-k32",
        description: "survival, k=32, b0=320",
    },
    Preset {
        name: "exp3-k128",
        description: "survival, k=128, b0=1280",
    },
    Preset {
        name: "fig8-k10",
        description: "uniform arms, k=10, 1,000 steps, both tuned GWA-UCB1 settings",
    },
    Preset {
        name: "prelim-gucb1-coarse",
        description: "G-UCB1 sweep over c, k=2 (step 0.05; 0.01 at full scale)",
    },
    Preset {
        name: "prelim-gwa-coarse",
        description: "GWA-UCB1 sweep over (alpha, m), k=2 (steps 0.04/0.2; 0.01 at full scale)",
    },
    Preset {
        name: "prelim-gucb1",
        description: "G-UCB1 sweep over c at step 0.01",
    },
    Preset {
        name: "prelim-gwa",
        description: "GWA-UCB1 sweep over (alpha, m) at step 0.01 (needs --full-scale)",
    },
];

/// The five compared policies with their tuned parameters.
pub fn standard_policies() -> Vec<PolicyFile> {
    vec![
        PolicyFile::Ucb1,
        PolicyFile::Ucb1Tuned,
        PolicyFile::GUcb1 { c: TUNED_C },
        PolicyFile::GwaUcb1 {
            alpha: TUNED_GWA.0,
            m: TUNED_GWA.1,
        },
        PolicyFile::Thompson,
    ]
}

fn experiment(
    name: &str,
    k: usize,
    horizon: u64,
    trials: usize,
    env: EnvFile,
    initial_budget: Option<i64>,
    policies: Vec<PolicyFile>,
) -> ConfigFile {
    ConfigFile::Experiment(ExperimentFile {
        experiment_id: name.into(),
        k,
        horizon,
        trials,
        env,
        reward_scheme: None,
        initial_budget,
        policies,
        master_seed: DEFAULT_SEED,
        checkpoints: None,
    })
}

fn sweep(name: &str, horizon: u64, trials: usize, grid: GridFile, max_cells: usize) -> ConfigFile {
    ConfigFile::Sweep(SweepFile {
        experiment_id: name.into(),
        k: 2,
        horizon,
        trials,
        env: EnvFile::Uniform,
        master_seed: DEFAULT_SEED,
        grid,
        max_cells: Some(max_cells),
    })
}

fn r(start: f64, end: f64, step: f64) -> RangeFile {
    RangeFile { start, end, step }
}

fn c_grid(step: f64) -> GridFile {
    GridFile {
        c: Some(r(0.05, 0.95, step)),
        alpha: None,
        m: None,
    }
}

fn gwa_grid(alpha_step: f64, m_step: f64) -> GridFile {
    GridFile {
        c: None,
        alpha: Some(r(0.05, 0.95, alpha_step)),
        m: Some(r(-2.0, 4.0, m_step)),
    }
}

/// Looks up a preset by name.
pub fn preset(name: &str, scale: Scale) -> Result<ConfigFile, CliError> {
    use EnvFile::*;
    let full_scale = scale == Scale::Full;
    fn choose<T>(full_scale: bool, desk: T, full: T) -> T {
        if full_scale {
            full
        } else {
            desk
        }
    }
    let std = standard_policies;
    let prelim_horizon = choose(full_scale, 5_000, 10_000);
    let prelim_trials = choose(full_scale, 500, 1_000);
    let prelim_cap = choose(full_scale, crate::config::DEFAULT_MAX_CELLS, 60_000);

    Ok(match name {
        "exp1-k2" => experiment(
            name,
            2,
            10_000,
            choose(full_scale, 2_000, 100_000),
            Uniform,
            None,
            std(),
        ),
        "exp1-k8" => experiment(
            name,
            8,
            10_000,
            choose(full_scale, 2_000, 100_000),
            Uniform,
            None,
            std(),
        ),
        "exp1-k32" => experiment(
            name,
            32,
            10_000,
            choose(full_scale, 2_000, 100_000),
            Uniform,
            None,
            std(),
        ),
        "exp2-k32" => experiment(
            name,
            32,
            choose(full_scale, 10_000, 50_000),
            choose(full_scale, 500, 10_000),
            Normal,
            None,
            std(),
        ),
        "exp2-k128" => experiment(
            name,
            128,
            choose(full_scale, 10_000, 50_000),
            choose(full_scale, 500, 10_000),
            Normal,
            None,
            std(),
        ),
        "exp2-k512" => experiment(
            name,
            512,
            choose(full_scale, 10_000, 50_000),
            choose(full_scale, 500, 10_000),
            Normal,
            None,
            std(),
        ),
        "exp3-k8" => experiment(
            name,
            8,
            50_000,
            choose(full_scale, 1_000, 10_000),
            SurvivalFixed,
            Some(80),
            std(),
        ),
        "exp3-k32" => experiment(
            name,
            32,
            50_000,
            choose(full_scale, 1_000, 10_000),
            SurvivalFixed,
            Some(320),
            std(),
        ),
        "exp3-k128" => experiment(
            name,
            128,
            50_000,
            choose(full_scale, 1_000, 10_000),
            SurvivalFixed,
            Some(1_280),
            std(),
        ),
        "fig8-k10" => {
            let mut policies = std();
            policies.push(PolicyFile::GwaUcb1 {
                alpha: TUNED_GWA_K10.0,
                m: TUNED_GWA_K10.1,
            });
            experiment(name, 10, 1_000, 2_000, Uniform, None, policies)
        }
        "prelim-gucb1-coarse" => sweep(
            name,
            prelim_horizon,
            prelim_trials,
            c_grid(choose(full_scale, 0.05, 0.01)),
            prelim_cap,
        ),
        "prelim-gwa-coarse" => sweep(
            name,
            prelim_horizon,
            prelim_trials,
            choose(full_scale, gwa_grid(0.04, 0.2), gwa_grid(0.01, 0.01)),
            prelim_cap,
        ),
        "prelim-gucb1" => sweep(
            name,
            prelim_horizon,
            prelim_trials,
            c_grid(0.01),
            prelim_cap,
        ),
        "prelim-gwa" => sweep(
            name,
            prelim_horizon,
            prelim_trials,
            gwa_grid(0.01, 0.01),
            prelim_cap,
        ),
        other => return Err(CliError::UnknownPreset(other.into())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Parsed;
    use gwa_bandit::{EnvKind, PolicySpec, RewardScheme};

    fn experiment_of(name: &str, scale: Scale) -> gwa_bandit::ExperimentConfig {
        match preset(name, scale).unwrap().validate().unwrap() {
            Parsed::Experiment(c) => c,
            Parsed::Sweep(_) => panic!("{name} is a sweep"),
        }
    }

    #[test]
    fn every_preset_validates() {
        for p in PRESETS {
            for scale in [Scale::Desk, Scale::Full] {
                let file = preset(p.name, scale).unwrap();
                assert_eq!(file.experiment_id(), p.name);
                file.validate()
                    .unwrap_or_else(|e| panic!("{}: {e}", p.name));
            }
        }
        assert!(matches!(
            preset("exp9", Scale::Desk),
            Err(CliError::UnknownPreset(_))
        ));
    }

    #[test]
    fn exp1_k2() {
        let c = experiment_of("exp1-k2", Scale::Desk);
        assert_eq!((c.k, c.horizon, c.env_kind), (2, 10_000, EnvKind::Uniform));
        assert_eq!(
            c.policies,
            [
                PolicySpec::Ucb1,
                PolicySpec::Ucb1Tuned,
                PolicySpec::g_ucb1(0.30).unwrap(),
                PolicySpec::gwa_ucb1(0.21, 1.30).unwrap(),
                PolicySpec::Thompson,
            ]
        );
        assert_eq!(experiment_of("exp1-k2", Scale::Full).trials, 100_000);
    }

    #[test]
    fn exp3_settings() {
        for (name, k, b0) in [
            ("exp3-k8", 8, 80),
            ("exp3-k32", 32, 320),
            ("exp3-k128", 128, 1_280),
        ] {
            let c = experiment_of(name, Scale::Desk);
            assert_eq!((c.k, c.horizon), (k, 50_000));
            assert_eq!(c.env_kind, EnvKind::SurvivalFixed);
            assert_eq!(c.reward_scheme, RewardScheme::PlusMinusOne);
            assert_eq!(c.initial_budget, Some(b0));
            assert_eq!(experiment_of(name, Scale::Full).trials, 10_000);
        }
    }

    #[test]
    fn exp2_and_fig8_settings() {
        let c = experiment_of("exp2-k512", Scale::Full);
        assert_eq!(
            (c.k, c.horizon, c.trials, c.env_kind),
            (512, 50_000, 10_000, EnvKind::Normal)
        );
        let c = experiment_of("fig8-k10", Scale::Desk);
        assert_eq!((c.k, c.horizon, c.trials), (10, 1_000, 2_000));
        assert!(c
            .policies
            .contains(&PolicySpec::gwa_ucb1(0.11, 1.47).unwrap()));
    }

    #[test]
    fn sweep_grids() {
        let Parsed::Sweep(s) = preset("prelim-gwa-coarse", Scale::Desk)
            .unwrap()
            .validate()
            .unwrap()
        else {
            panic!()
        };
        assert_eq!(s.grid.cell_count(), 23 * 31);
        assert_eq!((s.base.k, s.base.horizon, s.base.trials), (2, 5_000, 500));
        let Parsed::Sweep(s) = preset("prelim-gwa", Scale::Full)
            .unwrap()
            .validate()
            .unwrap()
        else {
            panic!()
        };
        assert_eq!(s.grid.cell_count(), 91 * 601);
        assert!(s.grid.cell_count() <= s.max_cells);
        assert_eq!((s.base.horizon, s.base.trials), (10_000, 1_000));
        let Parsed::Sweep(s) = preset("prelim-gwa", Scale::Desk)
            .unwrap()
            .validate()
            .unwrap()
        else {
            panic!()
        };
        assert!(s.grid.cell_count() > s.max_cells);
    }
}
