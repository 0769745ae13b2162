//! Experiment configuration.
//!
//! A config is a TOML file; every key is optional and command-line flags
//! override file values. Example:
//!
//! ```toml
//! policies = ["wgfc", "pareto-ucb1"]
//! horizon = 10000
//! runs = 10
//! seed = 1
//! diagnostics = true
//! parallelism = 0
//! out = "results"
//! trajectory = true
//!
//! [instance]
//! family = "synthetic"      # "synthetic" | "duplicated" | "explicit"
//! delta = 0.12
//! m = 1
//!
//! [sweep]
//! deltas = [0.12, 0.08, 0.04, 0.02, 0.01]
//! gap_m = 1
//! crowd = [4, 8, 12]
//! crowd_delta = 0.02
//!
//! [lower_bound]
//! arms = 20
//! objectives = 2
//! delta_sc = [0.25, 0.125, 0.0625]
//! ```
//!
//! Instance families:
//!
//! - `synthetic`: `delta`, `m`, `arms` (20), `p` (0.25), `g` (0.55),
//!   `eta` (0.20), `u` (0.05).
//! - `duplicated`: `arms`, `objectives`, `delta_sc`.
//! - `explicit`: `means` (array of per-arm arrays), `reward_model`
//!   (`"independent-bernoulli"` or `"duplicated-bernoulli"`), optional `label`.

use std::path::{Path, PathBuf};

use momab::environment::{duplicated_bernoulli, BanditInstance, SyntheticFamily};
use momab::{MeanMatrix, PolicyKind, RewardModel};
use serde::Deserialize;

use crate::error::CliError;

pub const OUT_DIR_ENV: &str = "MOMAB_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "out";
pub const DEFAULT_HORIZON: u64 = 10_000;
pub const DEFAULT_RUNS: usize = 10;
pub const DEFAULT_SEED: u64 = 1;

pub const GAP_SWEEP_DELTAS: [f64; 5] = [0.12, 0.08, 0.04, 0.02, 0.01];
pub const CROWD_SWEEP_SIZES: [usize; 3] = [4, 8, 12];
pub const CROWD_SWEEP_DELTA: f64 = 0.02;
pub const LOWER_BOUND_GRID: [f64; 3] = [0.25, 0.125, 0.0625];

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InstanceSpec {
    Synthetic {
        delta: f64,
        #[serde(default = "default_crowd")]
        m: usize,
        #[serde(default = "default_arms")]
        arms: usize,
        #[serde(default = "default_p")]
        p: f64,
        #[serde(default = "default_g")]
        g: f64,
        #[serde(default = "default_eta")]
        eta: f64,
        #[serde(default = "default_u")]
        u: f64,
    },
    Duplicated {
        #[serde(default = "default_arms")]
        arms: usize,
        #[serde(default = "default_objectives")]
        objectives: usize,
        delta_sc: f64,
    },
    Explicit {
        label: Option<String>,
        #[serde(default = "default_reward_model")]
        reward_model: String,
        means: Vec<Vec<f64>>,
    },
}

fn default_crowd() -> usize {
    1
}
fn default_arms() -> usize {
    20
}
fn default_objectives() -> usize {
    2
}
fn default_p() -> f64 {
    0.25
}
fn default_g() -> f64 {
    0.55
}
fn default_eta() -> f64 {
    0.20
}
fn default_u() -> f64 {
    0.05
}
fn default_reward_model() -> String {
    RewardModel::IndependentBernoulli.name().to_string()
}

impl Default for InstanceSpec {
    fn default() -> Self {
        InstanceSpec::synthetic(0.12, 1)
    }
}

impl InstanceSpec {
    pub fn synthetic(delta: f64, m: usize) -> Self {
        InstanceSpec::Synthetic {
            delta,
            m,
            arms: default_arms(),
            p: default_p(),
            g: default_g(),
            eta: default_eta(),
            u: default_u(),
        }
    }

    pub fn build(&self) -> Result<BanditInstance, CliError> {
        let built = match self {
            &InstanceSpec::Synthetic {
                delta,
                m,
                arms,
                p,
                g,
                eta,
                u,
            } => SyntheticFamily {
                p,
                g,
                eta,
                u,
                delta,
                crowd: m,
                arms,
            }
            .build(),
            &InstanceSpec::Duplicated {
                arms,
                objectives,
                delta_sc,
            } => duplicated_bernoulli(arms, objectives, delta_sc),
            InstanceSpec::Explicit {
                label,
                reward_model,
                means,
            } => reward_model.parse::<RewardModel>().and_then(|model| {
                let means = MeanMatrix::new(means.clone())?;
                let label = label.clone().unwrap_or_else(|| "explicit".to_string());
                BanditInstance::new(label, means, model)
            }),
        };
        built.map_err(|e| CliError::Config(format!("instance: {e}")))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub deltas: Option<Vec<f64>>,
    pub gap_m: Option<usize>,
    pub crowd: Option<Vec<usize>>,
    pub crowd_delta: Option<f64>,
    pub arms: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LowerBoundSection {
    pub arms: Option<usize>,
    pub objectives: Option<usize>,
    pub delta_sc: Option<Vec<f64>>,
}

/// Raw file contents; everything optional.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub label: Option<String>,
    pub policies: Option<Vec<String>>,
    pub horizon: Option<u64>,
    pub runs: Option<usize>,
    pub seed: Option<u64>,
    pub diagnostics: Option<bool>,
    pub parallelism: Option<usize>,
    pub out: Option<PathBuf>,
    pub trajectory: Option<bool>,
    pub instance: Option<InstanceSpec>,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub lower_bound: LowerBoundSection,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

/// Values given on the command line; they win over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub runs: Option<usize>,
    pub horizon: Option<u64>,
    pub out: Option<PathBuf>,
    pub diagnostics: bool,
    pub parallelism: Option<usize>,
    pub policies: Vec<String>,
    pub trajectory: bool,
    pub delta: Option<f64>,
    pub m: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub deltas: Vec<f64>,
    pub gap_m: usize,
    pub crowd: Vec<usize>,
    pub crowd_delta: f64,
    pub arms: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LowerBoundSpec {
    pub arms: usize,
    pub objectives: usize,
    pub delta_sc: Vec<f64>,
}

/// Fully resolved settings for one command.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub label: Option<String>,
    pub instance: InstanceSpec,
    pub policies: Vec<PolicyKind>,
    pub horizon: u64,
    pub runs: usize,
    pub seed: u64,
    pub diagnostics: bool,
    pub parallelism: usize,
    pub out_dir: PathBuf,
    /// Whether `--out` or `out` was given explicitly.
    pub out_explicit: bool,
    pub trajectory: bool,
    pub sweep: SweepSpec,
    pub lower_bound: LowerBoundSpec,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig::resolve(FileConfig::default(), Overrides::default())
            .expect("defaults are valid")
    }
}

impl ExperimentConfig {
    pub fn resolve(file: FileConfig, cli: Overrides) -> Result<Self, CliError> {
        let names = if cli.policies.is_empty() {
            file.policies.unwrap_or_else(|| {
                PolicyKind::ALL.iter().map(|p| p.name().to_string()).collect()
            })
        } else {
            cli.policies
        };
        if names.is_empty() {
            return Err(CliError::Config("at least one policy is required".into()));
        }
        let mut policies = Vec::with_capacity(names.len());
        for name in &names {
            let kind = name
                .parse::<PolicyKind>()
                .map_err(|_| CliError::Config(format!("unknown policy `{name}`")))?;
            if !policies.contains(&kind) {
                policies.push(kind);
            }
        }

        let mut instance = file.instance.unwrap_or_default();
        if cli.delta.is_some() || cli.m.is_some() {
            match &mut instance {
                InstanceSpec::Synthetic { delta, m, .. } => {
                    *delta = cli.delta.unwrap_or(*delta);
                    *m = cli.m.unwrap_or(*m);
                }
                _ => {
                    return Err(CliError::Config(
                        "--delta/--m only apply to the synthetic family".into(),
                    ))
                }
            }
        }

        let runs = cli.runs.or(file.runs).unwrap_or(DEFAULT_RUNS);
        if runs == 0 {
            return Err(CliError::Config("runs must be at least 1".into()));
        }
        let out_explicit = cli.out.is_some() || file.out.is_some();
        let out_dir = cli
            .out
            .or(file.out)
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));

        Ok(Self {
            label: file.label,
            instance,
            policies,
            horizon: cli.horizon.or(file.horizon).unwrap_or(DEFAULT_HORIZON),
            runs,
            seed: cli.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            diagnostics: cli.diagnostics || file.diagnostics.unwrap_or(false),
            parallelism: cli.parallelism.or(file.parallelism).unwrap_or(1),
            out_dir,
            out_explicit,
            trajectory: cli.trajectory || file.trajectory.unwrap_or(false),
            sweep: SweepSpec {
                deltas: file.sweep.deltas.unwrap_or_else(|| GAP_SWEEP_DELTAS.to_vec()),
                gap_m: file.sweep.gap_m.unwrap_or(1),
                crowd: file.sweep.crowd.unwrap_or_else(|| CROWD_SWEEP_SIZES.to_vec()),
                crowd_delta: file.sweep.crowd_delta.unwrap_or(CROWD_SWEEP_DELTA),
                arms: file.sweep.arms.unwrap_or_else(default_arms),
            },
            lower_bound: LowerBoundSpec {
                arms: file.lower_bound.arms.unwrap_or_else(default_arms),
                objectives: file.lower_bound.objectives.unwrap_or_else(default_objectives),
                delta_sc: file
                    .lower_bound
                    .delta_sc
                    .unwrap_or_else(|| LOWER_BOUND_GRID.to_vec()),
            },
        })
    }

    /// Builds the configured instance and checks it fits the horizon.
    pub fn build_instance(&self) -> Result<BanditInstance, CliError> {
        let instance = self.instance.build()?;
        self.check_horizon(&instance)?;
        Ok(instance)
    }

    pub fn check_horizon(&self, instance: &BanditInstance) -> Result<(), CliError> {
        if self.horizon < instance.arms() as u64 {
            return Err(CliError::Config(format!(
                "horizon {} is smaller than the arm count {}",
                self.horizon,
                instance.arms()
            )));
        }
        Ok(())
    }

    pub fn options(&self) -> momab::BatchOptions {
        momab::BatchOptions {
            parallelism: self.parallelism,
            diagnostics: self.diagnostics,
            keep_runs: false,
        }
    }
}
