//! Stochastic multi-objective multi-armed bandits under Pareto regret.
//!
//! - [`pareto`]: dominance, Pareto sets and gaps, objective-winner geometry,
//!   and the closed-form regret-bound quantities.
//! - [`environment`]: Bernoulli bandit instances, including the two-frontier
//!   synthetic family and the duplicated-coordinate family.
//! - [`policy`]: width-guided first-certification UCB and Pareto UCB1.
//! - [`simulator`]: seeded runs, online diagnostics and batch aggregation.
//! - [`seeding`]: the generator and seed-derivation rules.

pub mod environment;
pub mod error;
pub mod pareto;
pub mod policy;
pub mod seeding;
pub mod simulator;

pub use environment::{BanditInstance, RewardModel, RewardVector, SyntheticFamily};
pub use error::{Error, Result};
pub use pareto::{InstanceAnalytics, MeanMatrix};
pub use policy::{Policy, PolicyKind};
pub use simulator::{batch, run, BatchOptions, BatchSummary, RunResult};
