//! Bandit instances and their seeded Bernoulli reward streams.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::pareto::MeanMatrix;

/// One pull's reward vector, each coordinate in `{0, 1}`.
pub type RewardVector = Vec<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RewardModel {
    /// Each coordinate is an independent Bernoulli draw with its own mean.
    IndependentBernoulli,
    /// A single Bernoulli draw copied into every coordinate.
    DuplicatedBernoulli,
}

impl RewardModel {
    pub fn name(self) -> &'static str {
        match self {
            RewardModel::IndependentBernoulli => "independent-bernoulli",
            RewardModel::DuplicatedBernoulli => "duplicated-bernoulli",
        }
    }
}

impl fmt::Display for RewardModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RewardModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "independent-bernoulli" => Ok(RewardModel::IndependentBernoulli),
            "duplicated-bernoulli" => Ok(RewardModel::DuplicatedBernoulli),
            other => Err(Error::invalid(
                "reward_model",
                format!("unknown reward model `{other}`"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BanditInstance {
    means: MeanMatrix,
    reward_model: RewardModel,
    label: String,
}

impl BanditInstance {
    pub fn new(label: impl Into<String>, means: MeanMatrix, reward_model: RewardModel) -> Result<Self> {
        if reward_model == RewardModel::DuplicatedBernoulli {
            for (a, row) in means.rows().enumerate() {
                if row.iter().any(|&v| v != row[0]) {
                    return Err(Error::invalid(
                        "means",
                        format!("duplicated-bernoulli arm {a} has unequal coordinates"),
                    ));
                }
            }
        }
        Ok(Self {
            means,
            reward_model,
            label: label.into(),
        })
    }

    pub fn means(&self) -> &MeanMatrix {
        &self.means
    }

    pub fn reward_model(&self) -> RewardModel {
        self.reward_model
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn arms(&self) -> usize {
        self.means.arms()
    }

    pub fn objectives(&self) -> usize {
        self.means.objectives()
    }

    /// Draws one reward vector for `arm`.
    ///
    /// Consumes exactly `d` generator outputs for independent coordinates and
    /// exactly one for duplicated coordinates.
    pub fn sample<R: Rng + ?Sized>(&self, arm: usize, rng: &mut R) -> Result<RewardVector> {
        let mut out = vec![0.0; self.objectives()];
        self.sample_into(arm, rng, &mut out)?;
        Ok(out)
    }

    pub fn sample_into<R: Rng + ?Sized>(&self, arm: usize, rng: &mut R, out: &mut [f64]) -> Result<()> {
        if arm >= self.arms() {
            return Err(Error::ArmOutOfRange {
                arm,
                arms: self.arms(),
            });
        }
        if out.len() != self.objectives() {
            return Err(Error::DimensionMismatch {
                expected: self.objectives(),
                actual: out.len(),
            });
        }
        let mean = self.means.row(arm);
        match self.reward_model {
            RewardModel::IndependentBernoulli => {
                for (slot, &p) in out.iter_mut().zip(mean) {
                    *slot = bernoulli(p, rng);
                }
            }
            RewardModel::DuplicatedBernoulli => out.fill(bernoulli(mean[0], rng)),
        }
        Ok(())
    }
}

#[inline]
fn bernoulli<R: Rng + ?Sized>(p: f64, rng: &mut R) -> f64 {
    if rng.gen::<f64>() < p {
        1.0
    } else {
        0.0
    }
}

/// Parameters of the two-objective family with two frontier arms, `m`
/// near-frontier dominated arms and low baseline arms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticFamily {
    pub p: f64,
    pub g: f64,
    pub eta: f64,
    pub u: f64,
    pub delta: f64,
    pub crowd: usize,
    pub arms: usize,
}

impl Default for SyntheticFamily {
    fn default() -> Self {
        Self {
            p: 0.25,
            g: 0.55,
            eta: 0.20,
            u: 0.05,
            delta: 0.02,
            crowd: 1,
            arms: 20,
        }
    }
}

impl SyntheticFamily {
    pub fn with_crowd(delta: f64, crowd: usize) -> Self {
        Self {
            delta,
            crowd,
            ..Self::default()
        }
    }

    pub fn label(&self) -> String {
        format!("synthetic(delta={},m={},K={})", self.delta, self.crowd, self.arms)
    }

    /// Arms 0 and 1 are `(p+g, p)` and `(p, p+g)`, arms `2..2+m` are
    /// `(p-eta, p+g-delta)` and the rest are `(u, u)`.
    pub fn build(&self) -> Result<BanditInstance> {
        if self.delta.is_nan() || self.delta <= 0.0 {
            return Err(Error::invalid("delta", "must be positive"));
        }
        if self.arms < 2 + self.crowd {
            return Err(Error::invalid(
                "arms",
                format!("{} arms cannot hold 2 frontier and {} crowd arms", self.arms, self.crowd),
            ));
        }
        let Self { p, g, eta, u, delta, .. } = *self;
        let mut rows = vec![vec![p + g, p], vec![p, p + g]];
        rows.extend(std::iter::repeat_n(vec![p - eta, p + g - delta], self.crowd));
        rows.extend(std::iter::repeat_n(vec![u, u], self.arms - 2 - self.crowd));
        let means = MeanMatrix::new(rows)?;
        BanditInstance::new(self.label(), means, RewardModel::IndependentBernoulli)
    }
}

pub fn synthetic_family(family: &SyntheticFamily) -> Result<BanditInstance> {
    family.build()
}

/// Arm 0 has mean `1/2 + delta_sc` in every coordinate, all others `1/2`.
pub fn duplicated_bernoulli(arms: usize, objectives: usize, delta_sc: f64) -> Result<BanditInstance> {
    if arms < 2 {
        return Err(Error::invalid("arms", "at least two arms are required"));
    }
    if objectives == 0 {
        return Err(Error::invalid("objectives", "at least one objective is required"));
    }
    if !(delta_sc > 0.0 && delta_sc <= 0.25) {
        return Err(Error::invalid("delta_sc", format!("{delta_sc} outside (0, 1/4]")));
    }
    let mut values = vec![0.5; arms * objectives];
    values[..objectives].fill(0.5 + delta_sc);
    let means = MeanMatrix::from_flat(arms, objectives, values)?;
    BanditInstance::new(
        format!("duplicated(delta_sc={delta_sc},K={arms},d={objectives})"),
        means,
        RewardModel::DuplicatedBernoulli,
    )
}
