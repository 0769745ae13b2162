//! Arm-selection policies.
//!
//! A policy is driven in rounds `t = 1..=T`: `decide(t, rng)` returns an arm
//! (zero-based) and the caller must then `observe` that arm's reward vector
//! before the next decision. The generator passed to `decide` is only used
//! to break exact ties uniformly at random; no draw is consumed when the
//! candidate set is a singleton.

mod pareto_ucb1;
mod stats;
mod wgfc;

use std::fmt;
use std::str::FromStr;

use rand::{Rng, RngCore};

use crate::error::{Error, Result};

pub use pareto_ucb1::ParetoUcb1;
pub use stats::ArmStats;
pub use wgfc::{Certification, RoundKind, RoundTrace, Wgfc};

pub trait Policy: Send {
    fn name(&self) -> &'static str;

    fn horizon(&self) -> u64;

    fn decide(&mut self, round: u64, rng: &mut dyn RngCore) -> Result<usize>;

    fn observe(&mut self, arm: usize, reward: &[f64]) -> Result<()>;

    /// Pull counts and running means accumulated so far.
    fn stats(&self) -> &ArmStats;

    /// The stored certified leader, for policies that certify.
    fn certification(&self) -> Option<Certification> {
        None
    }

    /// Internal quantities of the most recent decision, when exposed.
    fn trace(&self) -> Option<&RoundTrace> {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PolicyKind {
    Wgfc,
    ParetoUcb1,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 2] = [PolicyKind::ParetoUcb1, PolicyKind::Wgfc];

    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::Wgfc => "wgfc",
            PolicyKind::ParetoUcb1 => "pareto-ucb1",
        }
    }

    pub fn build(self, arms: usize, objectives: usize, horizon: u64) -> Result<Box<dyn Policy>> {
        Ok(match self {
            PolicyKind::Wgfc => Box::new(Wgfc::new(arms, objectives, horizon)?),
            PolicyKind::ParetoUcb1 => Box::new(ParetoUcb1::new(arms, objectives, horizon)?),
        })
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "wgfc" => Ok(PolicyKind::Wgfc),
            "pareto-ucb1" => Ok(PolicyKind::ParetoUcb1),
            other => Err(Error::invalid("policy", format!("unknown policy `{other}`"))),
        }
    }
}

pub(crate) fn validate_setup(arms: usize, objectives: usize, horizon: u64) -> Result<()> {
    if arms < 2 {
        return Err(Error::invalid("arms", "at least two arms are required"));
    }
    if objectives == 0 {
        return Err(Error::invalid("objectives", "at least one objective is required"));
    }
    if horizon < arms as u64 {
        return Err(Error::invalid(
            "horizon",
            format!("{horizon} is smaller than the arm count {arms}"),
        ));
    }
    Ok(())
}

pub(crate) fn check_round(round: u64, horizon: u64) -> Result<()> {
    if round == 0 || round > horizon {
        return Err(Error::Contract(format!(
            "round {round} outside 1..={horizon}"
        )));
    }
    Ok(())
}

/// Uniform choice among tied candidates; draws only when there is a real tie.
pub(crate) fn pick(candidates: &[usize], rng: &mut dyn RngCore) -> usize {
    debug_assert!(!candidates.is_empty());
    if candidates.len() == 1 {
        candidates[0]
    } else {
        candidates[rng.gen_range(0..candidates.len())]
    }
}

/// Indices attaining the maximum of `score` over `items`, in input order.
pub(crate) fn argmax_set(
    items: impl Iterator<Item = usize>,
    score: impl Fn(usize) -> f64,
    out: &mut Vec<usize>,
) {
    out.clear();
    let mut best = f64::NEG_INFINITY;
    for i in items {
        let s = score(i);
        if s > best {
            best = s;
            out.clear();
            out.push(i);
        } else if s == best {
            out.push(i);
        }
    }
}
