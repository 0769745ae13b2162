use rand::RngCore;

use super::{check_round, pick, validate_setup, ArmStats, Policy};
use crate::error::{Error, Result};
use crate::pareto::non_dominated_indices;

/// Pareto UCB1: after the warm start, play a uniformly random member of the
/// Pareto set of the index vectors
/// `mean_a + sqrt(2 ln(t (d K)^(1/4)) / N_a)`.
#[derive(Debug, Clone)]
pub struct ParetoUcb1 {
    horizon: u64,
    stats: ArmStats,
    pending: Option<usize>,
    index: Vec<f64>,
    front: Vec<usize>,
}

impl ParetoUcb1 {
    pub fn new(arms: usize, objectives: usize, horizon: u64) -> Result<Self> {
        validate_setup(arms, objectives, horizon)?;
        Ok(Self::build(horizon, ArmStats::new(arms, objectives)))
    }

    pub fn with_stats(horizon: u64, stats: ArmStats) -> Result<Self> {
        validate_setup(stats.arms(), stats.objectives(), horizon)?;
        Ok(Self::build(horizon, stats))
    }

    fn build(horizon: u64, stats: ArmStats) -> Self {
        Self {
            horizon,
            index: vec![0.0; stats.arms() * stats.objectives()],
            front: Vec::with_capacity(stats.arms()),
            stats,
            pending: None,
        }
    }

    /// Index vectors of the most recent post-warm-start decision, row-major.
    pub fn index_vectors(&self) -> &[f64] {
        &self.index
    }

    /// Empirical Pareto set of the most recent post-warm-start decision.
    pub fn empirical_front(&self) -> &[usize] {
        &self.front
    }

    fn choose(&mut self, round: u64, rng: &mut dyn RngCore) -> Result<usize> {
        let arms = self.stats.arms();
        let d = self.stats.objectives();
        if round <= arms as u64 {
            return Ok(round as usize - 1);
        }
        let log_term = 2.0 * (round as f64 * ((d * arms) as f64).powf(0.25)).ln();
        for a in 0..arms {
            let n = self.stats.count(a);
            if n == 0 {
                return Err(Error::Contract(format!(
                    "arm {a} has no observations after the warm start"
                )));
            }
            let bonus = (log_term / n as f64).sqrt();
            for (slot, m) in self.index[a * d..(a + 1) * d].iter_mut().zip(self.stats.mean(a)) {
                *slot = m + bonus;
            }
        }
        self.front = non_dominated_indices(&self.index, d);
        Ok(pick(&self.front, rng))
    }
}

impl Policy for ParetoUcb1 {
    fn name(&self) -> &'static str {
        "pareto-ucb1"
    }

    fn horizon(&self) -> u64 {
        self.horizon
    }

    fn decide(&mut self, round: u64, rng: &mut dyn RngCore) -> Result<usize> {
        check_round(round, self.horizon)?;
        if self.pending.is_some() {
            return Err(Error::Contract("decide called before observing the previous arm".into()));
        }
        let arm = self.choose(round, rng)?;
        self.pending = Some(arm);
        Ok(arm)
    }

    fn observe(&mut self, arm: usize, reward: &[f64]) -> Result<()> {
        match self.pending {
            Some(expected) if expected == arm => {}
            Some(expected) => {
                return Err(Error::Contract(format!(
                    "observed arm {arm} but arm {expected} was decided"
                )))
            }
            None => return Err(Error::Contract("observe called without a decision".into())),
        }
        self.stats.record(arm, reward)?;
        self.pending = None;
        Ok(())
    }

    fn stats(&self) -> &ArmStats {
        &self.stats
    }
}
