use rand::RngCore;

use super::{argmax_set, check_round, pick, validate_setup, ArmStats, Policy};
use crate::error::{Error, Result};

/// A certified leader: once stored it is played for the rest of the horizon.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Certification {
    pub arm: usize,
    pub objective: usize,
    pub round: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoundKind {
    WarmStart,
    /// A leader was already stored; no statistics were computed.
    Committed,
    /// The leader of `objective` certified in this round.
    Certifying { objective: usize },
    /// No objective certified; `objective` had the widest top-two pair.
    NonCertifying { objective: usize },
}

/// Quantities computed for the most recent decision. `beta`, `leaders`,
/// `runners_up` and `widths` are only meaningful for certifying and
/// non-certifying rounds.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundTrace {
    pub round: u64,
    pub kind: RoundKind,
    pub arm: usize,
    pub beta: Vec<f64>,
    pub leaders: Vec<usize>,
    pub runners_up: Vec<usize>,
    pub widths: Vec<f64>,
}

impl RoundTrace {
    fn new(arms: usize, objectives: usize) -> Self {
        Self {
            round: 0,
            kind: RoundKind::WarmStart,
            arm: 0,
            beta: vec![0.0; arms],
            leaders: vec![0; objectives],
            runners_up: vec![0; objectives],
            widths: vec![0.0; objectives],
        }
    }
}

/// Width-guided first-certification UCB.
///
/// After pulling every arm once, each round computes the fixed-horizon radius
/// `beta_a = sqrt(2 ln T / N_a)` and, per objective, the top two arms by UCB.
/// If the leader's LCB reaches the runner-up's UCB on some objective, that
/// leader is stored and played forever. Otherwise the objective with the
/// widest pair `beta_b + beta_c` is selected and its less-sampled endpoint
/// (larger radius) is pulled.
#[derive(Debug, Clone)]
pub struct Wgfc {
    horizon: u64,
    two_log_horizon: f64,
    stats: ArmStats,
    certified: Option<Certification>,
    pending: Option<usize>,
    trace: RoundTrace,
    ties: Vec<usize>,
}

impl Wgfc {
    pub fn new(arms: usize, objectives: usize, horizon: u64) -> Result<Self> {
        validate_setup(arms, objectives, horizon)?;
        Ok(Self::build(horizon, ArmStats::new(arms, objectives)))
    }

    /// Starts from existing statistics instead of an empty history.
    pub fn with_stats(horizon: u64, stats: ArmStats) -> Result<Self> {
        validate_setup(stats.arms(), stats.objectives(), horizon)?;
        Ok(Self::build(horizon, stats))
    }

    fn build(horizon: u64, stats: ArmStats) -> Self {
        let trace = RoundTrace::new(stats.arms(), stats.objectives());
        Self {
            horizon,
            two_log_horizon: 2.0 * (horizon as f64).ln(),
            stats,
            certified: None,
            pending: None,
            trace,
            ties: Vec::new(),
        }
    }

    /// Stores a leader directly.
    pub fn set_certified(&mut self, arm: usize, objective: usize) -> Result<()> {
        if arm >= self.stats.arms() {
            return Err(Error::ArmOutOfRange {
                arm,
                arms: self.stats.arms(),
            });
        }
        if self.certified.is_some() {
            return Err(Error::Contract("a certified leader is already stored".into()));
        }
        self.certified = Some(Certification {
            arm,
            objective,
            round: 0,
        });
        Ok(())
    }

    /// `sqrt(2 ln T / N_a)`.
    pub fn radius(&self, arm: usize) -> f64 {
        (self.two_log_horizon / self.stats.count(arm) as f64).sqrt()
    }

    fn choose(&mut self, round: u64, rng: &mut dyn RngCore) -> Result<usize> {
        let arms = self.stats.arms();
        if round <= arms as u64 {
            self.trace.kind = RoundKind::WarmStart;
            return Ok(round as usize - 1);
        }
        if let Some(c) = self.certified {
            self.trace.kind = RoundKind::Committed;
            return Ok(c.arm);
        }
        if let Some(a) = (0..arms).find(|&a| self.stats.count(a) == 0) {
            return Err(Error::Contract(format!(
                "arm {a} has no observations after the warm start"
            )));
        }

        for a in 0..arms {
            self.trace.beta[a] = self.radius(a);
        }
        let stats = &self.stats;
        let beta = &self.trace.beta;
        let ucb = |a: usize, j: usize| stats.mean_at(a, j) + beta[a];
        for j in 0..stats.objectives() {
            argmax_set(0..arms, |a| ucb(a, j), &mut self.ties);
            let leader = pick(&self.ties, rng);
            argmax_set((0..arms).filter(|&a| a != leader), |a| ucb(a, j), &mut self.ties);
            let runner_up = pick(&self.ties, rng);
            self.trace.leaders[j] = leader;
            self.trace.runners_up[j] = runner_up;
            self.trace.widths[j] = beta[leader] + beta[runner_up];
        }

        let certifying = (0..stats.objectives()).find(|&j| {
            let (b, c) = (self.trace.leaders[j], self.trace.runners_up[j]);
            stats.mean_at(b, j) - beta[b] >= ucb(c, j)
        });
        if let Some(objective) = certifying {
            let arm = self.trace.leaders[objective];
            self.certified = Some(Certification {
                arm,
                objective,
                round,
            });
            self.trace.kind = RoundKind::Certifying { objective };
            return Ok(arm);
        }

        let widths = &self.trace.widths;
        argmax_set(0..widths.len(), |j| widths[j], &mut self.ties);
        let objective = pick(&self.ties, rng);
        let endpoints = [self.trace.leaders[objective], self.trace.runners_up[objective]];
        argmax_set(endpoints.into_iter(), |a| beta[a], &mut self.ties);
        let arm = pick(&self.ties, rng);
        self.trace.kind = RoundKind::NonCertifying { objective };
        Ok(arm)
    }
}

impl Policy for Wgfc {
    fn name(&self) -> &'static str {
        "wgfc"
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
        self.trace.round = round;
        self.trace.arm = arm;
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

    fn certification(&self) -> Option<Certification> {
        self.certified
    }

    fn trace(&self) -> Option<&RoundTrace> {
        Some(&self.trace)
    }
}
