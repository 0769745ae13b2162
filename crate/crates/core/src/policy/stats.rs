use crate::error::{Error, Result};

/// Per-arm pull counts and running mean reward vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmStats {
    arms: usize,
    objectives: usize,
    counts: Vec<u64>,
    means: Vec<f64>,
    total: u64,
}

impl ArmStats {
    pub fn new(arms: usize, objectives: usize) -> Self {
        Self {
            arms,
            objectives,
            counts: vec![0; arms],
            means: vec![0.0; arms * objectives],
            total: 0,
        }
    }

    /// Builds statistics directly, e.g. to inspect a policy in a chosen state.
    pub fn from_parts(counts: Vec<u64>, means: Vec<Vec<f64>>) -> Result<Self> {
        if counts.len() != means.len() {
            return Err(Error::DimensionMismatch {
                expected: counts.len(),
                actual: means.len(),
            });
        }
        let objectives = means.first().map_or(0, Vec::len);
        let mut flat = Vec::with_capacity(counts.len() * objectives);
        for row in means {
            if row.len() != objectives {
                return Err(Error::DimensionMismatch {
                    expected: objectives,
                    actual: row.len(),
                });
            }
            flat.extend(row);
        }
        Ok(Self {
            arms: counts.len(),
            objectives,
            total: counts.iter().sum(),
            counts,
            means: flat,
        })
    }

    pub fn arms(&self) -> usize {
        self.arms
    }

    pub fn objectives(&self) -> usize {
        self.objectives
    }

    pub fn count(&self, arm: usize) -> u64 {
        self.counts[arm]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn mean(&self, arm: usize) -> &[f64] {
        &self.means[arm * self.objectives..(arm + 1) * self.objectives]
    }

    pub fn mean_at(&self, arm: usize, objective: usize) -> f64 {
        self.means[arm * self.objectives + objective]
    }

    /// `mean <- mean + (x - mean) / n`.
    pub fn record(&mut self, arm: usize, reward: &[f64]) -> Result<()> {
        if arm >= self.arms {
            return Err(Error::ArmOutOfRange {
                arm,
                arms: self.arms,
            });
        }
        if reward.len() != self.objectives {
            return Err(Error::DimensionMismatch {
                expected: self.objectives,
                actual: reward.len(),
            });
        }
        self.counts[arm] += 1;
        self.total += 1;
        let n = self.counts[arm] as f64;
        let row = &mut self.means[arm * self.objectives..(arm + 1) * self.objectives];
        for (m, &x) in row.iter_mut().zip(reward) {
            *m += (x - *m) / n;
        }
        Ok(())
    }
}
