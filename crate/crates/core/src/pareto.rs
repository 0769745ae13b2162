//! Pareto order on mean vectors and the closed-form quantities derived from it.
//!
//! Everything here is a pure function of an exact [`MeanMatrix`]; dominance
//! uses exact `>=`/`>` on the stored values. Arms and objectives are indexed
//! from zero.

use crate::error::{Error, Result};

/// Leading constant of the width-guided regret bound, used as the
/// comparison threshold for [`Cpucb`].
pub const THEOREM_LEADING_CONSTANT: f64 = 64.0;

/// Per-arm mean reward vectors, `arms x objectives`, entries in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanMatrix {
    arms: usize,
    objectives: usize,
    values: Vec<f64>,
}

impl MeanMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let arms = rows.len();
        if arms == 0 {
            return Err(Error::invalid("means", "at least one arm is required"));
        }
        let objectives = rows[0].len();
        let mut values = Vec::with_capacity(arms * objectives);
        for row in rows {
            if row.len() != objectives {
                return Err(Error::DimensionMismatch {
                    expected: objectives,
                    actual: row.len(),
                });
            }
            values.extend(row);
        }
        Self::from_flat(arms, objectives, values)
    }

    /// Builds a matrix from row-major storage.
    pub fn from_flat(arms: usize, objectives: usize, values: Vec<f64>) -> Result<Self> {
        if arms == 0 {
            return Err(Error::invalid("means", "at least one arm is required"));
        }
        if objectives == 0 {
            return Err(Error::invalid("means", "at least one objective is required"));
        }
        if values.len() != arms * objectives {
            return Err(Error::DimensionMismatch {
                expected: arms * objectives,
                actual: values.len(),
            });
        }
        if let Some(bad) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::invalid("means", format!("entry {bad} outside [0, 1]")));
        }
        Ok(Self {
            arms,
            objectives,
            values,
        })
    }

    pub fn arms(&self) -> usize {
        self.arms
    }

    pub fn objectives(&self) -> usize {
        self.objectives
    }

    pub fn row(&self, arm: usize) -> &[f64] {
        &self.values[arm * self.objectives..(arm + 1) * self.objectives]
    }

    pub fn get(&self, arm: usize, objective: usize) -> f64 {
        self.values[arm * self.objectives + objective]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.objectives)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(<[f64]>::to_vec).collect()
    }
}

/// `x ≻ y`: `x` is at least `y` in every coordinate and strictly larger in one.
pub fn strictly_dominates(x: &[f64], y: &[f64]) -> Result<bool> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            actual: y.len(),
        });
    }
    if x.is_empty() {
        return Err(Error::invalid("x", "vectors must have at least one coordinate"));
    }
    Ok(dominates(x, y))
}

/// Unchecked dominance for hot loops; callers guarantee equal lengths.
#[inline]
pub(crate) fn dominates(x: &[f64], y: &[f64]) -> bool {
    debug_assert_eq!(x.len(), y.len());
    let mut strict = false;
    for (a, b) in x.iter().zip(y) {
        if a < b {
            return false;
        }
        if a > b {
            strict = true;
        }
    }
    strict
}

/// Indices of the non-dominated rows of a row-major point buffer, ascending.
pub fn non_dominated_indices(points: &[f64], dim: usize) -> Vec<usize> {
    let n = points.len() / dim;
    let row = |i: usize| &points[i * dim..(i + 1) * dim];
    (0..n)
        .filter(|&i| (0..n).all(|k| k == i || !dominates(row(k), row(i))))
        .collect()
}

/// The Pareto set `A*`, in ascending arm order.
pub fn pareto_set(means: &MeanMatrix) -> Vec<usize> {
    non_dominated_indices(&means.values, means.objectives)
}

/// Pareto suboptimality gap of `arm`: the smallest uniform upward shift that
/// leaves the arm's mean vector undominated.
///
/// Evaluated as `max(0, max_{b != a} min_j (mu_b[j] - mu_a[j]))`. If the arm is
/// only weakly beaten (dominated but tied on some coordinate), any positive
/// shift already escapes, so the gap is zero even though the arm is outside
/// the Pareto set.
pub fn pareto_gap(means: &MeanMatrix, arm: usize) -> Result<f64> {
    if arm >= means.arms {
        return Err(Error::ArmOutOfRange {
            arm,
            arms: means.arms,
        });
    }
    Ok(gap_unchecked(means, arm))
}

fn gap_unchecked(means: &MeanMatrix, arm: usize) -> f64 {
    let own = means.row(arm);
    means
        .rows()
        .enumerate()
        .filter(|&(b, _)| b != arm)
        .map(|(_, other)| {
            other
                .iter()
                .zip(own)
                .map(|(o, a)| o - a)
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

pub fn pareto_gaps(means: &MeanMatrix) -> Vec<f64> {
    (0..means.arms).map(|a| gap_unchecked(means, a)).collect()
}

/// Structural summary of an instance: Pareto set, gaps and the
/// winner-versus-runner-up geometry of every objective.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceAnalytics {
    pub num_arms: usize,
    pub num_objectives: usize,
    pub pareto_set: Vec<usize>,
    pub pareto_gaps: Vec<f64>,
    pub delta_max: f64,
    /// Smallest gap among arms outside the Pareto set; `None` when every arm
    /// is Pareto-optimal.
    pub delta_min: Option<f64>,
    /// Arm with the strictly largest mean on each objective, `None` on ties.
    pub objective_winners: Vec<Option<usize>>,
    pub objective_gaps: Vec<f64>,
    pub champion_objective: usize,
    pub champion_gap: f64,
    pub unique_winners: bool,
}

impl InstanceAnalytics {
    pub fn is_pareto_optimal(&self, arm: usize) -> bool {
        self.pareto_set.binary_search(&arm).is_ok()
    }

    pub fn champion_winner(&self) -> Option<usize> {
        self.objective_winners[self.champion_objective]
    }
}

pub fn analyze(means: &MeanMatrix) -> Result<InstanceAnalytics> {
    let arms = means.arms();
    let objectives = means.objectives();
    if arms < 2 {
        return Err(Error::invalid("means", "analysis needs at least two arms"));
    }

    let pareto_set = pareto_set(means);
    let pareto_gaps = pareto_gaps(means);
    let delta_max = pareto_gaps.iter().copied().fold(0.0, f64::max);
    let delta_min = (0..arms)
        .filter(|a| pareto_set.binary_search(a).is_err())
        .map(|a| pareto_gaps[a])
        .reduce(f64::min);

    let mut objective_winners = Vec::with_capacity(objectives);
    let mut objective_gaps = Vec::with_capacity(objectives);
    for j in 0..objectives {
        let mut best = 0;
        for a in 1..arms {
            if means.get(a, j) > means.get(best, j) {
                best = a;
            }
        }
        let runner_up = (0..arms)
            .filter(|&a| a != best)
            .map(|a| means.get(a, j))
            .fold(f64::NEG_INFINITY, f64::max);
        let gap = means.get(best, j) - runner_up;
        objective_winners.push((gap > 0.0).then_some(best));
        objective_gaps.push(gap);
    }

    let mut champion_objective = 0;
    for j in 1..objectives {
        if objective_gaps[j] > objective_gaps[champion_objective] {
            champion_objective = j;
        }
    }

    Ok(InstanceAnalytics {
        num_arms: arms,
        num_objectives: objectives,
        pareto_set,
        pareto_gaps,
        delta_max,
        delta_min,
        unique_winners: objective_winners.iter().all(Option::is_some),
        objective_winners,
        champion_gap: objective_gaps[champion_objective],
        objective_gaps,
        champion_objective,
    })
}

/// `sum_a gap[a] * pulls[a]`.
pub fn cumulative_pareto_regret(gaps: &[f64], pull_counts: &[u64]) -> Result<f64> {
    if gaps.len() != pull_counts.len() {
        return Err(Error::DimensionMismatch {
            expected: gaps.len(),
            actual: pull_counts.len(),
        });
    }
    Ok(gaps
        .iter()
        .zip(pull_counts)
        .map(|(g, &n)| g * n as f64)
        .sum())
}

fn require_certification_scale(analytics: &InstanceAnalytics) -> Result<()> {
    if analytics.champion_gap <= 0.0 {
        return Err(Error::UndefinedScale);
    }
    if !analytics.unique_winners {
        return Err(Error::Contract(
            "regret bound requires a unique winner on every objective".into(),
        ));
    }
    Ok(())
}

fn require_horizon(analytics: &InstanceAnalytics, horizon: u64) -> Result<()> {
    if horizon < analytics.num_arms as u64 {
        return Err(Error::invalid(
            "horizon",
            format!("{horizon} is smaller than the arm count {}", analytics.num_arms),
        ));
    }
    Ok(())
}

/// Finite-time upper bound on the expected Pareto regret of the
/// width-guided policy:
/// `K * dmax + 64 * K * ln T / g + 2 * K * d * dmax / T^2`.
pub fn theorem1_bound(analytics: &InstanceAnalytics, horizon: u64) -> Result<f64> {
    require_certification_scale(analytics)?;
    require_horizon(analytics, horizon)?;
    let k = analytics.num_arms as f64;
    let d = analytics.num_objectives as f64;
    let t = horizon as f64;
    let dmax = analytics.delta_max;
    Ok(k * dmax
        + THEOREM_LEADING_CONSTANT * k * t.ln() / analytics.champion_gap
        + 2.0 * k * d * dmax / (t * t))
}

/// Leading coefficient of the Pareto UCB1 bound expressed on the
/// `K ln T / g` scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cpucb {
    pub value: f64,
    /// Every arm is Pareto-optimal, so the dominated-arm sum is empty.
    pub empty_sum: bool,
}

impl Cpucb {
    /// Whether the width-guided constant 64 is the smaller leading coefficient.
    pub fn exceeds_theorem_constant(&self) -> bool {
        THEOREM_LEADING_CONSTANT < self.value
    }
}

pub fn cpucb_coefficient(analytics: &InstanceAnalytics, horizon: u64) -> Result<Cpucb> {
    if analytics.pareto_set.len() == analytics.num_arms {
        return Ok(Cpucb {
            value: 0.0,
            empty_sum: true,
        });
    }
    if analytics.champion_gap <= 0.0 {
        return Err(Error::UndefinedScale);
    }
    if horizon < 2 {
        return Err(Error::invalid("horizon", "must be at least 2"));
    }
    let mut inverse_gaps = 0.0;
    for a in (0..analytics.num_arms).filter(|&a| !analytics.is_pareto_optimal(a)) {
        let gap = analytics.pareto_gaps[a];
        if gap <= 0.0 {
            return Err(Error::Contract(format!(
                "dominated arm {a} has zero Pareto gap"
            )));
        }
        inverse_gaps += 1.0 / gap;
    }
    let ln_t = (horizon as f64).ln();
    let front_width = (analytics.num_objectives * analytics.pareto_set.len()) as f64;
    let log_ratio = (ln_t + 0.25 * front_width.ln()) / ln_t;
    Ok(Cpucb {
        value: 8.0 * analytics.champion_gap / analytics.num_arms as f64 * inverse_gaps * log_ratio,
        empty_sum: false,
    })
}

/// Bernoulli relative entropy `kl(p, q)` in nats.
pub fn bernoulli_kl(p: f64, q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid("p", format!("{p} outside [0, 1]")));
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::invalid("q", format!("{q} outside [0, 1]")));
    }
    if q == 0.0 || q == 1.0 {
        return if p == q {
            Ok(0.0)
        } else {
            Err(Error::InfiniteDivergence { p, q })
        };
    }
    let term = |x: f64, y: f64| if x == 0.0 { 0.0 } else { x * (x / y).ln() };
    Ok(term(p, q) + term(1.0 - p, 1.0 - q))
}

/// Asymptotic per-`ln T` regret floor on the duplicated-coordinate
/// Bernoulli family: `(3/8) (K - 1) / delta_sc`.
pub fn lower_bound_constant(arms: usize, delta_sc: f64) -> Result<f64> {
    if arms < 2 {
        return Err(Error::invalid("arms", "at least two arms are required"));
    }
    if !(delta_sc > 0.0 && delta_sc <= 0.25) {
        return Err(Error::invalid("delta_sc", format!("{delta_sc} outside (0, 1/4]")));
    }
    Ok(0.375 * (arms - 1) as f64 / delta_sc)
}
