//! Seeded policy-versus-instance runs and their aggregation.
//!
//! A run of seed `s` draws policy tie-breaks from stream 0 and the rewards of
//! arm `a` from stream `a + 1` of the generator keyed by `s` (see
//! [`crate::seeding`]). Batches derive run seeds with
//! [`crate::seeding::run_seed`] and aggregate strictly in run-index order, so
//! the summary does not depend on how many threads executed the runs.

use rayon::prelude::*;

use crate::environment::BanditInstance;
use crate::error::{Error, Result};
use crate::pareto::{analyze, InstanceAnalytics};
use crate::policy::{Certification, PolicyKind, RoundKind};
use crate::seeding::{arm_generator, policy_generator, run_seed};

/// Online checks of the confidence event and of the per-round inequalities
/// the width-guided policy satisfies on it.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Diagnostics {
    /// Every empirical mean stayed within `sqrt(2 ln T / N_a)` of the true
    /// mean at every round after the warm start.
    pub confidence_event_held: bool,
    /// Certifications whose arm is not the true winner of the certifying
    /// objective.
    pub lemma1_violations: u64,
    /// Non-certifying rounds with `gap(A_t) > 4 beta(A_t)`.
    pub lemma2_violations: u64,
    /// Non-certifying rounds where the champion pair width is below `g/2` or
    /// the pulled radius is below `g/4`.
    pub lemma3_violations: u64,
}

impl Diagnostics {
    pub fn total_violations(&self) -> u64 {
        self.lemma1_violations + self.lemma2_violations + self.lemma3_violations
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub policy: PolicyKind,
    pub seed: u64,
    pub actions: Vec<usize>,
    /// Running Pareto regret after each round; entry `t - 1` covers rounds `1..=t`.
    pub cumulative_regret: Vec<f64>,
    pub pull_counts: Vec<u64>,
    pub certification: Option<Certification>,
    /// Whether the certified arm is truly Pareto-optimal.
    pub certified_correct: Option<bool>,
    pub diagnostics: Option<Diagnostics>,
}

impl RunResult {
    pub fn horizon(&self) -> u64 {
        self.actions.len() as u64
    }

    pub fn final_regret(&self) -> f64 {
        self.cumulative_regret.last().copied().unwrap_or(0.0)
    }

    pub fn certification_round(&self) -> Option<u64> {
        self.certification.map(|c| c.round)
    }

    pub fn certified_arm(&self) -> Option<usize> {
        self.certification.map(|c| c.arm)
    }

    pub fn certified_correctly(&self) -> bool {
        self.certified_correct == Some(true)
    }
}

/// An instance together with its analytics, shared by all runs of a batch.
#[derive(Debug, Clone)]
pub struct Scenario<'a> {
    pub instance: &'a BanditInstance,
    pub analytics: InstanceAnalytics,
}

impl<'a> Scenario<'a> {
    pub fn new(instance: &'a BanditInstance) -> Result<Self> {
        Ok(Self {
            analytics: analyze(instance.means())?,
            instance,
        })
    }
}

pub fn run(
    instance: &BanditInstance,
    policy: PolicyKind,
    horizon: u64,
    seed: u64,
    diagnostics: bool,
) -> Result<RunResult> {
    run_scenario(&Scenario::new(instance)?, policy, horizon, seed, diagnostics)
}

pub fn run_scenario(
    scenario: &Scenario<'_>,
    kind: PolicyKind,
    horizon: u64,
    seed: u64,
    diagnostics: bool,
) -> Result<RunResult> {
    let instance = scenario.instance;
    let analytics = &scenario.analytics;
    let arms = instance.arms();
    let d = instance.objectives();
    if horizon < arms as u64 {
        return Err(Error::invalid(
            "horizon",
            format!("{horizon} is smaller than the arm count {arms}"),
        ));
    }

    let mut policy = kind.build(arms, d, horizon)?;
    let mut policy_rng = policy_generator(seed);
    let mut reward_rngs: Vec<_> = (0..arms).map(|a| arm_generator(seed, a)).collect();
    let gaps = &analytics.pareto_gaps;
    let two_log_horizon = 2.0 * (horizon as f64).ln();

    let mut diag = diagnostics.then(|| Diagnostics {
        confidence_event_held: true,
        ..Diagnostics::default()
    });
    let mut actions = Vec::with_capacity(horizon as usize);
    let mut cumulative_regret = Vec::with_capacity(horizon as usize);
    let mut reward = vec![0.0; d];
    let mut regret = 0.0;

    for t in 1..=horizon {
        if let Some(diag) = diag.as_mut() {
            if t > arms as u64 && diag.confidence_event_held {
                let stats = policy.stats();
                diag.confidence_event_held = (0..arms).all(|a| {
                    let beta = (two_log_horizon / stats.count(a) as f64).sqrt();
                    stats
                        .mean(a)
                        .iter()
                        .zip(instance.means().row(a))
                        .all(|(m, mu)| (m - mu).abs() <= beta)
                });
            }
        }

        let arm = policy.decide(t, &mut policy_rng)?;

        if let (Some(diag), Some(trace)) = (diag.as_mut(), policy.trace()) {
            match trace.kind {
                RoundKind::Certifying { objective } => {
                    if let Some(winner) = analytics.objective_winners[objective] {
                        if winner != arm {
                            diag.lemma1_violations += 1;
                        }
                    }
                }
                RoundKind::NonCertifying { .. } => {
                    let beta = &trace.beta;
                    if gaps[arm] > 4.0 * beta[arm] {
                        diag.lemma2_violations += 1;
                    }
                    if analytics.unique_winners {
                        let g = analytics.champion_gap;
                        let j = analytics.champion_objective;
                        let width = beta[trace.leaders[j]] + beta[trace.runners_up[j]];
                        if width < g / 2.0 || beta[arm] < g / 4.0 {
                            diag.lemma3_violations += 1;
                        }
                    }
                }
                RoundKind::WarmStart | RoundKind::Committed => {}
            }
        }

        instance.sample_into(arm, &mut reward_rngs[arm], &mut reward)?;
        policy.observe(arm, &reward)?;
        regret += gaps[arm];
        actions.push(arm);
        cumulative_regret.push(regret);
    }

    let certification = policy.certification();
    Ok(RunResult {
        policy: kind,
        seed,
        actions,
        cumulative_regret,
        pull_counts: policy.stats().counts().to_vec(),
        certified_correct: certification.map(|c| analytics.is_pareto_optimal(c.arm)),
        certification,
        diagnostics: diag,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BatchOptions {
    /// Worker threads; `0` uses every available core, `1` runs inline.
    pub parallelism: usize,
    pub diagnostics: bool,
    /// Keep every [`RunResult`] in the returned [`Batch`].
    pub keep_runs: bool,
}

impl Default for BatchOptions {
    fn default() -> Self {
        Self {
            parallelism: 1,
            diagnostics: false,
            keep_runs: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchSummary {
    pub label: String,
    pub policy: PolicyKind,
    pub runs: usize,
    pub horizon: u64,
    pub regret_mean: f64,
    /// Sample standard deviation of the final regret (zero for one run).
    pub regret_std: f64,
    /// Fraction of runs that certified a truly Pareto-optimal arm.
    pub certification_rate: f64,
    pub mean_certification_round: Option<f64>,
    pub median_certification_round: Option<f64>,
    pub final_regrets: Vec<f64>,
    pub trajectory: Trajectory,
    /// Summed over runs; `None` when diagnostics were off.
    pub diagnostics: Option<DiagnosticsSummary>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DiagnosticsSummary {
    pub lemma1_violations: u64,
    pub lemma2_violations: u64,
    pub lemma3_violations: u64,
    /// Violations restricted to runs where the confidence event held.
    pub violations_on_event: u64,
    pub omega_holds_rate: f64,
}

/// Per-round averages over a collection of runs.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub mean_cumulative_regret: Vec<f64>,
    /// Fraction of runs certified by each round.
    pub certification_fraction: Vec<f64>,
    /// Median certification round over the runs that certified.
    pub median_certification_round: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Batch {
    pub summary: BatchSummary,
    pub runs: Vec<RunResult>,
}

/// Order-dependent accumulator; feed runs in index order for reproducible sums.
struct Aggregator {
    horizon: usize,
    regret_sums: Vec<f64>,
    cert_counts: Vec<u64>,
    finals: Vec<f64>,
    cert_rounds: Vec<u64>,
    correct: usize,
    diagnostics: Option<(DiagnosticsSummary, usize)>,
}

impl Aggregator {
    fn new(horizon: usize) -> Self {
        Self {
            horizon,
            regret_sums: vec![0.0; horizon],
            cert_counts: vec![0; horizon],
            finals: Vec::new(),
            cert_rounds: Vec::new(),
            correct: 0,
            diagnostics: None,
        }
    }

    fn push(&mut self, run: &RunResult) -> Result<()> {
        if run.cumulative_regret.len() != self.horizon {
            return Err(Error::Contract(format!(
                "run horizon {} differs from {}",
                run.cumulative_regret.len(),
                self.horizon
            )));
        }
        for (sum, r) in self.regret_sums.iter_mut().zip(&run.cumulative_regret) {
            *sum += r;
        }
        if let Some(round) = run.certification_round() {
            self.cert_rounds.push(round);
            self.cert_counts[round as usize - 1] += 1;
        }
        if run.certified_correctly() {
            self.correct += 1;
        }
        self.finals.push(run.final_regret());
        if let Some(d) = run.diagnostics {
            let (acc, held) = self.diagnostics.get_or_insert_with(Default::default);
            acc.lemma1_violations += d.lemma1_violations;
            acc.lemma2_violations += d.lemma2_violations;
            acc.lemma3_violations += d.lemma3_violations;
            if d.confidence_event_held {
                *held += 1;
                acc.violations_on_event += d.total_violations();
            }
        }
        Ok(())
    }

    fn trajectory(&self) -> Trajectory {
        let n = self.finals.len() as f64;
        let mut certified = 0u64;
        let certification_fraction = self
            .cert_counts
            .iter()
            .map(|&c| {
                certified += c;
                certified as f64 / n
            })
            .collect();
        Trajectory {
            mean_cumulative_regret: self.regret_sums.iter().map(|s| s / n).collect(),
            certification_fraction,
            median_certification_round: median(&self.cert_rounds),
        }
    }

    fn finish(self, label: String, policy: PolicyKind) -> BatchSummary {
        let runs = self.finals.len();
        let n = runs as f64;
        let regret_mean = self.finals.iter().sum::<f64>() / n;
        let regret_std = if runs > 1 {
            let ss: f64 = self.finals.iter().map(|x| (x - regret_mean).powi(2)).sum();
            (ss / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        let mean_certification_round = (!self.cert_rounds.is_empty()).then(|| {
            self.cert_rounds.iter().map(|&r| r as f64).sum::<f64>() / self.cert_rounds.len() as f64
        });
        let trajectory = self.trajectory();
        BatchSummary {
            label,
            policy,
            runs,
            horizon: self.horizon as u64,
            regret_mean,
            regret_std,
            certification_rate: self.correct as f64 / n,
            mean_certification_round,
            median_certification_round: trajectory.median_certification_round,
            final_regrets: self.finals,
            trajectory,
            diagnostics: self.diagnostics.map(|(mut d, held)| {
                d.omega_holds_rate = held as f64 / n;
                d
            }),
        }
    }
}

fn median(values: &[u64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable();
    let mid = sorted.len() / 2;
    Some(if sorted.len() % 2 == 1 {
        sorted[mid] as f64
    } else {
        (sorted[mid - 1] + sorted[mid]) as f64 / 2.0
    })
}

pub fn batch(
    instance: &BanditInstance,
    policy: PolicyKind,
    horizon: u64,
    runs: usize,
    base_seed: u64,
    options: BatchOptions,
) -> Result<Batch> {
    if runs == 0 {
        return Err(Error::invalid("runs", "at least one run is required"));
    }
    let scenario = Scenario::new(instance)?;
    let execute = |i: usize| {
        run_scenario(
            &scenario,
            policy,
            horizon,
            run_seed(base_seed, i as u64),
            options.diagnostics,
        )
    };

    let pool = match options.parallelism {
        1 => None,
        n => Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Contract(format!("thread pool: {e}")))?,
        ),
    };
    let chunk = pool.as_ref().map_or(1, |p| p.current_num_threads()) * 4;

    let mut agg = Aggregator::new(horizon as usize);
    let mut kept = Vec::new();
    for start in (0..runs).step_by(chunk) {
        let indices = start..(start + chunk).min(runs);
        let results: Vec<RunResult> = match &pool {
            Some(pool) => pool.install(|| indices.into_par_iter().map(execute).collect::<Result<_>>())?,
            None => indices.map(execute).collect::<Result<_>>()?,
        };
        for r in &results {
            agg.push(r)?;
        }
        if options.keep_runs {
            kept.extend(results);
        }
    }

    Ok(Batch {
        summary: agg.finish(instance.label().to_string(), policy),
        runs: kept,
    })
}

/// Per-round mean regret and certification fraction over `results`, which
/// must share one horizon.
pub fn trajectory_export(results: &[RunResult]) -> Result<Trajectory> {
    let first = results
        .first()
        .ok_or_else(|| Error::Contract("no runs to export".into()))?;
    let mut agg = Aggregator::new(first.cumulative_regret.len());
    for r in results {
        agg.push(r)?;
    }
    Ok(agg.trajectory())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environment::{duplicated_bernoulli, SyntheticFamily};

    fn fake_run(regret: Vec<f64>, cert: Option<u64>) -> RunResult {
        RunResult {
            policy: PolicyKind::Wgfc,
            seed: 0,
            actions: vec![0; regret.len()],
            pull_counts: vec![regret.len() as u64],
            cumulative_regret: regret,
            certification: cert.map(|round| Certification {
                arm: 0,
                objective: 0,
                round,
            }),
            certified_correct: cert.map(|_| true),
            diagnostics: None,
        }
    }

    #[test]
    fn warm_start_only_horizon() {
        let inst = SyntheticFamily::with_crowd(0.12, 1).build().unwrap();
        let scenario = Scenario::new(&inst).unwrap();
        let expected: f64 = scenario.analytics.pareto_gaps.iter().sum();
        for kind in PolicyKind::ALL {
            let r = run(&inst, kind, 20, 3, true).unwrap();
            assert_eq!(r.actions, (0..20).collect::<Vec<_>>());
            assert!((r.final_regret() - expected).abs() < 1e-12);
            assert_eq!(r.certification, None);
        }
    }

    #[test]
    fn rejects_short_horizon() {
        let inst = SyntheticFamily::default().build().unwrap();
        assert!(run(&inst, PolicyKind::Wgfc, 19, 0, false).is_err());
    }

    #[test]
    fn single_run_batch_has_zero_spread() {
        let inst = duplicated_bernoulli(4, 2, 0.25).unwrap();
        let b = batch(&inst, PolicyKind::Wgfc, 500, 1, 9, BatchOptions { keep_runs: true, ..Default::default() })
            .unwrap();
        assert_eq!(b.summary.regret_std, 0.0);
        assert_eq!(b.summary.regret_mean, b.runs[0].final_regret());
        assert_eq!(b.summary.trajectory.mean_cumulative_regret, b.runs[0].cumulative_regret);
    }

    #[test]
    fn batch_requires_a_run() {
        let inst = duplicated_bernoulli(4, 2, 0.25).unwrap();
        assert!(batch(&inst, PolicyKind::Wgfc, 100, 0, 0, BatchOptions::default()).is_err());
    }

    #[test]
    fn trajectory_of_certified_runs() {
        let runs = vec![
            fake_run(vec![1.0, 2.0, 2.0, 2.0], Some(2)),
            fake_run(vec![0.0, 1.0, 2.0, 2.0], Some(3)),
            fake_run(vec![1.0, 1.0, 1.0, 1.0], Some(1)),
        ];
        let t = trajectory_export(&runs).unwrap();
        assert_eq!(t.certification_fraction, vec![1.0 / 3.0, 2.0 / 3.0, 1.0, 1.0]);
        assert_eq!(t.median_certification_round, Some(2.0));
        assert_eq!(t.mean_cumulative_regret[3], 5.0 / 3.0);

        let single = trajectory_export(&runs[..1]).unwrap();
        assert_eq!(single.mean_cumulative_regret, runs[0].cumulative_regret);
    }

    #[test]
    fn trajectory_rejects_mixed_horizons() {
        let runs = vec![fake_run(vec![0.0; 3], None), fake_run(vec![0.0; 4], None)];
        assert!(trajectory_export(&runs).is_err());
        assert!(trajectory_export(&[]).is_err());
    }

    #[test]
    fn median_of_even_count() {
        assert_eq!(median(&[4, 1, 3, 2]), Some(2.5));
        assert_eq!(median(&[]), None);
    }
}
