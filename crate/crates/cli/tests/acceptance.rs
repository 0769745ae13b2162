//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Run with `cargo test -p momab-cli --test acceptance`.

use std::path::Path;
use std::process::ExitCode;

use momab::environment::{BanditInstance, SyntheticFamily};
use momab::pareto::{analyze, bernoulli_kl, cpucb_coefficient, pareto_gap, theorem1_bound, MeanMatrix};
use momab::seeding::generator;
use momab::simulator::{batch, trajectory_export, Batch, BatchOptions};
use momab::PolicyKind;
use momab_cli::{cmd_crowd_sweep, cmd_gap_sweep, ExperimentConfig};
use rand::Rng;

const HORIZON: u64 = 10_000;
const RUNS: usize = 10;
const SEED: u64 = 1;

const C_PUCB_TOL: f64 = 0.01;
const ORACLE_TOL: f64 = 1e-9;
const KL_TOL: f64 = 1e-12;
const GEOMETRY_TOL: f64 = 1e-12;
const WGFC_REL_BAND: f64 = 0.25;
const WGFC_STD_BAND: f64 = 3.0;
const PUCB_REL_BAND: f64 = 0.35;
const CERT_ROUND_RANGE: (f64, f64) = (1e3, 6e3);

struct Reference {
    delta: f64,
    m: usize,
    cpucb: f64,
    wgfc: f64,
    pucb: f64,
}

const TABLE: [Reference; 8] = [
    Reference { delta: 0.12, m: 1, cpucb: 21.31, wgfc: 306.37, pucb: 877.07 },
    Reference { delta: 0.08, m: 1, cpucb: 22.26, wgfc: 299.76, pucb: 857.14 },
    Reference { delta: 0.04, m: 1, cpucb: 25.11, wgfc: 292.26, pucb: 824.02 },
    Reference { delta: 0.02, m: 1, cpucb: 30.82, wgfc: 294.95, pucb: 795.90 },
    Reference { delta: 0.01, m: 1, cpucb: 42.23, wgfc: 285.04, pucb: 762.65 },
    Reference { delta: 0.02, m: 4, cpucb: 61.64, wgfc: 247.88, pucb: 627.79 },
    Reference { delta: 0.02, m: 8, cpucb: 102.73, wgfc: 199.15, pucb: 475.75 },
    Reference { delta: 0.02, m: 12, cpucb: 143.82, wgfc: 147.15, pucb: 339.41 },
];

#[derive(Default)]
struct Report {
    failed: usize,
}

impl Report {
    fn check(&mut self, id: u32, name: &str, problems: Vec<String>, detail: String) {
        if problems.is_empty() {
            println!("criterion {id:>2} PASS  {name}: {detail}");
        } else {
            self.failed += 1;
            println!("criterion {id:>2} FAIL  {name}: {detail}");
            for p in problems {
                println!("              - {p}");
            }
        }
    }
}

fn instance(r: &Reference) -> BanditInstance {
    SyntheticFamily::with_crowd(r.delta, r.m).build().expect("valid family")
}

fn beats(x: &[f64], y: &[f64]) -> bool {
    x.iter().zip(y).all(|(a, b)| a >= b) && x.iter().zip(y).any(|(a, b)| a > b)
}

fn dominated_after_shift(means: &[Vec<f64>], arm: usize, eps: f64) -> bool {
    let lifted: Vec<f64> = means[arm].iter().map(|v| v + eps).collect();
    means.iter().any(|other| beats(other, &lifted))
}

/// Brute-force gap: grid scan at 1e-3 to bracket, then bisection.
fn epsilon_scan_gap(means: &[Vec<f64>], arm: usize) -> f64 {
    if !dominated_after_shift(means, arm, 0.0) {
        return 0.0;
    }
    let step = 1e-3;
    let mut hi = step;
    while dominated_after_shift(means, arm, hi) {
        hi += step;
    }
    let mut lo = hi - step;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if dominated_after_shift(means, arm, mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

fn coefficients(report: &mut Report) {
    let mut problems = Vec::new();
    let mut worst: f64 = 0.0;
    for r in &TABLE {
        let a = analyze(instance(r).means()).unwrap();
        let c = cpucb_coefficient(&a, HORIZON).unwrap();
        let err = (c.value - r.cpucb).abs();
        worst = worst.max(err);
        if err > C_PUCB_TOL {
            problems.push(format!("({}, {}): {:.4} vs {}", r.delta, r.m, c.value, r.cpucb));
        }
    }
    report.check(1, "C_PUCB coefficients", problems, format!("max abs error {worst:.5} (tol {C_PUCB_TOL})"));
}

fn geometry(report: &mut Report) {
    let mut problems = Vec::new();
    for r in &TABLE {
        let inst = instance(r);
        let a = analyze(inst.means()).unwrap();
        let key = format!("({}, {})", r.delta, r.m);
        if a.pareto_set.len() != 2 {
            problems.push(format!("{key}: |A*| = {}", a.pareto_set.len()));
        }
        if (a.champion_gap - 0.55).abs() > GEOMETRY_TOL {
            problems.push(format!("{key}: certification gap {}", a.champion_gap));
        }
        // Objectives are numbered from 0 here, so the first objective is 0.
        if a.champion_objective != 0 {
            problems.push(format!("{key}: champion objective {}", a.champion_objective));
        }
        for arm in 2..2 + r.m {
            if (a.pareto_gaps[arm] - r.delta).abs() > GEOMETRY_TOL {
                problems.push(format!("{key}: crowd arm {arm} gap {}", a.pareto_gaps[arm]));
            }
        }
        let rows = inst.means().to_rows();
        for arm in 2 + r.m..inst.arms() {
            let oracle = epsilon_scan_gap(&rows, arm);
            if (a.pareto_gaps[arm] - 0.20).abs() > GEOMETRY_TOL || (oracle - 0.20).abs() > ORACLE_TOL {
                problems.push(format!("{key}: baseline arm {arm} gap {} (oracle {oracle})", a.pareto_gaps[arm]));
            }
        }
    }
    report.check(
        2,
        "instance geometry",
        problems,
        "|A*| = 2, g = 0.55 on the first objective, crowd gap = delta, baseline gap = 0.20 on all 8 configurations".into(),
    );
}

fn oracle_equivalence(report: &mut Report) {
    let mut rng = generator(0xACCE55, 0);
    let mut problems = Vec::new();
    let mut worst: f64 = 0.0;
    for case in 0..1000 {
        let k = rng.gen_range(2..=6);
        let d = rng.gen_range(1..=4);
        // A coarse grid half the time so exact ties and weak dominance show up.
        let coarse = case % 2 == 0;
        let rows: Vec<Vec<f64>> = (0..k)
            .map(|_| {
                (0..d)
                    .map(|_| if coarse { rng.gen_range(0..=4) as f64 / 4.0 } else { rng.gen::<f64>() })
                    .collect()
            })
            .collect();
        let means = MeanMatrix::new(rows.clone()).unwrap();
        for arm in 0..k {
            let closed = pareto_gap(&means, arm).unwrap();
            let err = (closed - epsilon_scan_gap(&rows, arm)).abs();
            worst = worst.max(err);
            if err > ORACLE_TOL && problems.len() < 5 {
                problems.push(format!("case {case} arm {arm}: {rows:?}"));
            }
        }
    }
    report.check(3, "closed-form gap vs epsilon scan", problems, format!("1000 instances, max abs error {worst:.2e} (tol {ORACLE_TOL})"));
}

fn kl_identity(report: &mut Report) {
    let mut problems = Vec::new();
    let mut worst: f64 = 0.0;
    for i in 1..=100 {
        let delta = 0.25 * i as f64 / 100.0;
        let kl = bernoulli_kl(0.5, 0.5 + delta).unwrap();
        let closed = -0.5 * (1.0 - 4.0 * delta * delta).ln();
        let err = (kl - closed).abs();
        worst = worst.max(err);
        if err > KL_TOL {
            problems.push(format!("delta {delta}: {kl} vs {closed}"));
        }
    }
    report.check(4, "Bernoulli KL identity", problems, format!("100 points, max abs error {worst:.2e} (tol {KL_TOL})"));
}

struct Simulated {
    wgfc: Batch,
    pucb: Batch,
    bound: f64,
}

fn simulate() -> Vec<Simulated> {
    let options = BatchOptions {
        parallelism: 0,
        diagnostics: true,
        keep_runs: true,
    };
    TABLE
        .iter()
        .map(|r| {
            let inst = instance(r);
            Simulated {
                wgfc: batch(&inst, PolicyKind::Wgfc, HORIZON, RUNS, SEED, options).unwrap(),
                pucb: batch(&inst, PolicyKind::ParetoUcb1, HORIZON, RUNS, SEED, options).unwrap(),
                bound: theorem1_bound(&analyze(inst.means()).unwrap(), HORIZON).unwrap(),
            }
        })
        .collect()
}

fn wgfc_reproduction(report: &mut Report, sims: &[Simulated]) {
    let mut problems = Vec::new();
    let mut lines = Vec::new();
    let mut certified = 0;
    let mut total = 0;
    for (r, s) in TABLE.iter().zip(sims) {
        let sum = &s.wgfc.summary;
        let rel = (sum.regret_mean - r.wgfc) / r.wgfc;
        let within_rel = rel.abs() <= WGFC_REL_BAND;
        let within_std = (sum.regret_mean - r.wgfc).abs() <= WGFC_STD_BAND * sum.regret_std;
        if !(within_rel || within_std) {
            problems.push(format!("({}, {}): {:.2} vs {}", r.delta, r.m, sum.regret_mean, r.wgfc));
        }
        lines.push(format!("({}, {}) {:.2}±{:.2} [{:+.1}%]", r.delta, r.m, sum.regret_mean, sum.regret_std, 100.0 * rel));
        total += s.wgfc.runs.len();
        certified += s.wgfc.runs.iter().filter(|run| run.certified_correctly()).count();
    }
    if certified != total {
        problems.push(format!("{certified}/{total} runs certified correctly"));
    }
    report.check(
        5,
        "WGFC regret reproduction",
        problems,
        format!("{certified}/{total} certified correctly; {}", lines.join(", ")),
    );
}

fn baseline_ordering(report: &mut Report, sims: &[Simulated]) {
    let mut problems = Vec::new();
    let mut lines = Vec::new();
    for (r, s) in TABLE.iter().zip(sims) {
        let pucb = s.pucb.summary.regret_mean;
        let wgfc = s.wgfc.summary.regret_mean;
        let rel = (pucb - r.pucb) / r.pucb;
        if pucb <= wgfc {
            problems.push(format!("({}, {}): baseline {pucb:.2} <= wgfc {wgfc:.2}", r.delta, r.m));
        }
        if rel.abs() > PUCB_REL_BAND {
            problems.push(format!("({}, {}): baseline {pucb:.2} vs {}", r.delta, r.m, r.pucb));
        }
        lines.push(format!("({}, {}) {pucb:.2} [{:+.1}%]", r.delta, r.m, 100.0 * rel));
    }
    report.check(6, "baseline ordering", problems, lines.join(", "));
}

fn theorem_ceiling(report: &mut Report, sims: &[Simulated]) {
    let mut problems = Vec::new();
    for (r, s) in TABLE.iter().zip(sims) {
        if s.wgfc.summary.regret_mean > s.bound {
            problems.push(format!("({}, {}): {} > {}", r.delta, r.m, s.wgfc.summary.regret_mean, s.bound));
        }
    }
    let bound = sims.iter().map(|s| s.bound).fold(f64::INFINITY, f64::min);
    report.check(7, "regret bound ceiling", problems, format!("smallest bound {bound:.1}"));
}

fn lemma_diagnostics(report: &mut Report, sims: &[Simulated]) {
    let mut problems = Vec::new();
    let mut on_event = 0;
    let mut post_cert_rounds = 0u64;
    for (r, s) in TABLE.iter().zip(sims) {
        for run in &s.wgfc.runs {
            let d = run.diagnostics.expect("diagnostics enabled");
            if d.confidence_event_held {
                on_event += 1;
                if d.total_violations() != 0 {
                    problems.push(format!("({}, {}) seed {}: {d:?}", r.delta, r.m, run.seed));
                }
            }
            if let (Some(round), true) = (run.certification_round(), run.certified_correctly()) {
                let from = round as usize - 1;
                let before = if from == 0 { 0.0 } else { run.cumulative_regret[from - 1] };
                for (t, &c) in run.cumulative_regret.iter().enumerate().skip(from) {
                    post_cert_rounds += 1;
                    if c != before {
                        problems.push(format!("({}, {}) seed {}: regret moved at round {}", r.delta, r.m, run.seed, t + 1));
                        break;
                    }
                }
            }
        }
    }
    report.check(
        8,
        "lemma diagnostics",
        problems,
        format!("{on_event} runs on the confidence event, {post_cert_rounds} post-certification rounds with zero increment"),
    );
}

fn trajectory_shape(report: &mut Report, sims: &[Simulated]) {
    let index = TABLE.iter().position(|r| r.delta == 0.02 && r.m == 8).unwrap();
    let runs = &sims[index].wgfc.runs;
    let traj = trajectory_export(runs).unwrap();
    let mut problems = Vec::new();
    let reached = traj.certification_fraction.iter().position(|&f| f == 1.0);
    if reached.is_none() {
        problems.push("certification fraction never reaches 1.0".into());
    }
    let median = traj.median_certification_round;
    match median {
        Some(m) if (CERT_ROUND_RANGE.0..=CERT_ROUND_RANGE.1).contains(&m) => {}
        other => problems.push(format!("median certification round {other:?}")),
    }
    report.check(
        9,
        "trajectory shape (0.02, 8)",
        problems,
        format!(
            "fraction reaches 1.0 at round {}, median certification round {:?} (band {:?})",
            reached.map_or(0, |i| i + 1),
            median,
            CERT_ROUND_RANGE
        ),
    );
}

fn sweep_files(parallelism: usize, dir: &Path) -> Vec<(String, Vec<u8>)> {
    let cfg = ExperimentConfig {
        parallelism,
        diagnostics: true,
        out_dir: dir.to_path_buf(),
        out_explicit: true,
        ..ExperimentConfig::default()
    };
    let mut sink = std::io::sink();
    let mut files = cmd_gap_sweep(&cfg, &mut sink).unwrap();
    files.extend(cmd_crowd_sweep(&cfg, &mut sink).unwrap());
    files
        .into_iter()
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect()
}

fn reproducibility(report: &mut Report) {
    let mut outputs = Vec::new();
    for parallelism in [1, 1, 4, 4] {
        let dir = tempfile::tempdir().unwrap();
        outputs.push((parallelism, sweep_files(parallelism, dir.path())));
    }
    let (_, reference) = &outputs[0];
    let mut problems = Vec::new();
    for (parallelism, files) in &outputs[1..] {
        if files.len() != reference.len() {
            problems.push(format!("parallelism {parallelism}: {} files vs {}", files.len(), reference.len()));
        }
        for ((name, x), (_, y)) in files.iter().zip(reference) {
            if x != y {
                problems.push(format!("parallelism {parallelism}: {name} differs"));
            }
        }
    }
    report.check(
        10,
        "byte-identical sweep CSVs",
        problems,
        format!("{} files compared across 4 invocations (parallelism 1, 1, 4, 4)", reference.len()),
    );
}

fn main() -> ExitCode {
    let mut report = Report::default();
    coefficients(&mut report);
    geometry(&mut report);
    oracle_equivalence(&mut report);
    kl_identity(&mut report);
    let sims = simulate();
    wgfc_reproduction(&mut report, &sims);
    baseline_ordering(&mut report, &sims);
    theorem_ceiling(&mut report, &sims);
    lemma_diagnostics(&mut report, &sims);
    trajectory_shape(&mut report, &sims);
    reproducibility(&mut report);
    if report.failed == 0 {
        println!("acceptance: all 10 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {} of 10 criteria failed", report.failed);
        ExitCode::FAILURE
    }
}
