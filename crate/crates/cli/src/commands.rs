use std::io::Write;
use std::path::PathBuf;

use momab::environment::{duplicated_bernoulli, BanditInstance, SyntheticFamily};
use momab::pareto::{analyze, cpucb_coefficient, lower_bound_constant, theorem1_bound, Cpucb};
use momab::simulator::BatchSummary;
use momab::{batch, PolicyKind};

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::{
    optional_real, real, summary_row, trajectory_table, Table, LOWER_BOUND_HEADER, SUMMARY_HEADER,
    SWEEP_HEADER,
};

type Result<T> = std::result::Result<T, CliError>;

fn say(out: &mut dyn Write, line: impl AsRef<str>) -> Result<()> {
    writeln!(out, "{}", line.as_ref()).map_err(|source| CliError::Io {
        path: PathBuf::from("<stdout>"),
        source,
    })
}

fn percent(rate: f64) -> String {
    format!("{:.1}%", 100.0 * rate)
}

fn run_batch(
    cfg: &ExperimentConfig,
    instance: &BanditInstance,
    policy: PolicyKind,
    label: &str,
) -> Result<BatchSummary> {
    let mut summary = batch(instance, policy, cfg.horizon, cfg.runs, cfg.seed, cfg.options())?.summary;
    summary.label = label.to_string();
    Ok(summary)
}

/// Runs every configured policy on the configured instance; writes
/// `summary.csv` and, when requested, `trajectory.csv`.
pub fn cmd_run(cfg: &ExperimentConfig, out: &mut dyn Write) -> Result<Vec<PathBuf>> {
    let instance = cfg.build_instance()?;
    let label = cfg.label.clone().unwrap_or_else(|| instance.label().to_string());

    let mut table = Table::new(&SUMMARY_HEADER);
    let mut summaries = Vec::new();
    for &policy in &cfg.policies {
        let summary = run_batch(cfg, &instance, policy, &label)?;
        let mut line = format!(
            "{label} {policy}: regret {:.2} ± {:.2} over {} runs (T={})",
            summary.regret_mean, summary.regret_std, summary.runs, summary.horizon
        );
        if policy == PolicyKind::Wgfc {
            line.push_str(&format!(", cert rate {}", percent(summary.certification_rate)));
        }
        say(out, line)?;
        table.row(&summary_row(&summary));
        summaries.push(summary);
    }

    let mut files = vec![table.write(&cfg.out_dir, "summary.csv")?];
    if cfg.trajectory {
        let find = |kind| {
            summaries
                .iter()
                .find(|s| s.policy == kind)
                .map(|s| &s.trajectory)
        };
        let traj = trajectory_table(find(PolicyKind::Wgfc), find(PolicyKind::ParetoUcb1));
        files.push(traj.write(&cfg.out_dir, "trajectory.csv")?);
    }
    Ok(files)
}

/// One configuration of a synthetic-family sweep.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub delta: f64,
    pub m: usize,
    pub cpucb: Cpucb,
    pub pucb: BatchSummary,
    pub wgfc: BatchSummary,
}

pub fn sweep_rows(cfg: &ExperimentConfig, grid: &[(f64, usize)]) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::with_capacity(grid.len());
    for &(delta, m) in grid {
        let family = SyntheticFamily {
            delta,
            crowd: m,
            arms: cfg.sweep.arms,
            ..SyntheticFamily::default()
        };
        let instance = family
            .build()
            .map_err(|e| CliError::Config(format!("sweep instance (delta={delta}, m={m}): {e}")))?;
        cfg.check_horizon(&instance)?;
        let cpucb = cpucb_coefficient(&analyze(instance.means())?, cfg.horizon)?;
        let label = instance.label().to_string();
        rows.push(SweepRow {
            delta,
            m,
            cpucb,
            pucb: run_batch(cfg, &instance, PolicyKind::ParetoUcb1, &label)?,
            wgfc: run_batch(cfg, &instance, PolicyKind::Wgfc, &label)?,
        });
    }
    Ok(rows)
}

pub fn sweep_table(rows: &[SweepRow]) -> Table {
    let mut table = Table::new(&SWEEP_HEADER);
    for r in rows {
        table.row(&[
            real(r.delta),
            r.m.to_string(),
            real(r.cpucb.value),
            real(r.pucb.regret_mean),
            real(r.pucb.regret_std),
            real(r.wgfc.regret_mean),
            real(r.wgfc.regret_std),
            real(r.wgfc.certification_rate),
        ]);
    }
    table
}

/// Long-format plot data: the coefficient as a dashed series and realized
/// regret of each policy as solid series.
fn plot_table(rows: &[SweepRow]) -> Table {
    let mut table = Table::new(&["delta", "m", "series", "style", "value"]);
    for r in rows {
        let key = [real(r.delta), r.m.to_string()];
        for (series, style, value) in [
            ("C_PUCB", "dashed", r.cpucb.value),
            (PolicyKind::ParetoUcb1.name(), "solid", r.pucb.regret_mean),
            (PolicyKind::Wgfc.name(), "solid", r.wgfc.regret_mean),
        ] {
            table.row(&[
                key[0].clone(),
                key[1].clone(),
                series.to_string(),
                style.to_string(),
                real(value),
            ]);
        }
    }
    table
}

fn certification_table(rows: &[SweepRow]) -> Table {
    let mut table = Table::new(&["delta", "m", "cert_rate", "median_cert_round", "mean_cert_round"]);
    for r in rows {
        table.row(&[
            real(r.delta),
            r.m.to_string(),
            real(r.wgfc.certification_rate),
            optional_real(r.wgfc.median_certification_round),
            optional_real(r.wgfc.mean_certification_round),
        ]);
    }
    table
}

fn write_sweep(
    cfg: &ExperimentConfig,
    prefix: &str,
    grid: &[(f64, usize)],
    out: &mut dyn Write,
) -> Result<Vec<PathBuf>> {
    let rows = sweep_rows(cfg, grid)?;
    for r in &rows {
        say(
            out,
            format!(
                "delta={} m={}: C_PUCB {:.2}{}, pareto-ucb1 {:.2} ± {:.2}, wgfc {:.2} ± {:.2}, cert rate {}",
                r.delta,
                r.m,
                r.cpucb.value,
                if r.cpucb.exceeds_theorem_constant() { " (> 64)" } else { "" },
                r.pucb.regret_mean,
                r.pucb.regret_std,
                r.wgfc.regret_mean,
                r.wgfc.regret_std,
                percent(r.wgfc.certification_rate),
            ),
        )?;
    }

    let dir = &cfg.out_dir;
    let mut files = vec![
        sweep_table(&rows).write(dir, &format!("{prefix}.csv"))?,
        plot_table(&rows).write(dir, &format!("{prefix}_plot.csv"))?,
        certification_table(&rows).write(dir, &format!("{prefix}_certification.csv"))?,
    ];
    let mut summary = Table::new(&SUMMARY_HEADER);
    for r in &rows {
        summary.row(&summary_row(&r.pucb));
        summary.row(&summary_row(&r.wgfc));
        let traj = trajectory_table(Some(&r.wgfc.trajectory), Some(&r.pucb.trajectory));
        files.push(traj.write(dir, &format!("{prefix}_trajectory_delta{}_m{}.csv", r.delta, r.m))?);
    }
    files.push(summary.write(dir, &format!("{prefix}_summary.csv"))?);
    Ok(files)
}

/// Both policies on the `m`-fixed family across the configured gaps.
pub fn cmd_gap_sweep(cfg: &ExperimentConfig, out: &mut dyn Write) -> Result<Vec<PathBuf>> {
    let grid: Vec<_> = cfg.sweep.deltas.iter().map(|&d| (d, cfg.sweep.gap_m)).collect();
    write_sweep(cfg, "gap_sweep", &grid, out)
}

/// Both policies on the `delta`-fixed family across the configured crowd sizes.
pub fn cmd_crowd_sweep(cfg: &ExperimentConfig, out: &mut dyn Write) -> Result<Vec<PathBuf>> {
    let grid: Vec<_> = cfg.sweep.crowd.iter().map(|&m| (cfg.sweep.crowd_delta, m)).collect();
    write_sweep(cfg, "crowd_sweep", &grid, out)
}

#[derive(Debug, Clone)]
pub struct LowerBoundRow {
    pub delta_sc: f64,
    pub summary: BatchSummary,
    pub regret_over_log_t: f64,
    pub lower_bound_constant: f64,
    pub theorem1_bound: f64,
}

pub fn lower_bound_rows(cfg: &ExperimentConfig) -> Result<Vec<LowerBoundRow>> {
    let spec = &cfg.lower_bound;
    let mut rows = Vec::with_capacity(spec.delta_sc.len());
    for &delta_sc in &spec.delta_sc {
        let instance = duplicated_bernoulli(spec.arms, spec.objectives, delta_sc)
            .map_err(|e| CliError::Config(format!("lower-bound instance: {e}")))?;
        cfg.check_horizon(&instance)?;
        let analytics = analyze(instance.means())?;
        let summary = run_batch(cfg, &instance, PolicyKind::Wgfc, instance.label())?;
        rows.push(LowerBoundRow {
            delta_sc,
            regret_over_log_t: summary.regret_mean / (cfg.horizon as f64).ln(),
            lower_bound_constant: lower_bound_constant(spec.arms, delta_sc)?,
            theorem1_bound: theorem1_bound(&analytics, cfg.horizon)?,
            summary,
        });
    }
    Ok(rows)
}

/// The width-guided policy on duplicated-coordinate instances across the
/// configured `delta_sc` grid.
pub fn cmd_lower_bound(cfg: &ExperimentConfig, out: &mut dyn Write) -> Result<Vec<PathBuf>> {
    let rows = lower_bound_rows(cfg)?;
    let mut table = Table::new(&LOWER_BOUND_HEADER);
    let mut summary = Table::new(&SUMMARY_HEADER);
    for r in &rows {
        say(
            out,
            format!(
                "delta_sc={}: regret {:.2} ({:.3} per ln T), floor constant {:.3}, bound {:.1}",
                r.delta_sc,
                r.summary.regret_mean,
                r.regret_over_log_t,
                r.lower_bound_constant,
                r.theorem1_bound
            ),
        )?;
        table.row(&[
            real(r.delta_sc),
            real(r.summary.regret_mean),
            real(r.regret_over_log_t),
            real(r.lower_bound_constant),
            real(r.theorem1_bound),
        ]);
        summary.row(&summary_row(&r.summary));
    }
    Ok(vec![
        table.write(&cfg.out_dir, "lower_bound.csv")?,
        summary.write(&cfg.out_dir, "lower_bound_summary.csv")?,
    ])
}

fn list<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items
        .into_iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

/// Text report of the instance geometry and the theory-side quantities.
pub fn analysis_report(cfg: &ExperimentConfig) -> Result<String> {
    let instance = cfg.instance.build()?;
    let a = analyze(instance.means())?;
    let mut lines = vec![
        format!("instance: {}", instance.label()),
        format!("reward model: {}", instance.reward_model()),
        format!("arms (K): {}  objectives (d): {}  horizon (T): {}", a.num_arms, a.num_objectives, cfg.horizon),
        "arms and objectives are numbered from 0".to_string(),
        format!("pareto set: {{{}}} (size {})", list(&a.pareto_set), a.pareto_set.len()),
        format!("pareto gaps: [{}]", list(a.pareto_gaps.iter().map(|&g| real(g)))),
        format!("delta_max: {}", real(a.delta_max)),
        format!(
            "delta_min: {}",
            a.delta_min.map(real).unwrap_or_else(|| "none (every arm is Pareto-optimal)".into())
        ),
        format!(
            "objective winners: [{}]",
            list(a.objective_winners.iter().map(|w| w.map_or("tie".to_string(), |a| a.to_string())))
        ),
        format!("objective gaps: [{}]", list(a.objective_gaps.iter().map(|&g| real(g)))),
        format!("unique winners: {}", a.unique_winners),
    ];
    if a.unique_winners {
        lines.push(format!("champion objective: {}", a.champion_objective));
        lines.push(format!("certification gap: {}", real(a.champion_gap)));
        lines.push(format!("regret bound: {}", real(theorem1_bound(&a, cfg.horizon)?)));
        match cpucb_coefficient(&a, cfg.horizon) {
            Ok(c) if c.empty_sum => lines.push("C_PUCB: 0 (empty dominated-arm sum)".into()),
            Ok(c) => lines.push(format!(
                "C_PUCB: {} (64 < C_PUCB: {})",
                real(c.value),
                c.exceeds_theorem_constant()
            )),
            Err(e) => lines.push(format!("C_PUCB: undefined ({e})")),
        }
    } else {
        lines.push("certification-gap quantities suppressed: some objective has tied winners".into());
    }
    let mut text = lines.join("\n");
    text.push('\n');
    Ok(text)
}

pub fn cmd_analyze(cfg: &ExperimentConfig, out: &mut dyn Write) -> Result<Vec<PathBuf>> {
    let report = analysis_report(cfg)?;
    write!(out, "{report}").map_err(|source| CliError::Io {
        path: PathBuf::from("<stdout>"),
        source,
    })?;
    if !cfg.out_explicit {
        return Ok(Vec::new());
    }
    std::fs::create_dir_all(&cfg.out_dir).map_err(|source| CliError::Io {
        path: cfg.out_dir.clone(),
        source,
    })?;
    let path = cfg.out_dir.join("analysis.txt");
    std::fs::write(&path, report).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(vec![path])
}
