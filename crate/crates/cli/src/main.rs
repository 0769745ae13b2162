use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use momab_cli::{
    cmd_analyze, cmd_crowd_sweep, cmd_gap_sweep, cmd_lower_bound, cmd_run, CliError,
    ExperimentConfig, FileConfig, Overrides,
};

#[derive(Parser)]
#[command(name = "momab", version, about = "Multi-objective bandit experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured policies on one instance.
    Run(CommonArgs),
    /// Both policies across the dominated-arm gap grid.
    GapSweep(CommonArgs),
    /// Both policies across the number of near-frontier dominated arms.
    CrowdSweep(CommonArgs),
    /// Width-guided policy on duplicated-coordinate instances.
    LowerBound(CommonArgs),
    /// Print the instance geometry and bound coefficients.
    Analyze(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// TOML experiment configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    horizon: Option<u64>,
    /// Output directory (default: $MOMAB_OUT_DIR or ./out).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Track the confidence event and per-round inequality checks.
    #[arg(long)]
    diagnostics: bool,
    /// Worker threads; 0 uses every core.
    #[arg(long)]
    parallelism: Option<usize>,
    /// Policy to run (repeatable): wgfc, pareto-ucb1.
    #[arg(long = "policy")]
    policies: Vec<String>,
    /// Also write the per-round trajectory CSV (run only).
    #[arg(long)]
    trajectory: bool,
    /// Dominated-arm gap of the synthetic instance.
    #[arg(long)]
    delta: Option<f64>,
    /// Number of near-frontier dominated arms of the synthetic instance.
    #[arg(long)]
    m: Option<usize>,
}

impl CommonArgs {
    fn resolve(self) -> Result<ExperimentConfig, CliError> {
        let file = match &self.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        ExperimentConfig::resolve(
            file,
            Overrides {
                seed: self.seed,
                runs: self.runs,
                horizon: self.horizon,
                out: self.out,
                diagnostics: self.diagnostics,
                parallelism: self.parallelism,
                policies: self.policies,
                trajectory: self.trajectory,
                delta: self.delta,
                m: self.m,
            },
        )
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut stdout = std::io::stdout().lock();
    let result = match cli.command {
        Command::Run(args) => args.resolve().and_then(|c| cmd_run(&c, &mut stdout)),
        Command::GapSweep(args) => args.resolve().and_then(|c| cmd_gap_sweep(&c, &mut stdout)),
        Command::CrowdSweep(args) => args.resolve().and_then(|c| cmd_crowd_sweep(&c, &mut stdout)),
        Command::LowerBound(args) => args.resolve().and_then(|c| cmd_lower_bound(&c, &mut stdout)),
        Command::Analyze(args) => args.resolve().and_then(|c| cmd_analyze(&c, &mut stdout)),
    };
    match result {
        Ok(files) => {
            for f in files {
                eprintln!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
