//! Prints the synthetic-family comparison at T = 10^4 with 10 runs.

use momab::pareto::{analyze, cpucb_coefficient};
use momab::{batch, BatchOptions, PolicyKind, SyntheticFamily};

fn main() -> momab::Result<()> {
    let rows = [(0.12, 1), (0.08, 1), (0.04, 1), (0.02, 1), (0.01, 1), (0.02, 4), (0.02, 8), (0.02, 12)];
    let options = BatchOptions { parallelism: 0, diagnostics: true, keep_runs: false };
    println!("delta     m  C_PUCB   pucb_mean  pucb_std  wgfc_mean  wgfc_std  cert  median_cert");
    for (delta, m) in rows {
        let instance = SyntheticFamily::with_crowd(delta, m).build()?;
        let c = cpucb_coefficient(&analyze(instance.means())?, 10_000)?;
        let pucb = batch(&instance, PolicyKind::ParetoUcb1, 10_000, 10, 1, options)?.summary;
        let wgfc = batch(&instance, PolicyKind::Wgfc, 10_000, 10, 1, options)?.summary;
        println!(
            "{delta:<8} {m:>2} {:>7.2} {:>11.2} {:>9.2} {:>10.2} {:>9.2} {:>5.2} {:>8.1?} {:?}",
            c.value,
            pucb.regret_mean,
            pucb.regret_std,
            wgfc.regret_mean,
            wgfc.regret_std,
            wgfc.certification_rate,
            wgfc.median_certification_round,
            wgfc.diagnostics,
        );
    }
    Ok(())
}
