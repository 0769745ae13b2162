//! Width-guided regret on duplicated-coordinate instances across gaps.

use momab::environment::duplicated_bernoulli;
use momab::{batch, BatchOptions, PolicyKind};

fn main() -> momab::Result<()> {
    let args: Vec<u64> = std::env::args().skip(1).map(|a| a.parse().expect("integer")).collect();
    let (arms, horizon) = match args.as_slice() {
        [k, t] => (*k as usize, *t),
        _ => (2, 100_000),
    };
    for delta_sc in [0.25, 0.125, 0.0625] {
        let instance = duplicated_bernoulli(arms, 2, delta_sc)?;
        let s = batch(&instance, PolicyKind::Wgfc, horizon, 10, 1, BatchOptions::default())?.summary;
        println!(
            "K={arms} T={horizon} delta_sc={delta_sc}: regret {:.2} ± {:.2}, cert rate {:.2}",
            s.regret_mean, s.regret_std, s.certification_rate
        );
    }
    Ok(())
}
