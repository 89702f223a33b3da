//! Recover a planted rank-2 matrix with MIHT and the two baselines.
//!
//! `cargo run --release --example planted_recovery -- [seed]`

use miht::bench::PlantedInstance;
use miht::recover::DEFAULT_TOL_CHANGE;
use miht::{iht_classic, miht, niht, BaselineConfig, InnerThreshold, MihtConfig, RngSeed};

fn main() -> miht::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    let (n, r, m) = (20, 2, 400);
    let inst = PlantedInstance::new(n, n, r, m, RngSeed(seed))?;
    let y = inst.measurements(0.0);
    let truth = Some(&inst.truth);

    let default = miht(&inst.map, &y, &MihtConfig::new(r), truth)?;
    let narrow = miht(&inst.map, &y, &MihtConfig::new(r).with_t(InnerThreshold::Rank(2 * r)), truth)?;
    let base = BaselineConfig { rank: r, max_iter: 500, tol: DEFAULT_TOL_CHANGE };
    let normalized = niht(&inst.map, &y, &base, truth)?;
    let classic = iht_classic(&inst.map, &y, &base, 1.0 / m as f64, truth);

    let report = |name: &str, res: &miht::RecoveryResult| {
        let ratios = res.contraction_ratios();
        let mut sorted = ratios.clone();
        sorted.sort_by(f64::total_cmp);
        let med = sorted.get(sorted.len() / 2).copied().unwrap_or(f64::NAN);
        println!(
            "{name:<14} {:>4} iterations  {:<18} rel. error {:.2e}  median ratio {:.3}",
            res.iterations_used,
            res.stop_reason.label(),
            res.relative_error(&inst.truth),
            med
        );
    };
    report("MIHT (s,ALL)", &default);
    report("MIHT (s,2r)", &narrow);
    report("NIHT", &normalized);
    match classic {
        Ok(res) => report("IHT mu=1/m", &res),
        Err(e) => println!("IHT mu=1/m     {e}"),
    }

    let path = std::env::temp_dir().join("miht_trace.csv");
    default.write_trace_csv(&path)?;
    println!("MIHT trace written to {}", path.display());
    Ok(())
}
