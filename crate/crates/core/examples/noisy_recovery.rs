//! Recovery error grows linearly with the l1 norm of the measurement error.

use miht::bench::PlantedInstance;
use miht::{miht, MihtConfig, RngSeed};

fn main() -> miht::Result<()> {
    let inst = PlantedInstance::new(20, 20, 2, 400, RngSeed(11))?;
    let cfg = MihtConfig::new(2).with_max_iter(300);
    for eps in [0.0, 0.01, 0.02, 0.04, 0.08, 0.16] {
        let res = miht(&inst.map, &inst.measurements(eps), &cfg, None)?;
        let err = (&res.final_iterate - &inst.truth).frobenius_norm();
        let ratio = if eps > 0.0 { format!("{:.3}", err / eps) } else { "-".into() };
        println!("||e||_1 = {eps:<5}  ||X - X_n||_F = {err:.3e}  ratio = {ratio}");
    }
    Ok(())
}
