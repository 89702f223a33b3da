//! Early stopping with an a-posteriori error certificate.
//!
//! When `||A D||_1 >= 2 γ ||D||_F²` holds for the step direction `D`, the
//! current iterate is within `(4γ/β) ||e||_1` of the truth.

use miht::bench::PlantedInstance;
use miht::rripcheck::estimate_constants;
use miht::{miht, InnerThreshold, MihtConfig, RngSeed, StopReason};

fn main() -> miht::Result<()> {
    let (n, r, s, m, gamma) = (5, 1, 1, 2000, 2.0);
    let probe = PlantedInstance::new(n, n, r, m, RngSeed(0))?;
    let est = estimate_constants(&probe.map, 4, 400, RngSeed(99))?;
    println!("estimated constants at order 4: alpha {:.3} beta {:.3} gamma {:.3}", est.alpha_hat, est.beta_hat, est.gamma_hat);

    let cfg = MihtConfig::new(r)
        .with_s(s)
        .with_t(InnerThreshold::Rank(s + r))
        .with_gamma(gamma)
        .with_condsri_stop(true);
    for (k, noise) in [1.0, 10.0, 100.0].into_iter().enumerate() {
        for trial in 0..4 {
            let inst = PlantedInstance::new(n, n, r, m, RngSeed(1000 + 10 * k as u64 + trial))?;
            let res = miht(&inst.map, &inst.measurements(noise), &cfg, None)?;
            let err = (&res.final_iterate - &inst.truth).frobenius_norm();
            let bound = 4.0 * gamma / est.beta_hat * noise;
            let note = if res.stop_reason == StopReason::CondsriTriggered { "certified" } else { "not triggered" };
            println!("||e||_1 = {noise:<5} n = {:>3}  error {err:.3e}  bound {bound:.3e}  {note}", res.iterations_used);
        }
    }
    Ok(())
}
