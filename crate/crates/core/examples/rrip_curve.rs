//! How the estimated RRIP constants of dense maps settle as m grows.

use miht::rripcheck::concentration_curve;
use miht::{Distribution, RngSeed};

fn main() -> miht::Result<()> {
    for dist in [Distribution::Gaussian, Distribution::Laplace] {
        let curve = concentration_curve(dist, 10, 1, &[20, 40, 80, 160], 5, 300, RngSeed(5))?;
        println!("{}", dist.label());
        for (m, median, max) in curve.summary() {
            println!("  m={m:<4} median gamma_hat {median:.3}  max {max:.3}");
        }
    }
    Ok(())
}
