//! Monte-Carlo and exact l1 RRIP constants of small maps.

use miht::rripcheck::{estimate_constants, exact_alpha_unrestricted, exact_beta};
use miht::{make_dense_map, make_rank_one_map, Distribution, RngSeed};

fn main() -> miht::Result<()> {
    let map = make_rank_one_map(20, 20, 400, RngSeed(5))?;
    let est = estimate_constants(&map, 2, 2000, RngSeed(6))?;
    println!(
        "rank-one N=20 m=400, order 2: alpha {:.4} beta {:.4} gamma {:.4}",
        est.alpha_hat, est.beta_hat, est.gamma_hat
    );

    let dense = make_dense_map(20, 20, 400, Distribution::Laplace, RngSeed(5))?;
    let est = estimate_constants(&dense, 2, 2000, RngSeed(6))?;
    println!(
        "laplace  N=20 m=400, order 2: alpha {:.4} beta {:.4} gamma {:.4}",
        est.alpha_hat, est.beta_hat, est.gamma_hat
    );

    // Sampling gives alpha_hat >= alpha and beta_hat <= beta; exact
    // values exist for tiny maps.
    let tiny = make_rank_one_map(3, 3, 14, RngSeed(8))?;
    let est = estimate_constants(&tiny, 1, 5000, RngSeed(9))?;
    println!(
        "3x3 m=14 rank 1: sampled alpha {:.4} beta {:.4}  exact beta {:.4}  alpha lower bound {:.4}",
        est.alpha_hat,
        est.beta_hat,
        exact_beta(&tiny, 1)?,
        exact_alpha_unrestricted(&tiny)?
    );
    Ok(())
}
