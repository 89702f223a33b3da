//! Rank-one and dense measurement maps: apply, adjoint, text format.

use miht::rripcheck::sample_rank_r;
use miht::{make_dense_map, make_rank_one_map, Distribution, MeasurementMap, RngSeed};

fn main() -> miht::Result<()> {
    let (n1, n2, m) = (6, 5, 40);
    let rank_one = make_rank_one_map(n1, n2, m, RngSeed(1))?;
    let dense = make_dense_map(n1, n2, m, Distribution::Laplace, RngSeed(2))?;

    let x = sample_rank_r(n1, n2, 2, RngSeed(3))?;
    let u: Vec<f64> = (0..m).map(|i| (i as f64 * 0.7).sin()).collect();

    for map in [&rank_one, &dense] {
        let ax = map.apply(&x)?;
        let lhs: f64 = ax.iter().zip(&u).map(|(a, b)| a * b).sum();
        let rhs = x.inner(&map.adjoint(&u)?);
        println!(
            "{:<9} ||A(X)||_1 = {:.4}   <A(X),u> = {:+.12}   <X,A*(u)> = {:+.12}",
            map.variant_label(),
            map.l1_response(&x)?,
            lhs,
            rhs
        );
    }

    let path = std::env::temp_dir().join("miht_rank_one_map.txt");
    rank_one.write(&path)?;
    let back = MeasurementMap::read(&path)?;
    println!("saved to {} and reloaded: identical = {}", path.display(), back == rank_one);
    Ok(())
}
