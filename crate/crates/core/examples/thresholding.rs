//! Best rank-k approximation and the thresholding error factor.

use miht::{eta, hard_threshold, sign_vector, svd, DenseMatrix};

fn main() -> miht::Result<()> {
    let z = DenseMatrix::from_rows(&[
        vec![4.0, 1.0, 0.0, 2.0],
        vec![1.0, 3.0, 1.0, 0.0],
        vec![0.0, 1.0, 2.0, 1.0],
    ])?;
    let factors = svd(&z)?;
    println!("singular values: {:?}", factors.singular_values);

    for k in 0..=3 {
        let hk = hard_threshold(&z, k)?;
        let tail = factors.tail_norm(k, usize::MAX);
        println!("k={k}  ||Z - H_k(Z)||_F = {:.6}  tail = {:.6}", (&z - &hk).frobenius_norm(), tail);
    }

    for kappa in [1.0, 2.0, 4.0, 16.0, 100.0] {
        println!("eta({kappa}) = {:.4}", eta(kappa)?);
    }

    // Projecting onto a subspace that contains X does not give a
    // rank-1 result, while H_1 does.
    let c = 0.5;
    let pz = DenseMatrix::from_rows(&[vec![3.0, c], vec![c, c]])?;
    println!("rank of P_T Z: {}", svd(&pz)?.singular_values.iter().filter(|s| **s > 1e-12).count());

    println!("sgn([-2, 0, 3.5]) = {:?}", sign_vector(&[-2.0, 0.0, 3.5]));
    Ok(())
}
