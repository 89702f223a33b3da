#![allow(dead_code)]

use miht::rng::standard_normal;
use miht::DenseMatrix;
use rand::Rng;

pub fn gaussian<R: Rng>(rng: &mut R, n1: usize, n2: usize) -> DenseMatrix {
    DenseMatrix::from_fn(n1, n2, |_, _| standard_normal(rng)).unwrap()
}

/// `G1 G2ᵀ` with `n1 × r` and `n2 × r` Gaussian factors.
pub fn low_rank<R: Rng>(rng: &mut R, n1: usize, n2: usize, r: usize) -> DenseMatrix {
    let g1 = gaussian(rng, n1, r);
    let g2 = gaussian(rng, n2, r);
    DenseMatrix::from_matrix(g1.as_matrix() * g2.as_matrix().transpose()).unwrap()
}

pub fn gaussian_vec<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| standard_normal(rng)).collect()
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
pub fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _sweep in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|(i, j)| i != j).map(|(i, j)| a[i][j] * a[i][j]).sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    eig.sort_by(|x, y| y.total_cmp(x));
    eig
}

/// `Σ_{k,l} A_kl B_kl` computed entry by entry.
pub fn frob_inner(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    let (n1, n2) = a.shape();
    let mut acc = 0.0;
    for i in 0..n1 {
        for j in 0..n2 {
            acc += a.get(i, j) * b.get(i, j);
        }
    }
    acc
}
