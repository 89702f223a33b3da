//! Dense matrices, singular value decomposition, and rank-`k` hard
//! thresholding.
//!
//! `H_k(Z)` keeps the `k` leading singular triples of `Z`. When
//! `σ_k = σ_{k+1}` the first `k` triples in the order returned by the
//! decomposition are kept, which is deterministic for a given input.

use std::fmt::Write as _;
use std::ops::{Add, Mul, Neg, Sub};
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

const SVD_MAX_SWEEPS: usize = 10_000;

/// Real `n_rows × n_cols` matrix with finite entries.
///
/// Construction through the fallible constructors checks finiteness; the
/// arithmetic operators do not re-check, use [`DenseMatrix::is_finite`] where
/// overflow is a concern.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    inner: DMatrix<f64>,
}

impl DenseMatrix {
    /// Builds a matrix from entries in row-major order.
    pub fn new(n_rows: usize, n_cols: usize, row_major: &[f64]) -> Result<Self> {
        check_shape(n_rows, n_cols)?;
        if row_major.len() != n_rows * n_cols {
            return Err(Error::dims(
                format!("{} entries", n_rows * n_cols),
                format!("{} entries", row_major.len()),
            ));
        }
        Self::from_matrix(DMatrix::from_row_slice(n_rows, n_cols, row_major))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        check_shape(n_rows, n_cols)?;
        if let Some(bad) = rows.iter().find(|r| r.len() != n_cols) {
            return Err(Error::dims(format!("{n_cols} columns"), format!("{} columns", bad.len())));
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        Self::new(n_rows, n_cols, &flat)
    }

    pub fn from_matrix(inner: DMatrix<f64>) -> Result<Self> {
        check_shape(inner.nrows(), inner.ncols())?;
        if !inner.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("matrix entries"));
        }
        Ok(DenseMatrix { inner })
    }

    pub(crate) fn from_matrix_unchecked(inner: DMatrix<f64>) -> Self {
        debug_assert!(inner.nrows() >= 1 && inner.ncols() >= 1);
        DenseMatrix { inner }
    }

    /// Zero matrix. Panics if either dimension is zero.
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        assert!(n_rows >= 1 && n_cols >= 1, "matrix dimensions must be positive");
        DenseMatrix {
            inner: DMatrix::zeros(n_rows, n_cols),
        }
    }

    pub fn identity(n: usize) -> Self {
        assert!(n >= 1, "matrix dimensions must be positive");
        DenseMatrix {
            inner: DMatrix::identity(n, n),
        }
    }

    /// Square matrix with the given diagonal.
    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        check_shape(diag.len(), diag.len())?;
        Self::from_matrix(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    pub fn from_fn(n_rows: usize, n_cols: usize, f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        check_shape(n_rows, n_cols)?;
        Self::from_matrix(DMatrix::from_fn(n_rows, n_cols, f))
    }

    pub fn n_rows(&self) -> usize {
        self.inner.nrows()
    }

    pub fn n_cols(&self) -> usize {
        self.inner.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.inner.shape()
    }

    /// `min(n_rows, n_cols)`.
    pub fn min_dim(&self) -> usize {
        self.n_rows().min(self.n_cols())
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.inner[(row, col)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.inner
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.inner
    }

    pub fn row_major(&self) -> Vec<f64> {
        self.inner.transpose().as_slice().to_vec()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner.norm()
    }

    /// Frobenius inner product `⟨self, other⟩_F`. Panics on shape mismatch.
    pub fn inner(&self, other: &DenseMatrix) -> f64 {
        assert_eq!(self.shape(), other.shape(), "shape mismatch in inner product");
        self.inner.dot(&other.inner)
    }

    pub fn transpose(&self) -> DenseMatrix {
        DenseMatrix::from_matrix_unchecked(self.inner.transpose())
    }

    pub fn is_finite(&self) -> bool {
        self.inner.iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.inner.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.inner.iter().all(|&v| v == 0.0)
    }

    pub fn scale(&self, factor: f64) -> DenseMatrix {
        DenseMatrix::from_matrix_unchecked(&self.inner * factor)
    }

    /// Returns `self + factor * other`.
    pub fn add_scaled(&self, factor: f64, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.shape(), other.shape(), "shape mismatch in add_scaled");
        DenseMatrix::from_matrix_unchecked(&self.inner + &other.inner * factor)
    }

    /// CSV text: one line per row, no header, shortest exact form.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.n_rows() {
            for j in 0..self.n_cols() {
                if j > 0 {
                    out.push(',');
                }
                write!(out, "{}", fmt_f64(self.inner[(i, j)])).unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let rows = parse_csv_rows(text, 0)?;
        if rows.is_empty() {
            return Err(Error::parse(1, "no rows"));
        }
        Self::from_rows(&rows)
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_csv(&std::fs::read_to_string(path)?)
    }
}

fn check_shape(n_rows: usize, n_cols: usize) -> Result<()> {
    if n_rows == 0 || n_cols == 0 {
        return Err(Error::param(format!(
            "matrix dimensions must be positive, got {n_rows}x{n_cols}"
        )));
    }
    Ok(())
}

/// Shortest scientific notation that round-trips exactly.
pub(crate) fn fmt_f64(v: f64) -> String {
    format!("{v:e}")
}

/// Parses comma-separated rows of floats, skipping blank lines and `#`
/// comments. `line_offset` is added to reported line numbers.
pub(crate) fn parse_csv_rows(text: &str, line_offset: usize) -> Result<Vec<Vec<f64>>> {
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::parse(idx + 1 + line_offset, format!("{tok:?}: {e}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

impl Add for &DenseMatrix {
    type Output = DenseMatrix;
    fn add(self, rhs: &DenseMatrix) -> DenseMatrix {
        DenseMatrix::from_matrix_unchecked(&self.inner + &rhs.inner)
    }
}

impl Sub for &DenseMatrix {
    type Output = DenseMatrix;
    fn sub(self, rhs: &DenseMatrix) -> DenseMatrix {
        DenseMatrix::from_matrix_unchecked(&self.inner - &rhs.inner)
    }
}

impl Add for DenseMatrix {
    type Output = DenseMatrix;
    fn add(self, rhs: DenseMatrix) -> DenseMatrix {
        &self + &rhs
    }
}

impl Sub for DenseMatrix {
    type Output = DenseMatrix;
    fn sub(self, rhs: DenseMatrix) -> DenseMatrix {
        &self - &rhs
    }
}

impl Mul<f64> for &DenseMatrix {
    type Output = DenseMatrix;
    fn mul(self, rhs: f64) -> DenseMatrix {
        self.scale(rhs)
    }
}

impl Mul<f64> for DenseMatrix {
    type Output = DenseMatrix;
    fn mul(self, rhs: f64) -> DenseMatrix {
        self.scale(rhs)
    }
}

impl Neg for &DenseMatrix {
    type Output = DenseMatrix;
    fn neg(self) -> DenseMatrix {
        self.scale(-1.0)
    }
}

/// Thin SVD `Z = U diag(σ) Vᵀ` with `k = min(N1, N2)` and `σ` nonincreasing.
#[derive(Debug, Clone)]
pub struct SvdFactors {
    /// `N1 × k`, orthonormal columns.
    pub left_vectors: DMatrix<f64>,
    pub singular_values: Vec<f64>,
    /// `N2 × k`, orthonormal columns.
    pub right_vectors: DMatrix<f64>,
}

impl SvdFactors {
    pub fn len(&self) -> usize {
        self.singular_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.singular_values.is_empty()
    }

    /// `Σ_{ℓ<k} σ_ℓ u_ℓ v_ℓᵀ`; `k` is clamped to the number of triples.
    pub fn truncate(&self, k: usize) -> DenseMatrix {
        self.partial_sum(0, k)
    }

    /// `Σ_{from ≤ ℓ < to} σ_ℓ u_ℓ v_ℓᵀ`, i.e. `H_to(Z) − H_from(Z)`.
    pub fn partial_sum(&self, from: usize, to: usize) -> DenseMatrix {
        let n1 = self.left_vectors.nrows();
        let n2 = self.right_vectors.nrows();
        let to = to.min(self.len());
        if from >= to {
            return DenseMatrix::zeros(n1, n2);
        }
        let width = to - from;
        let mut u = self.left_vectors.columns(from, width).clone_owned();
        for (j, mut col) in u.column_iter_mut().enumerate() {
            col *= self.singular_values[from + j];
        }
        let v = self.right_vectors.columns(from, width);
        DenseMatrix::from_matrix_unchecked(u * v.transpose())
    }

    pub fn reconstruct(&self) -> DenseMatrix {
        self.truncate(self.len())
    }

    /// `sqrt(Σ_{from ≤ ℓ < to} σ_ℓ²)`.
    pub fn tail_norm(&self, from: usize, to: usize) -> f64 {
        let to = to.min(self.len());
        self.singular_values
            .get(from..to)
            .map_or(0.0, |s| s.iter().fold(0.0, |acc, v| acc + v * v).sqrt())
    }
}

/// Full thin SVD of `z`.
pub fn svd(z: &DenseMatrix) -> Result<SvdFactors> {
    let decomposition = nalgebra::SVD::try_new(z.inner.clone(), true, true, f64::EPSILON, SVD_MAX_SWEEPS)
        .ok_or_else(|| Error::Numerical(format!("SVD of {}x{} matrix did not converge", z.n_rows(), z.n_cols())))?;
    let u = decomposition.u.ok_or_else(|| Error::Numerical("SVD returned no left vectors".into()))?;
    let v_t = decomposition
        .v_t
        .ok_or_else(|| Error::Numerical("SVD returned no right vectors".into()))?;
    let singular_values: Vec<f64> = decomposition.singular_values.iter().copied().collect();
    if !singular_values.iter().all(|s| s.is_finite()) || !u.iter().all(|v| v.is_finite()) {
        return Err(Error::Numerical("SVD produced non-finite factors".into()));
    }
    Ok(SvdFactors {
        left_vectors: u,
        singular_values,
        right_vectors: v_t.transpose(),
    })
}

/// Singular values only, nonincreasing.
pub fn singular_values(z: &DenseMatrix) -> Result<Vec<f64>> {
    let decomposition = nalgebra::SVD::try_new(z.inner.clone(), false, false, f64::EPSILON, SVD_MAX_SWEEPS)
        .ok_or_else(|| Error::Numerical("singular value computation did not converge".into()))?;
    Ok(decomposition.singular_values.iter().copied().collect())
}

/// Best approximation of `z` by a matrix of rank at most `k`.
pub fn hard_threshold(z: &DenseMatrix, k: usize) -> Result<DenseMatrix> {
    let n = z.min_dim();
    if k > n {
        return Err(Error::param(format!("threshold rank {k} exceeds min(N1, N2) = {n}")));
    }
    if k == 0 {
        return Ok(DenseMatrix::zeros(z.n_rows(), z.n_cols()));
    }
    Ok(svd(z)?.truncate(k))
}

/// `η(κ) = 1 + sqrt(8 / (κ + 1))`, the loss factor of thresholding a
/// perturbed rank-`r` matrix at rank `s = κ r`.
pub fn eta(kappa: f64) -> Result<f64> {
    if !(kappa >= 1.0) || !kappa.is_finite() {
        return Err(Error::param(format!("eta requires kappa >= 1, got {kappa}")));
    }
    Ok(1.0 + (8.0 / (kappa + 1.0)).sqrt())
}

/// Componentwise sign with `sgn(0) = 0`.
pub fn sign_vector(u: &[f64]) -> Vec<f64> {
    u.iter()
        .map(|&v| {
            if v > 0.0 {
                1.0
            } else if v < 0.0 {
                -1.0
            } else {
                0.0
            }
        })
        .collect()
}

pub fn l1_norm(u: &[f64]) -> f64 {
    u.iter().fold(0.0, |acc, v| acc + v.abs())
}

pub fn l2_norm(u: &[f64]) -> f64 {
    u.iter().fold(0.0, |acc, v| acc + v * v).sqrt()
}

pub fn dot(u: &[f64], v: &[f64]) -> f64 {
    assert_eq!(u.len(), v.len(), "length mismatch in dot");
    u.iter().zip(v).fold(0.0, |acc, (a, b)| acc + a * b)
}
