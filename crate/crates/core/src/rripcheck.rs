//! Estimates of the ℓ1 rank-restricted isometry constants
//!
//! ```text
//! α_r ‖Z‖_F ≤ ‖A(Z)‖_1 ≤ β_r ‖Z‖_F   for all rank(Z) ≤ r,   γ_r = β_r / α_r.
//! ```
//!
//! [`estimate_constants`] samples unit-norm rank-`r` matrices. Its extremes
//! are interior to the true ones, so `alpha_hat ≥ α_r`, `beta_hat ≤ β_r`
//! and `gamma_hat` is a lower estimate of `γ_r`.
//!
//! For tiny maps [`exact_beta`] and [`exact_alpha_unrestricted`] compute
//! certified values by enumeration.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matana::{fmt_f64, svd, DenseMatrix};
use crate::measure::{make_dense_map, Distribution, MeasurementMap};
use crate::rng::{self, RngSeed};

#[derive(Debug, Clone, PartialEq)]
pub struct RripEstimate {
    pub order: usize,
    pub n_samples: usize,
    pub alpha_hat: f64,
    pub beta_hat: f64,
    /// Lower estimate of `γ_r`.
    pub gamma_hat: f64,
    pub sample_l1_values: Option<Vec<f64>>,
}

/// `G₁ G₂ᵀ / ‖G₁ G₂ᵀ‖_F` with i.i.d. standard normal `N1 × r` and `N2 × r`
/// factors.
pub fn sample_rank_r(n1: usize, n2: usize, r: usize, seed: RngSeed) -> Result<DenseMatrix> {
    if n1 == 0 || n2 == 0 || r == 0 || r > n1.min(n2) {
        return Err(Error::param(format!(
            "need 1 <= r <= min(N1, N2), got N1={n1} N2={n2} r={r}"
        )));
    }
    let mut rng = seed.rng();
    loop {
        let g1 = DMatrix::from_fn(n1, r, |_, _| rng::standard_normal(&mut rng));
        let g2 = DMatrix::from_fn(n2, r, |_, _| rng::standard_normal(&mut rng));
        let z = g1 * g2.transpose();
        let norm = z.norm();
        if norm > 0.0 && norm.is_finite() {
            return DenseMatrix::from_matrix(z / norm);
        }
    }
}

/// Monte-Carlo estimate from `n_samples` unit rank-`r` draws. Sample `i`
/// uses the stream `seed.derive(&[i])`.
pub fn estimate_constants(map: &MeasurementMap, r: usize, n_samples: usize, seed: RngSeed) -> Result<RripEstimate> {
    let mut est = estimate_constants_retaining(map, r, n_samples, seed)?;
    est.sample_l1_values = None;
    Ok(est)
}

/// As [`estimate_constants`], keeping every sampled `‖A(Z)‖_1`.
pub fn estimate_constants_retaining(
    map: &MeasurementMap,
    r: usize,
    n_samples: usize,
    seed: RngSeed,
) -> Result<RripEstimate> {
    if n_samples < 2 {
        return Err(Error::param(format!("need at least 2 samples, got {n_samples}")));
    }
    let (n1, n2) = map.domain_shape();
    let values = (0..n_samples)
        .into_par_iter()
        .map(|i| map.l1_response(&sample_rank_r(n1, n2, r, seed.derive(&[i as u64]))?))
        .collect::<Result<Vec<f64>>>()?;
    let alpha_hat = values.iter().copied().fold(f64::INFINITY, f64::min);
    let beta_hat = values.iter().copied().fold(0.0, f64::max);
    if !(alpha_hat > 0.0) {
        return Err(Error::Numerical("map annihilates a sampled low-rank matrix".into()));
    }
    Ok(RripEstimate {
        order: r,
        n_samples,
        alpha_hat,
        beta_hat,
        gamma_hat: beta_hat / alpha_hat,
        sample_l1_values: Some(values),
    })
}

/// Largest number of measurements accepted by the enumeration routines.
pub const MAX_ENUMERATION_MEASUREMENTS: usize = 22;

/// Exact `β_k = max_{w ∈ {±1}^m} ‖H_k(A* w)‖_F` by enumerating sign
/// vectors (up to the global sign flip).
pub fn exact_beta(map: &MeasurementMap, k: usize) -> Result<f64> {
    let m = map.measurement_count();
    let (n1, n2) = map.domain_shape();
    if m > MAX_ENUMERATION_MEASUREMENTS {
        return Err(Error::param(format!(
            "sign enumeration limited to m <= {MAX_ENUMERATION_MEASUREMENTS}, got {m}"
        )));
    }
    if k == 0 || k > n1.min(n2) {
        return Err(Error::param(format!("order must be in 1..={}, got {k}", n1.min(n2))));
    }
    let full = k >= n1.min(n2);
    let dyads: Vec<DenseMatrix> = (0..m)
        .map(|i| {
            let mut e = vec![0.0; m];
            e[i] = 1.0;
            map.adjoint(&e)
        })
        .collect::<Result<_>>()?;
    (0u64..1 << (m - 1))
        .into_par_iter()
        .map(|mask| {
            let mut sum = dyads[m - 1].clone();
            for (i, d) in dyads[..m - 1].iter().enumerate() {
                let sign = if mask >> i & 1 == 1 { -1.0 } else { 1.0 };
                sum = sum.add_scaled(sign, d);
            }
            if full {
                Ok(sum.frobenius_norm())
            } else {
                Ok(svd(&sum)?.tail_norm(0, k))
            }
        })
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}

/// Exact `min_{Z ≠ 0} ‖A(Z)‖_1 / ‖Z‖_F` over all matrices, which is a lower
/// bound for every `α_r`. Needs `m ≥ N1 N2`.
///
/// The minimum over the unit sphere is attained at a vertex of the polytope
/// `{z : ‖M z‖_1 ≤ 1}`, and vertex directions annihilate `N1 N2 − 1`
/// linearly independent rows of the matrix `M` of the map, so enumerating
/// those row subsets is exhaustive.
pub fn exact_alpha_unrestricted(map: &MeasurementMap) -> Result<f64> {
    let m = map.measurement_count();
    let (n1, n2) = map.domain_shape();
    let n = n1 * n2;
    if m < n {
        return Ok(0.0);
    }
    if m > MAX_ENUMERATION_MEASUREMENTS {
        return Err(Error::param(format!(
            "vertex enumeration limited to m <= {MAX_ENUMERATION_MEASUREMENTS}, got {m}"
        )));
    }
    let rows = map_matrix(map)?;
    if n == 1 {
        return Ok(rows.iter().map(|v| v.abs()).sum());
    }
    let alpha = combinations(m, n - 1)
        .into_par_iter()
        .filter_map(|subset| {
            // zero-padded to n x n so the decomposition exposes the null direction
            let padded = DMatrix::from_fn(n, n, |i, j| if i < n - 1 { rows[(subset[i], j)] } else { 0.0 });
            let dec = nalgebra::SVD::new(padded, false, true);
            let v_t = dec.v_t?;
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| dec.singular_values[a].total_cmp(&dec.singular_values[b]));
            let largest = dec.singular_values[order[n - 1]];
            // rank-deficient subsets have no unique null ray
            if dec.singular_values[order[1]] <= 1e-10 * largest {
                return None;
            }
            let z = v_t.row(order[0]).transpose();
            Some((&rows * z).iter().map(|v| v.abs()).sum::<f64>())
        })
        .reduce(|| f64::INFINITY, f64::min);
    if alpha.is_finite() {
        Ok(alpha)
    } else {
        Err(Error::Numerical("no admissible vertex found".into()))
    }
}

/// `m × (N1 N2)` matrix of the map acting on row-major `vec(Z)`.
pub fn map_matrix(map: &MeasurementMap) -> Result<DMatrix<f64>> {
    let (n1, n2) = map.domain_shape();
    let m = map.measurement_count();
    let mut out = DMatrix::zeros(m, n1 * n2);
    for k in 0..n1 {
        for l in 0..n2 {
            let e = DenseMatrix::from_fn(n1, n2, |i, j| if (i, j) == (k, l) { 1.0 } else { 0.0 })?;
            for (i, v) in map.apply(&e)?.into_iter().enumerate() {
                out[(i, k * n2 + l)] = v;
            }
        }
    }
    Ok(out)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(current.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if current[i] != i + n - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        current[i] += 1;
        for j in i + 1..k {
            current[j] = current[j - 1] + 1;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveRow {
    pub m: usize,
    pub trial: usize,
    pub alpha_hat: f64,
    pub beta_hat: f64,
    pub gamma_hat: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConcentrationCurve {
    pub dist: Distribution,
    pub n: usize,
    pub r: usize,
    pub rows: Vec<CurveRow>,
}

impl ConcentrationCurve {
    /// `(m, median gamma_hat, max gamma_hat)` per measurement count, in the
    /// order the counts were requested.
    pub fn summary(&self) -> Vec<(usize, f64, f64)> {
        let mut ms: Vec<usize> = Vec::new();
        for row in &self.rows {
            if !ms.contains(&row.m) {
                ms.push(row.m);
            }
        }
        ms.into_iter()
            .map(|m| {
                let gammas: Vec<f64> = self.rows.iter().filter(|r| r.m == m).map(|r| r.gamma_hat).collect();
                let max = gammas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                (m, median(&gammas), max)
            })
            .collect()
    }

    /// Columns `m,trial,alpha_hat,beta_hat,gamma_hat`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,trial,alpha_hat,beta_hat,gamma_hat\n");
        for row in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{}",
                row.m,
                row.trial,
                fmt_f64(row.alpha_hat),
                fmt_f64(row.beta_hat),
                fmt_f64(row.gamma_hat)
            )
            .unwrap();
        }
        out
    }
}

/// Builds a fresh `N × N` dense map for every `(m, trial)` and records its
/// estimated constants at order `r` from `n_samples` draws.
pub fn concentration_curve(
    dist: Distribution,
    n: usize,
    r: usize,
    m_values: &[usize],
    trials: usize,
    n_samples: usize,
    seed: RngSeed,
) -> Result<ConcentrationCurve> {
    if m_values.is_empty() {
        return Err(Error::param("m_values must be nonempty"));
    }
    if trials == 0 {
        return Err(Error::param("trials must be positive"));
    }
    let jobs: Vec<(usize, usize)> = m_values
        .iter()
        .flat_map(|&m| (0..trials).map(move |t| (m, t)))
        .collect();
    let rows = jobs
        .into_par_iter()
        .map(|(m, trial)| {
            let map = make_dense_map(n, n, m, dist, seed.derive(&[m as u64, trial as u64, 0]))?;
            let est = estimate_constants(&map, r, n_samples, seed.derive(&[m as u64, trial as u64, 1]))?;
            Ok(CurveRow {
                m,
                trial,
                alpha_hat: est.alpha_hat,
                beta_hat: est.beta_hat,
                gamma_hat: est.gamma_hat,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConcentrationCurve { dist, n, r, rows })
}

pub(crate) fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    }
}
