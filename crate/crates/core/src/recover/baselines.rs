//! Fixed-stepsize IHT and normalized IHT with the standard ℓ2 residual.

use nalgebra::DMatrix;

use super::{check_measurements, check_positive, drive, Advance, RecoveryResult, StopReason, Stopping, DEFAULT_TOL_RESIDUAL};
use crate::error::{Error, Result};
use crate::matana::{l1_norm, l2_norm, svd, DenseMatrix, SvdFactors};
use crate::measure::MeasurementMap;

/// Settings shared by the ℓ2 baselines. `tol` drives the iterate-change
/// test; the residual test uses [`DEFAULT_TOL_RESIDUAL`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaselineConfig {
    pub rank: usize,
    pub max_iter: usize,
    pub tol: f64,
}

impl BaselineConfig {
    pub fn new(rank: usize) -> Self {
        BaselineConfig {
            rank,
            max_iter: super::DEFAULT_MAX_ITER,
            tol: super::DEFAULT_TOL_CHANGE,
        }
    }

    fn validate(&self, map: &MeasurementMap) -> Result<()> {
        let (n1, n2) = map.domain_shape();
        if self.rank == 0 || self.rank > n1.min(n2) {
            return Err(Error::param(format!(
                "rank must be in 1..={}, got {}",
                n1.min(n2),
                self.rank
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::param("max_iter must be positive"));
        }
        check_positive("tol", self.tol)
    }

    fn stopping(&self, y: &[f64]) -> Stopping {
        Stopping {
            max_iter: self.max_iter,
            tol_residual_abs: DEFAULT_TOL_RESIDUAL * l1_norm(y),
            tol_change: self.tol,
        }
    }
}

/// `X_{n+1} = H_r(X_n + μ A*(y − A X_n))` with a fixed `μ > 0`.
pub fn iht_classic(
    map: &MeasurementMap,
    y: &[f64],
    cfg: &BaselineConfig,
    mu: f64,
    truth: Option<&DenseMatrix>,
) -> Result<RecoveryResult> {
    check_measurements(map, y, truth)?;
    cfg.validate(map)?;
    check_positive("mu", mu)?;
    let r = cfg.rank;
    drive(map, y, truth, cfg.stopping(y), r, |x, residual, _n| {
        let gradient = map.adjoint(residual)?;
        if gradient.is_zero() {
            return Ok(Advance::Stop(StopReason::MaxIter));
        }
        let iterate = svd(&x.add_scaled(mu, &gradient))?.truncate(r);
        Ok(Advance::Next { iterate, stepsize: mu })
    })
}

/// Normalized IHT: the step `μ_n = ‖P_n g‖_F² / ‖A(P_n g)‖_2²` with
/// `g = A*(y − A X_n)` and `P_n` the projection onto matrices whose column
/// space or row space lies in that of the current iterate. At `X_0 = 0` the
/// leading rank-`r` subspaces of `g` stand in for the iterate's.
pub fn niht(map: &MeasurementMap, y: &[f64], cfg: &BaselineConfig, truth: Option<&DenseMatrix>) -> Result<RecoveryResult> {
    check_measurements(map, y, truth)?;
    cfg.validate(map)?;
    let r = cfg.rank;
    // factors of the current iterate, carried over from the last truncation
    let mut current: Option<SvdFactors> = None;
    drive(map, y, truth, cfg.stopping(y), r, |x, residual, _n| {
        let gradient = map.adjoint(residual)?;
        if gradient.is_zero() {
            return Ok(Advance::Stop(StopReason::MaxIter));
        }
        let basis = match &current {
            Some(f) if !x.is_zero() => f.clone(),
            _ => svd(&gradient)?,
        };
        let projected = tangent_projection(&basis, r, &gradient);
        let num = projected.frobenius_norm().powi(2);
        let den = l2_norm(&map.apply(&projected)?).powi(2);
        if num == 0.0 || den == 0.0 {
            return Ok(Advance::Stop(StopReason::MaxIter));
        }
        let mu = num / den;
        let factors = svd(&x.add_scaled(mu, &gradient))?;
        let iterate = factors.truncate(r);
        current = Some(factors);
        Ok(Advance::Next { iterate, stepsize: mu })
    })
}

/// `U Uᵀ G + G V Vᵀ − U Uᵀ G V Vᵀ` with `U`, `V` the leading `r` singular
/// vectors of `basis`.
fn tangent_projection(basis: &SvdFactors, r: usize, g: &DenseMatrix) -> DenseMatrix {
    let r = r.min(basis.len());
    let u: DMatrix<f64> = basis.left_vectors.columns(0, r).clone_owned();
    let v: DMatrix<f64> = basis.right_vectors.columns(0, r).clone_owned();
    let g = g.as_matrix();
    let ug = &u * (u.transpose() * g);
    let gv = (g * &v) * v.transpose();
    let ugv = &u * ((u.transpose() * g) * &v) * v.transpose();
    DenseMatrix::from_matrix_unchecked(ug + gv - ugv)
}
