use super::{check_measurements, drive, Advance, MihtConfig, RecoveryResult, StepsizePolicy, StopReason, Stopping};
use crate::error::Result;
use crate::matana::{hard_threshold, l1_norm, sign_vector, svd, DenseMatrix};
use crate::measure::MeasurementMap;

/// One MIHT step computed at `X_n`.
#[derive(Debug, Clone)]
pub struct Step {
    /// `μ_n`.
    pub mu: f64,
    /// `‖A D‖_1 ≥ 2γ ‖D‖_F²`: the second term of the stepsize denominator
    /// dominates and the current iterate already meets the error bound.
    pub condsri_hit: bool,
    /// `D = H_t(A* sgn(y − A X_n))`.
    pub direction: DenseMatrix,
    pub residual_l1: f64,
}

/// Stepsize and search direction at `xn`. Returns `None` when the direction
/// vanishes (zero residual or stagnation).
pub fn stepsize(map: &MeasurementMap, y: &[f64], xn: &DenseMatrix, cfg: &MihtConfig) -> Result<Option<Step>> {
    check_measurements(map, y, Some(xn))?;
    let (n1, n2) = map.domain_shape();
    cfg.validate(n1, n2)?;
    let ax = map.apply(xn)?;
    let residual: Vec<f64> = y.iter().zip(&ax).map(|(a, b)| a - b).collect();
    step_from_residual(map, &residual, cfg)
}

pub(super) fn step_from_residual(map: &MeasurementMap, residual: &[f64], cfg: &MihtConfig) -> Result<Option<Step>> {
    let (n1, n2) = map.domain_shape();
    let t = cfg.thresh_t.resolve(n1.min(n2));
    let signed = map.adjoint(&sign_vector(residual))?;
    let direction = if t >= n1.min(n2) { signed } else { hard_threshold(&signed, t)? };

    let dir_sq = direction.frobenius_norm().powi(2);
    if dir_sq == 0.0 {
        return Ok(None);
    }
    let response = map.l1_response(&direction)?;
    let residual_l1 = l1_norm(residual);
    let gamma = cfg.gamma;
    let condsri_hit = response >= 2.0 * gamma * dir_sq;
    let mu = match cfg.stepsize_policy {
        StepsizePolicy::Adaptive => {
            let second = response * response / (4.0 * gamma * gamma * dir_sq);
            residual_l1 / dir_sq.max(second)
        }
        StepsizePolicy::Fixed { beta } => residual_l1 / (beta * beta),
    };
    Ok(Some(Step {
        mu,
        condsri_hit,
        direction,
        residual_l1,
    }))
}

/// Modified iterative hard thresholding
/// `X_{n+1} = H_s(X_n + μ_n H_t(A* sgn(y − A X_n)))` from `X_0 = 0`.
pub fn miht(map: &MeasurementMap, y: &[f64], cfg: &MihtConfig, truth: Option<&DenseMatrix>) -> Result<RecoveryResult> {
    check_measurements(map, y, truth)?;
    let (n1, n2) = map.domain_shape();
    cfg.validate(n1, n2)?;
    let s = cfg.thresh_s;
    let stopping = Stopping {
        max_iter: cfg.max_iter,
        tol_residual_abs: cfg.tol_residual * l1_norm(y),
        tol_change: cfg.tol_change,
    };
    drive(map, y, truth, stopping, s, |x, residual, _n| {
        let Some(step) = step_from_residual(map, residual, cfg)? else {
            return Ok(Advance::Stop(StopReason::MaxIter));
        };
        if step.condsri_hit && cfg.enable_condsri_stop {
            return Ok(Advance::Stop(StopReason::CondsriTriggered));
        }
        let mu = step.mu * cfg.step_scale;
        let candidate = x.add_scaled(mu, &step.direction);
        let iterate = svd(&candidate)?.truncate(s);
        Ok(Advance::Next { iterate, stepsize: mu })
    })
}
