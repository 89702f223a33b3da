//! Recovery algorithms: the modified iterative hard thresholding scheme
//! (MIHT) with signed-residual steps and its classical baselines.
//!
//! All algorithms start from `X_0 = 0` and share one stopping surface:
//!
//! * `‖y − A X_n‖_1 ≤ tol_residual · ‖y‖_1` → [`StopReason::ResidualConverged`]
//! * `‖X_{n+1} − X_n‖_F ≤ tol_change · (1 + ‖X_n‖_F)` → [`StopReason::IterateConverged`]
//! * the second term of the adaptive stepsize dominates (MIHT only, opt-in)
//!   → [`StopReason::CondsriTriggered`]
//! * iteration budget exhausted, or a zero search direction
//!   → [`StopReason::MaxIter`]

use std::fmt;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::matana::{l1_norm, DenseMatrix};
use crate::measure::MeasurementMap;

mod baselines;
mod miht;

pub use baselines::{iht_classic, niht, BaselineConfig};
pub use miht::{miht, stepsize, Step};

pub const DEFAULT_GAMMA: f64 = 3.0;
pub const DEFAULT_MAX_ITER: usize = 500;
pub const DEFAULT_TOL_RESIDUAL: f64 = 1e-10;
pub const DEFAULT_TOL_CHANGE: f64 = 1e-8;

/// Rank used by the inner thresholding `H_t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InnerThreshold {
    /// `t = min(N1, N2)`: no inner thresholding, one SVD per iteration saved.
    All,
    Rank(usize),
}

impl InnerThreshold {
    pub fn resolve(self, min_dim: usize) -> usize {
        match self {
            InnerThreshold::All => min_dim,
            InnerThreshold::Rank(t) => t,
        }
    }
}

impl fmt::Display for InnerThreshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InnerThreshold::All => f.write_str("ALL"),
            InnerThreshold::Rank(t) => write!(f, "{t}"),
        }
    }
}

impl std::str::FromStr for InnerThreshold {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("all") {
            return Ok(InnerThreshold::All);
        }
        s.parse::<usize>()
            .map(InnerThreshold::Rank)
            .map_err(|_| Error::param(format!("expected a rank or ALL, got {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepsizePolicy {
    /// `μ_n = ‖r_n‖_1 / max{‖D‖_F², ‖A D‖_1² / (4γ² ‖D‖_F²)}`.
    Adaptive,
    /// `μ_n = ‖r_n‖_1 / β²` for a user-supplied upper RRIP constant `β`.
    Fixed { beta: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MihtConfig {
    pub target_rank: usize,
    /// Outer threshold `s`; every iterate has rank at most `s`.
    pub thresh_s: usize,
    pub thresh_t: InnerThreshold,
    /// Assumed bound on the RRIP ratio.
    pub gamma: f64,
    pub stepsize_policy: StepsizePolicy,
    pub max_iter: usize,
    /// Relative to `‖y‖_1`.
    pub tol_residual: f64,
    pub tol_change: f64,
    pub enable_condsri_stop: bool,
    /// Multiplier applied to every stepsize; 1 reproduces the plain scheme.
    pub step_scale: f64,
}

impl MihtConfig {
    /// Practical defaults: `s = r`, `t = ALL`, `γ = 3`.
    pub fn new(target_rank: usize) -> Self {
        MihtConfig {
            target_rank,
            thresh_s: target_rank,
            thresh_t: InnerThreshold::All,
            gamma: DEFAULT_GAMMA,
            stepsize_policy: StepsizePolicy::Adaptive,
            max_iter: DEFAULT_MAX_ITER,
            tol_residual: DEFAULT_TOL_RESIDUAL,
            tol_change: DEFAULT_TOL_CHANGE,
            enable_condsri_stop: false,
            step_scale: 1.0,
        }
    }

    /// `s = 100 γ⁴ r`, `t = 800 γ¹² s`, each clamped to `min_dim`.
    pub fn guarantee_sized(target_rank: usize, gamma: f64, min_dim: usize) -> Self {
        let s_ideal = (100.0 * gamma.powi(4) * target_rank as f64).ceil();
        let t_ideal = (800.0 * gamma.powi(12) * s_ideal).ceil();
        let clamp = |name: &str, v: f64| -> usize {
            if v > min_dim as f64 {
                log::warn!("{name} = {v} exceeds min(N1, N2) = {min_dim}; clamped");
                min_dim
            } else {
                v as usize
            }
        };
        let thresh_s = clamp("s", s_ideal).max(target_rank);
        let t = clamp("t", t_ideal);
        MihtConfig {
            thresh_s,
            thresh_t: if t >= min_dim { InnerThreshold::All } else { InnerThreshold::Rank(t) },
            gamma,
            ..MihtConfig::new(target_rank)
        }
    }

    pub fn with_s(mut self, s: usize) -> Self {
        self.thresh_s = s;
        self
    }

    pub fn with_t(mut self, t: InnerThreshold) -> Self {
        self.thresh_t = t;
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_condsri_stop(mut self, enable: bool) -> Self {
        self.enable_condsri_stop = enable;
        self
    }

    pub fn validate(&self, n1: usize, n2: usize) -> Result<()> {
        let n = n1.min(n2);
        if self.target_rank == 0 {
            return Err(Error::param("target rank must be positive"));
        }
        if self.thresh_s < self.target_rank || self.thresh_s > n {
            return Err(Error::param(format!(
                "need r <= s <= min(N1, N2), got r={} s={} min={n}",
                self.target_rank, self.thresh_s
            )));
        }
        if let InnerThreshold::Rank(t) = self.thresh_t {
            if t == 0 || t > n {
                return Err(Error::param(format!("need 1 <= t <= min(N1, N2) = {n}, got t={t}")));
            }
        }
        if !(self.gamma >= 1.0) || !self.gamma.is_finite() {
            return Err(Error::param(format!("gamma must be >= 1, got {}", self.gamma)));
        }
        if let StepsizePolicy::Fixed { beta } = self.stepsize_policy {
            if !(beta > 0.0) || !beta.is_finite() {
                return Err(Error::param(format!("fixed stepsize needs beta > 0, got {beta}")));
            }
        }
        if self.max_iter == 0 {
            return Err(Error::param("max_iter must be positive"));
        }
        check_positive("tol_residual", self.tol_residual)?;
        check_positive("tol_change", self.tol_change)?;
        check_positive("step_scale", self.step_scale)?;
        Ok(())
    }
}

pub(crate) fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::param(format!("{name} must be positive, got {v}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    ResidualConverged,
    IterateConverged,
    MaxIter,
    CondsriTriggered,
}

impl StopReason {
    pub fn label(self) -> &'static str {
        match self {
            StopReason::ResidualConverged => "residual_converged",
            StopReason::IterateConverged => "iterate_converged",
            StopReason::MaxIter => "max_iter",
            StopReason::CondsriTriggered => "condsri_triggered",
        }
    }
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub iter: usize,
    pub l1_residual: f64,
    /// Stepsize used to leave this iterate; `None` for the final one.
    pub stepsize: Option<f64>,
    pub frob_error: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct RecoveryResult {
    pub final_iterate: DenseMatrix,
    pub iterations_used: usize,
    pub stop_reason: StopReason,
    /// One record per iterate `X_0, …, X_final`.
    pub trace: Vec<TraceRecord>,
    /// Rank cap of every iterate, enforced by the truncating SVD.
    pub rank_bound: usize,
}

impl RecoveryResult {
    pub fn relative_error(&self, truth: &DenseMatrix) -> f64 {
        let scale = truth.frobenius_norm();
        let err = (&self.final_iterate - truth).frobenius_norm();
        if scale > 0.0 {
            err / scale
        } else {
            err
        }
    }

    /// Ratios `e_{n+1} / e_n` of consecutive Frobenius errors, when a truth
    /// was supplied.
    pub fn contraction_ratios(&self) -> Vec<f64> {
        self.trace
            .windows(2)
            .filter_map(|w| match (w[0].frob_error, w[1].frob_error) {
                (Some(a), Some(b)) if a > 0.0 => Some(b / a),
                _ => None,
            })
            .collect()
    }

    /// Columns `iter,l1_residual,stepsize,frob_error`; missing values are empty.
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("iter,l1_residual,stepsize,frob_error\n");
        for rec in &self.trace {
            let opt = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
            writeln!(
                out,
                "{},{:e},{},{}",
                rec.iter,
                rec.l1_residual,
                opt(rec.stepsize),
                opt(rec.frob_error)
            )
            .unwrap();
        }
        out
    }

    pub fn write_trace_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.trace_csv())?;
        Ok(())
    }
}

pub(crate) fn check_measurements(map: &MeasurementMap, y: &[f64], truth: Option<&DenseMatrix>) -> Result<()> {
    let m = map.measurement_count();
    if y.len() != m {
        return Err(Error::dims(format!("{m} measurements"), format!("{}", y.len())));
    }
    if !y.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("measurements"));
    }
    if let Some(t) = truth {
        if t.shape() != map.domain_shape() {
            let (n1, n2) = map.domain_shape();
            return Err(Error::dims(format!("{n1}x{n2} truth"), format!("{}x{}", t.n_rows(), t.n_cols())));
        }
    }
    Ok(())
}

pub(crate) enum Advance {
    Next { iterate: DenseMatrix, stepsize: f64 },
    Stop(StopReason),
}

pub(crate) struct Stopping {
    pub max_iter: usize,
    pub tol_residual_abs: f64,
    pub tol_change: f64,
}

/// Common iteration driver. `advance` maps `(X_n, y − A X_n, n)` to the
/// next iterate or a stop.
pub(crate) fn drive(
    map: &MeasurementMap,
    y: &[f64],
    truth: Option<&DenseMatrix>,
    stopping: Stopping,
    rank_bound: usize,
    mut advance: impl FnMut(&DenseMatrix, &[f64], usize) -> Result<Advance>,
) -> Result<RecoveryResult> {
    let (n1, n2) = map.domain_shape();
    let mut x = DenseMatrix::zeros(n1, n2);
    let mut trace = Vec::new();
    let mut n = 0;
    let mut settled = false;
    loop {
        let ax = map.apply(&x)?;
        let residual: Vec<f64> = y.iter().zip(&ax).map(|(a, b)| a - b).collect();
        let l1 = l1_norm(&residual);
        if !l1.is_finite() {
            return Err(Error::Diverged { iteration: n });
        }
        trace.push(TraceRecord {
            iter: n,
            l1_residual: l1,
            stepsize: None,
            frob_error: truth.map(|t| (t - &x).frobenius_norm()),
        });
        let stop = if l1 <= stopping.tol_residual_abs {
            Some(StopReason::ResidualConverged)
        } else if settled {
            Some(StopReason::IterateConverged)
        } else if n >= stopping.max_iter {
            Some(StopReason::MaxIter)
        } else {
            match advance(&x, &residual, n)? {
                Advance::Stop(reason) => Some(reason),
                Advance::Next { iterate, stepsize } => {
                    trace.last_mut().unwrap().stepsize = Some(stepsize);
                    let change = (&iterate - &x).frobenius_norm();
                    if !stepsize.is_finite() || !iterate.frobenius_norm().is_finite() || !change.is_finite() {
                        return Err(Error::Diverged { iteration: n + 1 });
                    }
                    settled = change <= stopping.tol_change * (1.0 + x.frobenius_norm());
                    x = iterate;
                    n += 1;
                    None
                }
            }
        };
        if let Some(stop_reason) = stop {
            return Ok(RecoveryResult {
                final_iterate: x,
                iterations_used: n,
                stop_reason,
                trace,
                rank_bound,
            });
        }
    }
}
