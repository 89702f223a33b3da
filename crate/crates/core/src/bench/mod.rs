//! Experiment harness: planted-instance recoveries swept over parameter
//! grids, emitted as deterministic CSV tables.
//!
//! Trial `k` at dimensions `(N1, N2)` with `m` measurements draws its
//! instance from `seed.derive(&[N1, N2, m, k])`, independent of how many
//! trials or grid points the experiment has. Every algorithm and every
//! `(s, t)` or noise level sees the same instance for a given trial.

use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matana::DenseMatrix;
use crate::measure::{make_rank_one_map, MeasurementMap};
use crate::recover::{iht_classic, miht, niht, BaselineConfig, InnerThreshold, MihtConfig, RecoveryResult};
use crate::rng::{rademacher, RngSeed};
use crate::rripcheck::{concentration_curve, median, sample_rank_r};

mod spec;
mod table;

pub use spec::{parse_config, Algorithm, Experiment, ExperimentSpec, DEFAULT_SAMPLING_FACTOR, DEFAULT_SUCCESS_THRESHOLD};
pub use table::{Cell, Table};

/// A known rank-`r` matrix with unit Frobenius norm, a Gaussian rank-one
/// map, and measurements `y = A(X) + e`.
#[derive(Debug, Clone)]
pub struct PlantedInstance {
    pub map: MeasurementMap,
    pub truth: DenseMatrix,
    /// Unit-magnitude random signs; the noise is `noise_l1 / m` times these.
    pub noise_signs: Vec<f64>,
    pub clean: Vec<f64>,
}

impl PlantedInstance {
    pub fn new(n1: usize, n2: usize, r: usize, m: usize, seed: RngSeed) -> Result<Self> {
        let map = make_rank_one_map(n1, n2, m, seed.derive(&[0]))?;
        let truth = sample_rank_r(n1, n2, r, seed.derive(&[1]))?;
        let mut rng = seed.derive(&[2]).rng();
        let noise_signs = (0..m).map(|_| rademacher(&mut rng)).collect();
        let clean = map.apply(&truth)?;
        Ok(PlantedInstance {
            map,
            truth,
            noise_signs,
            clean,
        })
    }

    /// Instance of trial `trial` in a grid keyed by `(N1, N2, m)`.
    pub fn for_trial(base: RngSeed, n1: usize, n2: usize, r: usize, m: usize, trial: usize) -> Result<Self> {
        Self::new(n1, n2, r, m, base.derive(&[n1 as u64, n2 as u64, m as u64, trial as u64]))
    }

    /// Noise vector with `‖e‖_1 = noise_l1`, equal magnitudes.
    pub fn noise(&self, noise_l1: f64) -> Vec<f64> {
        let each = noise_l1 / self.noise_signs.len() as f64;
        self.noise_signs.iter().map(|s| s * each).collect()
    }

    pub fn measurements(&self, noise_l1: f64) -> Vec<f64> {
        if noise_l1 == 0.0 {
            return self.clean.clone();
        }
        self.clean.iter().zip(self.noise(noise_l1)).map(|(a, e)| a + e).collect()
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub relative_error: f64,
    pub frob_error: f64,
    pub iterations: usize,
    pub seconds: f64,
    /// `None` when the run diverged.
    pub result: Option<RecoveryResult>,
}

impl RunOutcome {
    pub fn succeeded(&self, threshold: f64) -> bool {
        self.relative_error <= threshold
    }
}

/// Runs `algorithm` on `instance`. A diverging run is reported as a
/// failure with infinite error rather than as an error.
pub fn run_algorithm(
    algorithm: Algorithm,
    instance: &PlantedInstance,
    y: &[f64],
    spec: &ExperimentSpec,
) -> Result<RunOutcome> {
    run_with(algorithm, instance, y, spec, None)
}

fn run_with(
    algorithm: Algorithm,
    instance: &PlantedInstance,
    y: &[f64],
    spec: &ExperimentSpec,
    st: Option<(usize, InnerThreshold)>,
) -> Result<RunOutcome> {
    let map = &instance.map;
    let truth = Some(&instance.truth);
    let r = spec.r;
    let (n1, n2) = map.domain_shape();
    let base = BaselineConfig {
        rank: r,
        max_iter: spec.max_iter,
        tol: crate::recover::DEFAULT_TOL_CHANGE,
    };
    let miht_cfg = |s: usize, t: InnerThreshold| MihtConfig::new(r).with_s(s).with_t(t).with_gamma(spec.gamma).with_max_iter(spec.max_iter);

    let start = Instant::now();
    let outcome = match algorithm {
        Algorithm::MihtDefault => {
            let (s, t) = st.unwrap_or((r, InnerThreshold::All));
            miht(map, y, &miht_cfg(s, t), truth)
        }
        Algorithm::MihtR2r => {
            let t = (2 * r).min(n1.min(n2));
            miht(map, y, &miht_cfg(r, InnerThreshold::Rank(t)), truth)
        }
        Algorithm::Iht => {
            let mu = spec.iht_mu.unwrap_or(1.0 / map.measurement_count() as f64);
            iht_classic(map, y, &base, mu, truth)
        }
        Algorithm::Niht => niht(map, y, &base, truth),
    };
    let seconds = start.elapsed().as_secs_f64();
    match outcome {
        Ok(res) => Ok(RunOutcome {
            relative_error: res.relative_error(&instance.truth),
            frob_error: (&res.final_iterate - &instance.truth).frobenius_norm(),
            iterations: res.iterations_used,
            seconds,
            result: Some(res),
        }),
        Err(Error::Diverged { iteration }) => Ok(RunOutcome {
            relative_error: f64::INFINITY,
            frob_error: f64::INFINITY,
            iterations: iteration,
            seconds,
            result: None,
        }),
        Err(e) => Err(e),
    }
}

fn with_pool<R: Send>(workers: usize, job: impl FnOnce() -> R + Send) -> Result<R> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::param(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(job))
}

fn expect(spec: &ExperimentSpec, experiment: Experiment) -> Result<()> {
    if spec.experiment != experiment {
        return Err(Error::param(format!(
            "spec is for experiment {}, not {}",
            spec.experiment, experiment
        )));
    }
    spec.validate()
}

fn single_m(spec: &ExperimentSpec) -> Result<usize> {
    match spec.m_values.as_slice() {
        [m] => Ok(*m),
        _ => Err(Error::param(format!("{} takes a single m", spec.experiment))),
    }
}

/// Success counts of default-step MIHT over an `(s, t)` grid, columns
/// `s,t,success_count,trials`.
pub fn run_st_grid(spec: &ExperimentSpec) -> Result<Table> {
    expect(spec, Experiment::StGrid)?;
    let m = single_m(spec)?;
    let cells: Vec<(usize, InnerThreshold)> = spec
        .s_values
        .iter()
        .flat_map(|&s| spec.t_values.iter().map(move |&t| (s, t)))
        .collect();
    let successes = with_pool(spec.workers, || {
        (0..spec.trials)
            .into_par_iter()
            .map(|trial| {
                let inst = PlantedInstance::for_trial(spec.seed, spec.n1, spec.n2, spec.r, m, trial)?;
                let y = inst.measurements(0.0);
                cells
                    .iter()
                    .map(|&st| Ok(run_with(Algorithm::MihtDefault, &inst, &y, spec, Some(st))?.succeeded(spec.success_threshold)))
                    .collect::<Result<Vec<bool>>>()
            })
            .collect::<Result<Vec<_>>>()
    })??;
    let mut table = Table::new(spec.describe(), &["s", "t", "success_count", "trials"]);
    for (idx, (s, t)) in cells.iter().enumerate() {
        let count = successes.iter().filter(|row| row[idx]).count();
        table.push(vec![(*s).into(), t.to_string().into(), count.into(), spec.trials.into()]);
    }
    Ok(table)
}

/// Success counts per algorithm over the `m` grid, columns
/// `algorithm,m,success_count,trials`.
pub fn run_phase(spec: &ExperimentSpec) -> Result<Table> {
    expect(spec, Experiment::Phase)?;
    let jobs: Vec<(usize, usize)> = spec
        .m_values
        .iter()
        .flat_map(|&m| (0..spec.trials).map(move |t| (m, t)))
        .collect();
    let outcomes = with_pool(spec.workers, || {
        jobs.par_iter()
            .map(|&(m, trial)| {
                let inst = PlantedInstance::for_trial(spec.seed, spec.n1, spec.n2, spec.r, m, trial)?;
                let y = inst.measurements(0.0);
                spec.algorithms
                    .iter()
                    .map(|&a| Ok(run_algorithm(a, &inst, &y, spec)?.succeeded(spec.success_threshold)))
                    .collect::<Result<Vec<bool>>>()
            })
            .collect::<Result<Vec<_>>>()
    })??;
    let mut table = Table::new(spec.describe(), &["algorithm", "m", "success_count", "trials"]);
    for (a_idx, algorithm) in spec.algorithms.iter().enumerate() {
        for &m in &spec.m_values {
            let count = jobs
                .iter()
                .zip(&outcomes)
                .filter(|((jm, _), ok)| *jm == m && ok[a_idx])
                .count();
            table.push(vec![algorithm.label().into(), m.into(), count.into(), spec.trials.into()]);
        }
    }
    Ok(table)
}

/// Recovery error against the ℓ1 norm of the measurement error, columns
/// `algorithm,l1_noise,frob_error_median,frob_error_max`.
pub fn run_robustness(spec: &ExperimentSpec) -> Result<Table> {
    expect(spec, Experiment::Robustness)?;
    let m = single_m(spec)?;
    let errors = with_pool(spec.workers, || {
        (0..spec.trials)
            .into_par_iter()
            .map(|trial| {
                let inst = PlantedInstance::for_trial(spec.seed, spec.n1, spec.n2, spec.r, m, trial)?;
                let mut per_trial = Vec::new();
                for &eps in &spec.noise_l1_values {
                    let y = inst.measurements(eps);
                    for &a in &spec.algorithms {
                        per_trial.push(run_algorithm(a, &inst, &y, spec)?.frob_error);
                    }
                }
                Ok(per_trial)
            })
            .collect::<Result<Vec<Vec<f64>>>>()
    })??;
    let mut table = Table::new(
        spec.describe(),
        &["algorithm", "l1_noise", "frob_error_median", "frob_error_max"],
    );
    let n_alg = spec.algorithms.len();
    for (a_idx, algorithm) in spec.algorithms.iter().enumerate() {
        for (e_idx, &eps) in spec.noise_l1_values.iter().enumerate() {
            let col: Vec<f64> = errors.iter().map(|row| row[e_idx * n_alg + a_idx]).collect();
            let max = col.iter().copied().fold(0.0, f64::max);
            table.push(vec![algorithm.label().into(), eps.into(), median(&col).into(), max.into()]);
        }
    }
    Ok(table)
}

/// Wall time and iteration counts over the dimension grid, successful runs
/// only. Columns `algorithm,N,median_wall_time_seconds,median_iterations,successful_runs`.
///
/// Runs execute one at a time regardless of `workers`, so that timings are
/// not distorted by contention.
pub fn run_timing(spec: &ExperimentSpec) -> Result<Table> {
    expect(spec, Experiment::Timing)?;
    let mut table = Table::new(
        spec.describe(),
        &["algorithm", "N", "median_wall_time_seconds", "median_iterations", "successful_runs"],
    );
    let mut results = vec![vec![Vec::new(); spec.n_values.len()]; spec.algorithms.len()];
    for (n_idx, &n) in spec.n_values.iter().enumerate() {
        let m = spec.sampling_factor * spec.r * n;
        for trial in 0..spec.trials {
            let inst = PlantedInstance::for_trial(spec.seed, n, n, spec.r, m, trial)?;
            let y = inst.measurements(0.0);
            for (a_idx, &a) in spec.algorithms.iter().enumerate() {
                let out = run_algorithm(a, &inst, &y, spec)?;
                if out.succeeded(spec.success_threshold) {
                    results[a_idx][n_idx].push((out.seconds, out.iterations as f64));
                }
            }
        }
    }
    for (a_idx, algorithm) in spec.algorithms.iter().enumerate() {
        for (n_idx, &n) in spec.n_values.iter().enumerate() {
            let runs = &results[a_idx][n_idx];
            let (time, iters) = if runs.is_empty() {
                (Cell::from(""), Cell::from(""))
            } else {
                let times: Vec<f64> = runs.iter().map(|r| r.0).collect();
                let iters: Vec<f64> = runs.iter().map(|r| r.1).collect();
                (median(&times).into(), median(&iters).into())
            };
            table.push(vec![algorithm.label().into(), n.into(), time, iters, runs.len().into()]);
        }
    }
    Ok(table)
}

/// Monte-Carlo RRIP constants of dense maps over the `m` grid, columns
/// `m,trial,alpha_hat,beta_hat,gamma_hat`.
pub fn run_rrip(spec: &ExperimentSpec) -> Result<Table> {
    expect(spec, Experiment::Rrip)?;
    if spec.n1 != spec.n2 {
        return Err(Error::param("the RRIP curve uses square N x N maps"));
    }
    let curve = with_pool(spec.workers, || {
        concentration_curve(spec.dist, spec.n1, spec.r, &spec.m_values, spec.trials, spec.samples, spec.seed)
    })??;
    let mut table = Table::new(spec.describe(), &["m", "trial", "alpha_hat", "beta_hat", "gamma_hat"]);
    for row in curve.rows {
        table.push(vec![
            row.m.into(),
            row.trial.into(),
            row.alpha_hat.into(),
            row.beta_hat.into(),
            row.gamma_hat.into(),
        ]);
    }
    Ok(table)
}

/// Runs the experiment named in `spec`.
pub fn run(spec: &ExperimentSpec) -> Result<Table> {
    match spec.experiment {
        Experiment::StGrid => run_st_grid(spec),
        Experiment::Phase => run_phase(spec),
        Experiment::Robustness => run_robustness(spec),
        Experiment::Timing => run_timing(spec),
        Experiment::Rrip => run_rrip(spec),
    }
}
