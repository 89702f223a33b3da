//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::{frob_inner, gaussian, gaussian_vec, low_rank};
use miht::bench::{run_phase, run_robustness, Algorithm, Experiment, ExperimentSpec, PlantedInstance};
use miht::rripcheck::{estimate_constants, exact_alpha_unrestricted, exact_beta};
use miht::{
    eta, hard_threshold, make_dense_map, make_rank_one_map, miht, sign_vector, svd, Distribution,
    InnerThreshold, MihtConfig, RngSeed, StopReason,
};
use rand::Rng;

type Outcome = Result<String, String>;

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn median(v: &[f64]) -> f64 {
    let mut v = v.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn thresholding_error_factor() -> Outcome {
    let start = Instant::now();
    let base = RngSeed(101);
    let mut violations = 0;
    let mut worst: f64 = 0.0;
    for trial in 0..10_000u64 {
        let mut rng = base.derive(&[trial]).rng();
        let n1 = rng.random_range(3..=12usize);
        let n2 = rng.random_range(3..=12usize);
        let n = n1.min(n2);
        let r = rng.random_range(1..=(n / 3).min(3));
        let s = rng.random_range(r..=n - 2 * r);
        let rank_x = rng.random_range(1..=r);
        let x = low_rank(&mut rng, n1, n2, rank_x).scale(10f64.powf(rng.random_range(-2.0..2.0)));
        let z = match trial % 3 {
            0 => &x + &gaussian(&mut rng, n1, n2).scale(10f64.powf(rng.random_range(-3.0..1.0))),
            1 => &x + &low_rank(&mut rng, n1, n2, s).scale(10f64.powf(rng.random_range(-2.0..1.0))),
            _ => gaussian(&mut rng, n1, n2),
        };
        let lhs = (&x - &hard_threshold(&z, s).unwrap()).frobenius_norm();
        let rhs = eta(s as f64 / r as f64).unwrap() * (&x - &z).frobenius_norm();
        worst = worst.max(lhs / rhs);
        if lhs > rhs * (1.0 + 1e-12) {
            violations += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        violations == 0 && secs <= 60.0,
        format!("10000 trials, {violations} violations, worst ratio {worst:.4}, {secs:.1} s"),
    )
}

fn tail_inner_product() -> Outcome {
    let start = Instant::now();
    let base = RngSeed(102);
    let mut violations = 0;
    let mut worst: f64 = 0.0;
    for trial in 0..10_000u64 {
        let mut rng = base.derive(&[trial]).rng();
        let n1 = rng.random_range(2..=12usize);
        let n2 = rng.random_range(2..=12usize);
        let n = n1.min(n2);
        let k = rng.random_range(0..n);
        let j = rng.random_range(1..=n - k);
        let i = rng.random_range(0..=k);
        let b = if trial % 2 == 0 {
            gaussian(&mut rng, n1, n2)
        } else {
            &low_rank(&mut rng, n1, n2, k + j) + &gaussian(&mut rng, n1, n2).scale(0.1)
        };
        let a = match trial % 3 {
            0 => low_rank(&mut rng, n1, n2, j),
            _ => {
                // Aligned with the singular directions k+1..k+j of B.
                let f = svd(&b).unwrap();
                let mut block = f.partial_sum(k, k + j);
                if trial % 3 == 2 {
                    block = &block + &low_rank(&mut rng, n1, n2, 1).scale(0.05 * block.frobenius_norm().max(1e-3));
                    block = hard_threshold(&block, j).unwrap();
                }
                block
            }
        };
        let tail = &b - &hard_threshold(&b, k).unwrap();
        let lhs = frob_inner(&a, &tail).abs();
        let band = (&hard_threshold(&b, k + j).unwrap() - &hard_threshold(&b, i).unwrap()).frobenius_norm();
        let rhs = (j as f64 / (k + j - i) as f64).sqrt() * a.frobenius_norm() * band;
        if rhs > 0.0 {
            worst = worst.max(lhs / rhs);
        }
        if lhs > rhs * (1.0 + 1e-10) + 1e-12 * a.frobenius_norm() * b.frobenius_norm() {
            violations += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        violations == 0 && secs <= 60.0,
        format!("10000 trials, {violations} violations, worst ratio {worst:.4}, {secs:.1} s"),
    )
}

fn signed_adjoint_step() -> Outcome {
    // With s + r = min(N1, N2) the order restriction is vacuous, so the
    // unrestricted minimum is exactly α_{s+r}; β_{s+r} comes from sign
    // enumeration.
    let start = Instant::now();
    let configs: [(usize, usize, usize, usize, &[usize]); 5] = [
        (2, 2, 1, 1, &[5, 8, 12, 16]),
        (2, 3, 1, 1, &[7, 10, 14]),
        (2, 4, 1, 1, &[9, 12, 16]),
        (3, 3, 1, 2, &[10, 13, 16]),
        (3, 4, 1, 2, &[13, 16]),
    ];
    let mut trials = 0;
    let mut violations = 0;
    let mut worst: f64 = 0.0;
    let mut map_idx = 0u64;
    for (n1, n2, r, s, ms) in configs {
        for &m in ms {
            map_idx += 1;
            let map = make_rank_one_map(n1, n2, m, RngSeed(103).derive(&[map_idx])).unwrap();
            let beta = exact_beta(&map, s + r).unwrap();
            let alpha = exact_alpha_unrestricted(&map).unwrap();
            if alpha <= 0.0 {
                return Err(format!("map {n1}x{n2} m={m} is not injective"));
            }
            let gamma = beta / alpha;
            for t in 0..70u64 {
                let mut rng = RngSeed(104).derive(&[map_idx, t]).rng();
                let x = low_rank(&mut rng, n1, n2, r).scale(10f64.powf(rng.random_range(-1.0..1.0)));
                let ax = map.apply(&x).unwrap();
                let noise_scale = [0.0, 0.01, 0.1, 1.0][(t % 4) as usize] * miht::matana::l1_norm(&ax) / m as f64;
                let e: Vec<f64> = gaussian_vec(&mut rng, m).iter().map(|v| v * noise_scale).collect();
                let axe: Vec<f64> = ax.iter().zip(&e).map(|(a, b)| a + b).collect();
                let w = sign_vector(&axe);
                let hs = hard_threshold(&map.adjoint(&w).unwrap(), s).unwrap();
                let hs_sq = hs.frobenius_norm().powi(2);
                let tau = 1.0 + 3.0 * rng.random::<f64>();
                let lo = (beta * beta / tau).max(hs_sq);
                let hi = beta * beta;
                if lo > hi * (1.0 + 1e-12) {
                    return Err(format!("admissible stepsize range empty: {lo} > {hi}"));
                }
                let nu = match t % 5 {
                    0 => lo,
                    1 => hi,
                    _ => lo + (hi - lo) * rng.random::<f64>(),
                }
                .min(hi);
                let mu = miht::matana::l1_norm(&axe) / nu;
                let lhs = (&x - &hs.scale(mu)).frobenius_norm();
                let rhs = (1.0 - 1.0 / (2.0 * gamma * gamma) + tau * (r as f64 / (s + r) as f64).sqrt()) * x.frobenius_norm()
                    + 6.0 * tau * tau / beta * miht::matana::l1_norm(&e);
                worst = worst.max(lhs / rhs);
                trials += 1;
                if lhs > rhs * (1.0 + 1e-12) {
                    violations += 1;
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        violations == 0 && trials >= 1000 && secs <= 120.0,
        format!("{trials} trials on {map_idx} maps, {violations} violations, worst ratio {worst:.4}, {secs:.1} s"),
    )
}

fn adjoint_identity() -> Outcome {
    let mut worst: f64 = 0.0;
    for trial in 0..1000u64 {
        let mut rng = RngSeed(105).derive(&[trial]).rng();
        let n1 = rng.random_range(1..=10usize);
        let n2 = rng.random_range(1..=10usize);
        let m = rng.random_range(1..=60usize);
        let seed = RngSeed(106).derive(&[trial]);
        let map = match trial % 3 {
            0 => make_rank_one_map(n1, n2, m, seed),
            1 => make_dense_map(n1, n2, m, Distribution::Gaussian, seed),
            _ => make_dense_map(n1, n2, m, Distribution::Laplace, seed),
        }
        .unwrap();
        let z = gaussian(&mut rng, n1, n2);
        let u = gaussian_vec(&mut rng, m);
        let lhs = frob_inner(&map.adjoint(&u).unwrap(), &z);
        let rhs: f64 = u.iter().zip(map.apply(&z).unwrap()).map(|(a, b)| a * b).sum();
        let unorm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
        worst = worst.max((lhs - rhs).abs() / (1.0 + unorm * z.frobenius_norm()));
    }
    check(worst <= 1e-10, format!("1000 triples, max relative deviation {worst:.2e}"))
}

struct DeskRuns {
    successes: usize,
    max_iter: usize,
    ratios: Vec<f64>,
    secs: f64,
}

fn desk_runs() -> DeskRuns {
    let start = Instant::now();
    let cfg = MihtConfig::new(2).with_s(2).with_t(InnerThreshold::All).with_gamma(3.0).with_max_iter(500);
    let mut successes = 0;
    let mut max_iter = 0;
    let mut ratios = Vec::new();
    for trial in 0..50 {
        let inst = PlantedInstance::for_trial(RngSeed(107), 20, 20, 2, 400, trial).unwrap();
        let res = miht(&inst.map, &inst.measurements(0.0), &cfg, Some(&inst.truth)).unwrap();
        max_iter = max_iter.max(res.iterations_used);
        if res.relative_error(&inst.truth) <= 1e-4 {
            successes += 1;
            let r = res.contraction_ratios();
            ratios.push(median(r.get(5..).unwrap_or(&[])));
        }
    }
    DeskRuns {
        successes,
        max_iter,
        ratios,
        secs: start.elapsed().as_secs_f64(),
    }
}

fn exact_recovery(runs: &DeskRuns) -> Outcome {
    check(
        runs.successes >= 48 && runs.max_iter <= 500 && runs.secs <= 300.0,
        format!(
            "{}/50 recovered, at most {} iterations, {:.1} s",
            runs.successes, runs.max_iter, runs.secs
        ),
    )
}

fn geometric_rate(runs: &DeskRuns) -> Outcome {
    let overall = median(&runs.ratios);
    let worst = runs.ratios.iter().copied().fold(0.0, f64::max);
    check(
        !runs.ratios.is_empty() && overall < 0.95,
        format!("median ratio {overall:.3} over {} runs (largest per-run median {worst:.3})", runs.ratios.len()),
    )
}

fn robustness() -> Outcome {
    let mut spec = ExperimentSpec::new(Experiment::Robustness, RngSeed(108));
    spec.n1 = 20;
    spec.n2 = 20;
    spec.r = 2;
    spec.m_values = vec![400];
    spec.noise_l1_values = vec![0.01, 0.02, 0.04, 0.08];
    spec.algorithms = vec![Algorithm::MihtDefault];
    let table = run_robustness(&spec).map_err(|e| e.to_string())?;
    let eps = table.numbers("l1_noise", |_| true).unwrap();
    let med = table.numbers("frob_error_median", |_| true).unwrap();
    let d = med[0] / eps[0];
    let ok = eps.iter().zip(&med).all(|(e, m)| *m <= 3.0 * d * e);
    let ratios: Vec<String> = eps.iter().zip(&med).map(|(e, m)| format!("{:.4}", m / e)).collect();
    check(ok, format!("d = {d:.4}, error/noise ratios [{}]", ratios.join(", ")))
}

fn rrip_estimate() -> Outcome {
    let map = make_rank_one_map(20, 20, 400, RngSeed(109)).unwrap();
    let g = estimate_constants(&map, 2, 2000, RngSeed(110)).unwrap().gamma_hat;
    let dense = make_dense_map(20, 20, 400, Distribution::Laplace, RngSeed(111)).unwrap();
    let l = estimate_constants(&dense, 2, 2000, RngSeed(112)).unwrap().gamma_hat;
    check(g <= 3.5 && l <= 2.0 * g, format!("gaussian rank-one gamma_hat {g:.3}, laplace dense gamma_hat {l:.3}"))
}

fn stopping_certificate() -> Outcome {
    let (n, r, s, t, m, gamma) = (5, 1, 1, 2, 2000, 2.0);
    let cfg = MihtConfig::new(r)
        .with_s(s)
        .with_t(InnerThreshold::Rank(t))
        .with_gamma(gamma)
        .with_condsri_stop(true);
    let mut triggered = 0;
    let mut attempts = 0;
    let mut violations = 0;
    let mut worst: f64 = 0.0;
    let mut max_gamma_hat: f64 = 0.0;
    while triggered < 100 && attempts < 500 {
        let inst = PlantedInstance::for_trial(RngSeed(113), n, n, r, m, attempts).unwrap();
        let noise = [1.0, 10.0, 100.0][attempts % 3];
        attempts += 1;
        let res = miht(&inst.map, &inst.measurements(noise), &cfg, None).unwrap();
        if res.stop_reason != StopReason::CondsriTriggered {
            continue;
        }
        triggered += 1;
        let est = estimate_constants(&inst.map, t + s + r, 500, RngSeed(114).derive(&[attempts as u64])).unwrap();
        max_gamma_hat = max_gamma_hat.max(est.gamma_hat);
        let truth_r = hard_threshold(&inst.truth, r).unwrap();
        let residual_part = inst.map.apply(&(&inst.truth - &truth_r)).unwrap();
        let e_prime: f64 = residual_part.iter().zip(inst.noise(noise)).map(|(a, b)| (a + b).abs()).sum();
        let err = (&truth_r - &res.final_iterate).frobenius_norm();
        let bound = 4.0 * gamma / est.beta_hat * e_prime;
        worst = worst.max(err / bound);
        if err > bound {
            violations += 1;
        }
    }
    check(
        triggered >= 100 && violations == 0 && max_gamma_hat <= gamma,
        format!(
            "{triggered} triggered of {attempts} runs, {violations} violations, worst error/bound {worst:.3}, gamma_hat <= {max_gamma_hat:.3}"
        ),
    )
}

fn baseline_contrast() -> Outcome {
    let mut spec = ExperimentSpec::new(Experiment::Phase, RngSeed(115));
    spec.algorithms = vec![Algorithm::MihtDefault, Algorithm::Niht];
    let table = run_phase(&spec).map_err(|e| e.to_string())?;
    let counts = |alg: &str| -> Vec<f64> {
        let idx = table.column_index("success_count").unwrap();
        table.rows_where("algorithm", alg).unwrap().map(|r| r[idx].as_f64().unwrap()).collect()
    };
    let (mi, ni) = (counts("miht_default"), counts("niht"));
    let (lo, hi) = (spec.m_values[0], *spec.m_values.last().unwrap());
    check(
        mi.last() >= ni.last(),
        format!(
            "m={hi}: miht_default {}/{} vs niht {}/{}; m={lo} (not asserted): {} vs {}",
            mi.last().unwrap(),
            spec.trials,
            ni.last().unwrap(),
            spec.trials,
            mi[0],
            ni[0]
        ),
    )
}

fn main() -> ExitCode {
    let mut failed = 0;
    let mut report = |id: u32, name: &str, outcome: Outcome| {
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {id:>2} {tag} {name}: {detail}");
    };
    report(1, "thresholding error factor", thresholding_error_factor());
    report(2, "tail inner product bound", tail_inner_product());
    report(3, "signed adjoint step bound", signed_adjoint_step());
    report(4, "adjoint identity", adjoint_identity());
    let runs = desk_runs();
    report(5, "exact recovery", exact_recovery(&runs));
    report(6, "geometric convergence", geometric_rate(&runs));
    report(7, "robustness", robustness());
    report(8, "RRIP estimate", rrip_estimate());
    report(9, "stopping certificate", stopping_certificate());
    report(10, "baseline contrast", baseline_contrast());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
