//! Acceptance suite. Prints one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_UNMET` are reported as FAIL like any other, but
//! do not fail the process; the analysis for each lives in the project's
//! decision log. Any other FAIL exits nonzero.
//!
//! Set `KM_ML100K=/path/to/u.data` to run criteria 9 and 10.

use std::collections::BTreeMap;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use kmlearn::bench::bench_bqp;
use kmlearn::bqp::positive_eigenpairs;
use kmlearn::bqp::{
    build_bqp, dual_gradient, dual_objective, lift, solve_enhanced_gd, solve_gd, BqpInstance,
    DualConfig, EigMode, LiftedBqp, Method,
};
use kmlearn::data::{generate_synthetic, load_ml100k, split, SplitConfig, SyntheticConfig};
use kmlearn::eigen::{
    exact_eigenvalues, lanczos, ritz_error_bounds, ritz_pairs, thresholded_lanczos, uniform_start,
    LanczosFactorization, RitzPairs,
};
use kmlearn::interpret::{mining_accuracy, RaterFilter};
use kmlearn::lcqp::{build_lcqp, duality_gap, solve_fw, FwConfig, LcqpInstance};
use kmlearn::model::{training_rmse, IndicatorVector, KmParams, RatingDataset, SimplexVector};
use kmlearn::oracles::{bqp_exhaustive, fd_gradient, lcqp_faces};
use kmlearn::rounding::{factorize, round, RoundingConfig};
use kmlearn::trainer::{bcd_train, init_theta, TrainConfig};

const KNOWN_UNMET: &[u32] = &[6, 9, 10, 13];

/// Threshold parameter for the Lanczos runs in criteria 6 and 7.
const FIDELITY_A: f64 = 100.0;

struct Outcome {
    id: u32,
    pass: bool,
    line: String,
}

fn report(id: u32, name: &str, pass: bool, detail: String) -> Outcome {
    let line = format!(
        "{} [{id:>2}] {name}: {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    eprintln!("{line}");
    Outcome { id, pass, line }
}

fn random_simplex(d: usize, rng: &mut ChaCha8Rng) -> SimplexVector {
    let w: Vec<f64> = (0..d)
        .map(|_| -rng.random::<f64>().max(1e-300).ln())
        .collect();
    let s: f64 = w.iter().sum();
    SimplexVector::new(w.iter().map(|x| x / s).collect()).unwrap()
}

/// Item subproblems of the 20 × 40 synthetic grid at freshly initialized θ.
fn synthetic_item_bqps(dim: usize, count: usize, seed: u64) -> Vec<LiftedBqp> {
    let data = generate_synthetic(&SyntheticConfig {
        seed,
        ..SyntheticConfig::default()
    })
    .unwrap();
    let users: Vec<usize> = (0..data.users().len()).collect();
    let theta = init_theta(&users, dim, seed).unwrap();
    let mut by_item: BTreeMap<usize, Vec<(usize, f64)>> = BTreeMap::new();
    for r in data.train() {
        by_item.entry(r.item).or_default().push((r.user, r.p));
    }
    by_item
        .values()
        .take(count)
        .map(|raters| {
            let th: Vec<&SimplexVector> = raters.iter().map(|(u, _)| &theta[u]).collect();
            let ps: Vec<f64> = raters.iter().map(|(_, p)| *p).collect();
            lift(&build_bqp(&th, &ps).unwrap()).unwrap()
        })
        .collect()
}

fn ones(n: usize) -> DVector<f64> {
    DVector::from_element(n, 1.0)
}

fn criterion_1() -> Outcome {
    let t0 = Instant::now();
    let cfg = DualConfig {
        record_log: true,
        initial_step: false,
        ..DualConfig::default()
    };
    let mut worst_u = 0.0f64;
    let mut worst_h = 0.0f64;
    let mut length_mismatch = 0;
    for lifted in synthetic_item_bqps(4, 20, 1) {
        let p = solve_gd(&lifted, &cfg, &ones(5)).unwrap();
        let e = solve_enhanced_gd(&lifted, &cfg, &ones(5)).unwrap();
        if p.log.len() != e.log.len() {
            length_mismatch += 1;
        }
        for (a, b) in p.log.iter().zip(&e.log) {
            for (x, y) in a.u.iter().zip(&b.u) {
                worst_u = worst_u.max((x - y).abs());
            }
        }
        worst_h = worst_h.max((p.h - e.h).abs());
    }
    let secs = t0.elapsed().as_secs_f64();
    report(
        1,
        "iterate equivalence, plain vs enhanced GD, D=4",
        length_mismatch == 0 && worst_u <= 1e-8 && worst_h <= 1e-10 && secs < 10.0,
        format!(
            "20 instances, max |du| {worst_u:.2e} (tol 1e-8), max |dh| {worst_h:.2e} (tol 1e-10), length mismatches {length_mismatch}, {secs:.2}s (limit 10s)"
        ),
    )
}

fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 {
        1.0
    } else {
        sxy * sxy / (sxx * syy)
    };
    (slope, r2)
}

fn criterion_2() -> Outcome {
    let cfg = DualConfig {
        record_log: true,
        ..DualConfig::default()
    };
    let tight = DualConfig {
        eps: 1e-10,
        max_iters: 100_000,
        ..DualConfig::default()
    };
    let mut min_r2 = f64::INFINITY;
    let mut max_slope = f64::NEG_INFINITY;
    let mut fitted = 0;
    let mut short = 0;
    for lifted in synthetic_item_bqps(4, 20, 2) {
        let star = solve_enhanced_gd(&lifted, &tight, &ones(5)).unwrap().h;
        let run = solve_enhanced_gd(&lifted, &cfg, &ones(5)).unwrap();
        let pts: Vec<(f64, f64)> = run
            .log
            .iter()
            .filter(|e| e.h - star > 0.0)
            .map(|e| (e.iteration as f64, (e.h - star).log10()))
            .collect();
        if pts.len() < 3 {
            short += 1;
            continue;
        }
        let (xs, ys): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
        let (slope, r2) = linear_fit(&xs, &ys);
        min_r2 = min_r2.min(r2);
        max_slope = max_slope.max(slope);
        fitted += 1;
    }
    report(
        2,
        "linear convergence of h_gamma, D=4",
        fitted > 0 && max_slope < 0.0 && min_r2 >= 0.9,
        format!(
            "{fitted} runs fitted ({short} with < 3 points), max slope {max_slope:.3}, min R^2 {min_r2:.3} (need >= 0.9)"
        ),
    )
}

fn random_bqp(d: usize, rng: &mut ChaCha8Rng) -> BqpInstance {
    let terms = d + rng.random_range(0..=d);
    let mut s = DMatrix::zeros(d, d);
    let mut v = DVector::zeros(d);
    for _ in 0..terms {
        let th = DVector::from_column_slice(random_simplex(d, rng).as_slice());
        let p: f64 = rng.random();
        s += &th * th.transpose();
        v += &th * p;
    }
    BqpInstance::new(s, v, 0.0).unwrap()
}

/// Criterion 3 also hands back every `C(u)` the solver decomposed.
fn criterion_3() -> (Outcome, Vec<DMatrix<f64>>) {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let cfg = DualConfig {
        capture_matrices: true,
        ..DualConfig::default()
    };
    let mut hits = 0;
    let mut worst_excess = f64::NEG_INFINITY;
    let mut captured = Vec::new();
    let n = 200;
    for k in 0..n {
        let d = 2 + k % 9;
        let inst = random_bqp(d, &mut rng);
        let lifted = lift(&inst).unwrap();
        let st = solve_enhanced_gd(&lifted, &cfg, &ones(d + 1)).unwrap();
        let (vals, vecs) = positive_eigenpairs(&lifted, &st.u, EigMode::Exact, 1.0).unwrap();
        let fac = factorize(&vals, &vecs, cfg.gamma).unwrap();
        let psi = round(
            &lifted,
            &fac,
            &RoundingConfig {
                i_rand: 100,
                seed: k as u64,
            },
        )
        .unwrap();
        let oracle = bqp_exhaustive(&inst, false).unwrap();
        let got = inst.objective(&psi);
        let spread = oracle.worst_objective - oracle.best_objective;
        if got <= oracle.best_objective + 1e-9 {
            hits += 1;
        }
        worst_excess = worst_excess.max((got - oracle.best_objective) / spread.max(1e-300));
        captured.extend(st.captured);
    }
    let secs = t0.elapsed().as_secs_f64();
    let share = hits as f64 / n as f64;
    let out = report(
        3,
        "dual + rounding vs exhaustive oracle",
        share >= 0.9 && worst_excess <= 0.05 && secs < 120.0,
        format!(
            "{hits}/{n} optimal ({:.1}%, need 90%), worst excess {:.4} of spread (limit 0.05), {secs:.1}s (limit 120s)",
            100.0 * share,
            worst_excess.max(0.0)
        ),
    );
    (out, captured)
}

/// Worst slack of the residual bound and both nearest-eigenvalue bounds.
fn bound_slack(
    c: &DMatrix<f64>,
    fac: &LanczosFactorization,
    pairs: &RitzPairs,
    truth: &DVector<f64>,
) -> f64 {
    let b = ritz_error_bounds(fac, pairs);
    let mut worst = f64::INFINITY;
    for (k, &theta) in pairs.values.iter().enumerate() {
        let v = pairs.vectors.column(k);
        let residual = (c * v - v * theta).norm();
        let nearest = truth
            .iter()
            .map(|l| (l - theta).abs())
            .fold(f64::INFINITY, f64::min);
        worst = worst
            .min(b.residual_bound - residual)
            .min(b.max_error_bound - nearest)
            .min(b.min_error_bounds[k] - nearest);
    }
    worst
}

fn criterion_4(captured: &[DMatrix<f64>]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = f64::INFINITY;
    let mut runs = 0;
    for k in 0..100 {
        let n = 9 + (k * 92) / 99;
        let g = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        let c = (&g + g.transpose()) * 0.5;
        let truth = exact_eigenvalues(&c);
        let run = thresholded_lanczos(&c, 1.0).unwrap();
        worst = worst.min(bound_slack(&c, &run.factorization, &run.pairs, &truth));
        let m = (n / 4).max(2);
        let fac = lanczos(&c, &uniform_start(n), 0.0, m).unwrap();
        worst = worst.min(bound_slack(&c, &fac, &ritz_pairs(&fac), &truth));
        runs += 2;
    }
    for c in captured {
        if c.nrows() < 3 {
            continue;
        }
        let truth = exact_eigenvalues(c);
        let run = thresholded_lanczos(c, 1.0).unwrap();
        worst = worst.min(bound_slack(c, &run.factorization, &run.pairs, &truth));
        runs += 1;
    }
    report(
        4,
        "Ritz residual and eigenvalue error bounds",
        worst >= -1e-9,
        format!(
            "{runs} Lanczos runs ({} solver matrices), worst slack {worst:.3e} (need >= -1e-9)",
            captured.len()
        ),
    )
}

fn criterion_5(captured: &[DMatrix<f64>], training: &[kmlearn::bqp::LanczosStats]) -> Outcome {
    let mut runs = 0;
    let mut violations = 0;
    let mut worst_ratio = 0.0f64;
    for c in captured {
        if c.nrows() < 3 {
            continue;
        }
        for a in [1.0, FIDELITY_A] {
            let run = thresholded_lanczos(c, a).unwrap();
            let m = run.factorization.m();
            let cap = run.threshold.beta_cap(m);
            let ratio = run.factorization.beta_next / cap;
            worst_ratio = worst_ratio.max(ratio);
            violations += (run.factorization.beta_next > cap) as usize;
            runs += 1;
        }
    }
    for s in training {
        runs += s.runs;
        violations += s.cap_violations;
        worst_ratio = worst_ratio.max(s.max_cap_ratio);
    }
    report(
        5,
        "beta_(m+1) <= 2m((sigma_ub - sigma_lb) + sigma_mink) on logged Lanczos runs",
        runs > 0 && violations == 0,
        format!("{runs} runs, {violations} violations, max beta/cap {worst_ratio:.3e}"),
    )
}

fn synthetic(dim_seed: u64) -> RatingDataset {
    generate_synthetic(&SyntheticConfig {
        seed: dim_seed,
        ..SyntheticConfig::default()
    })
    .unwrap()
}

fn criterion_6() -> Outcome {
    let data = synthetic(0);
    let base = TrainConfig {
        i_bcd: 2,
        dual: DualConfig {
            lanczos_a: FIDELITY_A,
            ..DualConfig::default()
        },
        ..TrainConfig::default()
    };
    let d50 = bench_bqp(
        &data,
        &TrainConfig { dim: 50, ..base },
        &[
            (Method::PlainGd, EigMode::Exact),
            (Method::EnhancedGd, EigMode::Exact),
            (Method::EnhancedGd, EigMode::Lanczos),
        ],
    )
    .unwrap();
    let d100 = bench_bqp(
        &data,
        &TrainConfig { dim: 100, ..base },
        &[
            (Method::EnhancedGd, EigMode::Exact),
            (Method::EnhancedGd, EigMode::Lanczos),
        ],
    )
    .unwrap();
    let speedup = d50[0].bqp_seconds / d50[1].bqp_seconds;
    let lanczos50 = d50[2].bqp_seconds / d50[1].bqp_seconds;
    let lanczos100 = d100[1].bqp_seconds / d100[0].bqp_seconds;
    let pass = speedup >= 5.0 && lanczos50 <= 1.2 && lanczos100 < 1.0;
    report(
        6,
        "BQP wall time",
        pass,
        format!(
            "D=50: plain {:.2}s / enhanced {:.2}s = {speedup:.2}x (need >= 5x); Lanczos(a={FIDELITY_A}) {:.2}s = {lanczos50:.2}x exact (need <= 1.2x); D=100: exact {:.2}s, Lanczos {:.2}s = {lanczos100:.2}x (need < 1x); {} BCD sweeps",
            d50[0].bqp_seconds,
            d50[1].bqp_seconds,
            d50[2].bqp_seconds,
            d100[0].bqp_seconds,
            d100[1].bqp_seconds,
            base.i_bcd
        ),
    )
}

/// Also returns the exact run's report (criterion 13) and the Lanczos
/// statistics (criterion 5).
fn criterion_7() -> (
    Outcome,
    kmlearn::trainer::TrainReport,
    kmlearn::bqp::LanczosStats,
) {
    let data = synthetic(0);
    let base = TrainConfig {
        dim: 8,
        ..TrainConfig::default()
    };
    let (_, exact) = bcd_train(&data, &base).unwrap();
    let lcfg = TrainConfig {
        dual: DualConfig {
            eig_mode: EigMode::Lanczos,
            lanczos_a: FIDELITY_A,
            ..base.dual
        },
        ..base
    };
    let (_, approx) = bcd_train(&data, &lcfg).unwrap();
    let diff = exact
        .rmse_per_iteration
        .iter()
        .zip(&approx.rmse_per_iteration)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let out = report(
        7,
        "exact vs Lanczos training RMSE curves, D=8",
        diff <= 0.01,
        format!(
            "{} BCD iterations, max |diff| {diff:.2e} (tol 0.01), a={FIDELITY_A}, final RMSE exact {:.4} / Lanczos {:.4}",
            base.i_bcd,
            exact.rmse_per_iteration.last().unwrap(),
            approx.rmse_per_iteration.last().unwrap()
        ),
    );
    let stats = approx.lanczos;
    (out, exact, stats)
}

fn criterion_8() -> Outcome {
    let data = RatingDataset::from_triples([(1, 1, 0.8), (1, 2, 0.4), (2, 2, 0.6)], 1.0).unwrap();
    let theta = BTreeMap::from([
        (0, SimplexVector::new(vec![0.4, 0.2, 0.1, 0.3]).unwrap()),
        (1, SimplexVector::new(vec![0.1, 0.3, 0.1, 0.5]).unwrap()),
    ]);
    let psi = BTreeMap::from([
        (0, IndicatorVector::from_binary(&[1, 0, 1, 1]).unwrap()),
        (1, IndicatorVector::from_binary(&[0, 0, 1, 1]).unwrap()),
    ]);
    let given = KmParams::new(4, theta, psi).unwrap();
    let pred = given.predict_one(1, 0).unwrap();
    let given_rmse = training_rmse(&given, &data).unwrap();
    let (_, rep) = bcd_train(
        &data,
        &TrainConfig {
            dim: 4,
            ..TrainConfig::default()
        },
    )
    .unwrap();
    let trained = *rep.rmse_per_iteration.last().unwrap();
    report(
        8,
        "toy example end to end",
        (pred - 0.7).abs() <= 1e-12 && given_rmse <= 1e-12 && trained <= 1e-3,
        format!("p(2,1) = {pred:.15}, RMSE of given parameters {given_rmse:.1e}, trained D=4 RMSE {trained:.2e} (need <= 1e-3)"),
    )
}

fn criteria_9_10() -> (Outcome, Outcome) {
    let Some(path) = std::env::var_os("KM_ML100K") else {
        let why =
            "not run: MovieLens 100K is not available here (set KM_ML100K to u.data)".to_string();
        return (
            report(9, "ML100K test NRMSE", false, why.clone()),
            report(10, "ML100K relation-mining accuracy", false, why),
        );
    };
    let t0 = Instant::now();
    let data = split(&load_ml100k(&path).unwrap(), &SplitConfig::default()).unwrap();
    let mut best: Option<(f64, f64, KmParams)> = None;
    let mut per_lambda = Vec::new();
    for lambda_u in [0.0, 10.0, 30.0] {
        let cfg = TrainConfig {
            dim: 8,
            i_bcd: 15,
            lambda_u,
            ..TrainConfig::default()
        };
        let (params, rep) = bcd_train(&data, &cfg).unwrap();
        let nrmse = rep.test_evaluation.unwrap().rmse;
        per_lambda.push(format!("lambda_u={lambda_u}: {nrmse:.4}"));
        if best.as_ref().is_none_or(|b| nrmse < b.0) {
            best = Some((nrmse, lambda_u, params));
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    let (nrmse, _, params) = best.unwrap();
    let c9 = report(
        9,
        "ML100K test NRMSE",
        nrmse <= 0.21 && secs < 1800.0,
        format!(
            "best {nrmse:.4} (need <= 0.21); {}; {secs:.0}s (limit 1800s)",
            per_lambda.join(", ")
        ),
    );
    let rows = mining_accuracy(&params, &data, 0.5, RaterFilter::LikersOnly).unwrap();
    let min = rows
        .iter()
        .map(|r| r.accuracy)
        .fold(f64::INFINITY, f64::min);
    let mean = rows.iter().map(|r| r.accuracy).sum::<f64>() / rows.len().max(1) as f64;
    let c10 = report(
        10,
        "ML100K relation-mining accuracy",
        !rows.is_empty() && min >= 0.75 && mean >= 0.80,
        format!(
            "{} rows, min {min:.4} (need >= 0.75), mean {mean:.4} (need >= 0.80)",
            rows.len()
        ),
    );
    (c9, c10)
}

fn criterion_11() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    let mut points = 0;
    while points < 100 {
        let d = rng.random_range(2..=10);
        let lifted = lift(&random_bqp(d, &mut rng)).unwrap();
        let u = DVector::from_fn(d + 1, |_, _| rng.random_range(-1.0..0.5));
        // keep away from eigenvalues crossing zero, where h is not twice differentiable
        let eig = exact_eigenvalues(&lifted.c_matrix(&u));
        if eig.iter().any(|l| l.abs() < 1e-3) {
            continue;
        }
        let gamma = 100.0;
        let g = dual_gradient(&u, &lifted, gamma).unwrap();
        let fd = fd_gradient(|x| dual_objective(x, &lifted, gamma).unwrap(), &u, None);
        let rel = (&g - &fd).amax() / g.amax().max(1.0);
        worst = worst.max(rel);
        points += 1;
    }
    report(
        11,
        "dual gradient vs central differences",
        worst <= 1e-5,
        format!("{points} points, worst relative error {worst:.2e} (tol 1e-5)"),
    )
}

fn random_lcqp(d: usize, rng: &mut ChaCha8Rng) -> LcqpInstance {
    let n = rng.random_range(1..=2 * d);
    let psis: Vec<IndicatorVector> = (0..n)
        .map(|_| IndicatorVector::new((0..d).map(|_| rng.random()).collect()))
        .collect();
    let ps: Vec<f64> = (0..n).map(|_| rng.random()).collect();
    let refs: Vec<&IndicatorVector> = psis.iter().collect();
    build_lcqp(&refs, &ps).unwrap()
}

fn criterion_12() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut worst_kkt = 0.0f64;
    let mut worst_oracle = 0.0f64;
    let mut oracle_checks = 0;
    for k in 0..100 {
        let d = 2 + k % 15;
        let mut inst = random_lcqp(d, &mut rng);
        if rng.random::<bool>() {
            inst.add_ridge(rng.random_range(0.0..5.0));
        }
        let start = random_simplex(d, &mut rng);
        let out = solve_fw(&inst, &FwConfig::default(), &start).unwrap();
        let th = out.theta.as_slice();
        // with multiplier min_j g_j, the gap sum_j θ_j (g_j - min g) is the
        // complementary-slackness residual; feasibility is checked separately
        let sum: f64 = th.iter().sum();
        let infeasible = th.iter().any(|&x| x < 0.0) || (sum - 1.0).abs() > 1e-12;
        worst_kkt =
            worst_kkt
                .max(duality_gap(&inst, th))
                .max(if infeasible { f64::INFINITY } else { 0.0 });
        if d <= 4 {
            let (_, best) = lcqp_faces(&inst).unwrap();
            worst_oracle = worst_oracle.max((inst.objective(th) - best).abs());
            oracle_checks += 1;
        }
    }
    report(
        12,
        "Frank-Wolfe simplex KKT and face oracle",
        worst_kkt <= 1e-6 && worst_oracle <= 1e-6,
        format!(
            "100 instances, worst KKT residual {worst_kkt:.2e} (tol 1e-6), {oracle_checks} oracle checks, worst |dobj| {worst_oracle:.2e} (tol 1e-6)"
        ),
    )
}

fn criterion_13(exact: &kmlearn::trainer::TrainReport) -> Outcome {
    let h = exact.phase_histogram;
    let share = h.eigensolve_free() as f64 / h.total() as f64;
    report(
        13,
        "enhanced GD iterations without an eigensolve, D=8",
        share >= 0.4,
        format!(
            "{:.1}% (need >= 40%): IA {} IB {} IIA {} IIB {}",
            100.0 * share,
            h.ia,
            h.ib,
            h.iia,
            h.iib
        ),
    )
}

fn main() {
    // libtest flags such as --nocapture are accepted and ignored
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    if filter.iter().any(|f| !"acceptance".contains(f.as_str())) {
        return;
    }
    let t0 = Instant::now();
    let mut outcomes = vec![criterion_1(), criterion_2()];
    let (c3, captured) = criterion_3();
    outcomes.push(c3);
    outcomes.push(criterion_4(&captured));
    let (c7, exact_report, lanczos_stats) = criterion_7();
    outcomes.push(criterion_5(&captured, &[lanczos_stats]));
    outcomes.push(criterion_6());
    outcomes.push(c7);
    outcomes.push(criterion_8());
    let (c9, c10) = criteria_9_10();
    outcomes.push(c9);
    outcomes.push(c10);
    outcomes.push(criterion_11());
    outcomes.push(criterion_12());
    outcomes.push(criterion_13(&exact_report));
    outcomes.sort_by_key(|o| o.id);
    println!();
    for o in &outcomes {
        println!("{}", o.line);
    }

    let passed = outcomes.iter().filter(|o| o.pass).count();
    println!(
        "{passed}/{} criteria passed in {:.0}s",
        outcomes.len(),
        t0.elapsed().as_secs_f64()
    );
    let unexpected: Vec<u32> = outcomes
        .iter()
        .filter(|o| !o.pass && !KNOWN_UNMET.contains(&o.id))
        .map(|o| o.id)
        .collect();
    let known: Vec<u32> = outcomes
        .iter()
        .filter(|o| !o.pass && KNOWN_UNMET.contains(&o.id))
        .map(|o| o.id)
        .collect();
    if !known.is_empty() {
        println!("known unmet: {known:?}");
    }
    if !unexpected.is_empty() {
        println!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
