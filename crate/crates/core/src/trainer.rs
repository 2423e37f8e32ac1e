//! Block coordinate descent: alternate all-item binary solves and all-user
//! simplex solves.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bqp::{build_bqp, DualConfig, LanczosStats, Method, PhaseCounts};
use crate::error::{KmError, Result};
use crate::lcqp::{build_lcqp, solve_fw, FwConfig};
use crate::model::{
    test_nrmse, training_rmse, Evaluation, IndicatorVector, KmParams, RatingDataset, SimplexVector,
    MIN_DIM,
};
use crate::rounding::{derive_seed, solve_bqp, RoundingConfig};

const INIT_STREAM: u64 = u64::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub dim: usize,
    pub i_bcd: usize,
    pub method: Method,
    pub dual: DualConfig,
    /// Only `i_rand` is used; rounding seeds derive from `seed`.
    pub rounding: RoundingConfig,
    pub fw: FwConfig,
    pub lambda_u: f64,
    pub mu_i: f64,
    pub seed: u64,
    /// Worker threads; 0 means one per core.
    pub parallelism: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            dim: 8,
            i_bcd: 15,
            method: Method::EnhancedGd,
            dual: DualConfig::default(),
            rounding: RoundingConfig::default(),
            fw: FwConfig::default(),
            lambda_u: 0.0,
            mu_i: 0.0,
            seed: 0,
            parallelism: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim < MIN_DIM {
            return Err(KmError::Validation(format!(
                "dimension must be at least {MIN_DIM}, got {}",
                self.dim
            )));
        }
        if self.i_bcd == 0 {
            return Err(KmError::Validation("i_bcd must be positive".into()));
        }
        if self.rounding.i_rand == 0 {
            return Err(KmError::Validation("i_rand must be positive".into()));
        }
        if !(self.lambda_u >= 0.0) || !(self.mu_i >= 0.0) {
            return Err(KmError::Validation(
                "regularization weights must be nonnegative".into(),
            ));
        }
        self.dual.validate()?;
        self.fw.validate()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub rmse_per_iteration: Vec<f64>,
    /// Test-split RMSE after each iteration, empty without test triples.
    pub test_rmse_per_iteration: Vec<f64>,
    pub wall_time_lcqp: f64,
    pub wall_time_bqp: f64,
    pub phase_histogram: PhaseCounts,
    pub dual_iterations: usize,
    pub dual_converged: usize,
    pub dual_not_converged: usize,
    pub eigensolves: usize,
    pub lanczos: LanczosStats,
    pub fw_converged: usize,
    pub fw_not_converged: usize,
    pub test_evaluation: Option<Evaluation>,
}

/// Symmetric Dirichlet(1) draw per user, each from its own stream.
pub fn init_theta(
    users: &[usize],
    dim: usize,
    seed: u64,
) -> Result<BTreeMap<usize, SimplexVector>> {
    if dim < MIN_DIM {
        return Err(KmError::Validation(format!(
            "dimension must be at least {MIN_DIM}, got {dim}"
        )));
    }
    users
        .iter()
        .map(|&u| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, u as u64, INIT_STREAM));
            let w: Vec<f64> = (0..dim)
                .map(|_| {
                    let e: f64 = Exp1.sample(&mut rng);
                    e + f64::MIN_POSITIVE
                })
                .collect();
            let s: f64 = w.iter().sum();
            Ok((u, SimplexVector::new(w.iter().map(|x| x / s).collect())?))
        })
        .collect()
}

/// Train-split ratings grouped both ways.
struct Incidence {
    by_item: BTreeMap<usize, Vec<(usize, f64)>>,
    by_user: BTreeMap<usize, Vec<(usize, f64)>>,
}

impl Incidence {
    fn new(data: &RatingDataset) -> Self {
        let mut by_item: BTreeMap<usize, Vec<(usize, f64)>> = BTreeMap::new();
        let mut by_user: BTreeMap<usize, Vec<(usize, f64)>> = BTreeMap::new();
        for r in data.train() {
            by_item.entry(r.item).or_default().push((r.user, r.p));
            by_user.entry(r.user).or_default().push((r.item, r.p));
        }
        Self { by_item, by_user }
    }
}

struct ItemOutcome {
    psi: IndicatorVector,
    phase_counts: PhaseCounts,
    iterations: usize,
    converged: bool,
    eigensolves: usize,
    lanczos: LanczosStats,
}

fn item_step(
    item: usize,
    raters: &[(usize, f64)],
    theta: &BTreeMap<usize, SimplexVector>,
    cfg: &TrainConfig,
    tau: usize,
) -> Result<ItemOutcome> {
    let thetas: Vec<&SimplexVector> = raters.iter().map(|(u, _)| &theta[u]).collect();
    let ps: Vec<f64> = raters.iter().map(|(_, p)| *p).collect();
    let mut inst = build_bqp(&thetas, &ps)?;
    if cfg.mu_i > 0.0 {
        inst.add_ridge(cfg.mu_i);
    }
    let rounding = RoundingConfig {
        i_rand: cfg.rounding.i_rand,
        seed: derive_seed(cfg.seed, item as u64, tau as u64),
    };
    let (psi, st) = solve_bqp(&inst, &cfg.dual, cfg.method, &rounding)?;
    Ok(ItemOutcome {
        psi,
        phase_counts: st.phase_counts,
        iterations: st.iterations,
        converged: st.converged,
        eigensolves: st.eigensolves,
        lanczos: st.lanczos,
    })
}

fn user_step(
    rated: &[(usize, f64)],
    psi: &BTreeMap<usize, IndicatorVector>,
    prev: &SimplexVector,
    cfg: &TrainConfig,
) -> Result<(SimplexVector, bool)> {
    let psis: Vec<&IndicatorVector> = rated.iter().map(|(i, _)| &psi[i]).collect();
    let ps: Vec<f64> = rated.iter().map(|(_, p)| *p).collect();
    let mut inst = build_lcqp(&psis, &ps)?;
    if cfg.lambda_u > 0.0 {
        inst.add_ridge(cfg.lambda_u);
    }
    let out = solve_fw(&inst, &cfg.fw, prev)?;
    Ok((out.theta, out.converged))
}

fn pool(parallelism: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism)
        .build()
        .map_err(|e| KmError::Precondition(format!("cannot start worker pool: {e}")))
}

/// Runs `cfg.i_bcd` sweeps, each updating every item's ψ and then every
/// user's θ. Results are identical for any `parallelism`.
pub fn bcd_train(data: &RatingDataset, cfg: &TrainConfig) -> Result<(KmParams, TrainReport)> {
    cfg.validate()?;
    let inc = Incidence::new(data);
    if inc.by_item.is_empty() {
        return Err(KmError::Validation("training set is empty".into()));
    }
    let users: Vec<usize> = inc.by_user.keys().copied().collect();
    let mut theta = init_theta(&users, cfg.dim, cfg.seed)?;
    let mut psi: BTreeMap<usize, IndicatorVector> = BTreeMap::new();
    let mut report = TrainReport::default();
    let has_test = data.test().next().is_some();
    let workers = pool(cfg.parallelism)?;

    for tau in 0..cfg.i_bcd {
        let t0 = Instant::now();
        let items: Vec<(&usize, &Vec<(usize, f64)>)> = inc.by_item.iter().collect();
        let outcomes: Vec<Result<(usize, ItemOutcome)>> = workers.install(|| {
            items
                .par_iter()
                .map(|(&i, raters)| item_step(i, raters, &theta, cfg, tau).map(|o| (i, o)))
                .collect()
        });
        for res in outcomes {
            let (i, o) = res?;
            report.phase_histogram.merge(&o.phase_counts);
            report.dual_iterations += o.iterations;
            report.eigensolves += o.eigensolves;
            report.lanczos.merge(&o.lanczos);
            if o.converged {
                report.dual_converged += 1;
            } else {
                report.dual_not_converged += 1;
            }
            psi.insert(i, o.psi);
        }
        report.wall_time_bqp += t0.elapsed().as_secs_f64();

        let t1 = Instant::now();
        let user_rows: Vec<(&usize, &Vec<(usize, f64)>)> = inc.by_user.iter().collect();
        let updates: Vec<Result<(usize, SimplexVector, bool)>> = workers.install(|| {
            user_rows
                .par_iter()
                .map(|(&u, rated)| user_step(rated, &psi, &theta[&u], cfg).map(|(t, c)| (u, t, c)))
                .collect()
        });
        for res in updates {
            let (u, t, conv) = res?;
            if conv {
                report.fw_converged += 1;
            } else {
                report.fw_not_converged += 1;
            }
            theta.insert(u, t);
        }
        report.wall_time_lcqp += t1.elapsed().as_secs_f64();

        let params = KmParams::new(cfg.dim, theta.clone(), psi.clone())?;
        let rmse = training_rmse(&params, data)?;
        report.rmse_per_iteration.push(rmse);
        if has_test {
            if let Ok(ev) = test_nrmse(&params, data) {
                report.test_rmse_per_iteration.push(ev.rmse);
            }
        }
        log::info!(
            "BCD iteration {}/{}: training RMSE {rmse:.6}",
            tau + 1,
            cfg.i_bcd
        );
    }

    let params = KmParams::new(cfg.dim, theta, psi)?;
    if has_test {
        report.test_evaluation = test_nrmse(&params, data).ok();
    }
    Ok((params, report))
}

/// `θ_uᵀψ_i` per pair, `None` for untrained users or items.
pub fn predict(params: &KmParams, pairs: &[(usize, usize)]) -> Vec<Option<f64>> {
    pairs
        .iter()
        .map(|&(u, i)| params.predict_one(u, i))
        .collect()
}
