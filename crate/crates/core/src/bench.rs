//! Timing harnesses behind `bench-bqp` and `bench-eig`.

use std::time::Instant;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::bqp::{build_bqp, lift, solve_enhanced_gd, DualConfig, EigMode, Method};
use crate::eigen::{exact_evd, thresholded_lanczos};
use crate::error::{KmError, Result};
use crate::model::{RatingDataset, SimplexVector};
use crate::trainer::{bcd_train, init_theta, TrainConfig};

/// One training run's BQP cost under a given solver variant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BqpBenchRow {
    pub method: Method,
    pub eig_mode: EigMode,
    pub dim: usize,
    pub i_bcd: usize,
    pub bqp_seconds: f64,
    pub lcqp_seconds: f64,
    pub dual_iterations: usize,
    pub eigensolves: usize,
    pub eigensolve_free_share: f64,
    pub final_rmse: f64,
}

pub const BQP_BENCH_HEADER: &str = "method,eig_mode,dim,i_bcd,bqp_seconds,lcqp_seconds,dual_iterations,eigensolves,eigensolve_free_share,final_rmse";

impl BqpBenchRow {
    pub fn csv_line(&self) -> String {
        let method = match self.method {
            Method::PlainGd => "plain-gd",
            Method::EnhancedGd => "enhanced-gd",
        };
        let mode = match self.eig_mode {
            EigMode::Exact => "exact",
            EigMode::Lanczos => "lanczos",
        };
        format!(
            "{method},{mode},{},{},{:.6},{:.6},{},{},{:.6},{:.6}",
            self.dim,
            self.i_bcd,
            self.bqp_seconds,
            self.lcqp_seconds,
            self.dual_iterations,
            self.eigensolves,
            self.eigensolve_free_share,
            self.final_rmse
        )
    }
}

/// The three solver variants: plain GD, enhanced GD with exact
/// eigendecompositions, enhanced GD with Lanczos.
pub const BQP_VARIANTS: [(Method, EigMode); 3] = [
    (Method::PlainGd, EigMode::Exact),
    (Method::EnhancedGd, EigMode::Exact),
    (Method::EnhancedGd, EigMode::Lanczos),
];

/// Trains once per variant with otherwise identical settings.
pub fn bench_bqp(
    data: &RatingDataset,
    base: &TrainConfig,
    variants: &[(Method, EigMode)],
) -> Result<Vec<BqpBenchRow>> {
    let mut rows = Vec::with_capacity(variants.len());
    for &(method, eig_mode) in variants {
        let mut cfg = *base;
        cfg.method = method;
        cfg.dual.eig_mode = eig_mode;
        let (_, rep) = bcd_train(data, &cfg)?;
        let total = rep.phase_histogram.total();
        rows.push(BqpBenchRow {
            method,
            eig_mode,
            dim: cfg.dim,
            i_bcd: cfg.i_bcd,
            bqp_seconds: rep.wall_time_bqp,
            lcqp_seconds: rep.wall_time_lcqp,
            dual_iterations: rep.dual_iterations,
            eigensolves: rep.eigensolves,
            eigensolve_free_share: if total == 0 {
                0.0
            } else {
                rep.phase_histogram.eigensolve_free() as f64 / total as f64
            },
            final_rmse: rep.rmse_per_iteration.last().copied().unwrap_or(f64::NAN),
        });
    }
    Ok(rows)
}

/// Exact vs thresholded Lanczos on one `C(u*)` matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigBenchRow {
    pub dim: usize,
    pub item: usize,
    pub exact_seconds: f64,
    pub lanczos_seconds: f64,
    pub m: usize,
    pub beta_next: f64,
    pub delta: f64,
    pub dominant_error: f64,
    pub cap_ratio: f64,
}

pub const EIG_BENCH_HEADER: &str =
    "dim,item,exact_seconds,lanczos_seconds,m,beta_next,delta,dominant_error,cap_ratio";

impl EigBenchRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{:.9},{:.9},{},{:.6e},{:.6e},{:.6e},{:.6}",
            self.dim,
            self.item,
            self.exact_seconds,
            self.lanczos_seconds,
            self.m,
            self.beta_next,
            self.delta,
            self.dominant_error,
            self.cap_ratio
        )
    }
}

/// For up to `max_items` items, builds the item's BQP from freshly
/// initialized θ, solves the dual, and times both eigensolvers on `C(u*)`
/// over `repeats` runs each.
pub fn bench_eig(
    data: &RatingDataset,
    dim: usize,
    dual: &DualConfig,
    seed: u64,
    max_items: usize,
    repeats: usize,
) -> Result<Vec<EigBenchRow>> {
    if repeats == 0 {
        return Err(KmError::Validation("repeats must be at least 1".into()));
    }
    let mut by_item: std::collections::BTreeMap<usize, Vec<(usize, f64)>> = Default::default();
    for r in data.train() {
        by_item.entry(r.item).or_default().push((r.user, r.p));
    }
    let mut users: Vec<usize> = data.train().map(|r| r.user).collect();
    users.sort_unstable();
    users.dedup();
    let theta = init_theta(&users, dim, seed)?;
    let mut rows = Vec::new();
    for (&item, raters) in by_item.iter().take(max_items) {
        let thetas: Vec<&SimplexVector> = raters.iter().map(|(u, _)| &theta[u]).collect();
        let ps: Vec<f64> = raters.iter().map(|(_, p)| *p).collect();
        let lifted = lift(&build_bqp(&thetas, &ps)?)?;
        let st = solve_enhanced_gd(&lifted, dual, &DVector::from_element(dim + 1, 1.0))?;
        let c = lifted.c_matrix(&st.u);

        let t0 = Instant::now();
        let mut exact = exact_evd(&c)?;
        for _ in 1..repeats {
            exact = exact_evd(&c)?;
        }
        let exact_seconds = t0.elapsed().as_secs_f64() / repeats as f64;

        let t1 = Instant::now();
        let mut run = thresholded_lanczos(&c, dual.lanczos_a)?;
        for _ in 1..repeats {
            run = thresholded_lanczos(&c, dual.lanczos_a)?;
        }
        let lanczos_seconds = t1.elapsed().as_secs_f64() / repeats as f64;

        let m = run.factorization.m();
        let top = run
            .pairs
            .values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        rows.push(EigBenchRow {
            dim,
            item,
            exact_seconds,
            lanczos_seconds,
            m,
            beta_next: run.factorization.beta_next,
            delta: run.threshold.delta,
            dominant_error: (exact.max_value() - top).abs(),
            cap_ratio: run.factorization.beta_next / run.threshold.beta_cap(m),
        });
    }
    Ok(rows)
}
