//! The θ-block subproblem: minimize `θᵀQθ − 2θᵀw` over the probability
//! simplex with Frank-Wolfe and exact line search.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{KmError, Result};
use crate::model::{IndicatorVector, SimplexVector};

#[derive(Clone, Debug, PartialEq)]
pub struct LcqpInstance {
    pub q: DMatrix<f64>,
    pub w: DVector<f64>,
    pub rho: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FwConfig {
    pub max_iters: usize,
    /// Stop once the duality gap falls to this value.
    pub tol: f64,
    /// Every 25 iterations and once at the end, run an active-set pass on
    /// the current support.
    pub polish: bool,
}

impl Default for FwConfig {
    fn default() -> Self {
        Self {
            max_iters: 500,
            tol: 1e-7,
            polish: true,
        }
    }
}

impl FwConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(KmError::Validation("FW max_iters must be positive".into()));
        }
        if !(self.tol > 0.0) {
            return Err(KmError::Validation(format!(
                "FW tol must be positive, got {}",
                self.tol
            )));
        }
        Ok(())
    }
}

/// `Q = Σ ψψᵀ`, `w = Σ ψ·p`, `rho = Σ p²`.
pub fn build_lcqp(psis: &[&IndicatorVector], ps: &[f64]) -> Result<LcqpInstance> {
    if psis.len() != ps.len() {
        return Err(KmError::DimensionMismatch {
            expected: psis.len(),
            found: ps.len(),
        });
    }
    let Some(first) = psis.first() else {
        return Err(KmError::Validation("LCQP needs at least one term".into()));
    };
    let d = first.dim();
    let mut q = DMatrix::zeros(d, d);
    let mut w = DVector::zeros(d);
    let mut rho = 0.0;
    let mut support = Vec::with_capacity(d);
    for (psi, &p) in psis.iter().zip(ps) {
        if psi.dim() != d {
            return Err(KmError::DimensionMismatch {
                expected: d,
                found: psi.dim(),
            });
        }
        support.clear();
        support.extend(psi.support());
        for &a in &support {
            w[a] += p;
            for &b in &support {
                q[(a, b)] += 1.0;
            }
        }
        rho += p * p;
    }
    Ok(LcqpInstance { q, w, rho })
}

impl LcqpInstance {
    pub fn dim(&self) -> usize {
        self.w.len()
    }

    /// Adds `lambda · I` to `Q`.
    pub fn add_ridge(&mut self, lambda: f64) {
        for k in 0..self.dim() {
            self.q[(k, k)] += lambda;
        }
    }

    /// `θᵀQθ − 2θᵀw`.
    pub fn objective(&self, theta: &[f64]) -> f64 {
        let t = DVector::from_column_slice(theta);
        (&self.q * &t).dot(&t) - 2.0 * self.w.dot(&t)
    }

    /// Sum of squared residuals, `objective + rho`.
    pub fn squared_error(&self, theta: &[f64]) -> f64 {
        self.objective(theta) + self.rho
    }

    pub fn gradient(&self, theta: &[f64]) -> DVector<f64> {
        let t = DVector::from_column_slice(theta);
        (&self.q * t - &self.w) * 2.0
    }
}

/// Per-solve diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct FwOutcome {
    pub theta: SimplexVector,
    pub iterations: usize,
    pub gap: f64,
    pub converged: bool,
}

fn argmin_first(g: &DVector<f64>) -> usize {
    let mut best = 0;
    for k in 1..g.len() {
        if g[k] < g[best] {
            best = k;
        }
    }
    best
}

/// `⟨θ − e_{j*}, ∇f(θ)⟩`, nonnegative up to rounding.
pub fn duality_gap(inst: &LcqpInstance, theta: &[f64]) -> f64 {
    let g = inst.gradient(theta);
    let j = argmin_first(&g);
    g.iter().zip(theta).map(|(gk, tk)| gk * tk).sum::<f64>() - g[j]
}

/// Minimizer of the objective on the affine hull of the face spanned by
/// `support`, or `None` when it is not attained there.
pub(crate) fn face_stationary_point(
    inst: &LcqpInstance,
    support: &[usize],
) -> Option<DVector<f64>> {
    let k = support.len();
    let mut kkt = DMatrix::zeros(k + 1, k + 1);
    let mut rhs = DVector::zeros(k + 1);
    for (r, &a) in support.iter().enumerate() {
        for (c, &b) in support.iter().enumerate() {
            kkt[(r, c)] = 2.0 * inst.q[(a, b)];
        }
        kkt[(r, k)] = 1.0;
        kkt[(k, r)] = 1.0;
        rhs[r] = 2.0 * inst.w[a];
    }
    rhs[k] = 1.0;
    let scale = kkt.amax().max(1.0);
    let sol = kkt
        .clone()
        .svd(true, true)
        .solve(&rhs, 1e-12 * scale)
        .ok()?;
    let residual = (&kkt * &sol - &rhs).amax();
    if residual > 1e-9 * scale {
        return None;
    }
    Some(sol.rows(0, k).into_owned())
}

/// Active-set pass from `theta`: move toward the minimizer on the current
/// face, dropping the first coordinate that reaches zero, until that
/// minimizer is feasible. Every move is along a segment on which the
/// objective decreases.
fn try_polish(inst: &LcqpInstance, theta: &mut [f64]) -> bool {
    let mut x = theta.to_vec();
    let mut support: Vec<usize> = (0..x.len()).filter(|&k| x[k] > 1e-12).collect();
    let mut moved = false;
    while !support.is_empty() {
        let Some(y) = face_stationary_point(inst, &support) else {
            break;
        };
        let mut t = 1.0;
        let mut blocking = None;
        for (r, &a) in support.iter().enumerate() {
            if y[r] < 0.0 {
                let tr = x[a] / (x[a] - y[r]);
                if tr < t {
                    t = tr;
                    blocking = Some(r);
                }
            }
        }
        for (r, &a) in support.iter().enumerate() {
            x[a] += t * (y[r] - x[a]);
        }
        moved = true;
        match blocking {
            Some(r) => {
                x[support[r]] = 0.0;
                support.remove(r);
            }
            None => break,
        }
    }
    if !moved {
        return false;
    }
    x.iter_mut().for_each(|v| *v = v.max(0.0));
    let total: f64 = x.iter().sum();
    x.iter_mut().for_each(|v| *v /= total);
    if inst.objective(&x) <= inst.objective(theta) {
        theta.copy_from_slice(&x);
        true
    } else {
        false
    }
}

/// Frank-Wolfe from `init`. The objective never increases.
pub fn solve_fw(inst: &LcqpInstance, cfg: &FwConfig, init: &SimplexVector) -> Result<FwOutcome> {
    cfg.validate()?;
    let d = inst.dim();
    if init.dim() != d {
        return Err(KmError::DimensionMismatch {
            expected: d,
            found: init.dim(),
        });
    }
    let mut theta = init.as_slice().to_vec();
    let two_q = &inst.q * 2.0;
    let mut gap = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;
    let polish_every = 25;
    for k in 0..cfg.max_iters {
        let g = inst.gradient(&theta);
        let j = argmin_first(&g);
        gap = g.iter().zip(&theta).map(|(gk, tk)| gk * tk).sum::<f64>() - g[j];
        if gap <= cfg.tol {
            converged = true;
            break;
        }
        if cfg.polish && k > 0 && k % polish_every == 0 && try_polish(inst, &mut theta) {
            iterations += 1;
            continue;
        }
        // direction d = θ − s with s = e_j
        let mut dir = DVector::from_column_slice(&theta);
        dir[j] -= 1.0;
        let slope = g.dot(&dir);
        let curv = (&two_q * &dir).dot(&dir);
        let step = if curv <= 1e-14 {
            2.0 / (k as f64 + 2.0)
        } else {
            (slope / curv).clamp(0.0, 1.0)
        };
        for (t, dv) in theta.iter_mut().zip(dir.iter()) {
            *t -= step * dv;
        }
        iterations += 1;
    }
    if !converged {
        gap = duality_gap(inst, &theta);
        converged = gap <= cfg.tol;
    }
    if !converged && cfg.polish && try_polish(inst, &mut theta) {
        gap = duality_gap(inst, &theta);
        converged = gap <= cfg.tol;
    }
    theta.iter_mut().for_each(|v| *v = v.max(0.0));
    Ok(FwOutcome {
        theta: SimplexVector::new(theta)?,
        iterations,
        gap,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn inst(q: &[f64], w: &[f64]) -> LcqpInstance {
        let d = w.len();
        LcqpInstance {
            q: DMatrix::from_row_slice(d, d, q),
            w: DVector::from_column_slice(w),
            rho: 0.0,
        }
    }

    #[test]
    fn build_single_term() {
        let psi = IndicatorVector::from_binary(&[1, 0]).unwrap();
        let l = build_lcqp(&[&psi], &[0.5]).unwrap();
        assert_eq!(l.q, DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]));
        assert_eq!(l.w.as_slice(), &[0.5, 0.0]);
        assert_eq!(l.rho, 0.25);
        let doubled = build_lcqp(&[&psi, &psi], &[0.5, 0.5]).unwrap();
        assert_eq!(doubled.q, &l.q * 2.0);
        assert!(build_lcqp(&[], &[]).is_err());
        assert!(build_lcqp(&[&psi], &[0.1, 0.2]).is_err());
    }

    #[test]
    fn squared_error_matches_residuals() {
        let a = IndicatorVector::from_binary(&[1, 0, 1]).unwrap();
        let b = IndicatorVector::from_binary(&[0, 1, 1]).unwrap();
        let l = build_lcqp(&[&a, &b], &[0.9, 0.2]).unwrap();
        let th = [0.5, 0.2, 0.3];
        let direct = (0.9f64 - 0.8).powi(2) + (0.2f64 - 0.5).powi(2);
        assert_abs_diff_eq!(l.squared_error(&th), direct, epsilon = 1e-14);
    }

    #[test]
    fn vertex_optimum() {
        let l = inst(&[1.0, 0.0, 0.0, 1.0], &[1.0, 0.0]);
        let out = solve_fw(
            &l,
            &FwConfig::default(),
            &SimplexVector::uniform(2).unwrap(),
        )
        .unwrap();
        assert_abs_diff_eq!(out.theta.as_slice()[0], 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(l.objective(out.theta.as_slice()), -1.0, epsilon = 1e-9);
    }

    #[test]
    fn interior_optimum() {
        let l = inst(&[2.0, 0.0, 0.0, 2.0], &[1.0, 1.0]);
        let init = SimplexVector::new(vec![0.9, 0.1]).unwrap();
        let out = solve_fw(&l, &FwConfig::default(), &init).unwrap();
        assert_abs_diff_eq!(out.theta.as_slice()[0], 0.5, epsilon = 1e-7);
        assert!(out.converged);
    }

    #[test]
    fn flat_objective_returns_init() {
        let l = inst(&[0.0; 4], &[0.0, 0.0]);
        let init = SimplexVector::new(vec![0.3, 0.7]).unwrap();
        let out = solve_fw(&l, &FwConfig::default(), &init).unwrap();
        assert_eq!(out.theta, init);
        assert_eq!(out.iterations, 0);
    }

    #[test]
    fn config_validation() {
        let l = inst(&[1.0, 0.0, 0.0, 1.0], &[1.0, 0.0]);
        let bad = FwConfig {
            tol: 0.0,
            ..FwConfig::default()
        };
        assert!(solve_fw(&l, &bad, &SimplexVector::uniform(2).unwrap()).is_err());
        assert!(solve_fw(
            &l,
            &FwConfig::default(),
            &SimplexVector::uniform(3).unwrap()
        )
        .is_err());
    }

    fn random_instance() -> impl Strategy<Value = (LcqpInstance, Vec<f64>)> {
        (2usize..10).prop_flat_map(|d| {
            (
                proptest::collection::vec(proptest::collection::vec(any::<bool>(), d), 1..12),
                proptest::collection::vec(0.0f64..1.0, 12),
                proptest::collection::vec(0.01f64..1.0, d),
            )
                .prop_map(|(rows, ps, init)| {
                    let psis: Vec<IndicatorVector> =
                        rows.into_iter().map(IndicatorVector::new).collect();
                    let refs: Vec<&IndicatorVector> = psis.iter().collect();
                    let l = build_lcqp(&refs, &ps[..refs.len()]).unwrap();
                    let s: f64 = init.iter().sum();
                    (l, init.iter().map(|v| v / s).collect())
                })
        })
    }

    proptest! {
        #[test]
        fn iterates_stay_feasible_and_descend((l, init) in random_instance()) {
            let init = SimplexVector::new(init).unwrap();
            let mut theta = init.clone();
            let mut prev = l.objective(theta.as_slice());
            // one FW step at a time to observe monotonicity
            for _ in 0..30 {
                let cfg = FwConfig { max_iters: 1, tol: 1e-12, polish: false };
                theta = solve_fw(&l, &cfg, &theta).unwrap().theta;
                let f = l.objective(theta.as_slice());
                prop_assert!(f <= prev + 1e-12);
                prop_assert!(theta.as_slice().iter().all(|&v| v >= 0.0));
                prop_assert!((theta.as_slice().iter().sum::<f64>() - 1.0).abs() < 1e-12);
                prev = f;
            }
        }

        #[test]
        fn termination_certifies_kkt((l, init) in random_instance()) {
            let init = SimplexVector::new(init).unwrap();
            let out = solve_fw(&l, &FwConfig::default(), &init).unwrap();
            prop_assert!(l.objective(out.theta.as_slice()) <= l.objective(init.as_slice()) + 1e-12);
            if out.converged {
                let g = l.gradient(out.theta.as_slice());
                let gt: f64 = g.iter().zip(out.theta.as_slice()).map(|(a, b)| a * b).sum();
                for j in 0..l.dim() {
                    prop_assert!(g[j] - gt >= -1e-7 - 1e-12);
                }
            }
        }
    }
}
