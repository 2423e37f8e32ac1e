//! Brute-force references for checking the solvers. Nothing in the training
//! path calls into this module.

use nalgebra::DVector;

use crate::bqp::BqpInstance;
use crate::error::{KmError, Result};
use crate::lcqp::{face_stationary_point, LcqpInstance};
use crate::model::IndicatorVector;

/// Largest dimension [`bqp_exhaustive`] will enumerate.
pub const MAX_EXHAUSTIVE_DIM: usize = 20;
/// Largest dimension [`lcqp_faces`] will enumerate.
pub const MAX_FACE_DIM: usize = 16;

#[derive(Clone, Debug, PartialEq)]
pub struct OracleResult {
    pub best_psi: IndicatorVector,
    pub best_objective: f64,
    pub worst_objective: f64,
    pub full_table: Option<Vec<(IndicatorVector, f64)>>,
}

fn psi_of(mask: u32, d: usize) -> IndicatorVector {
    // bit (d-1-k) holds entry k so counting order is lexicographic
    IndicatorVector::new((0..d).map(|k| mask >> (d - 1 - k) & 1 == 1).collect())
}

/// Global minimum of `ψᵀSψ − 2ψᵀv` by enumeration. Ties go to the
/// lexicographically smallest ψ.
pub fn bqp_exhaustive(inst: &BqpInstance, keep_table: bool) -> Result<OracleResult> {
    let d = inst.dim();
    if d > MAX_EXHAUSTIVE_DIM {
        return Err(KmError::Precondition(format!(
            "exhaustive search limited to D <= {MAX_EXHAUSTIVE_DIM}, got {d}"
        )));
    }
    let mut table = keep_table.then(Vec::new);
    let mut best = (IndicatorVector::zeros(d), f64::INFINITY);
    let mut worst = f64::NEG_INFINITY;
    for mask in 0..(1u32 << d) {
        let psi = psi_of(mask, d);
        let f = inst.objective(&psi);
        if f < best.1 {
            best = (psi.clone(), f);
        }
        worst = worst.max(f);
        if let Some(t) = table.as_mut() {
            t.push((psi, f));
        }
    }
    Ok(OracleResult {
        best_psi: best.0,
        best_objective: best.1,
        worst_objective: worst,
        full_table: table,
    })
}

/// Central differences `(f(u + h e_k) − f(u − h e_k)) / 2h`. The default step
/// is `1e-5 · max(1, ‖u‖∞)`.
pub fn fd_gradient<F: FnMut(&DVector<f64>) -> f64>(
    mut f: F,
    u: &DVector<f64>,
    h: Option<f64>,
) -> DVector<f64> {
    let h = h.unwrap_or_else(|| 1e-5 * u.amax().max(1.0));
    let mut g = DVector::zeros(u.len());
    let mut x = u.clone();
    for k in 0..u.len() {
        x[k] = u[k] + h;
        let fp = f(&x);
        x[k] = u[k] - h;
        let fm = f(&x);
        x[k] = u[k];
        g[k] = (fp - fm) / (2.0 * h);
    }
    g
}

/// Minimum of `θᵀQθ − 2θᵀw` over the simplex by solving the stationarity
/// system on every face and keeping the feasible solutions.
pub fn lcqp_faces(inst: &LcqpInstance) -> Result<(Vec<f64>, f64)> {
    let d = inst.dim();
    if d > MAX_FACE_DIM {
        return Err(KmError::Precondition(format!(
            "face enumeration limited to D <= {MAX_FACE_DIM}, got {d}"
        )));
    }
    let mut best: Option<(Vec<f64>, f64)> = None;
    for mask in 1u32..(1u32 << d) {
        let support: Vec<usize> = (0..d).filter(|&k| mask >> k & 1 == 1).collect();
        let Some(x) = face_stationary_point(inst, &support) else {
            continue;
        };
        if x.iter().any(|&v| v < -1e-12) {
            continue;
        }
        let mut theta = vec![0.0; d];
        for (r, &a) in support.iter().enumerate() {
            theta[a] = x[r].max(0.0);
        }
        let s: f64 = theta.iter().sum();
        theta.iter_mut().for_each(|v| *v /= s);
        let f = inst.objective(&theta);
        if best.as_ref().is_none_or(|b| f < b.1) {
            best = Some((theta, f));
        }
    }
    // every vertex is a feasible one-element face, so something was found
    best.ok_or_else(|| KmError::Precondition("no feasible face".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::DMatrix;

    #[test]
    fn exhaustive_example() {
        let inst = BqpInstance::new(
            DMatrix::identity(2, 2),
            DVector::from_vec(vec![1.0, 0.25]),
            0.0,
        )
        .unwrap();
        let r = bqp_exhaustive(&inst, true).unwrap();
        assert_eq!(r.best_psi, IndicatorVector::from_binary(&[1, 0]).unwrap());
        assert_abs_diff_eq!(r.best_objective, -1.0, epsilon = 1e-15);
        let vals: Vec<f64> = r.full_table.unwrap().iter().map(|x| x.1).collect();
        assert_eq!(vals, vec![0.0, 0.5, -1.0, -0.5]);
    }

    #[test]
    fn exhaustive_ties_and_extremes() {
        let z = BqpInstance::new(DMatrix::zeros(3, 3), DVector::zeros(3), 0.0).unwrap();
        let r = bqp_exhaustive(&z, false).unwrap();
        assert_eq!(r.best_psi, IndicatorVector::zeros(3));
        assert_eq!(r.best_objective, 0.0);
        let big = BqpInstance::new(
            DMatrix::identity(3, 3),
            DVector::from_element(3, 100.0),
            0.0,
        )
        .unwrap();
        assert_eq!(
            bqp_exhaustive(&big, false).unwrap().best_psi,
            IndicatorVector::ones(3)
        );
        let huge = BqpInstance::new(DMatrix::zeros(21, 21), DVector::zeros(21), 0.0).unwrap();
        assert!(bqp_exhaustive(&huge, false).is_err());
    }

    #[test]
    fn fd_exact_on_linear_and_quadratic() {
        let u = DVector::from_vec(vec![0.3, -1.2, 4.0]);
        let g = fd_gradient(|x| x.sum(), &u, None);
        for k in 0..3 {
            assert_abs_diff_eq!(g[k], 1.0, epsilon = 1e-9);
        }
        let g = fd_gradient(|x| x.norm_squared(), &u, Some(1e-3));
        for k in 0..3 {
            assert_abs_diff_eq!(g[k], 2.0 * u[k], epsilon = 1e-9);
        }
    }

    #[test]
    fn faces_examples() {
        let l = LcqpInstance {
            q: DMatrix::identity(2, 2),
            w: DVector::from_vec(vec![1.0, 0.0]),
            rho: 0.0,
        };
        let (t, f) = lcqp_faces(&l).unwrap();
        assert_abs_diff_eq!(t[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(f, -1.0, epsilon = 1e-12);
        let l = LcqpInstance {
            q: DMatrix::identity(2, 2) * 2.0,
            w: DVector::from_vec(vec![1.0, 1.0]),
            rho: 0.0,
        };
        let (t, _) = lcqp_faces(&l).unwrap();
        assert_abs_diff_eq!(t[0], 0.5, epsilon = 1e-12);
    }
}
