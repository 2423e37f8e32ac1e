//! Gaussian randomization: turn the dual solution into a binary ψ.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::bqp::{
    lift, positive_eigenpairs, solve_dual, BqpInstance, DualConfig, DualState, EigMode, LiftedBqp,
    Method,
};
use crate::error::{KmError, Result};
use crate::model::IndicatorVector;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundingConfig {
    pub i_rand: usize,
    pub seed: u64,
}

impl Default for RoundingConfig {
    fn default() -> Self {
        Self {
            i_rand: 100,
            seed: 0,
        }
    }
}

/// `L` with `LLᵀ = X*`, one column `√(γλ_j) v_j` per positive eigenpair.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorizedX {
    pub l: DMatrix<f64>,
}

impl FactorizedX {
    pub fn rank(&self) -> usize {
        self.l.ncols()
    }

    pub fn is_degenerate(&self) -> bool {
        self.l.ncols() == 0
    }
}

pub fn factorize(values: &[f64], vectors: &DMatrix<f64>, gamma: f64) -> Result<FactorizedX> {
    if values.len() != vectors.ncols() {
        return Err(KmError::DimensionMismatch {
            expected: vectors.ncols(),
            found: values.len(),
        });
    }
    if let Some(bad) = values.iter().find(|&&l| !(l > 0.0)) {
        return Err(KmError::Precondition(format!(
            "factorize needs positive eigenvalues, got {bad}"
        )));
    }
    let mut l = vectors.clone();
    for (j, &lam) in values.iter().enumerate() {
        l.column_mut(j).scale_mut((gamma * lam).sqrt());
    }
    Ok(FactorizedX { l })
}

fn sign(v: f64) -> f64 {
    if v >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// Samples `x̃ = sign(Lξ)` with `ξ ~ N(0, I)`, keeps the sample minimizing
/// `x̃ᵀAx̃` (first one on ties) and maps it back to ψ. With no positive
/// eigenpairs the samples are uniform sign vectors with leading entry +1.
pub fn round(
    lifted: &LiftedBqp,
    fac: &FactorizedX,
    cfg: &RoundingConfig,
) -> Result<IndicatorVector> {
    if cfg.i_rand == 0 {
        return Err(KmError::Validation("i_rand must be at least 1".into()));
    }
    let n = lifted.dim() + 1;
    if !fac.is_degenerate() && fac.l.nrows() != n {
        return Err(KmError::DimensionMismatch {
            expected: n,
            found: fac.l.nrows(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut xt = vec![0.0; n];
    for _ in 0..cfg.i_rand {
        if fac.is_degenerate() {
            xt[0] = 1.0;
            for x in xt.iter_mut().skip(1) {
                *x = if rng.random::<bool>() { 1.0 } else { -1.0 };
            }
        } else {
            let xi = DVector::from_fn(fac.rank(), |_, _| rng.sample::<f64, _>(StandardNormal));
            let y = &fac.l * xi;
            for (x, yv) in xt.iter_mut().zip(y.iter()) {
                *x = sign(*yv);
            }
        }
        let f = lifted.homogenized_objective(&xt);
        if best.as_ref().is_none_or(|b| f < b.0) {
            best = Some((f, xt.clone()));
        }
    }
    let (_, x) = best.expect("i_rand >= 1");
    Ok(recover_psi(&x))
}

/// `ψ = (x̃(0)·x̃(1..) + 1) / 2`.
pub fn recover_psi(xt: &[f64]) -> IndicatorVector {
    let lead = xt[0];
    IndicatorVector::new(xt[1..].iter().map(|&x| lead * x > 0.0).collect())
}

/// Dual solve followed by randomization.
pub fn solve_bqp(
    inst: &BqpInstance,
    dual: &DualConfig,
    method: Method,
    rounding: &RoundingConfig,
) -> Result<(IndicatorVector, DualState)> {
    let lifted = lift(inst)?;
    let n = inst.dim() + 1;
    let state = solve_dual(&lifted, dual, method, &DVector::from_element(n, 1.0))?;
    let mode = match method {
        Method::PlainGd => EigMode::Exact,
        Method::EnhancedGd => dual.eig_mode,
    };
    let (vals, vecs) = positive_eigenpairs(&lifted, &state.u, mode, dual.lanczos_a)?;
    let fac = factorize(&vals, &vecs, dual.gamma)?;
    let psi = round(&lifted, &fac, rounding)?;
    Ok((psi, state))
}

/// Mixes `(seed, a, b)` into one seed so parallel solves get independent,
/// reproducible streams.
pub fn derive_seed(seed: u64, a: u64, b: u64) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    mix(mix(mix(seed) ^ a) ^ b)
}
