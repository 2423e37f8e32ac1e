//! Symmetric eigendecomposition: the exact dense solver used as the
//! reference path, and a Lanczos approximation with full
//! reorthogonalization, Ritz extraction, residual-based error bounds and a
//! trace-based stopping threshold.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{KmError, Result};

/// Largest tolerated `|C − Cᵀ|` entry, relative to `max(1, max|C|)`.
pub const SYMMETRY_TOL: f64 = 1e-10;

pub(crate) fn asymmetry(c: &DMatrix<f64>) -> f64 {
    let n = c.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((c[(i, j)] - c[(j, i)]).abs());
        }
    }
    worst
}

pub(crate) fn check_symmetric(c: &DMatrix<f64>, tol: f64) -> Result<()> {
    if c.nrows() != c.ncols() {
        return Err(KmError::DimensionMismatch {
            expected: c.nrows(),
            found: c.ncols(),
        });
    }
    let scale = c.amax().max(1.0);
    let asym = asymmetry(c);
    if asym > tol * scale {
        return Err(KmError::NotSymmetric(asym));
    }
    Ok(())
}

/// Eigenvalues in descending order with matching orthonormal eigenvector
/// columns.
#[derive(Clone, Debug)]
pub struct SymmetricSpectrum {
    pub values: DVector<f64>,
    pub vectors: DMatrix<f64>,
}

impl SymmetricSpectrum {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_value(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `V diag(λ) Vᵀ`.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let scaled = &self.vectors * DMatrix::from_diagonal(&self.values);
        scaled * self.vectors.transpose()
    }
}

fn sorted_desc(values: DVector<f64>, vectors: DMatrix<f64>) -> SymmetricSpectrum {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let vals = DVector::from_iterator(order.len(), order.iter().map(|&k| values[k]));
    let vecs = DMatrix::from_fn(vectors.nrows(), order.len(), |r, c| vectors[(r, order[c])]);
    SymmetricSpectrum {
        values: vals,
        vectors: vecs,
    }
}

/// Full dense eigendecomposition of a symmetric matrix.
pub fn exact_evd(c: &DMatrix<f64>) -> Result<SymmetricSpectrum> {
    check_symmetric(c, SYMMETRY_TOL)?;
    Ok(exact_evd_unchecked(c))
}

pub(crate) fn exact_evd_unchecked(c: &DMatrix<f64>) -> SymmetricSpectrum {
    let eig = SymmetricEigen::new(c.clone());
    sorted_desc(eig.eigenvalues, eig.eigenvectors)
}

/// Eigenvalues only, descending. Cheaper than [`exact_evd`] since no
/// eigenvectors are accumulated.
pub fn exact_eigenvalues(c: &DMatrix<f64>) -> DVector<f64> {
    let mut v: Vec<f64> = c.clone().symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(|a, b| b.total_cmp(a));
    DVector::from_vec(v)
}

/// Partial Lanczos tridiagonalization `P_mᵀ C P_m = H_m`.
#[derive(Clone, Debug)]
pub struct LanczosFactorization {
    /// `n × m`, orthonormal columns.
    pub basis: DMatrix<f64>,
    /// Diagonal of `H_m` (`α_1..α_m`).
    pub alpha: Vec<f64>,
    /// Off-diagonal of `H_m` (`β_2..β_m`).
    pub beta: Vec<f64>,
    /// Residual norm `β_{m+1}` of the last recurrence step.
    pub beta_next: f64,
}

impl LanczosFactorization {
    pub fn m(&self) -> usize {
        self.alpha.len()
    }

    pub fn tridiagonal(&self) -> DMatrix<f64> {
        let m = self.m();
        let mut h = DMatrix::zeros(m, m);
        for j in 0..m {
            h[(j, j)] = self.alpha[j];
        }
        for (j, &b) in self.beta.iter().enumerate() {
            h[(j, j + 1)] = b;
            h[(j + 1, j)] = b;
        }
        h
    }
}

/// Uniform unit vector `1/√n`, the default Lanczos start.
pub fn uniform_start(n: usize) -> DVector<f64> {
    DVector::from_element(n, 1.0 / (n as f64).sqrt())
}

/// Lanczos recurrence from unit vector `p1`, stopping once `β_{j+1} ≤ delta`
/// or after `m_max` steps (never more than `n`). Each new basis vector is
/// reorthogonalized against all previous ones.
pub fn lanczos(
    c: &DMatrix<f64>,
    p1: &DVector<f64>,
    delta: f64,
    m_max: usize,
) -> Result<LanczosFactorization> {
    let n = c.nrows();
    if c.ncols() != n {
        return Err(KmError::DimensionMismatch {
            expected: n,
            found: c.ncols(),
        });
    }
    if p1.len() != n {
        return Err(KmError::DimensionMismatch {
            expected: n,
            found: p1.len(),
        });
    }
    let norm = p1.norm();
    if norm == 0.0 {
        return Err(KmError::Precondition("Lanczos start vector is zero".into()));
    }
    if (norm - 1.0).abs() > 1e-10 {
        return Err(KmError::Precondition(format!(
            "Lanczos start vector has norm {norm}, not 1"
        )));
    }
    if m_max == 0 {
        return Err(KmError::Precondition("m_max must be positive".into()));
    }
    let m_max = m_max.min(n);

    let mut cols: Vec<DVector<f64>> = Vec::with_capacity(m_max);
    let mut alpha = Vec::with_capacity(m_max);
    let mut beta: Vec<f64> = Vec::with_capacity(m_max);
    cols.push(p1.clone());
    let mut beta_j = 0.0;
    let beta_next;
    loop {
        let j = cols.len() - 1;
        let mut w = c * &cols[j];
        if j > 0 {
            w.axpy(-beta_j, &cols[j - 1], 1.0);
        }
        let a = w.dot(&cols[j]);
        w.axpy(-a, &cols[j], 1.0);
        alpha.push(a);
        // two passes of classical Gram-Schmidt against the whole basis
        for _ in 0..2 {
            for p in &cols {
                let proj = w.dot(p);
                w.axpy(-proj, p, 1.0);
            }
        }
        let b = w.norm();
        if b <= delta || cols.len() >= m_max {
            beta_next = b;
            break;
        }
        beta.push(b);
        beta_j = b;
        cols.push(w / b);
    }
    let basis = DMatrix::from_columns(&cols);
    Ok(LanczosFactorization {
        basis,
        alpha,
        beta,
        beta_next,
    })
}

/// Ritz approximations `(ϑ_i, P_m q_i)` from a Lanczos factorization,
/// ordered by descending value.
#[derive(Clone, Debug)]
pub struct RitzPairs {
    pub values: DVector<f64>,
    /// `n × m`, unit columns.
    pub vectors: DMatrix<f64>,
    /// Last component `q_i(m)` of each eigenvector of `H_m`.
    pub last_components: Vec<f64>,
}

pub fn ritz_pairs(fac: &LanczosFactorization) -> RitzPairs {
    let h_spectrum = exact_evd_unchecked(&fac.tridiagonal());
    let m = fac.m();
    let last_components = (0..m).map(|i| h_spectrum.vectors[(m - 1, i)]).collect();
    let vectors = &fac.basis * &h_spectrum.vectors;
    RitzPairs {
        values: h_spectrum.values,
        vectors,
        last_components,
    }
}

/// Residual-based error bounds for Ritz pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct RitzErrorBounds {
    /// Bound on `‖C v̂_i − λ̂_i v̂_i‖₂` for every pair.
    pub residual_bound: f64,
    /// Bound on the distance of every Ritz value to the true spectrum.
    pub max_error_bound: f64,
    /// Per-pair bound `β_{m+1}|q_i(m)|` on the distance to the nearest true
    /// eigenvalue.
    pub min_error_bounds: Vec<f64>,
}

pub fn ritz_error_bounds(fac: &LanczosFactorization, pairs: &RitzPairs) -> RitzErrorBounds {
    let b = fac.beta_next;
    RitzErrorBounds {
        residual_bound: b,
        max_error_bound: b,
        min_error_bounds: pairs.last_components.iter().map(|q| b * q.abs()).collect(),
    }
}

/// Trace-only spectral-scale estimates of a symmetric `(D+1) × (D+1)`
/// matrix and the Lanczos stopping threshold derived from them.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceThreshold {
    pub delta: f64,
    pub sigma_ub: f64,
    pub sigma_lb: f64,
    /// Normalized entrywise ℓ₁ norm `(1/(D+1)) Σ |C(ℓ,j)|`.
    pub sigma_mink: f64,
}

impl TraceThreshold {
    /// `2m((σ_UB − σ_LB) + σ_Mink)`, the trace-based cap on `β_{m+1}`.
    pub fn beta_cap(&self, m: usize) -> f64 {
        2.0 * m as f64 * ((self.sigma_ub - self.sigma_lb) + self.sigma_mink)
    }
}

/// `δ = ((σ_UB − σ_LB) + σ_Mink) / (a · D · ln D)` with `D = n − 1`.
pub fn trace_threshold(c: &DMatrix<f64>, a: f64) -> Result<TraceThreshold> {
    let n = c.nrows();
    if c.ncols() != n {
        return Err(KmError::DimensionMismatch {
            expected: n,
            found: c.ncols(),
        });
    }
    if n < 3 {
        return Err(KmError::Precondition(format!(
            "trace threshold needs D >= 2 (matrix size >= 3), got size {n}"
        )));
    }
    if !(a > 0.0) {
        return Err(KmError::Validation(format!(
            "threshold parameter must be positive, got {a}"
        )));
    }
    let nf = n as f64;
    let d = nf - 1.0;
    let t1 = c.trace() / nf;
    // trace(C²) = ‖C‖_F² for symmetric C
    let t2 = c.norm_squared() / nf;
    let s2 = (t2 - t1 * t1).max(0.0);
    let sigma_ub = t1 + (s2 * d).sqrt();
    let sigma_lb = t1 + (s2 / d).sqrt();
    let sigma_mink = c.iter().map(|x| x.abs()).sum::<f64>() / nf;
    let delta = ((sigma_ub - sigma_lb) + sigma_mink) / (a * d * d.ln());
    Ok(TraceThreshold {
        delta,
        sigma_ub,
        sigma_lb,
        sigma_mink,
    })
}

/// Lanczos run whose stopping threshold comes from [`trace_threshold`],
/// started from the uniform vector.
#[derive(Clone, Debug)]
pub struct ThresholdedLanczos {
    pub factorization: LanczosFactorization,
    pub pairs: RitzPairs,
    pub threshold: TraceThreshold,
}

pub fn thresholded_lanczos(c: &DMatrix<f64>, a: f64) -> Result<ThresholdedLanczos> {
    let threshold = trace_threshold(c, a)?;
    let factorization = lanczos(c, &uniform_start(c.nrows()), threshold.delta, c.nrows())?;
    let pairs = ritz_pairs(&factorization);
    Ok(ThresholdedLanczos {
        factorization,
        pairs,
        threshold,
    })
}
