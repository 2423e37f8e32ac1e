//! The ψ-block subproblem: minimize `ψᵀSψ − 2ψᵀv` over binary ψ.
//!
//! The problem is rewritten over `x = 2ψ − 1 ∈ {±1}^D`, homogenized into a
//! `(D+1) × (D+1)` matrix `A`, relaxed to a regularized semidefinite program,
//! and the smooth dual
//!
//! ```text
//! h(u) = Σ u + (γ/2) ‖Π₊(C(u))‖²_F,   C(u) = −A − diag(u)
//! ```
//!
//! is minimized by gradient descent with backtracking. The enhanced solver
//! produces the same iterates while skipping most eigendecompositions: while
//! all multipliers are equal the spectrum of `C(u)` is a shift of the cached
//! spectrum of `−A`, and once `λmax(−A) − min(u) ≤ 0` Weyl's inequality shows
//! `C(u)` has no positive part.

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::eigen::{
    check_symmetric, exact_eigenvalues, exact_evd_unchecked, thresholded_lanczos, SymmetricSpectrum,
};
use crate::error::{KmError, Result};
use crate::model::{IndicatorVector, SimplexVector};

/// Eigenvalues above this count as positive when projecting onto the PSD
/// cone.
pub const POSITIVE_CUTOFF: f64 = 1e-12;

const INSTANCE_SYMMETRY_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct BqpInstance {
    pub s: DMatrix<f64>,
    pub v: DVector<f64>,
    pub rho: f64,
}

impl BqpInstance {
    pub fn new(s: DMatrix<f64>, v: DVector<f64>, rho: f64) -> Result<Self> {
        if s.nrows() != v.len() {
            return Err(KmError::DimensionMismatch {
                expected: s.nrows(),
                found: v.len(),
            });
        }
        check_symmetric(&s, INSTANCE_SYMMETRY_TOL)?;
        Ok(Self { s, v, rho })
    }

    pub fn dim(&self) -> usize {
        self.v.len()
    }

    pub fn add_ridge(&mut self, mu: f64) {
        for k in 0..self.dim() {
            self.s[(k, k)] += mu;
        }
    }

    /// `ψᵀSψ − 2ψᵀv`.
    pub fn objective(&self, psi: &IndicatorVector) -> f64 {
        let idx: Vec<usize> = psi.support().collect();
        let mut quad = 0.0;
        for &a in &idx {
            for &b in &idx {
                quad += self.s[(a, b)];
            }
        }
        quad - 2.0 * idx.iter().map(|&a| self.v[a]).sum::<f64>()
    }
}

/// `S = Σ θθᵀ`, `v = Σ θ·p`, `rho = Σ p²` over the users who rated an item.
pub fn build_bqp(thetas: &[&SimplexVector], ps: &[f64]) -> Result<BqpInstance> {
    if thetas.len() != ps.len() {
        return Err(KmError::DimensionMismatch {
            expected: thetas.len(),
            found: ps.len(),
        });
    }
    let Some(first) = thetas.first() else {
        return Err(KmError::Validation("BQP needs at least one term".into()));
    };
    let d = first.dim();
    let mut s = DMatrix::zeros(d, d);
    let mut v = DVector::zeros(d);
    let mut rho = 0.0;
    for (theta, &p) in thetas.iter().zip(ps) {
        if theta.dim() != d {
            return Err(KmError::DimensionMismatch {
                expected: d,
                found: theta.dim(),
            });
        }
        let t = DVector::from_column_slice(theta.as_slice());
        s.ger(1.0, &t, &t, 1.0);
        v.axpy(p, &t, 1.0);
        rho += p * p;
    }
    Ok(BqpInstance { s, v, rho })
}

/// Homogenized `±1` form: for `x = 2ψ − 1`,
/// `xᵀA0x + aᵀx + offset = ψᵀSψ − 2ψᵀv` and `A = [[0, aᵀ/2], [a/2, A0]]`.
#[derive(Clone, Debug, PartialEq)]
pub struct LiftedBqp {
    pub a: DMatrix<f64>,
    pub a0: DMatrix<f64>,
    pub a_vec: DVector<f64>,
    pub offset: f64,
}

pub fn lift(inst: &BqpInstance) -> Result<LiftedBqp> {
    check_symmetric(&inst.s, INSTANCE_SYMMETRY_TOL)?;
    let d = inst.dim();
    let ones = DVector::from_element(d, 1.0);
    let a0 = &inst.s * 0.25;
    let s1 = inst.s.transpose() * &ones;
    let a_vec = &s1 * 0.5 - &inst.v;
    let offset = 0.25 * ones.dot(&s1) - inst.v.sum();
    let mut a = DMatrix::zeros(d + 1, d + 1);
    a.view_mut((1, 1), (d, d)).copy_from(&a0);
    for k in 0..d {
        a[(0, k + 1)] = 0.5 * a_vec[k];
        a[(k + 1, 0)] = 0.5 * a_vec[k];
    }
    Ok(LiftedBqp {
        a,
        a0,
        a_vec,
        offset,
    })
}

impl LiftedBqp {
    pub fn dim(&self) -> usize {
        self.a_vec.len()
    }

    /// `xᵀA0x + aᵀx + offset` for `x ∈ {±1}^D`.
    pub fn x_objective(&self, x: &[f64]) -> f64 {
        let x = DVector::from_column_slice(x);
        (&self.a0 * &x).dot(&x) + self.a_vec.dot(&x) + self.offset
    }

    /// `x̃ᵀAx̃` for the homogenized `(D+1)`-vector.
    pub fn homogenized_objective(&self, xt: &[f64]) -> f64 {
        let x = DVector::from_column_slice(xt);
        (&self.a * &x).dot(&x)
    }

    /// `C(u) = −A − diag(u)`.
    pub fn c_matrix(&self, u: &DVector<f64>) -> DMatrix<f64> {
        let mut c = -&self.a;
        for k in 0..u.len() {
            c[(k, k)] -= u[k];
        }
        c
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EigMode {
    Exact,
    Lanczos,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    PlainGd,
    EnhancedGd,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualConfig {
    pub gamma: f64,
    /// Stop once the accepted step `‖t·∇h‖` is at most this.
    pub eps: f64,
    pub max_iters: usize,
    pub armijo_alpha: f64,
    pub armijo_beta: f64,
    /// Backtracking halvings tried before declaring the iterate stationary.
    pub max_backtracks: usize,
    pub eig_mode: EigMode,
    /// Divisor `a` in the Lanczos stopping threshold.
    pub lanczos_a: f64,
    /// In Lanczos mode, also evaluate `h` at line-search trial points from
    /// Ritz values instead of exact eigenvalues.
    pub lanczos_objective: bool,
    /// Jump over the all-equal, no-positive-part region in the first step
    /// (enhanced solver only).
    pub initial_step: bool,
    pub record_log: bool,
    /// Keep every `C(u)` whose spectrum was actually computed (test use).
    pub capture_matrices: bool,
}

impl Default for DualConfig {
    fn default() -> Self {
        Self {
            gamma: 100.0,
            eps: 1e-6,
            max_iters: 5000,
            armijo_alpha: 0.3,
            armijo_beta: 0.5,
            max_backtracks: 60,
            eig_mode: EigMode::Exact,
            lanczos_a: 1.0,
            lanczos_objective: false,
            initial_step: true,
            record_log: false,
            capture_matrices: false,
        }
    }
}

impl DualConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(KmError::Validation(m));
        if !(self.gamma > 0.0) {
            return bad(format!("gamma must be positive, got {}", self.gamma));
        }
        if !(self.eps > 0.0) {
            return bad(format!("eps must be positive, got {}", self.eps));
        }
        if self.max_iters == 0 {
            return bad("max_iters must be positive".into());
        }
        if !(self.armijo_alpha > 0.0 && self.armijo_alpha < 0.5) {
            return bad(format!(
                "armijo_alpha must lie in (0, 0.5), got {}",
                self.armijo_alpha
            ));
        }
        if !(self.armijo_beta > 0.0 && self.armijo_beta < 1.0) {
            return bad(format!(
                "armijo_beta must lie in (0, 1), got {}",
                self.armijo_beta
            ));
        }
        if !(self.lanczos_a > 0.0) {
            return bad(format!(
                "lanczos_a must be positive, got {}",
                self.lanczos_a
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Phase {
    IA,
    IB,
    IIA,
    IIB,
}

impl Phase {
    pub fn label(self) -> &'static str {
        match self {
            Phase::IA => "IA",
            Phase::IB => "IB",
            Phase::IIA => "IIA",
            Phase::IIB => "IIB",
        }
    }

    /// Whether the gradient at this phase needs a fresh eigensolve.
    pub fn needs_eigensolve(self) -> bool {
        self == Phase::IIB
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseCounts {
    pub ia: usize,
    pub ib: usize,
    pub iia: usize,
    pub iib: usize,
}

impl PhaseCounts {
    pub fn record(&mut self, p: Phase) {
        match p {
            Phase::IA => self.ia += 1,
            Phase::IB => self.ib += 1,
            Phase::IIA => self.iia += 1,
            Phase::IIB => self.iib += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.ia + self.ib + self.iia + self.iib
    }

    pub fn eigensolve_free(&self) -> usize {
        self.ia + self.ib + self.iia
    }

    pub fn merge(&mut self, other: &PhaseCounts) {
        self.ia += other.ia;
        self.ib += other.ib;
        self.iia += other.iia;
        self.iib += other.iib;
    }
}

/// Lanczos runs and how often `β_{m+1}` exceeded the trace-based cap.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LanczosStats {
    pub runs: usize,
    pub cap_violations: usize,
    pub total_m: usize,
    /// Iterations redone with an exact gradient after the Ritz-based one
    /// gave no usable step.
    pub fallbacks: usize,
    /// Largest observed `β_{m+1} / cap`.
    pub max_cap_ratio: f64,
}

impl LanczosStats {
    pub fn merge(&mut self, other: &LanczosStats) {
        self.runs += other.runs;
        self.cap_violations += other.cap_violations;
        self.total_m += other.total_m;
        self.fallbacks += other.fallbacks;
        self.max_cap_ratio = self.max_cap_ratio.max(other.max_cap_ratio);
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogEntry {
    pub iteration: usize,
    /// `h` at the iterate the gradient was taken at.
    pub h: f64,
    pub phase: Phase,
    /// Accepted step size, 0 when no trial was accepted.
    pub step: f64,
    pub u: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct DualState {
    pub u: DVector<f64>,
    pub h: f64,
    /// Spectrum of `−A`, cached by the enhanced solver.
    pub neg_a_spectrum: Option<SymmetricSpectrum>,
    pub phase: Phase,
    pub phase_counts: PhaseCounts,
    pub phases: Vec<Phase>,
    pub iterations: usize,
    pub converged: bool,
    /// Full or partial eigensolves of `C(u)` (gradients and trial points).
    pub eigensolves: usize,
    pub lanczos: LanczosStats,
    pub log: Vec<LogEntry>,
    pub captured: Vec<DMatrix<f64>>,
}

impl DualState {
    /// Iteration log as CSV rows `iteration,h_gamma,phase,step_size`.
    pub fn write_log_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["iteration", "h_gamma", "phase", "step_size"])?;
        for e in &self.log {
            w.write_record([
                e.iteration.to_string(),
                format!("{:.17e}", e.h),
                e.phase.label().to_string(),
                format!("{:.17e}", e.step),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn check_u(lifted: &LiftedBqp, u: &DVector<f64>) -> Result<()> {
    let n = lifted.dim() + 1;
    if u.len() != n {
        return Err(KmError::DimensionMismatch {
            expected: n,
            found: u.len(),
        });
    }
    Ok(())
}

fn positive_square_sum(values: impl Iterator<Item = f64>) -> f64 {
    values.filter(|&l| l > POSITIVE_CUTOFF).map(|l| l * l).sum()
}

/// `γ · diag(Π₊)` for the pairs `(values[j], vectors[:, j])`, shifted by
/// `shift` (the spectrum used is `values − shift`).
fn projected_diagonal(
    values: &DVector<f64>,
    vectors: &DMatrix<f64>,
    shift: f64,
    gamma: f64,
) -> DVector<f64> {
    let n = vectors.nrows();
    let mut diag = DVector::zeros(n);
    for j in 0..values.len() {
        let l = values[j] - shift;
        if l > POSITIVE_CUTOFF {
            for k in 0..n {
                diag[k] += l * vectors[(k, j)] * vectors[(k, j)];
            }
        }
    }
    diag * gamma
}

/// `h_γ(u)`, evaluated with a dense eigensolve.
pub fn dual_objective(u: &DVector<f64>, lifted: &LiftedBqp, gamma: f64) -> Result<f64> {
    check_u(lifted, u)?;
    let vals = exact_eigenvalues(&lifted.c_matrix(u));
    Ok(u.sum() + 0.5 * gamma * positive_square_sum(vals.iter().copied()))
}

/// `∇h_γ(u) = 1 − γ · diag(Π₊(C(u)))`.
pub fn dual_gradient(u: &DVector<f64>, lifted: &LiftedBqp, gamma: f64) -> Result<DVector<f64>> {
    check_u(lifted, u)?;
    let spectrum = exact_evd_unchecked(&lifted.c_matrix(u));
    let diag = projected_diagonal(&spectrum.values, &spectrum.vectors, 0.0, gamma);
    Ok(DVector::from_element(u.len(), 1.0) - diag)
}

/// Margin added past the boundary by [`initial_step_size`].
pub fn default_initial_margin(lambda_max_neg_a: f64) -> f64 {
    0.1 * lambda_max_neg_a.abs().max(1.0)
}

/// First step length that moves an all-equal start `u0·1` past the point
/// where `C(u)` acquires a positive eigenvalue.
pub fn initial_step_size(neg_a_spectrum: &SymmetricSpectrum, u0: f64) -> f64 {
    let lmax = neg_a_spectrum.max_value();
    initial_step_size_with_margin(lmax, u0, default_initial_margin(lmax))
}

pub fn initial_step_size_with_margin(lambda_max_neg_a: f64, u0: f64, margin: f64) -> f64 {
    (u0 - lambda_max_neg_a).max(0.0) + margin
}

fn all_equal(u: &DVector<f64>) -> bool {
    u.iter().all(|&x| x == u[0])
}

struct Evaluator<'a> {
    lifted: &'a LiftedBqp,
    cfg: &'a DualConfig,
    enhanced: bool,
    neg_a: Option<SymmetricSpectrum>,
    neg_a_max: f64,
    eigensolves: usize,
    lanczos: LanczosStats,
    captured: Vec<DMatrix<f64>>,
}

impl<'a> Evaluator<'a> {
    fn new(lifted: &'a LiftedBqp, cfg: &'a DualConfig, enhanced: bool) -> Self {
        let (neg_a, neg_a_max) = if enhanced {
            let spectrum = exact_evd_unchecked(&(-&lifted.a));
            let m = spectrum.max_value();
            (Some(spectrum), m)
        } else {
            (None, f64::INFINITY)
        };
        Self {
            lifted,
            cfg,
            enhanced,
            neg_a,
            neg_a_max,
            eigensolves: 0,
            lanczos: LanczosStats::default(),
            captured: Vec::new(),
        }
    }

    fn phase_of(&self, u: &DVector<f64>) -> Phase {
        if all_equal(u) {
            if self.neg_a_max - u[0] > POSITIVE_CUTOFF {
                Phase::IB
            } else {
                Phase::IA
            }
        } else if self.neg_a_max - u.min() <= POSITIVE_CUTOFF {
            Phase::IIA
        } else {
            Phase::IIB
        }
    }

    /// Eigenpairs of `C(u)` for the positive part: exact, or Ritz pairs.
    fn eigensolve(&mut self, u: &DVector<f64>, capture: bool) -> (DVector<f64>, DMatrix<f64>) {
        let c = self.lifted.c_matrix(u);
        self.eigensolves += 1;
        if capture && self.cfg.capture_matrices {
            self.captured.push(c.clone());
        }
        match self.cfg.eig_mode {
            EigMode::Lanczos if self.enhanced && c.nrows() >= 3 => {
                let run = match thresholded_lanczos(&c, self.cfg.lanczos_a) {
                    Ok(run) => run,
                    Err(_) => {
                        let spectrum = exact_evd_unchecked(&c);
                        return (spectrum.values, spectrum.vectors);
                    }
                };
                let m = run.factorization.m();
                let cap = run.threshold.beta_cap(m);
                let beta = run.factorization.beta_next;
                self.lanczos.runs += 1;
                self.lanczos.total_m += m;
                if beta > cap {
                    self.lanczos.cap_violations += 1;
                }
                if cap > 0.0 {
                    self.lanczos.max_cap_ratio = self.lanczos.max_cap_ratio.max(beta / cap);
                }
                (run.pairs.values, run.pairs.vectors)
            }
            _ => {
                let spectrum = exact_evd_unchecked(&c);
                (spectrum.values, spectrum.vectors)
            }
        }
    }

    fn approximate(&self, p: Phase) -> bool {
        self.enhanced && p == Phase::IIB && self.cfg.eig_mode == EigMode::Lanczos
    }

    fn exact_gradient(&mut self, u: &DVector<f64>) -> DVector<f64> {
        self.eigensolves += 1;
        let spectrum = exact_evd_unchecked(&self.lifted.c_matrix(u));
        DVector::from_element(u.len(), 1.0)
            - projected_diagonal(&spectrum.values, &spectrum.vectors, 0.0, self.cfg.gamma)
    }

    fn gradient(&mut self, u: &DVector<f64>) -> (Phase, DVector<f64>) {
        let n = u.len();
        let ones = DVector::from_element(n, 1.0);
        let gamma = self.cfg.gamma;
        if !self.enhanced {
            let (vals, vecs) = self.eigensolve(u, true);
            return (
                Phase::IIB,
                ones - projected_diagonal(&vals, &vecs, 0.0, gamma),
            );
        }
        let phase = self.phase_of(u);
        let g = match phase {
            Phase::IA | Phase::IIA => ones,
            Phase::IB => {
                let spectrum = self.neg_a.as_ref().expect("enhanced solver caches −A");
                ones - projected_diagonal(&spectrum.values, &spectrum.vectors, u[0], gamma)
            }
            Phase::IIB => {
                let (vals, vecs) = self.eigensolve(u, true);
                ones - projected_diagonal(&vals, &vecs, 0.0, gamma)
            }
        };
        (phase, g)
    }

    fn objective(&mut self, u: &DVector<f64>) -> f64 {
        let half_gamma = 0.5 * self.cfg.gamma;
        let sum = u.sum();
        if self.enhanced {
            match self.phase_of(u) {
                Phase::IA | Phase::IIA => return sum,
                Phase::IB => {
                    let spectrum = self.neg_a.as_ref().expect("enhanced solver caches −A");
                    let shift = u[0];
                    return sum
                        + half_gamma
                            * positive_square_sum(spectrum.values.iter().map(|l| l - shift));
                }
                Phase::IIB => {
                    if self.cfg.eig_mode == EigMode::Lanczos && self.cfg.lanczos_objective {
                        let (vals, _) = self.eigensolve(u, false);
                        return sum + half_gamma * positive_square_sum(vals.iter().copied());
                    }
                }
            }
        }
        self.eigensolves += 1;
        let vals = exact_eigenvalues(&self.lifted.c_matrix(u));
        sum + half_gamma * positive_square_sum(vals.iter().copied())
    }
}

/// Armijo backtracking from trial step `t0`; `None` when no trial decreases
/// `h` enough.
fn line_search(
    ev: &mut Evaluator<'_>,
    u: &DVector<f64>,
    h: f64,
    g: &DVector<f64>,
    t0: f64,
) -> Option<(DVector<f64>, f64, f64)> {
    let cfg = ev.cfg;
    let gnorm2 = g.norm_squared();
    let mut t = t0;
    for _ in 0..=cfg.max_backtracks {
        let trial = u - g * t;
        let ht = ev.objective(&trial);
        // equality can pass on rounding noise alone
        if ht <= h - cfg.armijo_alpha * t * gnorm2 && ht < h {
            return Some((trial, ht, t));
        }
        t *= cfg.armijo_beta;
    }
    None
}

fn run_descent(
    lifted: &LiftedBqp,
    cfg: &DualConfig,
    u0: &DVector<f64>,
    enhanced: bool,
) -> Result<DualState> {
    cfg.validate()?;
    check_u(lifted, u0)?;
    let mut ev = Evaluator::new(lifted, cfg, enhanced);
    let mut u = u0.clone();
    let mut h = ev.objective(&u);
    let mut phase_counts = PhaseCounts::default();
    let mut phases = Vec::new();
    let mut log = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    let mut phase = Phase::IA;

    for it in 0..cfg.max_iters {
        let (p, g) = ev.gradient(&u);
        phase = p;
        phase_counts.record(p);
        phases.push(p);
        let t0 = if enhanced && cfg.initial_step && it == 0 && p == Phase::IA {
            initial_step_size_with_margin(ev.neg_a_max, u[0], default_initial_margin(ev.neg_a_max))
        } else {
            1.0
        };
        let mut g = g;
        let mut accepted = line_search(&mut ev, &u, h, &g, t0);
        let stalled = match &accepted {
            None => true,
            Some((_, _, t)) => t * g.norm() <= cfg.eps,
        };
        if stalled && ev.approximate(p) {
            // near the optimum a Ritz-based gradient is dominated by its own
            // error; only an exact gradient may certify stationarity
            ev.lanczos.fallbacks += 1;
            g = ev.exact_gradient(&u);
            accepted = line_search(&mut ev, &u, h, &g, t0);
        }
        let gnorm = g.norm();
        iterations += 1;
        let step = accepted.as_ref().map_or(0.0, |a| a.2);
        if cfg.record_log {
            log.push(LogEntry {
                iteration: it,
                h,
                phase: p,
                step,
                u: u.iter().copied().collect(),
            });
        }
        match accepted {
            Some((trial, ht, t)) => {
                u = trial;
                h = ht;
                if t * gnorm <= cfg.eps {
                    converged = true;
                    break;
                }
            }
            None => {
                // no descent even at a vanishing step: stationary to working precision
                converged = true;
                break;
            }
        }
    }
    if !converged {
        log::debug!(
            "dual descent stopped at max_iters={} (h={h})",
            cfg.max_iters
        );
    }
    Ok(DualState {
        u,
        h,
        neg_a_spectrum: ev.neg_a,
        phase,
        phase_counts,
        phases,
        iterations,
        converged,
        eigensolves: ev.eigensolves,
        lanczos: ev.lanczos,
        log,
        captured: ev.captured,
    })
}

/// Gradient descent with Armijo backtracking; every gradient takes a dense
/// eigendecomposition of `C(u)`.
pub fn solve_gd(lifted: &LiftedBqp, cfg: &DualConfig, u0: &DVector<f64>) -> Result<DualState> {
    run_descent(lifted, cfg, u0, false)
}

/// Same iteration as [`solve_gd`], computing eigendecompositions only when
/// neither the cached spectrum of `−A` nor the Weyl bound settles the
/// gradient. `u0` must have equal entries.
pub fn solve_enhanced_gd(
    lifted: &LiftedBqp,
    cfg: &DualConfig,
    u0: &DVector<f64>,
) -> Result<DualState> {
    check_u(lifted, u0)?;
    if !all_equal(u0) {
        return Err(KmError::Precondition(
            "enhanced solver needs a start vector with equal entries".into(),
        ));
    }
    run_descent(lifted, cfg, u0, true)
}

pub fn solve_dual(
    lifted: &LiftedBqp,
    cfg: &DualConfig,
    method: Method,
    u0: &DVector<f64>,
) -> Result<DualState> {
    match method {
        Method::PlainGd => solve_gd(lifted, cfg, u0),
        Method::EnhancedGd => solve_enhanced_gd(lifted, cfg, u0),
    }
}

/// Positive eigenpairs of `C(u)`, as `(values, vectors)` with one column
/// per pair. Lanczos mode returns the positive Ritz pairs.
pub fn positive_eigenpairs(
    lifted: &LiftedBqp,
    u: &DVector<f64>,
    mode: EigMode,
    lanczos_a: f64,
) -> Result<(Vec<f64>, DMatrix<f64>)> {
    check_u(lifted, u)?;
    let c = lifted.c_matrix(u);
    let (vals, vecs) = match mode {
        EigMode::Lanczos if c.nrows() >= 3 => {
            let run = thresholded_lanczos(&c, lanczos_a)?;
            (run.pairs.values, run.pairs.vectors)
        }
        _ => {
            let s = exact_evd_unchecked(&c);
            (s.values, s.vectors)
        }
    };
    let keep: Vec<usize> = (0..vals.len())
        .filter(|&j| vals[j] > POSITIVE_CUTOFF)
        .collect();
    let values = keep.iter().map(|&j| vals[j]).collect();
    let vectors = DMatrix::from_fn(c.nrows(), keep.len(), |r, k| vecs[(r, keep[k])]);
    Ok((values, vectors))
}
