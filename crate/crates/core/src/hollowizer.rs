//! Numerical search for a unitary `U` such that every `U τ_α Uᵀ` is hollow.
//!
//! The objective is `f(U) = Σ_α w_α Σ_k |(U τ_α Uᵀ)_kk|²`. Each iteration
//! works in the chart `θ ↦ exp(A(θ)) U` around the current iterate, where
//! `A(θ)` is skew-Hermitian with `p²` real parameters, and takes a
//! Levenberg–Marquardt step on the complex diagonal residuals. Restarts are
//! drawn from the Haar measure with sub-seeds derived from the problem seed;
//! restart 0 starts at the identity.
//!
//! A `NotFound` status is a search failure, never a proof that no hollowising
//! unitary exists. The only impossibility certificate produced here is a
//! positive Thompson gap of a single matrix.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::concurrence::{is_hollowisable, Hollowisability, PreconcurrenceMatrix};
use crate::linalg::{self, expm_skew_hermitian, random_unitary, CMatrix, C64};
use crate::random::sub_seed;

/// Relative success tolerance on the largest diagonal modulus.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_MAX_ITERS: usize = 300;
pub const DEFAULT_RESTARTS: usize = 32;
pub const DEFAULT_SEED: u64 = 0x5EED_2018;

/// Restarts evaluated together; fixed so results do not depend on the
/// number of threads.
const RESTART_BATCH: usize = 8;
/// Extra iterations spent driving the residual below the tolerance.
const POLISH_ITERS: usize = 8;
const POLISH_FACTOR: f64 = 1e-5;
const MAX_DAMPING: f64 = 1e14;

#[derive(Debug, Clone, PartialEq)]
pub struct HollowiseOptions {
    /// Relative tolerance, multiplied by the largest singular value over all
    /// matrices of a problem (floored at 1).
    pub tolerance: f64,
    pub max_iters: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for HollowiseOptions {
    fn default() -> Self {
        Self {
            tolerance: DEFAULT_TOLERANCE,
            max_iters: DEFAULT_MAX_ITERS,
            restarts: DEFAULT_RESTARTS,
            seed: DEFAULT_SEED,
        }
    }
}

/// A set of symmetric `p × p` matrices to hollowise with one unitary.
#[derive(Debug, Clone)]
pub struct HollowisationProblem {
    pub matrices: Vec<PreconcurrenceMatrix>,
    pub weights: Vec<f64>,
    /// Absolute tolerance on the largest diagonal modulus.
    pub tolerance: f64,
    pub max_iters: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl HollowisationProblem {
    /// Unit weights; the absolute tolerance is `opts.tolerance` times the
    /// largest singular value, floored at 1.
    pub fn new(matrices: Vec<PreconcurrenceMatrix>, opts: &HollowiseOptions) -> Self {
        let scale = matrices
            .iter()
            .filter_map(|m| m.singular_values().first().copied())
            .fold(0.0, f64::max);
        let tolerance = opts.tolerance * scale.max(1.0);
        let weights = vec![1.0; matrices.len()];
        Self {
            matrices,
            weights,
            tolerance,
            max_iters: opts.max_iters,
            restarts: opts.restarts,
            seed: opts.seed,
        }
    }

    pub fn size(&self) -> usize {
        self.matrices.first().map_or(0, PreconcurrenceMatrix::size)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HollowStatus {
    Found,
    NotFound,
}

#[derive(Debug, Clone)]
pub struct HollowisationResult {
    pub status: HollowStatus,
    /// Best unitary seen (the hollowising one when found).
    pub unitary: CMatrix,
    /// Largest diagonal modulus over all `U τ_α Uᵀ`.
    pub residual: f64,
    /// Largest diagonal modulus of each `U τ_α Uᵀ`.
    pub per_matrix: Vec<f64>,
    pub iterations_used: usize,
    pub restarts_used: usize,
    /// Positive Thompson gap `s_1 − Σ_{k≥2} s_k` of a matrix that cannot be
    /// hollowised at this size, when the search was short-circuited.
    pub thompson_gap: Option<f64>,
    /// Index of the matrix that failed the individual check.
    pub blocking_matrix: Option<usize>,
}

impl HollowisationResult {
    pub fn found(&self) -> bool {
        self.status == HollowStatus::Found
    }
}

/// Skew-Hermitian generator for `θ ∈ ℝ^{p²}`, parameter `k·p + l`:
/// `k = l` is the phase `i E_kk`; `k < l` the rotation `E_lk − E_kl`;
/// `k > l` the symmetric `i (E_kl + E_lk)` on the pair `(l, k)`.
pub fn skew_generator(theta: &[f64], p: usize) -> CMatrix {
    assert_eq!(theta.len(), p * p, "theta must have p² entries");
    let mut a = CMatrix::zeros(p, p);
    for k in 0..p {
        for l in 0..p {
            let t = theta[k * p + l];
            if t == 0.0 {
                continue;
            }
            match k.cmp(&l) {
                std::cmp::Ordering::Equal => a[(k, k)] += C64::new(0.0, t),
                std::cmp::Ordering::Less => {
                    a[(k, l)] -= C64::new(t, 0.0);
                    a[(l, k)] += C64::new(t, 0.0);
                }
                std::cmp::Ordering::Greater => {
                    a[(l, k)] += C64::new(0.0, t);
                    a[(k, l)] += C64::new(0.0, t);
                }
            }
        }
    }
    a
}

/// `U = exp(A(θ))` with `p = √len(θ)`.
pub fn parametrize_unitary(theta: &[f64]) -> CMatrix {
    let p = (theta.len() as f64).sqrt().round() as usize;
    assert_eq!(p * p, theta.len(), "theta length must be a perfect square");
    expm_skew_hermitian(&skew_generator(theta, p))
}

fn diagonal_moduli(m: &CMatrix) -> impl Iterator<Item = f64> + '_ {
    (0..m.nrows()).map(move |k| m[(k, k)].norm())
}

/// `f(U) = Σ_α w_α Σ_k |(U τ_α Uᵀ)_kk|²`.
pub fn objective(problem: &HollowisationProblem, u: &CMatrix) -> f64 {
    problem
        .matrices
        .iter()
        .zip(&problem.weights)
        .map(|(m, w)| {
            let moved = linalg::congruence_unchecked(u, &m.tau);
            w * diagonal_moduli(&moved).map(|x| x * x).sum::<f64>()
        })
        .sum()
}

/// Gradient of `θ ↦ f(exp(A(θ)) U)` at `θ = 0`.
pub fn objective_gradient(problem: &HollowisationProblem, u: &CMatrix) -> Vec<f64> {
    let state = Linearization::new(problem, u);
    // ∇(Σ r²) = 2 Jᵀ r
    let g = state.jacobian.tr_mul(&state.residuals);
    g.iter().map(|x| 2.0 * x).collect()
}

/// Largest diagonal modulus per matrix.
pub fn residuals(problem: &HollowisationProblem, u: &CMatrix) -> Vec<f64> {
    problem
        .matrices
        .iter()
        .map(|m| {
            let moved = linalg::congruence_unchecked(u, &m.tau);
            diagonal_moduli(&moved).fold(0.0, f64::max)
        })
        .collect()
}

/// Residual vector `r = (√w Re d_k, √w Im d_k)` over all matrices and its
/// Jacobian with respect to the chart parameters at `θ = 0`.
struct Linearization {
    residuals: DVector<f64>,
    jacobian: DMatrix<f64>,
}

impl Linearization {
    fn new(problem: &HollowisationProblem, u: &CMatrix) -> Self {
        let p = problem.size();
        let count = problem.matrices.len();
        let rows = 2 * p * count;
        let mut residuals = DVector::zeros(rows);
        let mut jacobian = DMatrix::zeros(rows, p * p);
        for (a, (m, &w)) in problem.matrices.iter().zip(&problem.weights).enumerate() {
            let moved = linalg::congruence_unchecked(u, &m.tau);
            let sw = w.sqrt();
            let base = 2 * p * a;
            for k in 0..p {
                let d = moved[(k, k)] * sw;
                residuals[base + 2 * k] = d.re;
                residuals[base + 2 * k + 1] = d.im;
            }
            // δd_k = 2 (G M)_kk for generator G
            let mut put = |row_k: usize, col: usize, z: C64| {
                let z = z * (2.0 * sw);
                jacobian[(base + 2 * row_k, col)] += z.re;
                jacobian[(base + 2 * row_k + 1, col)] += z.im;
            };
            let i = C64::new(0.0, 1.0);
            for k in 0..p {
                put(k, k * p + k, i * moved[(k, k)]);
                for l in k + 1..p {
                    let mkl = moved[(k, l)];
                    // rotation E_lk − E_kl
                    put(k, k * p + l, -mkl);
                    put(l, k * p + l, mkl);
                    // symmetric i (E_kl + E_lk)
                    put(k, l * p + k, i * mkl);
                    put(l, l * p + k, i * mkl);
                }
            }
        }
        Self { residuals, jacobian }
    }

    fn value(&self) -> f64 {
        self.residuals.norm_squared()
    }
}

#[derive(Debug, Clone)]
struct RestartOutcome {
    unitary: CMatrix,
    residual: f64,
    per_matrix: Vec<f64>,
    iterations: usize,
}

fn max_residual(problem: &HollowisationProblem, u: &CMatrix) -> (f64, Vec<f64>) {
    let per = residuals(problem, u);
    (per.iter().copied().fold(0.0, f64::max), per)
}

/// Levenberg–Marquardt descent from `start`.
fn descend(problem: &HollowisationProblem, start: CMatrix) -> RestartOutcome {
    let p = problem.size();
    let mut u = start;
    let (mut residual, mut per_matrix) = max_residual(problem, &u);
    let mut iterations = 0;
    let mut damping: Option<f64> = None;
    let mut polish_left: Option<usize> = None;
    let polish_target = problem.tolerance * POLISH_FACTOR;

    while iterations < problem.max_iters {
        if residual <= problem.tolerance {
            let left = polish_left.get_or_insert(POLISH_ITERS);
            if *left == 0 || residual <= polish_target {
                break;
            }
            *left -= 1;
        }
        iterations += 1;
        let lin = Linearization::new(problem, &u);
        let f = lin.value();
        let jtj = lin.jacobian.tr_mul(&lin.jacobian);
        let jtr = lin.jacobian.tr_mul(&lin.residuals);
        let mu = *damping.get_or_insert_with(|| 1e-3 * (0..p * p).map(|k| jtj[(k, k)]).fold(0.0, f64::max).max(1e-300));
        let mut mu = mu;
        let mut accepted = false;
        while mu < MAX_DAMPING * (1.0 + f) {
            let mut system = jtj.clone();
            for k in 0..p * p {
                system[(k, k)] += mu;
            }
            let Some(chol) = system.cholesky() else {
                mu *= 4.0;
                continue;
            };
            let step = -chol.solve(&jtr);
            let trial = expm_skew_hermitian(&skew_generator(step.as_slice(), p)) * &u;
            let f_trial = objective(problem, &trial);
            if f_trial < f {
                let predicted = f - (&lin.residuals + &lin.jacobian * &step).norm_squared();
                let ratio = if predicted > 0.0 {
                    (f - f_trial) / predicted
                } else {
                    0.0
                };
                mu *= (1.0 / 3.0f64).max(1.0 - (2.0 * ratio - 1.0).powi(3));
                u = trial;
                accepted = true;
                break;
            }
            mu *= 4.0;
        }
        damping = Some(mu);
        if !accepted {
            break;
        }
        (residual, per_matrix) = max_residual(problem, &u);
    }
    RestartOutcome {
        unitary: u,
        residual,
        per_matrix,
        iterations,
    }
}

fn restart_start(problem: &HollowisationProblem, index: usize) -> CMatrix {
    let p = problem.size();
    if index == 0 {
        CMatrix::identity(p, p)
    } else {
        random_unitary(p, sub_seed(problem.seed, index as u64))
    }
}

/// Multi-start search. The first restart (in index order) that reaches the
/// tolerance wins; otherwise the best residual is reported, ties going to the
/// lowest index.
pub fn hollowise_simultaneous(problem: &HollowisationProblem) -> HollowisationResult {
    let p = problem.size();
    for (index, m) in problem.matrices.iter().enumerate() {
        if is_hollowisable(m, problem.tolerance) != Hollowisability::Yes {
            let (residual, per_matrix) = max_residual(problem, &CMatrix::identity(p, p));
            return HollowisationResult {
                status: HollowStatus::NotFound,
                unitary: CMatrix::identity(p, p),
                residual,
                per_matrix,
                iterations_used: 0,
                restarts_used: 0,
                thompson_gap: Some(m.thompson_gap()),
                blocking_matrix: Some(index),
            };
        }
    }

    let restarts = problem.restarts.max(1);
    let mut best: Option<(usize, RestartOutcome)> = None;
    let mut iterations_used = 0;
    let mut restarts_used = 0;
    for batch_start in (0..restarts).step_by(RESTART_BATCH) {
        let batch: Vec<usize> = (batch_start..(batch_start + RESTART_BATCH).min(restarts)).collect();
        let outcomes: Vec<(usize, RestartOutcome)> = batch
            .par_iter()
            .map(|&index| (index, descend(problem, restart_start(problem, index))))
            .collect();
        for (index, outcome) in outcomes {
            restarts_used = index + 1;
            iterations_used += outcome.iterations;
            let success = outcome.residual <= problem.tolerance;
            let better = best.as_ref().is_none_or(|(_, b)| outcome.residual < b.residual);
            if better {
                best = Some((index, outcome));
            }
            if success {
                let (_, winner) = best.take().expect("just stored");
                return HollowisationResult {
                    status: HollowStatus::Found,
                    unitary: winner.unitary,
                    residual: winner.residual,
                    per_matrix: winner.per_matrix,
                    iterations_used,
                    restarts_used,
                    thompson_gap: None,
                    blocking_matrix: None,
                };
            }
        }
    }
    let (_, best) = best.expect("at least one restart");
    HollowisationResult {
        status: HollowStatus::NotFound,
        unitary: best.unitary,
        residual: best.residual,
        per_matrix: best.per_matrix,
        iterations_used,
        restarts_used,
        thompson_gap: None,
        blocking_matrix: None,
    }
}

/// Hollowise one symmetric matrix, zero-extending a 3×3 matrix with
/// `s_1 < s_2 + s_3` to 4×4 first. A violated Thompson condition yields
/// `NotFound` with the gap as certificate.
pub fn hollowise_single(tau: &PreconcurrenceMatrix, opts: &HollowiseOptions) -> HollowisationResult {
    let probe = HollowisationProblem::new(vec![tau.clone()], opts);
    match is_hollowisable(tau, probe.tolerance) {
        Hollowisability::No => {
            let mut out = hollowise_simultaneous(&probe);
            out.thompson_gap = Some(tau.thompson_gap());
            out.blocking_matrix = Some(0);
            out
        }
        Hollowisability::YesWithExtension => {
            hollowise_simultaneous(&HollowisationProblem::new(vec![tau.extended(4)], opts))
        }
        Hollowisability::Yes => hollowise_simultaneous(&probe),
    }
}

/// Outcome of one size in a [`p_sweep`].
#[derive(Debug, Clone)]
pub struct SweepAttempt {
    pub p: usize,
    pub status: HollowStatus,
    pub residual: f64,
    pub short_circuited: bool,
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    /// The first size that succeeded and its result.
    pub success: Option<(usize, HollowisationResult)>,
    pub attempts: Vec<SweepAttempt>,
}

/// Try `p = r, r+1, …, min(p_max, r²)` on the zero-extended matrices and stop
/// at the first success. `taus` are the `r × r` eigendecomposition matrices.
pub fn p_sweep(taus: &[PreconcurrenceMatrix], p_max: Option<usize>, opts: &HollowiseOptions) -> SweepOutcome {
    let r = taus.first().map_or(1, PreconcurrenceMatrix::size).max(1);
    let upper = p_max.map_or(r * r, |cap| cap.min(r * r)).max(r);
    let mut attempts = Vec::new();
    for p in r..=upper {
        let matrices: Vec<PreconcurrenceMatrix> = taus.iter().map(|t| t.extended(p)).collect();
        let problem = HollowisationProblem::new(matrices, opts);
        let result = hollowise_simultaneous(&problem);
        attempts.push(SweepAttempt {
            p,
            status: result.status,
            residual: result.residual,
            short_circuited: result.blocking_matrix.is_some(),
        });
        log::debug!("p = {p}: {:?}, residual {:e}", result.status, result.residual);
        if result.found() {
            return SweepOutcome {
                success: Some((p, result)),
                attempts,
            };
        }
    }
    SweepOutcome {
        success: None,
        attempts,
    }
}
