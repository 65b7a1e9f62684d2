//! Generalized concurrences of pure and mixed states.
//!
//! For a pure state `C_α(ψ) = |⟨ψ|S_α|ψ*⟩|`, with `ψ*` conjugated in the
//! computational basis. For a mixed state the convex roof has the closed form
//! `C_α(ρ) = max(0, s_1 − Σ_{k≥2} s_k)` where `s_k` are the singular values of
//! the preconcurrence matrix `τ_α` built on the eigendecomposition of `ρ`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64};
use crate::operators::{OperatorCatalog, SpinFlipOperator};
use crate::states::{self, DensityMatrix, PureState, SystemShape, WeightedState};

/// Absolute zero-threshold for pure-state concurrences.
pub const DEFAULT_PURE_TOL: f64 = 1e-10;
/// Relative zero-threshold for mixed-state verdicts (scaled by the largest
/// singular value over all `τ_α`).
pub const DEFAULT_MIXED_TOL: f64 = 1e-9;

/// Catalogs at least this long are evaluated with rayon.
const PARALLEL_THRESHOLD: usize = 256;

/// Symmetric matrix `(τ_α^D)_{kl} = ⟨ψ̃_k|S_α|ψ̃_l*⟩`, possibly zero-extended.
#[derive(Debug, Clone, PartialEq)]
pub struct PreconcurrenceMatrix {
    /// Zero-based catalog index, when known.
    pub alpha: Option<usize>,
    pub tau: CMatrix,
    /// Number of leading rows coming from nonzero states; the rest are zero.
    pub base_rank: usize,
}

impl PreconcurrenceMatrix {
    pub fn size(&self) -> usize {
        self.tau.nrows()
    }

    pub fn singular_values(&self) -> Vec<f64> {
        linalg::singular_values(&self.tau).expect("preconcurrence matrices are finite")
    }

    /// `s_1 − Σ_{k≥2} s_k` (0 for an empty matrix).
    pub fn thompson_gap(&self) -> f64 {
        thompson_gap(&self.singular_values())
    }

    /// Zero-extend to `size × size`.
    pub fn extended(&self, size: usize) -> Self {
        Self {
            alpha: self.alpha,
            tau: linalg::zero_extend(&self.tau, size),
            base_rank: self.base_rank,
        }
    }
}

/// `s_1 − Σ_{k≥2} s_k` for singular values sorted descending.
pub fn thompson_gap(singular_values: &[f64]) -> f64 {
    match singular_values.split_first() {
        Some((first, rest)) => first - rest.iter().sum::<f64>(),
        None => 0.0,
    }
}

/// `C_α(ψ) = 2 |a_i a_i′ − a_j a_j′|`.
pub fn pure_concurrence(psi: &PureState, op: &SpinFlipOperator) -> Result<f64> {
    let a = psi.amplitudes();
    if op.indices().iter().any(|&x| x >= a.len()) {
        return Err(Error::DimensionMismatch {
            expected: op.indices().into_iter().max().unwrap_or(0) + 1,
            actual: a.len(),
        });
    }
    Ok(op.bilinear(a, a).norm())
}

/// Pure concurrences for every catalog operator, in catalog order.
pub fn pure_concurrences(psi: &PureState, catalog: &OperatorCatalog) -> Result<Vec<f64>> {
    check_shape(psi.shape(), catalog)?;
    let a = psi.amplitudes();
    let eval = |op: &SpinFlipOperator| op.bilinear(a, a).norm();
    Ok(if catalog.len() >= PARALLEL_THRESHOLD {
        catalog.operators().par_iter().map(eval).collect()
    } else {
        catalog.iter().map(eval).collect()
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum PureVerdict {
    Separable,
    /// Violating `(α, C_α)` pairs, zero-based `α`, catalog order.
    Entangled {
        witnesses: Vec<(usize, f64)>,
    },
}

impl PureVerdict {
    pub fn is_separable(&self) -> bool {
        matches!(self, PureVerdict::Separable)
    }
}

/// Separable iff every `C_α(ψ) ≤ tol`.
pub fn pure_separability(psi: &PureState, catalog: &OperatorCatalog, tol: f64) -> Result<PureVerdict> {
    let values = pure_concurrences(psi, catalog)?;
    let witnesses: Vec<(usize, f64)> = values.into_iter().enumerate().filter(|&(_, c)| c > tol).collect();
    Ok(if witnesses.is_empty() {
        PureVerdict::Separable
    } else {
        PureVerdict::Entangled { witnesses }
    })
}

/// `τ_{kl} = ⟨ψ̃_k|S|ψ̃_l*⟩ = conj(ψ̃_kᵀ S ψ̃_l)`.
pub fn preconcurrence(states: &[WeightedState], op: &SpinFlipOperator) -> Result<PreconcurrenceMatrix> {
    let p = states.len();
    if let Some(first) = states.first() {
        for s in states {
            if s.shape() != first.shape() {
                return Err(Error::WrongShape {
                    expected: first.shape().dims().to_vec(),
                    actual: s.shape().dims().to_vec(),
                });
            }
        }
        let d = first.shape().total_dim();
        if op.indices().iter().any(|&x| x >= d) {
            return Err(Error::DimensionMismatch {
                expected: op.indices().into_iter().max().unwrap_or(0) + 1,
                actual: d,
            });
        }
    }
    let mut tau = CMatrix::zeros(p, p);
    for k in 0..p {
        for l in k..p {
            let v = op.bilinear(states[k].amplitudes(), states[l].amplitudes()).conj();
            tau[(k, l)] = v;
            tau[(l, k)] = v;
        }
    }
    let base_rank = states
        .iter()
        .filter(|s| s.amplitudes().iter().any(|z| *z != C64::new(0.0, 0.0)))
        .count();
    Ok(PreconcurrenceMatrix {
        alpha: None,
        tau,
        base_rank,
    })
}

/// Eigendecomposition of `ρ` together with every `τ_α` of a catalog.
#[derive(Debug, Clone)]
pub struct MixedAnalysis {
    pub eigenstates: Vec<WeightedState>,
    pub taus: Vec<PreconcurrenceMatrix>,
    /// Singular values of each `τ_α`, descending.
    pub singular_values: Vec<Vec<f64>>,
}

impl MixedAnalysis {
    pub fn new(rho: &DensityMatrix, catalog: &OperatorCatalog, rank_tol: f64) -> Result<Self> {
        check_shape(rho.shape(), catalog)?;
        let eigenstates = states::eigendecompose_rho(rho, rank_tol)?;
        let build = |(alpha, op): (usize, &SpinFlipOperator)| {
            let mut tau = preconcurrence(&eigenstates, op).expect("shapes checked");
            tau.alpha = Some(alpha);
            let s = tau.singular_values();
            (tau, s)
        };
        let pairs: Vec<(PreconcurrenceMatrix, Vec<f64>)> = if catalog.len() >= PARALLEL_THRESHOLD {
            catalog.operators().par_iter().enumerate().map(build).collect()
        } else {
            catalog.iter().enumerate().map(build).collect()
        };
        let (taus, singular_values) = pairs.into_iter().unzip();
        Ok(Self {
            eigenstates,
            taus,
            singular_values,
        })
    }

    pub fn rank(&self) -> usize {
        self.eigenstates.len()
    }

    pub fn gaps(&self) -> Vec<f64> {
        self.singular_values.iter().map(|s| thompson_gap(s)).collect()
    }

    /// `C_α(ρ) = max(0, s_1 − Σ_{k≥2} s_k)` per catalog operator.
    pub fn concurrences(&self) -> Vec<f64> {
        self.gaps().into_iter().map(|g| g.max(0.0)).collect()
    }

    /// Largest singular value over all `τ_α`; the scale of verdict thresholds.
    pub fn scale(&self) -> f64 {
        self.singular_values
            .iter()
            .filter_map(|s| s.first().copied())
            .fold(0.0, f64::max)
    }
}

/// Closed-form mixed-state concurrence for one operator.
pub fn mixed_concurrence(rho: &DensityMatrix, op: &SpinFlipOperator) -> Result<f64> {
    mixed_concurrence_with_tol(rho, op, states::DEFAULT_RANK_TOL)
}

pub fn mixed_concurrence_with_tol(rho: &DensityMatrix, op: &SpinFlipOperator, rank_tol: f64) -> Result<f64> {
    let eigenstates = states::eigendecompose_rho(rho, rank_tol)?;
    let tau = preconcurrence(&eigenstates, op)?;
    Ok(tau.thompson_gap().max(0.0))
}

/// Mixed concurrences for every catalog operator.
pub fn mixed_concurrences(rho: &DensityMatrix, catalog: &OperatorCatalog) -> Result<Vec<f64>> {
    Ok(MixedAnalysis::new(rho, catalog, states::DEFAULT_RANK_TOL)?.concurrences())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hollowisability {
    Yes,
    /// A 3×3 matrix with `s_1 < s_2 + s_3`: hollowisable only after extension
    /// to 4×4.
    YesWithExtension,
    No,
}

/// Thompson condition `s_1 − Σ_{k≥2} s_k ≤ 0` at the matrix's own size, with
/// the 3×3 special case.
pub fn is_hollowisable(tau: &PreconcurrenceMatrix, tol: f64) -> Hollowisability {
    let gap = tau.thompson_gap();
    if gap > tol {
        Hollowisability::No
    } else if tau.size() == 3 && gap < -tol {
        Hollowisability::YesWithExtension
    } else {
        Hollowisability::Yes
    }
}

/// `C(ρ) = max(0, λ_1 − λ_2 − λ_3 − λ_4)` with `λ_k` the square roots of the
/// eigenvalues of `ρ S ρ* S`, `S = σ_y ⊗ σ_y`.
pub fn wootters_concurrence(rho: &DensityMatrix) -> Result<f64> {
    if rho.shape().dims() != [2, 2] {
        return Err(Error::WrongShape {
            expected: vec![2, 2],
            actual: rho.shape().dims().to_vec(),
        });
    }
    let i = C64::new(0.0, 1.0);
    let z = C64::new(0.0, 0.0);
    let sigma_y = CMatrix::from_row_slice(2, 2, &[z, -i, i, z]);
    let flip = sigma_y.kronecker(&sigma_y);
    let lambdas = flip_spectrum(rho.matrix(), &flip)?;
    let gap = lambdas[0] - lambdas[1..].iter().sum::<f64>();
    Ok(gap.max(0.0))
}

/// Square roots of the eigenvalues of `ρ S ρ* S` for a Hermitian `S`,
/// descending. They are the singular values of `√ρ S √ρ*`, whose Gram
/// matrix is `√ρ (S ρ* S) √ρ`; taking singular values avoids the square
/// root of rounding-level eigenvalues.
pub fn flip_spectrum(rho: &CMatrix, flip: &CMatrix) -> Result<Vec<f64>> {
    let root = linalg::psd_sqrt(rho)?;
    let a = &root * flip * root.conjugate();
    linalg::singular_values(&a)
}

fn check_shape(shape: &SystemShape, catalog: &OperatorCatalog) -> Result<()> {
    if shape == catalog.shape() {
        Ok(())
    } else {
        Err(Error::ShapeMismatch {
            state: shape.dims().to_vec(),
            catalog: catalog.shape().dims().to_vec(),
        })
    }
}
