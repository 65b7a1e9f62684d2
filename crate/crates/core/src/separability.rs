//! Mixed-state separability classification.
//!
//! [`classify`] runs, in order:
//!
//! 1. the closed-form concurrences: any `C_α(ρ) > tol` certifies
//!    entanglement;
//! 2. for rank 2, the exact criterion of [`classify_rank2`];
//! 3. a partial-transpose scan over all bipartitions (skippable);
//! 4. a sweep `p = r … r²` of simultaneous hollowisation of the zero-extended
//!    `τ_α`; a hit is turned into a decomposition and verified independently;
//! 5. otherwise `Undecided`.
//!
//! `Separable` is only returned with a decomposition that reconstructs `ρ`
//! and whose components are product states; `Entangled` only with a witness
//! recomputable from `ρ`.

use crate::concurrence::{pure_concurrences, MixedAnalysis, PreconcurrenceMatrix};
use crate::error::{Error, Result};
use crate::hollowizer::{p_sweep, HollowiseOptions, SweepAttempt};
use crate::linalg::{self, CMatrix, C64};
use crate::operators::OperatorCatalog;
use crate::states::{self, is_product, partial_transpose, sum_of_projectors, DensityMatrix, PureState, WeightedState};

/// Frobenius tolerance of the reconstruction check.
pub const RECONSTRUCTION_TOL: f64 = 1e-8;
/// Components with a norm below this are dropped from decompositions.
pub const DROP_NORM: f64 = 1e-12;
/// Tolerance of the rank-2 proportionality test, relative to the largest
/// singular value over all `τ_α` (floored at 1).
pub const PROPORTIONALITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifyOptions {
    /// Zero-threshold on concurrences, relative to the largest singular value
    /// of all `τ_α` (floored at 1); also the absolute threshold of the PPT scan.
    pub tol: f64,
    /// Relative cut for the rank of `ρ`.
    pub rank_tol: f64,
    /// Relative cut for the matricization rank-1 check of components.
    pub component_rank_tol: f64,
    /// Largest decomposition length tried (capped at `r²`).
    pub p_max: Option<usize>,
    pub skip_ppt: bool,
    pub hollowise: HollowiseOptions,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self {
            tol: crate::concurrence::DEFAULT_MIXED_TOL,
            rank_tol: states::DEFAULT_RANK_TOL,
            component_rank_tol: states::DEFAULT_RANK_TOL,
            p_max: None,
            skip_ppt: false,
            hollowise: HollowiseOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerdictStatus {
    Separable,
    Entangled,
    Undecided,
}

impl VerdictStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            VerdictStatus::Separable => "separable",
            VerdictStatus::Entangled => "entangled",
            VerdictStatus::Undecided => "undecided",
        }
    }
}

/// A normalized product component with its weight `p_k = ‖ψ̃_k‖²`.
#[derive(Debug, Clone)]
pub struct Component {
    pub weight: f64,
    pub state: PureState,
}

#[derive(Debug, Clone)]
pub struct VerificationReport {
    /// `‖Σ_k |ψ̃_k⟩⟨ψ̃_k| − ρ‖_F`.
    pub reconstruction_error: f64,
    /// Largest `C_α` over the normalized components.
    pub max_component_concurrence: f64,
    /// Every component has rank-1 matricizations.
    pub all_product: bool,
    pub passed: bool,
}

#[derive(Debug, Clone)]
pub struct Decomposition {
    /// Length of the unitary that produced it.
    pub p: usize,
    pub components: Vec<Component>,
    /// Components dropped because their norm was below `DROP_NORM`.
    pub dropped: usize,
    pub report: VerificationReport,
}

#[derive(Debug, Clone)]
pub enum Evidence {
    Decomposition(Decomposition),
    /// `C_α(ρ)` beyond tolerance (zero-based `α`).
    Concurrence {
        alpha: usize,
        value: f64,
        tolerance: f64,
    },
    /// Negative partial transpose over the listed (zero-based) parties.
    Ppt {
        partition: Vec<usize>,
        min_eigenvalue: f64,
    },
    /// Rank 2: `τ_α` and `τ_β` are not proportional; `deviation` is
    /// `‖τ_β − c τ_α‖_F` for the best complex `c`, over the scale.
    Proportionality {
        alpha: usize,
        beta: usize,
        deviation: f64,
    },
    Diagnostics {
        max_concurrence: f64,
        min_ppt_eigenvalue: Option<f64>,
        attempts: Vec<SweepAttempt>,
    },
}

#[derive(Debug, Clone)]
pub struct SeparabilityVerdict {
    pub status: VerdictStatus,
    pub evidence: Evidence,
    pub rank: usize,
    /// `C_α(ρ)` in catalog order.
    pub concurrences: Vec<f64>,
    /// `s_1 − Σ_{k≥2} s_k` per `α`.
    pub thompson_gaps: Vec<f64>,
}

impl SeparabilityVerdict {
    pub fn decomposition(&self) -> Option<&Decomposition> {
        match &self.evidence {
            Evidence::Decomposition(d) => Some(d),
            _ => None,
        }
    }
}

/// Result of [`ppt_scan`] for one bipartition.
#[derive(Debug, Clone, PartialEq)]
pub struct PptEntry {
    pub partition: Vec<usize>,
    pub min_eigenvalue: f64,
}

/// Smallest eigenvalue of `ρ^{T_A}` for every bipartition `A | Ā`, one
/// representative per pair (the side without party 0).
pub fn ppt_scan(rho: &DensityMatrix) -> Result<Vec<PptEntry>> {
    let n = rho.shape().parties();
    let mut out = Vec::new();
    for mask in 1u64..(1 << (n - 1)) {
        let partition: Vec<usize> = (1..n).filter(|&k| mask >> (k - 1) & 1 == 1).collect();
        let pt = partial_transpose(rho, &partition)?;
        let eig = linalg::hermitian_eig(&pt, linalg::DEFAULT_HERMITIAN_TOL)?;
        out.push(PptEntry {
            partition,
            min_eigenvalue: eig.min_value(),
        });
    }
    out.sort_by_key(|e| (e.partition.len(), e.partition.clone()));
    Ok(out)
}

/// The most negative PPT entry, if below `-tol`.
pub fn ppt_witness(entries: &[PptEntry], tol: f64) -> Option<&PptEntry> {
    entries
        .iter()
        .filter(|e| e.min_eigenvalue < -tol)
        .min_by(|a, b| a.min_eigenvalue.total_cmp(&b.min_eigenvalue))
}

/// `(ψ̃_1, …, ψ̃_p)ᵀ = U* (ṽ_1, …, ṽ_p)ᵀ` with `ṽ_k = 0` for `k > r`.
/// Returns the nonzero states and the number dropped.
pub fn extract_decomposition(u: &CMatrix, eigenstates: &[WeightedState]) -> Result<(Vec<WeightedState>, usize)> {
    let p = u.nrows();
    let r = eigenstates.len();
    if u.ncols() != p {
        return Err(Error::NotSquare {
            rows: p,
            cols: u.ncols(),
        });
    }
    if p < r {
        return Err(Error::DimensionMismatch { expected: r, actual: p });
    }
    let deviation = linalg::unitarity_deviation(u);
    if deviation > linalg::UNITARY_TOL {
        return Err(Error::NotUnitary { deviation });
    }
    let Some(first) = eigenstates.first() else {
        return Ok((Vec::new(), 0));
    };
    let shape = first.shape().clone();
    let d = shape.total_dim();
    let mut kept = Vec::with_capacity(p);
    let mut dropped = 0;
    for k in 0..p {
        let mut v = linalg::CVector::zeros(d);
        for (l, e) in eigenstates.iter().enumerate() {
            v.axpy(u[(k, l)].conj(), e.amplitudes(), C64::new(1.0, 0.0));
        }
        if v.norm() < DROP_NORM {
            dropped += 1;
        } else {
            kept.push(WeightedState::new(shape.clone(), v)?);
        }
    }
    Ok((kept, dropped))
}

/// Independent check of a candidate separable decomposition.
pub fn verify_decomposition(
    rho: &DensityMatrix,
    parts: &[WeightedState],
    catalog: &OperatorCatalog,
    opts: &ClassifyOptions,
) -> Result<(Vec<Component>, VerificationReport)> {
    let rebuilt = sum_of_projectors(rho.shape(), parts);
    let reconstruction_error = (rebuilt - rho.matrix()).norm();
    let mut components = Vec::with_capacity(parts.len());
    let mut max_component_concurrence: f64 = 0.0;
    let mut all_product = true;
    for part in parts {
        let Some(state) = part.state() else { continue };
        let c = pure_concurrences(&state, catalog)?;
        max_component_concurrence = c.into_iter().fold(max_component_concurrence, f64::max);
        all_product &= is_product(&state, opts.component_rank_tol);
        components.push(Component {
            weight: part.weight(),
            state,
        });
    }
    let passed = reconstruction_error <= RECONSTRUCTION_TOL
        && all_product
        && max_component_concurrence <= crate::concurrence::DEFAULT_PURE_TOL.max(opts.component_rank_tol);
    Ok((
        components,
        VerificationReport {
            reconstruction_error,
            max_component_concurrence,
            all_product,
            passed,
        },
    ))
}

fn check_shape(rho: &DensityMatrix, catalog: &OperatorCatalog) -> Result<()> {
    if rho.shape() == catalog.shape() {
        Ok(())
    } else {
        Err(Error::ShapeMismatch {
            state: rho.shape().dims().to_vec(),
            catalog: catalog.shape().dims().to_vec(),
        })
    }
}

fn verdict(analysis: &MixedAnalysis, status: VerdictStatus, evidence: Evidence) -> SeparabilityVerdict {
    SeparabilityVerdict {
        status,
        evidence,
        rank: analysis.rank(),
        concurrences: analysis.concurrences(),
        thompson_gaps: analysis.gaps(),
    }
}

// Scale floored at tr ρ = 1 so that states with all τ_α ≈ 0 keep a usable threshold.
fn absolute_tol(analysis: &MixedAnalysis, tol: f64) -> f64 {
    tol * analysis.scale().max(1.0)
}

/// The full pipeline described in the module docs.
pub fn classify(rho: &DensityMatrix, catalog: &OperatorCatalog, opts: &ClassifyOptions) -> Result<SeparabilityVerdict> {
    check_shape(rho, catalog)?;
    let analysis = MixedAnalysis::new(rho, catalog, opts.rank_tol)?;
    let tol = absolute_tol(&analysis, opts.tol);

    let concurrences = analysis.concurrences();
    if let Some((alpha, &value)) = concurrences
        .iter()
        .enumerate()
        .filter(|&(_, &c)| c > tol)
        .max_by(|a, b| a.1.total_cmp(b.1))
    {
        return Ok(verdict(
            &analysis,
            VerdictStatus::Entangled,
            Evidence::Concurrence {
                alpha,
                value,
                tolerance: tol,
            },
        ));
    }

    if analysis.rank() == 2 {
        return rank2_from_analysis(rho, catalog, &analysis, opts);
    }

    let mut min_ppt = None;
    if !opts.skip_ppt {
        let entries = ppt_scan(rho)?;
        if let Some(w) = ppt_witness(&entries, opts.tol) {
            return Ok(verdict(
                &analysis,
                VerdictStatus::Entangled,
                Evidence::Ppt {
                    partition: w.partition.clone(),
                    min_eigenvalue: w.min_eigenvalue,
                },
            ));
        }
        min_ppt = entries.iter().map(|e| e.min_eigenvalue).min_by(f64::total_cmp);
    }

    let sweep = p_sweep(&analysis.taus, opts.p_max, &opts.hollowise);
    if let Some((p, result)) = &sweep.success {
        let (parts, dropped) = extract_decomposition(&result.unitary, &analysis.eigenstates)?;
        let (components, report) = verify_decomposition(rho, &parts, catalog, opts)?;
        if report.passed {
            return Ok(verdict(
                &analysis,
                VerdictStatus::Separable,
                Evidence::Decomposition(Decomposition {
                    p: *p,
                    components,
                    dropped,
                    report,
                }),
            ));
        }
        log::warn!(
            "hollowising unitary at p = {p} failed verification (reconstruction {:e}, max C {:e})",
            report.reconstruction_error,
            report.max_component_concurrence
        );
    }
    let max_concurrence = concurrences.iter().copied().fold(0.0, f64::max);
    Ok(verdict(
        &analysis,
        VerdictStatus::Undecided,
        Evidence::Diagnostics {
            max_concurrence,
            min_ppt_eigenvalue: min_ppt,
            attempts: sweep.attempts,
        },
    ))
}

/// Exact criterion for rank-2 states: separable iff every 2×2 `τ_α` has two
/// equal singular values and all nonzero `τ_α` are proportional. Never
/// undecided in practice.
pub fn classify_rank2(
    rho: &DensityMatrix,
    catalog: &OperatorCatalog,
    opts: &ClassifyOptions,
) -> Result<SeparabilityVerdict> {
    check_shape(rho, catalog)?;
    let analysis = MixedAnalysis::new(rho, catalog, opts.rank_tol)?;
    if analysis.rank() != 2 {
        return Err(Error::WrongRank {
            expected: 2,
            actual: analysis.rank(),
        });
    }
    rank2_from_analysis(rho, catalog, &analysis, opts)
}

fn rank2_from_analysis(
    rho: &DensityMatrix,
    catalog: &OperatorCatalog,
    analysis: &MixedAnalysis,
    opts: &ClassifyOptions,
) -> Result<SeparabilityVerdict> {
    let tol = absolute_tol(analysis, opts.tol);
    let scale = analysis.scale();

    for (alpha, s) in analysis.singular_values.iter().enumerate() {
        let gap = s[0] - s[1];
        if gap > tol {
            return Ok(verdict(
                analysis,
                VerdictStatus::Entangled,
                Evidence::Concurrence {
                    alpha,
                    value: gap,
                    tolerance: tol,
                },
            ));
        }
    }

    let nonzero: Vec<(usize, &PreconcurrenceMatrix)> = analysis
        .taus
        .iter()
        .enumerate()
        .filter(|(_, t)| t.tau.norm() > tol)
        .collect();
    let reference = nonzero
        .iter()
        .max_by(|a, b| a.1.tau.norm().total_cmp(&b.1.tau.norm()))
        .copied();

    let u = match reference {
        None => CMatrix::identity(2, 2),
        Some((ref_alpha, ref_tau)) => {
            let r = &ref_tau.tau;
            let rr = r.norm_squared();
            for &(beta, t) in &nonzero {
                let coeff = r.dotc(&t.tau) / rr;
                let deviation = (&t.tau - r.map(|z| z * coeff)).norm() / scale.max(1.0);
                if deviation > PROPORTIONALITY_TOL {
                    return Ok(verdict(
                        analysis,
                        VerdictStatus::Entangled,
                        Evidence::Proportionality {
                            alpha: ref_alpha,
                            beta,
                            deviation,
                        },
                    ));
                }
            }
            hollowising_unitary_2x2(r)
        }
    };

    let (parts, dropped) = extract_decomposition(&u, &analysis.eigenstates)?;
    let (components, report) = verify_decomposition(rho, &parts, catalog, opts)?;
    if report.passed {
        return Ok(verdict(
            analysis,
            VerdictStatus::Separable,
            Evidence::Decomposition(Decomposition {
                p: 2,
                components,
                dropped,
                report,
            }),
        ));
    }
    log::warn!(
        "rank-2 decomposition failed verification (reconstruction {:e}, max C {:e})",
        report.reconstruction_error,
        report.max_component_concurrence
    );
    let max_concurrence = analysis.concurrences().into_iter().fold(0.0, f64::max);
    Ok(verdict(
        analysis,
        VerdictStatus::Undecided,
        Evidence::Diagnostics {
            max_concurrence,
            min_ppt_eigenvalue: None,
            attempts: Vec::new(),
        },
    ))
}

/// Unitary `U` with `U M Uᵀ` hollow for a symmetric 2×2 `M` whose singular
/// values are equal. The first row is an isotropic vector of `x ↦ x M xᵀ`,
/// the second its orthogonal complement.
pub fn hollowising_unitary_2x2(m: &CMatrix) -> CMatrix {
    let (a, b, c) = (m[(0, 0)], m[(0, 1)], m[(1, 1)]);
    let zero = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    // rows x = (x0, x1) with a x0² + 2 b x0 x1 + c x1² = 0
    let (x0, x1) = if c.norm() <= f64::EPSILON * m.norm() {
        (zero, one)
    } else if a.norm() <= f64::EPSILON * m.norm() {
        (one, zero)
    } else {
        let root = (b * b - a * c).sqrt();
        let sign = if (b.conj() * root).re >= 0.0 { 1.0 } else { -1.0 };
        let q = -(b + root * sign);
        // t = x1 / x0 solves c t² + 2 b t + a = 0; q / c and a / q are its roots
        if q.norm() > 0.0 {
            let t = a / q;
            (one, t)
        } else {
            (one, zero)
        }
    };
    let norm = (x0.norm_sqr() + x1.norm_sqr()).sqrt();
    let (x0, x1) = (x0 / norm, x1 / norm);
    CMatrix::from_row_slice(2, 2, &[x0, x1, -x1.conj(), x0.conj()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::generate_minimal;
    use crate::random::{
        random_density_matrix, random_product_state, random_separable_mixture, seeded_rng,
        symmetric_with_singular_values,
    };
    use crate::states::{bell_state, ghz_state, w_state, SystemShape};
    use rand::Rng;

    fn shape(d: &[usize]) -> SystemShape {
        SystemShape::new(d.to_vec()).unwrap()
    }

    #[test]
    fn two_by_two_closed_form_hollowises() {
        for seed in 0..50 {
            let s = 0.1 + seed as f64 * 0.05;
            let m = symmetric_with_singular_values(&[s, s], seed);
            let u = hollowising_unitary_2x2(&m);
            assert!(linalg::unitarity_deviation(&u) < 1e-13);
            let moved = linalg::congruence(&u, &m).unwrap();
            assert!(moved[(0, 0)].norm() < 1e-13 * s && moved[(1, 1)].norm() < 1e-13 * s);
        }
        // degenerate corners
        let z = C64::new(0.0, 0.0);
        let o = C64::new(1.0, 0.0);
        for m in [
            CMatrix::from_row_slice(2, 2, &[z, o, o, z]),
            CMatrix::from_row_slice(2, 2, &[o, z, z, o]),
            CMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
        ] {
            let moved = linalg::congruence(&hollowising_unitary_2x2(&m), &m).unwrap();
            assert!(moved[(0, 0)].norm() < 1e-14 && moved[(1, 1)].norm() < 1e-14);
        }
    }

    #[test]
    fn ppt_scan_partitions() {
        let rho = ghz_state(4).unwrap().projector();
        let entries = ppt_scan(&rho).unwrap();
        assert_eq!(entries.len(), 7);
        assert!(entries.iter().all(|e| !e.partition.contains(&0)));
        let bell = ppt_scan(&bell_state().projector()).unwrap();
        assert_eq!(bell.len(), 1);
        assert_eq!(bell[0].partition, vec![1]);
        assert!((bell[0].min_eigenvalue + 0.5).abs() < 1e-12);
    }

    #[test]
    fn separable_mixtures_are_ppt() {
        let mut rng = seeded_rng(5);
        for dims in [vec![2, 2], vec![2, 3], vec![2, 2, 2]] {
            let s = SystemShape::new(dims).unwrap();
            for _ in 0..20 {
                let rho = random_separable_mixture(&s, rng.random_range(1..6), &mut rng);
                assert!(ppt_witness(&ppt_scan(&rho).unwrap(), 1e-9).is_none());
            }
        }
    }

    #[test]
    fn extraction_with_identity_returns_eigenstates() {
        let mut rng = seeded_rng(3);
        let rho = random_density_matrix(&shape(&[2, 2]), &mut rng);
        let eig = states::eigendecompose_rho(&rho, states::DEFAULT_RANK_TOL).unwrap();
        let (parts, dropped) = extract_decomposition(&CMatrix::identity(4, 4), &eig).unwrap();
        assert_eq!(dropped, 0);
        assert_eq!(parts, eig);
    }

    #[test]
    fn extraction_reconstructs_for_any_unitary() {
        let mut rng = seeded_rng(17);
        for seed in 0..100u64 {
            let s = shape(&[2, 2, 2]);
            let rho = crate::random::random_density_matrix_of_rank(&s, 1 + (seed as usize % 4), &mut rng);
            let eig = states::eigendecompose_rho(&rho, states::DEFAULT_RANK_TOL).unwrap();
            let p = eig.len() + (seed as usize % 3);
            let u = linalg::random_unitary(p, seed);
            let (parts, _) = extract_decomposition(&u, &eig).unwrap();
            let rebuilt = sum_of_projectors(&s, &parts);
            assert!((rebuilt - rho.matrix()).norm() < 1e-12);
        }
    }

    #[test]
    fn extraction_rejects_bad_unitary() {
        let rho = bell_state().projector();
        let eig = states::eigendecompose_rho(&rho, states::DEFAULT_RANK_TOL).unwrap();
        let bad = CMatrix::identity(2, 2).scale(1.5);
        assert!(matches!(
            extract_decomposition(&bad, &eig),
            Err(Error::NotUnitary { .. })
        ));
    }

    #[test]
    fn ghz_projector_entangled_by_concurrence() {
        let rho = ghz_state(3).unwrap().projector();
        let cat = generate_minimal(rho.shape()).unwrap();
        let v = classify(&rho, &cat, &ClassifyOptions::default()).unwrap();
        assert_eq!(v.status, VerdictStatus::Entangled);
        assert!(matches!(v.evidence, Evidence::Concurrence { .. }));
    }

    #[test]
    fn product_projector_is_separable_at_p1() {
        let mut rng = seeded_rng(6);
        let psi = random_product_state(&shape(&[2, 3, 2]), &mut rng);
        let rho = psi.projector();
        let cat = generate_minimal(rho.shape()).unwrap();
        let v = classify(&rho, &cat, &ClassifyOptions::default()).unwrap();
        assert_eq!(v.status, VerdictStatus::Separable);
        let d = v.decomposition().unwrap();
        assert_eq!((d.p, d.components.len()), (1, 1));
    }

    #[test]
    fn classical_mixture_rank2() {
        let s = shape(&[2, 2, 2]);
        let a = PureState::basis(&s, &[0, 0, 0]).unwrap();
        let b = PureState::basis(&s, &[1, 1, 1]).unwrap();
        let rho = DensityMatrix::mixture(&s, &[0.5, 0.5], &[a, b]).unwrap();
        let cat = generate_minimal(&s).unwrap();
        let v = classify_rank2(&rho, &cat, &ClassifyOptions::default()).unwrap();
        assert_eq!(v.status, VerdictStatus::Separable);
        assert_eq!(v.decomposition().unwrap().components.len(), 2);
    }

    #[test]
    fn ghz_w_mixture_is_entangled() {
        let s = shape(&[2, 2, 2]);
        let rho = DensityMatrix::mixture(&s, &[0.9, 0.1], &[ghz_state(3).unwrap(), w_state(3).unwrap()]).unwrap();
        let cat = generate_minimal(&s).unwrap();
        let conc = crate::concurrence::mixed_concurrences(&rho, &cat).unwrap();
        assert!(conc.iter().any(|&c| c > 1e-3));
        let v = classify_rank2(&rho, &cat, &ClassifyOptions::default()).unwrap();
        assert_eq!(v.status, VerdictStatus::Entangled);
    }

    #[test]
    fn rank2_rejects_other_ranks() {
        let rho = bell_state().projector();
        let cat = generate_minimal(rho.shape()).unwrap();
        assert!(matches!(
            classify_rank2(&rho, &cat, &ClassifyOptions::default()),
            Err(Error::WrongRank { expected: 2, actual: 1 })
        ));
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let rho = bell_state().projector();
        let cat = generate_minimal(&shape(&[2, 2, 2])).unwrap();
        assert!(matches!(
            classify(&rho, &cat, &ClassifyOptions::default()),
            Err(Error::ShapeMismatch { .. })
        ));
    }
}
