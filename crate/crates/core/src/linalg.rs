//! Dense complex linear algebra shared by every other module.
//!
//! Matrices are `nalgebra` dense matrices over `Complex64`. The helpers here
//! add the checks and orderings the rest of the crate relies on: eigenvalues
//! and singular values are always returned in descending order, and the
//! congruence is the *transpose* congruence `U M Uᵀ`, not a similarity.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::random::seeded_rng;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Default tolerance on `‖M − M†‖_max` accepted by [`hermitian_eig`].
pub const DEFAULT_HERMITIAN_TOL: f64 = 1e-9;

/// Tolerance on `‖U U† − I‖_max` accepted by [`congruence`].
pub const UNITARY_TOL: f64 = 1e-10;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Eigenpairs of a Hermitian matrix, eigenvalues descending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector of `values[k]`.
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn vector(&self, k: usize) -> CVector {
        self.vectors.column(k).into_owned()
    }

    pub fn min_value(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }
}

pub fn ensure_finite(m: &CMatrix) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

pub fn ensure_square(m: &CMatrix) -> Result<usize> {
    if m.nrows() == m.ncols() {
        Ok(m.nrows())
    } else {
        Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        })
    }
}

/// Largest entry modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

pub fn symmetric_deviation(m: &CMatrix) -> f64 {
    max_abs(&(m - m.transpose()))
}

/// `‖U U† − I‖_max`.
pub fn unitarity_deviation(u: &CMatrix) -> f64 {
    if u.nrows() != u.ncols() {
        return f64::INFINITY;
    }
    let n = u.nrows();
    max_abs(&(u * u.adjoint() - CMatrix::identity(n, n)))
}

/// Hermitian eigendecomposition with eigenvalues sorted descending.
///
/// The input is checked against `tol_herm` and then replaced by its exactly
/// Hermitian part `(M + M†)/2` before the solve.
pub fn hermitian_eig(m: &CMatrix, tol_herm: f64) -> Result<HermitianEigen> {
    let n = ensure_square(m)?;
    ensure_finite(m)?;
    let deviation = hermitian_deviation(m);
    if deviation > tol_herm {
        return Err(Error::NotHermitian { deviation });
    }
    if n == 0 {
        return Ok(HermitianEigen {
            values: Vec::new(),
            vectors: CMatrix::zeros(0, 0),
        });
    }
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(n, n, |row, col| eig.eigenvectors[(row, order[col])]);
    Ok(HermitianEigen { values, vectors })
}

/// Singular values, descending. Works for rectangular input.
pub fn singular_values(m: &CMatrix) -> Result<Vec<f64>> {
    ensure_finite(m)?;
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(Vec::new());
    }
    let mut values: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

/// The transpose congruence `U M Uᵀ`.
pub fn congruence(u: &CMatrix, m: &CMatrix) -> Result<CMatrix> {
    let n = ensure_square(m)?;
    if u.nrows() != n || u.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: u.nrows().max(u.ncols()),
        });
    }
    let deviation = unitarity_deviation(u);
    if deviation > UNITARY_TOL {
        return Err(Error::NotUnitary { deviation });
    }
    Ok(congruence_unchecked(u, m))
}

pub(crate) fn congruence_unchecked(u: &CMatrix, m: &CMatrix) -> CMatrix {
    u * m * u.transpose()
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the phases
/// of `R`'s diagonal pushed into `Q`. Deterministic per seed.
pub fn random_unitary(n: usize, seed: u64) -> CMatrix {
    assert!(n >= 1, "random_unitary needs n >= 1");
    let mut rng = seeded_rng(seed);
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let ginibre = CMatrix::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re * scale, im * scale)
    });
    let qr = ginibre.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for k in 0..n {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        let mut col = q.column_mut(k);
        col *= phase;
    }
    q
}

/// `exp(A)` for skew-Hermitian `A`, through the eigendecomposition of the
/// Hermitian matrix `iA`. The result is unitary to rounding.
pub fn expm_skew_hermitian(a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    let i = C64::new(0.0, 1.0);
    let h: CMatrix = a.map(|z| z * i);
    let h = (&h + h.adjoint()).scale(0.5);
    let eig = h.symmetric_eigen();
    // A = -iH, so exp(A) = V diag(exp(-i λ)) V†.
    let phases = DVector::from_fn(n, |k, _| C64::from_polar(1.0, -eig.eigenvalues[k]));
    let v = &eig.eigenvectors;
    let mut scaled = v.clone();
    for k in 0..n {
        let mut col = scaled.column_mut(k);
        col *= phases[k];
    }
    scaled * v.adjoint()
}

/// Principal square root of a Hermitian positive semidefinite matrix.
/// Eigenvalues at rounding level (below `n ε λ_max`) are taken as zero, so
/// that a rank-deficient input keeps an exactly rank-deficient root.
pub fn psd_sqrt(m: &CMatrix) -> Result<CMatrix> {
    let eig = hermitian_eig(m, DEFAULT_HERMITIAN_TOL)?;
    let n = eig.values.len();
    let cut = n as f64 * f64::EPSILON * eig.values.first().copied().unwrap_or(0.0).max(0.0);
    let mut out = CMatrix::zeros(n, n);
    for (k, &lambda) in eig.values.iter().enumerate() {
        if lambda > cut {
            let v = eig.vector(k);
            out += (&v * v.adjoint()).scale(lambda.sqrt());
        }
    }
    Ok(out)
}

/// Embed `m` in the top-left corner of a `size × size` zero matrix.
pub fn zero_extend(m: &CMatrix, size: usize) -> CMatrix {
    assert!(size >= m.nrows() && size >= m.ncols());
    let mut out = CMatrix::zeros(size, size);
    out.view_mut((0, 0), (m.nrows(), m.ncols())).copy_from(m);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_hermitian, random_symmetric};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn identity_eigenvalues() {
        let eig = hermitian_eig(&CMatrix::identity(2, 2), 1e-9).unwrap();
        assert_eq!(eig.values, vec![1.0, 1.0]);
        let gram = eig.vectors.adjoint() * &eig.vectors;
        assert!(max_abs(&(gram - CMatrix::identity(2, 2))) < 1e-12);
    }

    #[test]
    fn diagonal_eigenpairs_sorted() {
        let m = CMatrix::from_diagonal(&CVector::from_vec(vec![c(1.0, 0.0), c(3.0, 0.0)]));
        let eig = hermitian_eig(&m, 1e-9).unwrap();
        assert!((eig.values[0] - 3.0).abs() < 1e-14 && (eig.values[1] - 1.0).abs() < 1e-14);
        assert!((eig.vectors[(1, 0)].norm() - 1.0).abs() < 1e-12);
        assert!((eig.vectors[(0, 1)].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eig_rejects_bad_input() {
        let rect = CMatrix::zeros(2, 3);
        assert!(matches!(hermitian_eig(&rect, 1e-9), Err(Error::NotSquare { .. })));
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(hermitian_eig(&m, 1e-9), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn eig_satisfies_eigen_equation() {
        for seed in 0..20 {
            let m = random_hermitian(7, seed);
            let eig = hermitian_eig(&m, 1e-9).unwrap();
            let scale = m.norm();
            for k in 0..7 {
                let v = eig.vector(k);
                let lhs = &m * &v;
                let rhs = v.scale(eig.values[k]);
                assert!((lhs - rhs).norm() < 1e-10 * scale);
            }
            for w in eig.values.windows(2) {
                assert!(w[0] >= w[1]);
            }
        }
    }

    #[test]
    fn singular_value_examples() {
        assert_eq!(singular_values(&CMatrix::zeros(3, 3)).unwrap(), vec![0.0; 3]);
        let swap = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let s = singular_values(&swap).unwrap();
        assert!((s[0] - 1.0).abs() < 1e-14 && (s[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn singular_values_rejects_nan() {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 0)] = c(f64::NAN, 0.0);
        assert_eq!(singular_values(&m), Err(Error::NonFinite));
    }

    #[test]
    fn congruence_examples() {
        let m = random_symmetric(3, 4);
        let same = congruence(&CMatrix::identity(3, 3), &m).unwrap();
        assert!(max_abs(&(same - &m)) < 1e-15);

        let u = CMatrix::from_diagonal(&CVector::from_vec(vec![c(0.0, 1.0), ONE]));
        let d = CMatrix::from_diagonal(&CVector::from_vec(vec![c(2.0, 0.5), c(-1.0, 3.0)]));
        let out = congruence(&u, &d).unwrap();
        assert!((out[(0, 0)] - c(-2.0, -0.5)).norm() < 1e-15);
        assert!((out[(1, 1)] - c(-1.0, 3.0)).norm() < 1e-15);
    }

    #[test]
    fn congruence_errors() {
        let m = CMatrix::identity(2, 2);
        let not_unitary = CMatrix::identity(2, 2).scale(2.0);
        assert!(matches!(congruence(&not_unitary, &m), Err(Error::NotUnitary { .. })));
        let u3 = CMatrix::identity(3, 3);
        assert!(matches!(congruence(&u3, &m), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn random_unitary_examples() {
        let u1 = random_unitary(1, 99);
        assert!((u1[(0, 0)].norm() - 1.0).abs() < 1e-14);
        assert_eq!(random_unitary(4, 7), random_unitary(4, 7));
        let u = random_unitary(3, 1);
        let gram = u.adjoint() * &u;
        assert!(max_abs(&(gram - CMatrix::identity(3, 3))) < 1e-12);
    }

    #[test]
    fn expm_of_real_generator() {
        let half_pi = std::f64::consts::FRAC_PI_2;
        let a = CMatrix::from_row_slice(2, 2, &[ZERO, c(-half_pi, 0.0), c(half_pi, 0.0), ZERO]);
        let u = expm_skew_hermitian(&a);
        let expected = CMatrix::from_row_slice(2, 2, &[ZERO, c(-1.0, 0.0), ONE, ZERO]);
        assert!(max_abs(&(u - expected)) < 1e-14);
    }

    #[test]
    fn psd_sqrt_squares_back() {
        let g = random_hermitian(5, 3);
        let psd = &g * g.adjoint();
        let r = psd_sqrt(&psd).unwrap();
        assert!((&r * &r - &psd).norm() < 1e-10 * psd.norm());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn congruence_preserves_singular_values(n in 1usize..7, seed in 0u64..10_000) {
            let m = random_symmetric(n, seed);
            let u = random_unitary(n, seed.wrapping_add(17));
            let out = congruence(&u, &m).unwrap();
            prop_assert!(symmetric_deviation(&out) < 1e-12);
            let before = singular_values(&m).unwrap();
            let after = singular_values(&out).unwrap();
            for (a, b) in before.iter().zip(&after) {
                prop_assert!((a - b).abs() < 1e-9);
            }
        }

        #[test]
        fn eig_reconstructs(n in 1usize..33, seed in 0u64..10_000) {
            let m = random_hermitian(n, seed);
            let eig = hermitian_eig(&m, 1e-9).unwrap();
            let mut rebuilt = CMatrix::zeros(n, n);
            for k in 0..n {
                let v = eig.vector(k);
                rebuilt += (&v * v.adjoint()).scale(eig.values[k]);
            }
            prop_assert!((rebuilt - &m).norm() < 1e-9);
        }

        #[test]
        fn singular_values_match_frobenius_and_conjugation(n in 1usize..8, seed in 0u64..10_000) {
            let m = random_symmetric(n, seed);
            let s = singular_values(&m).unwrap();
            let sum_sq: f64 = s.iter().map(|x| x * x).sum();
            let fro = m.norm_squared();
            prop_assert!((sum_sq - fro).abs() <= 1e-10 * fro.max(1.0));
            let sc = singular_values(&m.conjugate()).unwrap();
            let st = singular_values(&m.transpose()).unwrap();
            for k in 0..n {
                prop_assert!((s[k] - sc[k]).abs() < 1e-10);
                prop_assert!((s[k] - st[k]).abs() < 1e-10);
            }
        }
    }
}
