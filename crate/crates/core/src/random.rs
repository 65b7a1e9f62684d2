//! Seeded sampling of matrices and states.
//!
//! Every generator takes an explicit `u64` seed and uses ChaCha8, so outputs
//! are reproducible across runs and platforms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{random_unitary, CMatrix, CVector, C64};
use crate::states::{DensityMatrix, PureState, SystemShape};

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derive an independent seed for stream `index` of `seed` (splitmix64).
pub fn sub_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn gaussian_complex(rng: &mut impl Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

pub fn gaussian_vector(len: usize, rng: &mut impl Rng) -> CVector {
    CVector::from_fn(len, |_, _| gaussian_complex(rng))
}

pub fn random_unit_vector(len: usize, rng: &mut impl Rng) -> CVector {
    let v = gaussian_vector(len, rng);
    let norm = v.norm();
    v.unscale(norm)
}

pub fn random_hermitian(n: usize, seed: u64) -> CMatrix {
    let mut rng = seeded_rng(seed);
    let g = CMatrix::from_fn(n, n, |_, _| gaussian_complex(&mut rng));
    (&g + g.adjoint()).scale(0.5)
}

pub fn random_symmetric(n: usize, seed: u64) -> CMatrix {
    let mut rng = seeded_rng(seed);
    let g = CMatrix::from_fn(n, n, |_, _| gaussian_complex(&mut rng));
    (&g + g.transpose()).scale(0.5)
}

/// Symmetric matrix `V diag(s) Vᵀ` with prescribed singular values and a
/// Haar-random `V`.
pub fn symmetric_with_singular_values(s: &[f64], seed: u64) -> CMatrix {
    let n = s.len();
    let v = random_unitary(n, seed);
    let d = CMatrix::from_diagonal(&CVector::from_iterator(n, s.iter().map(|&x| C64::new(x, 0.0))));
    &v * d * v.transpose()
}

/// Generic (Gaussian) normalized pure state.
pub fn random_pure_state(shape: &SystemShape, rng: &mut impl Rng) -> PureState {
    let v = random_unit_vector(shape.total_dim(), rng);
    PureState::new(shape.clone(), v).expect("normalized by construction")
}

/// Tensor product of independent random party vectors.
pub fn random_product_state(shape: &SystemShape, rng: &mut impl Rng) -> PureState {
    let factors: Vec<CVector> = shape.dims().iter().map(|&m| random_unit_vector(m, rng)).collect();
    PureState::product(shape, &factors).expect("factor dimensions follow the shape")
}

/// Random weights on the probability simplex (normalized exponentials).
pub fn random_weights(count: usize, rng: &mut impl Rng) -> Vec<f64> {
    let raw: Vec<f64> = (0..count).map(|_| -rng.random::<f64>().max(1e-12).ln()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

/// Convex mixture of `count` random product states with random weights.
pub fn random_separable_mixture(shape: &SystemShape, count: usize, rng: &mut impl Rng) -> DensityMatrix {
    let weights = random_weights(count, rng);
    let states: Vec<PureState> = (0..count).map(|_| random_product_state(shape, rng)).collect();
    DensityMatrix::mixture(shape, &weights, &states).expect("valid mixture")
}

/// Full-rank density matrix `G G† / tr` from a Ginibre matrix.
pub fn random_density_matrix(shape: &SystemShape, rng: &mut impl Rng) -> DensityMatrix {
    let d = shape.total_dim();
    let g = CMatrix::from_fn(d, d, |_, _| gaussian_complex(rng));
    let mut rho = &g * g.adjoint();
    let tr = rho.trace().re;
    rho.unscale_mut(tr);
    DensityMatrix::new(shape.clone(), rho).expect("Ginibre density matrix is valid")
}

/// Density matrix of rank `rank`: mixture of `rank` random pure states.
pub fn random_density_matrix_of_rank(shape: &SystemShape, rank: usize, rng: &mut impl Rng) -> DensityMatrix {
    let weights = random_weights(rank, rng);
    let states: Vec<PureState> = (0..rank).map(|_| random_pure_state(shape, rng)).collect();
    DensityMatrix::mixture(shape, &weights, &states).expect("valid mixture")
}
