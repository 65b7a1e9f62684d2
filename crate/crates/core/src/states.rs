//! Composite-system data model.
//!
//! Basis order is row-major with the last party varying fastest, so for three
//! qubits the flat indices 0, 1, 2, ... are |000⟩, |001⟩, |010⟩, ... Party
//! indices in this API are zero-based.

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, C64, ONE, ZERO};

/// Eigenvalues below `-DENSITY_PSD_TOL` make a matrix invalid.
pub const DENSITY_PSD_TOL: f64 = 1e-9;
/// Trace tolerance of a density matrix.
pub const DENSITY_TRACE_TOL: f64 = 1e-9;
/// Default relative cut for numeric ranks.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;
/// Norm tolerance of a normalized pure state.
pub const PURE_NORM_TOL: f64 = 1e-10;

/// Negative eigenvalues in `[-DENSITY_PSD_TOL, -CLIP_THRESHOLD)` are clipped;
/// anything closer to zero is treated as rounding and left alone.
const CLIP_THRESHOLD: f64 = 1e-13;

/// Local dimensions `(m_1, ..., m_N)` of the parties.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SystemShape {
    dims: Vec<usize>,
}

impl SystemShape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.len() < 2 {
            return Err(Error::InvalidShape(format!(
                "need at least 2 parties, got {}",
                dims.len()
            )));
        }
        if let Some(&m) = dims.iter().find(|&&m| m < 2) {
            return Err(Error::InvalidShape(format!("party dimension {m} is below 2")));
        }
        let mut total: usize = 1;
        for &m in &dims {
            total = total
                .checked_mul(m)
                .ok_or_else(|| Error::InvalidShape("total dimension overflows".into()))?;
        }
        Ok(Self { dims })
    }

    /// `N` qubits.
    pub fn qubits(n: usize) -> Result<Self> {
        Self::new(vec![2; n])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn parties(&self) -> usize {
        self.dims.len()
    }

    /// `D = Π m_j`.
    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// Flat index of a multi-index (last party fastest).
    pub fn flat_index(&self, multi: &[usize]) -> usize {
        debug_assert_eq!(multi.len(), self.dims.len());
        multi.iter().zip(&self.dims).fold(0, |acc, (&i, &m)| {
            debug_assert!(i < m);
            acc * m + i
        })
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for (slot, &m) in out.iter_mut().zip(&self.dims).rev() {
            *slot = flat % m;
            flat /= m;
        }
        out
    }

    pub fn check_party(&self, party: usize) -> Result<()> {
        if party < self.parties() {
            Ok(())
        } else {
            Err(Error::PartyOutOfRange {
                party,
                parties: self.parties(),
            })
        }
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len == self.total_dim() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.total_dim(),
                actual: len,
            })
        }
    }
}

impl std::fmt::Display for SystemShape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.dims.iter().map(|m| m.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Normalized state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    shape: SystemShape,
    amplitudes: CVector,
}

impl PureState {
    pub fn new(shape: SystemShape, amplitudes: CVector) -> Result<Self> {
        shape.check_len(amplitudes.len())?;
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > PURE_NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { shape, amplitudes })
    }

    /// Normalizes `amplitudes` first; fails only on a zero vector.
    pub fn normalized(shape: SystemShape, amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized { norm });
        }
        Self::new(shape, amplitudes.unscale(norm))
    }

    pub fn basis(shape: &SystemShape, multi: &[usize]) -> Result<Self> {
        if multi.len() != shape.parties() || multi.iter().zip(shape.dims()).any(|(&i, &m)| i >= m) {
            return Err(Error::InvalidShape(format!(
                "basis label {multi:?} does not fit {shape}"
            )));
        }
        let mut v = CVector::zeros(shape.total_dim());
        v[shape.flat_index(multi)] = ONE;
        Self::new(shape.clone(), v)
    }

    /// Tensor product of single-party vectors (normalized on the way).
    pub fn product(shape: &SystemShape, factors: &[CVector]) -> Result<Self> {
        if factors.len() != shape.parties() {
            return Err(Error::DimensionMismatch {
                expected: shape.parties(),
                actual: factors.len(),
            });
        }
        let mut v = CVector::from_element(1, ONE);
        for (f, &m) in factors.iter().zip(shape.dims()) {
            if f.len() != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    actual: f.len(),
                });
            }
            v = v.kronecker(f);
        }
        Self::normalized(shape.clone(), v)
    }

    pub fn shape(&self) -> &SystemShape {
        &self.shape
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn projector(&self) -> DensityMatrix {
        DensityMatrix {
            shape: self.shape.clone(),
            matrix: &self.amplitudes * self.amplitudes.adjoint(),
        }
    }

    pub fn weighted(&self, weight: f64) -> WeightedState {
        WeightedState {
            shape: self.shape.clone(),
            amplitudes: self.amplitudes.scale(weight.sqrt()),
        }
    }
}

/// Unnormalized state `√p |ψ⟩`; its squared norm is the weight.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedState {
    shape: SystemShape,
    amplitudes: CVector,
}

impl WeightedState {
    pub fn new(shape: SystemShape, amplitudes: CVector) -> Result<Self> {
        shape.check_len(amplitudes.len())?;
        Ok(Self { shape, amplitudes })
    }

    pub fn zero(shape: &SystemShape) -> Self {
        Self {
            shape: shape.clone(),
            amplitudes: CVector::zeros(shape.total_dim()),
        }
    }

    pub fn shape(&self) -> &SystemShape {
        &self.shape
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn weight(&self) -> f64 {
        self.amplitudes.norm_squared()
    }

    /// The normalized state, or `None` for the zero vector.
    pub fn state(&self) -> Option<PureState> {
        PureState::normalized(self.shape.clone(), self.amplitudes.clone()).ok()
    }
}

/// Validated density matrix (Hermitian, unit trace, PSD).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    shape: SystemShape,
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validate and store `matrix`. It is symmetrized first; eigenvalues in
    /// `[-1e-9, 0)` are clipped to zero with a warning.
    pub fn new(shape: SystemShape, matrix: CMatrix) -> Result<Self> {
        linalg::ensure_square(&matrix)?;
        shape.check_len(matrix.nrows())?;
        let eig = linalg::hermitian_eig(&matrix, linalg::DEFAULT_HERMITIAN_TOL).map_err(|e| match e {
            Error::NotHermitian { deviation } => {
                Error::NotDensityMatrix(format!("not Hermitian (deviation {deviation:e})"))
            }
            other => other,
        })?;
        let trace: f64 = (0..matrix.nrows()).map(|k| matrix[(k, k)].re).sum();
        if (trace - 1.0).abs() > DENSITY_TRACE_TOL {
            return Err(Error::NotDensityMatrix(format!("trace {trace} differs from 1")));
        }
        let min = eig.min_value();
        if min < -DENSITY_PSD_TOL {
            return Err(Error::NotDensityMatrix(format!("negative eigenvalue {min:e}")));
        }
        let matrix = if min < -CLIP_THRESHOLD {
            log::warn!("clipping negative eigenvalue {min:e} of density matrix");
            let mut rebuilt = CMatrix::zeros(matrix.nrows(), matrix.ncols());
            for (k, &lambda) in eig.values.iter().enumerate() {
                if lambda > 0.0 {
                    let v = eig.vector(k);
                    rebuilt += (&v * v.adjoint()).scale(lambda);
                }
            }
            let tr = rebuilt.trace().re;
            rebuilt.unscale(tr)
        } else {
            (&matrix + matrix.adjoint()).scale(0.5)
        };
        Ok(Self { shape, matrix })
    }

    /// `Σ_k p_k |ψ_k⟩⟨ψ_k|`; weights must sum to one.
    pub fn mixture(shape: &SystemShape, weights: &[f64], states: &[PureState]) -> Result<Self> {
        if weights.len() != states.len() {
            return Err(Error::DimensionMismatch {
                expected: states.len(),
                actual: weights.len(),
            });
        }
        let d = shape.total_dim();
        let mut m = CMatrix::zeros(d, d);
        for (&w, psi) in weights.iter().zip(states) {
            if psi.shape() != shape {
                return Err(Error::WrongShape {
                    expected: shape.dims().to_vec(),
                    actual: psi.shape().dims().to_vec(),
                });
            }
            m += (psi.amplitudes() * psi.amplitudes().adjoint()).scale(w);
        }
        Self::new(shape.clone(), m)
    }

    /// `Σ_k |ψ̃_k⟩⟨ψ̃_k|` of unnormalized states.
    pub fn from_weighted(shape: &SystemShape, states: &[WeightedState]) -> Result<Self> {
        Self::new(shape.clone(), sum_of_projectors(shape, states))
    }

    pub fn shape(&self) -> &SystemShape {
        &self.shape
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn rank(&self, rel_tol: f64) -> usize {
        numeric_rank(&self.matrix, rel_tol)
    }
}

/// `Σ_k |ψ̃_k⟩⟨ψ̃_k|` without validation.
pub fn sum_of_projectors(shape: &SystemShape, states: &[WeightedState]) -> CMatrix {
    let d = shape.total_dim();
    let mut m = CMatrix::zeros(d, d);
    for s in states {
        m += s.amplitudes() * s.amplitudes().adjoint();
    }
    m
}

/// Mode-`k` matricization: an `m_k × D/m_k` matrix whose columns run over the
/// remaining parties in row-major order.
pub fn matricize(psi: &PureState, party: usize) -> Result<CMatrix> {
    matricize_vector(psi.shape(), psi.amplitudes(), party)
}

pub fn matricize_vector(shape: &SystemShape, amplitudes: &CVector, party: usize) -> Result<CMatrix> {
    shape.check_party(party)?;
    shape.check_len(amplitudes.len())?;
    let dims = shape.dims();
    let rows = dims[party];
    let cols = shape.total_dim() / rows;
    let mut out = CMatrix::zeros(rows, cols);
    for (flat, &a) in amplitudes.iter().enumerate() {
        let multi = shape.multi_index(flat);
        let col = multi
            .iter()
            .zip(dims)
            .enumerate()
            .filter(|&(j, _)| j != party)
            .fold(0, |acc, (_, (&i, &m))| acc * m + i);
        out[(multi[party], col)] = a;
    }
    Ok(out)
}

/// Number of singular values above `rel_tol · s_max` (0 for the zero matrix).
pub fn numeric_rank(m: &CMatrix, rel_tol: f64) -> usize {
    let s = match linalg::singular_values(m) {
        Ok(s) => s,
        Err(_) => return 0,
    };
    match s.first() {
        Some(&top) if top > 0.0 => s.iter().filter(|&&x| x > rel_tol * top).count(),
        _ => 0,
    }
}

/// True iff every mode-k matricization has numeric rank 1.
pub fn is_product(psi: &PureState, rel_tol: f64) -> bool {
    (0..psi.shape().parties()).all(|k| {
        matricize(psi, k)
            .map(|a| numeric_rank(&a, rel_tol) == 1)
            .unwrap_or(false)
    })
}

/// The weighted eigenvectors `√λ_k |v_k⟩` for the `r` eigenvalues above
/// `rel_tol · λ_max`, descending.
/// Each eigenvector has its first largest-modulus entry real and positive.
pub fn eigendecompose_rho(rho: &DensityMatrix, rel_tol: f64) -> Result<Vec<WeightedState>> {
    let eig = linalg::hermitian_eig(rho.matrix(), linalg::DEFAULT_HERMITIAN_TOL)
        .map_err(|e| Error::NotDensityMatrix(e.to_string()))?;
    let top = eig.values.first().copied().unwrap_or(0.0);
    if top <= 0.0 {
        return Err(Error::NotDensityMatrix("no positive eigenvalue".into()));
    }
    Ok(eig
        .values
        .iter()
        .enumerate()
        .take_while(|&(_, &lambda)| lambda > rel_tol * top)
        .map(|(k, &lambda)| WeightedState {
            shape: rho.shape().clone(),
            amplitudes: fix_phase(eig.vector(k)).scale(lambda.sqrt()),
        })
        .collect())
}

// First component of largest modulus made real positive.
fn fix_phase(v: CVector) -> CVector {
    let mut best = 0;
    for (k, z) in v.iter().enumerate() {
        if z.norm() > v[best].norm() * (1.0 + 1e-9) {
            best = k;
        }
    }
    let z = v[best];
    if z.norm() == 0.0 {
        return v;
    }
    let phase = z.conj() / z.norm();
    v.map(|x| x * phase)
}

/// Partial transpose over the listed parties: `⟨i|ρ^T|i′⟩ = ⟨ĩ|ρ|ĩ′⟩` where
/// the components in `parties` are exchanged between `i` and `i′`.
pub fn partial_transpose(rho: &DensityMatrix, parties: &[usize]) -> Result<CMatrix> {
    let shape = rho.shape();
    let n = shape.parties();
    if parties.is_empty() {
        return Err(Error::InvalidPartition("empty party set".into()));
    }
    let mut mask = vec![false; n];
    for &p in parties {
        if p >= n {
            return Err(Error::InvalidPartition(format!("party {p} out of range")));
        }
        if mask[p] {
            return Err(Error::InvalidPartition(format!("party {p} listed twice")));
        }
        mask[p] = true;
    }
    if mask.iter().all(|&b| b) {
        return Err(Error::InvalidPartition("party set is not a proper subset".into()));
    }
    let d = shape.total_dim();
    let labels: Vec<Vec<usize>> = (0..d).map(|f| shape.multi_index(f)).collect();
    let m = rho.matrix();
    let mut out = CMatrix::zeros(d, d);
    let mut a = vec![0; n];
    let mut b = vec![0; n];
    for row in 0..d {
        for col in 0..d {
            for k in 0..n {
                let (x, y) = (labels[row][k], labels[col][k]);
                (a[k], b[k]) = if mask[k] { (y, x) } else { (x, y) };
            }
            out[(row, col)] = m[(shape.flat_index(&a), shape.flat_index(&b))];
        }
    }
    Ok(out)
}

/// `|D_N^(k)⟩`: equal superposition of the N-qubit basis states with exactly
/// `k` ones.
pub fn dicke_state(parties: usize, excitations: usize) -> Result<PureState> {
    let shape = SystemShape::qubits(parties)?;
    if excitations > parties {
        return Err(Error::BadExcitationNumber {
            parties,
            detail: format!("k = {excitations} exceeds N"),
        });
    }
    let d = shape.total_dim();
    let v = CVector::from_fn(d, |f, _| {
        if (f as u64).count_ones() as usize == excitations {
            ONE
        } else {
            ZERO
        }
    });
    PureState::normalized(shape, v)
}

/// `(|D_N^(k)⟩ + |D_N^(k′)⟩)/√2` for `k < k′`.
pub fn dicke_superposition(parties: usize, k: usize, k_prime: usize) -> Result<PureState> {
    if k >= k_prime {
        return Err(Error::BadExcitationNumber {
            parties,
            detail: format!("need k < k', got ({k}, {k_prime})"),
        });
    }
    let a = dicke_state(parties, k)?;
    let b = dicke_state(parties, k_prime)?;
    PureState::normalized(a.shape().clone(), a.amplitudes() + b.amplitudes())
}

/// `(|0…0⟩ + |1…1⟩)/√2`.
pub fn ghz_state(parties: usize) -> Result<PureState> {
    let shape = SystemShape::qubits(parties)?;
    let d = shape.total_dim();
    let mut v = CVector::zeros(d);
    v[0] = ONE;
    v[d - 1] = ONE;
    PureState::normalized(shape, v)
}

/// `|W_N⟩ = |D_N^(1)⟩`.
pub fn w_state(parties: usize) -> Result<PureState> {
    dicke_state(parties, 1)
}

pub fn bell_state() -> PureState {
    ghz_state(2).expect("two qubits")
}

/// Qubit vectors `|0⟩`, `|1⟩`, `|+⟩`, `|−⟩` by label.
pub fn qubit_vector(label: char) -> Option<CVector> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let (a, b) = match label {
        '0' => (1.0, 0.0),
        '1' => (0.0, 1.0),
        '+' => (h, h),
        '-' => (h, -h),
        _ => return None,
    };
    Some(CVector::from_vec(vec![C64::new(a, 0.0), C64::new(b, 0.0)]))
}

/// Product qubit state from a label such as `"-0+"`.
pub fn qubit_product(label: &str) -> Result<PureState> {
    let factors: Vec<CVector> = label
        .chars()
        .map(|c| qubit_vector(c).ok_or_else(|| Error::InvalidShape(format!("unknown qubit label {c:?}"))))
        .collect::<Result<_>>()?;
    let shape = SystemShape::qubits(factors.len())?;
    PureState::product(&shape, &factors)
}
