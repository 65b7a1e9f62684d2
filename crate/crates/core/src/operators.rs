//! Generalized spin-flip operators.
//!
//! An operator is `S = |i⟩⟨i′| − |j⟩⟨j′| + h.c.` for four distinct basis
//! indices, stored sparsely as flat indices. Two families are generated:
//!
//! * the *redundant* family, one operator per vanishing 2×2 minor of a mode-k
//!   matricization;
//! * the *minimal* catalog, the independent subset indexed by `α`.
//!
//! Catalog order is canonical: position subsets `Q` by size and then
//! lexicographically, then the values `c` outside `Q` (odometer, first party
//! slowest), then the value-pair pattern on `Q`, then the swap mask `T` as a
//! binary counter whose bit `t` is the `t`-th smallest position of `Q`.

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, C64};
use crate::states::SystemShape;

/// Default cap on catalog sizes.
pub const DEFAULT_OPERATOR_CAP: u128 = 10_000_000;

/// `|i⟩⟨i′| − |j⟩⟨j′| + h.c.` on flat basis indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpinFlipOperator {
    pub i: usize,
    pub i_prime: usize,
    pub j: usize,
    pub j_prime: usize,
}

impl SpinFlipOperator {
    pub fn new(i: usize, i_prime: usize, j: usize, j_prime: usize) -> Self {
        Self { i, i_prime, j, j_prime }
    }

    pub fn indices(&self) -> [usize; 4] {
        [self.i, self.i_prime, self.j, self.j_prime]
    }

    fn max_index(&self) -> usize {
        self.indices().into_iter().max().unwrap_or(0)
    }

    /// `uᵀ S w = u_i w_i′ + u_i′ w_i − u_j w_j′ − u_j′ w_j`.
    pub fn bilinear(&self, u: &CVector, w: &CVector) -> C64 {
        let Self { i, i_prime, j, j_prime } = *self;
        u[i] * w[i_prime] + u[i_prime] * w[i] - u[j] * w[j_prime] - u[j_prime] * w[j]
    }

    /// Sparse action `S v`; only the four indices of the operator are written.
    pub fn apply(&self, v: &CVector) -> Result<CVector> {
        if v.len() <= self.max_index() {
            return Err(Error::DimensionMismatch {
                expected: self.max_index() + 1,
                actual: v.len(),
            });
        }
        let mut out = CVector::zeros(v.len());
        out[self.i] += v[self.i_prime];
        out[self.i_prime] += v[self.i];
        out[self.j] -= v[self.j_prime];
        out[self.j_prime] -= v[self.j];
        Ok(out)
    }

    /// Dense `D × D` matrix; real entries ±1.
    pub fn to_dense(&self, dim: usize) -> CMatrix {
        let mut m = CMatrix::zeros(dim, dim);
        let one = C64::new(1.0, 0.0);
        m[(self.i, self.i_prime)] += one;
        m[(self.i_prime, self.i)] += one;
        m[(self.j, self.j_prime)] -= one;
        m[(self.j_prime, self.j)] -= one;
        m
    }

    /// The two unordered index pairs `{i, i′}` and `{j, j′}`.
    pub fn pairs(&self) -> [(usize, usize); 2] {
        let ord = |a: usize, b: usize| (a.min(b), a.max(b));
        [ord(self.i, self.i_prime), ord(self.j, self.j_prime)]
    }

    /// Format as `|i⟩⟨i′| − |j⟩⟨j′| + h.c.` with basis labels.
    pub fn label(&self, shape: &SystemShape) -> String {
        let ket = |f: usize| basis_label(shape, f);
        format!(
            "|{}><{}| - |{}><{}| + h.c.",
            ket(self.i),
            ket(self.i_prime),
            ket(self.j),
            ket(self.j_prime)
        )
    }
}

/// Digits of a basis index; parties with `m > 10` are comma separated.
pub fn basis_label(shape: &SystemShape, flat: usize) -> String {
    let multi = shape.multi_index(flat);
    if shape.dims().iter().all(|&m| m <= 10) {
        multi.iter().map(|d| d.to_string()).collect()
    } else {
        multi.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(",")
    }
}

/// The minimal operator set of a shape; `operators()[α - 1]` is `S_α`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorCatalog {
    shape: SystemShape,
    operators: Vec<SpinFlipOperator>,
}

impl OperatorCatalog {
    pub fn shape(&self) -> &SystemShape {
        &self.shape
    }

    pub fn operators(&self) -> &[SpinFlipOperator] {
        &self.operators
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, SpinFlipOperator> {
        self.operators.iter()
    }
}

fn binomial2(m: usize) -> u128 {
    let m = m as u128;
    m * m.saturating_sub(1) / 2
}

/// Closed-form size of the minimal catalog,
/// `Σ_q (2^{q−1} − 1) Σ_{|Q|=q} Π_{k∈Q} C(m_k,2) Π_{k∉Q} m_k`,
/// evaluated by a polynomial recurrence over the parties (no enumeration).
pub fn count_minimal(shape: &SystemShape) -> u128 {
    // by_size[q] = Σ_{|Q|=q} Π_{k∈Q} C(m_k,2) Π_{k∉Q} m_k
    let mut by_size = vec![1u128];
    for &m in shape.dims() {
        let mut next = vec![0u128; by_size.len() + 1];
        for (q, &v) in by_size.iter().enumerate() {
            next[q] += v * m as u128;
            next[q + 1] += v * binomial2(m);
        }
        by_size = next;
    }
    by_size
        .iter()
        .enumerate()
        .skip(2)
        .map(|(q, &v)| ((1u128 << (q - 1)) - 1) * v)
        .sum()
}

/// The same count for `N` parties of dimension `d`, summed in closed form:
/// `d^{2N}/2 − (d(d+1)/2)^N + d^N/2`.
pub fn count_minimal_qudits(d: u32, parties: u32) -> u128 {
    let d = d as u128;
    (d.pow(2 * parties) + d.pow(parties) - 2 * (d * (d + 1) / 2).pow(parties)) / 2
}

/// `d^{N+1} (d−1)/4 (1 − 2(1+1/d)^N + (1+2/d)^N)`, a simplification that
/// agrees with [`count_minimal_qudits`] only for qubits (`d = 2`).
pub fn simplified_qudit_formula(d: u32, parties: u32) -> f64 {
    let (d, n) = (d as f64, parties as i32);
    d.powi(n + 1) * (d - 1.0) / 4.0 * (1.0 - 2.0 * (1.0 + 1.0 / d).powi(n) + (1.0 + 2.0 / d).powi(n))
}

/// Size of the redundant family, `Σ_k C(m_k,2) C(D/m_k,2)`.
pub fn count_redundant(shape: &SystemShape) -> u128 {
    let total = shape.total_dim();
    shape.dims().iter().map(|&m| binomial2(m) * binomial2(total / m)).sum()
}

/// Redundant-family size for `N` qudits: `N d^N (d^{N−1} − 1)(d − 1)/4`.
pub fn count_redundant_qudits(d: u32, parties: u32) -> u128 {
    let d = d as u128;
    parties as u128 * d.pow(parties) * (d.pow(parties - 1) - 1) * (d - 1) / 4
}

pub fn generate_minimal(shape: &SystemShape) -> Result<OperatorCatalog> {
    generate_minimal_capped(shape, DEFAULT_OPERATOR_CAP)
}

pub fn generate_minimal_capped(shape: &SystemShape, cap: u128) -> Result<OperatorCatalog> {
    let count = count_minimal(shape);
    if count > cap {
        return Err(Error::OverflowGuard { count, cap });
    }
    let dims = shape.dims();
    let n = dims.len();
    let mut operators = Vec::with_capacity(count as usize);

    for subset in subsets_by_size(n) {
        let q = subset.len();
        let outside: Vec<usize> = (0..n).filter(|k| !subset.contains(k)).collect();
        let outside_dims: Vec<usize> = outside.iter().map(|&k| dims[k]).collect();
        let pair_lists: Vec<Vec<(usize, usize)>> = subset.iter().map(|&k| value_pairs(dims[k])).collect();
        let pair_sizes: Vec<usize> = pair_lists.iter().map(Vec::len).collect();
        let masks = (1usize << (q - 1)) - 1;

        for c in Odometer::new(&outside_dims) {
            for pattern in Odometer::new(&pair_sizes) {
                let mut i = vec![0; n];
                let mut i_prime = vec![0; n];
                for (&k, &v) in outside.iter().zip(&c) {
                    i[k] = v;
                    i_prime[k] = v;
                }
                for (t, &k) in subset.iter().enumerate() {
                    let (a, b) = pair_lists[t][pattern[t]];
                    i[k] = a;
                    i_prime[k] = b;
                }
                let fi = shape.flat_index(&i);
                let fip = shape.flat_index(&i_prime);
                for mask in 1..=masks {
                    let mut j = i.clone();
                    let mut j_prime = i_prime.clone();
                    for (t, &k) in subset.iter().enumerate().take(q - 1) {
                        if mask >> t & 1 == 1 {
                            std::mem::swap(&mut j[k], &mut j_prime[k]);
                        }
                    }
                    operators.push(SpinFlipOperator::new(
                        fi,
                        fip,
                        shape.flat_index(&j),
                        shape.flat_index(&j_prime),
                    ));
                }
            }
        }
    }
    debug_assert_eq!(operators.len() as u128, count);
    Ok(OperatorCatalog {
        shape: shape.clone(),
        operators,
    })
}

pub fn generate_redundant(shape: &SystemShape) -> Result<Vec<SpinFlipOperator>> {
    generate_redundant_capped(shape, DEFAULT_OPERATOR_CAP)
}

/// One operator per `(k, i, i′)` with `i′_k > i_k` and `i′_¬k > i_¬k`
/// (lexicographically): `|i⟩⟨i′| − |i[i′_k]⟩⟨i′[i_k]| + h.c.`
pub fn generate_redundant_capped(shape: &SystemShape, cap: u128) -> Result<Vec<SpinFlipOperator>> {
    let count = count_redundant(shape);
    if count > cap {
        return Err(Error::OverflowGuard { count, cap });
    }
    let dims = shape.dims();
    let total = shape.total_dim();
    let mut out = Vec::with_capacity(count as usize);
    for (k, &m) in dims.iter().enumerate() {
        // stride of party k in the flat index, and size of the slower block
        let stride: usize = dims[k + 1..].iter().product();
        let rest = total / m;
        // rest index r = high * stride + low, flat = (high * m + v) * stride + low
        let flat = |v: usize, r: usize| (r / stride * m + v) * stride + r % stride;
        for ra in 0..rest {
            for rb in ra + 1..rest {
                for a in 0..m {
                    for b in a + 1..m {
                        out.push(SpinFlipOperator::new(
                            flat(a, ra),
                            flat(b, rb),
                            flat(b, ra),
                            flat(a, rb),
                        ));
                    }
                }
            }
        }
    }
    debug_assert_eq!(out.len() as u128, count);
    Ok(out)
}

/// Position subsets of size ≥ 2, by size then lexicographically.
fn subsets_by_size(n: usize) -> Vec<Vec<usize>> {
    let mut all: Vec<Vec<usize>> = (0u64..1 << n)
        .filter(|s| s.count_ones() >= 2)
        .map(|s| (0..n).filter(|&k| s >> k & 1 == 1).collect())
        .collect();
    all.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    all
}

fn value_pairs(m: usize) -> Vec<(usize, usize)> {
    (0..m).flat_map(|a| (a + 1..m).map(move |b| (a, b))).collect()
}

/// Mixed-radix counter, first digit slowest. Yields one empty tuple for an
/// empty radix list.
struct Odometer {
    radices: Vec<usize>,
    current: Option<Vec<usize>>,
}

impl Odometer {
    fn new(radices: &[usize]) -> Self {
        Self {
            radices: radices.to_vec(),
            current: Some(vec![0; radices.len()]),
        }
    }
}

impl Iterator for Odometer {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.take()?;
        let mut next = out.clone();
        for pos in (0..next.len()).rev() {
            next[pos] += 1;
            if next[pos] < self.radices[pos] {
                self.current = Some(next);
                return Some(out);
            }
            next[pos] = 0;
        }
        Some(out)
    }
}
