//! JSON state files.
//!
//! ```json
//! {
//!   "kind": "pure",
//!   "shape": [2, 2],
//!   "amplitudes": [
//!     [0.7071067811865475, 0.0],
//!     [0.0, 0.0],
//!     [0.0, 0.0],
//!     [0.7071067811865475, 0.0]
//!   ]
//! }
//! ```
//!
//! A mixed state has `"kind": "mixed"` and a `"matrix"` of rows of pairs.
//!
//! Complex numbers are `[re, im]` pairs. Amplitudes use the flat basis order
//! of [`SystemShape`] (row-major, last party fastest); `matrix` is row-major.
//! Pure amplitudes must have unit norm, matrices must be valid density
//! matrices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, C64};
use crate::states::{DensityMatrix, PureState, SystemShape};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum StateFile {
    Pure {
        shape: Vec<usize>,
        amplitudes: Vec<[f64; 2]>,
    },
    Mixed {
        shape: Vec<usize>,
        matrix: Vec<Vec<[f64; 2]>>,
    },
}

/// A validated state read from a file.
#[derive(Debug, Clone)]
pub enum State {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl State {
    pub fn shape(&self) -> &SystemShape {
        match self {
            State::Pure(p) => p.shape(),
            State::Mixed(m) => m.shape(),
        }
    }

    /// The density matrix; pure states become projectors.
    pub fn density(&self) -> DensityMatrix {
        match self {
            State::Pure(p) => p.projector(),
            State::Mixed(m) => m.clone(),
        }
    }

    pub fn to_file(&self) -> StateFile {
        match self {
            State::Pure(p) => StateFile::from_pure(p),
            State::Mixed(m) => StateFile::from_density(m),
        }
    }
}

fn pair(z: &C64) -> [f64; 2] {
    [z.re, z.im]
}

fn complex([re, im]: [f64; 2]) -> C64 {
    C64::new(re, im)
}

impl StateFile {
    pub fn from_pure(psi: &PureState) -> Self {
        StateFile::Pure {
            shape: psi.shape().dims().to_vec(),
            amplitudes: psi.amplitudes().iter().map(pair).collect(),
        }
    }

    pub fn from_density(rho: &DensityMatrix) -> Self {
        let m = rho.matrix();
        StateFile::Mixed {
            shape: rho.shape().dims().to_vec(),
            matrix: (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| pair(&m[(i, j)])).collect())
                .collect(),
        }
    }

    /// Syntax only; see [`StateFile::into_state`] for validation.
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    /// JSON with one amplitude or one matrix row per line and a trailing
    /// newline. Equal states give byte-identical output.
    pub fn to_json(&self) -> String {
        let num = |x: f64| serde_json::to_string(&x).expect("finite float");
        let z = |c: &[f64; 2]| format!("[{}, {}]", num(c[0]), num(c[1]));
        let shape = |s: &[usize]| {
            let parts: Vec<String> = s.iter().map(|d| d.to_string()).collect();
            format!("[{}]", parts.join(", "))
        };
        match self {
            StateFile::Pure { shape: s, amplitudes } => {
                let lines: Vec<String> = amplitudes.iter().map(|c| format!("    {}", z(c))).collect();
                format!(
                    "{{\n  \"kind\": \"pure\",\n  \"shape\": {},\n  \"amplitudes\": [\n{}\n  ]\n}}\n",
                    shape(s),
                    lines.join(",\n")
                )
            }
            StateFile::Mixed { shape: s, matrix } => {
                let lines: Vec<String> = matrix
                    .iter()
                    .map(|row| {
                        let cells: Vec<String> = row.iter().map(z).collect();
                        format!("    [{}]", cells.join(", "))
                    })
                    .collect();
                format!(
                    "{{\n  \"kind\": \"mixed\",\n  \"shape\": {},\n  \"matrix\": [\n{}\n  ]\n}}\n",
                    shape(s),
                    lines.join(",\n")
                )
            }
        }
    }

    pub fn shape(&self) -> &[usize] {
        match self {
            StateFile::Pure { shape, .. } | StateFile::Mixed { shape, .. } => shape,
        }
    }

    pub fn into_state(self) -> Result<State> {
        match self {
            StateFile::Pure { shape, amplitudes } => {
                let shape = SystemShape::new(shape)?;
                if amplitudes.len() != shape.total_dim() {
                    return Err(Error::DimensionMismatch {
                        expected: shape.total_dim(),
                        actual: amplitudes.len(),
                    });
                }
                let v = CVector::from_iterator(amplitudes.len(), amplitudes.into_iter().map(complex));
                Ok(State::Pure(PureState::new(shape, v)?))
            }
            StateFile::Mixed { shape, matrix } => {
                let shape = SystemShape::new(shape)?;
                let d = shape.total_dim();
                if matrix.len() != d {
                    return Err(Error::DimensionMismatch {
                        expected: d,
                        actual: matrix.len(),
                    });
                }
                if let Some(row) = matrix.iter().find(|row| row.len() != d) {
                    return Err(Error::NotSquare {
                        rows: d,
                        cols: row.len(),
                    });
                }
                let m = CMatrix::from_row_iterator(d, d, matrix.into_iter().flatten().map(complex));
                Ok(State::Mixed(DensityMatrix::new(shape, m)?))
            }
        }
    }
}

/// Parse and validate in one step.
pub fn read_state(text: &str) -> Result<State> {
    StateFile::parse(text)?.into_state()
}
