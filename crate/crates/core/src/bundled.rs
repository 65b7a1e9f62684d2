//! Example states shipped with the crate.
//!
//! Each state is built in code and also stored as a file under `data/`;
//! [`file_text`] returns the stored file.

use crate::error::{Error, Result};
use crate::io::State;
use crate::linalg::{CMatrix, C64};
use crate::states::{bell_state, dicke_superposition, ghz_state, qubit_product, DensityMatrix, PureState, SystemShape};

pub const NAMES: &[&str] = &["eq16", "dicke-npt", "ghz", "bell", "product", "rank2-product"];

const EQ16_NUMERATORS: [[i8; 8]; 8] = [
    [1, -1, 0, 0, -1, 1, 0, 0],
    [-1, 3, 0, 0, 1, -3, 0, 0],
    [0, 0, 6, 0, 0, 0, -2, 0],
    [0, 0, 0, 0, 0, 0, 0, 0],
    [-1, 1, 0, 0, 3, 1, 0, 0],
    [1, -3, 0, 0, 1, 5, 0, 0],
    [0, 0, -2, 0, 0, 0, 2, 0],
    [0, 0, 0, 0, 0, 0, 0, 0],
];

/// The rank-5 three-qubit state with entries `n_ij / 20`.
pub fn rank5_example() -> DensityMatrix {
    let m = CMatrix::from_fn(8, 8, |i, j| C64::new(EQ16_NUMERATORS[i][j] as f64 / 20.0, 0.0));
    DensityMatrix::new(SystemShape::qubits(3).expect("three qubits"), m).expect("valid state")
}

/// Its equal-weight product decomposition `|−01⟩, |−0−⟩, |10+⟩, |−10⟩, |010⟩`.
pub fn rank5_decomposition() -> Vec<PureState> {
    ["-01", "-0-", "10+", "-10", "010"]
        .iter()
        .map(|l| qubit_product(l).expect("valid label"))
        .collect()
}

/// A 5×5 unitary that hollowises the nine `τ_α` of [`rank5_example`], for the
/// eigenvector phases `|ṽ_l⟩ = Σ_k U_kl |ψ̃_k⟩` with `|ψ̃_k⟩` from
/// [`rank5_decomposition`] scaled by `1/√5`.
pub fn rank5_unitary() -> CMatrix {
    let (a, b) = (3f64.sqrt(), 2f64.sqrt());
    #[rustfmt::skip]
    let rows = [
        -a, 0.0, 0.0, 0.0, a,
        b, 0.0, -b, 0.0, b,
        1.0, 0.0, 2.0, 0.0, 1.0,
        0.0, -a, 0.0, -a, 0.0,
        0.0, -a, 0.0, a, 0.0,
    ];
    CMatrix::from_row_iterator(5, 5, rows.iter().map(|&x| C64::new(x / 6f64.sqrt(), 0.0)))
}

/// Equal mixture of the Dicke superpositions `(0,2)`, `(1,2)`, `(1,3)`:
/// all concurrences vanish but the partial transpose is not positive.
pub fn dicke_npt() -> DensityMatrix {
    let states: Vec<PureState> = [(0, 2), (1, 2), (1, 3)]
        .iter()
        .map(|&(k, kp)| dicke_superposition(3, k, kp).expect("valid excitations"))
        .collect();
    DensityMatrix::mixture(states[0].shape(), &[1.0 / 3.0; 3], &states).expect("valid mixture")
}

/// `0.6 |0+1⟩⟨0+1| + 0.4 |+1−⟩⟨+1−|`.
pub fn rank2_product() -> DensityMatrix {
    let a = qubit_product("0+1").expect("valid label");
    let b = qubit_product("+1-").expect("valid label");
    let shape = a.shape().clone();
    DensityMatrix::mixture(&shape, &[0.6, 0.4], &[a, b]).expect("valid mixture")
}

/// Build a bundled state by name.
pub fn build(name: &str) -> Result<State> {
    Ok(match name {
        "eq16" => State::Mixed(rank5_example()),
        "dicke-npt" => State::Mixed(dicke_npt()),
        "ghz" => State::Pure(ghz_state(3)?),
        "bell" => State::Pure(bell_state()),
        "product" => State::Pure(qubit_product("-0+")?),
        "rank2-product" => State::Mixed(rank2_product()),
        other => {
            return Err(Error::Parse(format!(
                "unknown example {other:?}; expected one of {}",
                NAMES.join(", ")
            )))
        }
    })
}

/// The shipped file for `name`.
pub fn file_text(name: &str) -> Option<&'static str> {
    Some(match name {
        "eq16" => include_str!("../../../data/eq16.json"),
        "dicke-npt" => include_str!("../../../data/dicke-npt.json"),
        "ghz" => include_str!("../../../data/ghz.json"),
        "bell" => include_str!("../../../data/bell.json"),
        "product" => include_str!("../../../data/product.json"),
        "rank2-product" => include_str!("../../../data/rank2-product.json"),
        _ => return None,
    })
}

/// Serialized form of [`build`].
pub fn render(name: &str) -> Result<String> {
    Ok(build(name)?.to_file().to_json())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::{read_state, StateFile};
    use crate::states::sum_of_projectors;

    #[test]
    fn shipped_files_match_generated() {
        for name in NAMES {
            assert_eq!(file_text(name).unwrap(), render(name).unwrap(), "{name}");
        }
    }

    #[test]
    fn shipped_files_round_trip() {
        for name in NAMES {
            let text = file_text(name).unwrap();
            let again = StateFile::parse(text).unwrap().to_json();
            assert_eq!(again, text);
            assert_eq!(read_state(text).unwrap().to_file().to_json(), text);
        }
    }

    #[test]
    fn rank5_decomposition_reconstructs() {
        let parts: Vec<_> = rank5_decomposition().iter().map(|p| p.weighted(0.2)).collect();
        let rho = rank5_example();
        let err = (sum_of_projectors(rho.shape(), &parts) - rho.matrix()).norm();
        assert!(err < 1e-15, "{err}");
        assert_eq!(rho.rank(1e-10), 5);
    }

    #[test]
    fn dicke_npt_is_rank_three() {
        assert_eq!(dicke_npt().rank(1e-10), 3);
        assert_eq!(rank2_product().rank(1e-10), 2);
    }

    #[test]
    fn unknown_name() {
        assert!(build("werner").is_err());
        assert!(file_text("werner").is_none());
    }
}
