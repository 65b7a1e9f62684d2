use thiserror::Error;

/// Errors raised by the library. Search failures of the hollowizer are
/// statuses, not errors.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("matrix is not unitary (max deviation {deviation:e})")]
    NotUnitary { deviation: f64 },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("non-finite entry in input")]
    NonFinite,
    #[error("invalid shape: {0}")]
    InvalidShape(String),
    #[error("party {party} out of range for {parties} parties")]
    PartyOutOfRange { party: usize, parties: usize },
    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),
    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("invalid excitation numbers for {parties} qubits: {detail}")]
    BadExcitationNumber { parties: usize, detail: String },
    #[error("operator count {count} exceeds the configured cap {cap}")]
    OverflowGuard { count: u128, cap: u128 },
    #[error("expected shape {expected:?}, got {actual:?}")]
    WrongShape { expected: Vec<usize>, actual: Vec<usize> },
    #[error("expected rank {expected}, got {actual}")]
    WrongRank { expected: usize, actual: usize },
    #[error("shape mismatch between state {state:?} and catalog {catalog:?}")]
    ShapeMismatch { state: Vec<usize>, catalog: Vec<usize> },
    #[error("state file: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
