use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PauliError {
    #[error("qubit index {index} out of range for {num_qubits} qubits")]
    SiteOutOfRange { index: usize, num_qubits: usize },
    #[error("width mismatch: expected {expected} qubits, got {found}")]
    WidthMismatch { expected: usize, found: usize },
    #[error("qubit {0} appears in more than one gate of a layer")]
    OverlappingGates(usize),
    #[error("two-qubit gate acts twice on qubit {0}")]
    RepeatedSite(usize),
    #[error("rate {0} outside [0, 1)")]
    InvalidRate(f64),
    #[error("noise spec has {found} layer rates but circuit depth is {expected}")]
    DepthMismatch { expected: usize, found: usize },
    #[error("observable has non-Hermitian phase")]
    NonHermitian,
    #[error("parse error: {0}")]
    Parse(String),
}
