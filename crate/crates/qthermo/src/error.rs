use thiserror::Error;

/// Crate-wide error type. Numerical routines never panic on bad user input;
/// they return one of these variants instead.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error("matrix dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("qubit index {index} out of range for {qubits} qubits (indices are 1-based)")]
    IndexOutOfRange { index: usize, qubits: usize },
    #[error("duplicate qubit index {0}")]
    DuplicateIndex(usize),
    #[error("qubit subset must not be empty")]
    EmptySubset,
    #[error("matrix is not Hermitian: max |a_ij - conj(a_ji)| = {defect:.3e} exceeds {tol:.0e}")]
    NotHermitian { defect: f64, tol: f64 },
    #[error("matrix is not unitary: max |(u^t u - 1)_ij| = {defect:.3e} exceeds {tol:.0e}")]
    NotUnitary { defect: f64, tol: f64 },
    #[error("eigensolver did not converge (LAPACK info = {0})")]
    Eigensolver(i32),
    #[error("not a valid density operator: {0}")]
    InvalidState(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid bipartition: {0}")]
    InvalidBipartition(String),
    #[error("invalid spectral vector: {0}")]
    InvalidSpectrum(String),
    #[error("unknown system name '{0}'")]
    UnknownSystem(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("family is not monotone in lambda: decrease detected near lambda = {0}")]
    NonMonotone(f64),
    #[error("detection holds on all of [0, 1]; no threshold to solve")]
    AlwaysDetected,
    #[error("no detection anywhere on [0, 1]; no threshold to solve")]
    NeverDetected,
    #[error("numerical cross-check failed: {0}")]
    CrossCheck(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
