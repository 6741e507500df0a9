//! Thermodynamic entanglement certification for N-qubit registers.
//!
//! The crate computes how much work a state can yield under cyclic unitary
//! driving (ergotropy), the passive states that yield none, and the
//! extractable-work gap of a bipartition together with three separability
//! bounds on it. A gap that exceeds a bound certifies entanglement across
//! the cut from energy measurements alone.
//!
//! Conventions used everywhere: qubit indices are 1-based and qubit 1 is the
//! most significant bit of a computational-basis index; Hamiltonians are
//! sums of single-qubit terms with gaps in MHz; spectra are sorted
//! non-increasing.

// Pulls the system BLAS/LAPACK into the link so the `extern "C"`
// declarations in `tensor` resolve.
extern crate openblas_src as _;

pub mod circuit;
pub mod error;
pub mod hamiltonian;
pub mod states;
pub mod tensor;

pub mod cert;

pub use error::{Error, Result};
pub use tensor::{C64, ComplexMatrix, EigenDecomposition};
