//! Sparse complex operators on labeled tensor-product spaces (qubits and
//! truncated bosonic modes), plus dense density matrices.

pub mod dense;
pub mod layout;
mod operator;
mod sparse;
mod state;

use thiserror::Error;

pub use layout::{Factor, SpaceLayout};
pub use operator::{annihilator, embed, kron, number, pauli, Operator, PauliAxis};
pub use sparse::CsrMatrix;
pub use state::{
    bell_state, kron_states, BellState, DensityMatrix, Validation, HERMITIAN_TOL, POSITIVITY_TOL,
    TRACE_TOL,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("layout must have at least one factor")]
    EmptyLayout,
    #[error("factor `{0}` has zero dimension")]
    ZeroDimension(String),
    #[error("duplicate factor label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown factor label `{0}`")]
    UnknownLabel(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("photon truncation must be at least 1, got {0}")]
    Truncation(usize),
    #[error("operator layouts differ")]
    LayoutMismatch,
    #[error("density matrix not Hermitian (defect {0:.3e})")]
    NotHermitian(f64),
    #[error("density matrix trace off by {0:.3e}")]
    NotNormalized(f64),
    #[error("density matrix not positive (min eigenvalue {0:.3e})")]
    NotPositive(f64),
    #[error("eigen-solve failed: {0}")]
    Eigen(String),
}
