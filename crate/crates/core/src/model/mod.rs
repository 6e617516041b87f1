//! Parameters, derived quantities and the three Hamiltonian levels of two
//! transmon qubits in coupled, driven cavities.

mod derived;
mod hamiltonian;
mod params;
mod schrieffer_wolff;

use thiserror::Error;

use crate::algebra::AlgebraError;

pub use derived::{derive, dressed_detuning, mean_field_amplitude, DerivedQuantities};
pub use hamiltonian::{
    build_effective_td_hamiltonian, build_full_rotating_hamiltonian, build_time_independent_hamiltonian,
    effective_td_parts, full_rotating_parts, qubit_spectrum, time_independent_parts, CanonicalOps,
    EffectiveHamiltonian, EffectiveParts, HarmonicHamiltonian, TWO_PI,
};
pub use params::{Representation, SystemParams, DISPERSIVE_LIMIT, DISPERSIVE_WARN};
pub use schrieffer_wolff::{sw_consistency_check, sw_generator, sw_generator_with, SwReport};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid parameter `{key}`: {reason}")]
    InvalidParam { key: &'static str, reason: String },
    #[error("unknown representation `{0}` (expected full_rotating, effective_td or time_independent)")]
    UnknownRepresentation(String),
    #[error("builder requires representation {expected}, params specify {found}")]
    WrongRepresentation { expected: Representation, found: Representation },
    #[error("resonance: {0}")]
    Resonance(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}
