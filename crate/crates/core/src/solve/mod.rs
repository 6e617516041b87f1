//! Master-equation time evolution, direct steady states and observables.

mod evolve;
mod observables;
mod steady;
mod symmetry;

use thiserror::Error;

use num_complex::Complex64 as C64;

use crate::algebra::{AlgebraError, BellState, DensityMatrix};
use crate::model::{derive, CanonicalOps, ModelError, Representation, SystemParams};

pub use evolve::{
    evolve, steady_detect, EvolveOptions, Trajectory, STEADY_DETECT_TOL, STEADY_DETECT_WINDOWS, TRAJECTORY_TOL,
};
pub use observables::{fidelity, observables, Observables};
pub use steady::{
    steady_state, SteadyMethod, SteadySolver, SteadyStateResult, HERMITIZATION_TOL, STEADY_RESIDUAL_TOL,
};
pub use symmetry::{EvenSector, SignedPermutation};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("sparse factorization failed: {0}")]
    Factorization(String),
    #[error("steady state not unique (kernel dimension {multiplicity:?})")]
    DegenerateSteadyState { multiplicity: Option<usize> },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("step size underflow at t = {t} ns (h = {h:e}); generator too stiff for the explicit integrator")]
    StepUnderflow { t: f64, h: f64 },
    #[error("step budget of {steps} exhausted at t = {t} ns")]
    TooManySteps { t: f64, steps: usize },
    #[error("state at t = {t} ns failed validation: {reason}")]
    Validation { t: f64, reason: String },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Starting state for time evolution: the qubits in `b`, the symmetric mode
/// in the coherent field the drives sustain in the chosen frame, the
/// antisymmetric mode empty.
///
/// In the full rotating model that field is `Ā_d + Ā_d'` at `t = 0`;
/// starting there skips the cavity ring-up (time scale `1/κ`). The
/// effective models already work with fluctuations around it, so their
/// mode starts in vacuum.
pub fn initial_state(p: &SystemParams, b: BellState) -> Result<DensityMatrix, ModelError> {
    let ops = CanonicalOps::for_params(p)?;
    let alpha = match p.representation {
        Representation::FullRotating => {
            let d = derive(p);
            d.a_bar_d + d.a_bar_dp
        }
        _ => C64::new(0.0, 0.0),
    };
    Ok(DensityMatrix::bell_with_coherent(ops.layout.clone(), b, alpha)?)
}
