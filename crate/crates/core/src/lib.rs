//! Driven-dissipative two-qubit / two-cavity model: operator algebra,
//! Hamiltonians at three levels of approximation, Lindblad superoperators,
//! steady-state and time-dependent solvers, and analytic transition rates.

pub mod algebra;
pub mod liouville;
pub mod model;
pub mod rates;
pub mod solve;

use thiserror::Error;

use crate::liouville::liouvillian_provider;
use crate::model::SystemParams;
use crate::solve::{SignedPermutation, SteadySolver, SteadyStateResult};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Algebra(#[from] algebra::AlgebraError),
    #[error(transparent)]
    Model(#[from] model::ModelError),
    #[error(transparent)]
    Liouville(#[from] liouville::LiouvilleError),
    #[error(transparent)]
    Solve(#[from] solve::SolveError),
    #[error(transparent)]
    Rates(#[from] rates::RatesError),
    #[error("{0}")]
    Unsupported(String),
}

/// Steady state of the time-independent representation, solved in the
/// exchange-parity sector.
pub fn steady_state_for(p: &SystemParams) -> Result<SteadyStateResult, Error> {
    let prov = liouvillian_provider(p)?;
    let Some(l) = prov.constant() else {
        return Err(Error::Unsupported(format!(
            "representation {} has a time-dependent Liouvillian; use evolve",
            p.representation
        )));
    };
    let sym = SignedPermutation::exchange_parity(l.layout())?;
    Ok(SteadySolver::with_symmetry(&sym).solve(l)?)
}
