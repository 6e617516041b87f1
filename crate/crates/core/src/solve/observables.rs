use crate::algebra::layout::{ANTISYMMETRIC_MODE, QUBIT_1, QUBIT_2, SYMMETRIC_MODE};
use crate::algebra::{bell_state, BellState, DensityMatrix, SpaceLayout};

/// Bell-basis populations and mean photon numbers of a state on the
/// canonical layout.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Observables {
    pub p_t_minus: f64,
    pub p_t0: f64,
    pub p_s: f64,
    pub p_t_plus: f64,
    pub n_sym: f64,
    pub n_asym: f64,
    pub trace: f64,
}

impl Observables {
    pub const NAMES: [&'static str; 6] = ["P_Tm", "P_T0", "P_S", "P_Tp", "n_sym", "n_asym"];

    pub fn population(&self, b: BellState) -> f64 {
        match b {
            BellState::TMinus => self.p_t_minus,
            BellState::T0 => self.p_t0,
            BellState::S => self.p_s,
            BellState::TPlus => self.p_t_plus,
        }
    }

    pub fn values(&self) -> [f64; 6] {
        [self.p_t_minus, self.p_t0, self.p_s, self.p_t_plus, self.n_sym, self.n_asym]
    }

    /// Backward-to-forward ratio `n/(1+n)` of the antisymmetric bath.
    pub fn backward_ratio(&self) -> f64 {
        self.n_asym / (1.0 + self.n_asym)
    }

    pub fn mean(items: &[&Observables]) -> Option<Observables> {
        if items.is_empty() {
            return None;
        }
        let k = items.len() as f64;
        let avg = |f: fn(&Observables) -> f64| items.iter().map(|o| f(o)).sum::<f64>() / k;
        Some(Observables {
            p_t_minus: avg(|o| o.p_t_minus),
            p_t0: avg(|o| o.p_t0),
            p_s: avg(|o| o.p_s),
            p_t_plus: avg(|o| o.p_t_plus),
            n_sym: avg(|o| o.n_sym),
            n_asym: avg(|o| o.n_asym),
            trace: avg(|o| o.trace),
        })
    }
}

pub fn has_canonical_factors(layout: &SpaceLayout) -> bool {
    [QUBIT_1, QUBIT_2, SYMMETRIC_MODE, ANTISYMMETRIC_MODE].iter().all(|l| layout.position(l).is_some())
}

/// `⟨X| tr_photons ρ |X⟩`.
///
/// # Panics
/// If `rho` lacks the two qubit factors.
pub fn fidelity(rho: &DensityMatrix, target: BellState) -> f64 {
    let q = rho.partial_trace(&[QUBIT_1, QUBIT_2]).expect("state on a layout with both qubits");
    q.overlap(&bell_state(target)).clamp(0.0, 1.0)
}

/// # Panics
/// If `rho` is not on the canonical layout.
pub fn observables(rho: &DensityMatrix) -> Observables {
    let q = rho.partial_trace(&[QUBIT_1, QUBIT_2]).expect("state on the canonical layout");
    let layout = rho.layout();
    let (ps, pa) = (
        layout.position(SYMMETRIC_MODE).expect("symmetric mode"),
        layout.position(ANTISYMMETRIC_MODE).expect("antisymmetric mode"),
    );
    let m = rho.matrix();
    let (mut n_sym, mut n_asym) = (0.0, 0.0);
    for i in 0..rho.dim() {
        let digits = layout.decompose(i);
        let p = m[[i, i]].re;
        n_sym += p * digits[ps] as f64;
        n_asym += p * digits[pa] as f64;
    }
    let pop = |b| q.overlap(&bell_state(b));
    Observables {
        p_t_minus: pop(BellState::TMinus),
        p_t0: pop(BellState::T0),
        p_s: pop(BellState::S),
        p_t_plus: pop(BellState::TPlus),
        n_sym,
        n_asym,
        trace: rho.trace().re,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::sync::Arc;

    fn layout() -> Arc<SpaceLayout> {
        Arc::new(SpaceLayout::canonical(2, 2))
    }

    #[test]
    fn bell_fidelities() {
        let t0 = DensityMatrix::bell_with_vacuum(layout(), BellState::T0).unwrap();
        assert_abs_diff_eq!(fidelity(&t0, BellState::T0), 1.0, epsilon = 1e-15);
        let s = DensityMatrix::bell_with_vacuum(layout(), BellState::S).unwrap();
        assert_abs_diff_eq!(fidelity(&s, BellState::T0), 0.0, epsilon = 1e-15);
        let mixed = DensityMatrix::maximally_mixed(layout());
        for b in BellState::ALL {
            assert_abs_diff_eq!(fidelity(&mixed, b), 0.25, epsilon = 1e-12);
        }
    }

    #[test]
    fn ground_state_observables() {
        let g = DensityMatrix::bell_with_vacuum(layout(), BellState::TMinus).unwrap();
        let o = observables(&g);
        assert_eq!(o.values(), [1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn mixed_state_photons_and_completeness() {
        let o = observables(&DensityMatrix::maximally_mixed(layout()));
        let total: f64 = o.values()[..4].iter().sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(o.n_sym, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(o.n_asym, 1.0, epsilon = 1e-12);
    }
}
