//! Hamiltonians at the three model levels.
//!
//! Every builder returns operators in rad/ns on the canonical layout
//! `(q1, q2, sym, asym)`. For the displaced-frame levels the two photonic
//! factors hold the fluctuation modes `D` and `d` rather than `A` and `a`.

use std::f64::consts::{PI, SQRT_2};
use std::sync::Arc;

use num_complex::Complex64 as C64;

use crate::algebra::layout::{ANTISYMMETRIC_MODE, QUBIT_1, QUBIT_2, SYMMETRIC_MODE};
use crate::algebra::{annihilator, embed, pauli, BellState, Operator, PauliAxis, SpaceLayout};

use super::derived::derive;
use super::{ModelError, Representation, SystemParams};

pub const TWO_PI: f64 = 2.0 * PI;

/// Embedded single-factor operators for one canonical layout.
#[derive(Clone, Debug)]
pub struct CanonicalOps {
    pub layout: Arc<SpaceLayout>,
    pub identity: Operator,
    pub sx: [Operator; 2],
    pub sy: [Operator; 2],
    pub sz: [Operator; 2],
    pub sp: [Operator; 2],
    pub sm: [Operator; 2],
    /// Symmetric-mode annihilator (`A`, or `D` in the displaced frame).
    pub a_sym: Operator,
    /// Antisymmetric-mode annihilator (`a`, or `d`).
    pub a_asym: Operator,
    pub n_sym: Operator,
    pub n_asym: Operator,
}

impl CanonicalOps {
    pub fn new(n_max_sym: usize, n_max_asym: usize) -> Result<Self, ModelError> {
        let layout = Arc::new(SpaceLayout::canonical(n_max_sym, n_max_asym));
        let qubit = |axis, label| embed(&pauli(axis), label, &layout);
        let both = |axis| -> Result<[Operator; 2], ModelError> {
            Ok([qubit(axis, QUBIT_1)?, qubit(axis, QUBIT_2)?])
        };
        let a_sym = embed(&annihilator(n_max_sym)?, SYMMETRIC_MODE, &layout)?;
        let a_asym = embed(&annihilator(n_max_asym)?, ANTISYMMETRIC_MODE, &layout)?;
        Ok(CanonicalOps {
            identity: Operator::identity(layout.clone()),
            sx: both(PauliAxis::X)?,
            sy: both(PauliAxis::Y)?,
            sz: both(PauliAxis::Z)?,
            sp: both(PauliAxis::Plus)?,
            sm: both(PauliAxis::Minus)?,
            n_sym: &a_sym.adjoint() * &a_sym,
            n_asym: &a_asym.adjoint() * &a_asym,
            a_sym,
            a_asym,
            layout,
        })
    }

    pub fn for_params(p: &SystemParams) -> Result<Self, ModelError> {
        Self::new(p.n_max_sym, p.n_max_asym)
    }

    pub fn zero(&self) -> Operator {
        Operator::zero(self.layout.clone())
    }

    /// `σ_1^z + σ_2^z`.
    pub fn sz_sum(&self) -> Operator {
        &self.sz[0] + &self.sz[1]
    }

    /// `σ_1^z − σ_2^z`.
    pub fn sz_diff(&self) -> Operator {
        &self.sz[0] - &self.sz[1]
    }

    /// Photon-mediated exchange `σ_1^x σ_2^x + σ_1^y σ_2^y`.
    pub fn exchange(&self) -> Operator {
        &(&self.sx[0] * &self.sx[1]) + &(&self.sy[0] * &self.sy[1])
    }

    /// Total excitation number `Σσ^z/2 + A†A + a†a`.
    pub fn excitation_number(&self) -> Operator {
        &(&self.sz_sum().scale(0.5) + &self.n_sym) + &self.n_asym
    }
}

/// `H(t) = H_0 + e^{iνt} H_+ + e^{−iνt} H_+†`, all in rad/ns.
#[derive(Clone, Debug)]
pub struct HarmonicHamiltonian {
    pub static_part: Operator,
    pub plus: Operator,
    /// Angular frequency `ν = 2π (ω_d' − ω_d)` in rad/ns.
    pub nu: f64,
}

impl HarmonicHamiltonian {
    pub fn at(&self, t: f64) -> Operator {
        if self.plus.matrix().is_zero() {
            return self.static_part.clone();
        }
        let ph = C64::from_polar(1.0, self.nu * t);
        let osc = &self.plus.scale(ph) + &self.plus.adjoint().scale(ph.conj());
        &self.static_part + &osc
    }

    pub fn is_static(&self) -> bool {
        self.plus.matrix().is_zero()
    }

    fn scaled(static_part: Operator, plus: Operator, nu: f64) -> Self {
        HarmonicHamiltonian { static_part: static_part.scale(TWO_PI), plus: plus.scale(TWO_PI), nu }
    }
}

fn check(p: &SystemParams, expected: Representation) -> Result<(), ModelError> {
    if p.representation != expected {
        return Err(ModelError::WrongRepresentation { expected, found: p.representation });
    }
    Ok(())
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Full two-qubit, two-mode model in the frame rotating at `ω_d`, with
/// `2ω_d`, `ω_d + ω_d'` and counter-rotating light-matter terms dropped.
pub fn full_rotating_parts(p: &SystemParams, ops: &CanonicalOps) -> HarmonicHamiltonian {
    let d = derive(p);
    let sym = &ops.a_sym;
    let asym = &ops.a_asym;
    let mut h = ops.sz_sum().scale(0.5 * (p.omega_q - p.omega_d));
    h = &h + &ops.n_sym.scale(d.omega_c_plus - p.omega_d);
    h = &h + &ops.n_asym.scale(d.omega_c_minus - p.omega_d);
    // (g/√2)[σ1+(A + a) + σ2+(A − a)] + H.c.
    let jc = &(&ops.sp[0] * &(sym + asym)) + &(&ops.sp[1] * &(sym - asym));
    let jc = jc.scale(p.g / SQRT_2);
    h = &h + &(&jc + &jc.adjoint());
    h = &h + &(sym + &sym.adjoint()).scale(SQRT_2 * p.eps_d);
    let plus = sym.scale(SQRT_2 * p.eps_dp);
    HarmonicHamiltonian::scaled(h, plus, TWO_PI * (p.omega_dp - p.omega_d))
}

pub fn build_full_rotating_hamiltonian(p: &SystemParams, t: f64) -> Result<Operator, ModelError> {
    check(p, Representation::FullRotating)?;
    let ops = CanonicalOps::for_params(p)?;
    Ok(full_rotating_parts(p, &ops).at(t))
}

/// The three blocks of the effective time-dependent model.
#[derive(Clone, Debug)]
pub struct EffectiveParts {
    pub system: HarmonicHamiltonian,
    pub bath: HarmonicHamiltonian,
    pub coupling: HarmonicHamiltonian,
}

impl EffectiveParts {
    pub fn total(&self) -> HarmonicHamiltonian {
        HarmonicHamiltonian {
            static_part: &(&self.system.static_part + &self.bath.static_part) + &self.coupling.static_part,
            plus: &(&self.system.plus + &self.bath.plus) + &self.coupling.plus,
            nu: self.system.nu,
        }
    }
}

/// Qubit part `Σ h·σ/2 − (J/2)(g/Δ)²(σσ exchange)`, the bath of fluctuation
/// modes, and their coupling, each split into static and `e^{iνt}` parts.
pub fn effective_td_parts(p: &SystemParams, ops: &CanonicalOps) -> EffectiveParts {
    let d = derive(p);
    let delta = d.delta;
    let r = p.g / delta;
    let r2 = r * r;
    let nu = TWO_PI * (p.omega_dp - p.omega_d);
    let sx_sum = &ops.sx[0] + &ops.sx[1];
    let sz_sum = ops.sz_sum();
    let sm_sum = &ops.sm[0] + &ops.sm[1];

    // h^x static part and h^z time average
    let mut sys0 = sx_sum.scale(0.5 * d.h_static[0]);
    sys0 = &sys0 + &sz_sum.scale(0.5 * d.h_static[2]);
    sys0 = &sys0 - &ops.exchange().scale(0.5 * p.j * r2);
    // (2g/Δ) ε_d' (cos νt σ^x + sin νt σ^y)/2 = (g/Δ) ε_d' (e^{iνt} σ^- + e^{-iνt} σ^+)
    let mut sys_plus = sm_sum.scale(r * p.eps_dp);
    // oscillating h^z: (g/Δ)² Re[c e^{-iνt}] with
    // c = 2Δ Ā_d* Ā_d' + √2 ε_d Ā_d' + √2 ε_d' Ā_d*
    let cz = 2.0 * delta * d.a_bar_d.conj() * d.a_bar_dp
        + SQRT_2 * p.eps_d * d.a_bar_dp
        + SQRT_2 * p.eps_dp * d.a_bar_d.conj();
    sys_plus = &sys_plus + &sz_sum.scale(r2 * cz.conj() * 0.25);

    let bath0 = &ops.n_sym.scale(d.omega_c_plus - p.omega_d) + &ops.n_asym.scale(d.omega_c_minus - p.omega_d);

    // ½(g/Δ)² [Δ Ā(t)* + ε_d/√2 + (ε_d'/√2) e^{iνt}] [D Σσz + d Δσz] + H.c.
    let k = &(&ops.a_sym * &sz_sum) + &(&ops.a_asym * &ops.sz_diff());
    let b0 = delta * d.a_bar_d.conj() + c(p.eps_d / SQRT_2);
    let b1 = delta * d.a_bar_dp.conj() + c(p.eps_dp / SQRT_2);
    let k0 = k.scale(0.5 * r2 * b0);
    let mut coup0 = &k0 + &k0.adjoint();
    if p.include_quadratic_fluct {
        coup0 = &coup0 + &quadratic_fluct(p, ops);
    }
    let coup_plus = k.scale(0.5 * r2 * b1);

    EffectiveParts {
        system: HarmonicHamiltonian::scaled(sys0, sys_plus, nu),
        bath: HarmonicHamiltonian::scaled(bath0, ops.zero(), nu),
        coupling: HarmonicHamiltonian::scaled(coup0, coup_plus, nu),
    }
}

/// `(g²/2Δ)(D†D + d†d)(σ_1^z + σ_2^z)`.
fn quadratic_fluct(p: &SystemParams, ops: &CanonicalOps) -> Operator {
    let n = &ops.n_sym + &ops.n_asym;
    (&n * &ops.sz_sum()).scale(p.g * p.g / (2.0 * p.detuning()))
}

/// Effective time-dependent Hamiltonian at time `t` (rad/ns).
#[derive(Clone, Debug)]
pub struct EffectiveHamiltonian {
    pub system: Operator,
    pub bath: Operator,
    pub coupling: Operator,
}

impl EffectiveHamiltonian {
    pub fn total(&self) -> Operator {
        &(&self.system + &self.bath) + &self.coupling
    }
}

pub fn build_effective_td_hamiltonian(p: &SystemParams, t: f64) -> Result<EffectiveHamiltonian, ModelError> {
    check(p, Representation::EffectiveTd)?;
    let ops = CanonicalOps::for_params(p)?;
    let parts = effective_td_parts(p, &ops);
    Ok(EffectiveHamiltonian {
        system: parts.system.at(t),
        bath: parts.bath.at(t),
        coupling: parts.coupling.at(t),
    })
}

/// Static Hamiltonian of the doubly rotating frame: the symmetric
/// fluctuation mode keeps the first-drive coupling, the antisymmetric one
/// the second-drive coupling and a detuning `ω_c^- − ω_d'`.
pub fn time_independent_parts(p: &SystemParams, ops: &CanonicalOps) -> Operator {
    let d = derive(p);
    let delta = d.delta;
    let r = p.g / delta;
    let r2 = r * r;
    let sz_sum = ops.sz_sum();

    let mut h = (&ops.sx[0] + &ops.sx[1]).scale(0.5 * d.h_static[0]);
    h = &h + &sz_sum.scale(0.5 * d.h_static[2]);
    h = &h - &ops.exchange().scale(0.5 * p.j * r2);

    h = &h + &ops.n_sym.scale(d.omega_c_plus - p.omega_d);
    h = &h + &ops.n_asym.scale(d.omega_c_minus - p.omega_dp);

    if p.include_quadratic_fluct {
        h = &h + &quadratic_fluct(p, ops);
    }
    // Couplings use the Ā* convention of the time-dependent model; the phase
    // of each mode's coupling is a gauge choice (D -> e^{iφ} D).
    let b_sym = delta * d.a_bar_d.conj() + c(p.eps_d / SQRT_2);
    let b_asym = delta * d.a_bar_dp.conj() + c(p.eps_dp / SQRT_2);
    let ks = (&ops.a_sym * &sz_sum).scale(0.5 * r2 * b_sym);
    let ka = (&ops.a_asym * &ops.sz_diff()).scale(0.5 * r2 * b_asym);
    h = &h + &(&ks + &ks.adjoint());
    h = &h + &(&ka + &ka.adjoint());
    h.scale(TWO_PI)
}

pub fn build_time_independent_hamiltonian(p: &SystemParams) -> Result<Operator, ModelError> {
    check(p, Representation::TimeIndependent)?;
    let ops = CanonicalOps::for_params(p)?;
    Ok(time_independent_parts(p, &ops))
}

/// Undriven qubit eigenstates and energies (units of 2π·GHz) to second
/// order in `g/Δ`, highest first.
pub fn qubit_spectrum(p: &SystemParams) -> [(BellState, f64); 4] {
    let dq = p.omega_q - p.omega_d;
    let lamb = if p.g == 0.0 { 0.0 } else { p.g * p.g / p.detuning() };
    let half = 0.5 * derive(p).delta_split;
    [
        (BellState::TPlus, dq + lamb),
        (BellState::S, half),
        (BellState::T0, -half),
        (BellState::TMinus, -dq - lamb),
    ]
}
