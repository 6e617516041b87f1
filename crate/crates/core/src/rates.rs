//! Closed-form transition rates: bath density of states, drive-dressed qubit
//! states, golden-rule rates for both drives, optimal drive frequencies and
//! a four-level rate-equation picture assembled from them.
//!
//! All rates are returned in the same units as the parameters (2π·GHz, i.e.
//! the printed numbers); multiply by [`TWO_PI`] for rad/ns.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use faer::prelude::*;
use faer::Mat;
use thiserror::Error;

use crate::algebra::BellState;
use crate::model::{derive, ModelError, SystemParams, TWO_PI};

/// Detunings below this are treated as exact resonances.
pub const RESONANCE_TOL: f64 = 1e-9;
/// Dressed states are rejected once the admixture `Ω_R/(√2 Δ_q)` exceeds this.
pub const MIXING_LIMIT: f64 = 0.5;
pub const FIXED_POINT_TOL: f64 = 1e-9;
pub const FIXED_POINT_MAX_ITER: usize = 50;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RatesError {
    #[error("invalid parameter {key}: {reason}")]
    InvalidParam { key: &'static str, reason: String },
    #[error("perturbative rate invalid: {0}")]
    Resonance(String),
    #[error("invalid transition: {0}")]
    InvalidTransition(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Which cavity normal mode acts as the bath: `+` is the symmetric mode
/// (`D`, at `ω_c^+`), `−` the antisymmetric one (`d`, at `ω_c^-`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Plus => "+",
            Branch::Minus => "-",
        }
    }

    fn mode_frequency(self, p: &SystemParams) -> f64 {
        match self {
            Branch::Plus => p.omega_c - p.j,
            Branch::Minus => p.omega_c + p.j,
        }
    }

    /// Qubit-side operator `σ₁ᶻ ± σ₂ᶻ` as a diagonal in the product basis.
    fn sz_combination(self) -> [f64; 4] {
        match self {
            Branch::Plus => [2.0, 0.0, 0.0, -2.0],
            Branch::Minus => [0.0, 2.0, -2.0, 0.0],
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

fn require_kappa(p: &SystemParams) -> Result<(), RatesError> {
    if p.kappa > 0.0 && p.kappa.is_finite() {
        Ok(())
    } else {
        Err(RatesError::InvalidParam {
            key: "kappa",
            reason: format!("must be > 0 for a finite bath density of states, got {}", p.kappa),
        })
    }
}

/// Lorentzian density of states of a cavity normal mode,
/// `(1/π) (κ/2) / ((ω − ω_c^±)² + (κ/2)²)`.
pub fn dos(omega: f64, branch: Branch, p: &SystemParams) -> Result<f64, RatesError> {
    require_kappa(p)?;
    let hw = p.kappa / 2.0;
    let x = omega - branch.mode_frequency(p);
    Ok(hw / (PI * (x * x + hw * hw)))
}

/// Qubit eigenstates perturbed to first order by the drive-induced field
/// `(g/Δ) ε_d (σ₁ˣ + σ₂ˣ)`. Amplitudes are in the product basis
/// `(↑↑, ↑↓, ↓↑, ↓↓)`; each vector is normalized, the set is orthogonal only
/// up to `O(mixing²)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DressedStates {
    /// Ordered `T̃₊, S̃, T̃₀, T̃₋`.
    pub states: [(BellState, [f64; 4]); 4],
    pub energies: [(BellState, f64); 4],
    /// `Ω_R / (√2 Δ_q)`.
    pub mixing: f64,
    /// The dressed detuning used (`Δ_q'` when the second drive is on).
    pub delta_q: f64,
}

impl DressedStates {
    fn index(b: BellState) -> usize {
        match b {
            BellState::TPlus => 0,
            BellState::S => 1,
            BellState::T0 => 2,
            BellState::TMinus => 3,
        }
    }

    pub fn state(&self, b: BellState) -> &[f64; 4] {
        &self.states[Self::index(b)].1
    }

    pub fn energy(&self, b: BellState) -> f64 {
        self.energies[Self::index(b)].1
    }
}

pub fn dressed_states(p: &SystemParams) -> Result<DressedStates, RatesError> {
    let d = derive(p);
    let dq = if p.eps_dp != 0.0 { d.delta_q_prime } else { d.delta_q };
    if dq.abs() < RESONANCE_TOL {
        return Err(RatesError::Resonance(format!(
            "first drive resonant with the dressed qubits (Delta_q = {dq:e})"
        )));
    }
    let m = d.omega_r / (SQRT_2 * dq);
    if m.abs() > MIXING_LIMIT {
        return Err(RatesError::Resonance(format!(
            "drive admixture Omega_R/(sqrt2 Delta_q) = {m:.3} exceeds {MIXING_LIMIT}"
        )));
    }
    let h = FRAC_1_SQRT_2;
    let normalize = |v: [f64; 4]| {
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.map(|x| x / n)
    };
    let shift = d.omega_r * d.omega_r / (2.0 * dq);
    let half = d.delta_split / 2.0;
    Ok(DressedStates {
        states: [
            (BellState::TPlus, normalize([1.0, m * h, m * h, 0.0])),
            (BellState::S, [0.0, h, -h, 0.0]),
            (BellState::T0, normalize([-m, h, h, m])),
            (BellState::TMinus, normalize([0.0, -m * h, -m * h, 1.0])),
        ],
        energies: [
            (BellState::TPlus, dq + shift),
            (BellState::S, half),
            (BellState::T0, -half),
            (BellState::TMinus, -dq - shift),
        ],
        mixing: m,
        delta_q: dq,
    })
}

/// A rate together with the bath branch and the frequency at which the
/// density of states was probed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateEntry {
    pub rate: f64,
    pub branch: Branch,
    pub probe: f64,
}

/// Golden-rule rate `i → f` induced by the first drive through the
/// photon-fluctuation coupling `S^± = ½(g/Δ)²(Ā_d Δ + ε_d/√2)(σ₁ᶻ ± σ₂ᶻ)`.
pub fn fgr_rate(i: BellState, f: BellState, p: &SystemParams) -> Result<f64, RatesError> {
    fgr_rate_detail(i, f, p).map(|e| e.rate)
}

/// As [`fgr_rate`], reporting which branch carries the transition. When
/// neither does (e.g. `T₋ ↔ T₊`) the rate is zero and the `+` branch is
/// reported.
pub fn fgr_rate_detail(i: BellState, f: BellState, p: &SystemParams) -> Result<RateEntry, RatesError> {
    let (plus, minus) = fgr_branches(i, f, p)?;
    Ok(if minus.rate > plus.rate { minus } else { plus })
}

/// Both branch contributions `(Γ⁺, Γ⁻)` of a transition.
pub fn fgr_branches(i: BellState, f: BellState, p: &SystemParams) -> Result<(RateEntry, RateEntry), RatesError> {
    if i == f {
        return Err(RatesError::InvalidTransition(format!("initial and final state are both {i}")));
    }
    require_kappa(p)?;
    let ds = dressed_states(p)?;
    let d = derive(p);
    let r2 = (p.g / d.delta).powi(2);
    let coupling = 0.5 * r2 * (d.a_bar_d * d.delta + p.eps_d * FRAC_1_SQRT_2).norm();
    let probe = ds.energy(i) - ds.energy(f) + p.omega_d;
    let (si, sf) = (ds.state(i), ds.state(f));
    let branch = |b: Branch| -> Result<RateEntry, RatesError> {
        let diag = b.sz_combination();
        let elem: f64 = (0..4).map(|k| sf[k] * diag[k] * si[k]).sum();
        let m = coupling * elem;
        // selection rules make cancelled elements exact zeros up to rounding
        let rate = if elem.abs() < 1e-14 { 0.0 } else { 2.0 * PI * m * m * dos(probe, b, p)? };
        Ok(RateEntry { rate, branch: b, probe })
    };
    Ok((branch(Branch::Plus)?, branch(Branch::Minus)?))
}

/// Peak estimate `400 g⁶ ε_d⁴ / (Δ⁸ κ)` of `Γ(T₋ → T₀)` at the optimal
/// first-drive frequency.
pub fn drive_peak_estimate(p: &SystemParams) -> Result<f64, RatesError> {
    require_kappa(p)?;
    let delta = p.detuning();
    Ok(400.0 * p.g.powi(6) * p.eps_d.powi(4) / (delta.powi(8) * p.kappa))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PurificationDirection {
    SToT0,
    T0ToS,
}

impl PurificationDirection {
    pub fn as_str(self) -> &'static str {
        match self {
            PurificationDirection::SToT0 => "S->T0",
            PurificationDirection::T0ToS => "T0->S",
        }
    }
}

/// `Λ = ε_d' (g/Δ)² [1/2 + Δ/(ω_d' − ω_c^+)]`.
pub fn purification_coupling(p: &SystemParams) -> Result<f64, RatesError> {
    let omega_c_plus = p.omega_c - p.j;
    let det = p.omega_dp - omega_c_plus;
    if det.abs() < RESONANCE_TOL {
        return Err(RatesError::Resonance("second drive resonant with the symmetric mode; Lambda diverges".into()));
    }
    let delta = p.detuning();
    Ok(p.eps_dp * (p.g / delta).powi(2) * (0.5 + delta / det))
}

/// Second-drive rate `4π |Λ|² ρ_−(E_i − E_f + ω_d')` between `S` and `T₀`.
pub fn purification_rate(dir: PurificationDirection, p: &SystemParams) -> Result<f64, RatesError> {
    purification_rate_detail(dir, p).map(|e| e.rate)
}

pub fn purification_rate_detail(dir: PurificationDirection, p: &SystemParams) -> Result<RateEntry, RatesError> {
    require_kappa(p)?;
    let lambda = purification_coupling(p)?;
    let half = derive(p).delta_split / 2.0;
    let (e_s, e_t0) = (half, -half);
    let probe = match dir {
        PurificationDirection::SToT0 => e_s - e_t0,
        PurificationDirection::T0ToS => e_t0 - e_s,
    } + p.omega_dp;
    let rate = 4.0 * PI * lambda * lambda * dos(probe, Branch::Minus, p)?;
    Ok(RateEntry { rate, branch: Branch::Minus, probe })
}

/// Peak estimate `2 g⁴ ε_d'² / (Δ² J² κ)` of the purification rate.
pub fn purification_peak_estimate(p: &SystemParams) -> Result<f64, RatesError> {
    require_kappa(p)?;
    require_j(p)?;
    Ok(2.0 * p.g.powi(4) * p.eps_dp.powi(2) / (p.detuning().powi(2) * p.j * p.j * p.kappa))
}

fn require_j(p: &SystemParams) -> Result<(), RatesError> {
    if p.j > 0.0 {
        Ok(())
    } else {
        Err(RatesError::InvalidParam { key: "j", reason: "must be > 0 (no singlet/triplet splitting)".into() })
    }
}

/// Effective `T₀ → S` rate through off-resonant excitation of `T₊`,
/// `25 g² ε_d⁴ κ / (2 Δ⁴ J²)`.
pub fn effective_dephasing_rate(p: &SystemParams) -> Result<f64, RatesError> {
    require_j(p)?;
    Ok(25.0 * p.g * p.g * p.eps_d.powi(4) * p.kappa / (2.0 * p.detuning().powi(4) * p.j * p.j))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// The first drive populates the target directly.
    Direct,
    /// The first drive populates the other one-excitation state and the
    /// second drive transfers it to the target.
    Switching,
}

impl Scheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Direct => "direct",
            Scheme::Switching => "switching",
        }
    }
}

impl FromStr for Scheme {
    type Err = RatesError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "direct" => Ok(Scheme::Direct),
            "switching" => Ok(Scheme::Switching),
            other => Err(RatesError::InvalidParam { key: "scheme", reason: format!("unknown scheme {other:?}") }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptimalFrequencies {
    pub omega_d: f64,
    pub omega_dp: f64,
    pub iterations: usize,
    /// `false` if the fixed point did not settle; `omega_d` is then the last
    /// iterate.
    pub converged: bool,
}

/// Drive frequencies that put the pumping transition and the purifying
/// transition at the centre of their bath resonances.
///
/// The second drive sits at `ω_c^- ∓ δ` (`−` to favour `T₀`, `+` for `S`).
/// The first drive satisfies `ω_d = ω_c^± + E_X − E_{T₋}` with `X` the state
/// it pumps (`T₀` via the symmetric mode, `S` via the antisymmetric one);
/// the dressed energies depend on `ω_d` through `Δ_q`, so this is solved by
/// a damped fixed-point iteration.
pub fn optimal_frequencies(
    target: BellState,
    scheme: Scheme,
    p: &SystemParams,
) -> Result<OptimalFrequencies, RatesError> {
    let other = match target {
        BellState::T0 => BellState::S,
        BellState::S => BellState::T0,
        b => return Err(RatesError::InvalidTransition(format!("target must be T0 or S, got {b}"))),
    };
    let pumped = match scheme {
        Scheme::Direct => target,
        Scheme::Switching => other,
    };
    let d = derive(p);
    let omega_dp = match target {
        BellState::T0 => d.omega_c_minus - d.delta_split,
        _ => d.omega_c_minus + d.delta_split,
    };
    let mode = if pumped == BellState::T0 { d.omega_c_plus } else { d.omega_c_minus };
    let resonance = |omega_d: f64| -> Result<f64, RatesError> {
        let q = SystemParams { omega_d, omega_dp, ..p.clone() };
        let ds = dressed_states(&q)?;
        Ok(mode + ds.energy(pumped) - ds.energy(BellState::TMinus))
    };
    // Δ_q contains −ω_d, so the bare map has slope ≈ −1; averaging with the
    // identity makes it contractive.
    let mut omega = 0.5 * (p.omega_q + mode);
    for it in 1..=FIXED_POINT_MAX_ITER {
        let next = 0.5 * (omega + resonance(omega)?);
        let step = (next - omega).abs();
        omega = next;
        if step < FIXED_POINT_TOL {
            return Ok(OptimalFrequencies { omega_d: omega, omega_dp, iterations: it, converged: true });
        }
    }
    log::warn!("optimal omega_d did not converge in {FIXED_POINT_MAX_ITER} iterations; last iterate {omega}");
    Ok(OptimalFrequencies { omega_d: omega, omega_dp, iterations: FIXED_POINT_MAX_ITER, converged: false })
}

/// Ratio of backward to forward purification rate for a mean bath
/// occupation `n`, `n / (1 + n)`.
pub fn backward_ratio(n_mean: f64) -> f64 {
    debug_assert!(n_mean >= 0.0, "mean occupation must be non-negative");
    n_mean / (1.0 + n_mean)
}

/// All analytic rates at one parameter point, in 2π·GHz.
#[derive(Clone, Debug, PartialEq)]
pub struct RateTable {
    pub t_minus_t0: RateEntry,
    pub t0_t_plus: RateEntry,
    pub t_minus_s: RateEntry,
    pub s_t_plus: RateEntry,
    pub prime_s_t0: RateEntry,
    pub prime_t0_s: RateEntry,
    pub eff_t0_s: f64,
    pub drive_peak: f64,
    pub purification_peak: f64,
}

impl RateTable {
    pub fn compute(p: &SystemParams) -> Result<Self, RatesError> {
        use BellState::*;
        Ok(RateTable {
            t_minus_t0: fgr_rate_detail(TMinus, T0, p)?,
            t0_t_plus: fgr_rate_detail(T0, TPlus, p)?,
            t_minus_s: fgr_rate_detail(TMinus, S, p)?,
            s_t_plus: fgr_rate_detail(S, TPlus, p)?,
            prime_s_t0: purification_rate_detail(PurificationDirection::SToT0, p)?,
            prime_t0_s: purification_rate_detail(PurificationDirection::T0ToS, p)?,
            eff_t0_s: effective_dephasing_rate(p)?,
            drive_peak: drive_peak_estimate(p)?,
            purification_peak: purification_peak_estimate(p)?,
        })
    }

    /// `(name, entry)` pairs; scalar estimates carry no branch.
    pub fn entries(&self) -> Vec<(&'static str, f64, Option<Branch>, Option<f64>)> {
        let e = |name, r: &RateEntry| (name, r.rate, Some(r.branch), Some(r.probe));
        vec![
            e("gamma_Tm_T0", &self.t_minus_t0),
            e("gamma_T0_Tp", &self.t0_t_plus),
            e("gamma_Tm_S", &self.t_minus_s),
            e("gamma_S_Tp", &self.s_t_plus),
            e("gamma_prime_S_T0", &self.prime_s_t0),
            e("gamma_prime_T0_S", &self.prime_t0_s),
            ("gamma_eff_T0_S", self.eff_t0_s, None, None),
            ("peak_drive_Tm_T0", self.drive_peak, None, None),
            ("peak_purification", self.purification_peak, None, None),
        ]
    }

    pub fn to_rad_per_ns(rate: f64) -> f64 {
        rate * TWO_PI
    }
}

/// Stationary solution of the classical four-level rate equations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RatePopulations {
    /// Ordered as [`BellState::ALL`]: `T₋, T₀, S, T₊`.
    pub populations: [f64; 4],
    /// Set when no rates were present and the uniform distribution was
    /// returned.
    pub degenerate: bool,
}

impl RatePopulations {
    pub fn population(&self, b: BellState) -> f64 {
        let k = BellState::ALL.iter().position(|&x| x == b).expect("listed state");
        self.populations[k]
    }
}

/// Rate matrix `W[f][i]` (rate `i → f`, off-diagonal only) over
/// [`BellState::ALL`].
///
/// Contributions: every first-drive golden-rule transition, both
/// purification directions, qubit relaxation (`T₊ → T₀, S` at `γ` each and
/// `T₀, S → T₋` at `γ` each, i.e. the total `2γ` out of `T₊` split evenly),
/// and pure dephasing as a symmetric `T₀ ↔ S` exchange at `γ_φ`. The
/// effective `T₀ → S` rate is not added separately: the `T₀ → T₊ → S`
/// pathway it summarizes is already present explicitly.
pub fn rate_matrix(p: &SystemParams) -> Result<[[f64; 4]; 4], RatesError> {
    use BellState::*;
    let idx = |b: BellState| BellState::ALL.iter().position(|&x| x == b).expect("listed state");
    let mut w = [[0.0; 4]; 4];
    for i in BellState::ALL {
        for f in BellState::ALL {
            if i != f {
                w[idx(f)][idx(i)] += fgr_rate(i, f, p)?;
            }
        }
    }
    if p.eps_dp != 0.0 {
        w[idx(T0)][idx(S)] += purification_rate(PurificationDirection::SToT0, p)?;
        w[idx(S)][idx(T0)] += purification_rate(PurificationDirection::T0ToS, p)?;
    }
    for (from, to) in [(TPlus, T0), (TPlus, S), (T0, TMinus), (S, TMinus)] {
        w[idx(to)][idx(from)] += p.gamma;
    }
    w[idx(S)][idx(T0)] += p.gamma_phi;
    w[idx(T0)][idx(S)] += p.gamma_phi;
    Ok(w)
}

pub fn rate_equation_populations(p: &SystemParams) -> Result<RatePopulations, RatesError> {
    let w = rate_matrix(p)?;
    if let Some((i, f)) = (0..4).flat_map(|i| (0..4).map(move |f| (i, f))).find(|&(i, f)| !w[f][i].is_finite()) {
        return Err(RatesError::InvalidTransition(format!(
            "non-finite rate {} -> {}",
            BellState::ALL[i],
            BellState::ALL[f]
        )));
    }
    stationary(&w)
}

/// Stationary distribution of `dP/dt = W P − diag(Σ_f W_fi) P`.
pub fn stationary(w: &[[f64; 4]; 4]) -> Result<RatePopulations, RatesError> {
    if w.iter().flatten().all(|&x| x == 0.0) {
        log::warn!("rate equations have no transitions; returning the uniform distribution");
        return Ok(RatePopulations { populations: [0.25; 4], degenerate: true });
    }
    let mut a = Mat::<f64>::from_fn(4, 4, |f, i| if f == i { 0.0 } else { w[f][i] });
    for i in 0..4 {
        let out: f64 = (0..4).filter(|&f| f != i).map(|f| w[f][i]).sum();
        a[(i, i)] = -out;
    }
    // the generator has a zero row sum; trade one equation for normalization
    for i in 0..4 {
        a[(0, i)] = 1.0;
    }
    let mut b = Mat::<f64>::zeros(4, 1);
    b[(0, 0)] = 1.0;
    let x = a.full_piv_lu().solve(&b);
    let pops = [x[(0, 0)], x[(1, 0)], x[(2, 0)], x[(3, 0)]];
    if pops.iter().any(|v| !v.is_finite()) {
        return Err(RatesError::InvalidTransition("rate equations have no unique stationary state".into()));
    }
    Ok(RatePopulations { populations: pops.map(|v| v.max(0.0)), degenerate: false })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use BellState::*;

    fn reference_device() -> SystemParams {
        SystemParams::default()
    }

    #[test]
    fn dos_peak_and_half_width() {
        let p = reference_device();
        let wc = p.omega_c - p.j;
        assert_relative_eq!(dos(wc, Branch::Plus, &p).unwrap(), 2.0 / (PI * p.kappa), max_relative = 1e-14);
        for s in [-1.0, 1.0] {
            let v = dos(wc + s * p.kappa / 2.0, Branch::Plus, &p).unwrap();
            // ω_c ± κ/2 − ω_c cancels ~11 digits
            assert_relative_eq!(v, 1.0 / (PI * p.kappa), max_relative = 1e-9);
        }
        let p0 = SystemParams { kappa: 0.0, ..reference_device() };
        assert!(matches!(dos(wc, Branch::Plus, &p0), Err(RatesError::InvalidParam { key: "kappa", .. })));
    }

    #[test]
    fn undriven_dressed_states_are_bare() {
        let p = SystemParams { eps_d: 0.0, ..reference_device() };
        let ds = dressed_states(&p).unwrap();
        assert_eq!(ds.mixing, 0.0);
        for (b, e) in crate::model::qubit_spectrum(&p) {
            assert_abs_diff_eq!(ds.energy(b), e, epsilon = 1e-12);
            let bare = crate::algebra::bell_state(b);
            for k in 0..4 {
                assert_abs_diff_eq!(ds.state(b)[k], bare[k].re, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn resonant_drive_rejected() {
        // Δ_q = ω_q − ω_d + g²/Δ (N̄+1)… ≈ 0 for ω_d slightly above ω_q
        let mut p = SystemParams { eps_d: 0.0, ..reference_device() };
        p.omega_d = p.omega_q + p.g * p.g / p.detuning();
        assert!(matches!(dressed_states(&p), Err(RatesError::Resonance(_))));
    }

    #[test]
    fn selection_rules() {
        let p = reference_device();
        assert_eq!(fgr_rate(TMinus, TPlus, &p).unwrap(), 0.0);
        assert_eq!(fgr_rate(TPlus, TMinus, &p).unwrap(), 0.0);
        assert!(matches!(fgr_rate(T0, T0, &p), Err(RatesError::InvalidTransition(_))));
        for (i, f, branch) in [(TMinus, T0, Branch::Plus), (T0, TPlus, Branch::Plus), (TMinus, S, Branch::Minus), (S, TPlus, Branch::Minus)] {
            let (plus, minus) = fgr_branches(i, f, &p).unwrap();
            assert!((plus.rate > 0.0) != (minus.rate > 0.0), "{i}->{f}");
            assert_eq!(fgr_rate_detail(i, f, &p).unwrap().branch, branch);
        }
    }

    #[test]
    fn drive_off_rates_vanish() {
        let p = SystemParams { eps_d: 0.0, ..reference_device() };
        for i in BellState::ALL {
            for f in BellState::ALL {
                if i != f {
                    assert_eq!(fgr_rate(i, f, &p).unwrap(), 0.0);
                }
            }
        }
        assert_eq!(effective_dephasing_rate(&p).unwrap(), 0.0);
        assert_eq!(purification_rate(PurificationDirection::SToT0, &reference_device()).unwrap(), 0.0);
    }

    #[test]
    fn general_rate_matches_closed_transition_formula() {
        // 8π |g³ε²/(Δ³Δ_q) (1/2 + Δ/(ω_d − ω_c^+))|² ρ_+(E_T₋ − E_T₀ + ω_d),
        // up to the normalization of the dressed vectors
        let p = reference_device();
        let d = derive(&p);
        let ds = dressed_states(&p).unwrap();
        let amp = p.g.powi(3) * p.eps_d.powi(2) / (d.delta.powi(3) * ds.delta_q)
            * (d.a_bar_d * (d.delta / (SQRT_2 * p.eps_d)) + 0.5).norm();
        let probe = ds.energy(TMinus) - ds.energy(T0) + p.omega_d;
        let norm = 1.0 / ((1.0 + ds.mixing.powi(2)) * (1.0 + 2.0 * ds.mixing.powi(2)));
        let expected = 8.0 * PI * amp * amp * dos(probe, Branch::Plus, &p).unwrap() * norm;
        assert_relative_eq!(fgr_rate(TMinus, T0, &p).unwrap(), expected, max_relative = 1e-12);
    }

    #[test]
    fn purification_closed_form_and_selectivity() {
        let p = SystemParams { eps_dp: 0.01, omega_dp: 6.098, ..reference_device() };
        let fwd = purification_rate(PurificationDirection::SToT0, &p).unwrap();
        let peak = purification_peak_estimate(&p).unwrap();
        assert_relative_eq!(peak, 2e-2, max_relative = 1e-12);
        assert!((fwd - peak).abs() / peak < 0.3, "{fwd} vs {peak}");
        let back = purification_rate(PurificationDirection::T0ToS, &p).unwrap();
        let hw = p.kappa / 2.0;
        let delta = derive(&p).delta_split;
        assert_relative_eq!(fwd / back, 1.0 + (2.0 * delta / hw).powi(2), max_relative = 1e-9);
        assert_relative_eq!(fwd / back, 6401.0, max_relative = 1e-9);
    }

    #[test]
    fn purification_at_symmetric_mode_rejected() {
        let p = SystemParams { eps_dp: 0.01, omega_dp: 5.9, ..reference_device() };
        assert!(matches!(purification_rate(PurificationDirection::SToT0, &p), Err(RatesError::Resonance(_))));
    }

    #[test]
    fn effective_dephasing_reference() {
        let p = reference_device();
        assert_relative_eq!(effective_dephasing_rate(&p).unwrap(), 1.25e-7, max_relative = 1e-12);
        let p2 = SystemParams { eps_d: 0.2, ..reference_device() };
        assert_relative_eq!(effective_dephasing_rate(&p2).unwrap(), 16.0 * 1.25e-7, max_relative = 1e-12);
        let pj = SystemParams { j: 0.0, ..reference_device() };
        assert!(effective_dephasing_rate(&pj).is_err());
    }

    #[test]
    fn optimal_second_drive_frequencies() {
        let p = reference_device();
        let t0 = optimal_frequencies(T0, Scheme::Direct, &p).unwrap();
        assert_abs_diff_eq!(t0.omega_dp, 6.098, epsilon = 1e-12);
        let s = optimal_frequencies(S, Scheme::Switching, &p).unwrap();
        assert_abs_diff_eq!(s.omega_dp, 6.102, epsilon = 1e-12);
        assert!(t0.converged && t0.iterations <= FIXED_POINT_MAX_ITER);
        assert!((t0.omega_d - 6.45).abs() < 0.01);
        // switching to S keeps the first drive on the T₀ resonance
        assert_abs_diff_eq!(s.omega_d, t0.omega_d, epsilon = 1e-3);
        assert!(optimal_frequencies(TPlus, Scheme::Direct, &p).is_err());
    }

    #[test]
    fn optimal_first_drive_hits_bath_peak() {
        let p = reference_device();
        let o = optimal_frequencies(T0, Scheme::Direct, &p).unwrap();
        let q = SystemParams { omega_d: o.omega_d, ..p.clone() };
        let e = fgr_rate_detail(TMinus, T0, &q).unwrap();
        assert_abs_diff_eq!(e.probe, q.omega_c - q.j, epsilon = 1e-8);
        let s = optimal_frequencies(S, Scheme::Direct, &p).unwrap();
        let q = SystemParams { omega_d: s.omega_d, ..p };
        assert_abs_diff_eq!(fgr_rate_detail(TMinus, S, &q).unwrap().probe, q.omega_c + q.j, epsilon = 1e-8);
    }

    #[test]
    fn backward_ratio_values() {
        assert_eq!(backward_ratio(0.0), 0.0);
        assert_eq!(backward_ratio(1.0), 0.5);
        assert_relative_eq!(backward_ratio(0.1), 0.1 / 1.1, max_relative = 1e-15);
    }

    #[test]
    fn rate_equations_limits() {
        let mut w = [[0.0; 4]; 4];
        let r = stationary(&w).unwrap();
        assert!(r.degenerate);
        assert_eq!(r.populations, [0.25; 4]);

        let p = SystemParams { eps_d: 0.0, gamma_phi: 0.0, ..reference_device() };
        let r = rate_equation_populations(&p).unwrap();
        assert_abs_diff_eq!(r.population(TMinus), 1.0, epsilon = 1e-12);

        // symmetric T₀ ↔ S exchange, both fed and drained equally
        w[1][2] = 1.0;
        w[2][1] = 1.0;
        for k in [1, 2] {
            w[k][0] = 0.3;
            w[0][k] = 0.1;
        }
        w[0][3] = 1.0;
        let r = stationary(&w).unwrap();
        assert_abs_diff_eq!(r.population(T0), r.population(S), epsilon = 1e-14);
        assert_abs_diff_eq!(r.population(TPlus), 0.0, epsilon = 1e-14);
    }
}
