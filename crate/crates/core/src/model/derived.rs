use num_complex::Complex64 as C64;

use super::SystemParams;

/// Scalar quantities derived from [`SystemParams`], in units of 2π·GHz.
#[derive(Clone, Debug, PartialEq)]
pub struct DerivedQuantities {
    /// `Δ = ω_q − ω_c`.
    pub delta: f64,
    /// Symmetric normal mode, `ω_c − J`.
    pub omega_c_plus: f64,
    /// Antisymmetric normal mode, `ω_c + J`.
    pub omega_c_minus: f64,
    /// Photon-mediated singlet/triplet splitting `2J (g/Δ)²`.
    pub delta_split: f64,
    /// Mean-field amplitude of the symmetric mode from the first drive.
    pub a_bar_d: C64,
    /// Same for the second drive.
    pub a_bar_dp: C64,
    pub n_bar_d: f64,
    pub n_bar_dp: f64,
    /// Drive-induced Rabi frequency `2 (g/Δ) ε_d`.
    pub omega_r: f64,
    /// Dressed qubit detuning from the first drive only.
    pub delta_q: f64,
    /// Dressed qubit detuning including the second drive.
    pub delta_q_prime: f64,
    /// Static pseudo-magnetic field `(h^x, h^y, h^z)` of the
    /// time-independent model.
    pub h_static: [f64; 3],
    pub warnings: Vec<String>,
}

/// Mean-field amplitude `√2 ε / (ω − ω_c^+ + iκ/2)` of a drive on the
/// symmetric mode.
pub fn mean_field_amplitude(eps: f64, omega: f64, omega_c_plus: f64, kappa: f64) -> C64 {
    C64::new(2f64.sqrt() * eps, 0.0) / C64::new(omega - omega_c_plus, kappa / 2.0)
}

/// `ω_q − ω_d + (g/Δ)² [(N̄_d + N̄_d' + 1) Δ + √2 Re(ε_d Ā_d + ε_d' Ā_d')]`;
/// pass zero for the second drive to get the first-drive-only value.
pub fn dressed_detuning(
    p: &SystemParams,
    omega_d: f64,
    a_bar_d: C64,
    a_bar_dp: C64,
    eps_dp: f64,
) -> f64 {
    let delta = p.detuning();
    let r2 = (p.g / delta).powi(2);
    p.omega_q - omega_d
        + r2 * ((a_bar_d.norm_sqr() + a_bar_dp.norm_sqr() + 1.0) * delta
            + 2f64.sqrt() * (p.eps_d * a_bar_d + eps_dp * a_bar_dp).re)
}

pub fn derive(p: &SystemParams) -> DerivedQuantities {
    let delta = p.detuning();
    let omega_c_plus = p.omega_c - p.j;
    let omega_c_minus = p.omega_c + p.j;
    let r = p.g / delta;
    let a_bar_d = mean_field_amplitude(p.eps_d, p.omega_d, omega_c_plus, p.kappa);
    let a_bar_dp = mean_field_amplitude(p.eps_dp, p.omega_dp, omega_c_plus, p.kappa);
    let mut warnings = Vec::new();
    for (name, eps, omega) in [("first", p.eps_d, p.omega_d), ("second", p.eps_dp, p.omega_dp)] {
        if eps > 0.0 && (omega - omega_c_plus).abs() < p.kappa / 100.0 {
            warnings.push(format!(
                "{name} drive resonant with the symmetric mode (|omega - omega_c^+| < kappa/100); mean field limited only by kappa"
            ));
        }
    }
    let delta_q = dressed_detuning(p, p.omega_d, a_bar_d, C64::new(0.0, 0.0), 0.0);
    let delta_q_prime = dressed_detuning(p, p.omega_d, a_bar_d, a_bar_dp, p.eps_dp);
    DerivedQuantities {
        delta,
        omega_c_plus,
        omega_c_minus,
        delta_split: 2.0 * p.j * r * r,
        a_bar_d,
        a_bar_dp,
        n_bar_d: a_bar_d.norm_sqr(),
        n_bar_dp: a_bar_dp.norm_sqr(),
        omega_r: 2.0 * r * p.eps_d,
        delta_q,
        delta_q_prime,
        h_static: [2.0 * r * p.eps_d, 0.0, delta_q_prime],
        warnings,
    }
}
