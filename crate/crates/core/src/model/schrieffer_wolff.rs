//! Schrieffer–Wolff elimination of the light-matter coupling and a brute-force
//! check of the resulting dispersive qubit spectrum.

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::algebra::dense::{expm_antihermitian, hermitian_eigenvalues};
use crate::algebra::Operator;

use super::derived::derive;
use super::hamiltonian::{full_rotating_parts, qubit_spectrum, CanonicalOps, TWO_PI};
use super::{ModelError, SystemParams};

/// Smallest admissible `|ω_q − ω_c^±|` before the generator is rejected.
const RESONANCE_TOL: f64 = 1e-9;

/// `X = (g/√2)[A(σ₁⁺+σ₂⁺)/(ω_q−ω_c^+) + a(σ₁⁺−σ₂⁺)/(ω_q−ω_c^−) − H.c.]`,
/// dimensionless and anti-Hermitian.
pub fn sw_generator(p: &SystemParams) -> Result<Operator, ModelError> {
    let ops = CanonicalOps::for_params(p)?;
    sw_generator_with(p, &ops)
}

pub fn sw_generator_with(p: &SystemParams, ops: &CanonicalOps) -> Result<Operator, ModelError> {
    let d = derive(p);
    let den_plus = p.omega_q - d.omega_c_plus;
    let den_minus = p.omega_q - d.omega_c_minus;
    for (mode, den) in [("symmetric", den_plus), ("antisymmetric", den_minus)] {
        if den.abs() < RESONANCE_TOL {
            return Err(ModelError::Resonance(format!("qubit resonant with the {mode} mode")));
        }
    }
    let sp_sum = &ops.sp[0] + &ops.sp[1];
    let sp_diff = &ops.sp[0] - &ops.sp[1];
    let k = &(&ops.a_sym * &sp_sum).scale(1.0 / den_plus) + &(&ops.a_asym * &sp_diff).scale(1.0 / den_minus);
    Ok((&k - &k.adjoint()).scale(p.g / std::f64::consts::SQRT_2))
}

#[derive(Clone, Debug)]
pub struct SwReport {
    /// Eigenvalues of the zero-photon block of `e^X H e^{−X}`, ascending.
    pub transformed: Vec<f64>,
    /// Second-order prediction, ascending.
    pub predicted: Vec<f64>,
    /// Mean level difference removed before comparing. It is the vacuum
    /// shift `≈ g²/Δ` absent from the effective qubit Hamiltonian.
    pub offset: f64,
    pub max_deviation: f64,
    /// `(g/Δ)³ Δ`, the size of the neglected order.
    pub third_order_scale: f64,
}

/// Transforms the undriven lab Hamiltonian (ω_d frame) with `e^X`, projects
/// onto the photon vacuum and compares its levels with [`qubit_spectrum`].
/// Energies are in units of 2π·GHz.
pub fn sw_consistency_check(p: &SystemParams) -> Result<SwReport, ModelError> {
    let undriven = SystemParams { eps_d: 0.0, eps_dp: 0.0, ..p.clone() };
    let ops = CanonicalOps::for_params(&undriven)?;
    let h = full_rotating_parts(&undriven, &ops).static_part.scale(1.0 / TWO_PI).to_dense();
    let x = sw_generator_with(&undriven, &ops)?.to_dense();
    let u = expm_antihermitian(&x)?;
    let u_dag = u.t().mapv(|z| z.conj());
    let ht: Array2<C64> = u.dot(&h).dot(&u_dag);

    // vacuum of both modes: stride is the photonic block size
    let stride = ops.layout.dim() / 4;
    let block = Array2::from_shape_fn((4, 4), |(i, j)| ht[[i * stride, j * stride]]);
    let block = (&block + &block.t().mapv(|z| z.conj())).mapv(|z| z * 0.5);
    let transformed = hermitian_eigenvalues(&block)?;
    let mut predicted: Vec<f64> = qubit_spectrum(&undriven).iter().map(|&(_, e)| e).collect();
    predicted.sort_by(|a, b| a.total_cmp(b));

    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let offset = mean(&transformed) - mean(&predicted);
    let max_deviation = transformed
        .iter()
        .zip(&predicted)
        .map(|(a, b)| (a - offset - b).abs())
        .fold(0.0, f64::max);
    let delta = p.detuning();
    Ok(SwReport {
        transformed,
        predicted,
        offset,
        max_deviation,
        third_order_scale: (p.g / delta).powi(3) * delta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn small() -> SystemParams {
        SystemParams { n_max_sym: 2, n_max_asym: 2, ..Default::default() }
    }

    #[test]
    fn generator_anti_hermitian() {
        let x = sw_generator(&small()).unwrap();
        assert!((&x + &x.adjoint()).max_abs() < 1e-15);
    }

    #[test]
    fn generator_vanishes_without_coupling() {
        let x = sw_generator(&SystemParams { g: 0.0, ..small() }).unwrap();
        assert_eq!(x.max_abs(), 0.0);
    }

    #[test]
    fn generator_matrix_element() {
        // ⟨↓↓,1_sym,0| X |↑↓,0,0⟩ from the −A†σ₁⁻ term
        let p = small();
        let ops = CanonicalOps::for_params(&p).unwrap();
        let x = sw_generator_with(&p, &ops).unwrap();
        let idx = |q1: usize, q2: usize, ns: usize, na: usize| ops.layout.compose(&[q1, q2, ns, na]);
        let el = x.get(idx(1, 1, 1, 0), idx(0, 1, 0, 0));
        let expected = -(p.g / 2f64.sqrt()) / (p.detuning() + p.j);
        assert_abs_diff_eq!(el.re, expected, epsilon = 1e-15);
        assert_eq!(el.im, 0.0);
    }

    #[test]
    fn resonance_rejected() {
        let p = SystemParams { omega_q: 6.1, ..small() };
        assert!(matches!(sw_generator(&p), Err(ModelError::Resonance(_))));
    }

    #[test]
    fn consistency_within_third_order() {
        let r = sw_consistency_check(&small()).unwrap();
        assert!(r.max_deviation <= 5.0 * r.third_order_scale, "{r:?}");
        assert_abs_diff_eq!(r.offset, 0.01, epsilon = 1e-3);
    }

    #[test]
    fn consistency_exact_without_coupling() {
        let r = sw_consistency_check(&SystemParams { g: 0.0, ..small() }).unwrap();
        assert!(r.max_deviation < 1e-12);
    }
}
