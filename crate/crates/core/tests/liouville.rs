use ndarray::Array2;
use num_complex::Complex64 as C64;
use oqs_core::algebra::dense::hermitian_eigenvalues;
use oqs_core::liouville::{hamiltonian_superop, liouvillian_provider};
use oqs_core::model::*;
use proptest::prelude::*;

const REPS: [Representation; 3] =
    [Representation::FullRotating, Representation::EffectiveTd, Representation::TimeIndependent];

fn params(rep: Representation, n: usize) -> impl Strategy<Value = SystemParams> {
    (0.02..0.12f64, 0.0..0.2f64, 0.0..0.02f64, 1e-5..1e-3f64, 0.0..1e-4f64, 0.0..1e-4f64, any::<bool>()).prop_map(
        move |(g, eps, epsp, kappa, gamma, gamma_phi, quad)| SystemParams {
            g,
            eps_d: eps,
            eps_dp: epsp,
            kappa,
            gamma,
            gamma_phi,
            include_quadratic_fluct: quad,
            n_max_sym: n,
            n_max_asym: n,
            representation: rep,
            ..Default::default()
        },
    )
}

fn any_rep() -> impl Strategy<Value = SystemParams> {
    prop_oneof![params(REPS[0], 2), params(REPS[1], 2), params(REPS[2], 2)]
}

fn random_hermitian(d: usize) -> impl Strategy<Value = Array2<C64>> {
    proptest::collection::vec((-1.0..1.0f64, -1.0..1.0f64), d * d).prop_map(move |v| {
        let a = Array2::from_shape_fn((d, d), |(r, c)| C64::new(v[r * d + c].0, v[r * d + c].1));
        (&a + &a.t().mapv(|z| z.conj())).mapv(|z| z * 0.5)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn trace_preserving_at_all_times(p in any_rep(), t in 0.0..1e3f64) {
        let l = liouvillian_provider(&p).unwrap().at(t);
        prop_assert!(l.trace_defect() < 1e-10, "{}", l.trace_defect());
    }

    #[test]
    fn hermiticity_preserving(
        (p, h) in any_rep().prop_flat_map(|p| {
            let d = 4 * (p.n_max_sym + 1) * (p.n_max_asym + 1);
            (Just(p), random_hermitian(d))
        }),
        t in 0.0..1e3f64,
    ) {
        let l = liouvillian_provider(&p).unwrap().at(t);
        let d = h.nrows();
        let v: Vec<C64> = h.t().iter().copied().collect();
        let out = l.apply(&v);
        let m = Array2::from_shape_fn((d, d), |(r, c)| out[c * d + r]);
        let defect = (&m - &m.t().mapv(|z| z.conj())).iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(defect < 1e-10, "{defect}");
    }

    #[test]
    fn lossless_generator_has_imaginary_spectrum(p in any_rep(), t in 0.0..1e3f64) {
        let p = SystemParams { kappa: 0.0, gamma: 0.0, gamma_phi: 0.0, n_max_sym: 1, n_max_asym: 1, ..p };
        let l = liouvillian_provider(&p).unwrap().at(t);
        // iL Hermitian ⇔ spectrum of L on the imaginary axis
        let il = l.matrix().to_dense().mapv(|z| z * C64::i());
        let defect = (&il - &il.t().mapv(|z| z.conj())).iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(defect < 1e-12 * l.max_abs().max(1.0));
        prop_assert!(hermitian_eigenvalues(&il).is_ok());
    }
}

/// With the second drive off, the effective model and the doubly rotating
/// one differ in the frame of the antisymmetric mode and in the first-drive
/// coupling of that mode, which rotates at `ω_d − ω_d'` there and is dropped.
#[test]
fn effective_static_part_matches_time_independent() {
    for quad in [false, true] {
        let base = SystemParams {
            eps_dp: 0.0,
            include_quadratic_fluct: quad,
            n_max_sym: 1,
            n_max_asym: 1,
            ..Default::default()
        };
        let eff = SystemParams { representation: Representation::EffectiveTd, ..base.clone() };
        let ti = SystemParams { representation: Representation::TimeIndependent, ..base.clone() };
        let l_eff = liouvillian_provider(&eff).unwrap();
        let l_eff = l_eff.constant().expect("single drive is static");
        let l_ti = liouvillian_provider(&ti).unwrap();
        let l_ti = l_ti.constant().unwrap();
        let ops = CanonicalOps::for_params(&base).unwrap();
        let d = derive(&base);
        let r2 = (base.g / d.delta).powi(2);
        let b = d.delta * d.a_bar_d.conj() + C64::from(base.eps_d / std::f64::consts::SQRT_2);
        let k = (&ops.a_asym * &ops.sz_diff()).scale(0.5 * r2 * b);
        let dropped = &k + &k.adjoint();
        let frame = &ops.n_asym.scale(base.omega_d - base.omega_dp) - &dropped;
        let shifted = l_eff.add(&hamiltonian_superop(&frame.scale(TWO_PI)));
        let diff = shifted.matrix().max_abs_diff(l_ti.matrix());
        assert!(diff < 1e-10, "quad={quad}: {diff}");
    }
}

#[test]
fn providers_cover_every_representation() {
    for rep in REPS {
        let p = SystemParams { eps_dp: 0.01, n_max_sym: 1, n_max_asym: 1, representation: rep, ..Default::default() };
        let prov = liouvillian_provider(&p).unwrap();
        assert_eq!(prov.is_constant(), rep == Representation::TimeIndependent, "{rep}");
    }
}
