use std::path::Path;
use std::process::Command;

use oqs_cli::config::{load_config, ConfigError, RunConfig};
use oqs_cli::report::rates_report;
use oqs_cli::sweep::{run_sweep, write_csv, Axis, Output, SweepSpec, TdSettings};
use oqs_core::algebra::BellState;
use oqs_core::model::{Representation, SystemParams};
use oqs_core::rates::optimal_frequencies;
use oqs_core::rates::Scheme;

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn empty_config_is_reference_device() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = load_config(&write(dir.path(), "empty.cfg", "")).unwrap();
    assert_eq!(cfg.params, SystemParams::default());
    assert_eq!(cfg.params.eps_dp, 0.0);
}

#[test]
fn negative_kappa_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let err = load_config(&write(dir.path(), "bad.cfg", "kappa = -1\n")).unwrap_err();
    assert!(err.to_string().contains("kappa"), "{err}");
}

#[test]
fn inactive_purification_is_a_warning() {
    let cfg = RunConfig::parse("representation = time_independent\neps_dp = 0\n").unwrap();
    assert!(cfg.warnings.iter().any(|w| w.contains("purification")), "{:?}", cfg.warnings);
}

#[test]
fn degenerate_axis_is_rejected() {
    let err = RunConfig::parse("sweep.axis1 = omega_d, 6.45, 6.45, 11\n").unwrap_err();
    assert!(matches!(err, ConfigError::Sweep(_)), "{err}");
    let err = RunConfig::parse("sweep.axis1 = omega_d, 6.40, 6.50, 1\n").unwrap_err();
    assert!(matches!(err, ConfigError::Sweep(_)), "{err}");
}

#[test]
fn unknown_key_fails_closed() {
    assert!(matches!(RunConfig::parse("omega_x = 1\n"), Err(ConfigError::UnknownKey(_))));
}

fn small_sweep() -> (SystemParams, SweepSpec) {
    let p = SystemParams { eps_d: 0.1, eps_dp: 0.005, omega_dp: 6.098, n_max_sym: 2, n_max_asym: 2, ..Default::default() };
    let spec = SweepSpec {
        axis1: Axis::new("omega_d", 6.452, 6.458, 4),
        axis2: Some(Axis::new("eps_dp", 0.0, 0.01, 3)),
        outputs: Output::ALL.to_vec(),
    };
    (p, spec)
}

fn csv_bytes(p: &SystemParams, spec: &SweepSpec, workers: usize) -> Vec<u8> {
    let rows = run_sweep(p, BellState::T0, spec, &TdSettings::default(), workers);
    let mut buf = Vec::new();
    write_csv(&mut buf, &spec.axis_keys(), &spec.outputs, &rows).unwrap();
    buf
}

#[test]
fn sweeps_are_deterministic_across_worker_counts() {
    let (p, spec) = small_sweep();
    let one = csv_bytes(&p, &spec, 1);
    assert_eq!(one, csv_bytes(&p, &spec, 1));
    assert_eq!(one, csv_bytes(&p, &spec, 4));
    let text = String::from_utf8(one).unwrap();
    assert!(!text.contains('\r'));
    assert_eq!(text.lines().count(), 1 + 12);
}

#[test]
fn converged_rows_are_physical() {
    let (p, spec) = small_sweep();
    let rows = run_sweep(&p, BellState::T0, &spec, &TdSettings::default(), 2);
    assert!(rows.iter().all(|r| r.converged));
    for r in &rows {
        for b in BellState::ALL {
            assert!((0.0..=1.0).contains(&r.fidelity(b)), "{b}: {}", r.fidelity(b));
        }
        assert!(r.residual < 1e-8);
    }
}

#[test]
fn time_dependent_sweep_reports_rows() {
    let p = SystemParams {
        eps_d: 0.1,
        n_max_sym: 1,
        n_max_asym: 1,
        representation: Representation::EffectiveTd,
        ..Default::default()
    };
    let spec = SweepSpec { axis1: Axis::new("omega_d", 6.44, 6.46, 2), axis2: None, outputs: Output::ALL.to_vec() };
    let td = TdSettings { t_end: Some(200.0), ..Default::default() };
    let rows = run_sweep(&p, BellState::T0, &spec, &td, 2);
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.error.is_none()));
}

#[test]
fn rates_report_examples() {
    let p = SystemParams { eps_d: 0.1, eps_dp: 0.01, n_max_sym: 2, n_max_asym: 2, ..Default::default() };
    let r = rates_report(&p);
    let eff = r.get("gamma_eff_T0_S").unwrap().value;
    assert!((eff - 1.25e-7).abs() < 1e-12 * 1.25e-7, "{eff}");

    let off = rates_report(&SystemParams { eps_d: 0.0, eps_dp: 0.0, ..p.clone() });
    for name in ["gamma_Tm_T0", "gamma_T0_Tp", "gamma_Tm_S", "gamma_S_Tp", "gamma_prime_S_T0", "gamma_prime_T0_S"] {
        assert_eq!(off.get(name).unwrap().value, 0.0, "{name}");
    }

    let opt = optimal_frequencies(BellState::T0, Scheme::Direct, &p).unwrap();
    let tuned = rates_report(&SystemParams { omega_dp: opt.omega_dp, ..p });
    let ratio = tuned.get("gamma_prime_S_T0").unwrap().value / tuned.get("gamma_prime_T0_S").unwrap().value;
    assert!(ratio > 1e3, "{ratio}");
    let backward = tuned.get("backward_ratio").unwrap();
    assert!(backward.error.is_none() && backward.value >= 0.0 && backward.value < 1.0);
}

fn oqs(dir: &Path, args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_oqs")).current_dir(dir).args(args).output().unwrap()
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ok = oqs(dir.path(), &["validate"]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));
    let json: serde_json::Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert!(json.get("params").is_some());

    let bad = oqs(dir.path(), &["--set", "kappa=-1", "validate"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("kappa"));

    let missing = oqs(dir.path(), &["--config", "nope.cfg", "validate"]);
    assert_eq!(missing.status.code(), Some(1));

    let unknown = oqs(dir.path(), &["experiment", "fig9"]);
    assert_eq!(unknown.status.code(), Some(1));
}

#[test]
fn rates_and_steady_write_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let set = ["--set", "n_max=2", "--set", "eps_dp=0.005", "--set", "omega_dp=6.098", "--out", "o"];
    let r = oqs(dir.path(), &[&set[..], &["rates"]].concat());
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    assert!(dir.path().join("o/rates.csv").exists());
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("o/rates.json")).unwrap()).unwrap();
    assert!(json["provenance"]["version"].is_string());

    let s = oqs(dir.path(), &[&set[..], &["steady"]].concat());
    assert_eq!(s.status.code(), Some(0), "{}", String::from_utf8_lossy(&s.stderr));
    assert!(dir.path().join("o/steady.json").exists());
}

#[test]
fn sweep_command_is_byte_identical_across_workers() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "s.cfg",
        "n_max = 2\neps_dp = 0.005\nomega_dp = 6.098\nsweep.axis1 = omega_d, 6.452, 6.458, 5\n",
    );
    let cfg = cfg.to_str().unwrap();
    for (out, workers) in [("a", "1"), ("b", "3")] {
        let o = oqs(dir.path(), &["--config", cfg, "--workers", workers, "--out", out, "sweep"]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let a = std::fs::read(dir.path().join("a/sweep.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b/sweep.csv")).unwrap();
    assert_eq!(a, b);
}

mod properties {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(6))]

        /// Any small grid gives the same bytes for any worker count, and
        /// converged rows stay physical.
        #[test]
        fn sweeps_are_worker_invariant(
            lo in 6.44..6.46f64, width in 1e-4..1e-2f64, n in 2usize..5, epsp in 0.0..0.02f64, workers in 2usize..5,
        ) {
            let p = SystemParams { eps_d: 0.1, eps_dp: epsp, omega_dp: 6.098, n_max_sym: 1, n_max_asym: 1, ..Default::default() };
            let spec = SweepSpec { axis1: Axis::new("omega_d", lo, lo + width, n), axis2: None, outputs: Output::ALL.to_vec() };
            prop_assert_eq!(csv_bytes(&p, &spec, 1), csv_bytes(&p, &spec, workers));
            for r in run_sweep(&p, BellState::T0, &spec, &TdSettings::default(), workers).iter().filter(|r| r.converged) {
                for b in BellState::ALL {
                    prop_assert!((0.0..=1.0).contains(&r.fidelity(b)));
                }
                prop_assert!(r.residual < 1e-8);
            }
        }
    }
}
