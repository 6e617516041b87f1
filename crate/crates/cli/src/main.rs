use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use oqs_cli::config::{load_config_with, params_json, ConfigError, RunConfig};
use oqs_cli::experiment::{run_experiment, Preset};
use oqs_cli::output::{fmt_sci, version_string, write_file, Summary};
use oqs_cli::report::rates_report;
use oqs_cli::sweep::{argmax, run_sweep, write_csv, TdSettings};
use oqs_core::liouville::liouvillian_provider;
use oqs_core::solve::{evolve, fidelity, initial_state, observables, EvolveOptions, Observables};
use serde_json::json;

const EXIT_CONFIG: u8 = 1;
const EXIT_SOLVER: u8 = 2;
const EXIT_THRESHOLD: u8 = 3;

#[derive(Parser)]
#[command(name = "oqs", version = env!("CARGO_PKG_VERSION"), about = "Driven-dissipative Bell-state stabilization")]
struct Cli {
    /// Flat `key = value` configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for result files.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads for sweeps (overrides `sweep.workers`).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// `key=value` override applied after the config file; repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the configuration and print derived quantities.
    Validate,
    /// Analytic rates, optimal drive frequencies and backward ratio.
    Rates,
    /// Steady state of the time-independent model.
    Steady,
    /// Time evolution from a Bell state; writes the trajectory.
    Evolve,
    /// Parameter sweep given by the `sweep.*` keys.
    Sweep,
    /// Figure preset: fig3, fig4, fig5 or fig6.
    Experiment { name: String },
}

enum Failure {
    Config(String),
    Solver(String),
    Threshold,
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

fn io_err(e: std::io::Error) -> Failure {
    Failure::Solver(format!("writing output: {e}"))
}

fn json_bytes(v: &serde_json::Value) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s.into_bytes()
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Solver(msg)) => {
            eprintln!("solver failure: {msg}");
            ExitCode::from(EXIT_SOLVER)
        }
        Err(Failure::Threshold) => ExitCode::from(EXIT_THRESHOLD),
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let mut cfg = load_config_with(cli.config.as_deref(), &cli.set)?;
    if let Some(w) = cli.workers {
        if w == 0 {
            return Err(Failure::Config("--workers must be >= 1".into()));
        }
        cfg.workers = w;
    }
    for w in &cfg.warnings {
        log::warn!("{w}");
    }
    match &cli.command {
        Command::Validate => validate(&cfg),
        Command::Rates => rates(&cfg, &cli.out),
        Command::Steady => steady(&cfg, &cli.out),
        Command::Evolve => evolve_cmd(&cfg, &cli.out),
        Command::Sweep => sweep(&cfg, &cli.out),
        Command::Experiment { name } => {
            let preset: Preset = name.parse().map_err(Failure::Config)?;
            experiment(preset, &cfg, &cli.out)
        }
    }
}

fn validate(cfg: &RunConfig) -> Result<(), Failure> {
    let d = oqs_core::model::derive(&cfg.params);
    let v = json!({
        "params": params_json(&cfg.params),
        "target": cfg.target.to_string(),
        "derived": {
            "delta": d.delta,
            "omega_c_plus": d.omega_c_plus,
            "omega_c_minus": d.omega_c_minus,
            "delta_split": d.delta_split,
            "n_bar_d": d.n_bar_d,
            "n_bar_dp": d.n_bar_dp,
            "omega_r": d.omega_r,
            "delta_q": d.delta_q,
        },
        "sweep_points": cfg.sweep.as_ref().map(|s| s.points().len()),
        "warnings": cfg.warnings,
        "version": version_string(),
    });
    print!("{}", String::from_utf8(json_bytes(&v)).expect("utf-8"));
    Ok(())
}

fn rates(cfg: &RunConfig, out: &Path) -> Result<(), Failure> {
    let r = rates_report(&cfg.params);
    let mut csv = Vec::new();
    r.write_csv(&mut csv).map_err(|e| Failure::Solver(e.to_string()))?;
    write_file(out, "rates.csv", &csv).map_err(io_err)?;
    let path = write_file(out, "rates.json", &json_bytes(&r.to_json())).map_err(io_err)?;
    for e in &r.entries {
        match &e.error {
            None => println!("{:<28} {:>18} {}", e.name, fmt_sci(e.value), e.unit),
            Some(err) => println!("{:<28} {:>18} ({err})", e.name, "-"),
        }
    }
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn observables_json(o: &Observables) -> serde_json::Value {
    json!({
        "P_Tm": o.p_t_minus, "P_T0": o.p_t0, "P_S": o.p_s, "P_Tp": o.p_t_plus,
        "n_sym": o.n_sym, "n_asym": o.n_asym, "trace": o.trace,
    })
}

fn steady(cfg: &RunConfig, out: &Path) -> Result<(), Failure> {
    let r = oqs_core::steady_state_for(&cfg.params).map_err(|e| match e {
        oqs_core::Error::Unsupported(m) => Failure::Config(m),
        e => Failure::Solver(e.to_string()),
    })?;
    let o = observables(&r.rho);
    let v = json!({
        "params": params_json(&cfg.params),
        "F_T0": fidelity(&r.rho, oqs_core::algebra::BellState::T0),
        "F_S": fidelity(&r.rho, oqs_core::algebra::BellState::S),
        "observables": observables_json(&o),
        "residual": r.residual,
        "scaled_residual": r.scaled_residual,
        "method": r.method.as_str(),
        "converged": r.converged(),
        "warnings": cfg.warnings,
        "provenance": { "version": version_string(), "config": cfg.echo },
    });
    write_file(out, "steady.json", &json_bytes(&v)).map_err(io_err)?;
    print!("{}", String::from_utf8(json_bytes(&v)).expect("utf-8"));
    if r.converged() {
        Ok(())
    } else {
        Err(Failure::Solver(format!("steady state not converged (scaled residual {:e})", r.scaled_residual)))
    }
}

fn evolve_cmd(cfg: &RunConfig, out: &Path) -> Result<(), Failure> {
    let p = &cfg.params;
    let t_end = cfg.td.t_end_for(p, cfg.target);
    let prov = liouvillian_provider(p).map_err(|e| Failure::Config(e.to_string()))?;
    let rho0 = initial_state(p, cfg.td.initial).map_err(|e| Failure::Config(e.to_string()))?;
    let opts = EvolveOptions {
        rtol: cfg.td.rtol,
        atol: cfg.td.atol,
        output_grid: EvolveOptions::uniform_grid(t_end, 400),
        ..Default::default()
    };
    let traj = evolve(&prov, &rho0, t_end, &opts).map_err(|e| Failure::Solver(e.to_string()))?;
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let mut header = vec!["t_ns"];
    header.extend(Observables::NAMES);
    header.push("trace");
    let csv_err = |e: csv::Error| Failure::Solver(e.to_string());
    w.write_record(&header).map_err(csv_err)?;
    for (t, o) in traj.times.iter().zip(&traj.observables) {
        let mut rec = vec![fmt_sci(*t)];
        rec.extend(o.values().iter().map(|&x| fmt_sci(x)));
        rec.push(fmt_sci(o.trace));
        w.write_record(&rec).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Solver(e.to_string()))?;
    let path = write_file(out, "trajectory.csv", &bytes).map_err(io_err)?;
    let tail = traj.tail_average(t_end * (1.0 - cfg.td.tail));
    let v = json!({
        "params": params_json(p),
        "t_end_ns": t_end,
        "initial": cfg.td.initial.to_string(),
        "tail_average": tail.as_ref().map(observables_json),
        "trace_drift": traj.trace_drift,
        "steps_accepted": traj.steps_accepted,
        "steps_rejected": traj.steps_rejected,
        "provenance": { "version": version_string(), "config": cfg.echo },
    });
    write_file(out, "evolve.json", &json_bytes(&v)).map_err(io_err)?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn sweep(cfg: &RunConfig, out: &Path) -> Result<(), Failure> {
    let Some(spec) = &cfg.sweep else {
        return Err(Failure::Config("no sweep.axis1 given".into()));
    };
    let rows = run_sweep(&cfg.params, cfg.target, spec, &cfg.td, cfg.workers);
    let mut csv = Vec::new();
    write_csv(&mut csv, &spec.axis_keys(), &spec.outputs, &rows).map_err(|e| Failure::Solver(e.to_string()))?;
    let path = write_file(out, "sweep.csv", &csv).map_err(io_err)?;
    let mut s = Summary { warnings: cfg.warnings.clone(), config_echo: cfg.echo.clone(), ..Default::default() };
    s.setting("params", params_json(&cfg.params));
    s.setting("td", td_json(&cfg.td));
    s.setting("points", rows.len());
    for &o in &spec.outputs {
        if let Some(i) = argmax(&rows, o) {
            let at: serde_json::Map<_, _> =
                spec.axis_keys().into_iter().zip(rows[i].coords.iter().map(|&x| json!(x))).collect();
            s.peak(o.name(), o.of(&rows[i]), at.into());
        }
    }
    let unconverged = rows.iter().filter(|r| !r.converged).count();
    if unconverged > 0 {
        s.warnings.push(format!("{unconverged} of {} points not converged", rows.len()));
    }
    write_file(out, "sweep_summary.json", &json_bytes(&s.to_json())).map_err(io_err)?;
    eprintln!("wrote {}", path.display());
    if unconverged == rows.len() {
        return Err(Failure::Solver("no grid point converged".into()));
    }
    Ok(())
}

fn td_json(td: &TdSettings) -> serde_json::Value {
    json!({
        "t_end": td.t_end, "rtol": td.rtol, "atol": td.atol, "tail": td.tail,
        "drift_tol": td.drift_tol, "initial": td.initial.to_string(),
    })
}

fn experiment(preset: Preset, cfg: &RunConfig, out: &Path) -> Result<(), Failure> {
    let res = run_experiment(preset, cfg);
    for (name, bytes) in &res.tables {
        write_file(out, &format!("{name}.csv"), bytes).map_err(io_err)?;
    }
    let path = write_file(out, &format!("{preset}_summary.json"), &json_bytes(&res.summary.to_json())).map_err(io_err)?;
    for c in &res.summary.checks {
        println!("{} {}: {} (threshold {})", if c.pass { "PASS" } else { "FAIL" }, c.name, c.value, c.threshold);
    }
    eprintln!("wrote {}", path.display());
    if res.summary.all_pass() {
        Ok(())
    } else {
        Err(Failure::Threshold)
    }
}
