//! Parameter grids evaluated point by point, in parallel, with rows kept in
//! grid order.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use oqs_core::algebra::BellState;
use oqs_core::liouville::liouvillian_provider;
use oqs_core::model::{Representation, SystemParams, TWO_PI};
use oqs_core::rates::{fgr_rate, optimal_frequencies, Scheme};
use oqs_core::solve::{evolve, fidelity, initial_state, observables, EvolveOptions, Observables};
use rayon::prelude::*;

use crate::config::{get_real, set_real, ConfigError, REAL_KEYS};
use crate::output::fmt_sci;

/// One swept parameter: `count` evenly spaced values from `start` to `stop`.
#[derive(Clone, Debug, PartialEq)]
pub struct Axis {
    pub key: String,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(key: &str, start: f64, stop: f64, count: usize) -> Self {
        Axis { key: key.to_string(), start, stop, count }
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.count - 1;
        (0..self.count)
            .map(|k| if k == n { self.stop } else { self.start + (self.stop - self.start) * k as f64 / n as f64 })
            .collect()
    }

    fn validate(&self) -> Result<(), ConfigError> {
        if !REAL_KEYS.contains(&self.key.as_str()) {
            return Err(ConfigError::Sweep(format!("{:?} is not a real-valued parameter", self.key)));
        }
        if self.count < 2 {
            return Err(ConfigError::Sweep(format!("axis {} needs at least 2 points", self.key)));
        }
        if self.start == self.stop {
            return Err(ConfigError::Sweep(format!("axis {} has zero width", self.key)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Output {
    FT0,
    FS,
    PTm,
    PTp,
    NSym,
    NAsym,
}

impl Output {
    pub const ALL: [Output; 6] = [Output::FT0, Output::FS, Output::PTm, Output::PTp, Output::NSym, Output::NAsym];

    pub fn name(self) -> &'static str {
        match self {
            Output::FT0 => "F_T0",
            Output::FS => "F_S",
            Output::PTm => "P_Tm",
            Output::PTp => "P_Tp",
            Output::NSym => "n_sym",
            Output::NAsym => "n_asym",
        }
    }

    pub fn of(self, row: &ResultRow) -> f64 {
        match self {
            Output::FT0 => row.f_t0,
            Output::FS => row.f_s,
            Output::PTm => row.p_tm,
            Output::PTp => row.p_tp,
            Output::NSym => row.n_sym,
            Output::NAsym => row.n_asym,
        }
    }

    pub fn fidelity_of(b: BellState) -> Output {
        match b {
            BellState::S => Output::FS,
            _ => Output::FT0,
        }
    }
}

impl fmt::Display for Output {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Output {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Output::ALL
            .into_iter()
            .find(|o| o.name() == s)
            .ok_or_else(|| format!("unknown output {s:?}; expected one of F_T0, F_S, P_Tm, P_Tp, n_sym, n_asym"))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub axis1: Axis,
    pub axis2: Option<Axis>,
    pub outputs: Vec<Output>,
}

impl SweepSpec {
    pub fn one(axis: Axis) -> Self {
        SweepSpec { axis1: axis, axis2: None, outputs: Output::ALL.to_vec() }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.axis1.validate()?;
        if let Some(a2) = &self.axis2 {
            a2.validate()?;
            if a2.key == self.axis1.key {
                return Err(ConfigError::Sweep(format!("both axes sweep {}", a2.key)));
            }
        }
        if self.outputs.is_empty() {
            return Err(ConfigError::Sweep("no outputs selected".into()));
        }
        Ok(())
    }

    pub fn axis_keys(&self) -> Vec<String> {
        std::iter::once(self.axis1.key.clone()).chain(self.axis2.iter().map(|a| a.key.clone())).collect()
    }

    /// Grid coordinates in row order: `axis1` outer, `axis2` inner.
    pub fn points(&self) -> Vec<Vec<f64>> {
        let v1 = self.axis1.values();
        match &self.axis2 {
            None => v1.into_iter().map(|x| vec![x]).collect(),
            Some(a2) => {
                let v2 = a2.values();
                v1.iter().flat_map(|&x| v2.iter().map(move |&y| vec![x, y])).collect()
            }
        }
    }
}

/// Settings for grid points evaluated by time evolution.
#[derive(Clone, Debug, PartialEq)]
pub struct TdSettings {
    /// Integration time in ns; by default ten times the inverse of the
    /// analytic peak pumping rate (see [`TdSettings::t_end_for`]).
    pub t_end: Option<f64>,
    pub rtol: f64,
    pub atol: f64,
    /// Fraction of the run at the end over which observables are averaged.
    pub tail: f64,
    /// Largest accepted change of the target fidelity between the last two
    /// tail windows.
    pub drift_tol: f64,
    pub initial: BellState,
}

impl Default for TdSettings {
    fn default() -> Self {
        TdSettings { t_end: None, rtol: 1e-6, atol: 1e-8, tail: 0.2, drift_tol: 1e-2, initial: BellState::TMinus }
    }
}

/// Bounds on the automatic integration time (ns).
pub const T_END_MIN: f64 = 1e3;
pub const T_END_MAX: f64 = 2e4;
/// Output samples per run.
const TD_SAMPLES: usize = 400;

impl TdSettings {
    pub(crate) fn validate(&self) -> Result<(), ConfigError> {
        let bad = |key: &str, reason: &str| ConfigError::Sweep(format!("{key}: {reason}"));
        if matches!(self.t_end, Some(t) if t <= 0.0) {
            return Err(bad("t_end", "must be > 0"));
        }
        if !(self.rtol > 0.0 && self.atol > 0.0) {
            return Err(bad("rtol/atol", "must be > 0"));
        }
        if !(self.tail > 0.0 && self.tail <= 0.5) {
            return Err(bad("tail", "must lie in (0, 0.5]"));
        }
        Ok(())
    }

    /// `10 / (2π (Γ_pump + γ))` with `Γ_pump` the analytic rate out of `T₋`
    /// at the optimal first-drive frequency, clamped to
    /// `[T_END_MIN, T_END_MAX]`. The same for every point of a sweep over
    /// `ω_d`.
    pub fn t_end_for(&self, p: &SystemParams, target: BellState) -> f64 {
        if let Some(t) = self.t_end {
            return t;
        }
        let pump = optimal_frequencies(target, Scheme::Direct, p).and_then(|o| {
            let q = SystemParams { omega_d: o.omega_d, ..p.clone() };
            fgr_rate(BellState::TMinus, target, &q)
        });
        match pump {
            Ok(rate) if rate + p.gamma > 0.0 => (10.0 / (TWO_PI * (rate + p.gamma))).clamp(T_END_MIN, T_END_MAX),
            _ => T_END_MAX,
        }
    }
}

/// Observables at one grid point.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub coords: Vec<f64>,
    pub f_t0: f64,
    pub f_s: f64,
    pub p_tm: f64,
    pub p_tp: f64,
    pub n_sym: f64,
    pub n_asym: f64,
    /// Steady solves: scaled residual `‖Lρ‖/max|L|`. Time evolution: change
    /// of the target fidelity between the last two averaging windows.
    pub residual: f64,
    pub converged: bool,
    pub error: Option<String>,
}

impl ResultRow {
    fn from_observables(o: &Observables, residual: f64, converged: bool) -> Self {
        ResultRow {
            coords: Vec::new(),
            f_t0: o.p_t0.clamp(0.0, 1.0),
            f_s: o.p_s.clamp(0.0, 1.0),
            p_tm: o.p_t_minus,
            p_tp: o.p_t_plus,
            n_sym: o.n_sym,
            n_asym: o.n_asym,
            residual,
            converged,
            error: None,
        }
    }

    pub fn failed(msg: String) -> Self {
        ResultRow {
            coords: Vec::new(),
            f_t0: f64::NAN,
            f_s: f64::NAN,
            p_tm: f64::NAN,
            p_tp: f64::NAN,
            n_sym: f64::NAN,
            n_asym: f64::NAN,
            residual: f64::NAN,
            converged: false,
            error: Some(msg),
        }
    }

    pub fn fidelity(&self, b: BellState) -> f64 {
        Output::fidelity_of(b).of(self)
    }
}

/// Steady state for `time_independent`, otherwise time evolution with the
/// tail average taken as the stationary value. Failures become rows.
pub fn evaluate(p: &SystemParams, target: BellState, td: &TdSettings) -> ResultRow {
    let run = || -> Result<ResultRow, oqs_core::Error> {
        p.validate()?;
        if p.representation == Representation::TimeIndependent {
            let r = oqs_core::steady_state_for(p)?;
            let mut row = ResultRow::from_observables(&observables(&r.rho), r.scaled_residual, r.converged());
            row.f_t0 = fidelity(&r.rho, BellState::T0);
            row.f_s = fidelity(&r.rho, BellState::S);
            Ok(row)
        } else {
            evaluate_td(p, target, td)
        }
    };
    run().unwrap_or_else(|e| ResultRow::failed(e.to_string()))
}

fn evaluate_td(p: &SystemParams, target: BellState, td: &TdSettings) -> Result<ResultRow, oqs_core::Error> {
    let t_end = td.t_end_for(p, target);
    let prov = liouvillian_provider(p)?;
    let rho0 = initial_state(p, td.initial)?;
    let opts = EvolveOptions {
        rtol: td.rtol,
        atol: td.atol,
        output_grid: EvolveOptions::uniform_grid(t_end, TD_SAMPLES),
        ..Default::default()
    };
    let traj = evolve(&prov, &rho0, t_end, &opts)?;
    let window = td.tail * t_end;
    let last = traj.tail_average(t_end - window).expect("samples in the tail");
    let window_mean = |from: f64, to: f64| {
        let v: Vec<f64> = traj
            .times
            .iter()
            .zip(&traj.observables)
            .filter(|(t, _)| **t >= from && **t < to)
            .map(|(_, o)| o.population(target))
            .collect();
        v.iter().sum::<f64>() / v.len().max(1) as f64
    };
    let drift = (last.population(target) - window_mean(t_end - 2.0 * window, t_end - window)).abs();
    let converged = drift <= td.drift_tol && traj.trace_drift < oqs_core::solve::TRAJECTORY_TOL;
    Ok(ResultRow::from_observables(&last, drift, converged))
}

/// Evaluates every grid point of `spec` around `base` with `workers`
/// threads. Rows come back in [`SweepSpec::points`] order whatever the
/// scheduling.
pub fn run_sweep(base: &SystemParams, target: BellState, spec: &SweepSpec, td: &TdSettings, workers: usize) -> Vec<ResultRow> {
    let keys = spec.axis_keys();
    let points = spec.points();
    let eval = |coords: &Vec<f64>| {
        let mut p = base.clone();
        for (k, &v) in keys.iter().zip(coords) {
            set_real(&mut p, k, v).expect("axis keys validated");
        }
        let mut row = evaluate(&p, target, td);
        row.coords = coords.clone();
        log::debug!("{keys:?} = {coords:?}: F_T0 = {:.4}, F_S = {:.4}", row.f_t0, row.f_s);
        row
    };
    match rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build() {
        Ok(pool) => pool.install(|| points.par_iter().map(eval).collect()),
        Err(e) => {
            log::warn!("thread pool unavailable ({e}); running serially");
            points.iter().map(eval).collect()
        }
    }
}

/// Index of the converged row maximizing `out`.
pub fn argmax(rows: &[ResultRow], out: Output) -> Option<usize> {
    rows.iter()
        .enumerate()
        .filter(|(_, r)| r.converged && out.of(r).is_finite())
        .max_by(|a, b| out.of(a.1).total_cmp(&out.of(b.1)))
        .map(|(i, _)| i)
}

/// CSV with the swept columns, the selected outputs, `residual`,
/// `converged` and `error`.
pub fn write_csv<W: Write>(w: W, axis_keys: &[String], outputs: &[Output], rows: &[ResultRow]) -> csv::Result<()> {
    let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
    let mut header: Vec<String> = axis_keys.to_vec();
    header.extend(outputs.iter().map(|o| o.name().to_string()));
    header.extend(["residual", "converged", "error"].map(String::from));
    out.write_record(&header)?;
    for r in rows {
        let mut rec: Vec<String> = r.coords.iter().map(|&x| fmt_sci(x)).collect();
        rec.extend(outputs.iter().map(|o| fmt_sci(o.of(r))));
        rec.push(fmt_sci(r.residual));
        rec.push(r.converged.to_string());
        rec.push(r.error.clone().unwrap_or_default());
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}

/// Base parameters with `key` set, for callers building grids by hand.
pub fn with_real(p: &SystemParams, key: &str, v: f64) -> SystemParams {
    let mut q = p.clone();
    set_real(&mut q, key, v).expect("known parameter key");
    debug_assert_eq!(get_real(&q, key), Some(v));
    q
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_values_hit_endpoints() {
        let a = Axis::new("omega_d", 6.40, 6.50, 101);
        let v = a.values();
        assert_eq!(v.len(), 101);
        assert_eq!(v[0], 6.40);
        assert_eq!(v[100], 6.50);
        assert!((v[50] - 6.45).abs() < 1e-15);
    }

    #[test]
    fn grid_order_is_axis1_major() {
        let s = SweepSpec {
            axis1: Axis::new("eps_dp", 0.0, 1.0, 2),
            axis2: Some(Axis::new("omega_dp", 5.0, 6.0, 3)),
            outputs: Output::ALL.to_vec(),
        };
        assert_eq!(s.points(), vec![
            vec![0.0, 5.0],
            vec![0.0, 5.5],
            vec![0.0, 6.0],
            vec![1.0, 5.0],
            vec![1.0, 5.5],
            vec![1.0, 6.0],
        ]);
    }

    #[test]
    fn failed_point_is_recorded() {
        let p = SystemParams { kappa: -1.0, n_max_sym: 1, n_max_asym: 1, ..Default::default() };
        let row = evaluate(&p, BellState::T0, &TdSettings::default());
        assert!(!row.converged);
        assert!(row.error.unwrap().contains("kappa"));
        assert!(row.f_t0.is_nan());
    }

    #[test]
    fn csv_layout() {
        let mut row = ResultRow::failed("boom, with comma".into());
        row.coords = vec![6.4];
        let mut buf = Vec::new();
        write_csv(&mut buf, &["omega_d".into()], &[Output::FT0], &[row]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "omega_d,F_T0,residual,converged,error\n6.40000000000e0,NaN,NaN,false,\"boom, with comma\"\n");
    }
}
