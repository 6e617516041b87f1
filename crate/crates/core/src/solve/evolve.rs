//! Dormand–Prince 5(4) integration of `vec(ρ)' = L(t) vec(ρ)` with
//! Hairer-style step control and fifth-order dense output.

use num_complex::Complex64 as C64;

use crate::algebra::DensityMatrix;
use crate::liouville::{FusedGenerator, LiouvillianProvider};

use super::symmetry::{EvenSector, SignedPermutation};
use super::observables::{has_canonical_factors, observables, Observables};
use super::SolveError;

/// Stored states must pass validation at this tolerance.
pub const TRAJECTORY_TOL: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct EvolveOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Output times (ns), strictly increasing, within `(0, t_end]`. The
    /// initial time 0 is always recorded.
    pub output_grid: Vec<f64>,
    /// Keep the full density matrices, not only the observables.
    pub store_full: bool,
    /// First trial step (ns); chosen automatically when `None`.
    pub h_init: Option<f64>,
    pub max_steps: usize,
    /// Check positivity of every recorded state.
    pub check_positivity: bool,
    /// Integrate in the even exchange-parity sector when both the generator
    /// and the initial state allow it.
    pub use_symmetry: bool,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions {
            rtol: 1e-8,
            atol: 1e-10,
            output_grid: Vec::new(),
            store_full: false,
            h_init: None,
            max_steps: 50_000_000,
            check_positivity: false,
            use_symmetry: true,
        }
    }
}

impl EvolveOptions {
    /// `n` evenly spaced output points ending at `t_end`.
    pub fn uniform_grid(t_end: f64, n: usize) -> Vec<f64> {
        (1..=n).map(|k| t_end * k as f64 / n as f64).collect()
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// Present when `store_full` was requested.
    pub states: Option<Vec<DensityMatrix>>,
    /// Empty unless the state lives on the canonical layout.
    pub observables: Vec<Observables>,
    /// `max |tr ρ − 1|` over the recorded states; reported, not corrected.
    pub trace_drift: f64,
    pub steps_accepted: usize,
    pub steps_rejected: usize,
}

impl Trajectory {
    pub fn series(&self, f: impl Fn(&Observables) -> f64) -> Vec<f64> {
        self.observables.iter().map(f).collect()
    }

    pub fn last(&self) -> Option<&Observables> {
        self.observables.last()
    }

    /// Observables averaged over the records with `t ≥ t_from`.
    pub fn tail_average(&self, t_from: f64) -> Option<Observables> {
        let tail: Vec<&Observables> = self
            .times
            .iter()
            .zip(&self.observables)
            .filter(|(t, _)| **t >= t_from)
            .map(|(_, o)| o)
            .collect();
        Observables::mean(&tail)
    }
}

// Dormand–Prince tableau
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
// dense output
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const BETA: f64 = 0.04;

fn axpy_into(out: &mut [C64], y: &[C64], h: f64, terms: &[(f64, &[C64])]) {
    for i in 0..out.len() {
        let mut acc = C64::new(0.0, 0.0);
        for &(a, k) in terms {
            acc += k[i] * a;
        }
        out[i] = y[i] + acc * h;
    }
}

fn err_norm(err: &[C64], y: &[C64], y1: &[C64], rtol: f64, atol: f64) -> f64 {
    let mut s = 0.0;
    for i in 0..err.len() {
        let sc = atol + rtol * y[i].norm().max(y1[i].norm());
        s += (err[i].norm() / sc).powi(2);
    }
    (s / err.len() as f64).sqrt()
}

/// Integrates from `t = 0` to the last grid time (or `t_end`).
pub fn evolve(
    provider: &LiouvillianProvider,
    rho0: &DensityMatrix,
    t_end: f64,
    opts: &EvolveOptions,
) -> Result<Trajectory, SolveError> {
    if t_end.is_nan() || t_end <= 0.0 {
        return Err(SolveError::InvalidInput(format!("t_end must be positive, got {t_end}")));
    }
    if rho0.layout() != provider.layout() {
        return Err(SolveError::InvalidInput("initial state and generator layouts differ".into()));
    }
    rho0.validate(TRAJECTORY_TOL, opts.check_positivity)?;
    let grid: Vec<f64> = if opts.output_grid.is_empty() { vec![t_end] } else { opts.output_grid.clone() };
    if grid.windows(2).any(|w| w[1] <= w[0]) || grid[0] <= 0.0 || *grid.last().unwrap() > t_end * (1.0 + 1e-12) {
        return Err(SolveError::InvalidInput("output grid must be strictly increasing within (0, t_end]".into()));
    }
    let t_end = *grid.last().unwrap();
    let layout = rho0.layout().clone();
    let canonical = has_canonical_factors(&layout);

    let mut traj = Trajectory {
        times: vec![0.0],
        states: opts.store_full.then(|| vec![rho0.clone()]),
        observables: if canonical { vec![observables(rho0)] } else { Vec::new() },
        trace_drift: (rho0.trace().re - 1.0).abs(),
        steps_accepted: 0,
        steps_rejected: 0,
    };
    let y_full = rho0.to_vec();
    let sector = if opts.use_symmetry { invariant_sector(provider, &y_full) } else { None };
    let gen: FusedGenerator = match &sector {
        Some(sec) => provider.fused(|m| sec.reduce(m)),
        None => provider.fused(|m| m.clone()),
    };
    let record = |t: f64, v: &[C64], traj: &mut Trajectory| -> Result<(), SolveError> {
        let rho = match &sector {
            Some(sec) => DensityMatrix::from_vec(layout.clone(), &sec.lift(v))?,
            None => DensityMatrix::from_vec(layout.clone(), v)?,
        };
        let drift = (rho.trace() - 1.0).norm();
        traj.trace_drift = traj.trace_drift.max(drift);
        rho.validate(TRAJECTORY_TOL, opts.check_positivity).map_err(|e| SolveError::Validation { t, reason: e.to_string() })?;
        traj.times.push(t);
        if canonical {
            traj.observables.push(observables(&rho));
        }
        if let Some(states) = traj.states.as_mut() {
            states.push(rho);
        }
        Ok(())
    };

    let zero = C64::new(0.0, 0.0);
    let n = gen.dim();
    let mut y = match &sector {
        Some(sec) => sec.project(&y_full),
        None => y_full,
    };
    let mut k: [Vec<C64>; 7] = std::array::from_fn(|_| vec![zero; n]);
    let mut ytmp = vec![zero; n];
    let mut y1 = vec![zero; n];
    let mut err = vec![zero; n];
    let mut t = 0.0;
    gen.apply_into(t, &y, &mut k[0]);

    let mut h = match opts.h_init {
        Some(h) => h,
        None => initial_step(&gen, &y, &k[0], opts),
    }
    .min(t_end);
    let mut next_out = 0;
    let mut fac_old: f64 = 1e-4;
    let mut last_rejected = false;

    while next_out < grid.len() {
        if traj.steps_accepted + traj.steps_rejected >= opts.max_steps {
            return Err(SolveError::TooManySteps { t, steps: opts.max_steps });
        }
        if t + h > t_end {
            h = t_end - t;
        }
        if h <= 16.0 * f64::EPSILON * t.abs().max(1.0) {
            return Err(SolveError::StepUnderflow { t, h });
        }
        {
            let [k1, k2, k3, k4, k5, k6, k7] = &mut k;
            axpy_into(&mut ytmp, &y, h, &[(A21, k1)]);
            gen.apply_into(t + C2 * h, &ytmp, k2);
            axpy_into(&mut ytmp, &y, h, &[(A31, k1), (A32, k2)]);
            gen.apply_into(t + C3 * h, &ytmp, k3);
            axpy_into(&mut ytmp, &y, h, &[(A41, k1), (A42, k2), (A43, k3)]);
            gen.apply_into(t + C4 * h, &ytmp, k4);
            axpy_into(&mut ytmp, &y, h, &[(A51, k1), (A52, k2), (A53, k3), (A54, k4)]);
            gen.apply_into(t + C5 * h, &ytmp, k5);
            axpy_into(&mut ytmp, &y, h, &[(A61, k1), (A62, k2), (A63, k3), (A64, k4), (A65, k5)]);
            gen.apply_into(t + h, &ytmp, k6);
            axpy_into(&mut y1, &y, h, &[(A71, k1), (A73, k3), (A74, k4), (A75, k5), (A76, k6)]);
            gen.apply_into(t + h, &y1, k7);
            for i in 0..n {
                err[i] = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * h;
            }
        }
        let e = err_norm(&err, &y, &y1, opts.rtol, opts.atol);
        if !e.is_finite() {
            return Err(SolveError::StepUnderflow { t, h });
        }
        // Lund stabilization, as in Hairer's DOPRI5
        let fac11 = e.powf(0.2 - BETA * 0.75);
        let fac = (fac11 / fac_old.powf(BETA) / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
        if e <= 1.0 {
            fac_old = e.max(1e-4);
            let t_new = t + h;
            while next_out < grid.len() && grid[next_out] <= t_new * (1.0 + 1e-14) {
                let theta = ((grid[next_out] - t) / h).clamp(0.0, 1.0);
                let v = dense_output(&y, &y1, &k, h, theta);
                record(grid[next_out], &v, &mut traj)?;
                next_out += 1;
            }
            std::mem::swap(&mut y, &mut y1);
            let (first, rest) = k.split_at_mut(1);
            std::mem::swap(&mut first[0], &mut rest[5]);
            t = t_new;
            traj.steps_accepted += 1;
            let mut h_new = h / fac;
            if last_rejected {
                h_new = h_new.min(h);
            }
            last_rejected = false;
            h = h_new;
        } else {
            h /= (fac11 / SAFETY).min(1.0 / FAC_MIN);
            traj.steps_rejected += 1;
            last_rejected = true;
        }
    }
    if traj.trace_drift > TRAJECTORY_TOL {
        log::warn!("trace drift {:.3e} exceeds {TRAJECTORY_TOL:e}", traj.trace_drift);
    }
    Ok(traj)
}

fn invariant_sector(provider: &LiouvillianProvider, y0: &[C64]) -> Option<EvenSector> {
    let sec = EvenSector::new(&SignedPermutation::exchange_parity(provider.layout()).ok()?);
    let ok = sec.contains(y0, 1e-14) && provider.pieces().iter().all(|p| sec.is_invariant(p.matrix(), 1e-12));
    ok.then_some(sec)
}

fn dense_output(y: &[C64], y1: &[C64], k: &[Vec<C64>; 7], h: f64, theta: f64) -> Vec<C64> {
    let th1 = 1.0 - theta;
    (0..y.len())
        .map(|i| {
            let ydiff = y1[i] - y[i];
            let bspl = k[0][i] * h - ydiff;
            let r4 = ydiff - k[6][i] * h - bspl;
            let r5 = (k[0][i] * D1 + k[2][i] * D3 + k[3][i] * D4 + k[4][i] * D5 + k[5][i] * D6 + k[6][i] * D7) * h;
            y[i] + (ydiff + (bspl + (r4 + r5 * th1) * theta) * th1) * theta
        })
        .collect()
}

/// Hairer's starting-step heuristic.
fn initial_step(gen: &FusedGenerator, y: &[C64], f0: &[C64], opts: &EvolveOptions) -> f64 {
    let sc: Vec<f64> = y.iter().map(|v| opts.atol + opts.rtol * v.norm()).collect();
    let rms = |v: &[C64]| (v.iter().zip(&sc).map(|(a, s)| (a.norm() / s).powi(2)).sum::<f64>() / v.len() as f64).sqrt();
    let d0 = rms(y);
    let d1 = rms(f0);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let y1: Vec<C64> = y.iter().zip(f0).map(|(a, b)| a + b * h0).collect();
    let mut f1 = vec![C64::new(0.0, 0.0); y.len()];
    gen.apply_into(h0, &y1, &mut f1);
    let df: Vec<C64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
    let d2 = rms(&df) / h0;
    let h1 = if d1.max(d2) <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / d1.max(d2)).powf(0.2) };
    (100.0 * h0).min(h1)
}

/// Whether the trajectory has stopped changing: `max|ρ_k − ρ_{k−1}| / Δt`
/// stays below `tol` (per ns) over `windows` consecutive records. Returns
/// the time at which the first such window closes. Needs stored states.
pub fn steady_detect(traj: &Trajectory, tol: f64, windows: usize) -> Option<(bool, f64)> {
    let states = traj.states.as_ref()?;
    let mut run = 0;
    for k in 1..states.len() {
        let dt = traj.times[k] - traj.times[k - 1];
        let rate = states[k].max_abs_diff(&states[k - 1]) / dt;
        if rate < tol {
            run += 1;
            if run >= windows {
                return Some((true, traj.times[k]));
            }
        } else {
            run = 0;
        }
    }
    Some((false, *traj.times.last().unwrap()))
}

/// Default tolerance of [`steady_detect`], per ns.
pub const STEADY_DETECT_TOL: f64 = 1e-9;
pub const STEADY_DETECT_WINDOWS: usize = 3;
