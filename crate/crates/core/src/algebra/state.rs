use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use super::dense::hermitian_eigenvalues;
use super::layout::{QUBIT_1, QUBIT_2, SYMMETRIC_MODE};
use super::{AlgebraError, Operator, SpaceLayout};

/// Default tolerances for [`DensityMatrix::validate`].
pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const POSITIVITY_TOL: f64 = 1e-8;

/// Two-qubit triplet/singlet basis states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BellState {
    TMinus,
    T0,
    TPlus,
    S,
}

impl BellState {
    pub const ALL: [BellState; 4] = [BellState::TMinus, BellState::T0, BellState::S, BellState::TPlus];

    pub fn label(self) -> &'static str {
        match self {
            BellState::TMinus => "T-",
            BellState::T0 => "T0",
            BellState::TPlus => "T+",
            BellState::S => "S",
        }
    }
}

impl fmt::Display for BellState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for BellState {
    type Err = AlgebraError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "T-" | "Tm" | "t-" | "tm" | "T_minus" => Ok(BellState::TMinus),
            "T0" | "t0" => Ok(BellState::T0),
            "T+" | "Tp" | "t+" | "tp" | "T_plus" => Ok(BellState::TPlus),
            "S" | "s" => Ok(BellState::S),
            other => Err(AlgebraError::UnknownLabel(other.to_string())),
        }
    }
}

/// Amplitudes of a Bell-basis state on `(q1, q2)`, basis index `2*i1 + i2`
/// with `0 = up`, `1 = down`.
pub fn bell_state(which: BellState) -> Array1<C64> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let c = |re: f64| C64::new(re, 0.0);
    match which {
        BellState::TPlus => Array1::from(vec![c(1.0), c(0.0), c(0.0), c(0.0)]),
        BellState::T0 => Array1::from(vec![c(0.0), c(h), c(h), c(0.0)]),
        BellState::S => Array1::from(vec![c(0.0), c(h), c(-h), c(0.0)]),
        BellState::TMinus => Array1::from(vec![c(0.0), c(0.0), c(0.0), c(1.0)]),
    }
}

/// Result of checking the density-matrix axioms.
#[derive(Clone, Debug, PartialEq)]
pub struct Validation {
    pub hermiticity_defect: f64,
    pub trace_defect: f64,
    pub min_eigenvalue: Option<f64>,
}

/// Dense density matrix on a labeled layout.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    layout: Arc<SpaceLayout>,
    matrix: Array2<C64>,
}

impl DensityMatrix {
    /// Wraps a matrix without validating it.
    pub fn from_matrix(layout: Arc<SpaceLayout>, matrix: Array2<C64>) -> Result<Self, AlgebraError> {
        let d = layout.dim();
        if matrix.dim() != (d, d) {
            return Err(AlgebraError::DimensionMismatch { expected: d, found: matrix.nrows() });
        }
        Ok(DensityMatrix { layout, matrix })
    }

    /// `|psi><psi|` for a normalized `psi`.
    pub fn pure(layout: Arc<SpaceLayout>, psi: &Array1<C64>) -> Result<Self, AlgebraError> {
        let d = layout.dim();
        if psi.len() != d {
            return Err(AlgebraError::DimensionMismatch { expected: d, found: psi.len() });
        }
        let m = Array2::from_shape_fn((d, d), |(i, j)| psi[i] * psi[j].conj());
        Ok(DensityMatrix { layout, matrix: m })
    }

    pub fn maximally_mixed(layout: Arc<SpaceLayout>) -> Self {
        let d = layout.dim();
        let m = Array2::from_diag(&Array1::from_elem(d, C64::new(1.0 / d as f64, 0.0)));
        DensityMatrix { layout, matrix: m }
    }

    /// `(|q><q| ⊗ |0..0><0..0|)` on a layout whose first two factors are
    /// the qubits: a Bell-basis state with every other factor in its ground
    /// (vacuum) state.
    pub fn bell_with_vacuum(layout: Arc<SpaceLayout>, which: BellState) -> Result<Self, AlgebraError> {
        let rest = layout.dim() / 4;
        if layout.factors().len() < 2 || layout.factors()[0].dim != 2 || layout.factors()[1].dim != 2 {
            return Err(AlgebraError::UnknownLabel("qubit factors".into()));
        }
        let q = bell_state(which);
        let mut psi = Array1::zeros(layout.dim());
        for k in 0..4 {
            psi[k * rest] = q[k];
        }
        Self::pure(layout, &psi)
    }

    /// Bell state on the qubits, the truncated coherent state `|alpha>`
    /// (renormalized) on the symmetric mode and vacuum elsewhere.
    pub fn bell_with_coherent(layout: Arc<SpaceLayout>, which: BellState, alpha: C64) -> Result<Self, AlgebraError> {
        let pos = |l: &str| layout.position(l).ok_or_else(|| AlgebraError::UnknownLabel(l.to_string()));
        let (p1, p2, ps) = (pos(QUBIT_1)?, pos(QUBIT_2)?, pos(SYMMETRIC_MODE)?);
        let nmax = layout.factors()[ps].dim;
        let mut amp = Vec::with_capacity(nmax);
        let mut c = C64::new(1.0, 0.0);
        for n in 0..nmax {
            if n > 0 {
                c = c * alpha / (n as f64).sqrt();
            }
            amp.push(c);
        }
        let norm = amp.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let q = bell_state(which);
        let mut psi = Array1::zeros(layout.dim());
        for idx in 0..layout.dim() {
            let digits = layout.decompose(idx);
            let occupied = digits.iter().enumerate().any(|(k, &v)| k != p1 && k != p2 && k != ps && v != 0);
            if !occupied {
                psi[idx] = q[2 * digits[p1] + digits[p2]] * amp[digits[ps]] / norm;
            }
        }
        Self::pure(layout, &psi)
    }

    /// Column-stacked vector `vec(rho)[i + j*d] = rho[i, j]`.
    pub fn to_vec(&self) -> Vec<C64> {
        self.matrix.t().iter().copied().collect()
    }

    pub fn from_vec(layout: Arc<SpaceLayout>, v: &[C64]) -> Result<Self, AlgebraError> {
        let d = layout.dim();
        if v.len() != d * d {
            return Err(AlgebraError::DimensionMismatch { expected: d * d, found: v.len() });
        }
        let m = Array2::from_shape_fn((d, d), |(i, j)| v[i + j * d]);
        Ok(DensityMatrix { layout, matrix: m })
    }

    pub fn layout(&self) -> &Arc<SpaceLayout> {
        &self.layout
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> C64 {
        self.matrix.diag().sum()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in i..d {
                worst = worst.max((self.matrix[[i, j]] - self.matrix[[j, i]].conj()).norm());
            }
        }
        worst
    }

    /// `(rho + rho†)/2`, returning the Hermitized state and the defect removed.
    pub fn hermitized(&self) -> (Self, f64) {
        let defect = self.hermiticity_defect();
        let m = (&self.matrix + &self.matrix.t().mapv(|v| v.conj())).mapv(|v| v * 0.5);
        (DensityMatrix { layout: self.layout.clone(), matrix: m }, defect)
    }

    pub fn min_eigenvalue(&self) -> Result<f64, AlgebraError> {
        Ok(hermitian_eigenvalues(&self.matrix)?[0])
    }

    /// Measures the density-matrix axioms. Positivity is an eigen-solve and
    /// only evaluated when `check_positivity` is set.
    pub fn validation(&self, check_positivity: bool) -> Result<Validation, AlgebraError> {
        let min_eigenvalue = if check_positivity { Some(self.min_eigenvalue()?) } else { None };
        Ok(Validation {
            hermiticity_defect: self.hermiticity_defect(),
            trace_defect: (self.trace() - C64::new(1.0, 0.0)).norm(),
            min_eigenvalue,
        })
    }

    /// Fails if hermiticity or trace defect exceed `tol`, or (when
    /// requested) if the smallest eigenvalue is below `-POSITIVITY_TOL`.
    pub fn validate(&self, tol: f64, check_positivity: bool) -> Result<Validation, AlgebraError> {
        let v = self.validation(check_positivity)?;
        if v.hermiticity_defect > tol {
            return Err(AlgebraError::NotHermitian(v.hermiticity_defect));
        }
        if v.trace_defect > tol {
            return Err(AlgebraError::NotNormalized(v.trace_defect));
        }
        if let Some(m) = v.min_eigenvalue {
            if m < -POSITIVITY_TOL {
                return Err(AlgebraError::NotPositive(m));
            }
        }
        Ok(v)
    }

    /// `tr(rho O)`.
    pub fn expectation(&self, op: &Operator) -> C64 {
        assert_eq!(op.dim(), self.dim(), "operator/state dimension mismatch");
        // tr(rho O) = sum_{r,c} O[r,c] rho[c,r]
        op.matrix().triplets().map(|(r, c, v)| v * self.matrix[[c, r]]).sum()
    }

    /// `<psi| rho |psi>` for a vector on this layout.
    pub fn overlap(&self, psi: &Array1<C64>) -> f64 {
        let rho_psi = self.matrix.dot(psi);
        psi.iter().zip(rho_psi.iter()).map(|(a, b)| a.conj() * b).sum::<C64>().re
    }

    /// Traces out every factor not listed in `keep`; kept factors retain
    /// their layout order.
    pub fn partial_trace(&self, keep: &[&str]) -> Result<DensityMatrix, AlgebraError> {
        for &label in keep {
            if self.layout.position(label).is_none() {
                return Err(AlgebraError::UnknownLabel(label.to_string()));
            }
        }
        let factors = self.layout.factors();
        let kept: Vec<usize> = (0..factors.len()).filter(|&k| keep.contains(&factors[k].label.as_str())).collect();
        let traced: Vec<usize> = (0..factors.len()).filter(|k| !kept.contains(k)).collect();
        let reduced_layout = Arc::new(SpaceLayout::new(
            kept.iter().map(|&k| (factors[k].label.clone(), factors[k].dim)),
        )?);
        let dk = reduced_layout.dim();
        let dt: usize = traced.iter().map(|&k| factors[k].dim).product();

        // Flat index of (kept digits, traced digits) in the full layout.
        let n = factors.len();
        let mut full_index = vec![0usize; dk * dt];
        let mut digits = vec![0usize; n];
        for a in 0..dk {
            let mut rem = a;
            for &k in kept.iter().rev() {
                digits[k] = rem % factors[k].dim;
                rem /= factors[k].dim;
            }
            for b in 0..dt {
                let mut rem = b;
                for &k in traced.iter().rev() {
                    digits[k] = rem % factors[k].dim;
                    rem /= factors[k].dim;
                }
                full_index[a * dt + b] = self.layout.compose(&digits);
            }
        }
        let mut out = Array2::zeros((dk, dk));
        for a in 0..dk {
            for a2 in 0..dk {
                let mut s = C64::new(0.0, 0.0);
                for b in 0..dt {
                    s += self.matrix[[full_index[a * dt + b], full_index[a2 * dt + b]]];
                }
                out[[a, a2]] = s;
            }
        }
        Ok(DensityMatrix { layout: reduced_layout, matrix: out })
    }

    /// Largest entrywise difference to another state.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        (&self.matrix - &other.matrix).iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// `rho_a ⊗ rho_b` on the concatenated layout.
pub fn kron_states(a: &DensityMatrix, b: &DensityMatrix) -> DensityMatrix {
    let (da, db) = (a.dim(), b.dim());
    let m = Array2::from_shape_fn((da * db, da * db), |(i, j)| {
        a.matrix[[i / db, j / db]] * b.matrix[[i % db, j % db]]
    });
    DensityMatrix { layout: Arc::new(a.layout.concat(&b.layout)), matrix: m }
}
