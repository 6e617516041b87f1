use std::sync::Arc;

use faer::prelude::*;
use faer::sparse::linalg::solvers::{Lu, SymbolicLu};
use faer::sparse::{SparseColMat, Triplet};
use faer::{c64, Mat};
use num_complex::Complex64 as C64;

use crate::algebra::{CsrMatrix, DensityMatrix, SpaceLayout};
use crate::liouville::SuperOperator;

use super::symmetry::{EvenSector, SignedPermutation};
use super::SolveError;

/// Residual threshold relative to `max|L_ij|`.
pub const STEADY_RESIDUAL_TOL: f64 = 1e-8;
/// Hermitization defects above this mark the result unconverged.
pub const HERMITIZATION_TOL: f64 = 1e-8;
const REFINEMENT_STEPS: usize = 2;
/// Above this size the kernel dimension of a singular system is not computed.
const KERNEL_PROBE_MAX: usize = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SteadyMethod {
    DirectSolve,
    NullSpace,
}

impl SteadyMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            SteadyMethod::DirectSolve => "direct_solve",
            SteadyMethod::NullSpace => "null_space",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SteadyStateResult {
    pub rho: DensityMatrix,
    /// `‖L vec(ρ)‖₂` on the unmodified generator, before Hermitization.
    pub residual: f64,
    /// `residual / max|L_ij|`.
    pub scaled_residual: f64,
    pub hermitization_defect: f64,
    pub method: SteadyMethod,
}

impl SteadyStateResult {
    pub fn converged(&self) -> bool {
        self.scaled_residual < STEADY_RESIDUAL_TOL && self.hermitization_defect <= HERMITIZATION_TOL
    }
}

/// Direct steady-state solver. Keeps the symbolic LU factorization so that
/// repeated solves on generators with the same sparsity pattern (parameter
/// sweeps) skip the ordering and elimination-tree analysis.
///
/// With a symmetry attached, the system is projected onto the even sector
/// of `ρ ↦ SρS†` before factorization. The residual is always checked on
/// the full generator, so a symmetry that `L` does not respect shows up as
/// an unconverged result rather than a silently wrong one.
#[derive(Default)]
pub struct SteadySolver {
    sector: Option<EvenSector>,
    cache: Option<(Vec<usize>, Vec<usize>, SymbolicLu<usize>)>,
}

impl SteadySolver {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_symmetry(s: &SignedPermutation) -> Self {
        SteadySolver { sector: Some(EvenSector::new(s)), cache: None }
    }

    pub fn solve(&mut self, l: &SuperOperator) -> Result<SteadyStateResult, SolveError> {
        let d = l.hilbert_dim();
        if let Some(sec) = &self.sector {
            if sec.hilbert_dim() != d {
                return Err(SolveError::Factorization(format!(
                    "symmetry acts on dimension {}, generator on {d}",
                    sec.hilbert_dim()
                )));
            }
        }
        let a = match &self.sector {
            Some(sec) => reduced_with_trace_row(l.matrix(), sec),
            None => with_trace_row(l.matrix(), d),
        };
        let n = a.nrows();
        let (col_ptr, row_idx) = pattern(&a);
        let reuse = matches!(&self.cache, Some((p, r, _)) if *p == col_ptr && *r == row_idx);
        if !reuse {
            let sym = SymbolicLu::try_new(a.symbolic()).map_err(|e| SolveError::Factorization(format!("{e:?}")))?;
            self.cache = Some((col_ptr, row_idx, sym));
        }
        let sym = self.cache.as_ref().map(|(_, _, s)| s.clone()).expect("cached symbolic factorization");
        let lu = match Lu::try_new_with_symbolic(sym, a.as_ref()) {
            Ok(lu) => lu,
            Err(e) => {
                log::debug!("sparse LU failed: {e:?}");
                return Err(singular(l));
            }
        };

        let mut b = Mat::<c64>::zeros(n, 1);
        b[(0, 0)] = c64::new(1.0, 0.0);
        let mut x = lu.solve(&b);
        for _ in 0..REFINEMENT_STEPS {
            let ax = &a * &x;
            let r = &b - &ax;
            let dx = lu.solve(&r);
            x += dx;
        }
        let v: Vec<C64> = (0..n).map(|i| x[(i, 0)]).collect();
        let v = match &self.sector {
            Some(sec) => sec.lift_orthonormal(&v),
            None => v,
        };
        if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(singular(l));
        }
        finish(l, &v, SteadyMethod::DirectSolve)
    }
}

/// One-shot steady-state solve of `0 = L ρ`, `tr ρ = 1`.
pub fn steady_state(l: &SuperOperator) -> Result<SteadyStateResult, SolveError> {
    SteadySolver::new().solve(l)
}

fn finish(l: &SuperOperator, v: &[C64], method: SteadyMethod) -> Result<SteadyStateResult, SolveError> {
    let layout: Arc<SpaceLayout> = l.layout().clone();
    let lv = l.apply(v);
    let residual = lv.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let scale = l.max_abs().max(f64::MIN_POSITIVE);
    let raw = DensityMatrix::from_vec(layout, v)?;
    let (rho, hermitization_defect) = raw.hermitized();
    if hermitization_defect > HERMITIZATION_TOL {
        log::warn!("steady state Hermitization defect {hermitization_defect:.3e}");
    }
    Ok(SteadyStateResult { rho, residual, scaled_residual: residual / scale, hermitization_defect, method })
}

/// `L` with row 0 replaced by `vec(I)ᵀ`, as a column-major faer matrix.
fn with_trace_row(l: &CsrMatrix, d: usize) -> SparseColMat<usize, c64> {
    let n = d * d;
    let mut trip: Vec<Triplet<usize, usize, c64>> = l
        .triplets()
        .filter(|&(r, _, _)| r != 0)
        .map(|(r, c, v)| Triplet::new(r, c, v))
        .collect();
    trip.extend((0..d).map(|k| Triplet::new(0, k + k * d, c64::new(1.0, 0.0))));
    SparseColMat::try_new_from_triplets(n, n, &trip).expect("valid triplets")
}

/// `Bᵀ L B` in an orthonormal basis of the even sector, with row 0 replaced
/// by `Bᵀ vec(I)`. Liouville index 0 (`ρ₀₀`) opens column 0. The orthonormal
/// form keeps the structural symmetry of `L`, which the fill-reducing
/// ordering exploits.
fn reduced_with_trace_row(l: &CsrMatrix, sec: &EvenSector) -> SparseColMat<usize, c64> {
    let d = sec.hilbert_dim();
    let n = sec.dim();
    let mut trip = Vec::with_capacity(l.nnz() / 2 + d);
    for (r, c, v) in l.triplets() {
        let (Some((kr, wr)), Some((kc, wc))) = (sec.orthonormal_slot(r), sec.orthonormal_slot(c)) else { continue };
        if kr != 0 {
            trip.push(Triplet::new(kr, kc, v * (wr * wc)));
        }
    }
    for k in 0..d {
        if let Some((col, w)) = sec.orthonormal_slot(k + k * d) {
            trip.push(Triplet::new(0, col, c64::new(w, 0.0)));
        }
    }
    SparseColMat::try_new_from_triplets(n, n, &trip).expect("valid triplets")
}

fn pattern(a: &SparseColMat<usize, c64>) -> (Vec<usize>, Vec<usize>) {
    let s = a.symbolic();
    (s.col_ptr().to_vec(), s.row_idx().to_vec())
}

fn singular(l: &SuperOperator) -> SolveError {
    let n = l.matrix().nrows();
    let multiplicity = if n <= KERNEL_PROBE_MAX {
        crate::algebra::dense::singular_values(&l.matrix().to_dense())
            .ok()
            .map(|s| {
                let tol = 1e-10 * s.iter().cloned().fold(0.0, f64::max);
                s.iter().filter(|&&x| x <= tol).count()
            })
    } else {
        None
    };
    SolveError::DegenerateSteadyState { multiplicity }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::BellState;
    use crate::liouville::{build_liouvillian, CollapseChannel};
    use crate::model::CanonicalOps;

    #[test]
    fn damped_cavity_relaxes_to_vacuum() {
        let ops = CanonicalOps::new(3, 3).unwrap();
        let h = (&ops.n_sym + &ops.n_asym).scale(0.3);
        let ch = [
            CollapseChannel::new(ops.a_sym.clone(), 0.1),
            CollapseChannel::new(ops.a_asym.clone(), 0.1),
            CollapseChannel::new(ops.sm[0].clone(), 0.01),
            CollapseChannel::new(ops.sm[1].clone(), 0.01),
        ];
        let r = steady_state(&build_liouvillian(&h, &ch).unwrap()).unwrap();
        assert!(r.residual < 1e-12);
        let target = DensityMatrix::bell_with_vacuum(ops.layout.clone(), BellState::TMinus).unwrap();
        assert!(r.rho.max_abs_diff(&target) < 1e-12);
        assert!(r.converged());
    }

    #[test]
    fn degenerate_kernel_reported() {
        // no dissipation: every diagonal state is stationary
        let ops = CanonicalOps::new(1, 1).unwrap();
        let l = build_liouvillian(&ops.n_sym, &[]).unwrap();
        match steady_state(&l) {
            Err(SolveError::DegenerateSteadyState { multiplicity }) => assert!(multiplicity.unwrap() > 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn symbolic_reuse_matches_fresh() {
        let ops = CanonicalOps::new(2, 2).unwrap();
        let ch = [CollapseChannel::new(ops.a_sym.clone(), 0.1), CollapseChannel::new(ops.sm[0].clone(), 0.05)];
        let mut solver = SteadySolver::new();
        for w in [0.1, 0.2] {
            let h = &(&ops.sx[0] + &ops.a_sym.adjoint()).scale(w) + &(&ops.sx[0] + &ops.a_sym).scale(w);
            let l = build_liouvillian(&h, &ch).unwrap();
            let a = solver.solve(&l).unwrap();
            let b = steady_state(&l).unwrap();
            assert!(a.rho.max_abs_diff(&b.rho) < 1e-12);
        }
    }
}
