//! Lindblad superoperators on column-stacked density matrices,
//! `vec(ρ)[i + j·d] = ρ[i, j]`, so that `vec(AXB) = (Bᵀ ⊗ A) vec(X)`.

use std::sync::Arc;

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::algebra::{CsrMatrix, Operator, SpaceLayout};
use crate::model::{
    effective_td_parts, full_rotating_parts, time_independent_parts, CanonicalOps, HarmonicHamiltonian, ModelError,
    Representation, SystemParams, TWO_PI,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LiouvilleError {
    #[error("collapse channel {index} has negative rate {rate}")]
    NegativeRate { index: usize, rate: f64 },
    #[error("operator layouts differ")]
    LayoutMismatch,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Jump operator with its rate in rad/ns.
#[derive(Clone, Debug)]
pub struct CollapseChannel {
    pub operator: Operator,
    pub rate: f64,
}

impl CollapseChannel {
    pub fn new(operator: Operator, rate: f64) -> Self {
        CollapseChannel { operator, rate }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuperOperator {
    layout: Arc<SpaceLayout>,
    matrix: CsrMatrix,
}

impl SuperOperator {
    pub fn new(layout: Arc<SpaceLayout>, matrix: CsrMatrix) -> Self {
        let d = layout.dim();
        assert_eq!(matrix.shape(), (d * d, d * d), "superoperator shape");
        SuperOperator { layout, matrix }
    }

    pub fn zero(layout: Arc<SpaceLayout>) -> Self {
        let d2 = layout.dim() * layout.dim();
        SuperOperator { layout, matrix: CsrMatrix::zeros(d2, d2) }
    }

    pub fn layout(&self) -> &Arc<SpaceLayout> {
        &self.layout
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    /// Hilbert-space dimension `d` (the matrix is `d² × d²`).
    pub fn hilbert_dim(&self) -> usize {
        self.layout.dim()
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        self.matrix.mul_vec(v)
    }

    pub fn scale(&self, s: impl Into<C64>) -> Self {
        SuperOperator { layout: self.layout.clone(), matrix: self.matrix.scale(s.into()) }
    }

    pub fn add(&self, other: &SuperOperator) -> Self {
        assert!(self.layout == other.layout, "superoperator layouts differ");
        SuperOperator { layout: self.layout.clone(), matrix: self.matrix.add(&other.matrix) }
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }

    pub fn max_abs(&self) -> f64 {
        self.matrix.max_abs()
    }

    /// `max_j |Σ_i vec(I)_i L_{ij}|`; zero for a trace-preserving generator.
    pub fn trace_defect(&self) -> f64 {
        let d = self.hilbert_dim();
        let mut col = vec![C64::new(0.0, 0.0); d * d];
        let ind = self.matrix.indptr();
        for k in 0..d {
            let row = k + k * d;
            for p in ind[row]..ind[row + 1] {
                col[self.matrix.indices()[p]] += self.matrix.values()[p];
            }
        }
        col.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// `−i (I ⊗ H − Hᵀ ⊗ I)`.
pub fn hamiltonian_superop(h: &Operator) -> SuperOperator {
    let d = h.dim();
    let id = CsrMatrix::identity(d);
    let left = id.kron(h.matrix());
    let right = h.matrix().transpose().kron(&id);
    let m = left.lin_comb(C64::new(0.0, -1.0), &right, C64::new(0.0, 1.0));
    SuperOperator::new(h.layout().clone(), m)
}

/// `D[X]ρ = XρX† − ½{X†X, ρ}`.
pub fn dissipator(x: &Operator) -> SuperOperator {
    let d = x.dim();
    let id = CsrMatrix::identity(d);
    let xm = x.matrix();
    let xdx = xm.adjoint().matmul(xm);
    let jump = xm.conj().kron(xm);
    let anti = id.kron(&xdx).add(&xdx.transpose().kron(&id));
    let m = jump.lin_comb(C64::new(1.0, 0.0), &anti, C64::new(-0.5, 0.0));
    SuperOperator::new(x.layout().clone(), m)
}

fn dissipative_part(layout: &Arc<SpaceLayout>, channels: &[CollapseChannel]) -> Result<SuperOperator, LiouvilleError> {
    let mut l = SuperOperator::zero(layout.clone());
    for (index, ch) in channels.iter().enumerate() {
        if ch.rate.is_nan() || ch.rate < 0.0 {
            return Err(LiouvilleError::NegativeRate { index, rate: ch.rate });
        }
        if ch.operator.layout() != layout {
            return Err(LiouvilleError::LayoutMismatch);
        }
        if ch.rate > 0.0 {
            l = l.add(&dissipator(&ch.operator).scale(ch.rate));
        }
    }
    Ok(l)
}

/// `L = −i[H, ·] + Σ rate · D[X]`.
pub fn build_liouvillian(h: &Operator, channels: &[CollapseChannel]) -> Result<SuperOperator, LiouvilleError> {
    let diss = dissipative_part(h.layout(), channels)?;
    Ok(hamiltonian_superop(h).add(&diss))
}

/// Cavity decay on both photonic factors, qubit decay and pure dephasing,
/// all scaled to rad/ns. In the displaced frame the photonic factors are the
/// fluctuation modes, so the same operators apply.
pub fn standard_channels(p: &SystemParams, ops: &CanonicalOps) -> Vec<CollapseChannel> {
    let k = TWO_PI * p.kappa;
    let g = TWO_PI * p.gamma;
    let gp = TWO_PI * p.gamma_phi / 2.0;
    vec![
        CollapseChannel::new(ops.a_sym.clone(), k),
        CollapseChannel::new(ops.a_asym.clone(), k),
        CollapseChannel::new(ops.sm[0].clone(), g),
        CollapseChannel::new(ops.sm[1].clone(), g),
        CollapseChannel::new(ops.sz[0].clone(), gp),
        CollapseChannel::new(ops.sz[1].clone(), gp),
    ]
}

/// `L(t) = L_0 + e^{iνt} L_+ + e^{−iνt} L_−`, or a constant generator.
#[derive(Clone, Debug)]
pub enum LiouvillianProvider {
    Constant(SuperOperator),
    Harmonic {
        static_part: SuperOperator,
        plus: SuperOperator,
        minus: SuperOperator,
        /// rad/ns
        nu: f64,
    },
}

impl LiouvillianProvider {
    pub fn from_harmonic(h: &HarmonicHamiltonian, channels: &[CollapseChannel]) -> Result<Self, LiouvilleError> {
        let static_part = build_liouvillian(&h.static_part, channels)?;
        if h.is_static() {
            return Ok(LiouvillianProvider::Constant(static_part));
        }
        Ok(LiouvillianProvider::Harmonic {
            static_part,
            plus: hamiltonian_superop(&h.plus),
            minus: hamiltonian_superop(&h.plus.adjoint()),
            nu: h.nu,
        })
    }

    pub fn layout(&self) -> &Arc<SpaceLayout> {
        match self {
            LiouvillianProvider::Constant(l) => l.layout(),
            LiouvillianProvider::Harmonic { static_part, .. } => static_part.layout(),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, LiouvillianProvider::Constant(_))
    }

    pub fn constant(&self) -> Option<&SuperOperator> {
        match self {
            LiouvillianProvider::Constant(l) => Some(l),
            LiouvillianProvider::Harmonic { .. } => None,
        }
    }

    /// Assembled generator at `t` (ns). Integrators should use
    /// [`apply_into`](Self::apply_into) instead.
    pub fn at(&self, t: f64) -> SuperOperator {
        match self {
            LiouvillianProvider::Constant(l) => l.clone(),
            LiouvillianProvider::Harmonic { static_part, plus, minus, nu } => {
                let ph = C64::from_polar(1.0, nu * t);
                let m = plus.matrix().lin_comb(ph, minus.matrix(), ph.conj()).add(static_part.matrix());
                SuperOperator::new(static_part.layout().clone(), m)
            }
        }
    }

    /// `y = L(t) x`.
    pub fn apply_into(&self, t: f64, x: &[C64], y: &mut [C64]) {
        y.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
        let one = C64::new(1.0, 0.0);
        match self {
            LiouvillianProvider::Constant(l) => l.matrix().mul_vec_acc(x, one, y),
            LiouvillianProvider::Harmonic { static_part, plus, minus, nu } => {
                let ph = C64::from_polar(1.0, nu * t);
                static_part.matrix().mul_vec_acc(x, one, y);
                plus.matrix().mul_vec_acc(x, ph, y);
                minus.matrix().mul_vec_acc(x, ph.conj(), y);
            }
        }
    }

    /// Largest entry of `|L(t)|` over all `t`, bounded by the sum of pieces.
    pub fn max_abs(&self) -> f64 {
        match self {
            LiouvillianProvider::Constant(l) => l.max_abs(),
            LiouvillianProvider::Harmonic { static_part, plus, minus, .. } => {
                static_part.max_abs() + plus.max_abs() + minus.max_abs()
            }
        }
    }
}

/// `L(t)` with the harmonic pieces merged into one sparsity pattern, so a
/// product costs a single pass over the stored entries.
#[derive(Clone, Debug)]
pub struct FusedGenerator {
    dim: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    v0: Vec<C64>,
    /// `(L_+, L_−)` coefficients and `ν`, absent for a constant generator.
    harmonic: Option<(Vec<C64>, Vec<C64>, f64)>,
}

impl FusedGenerator {
    pub fn constant(l: &CsrMatrix) -> Self {
        FusedGenerator {
            dim: l.nrows(),
            indptr: l.indptr().to_vec(),
            indices: l.indices().to_vec(),
            v0: l.values().to_vec(),
            harmonic: None,
        }
    }

    pub fn harmonic(l0: &CsrMatrix, plus: &CsrMatrix, minus: &CsrMatrix, nu: f64) -> Self {
        let n = l0.nrows();
        let zero = C64::new(0.0, 0.0);
        let mut trip: Vec<(usize, usize, u8, C64)> = Vec::with_capacity(l0.nnz() + plus.nnz() + minus.nnz());
        for (tag, m) in [(0u8, l0), (1, plus), (2, minus)] {
            trip.extend(m.triplets().map(|(r, c, v)| (r, c, tag, v)));
        }
        trip.sort_unstable_by_key(|&(r, c, _, _)| (r, c));
        let mut indptr = vec![0usize; n + 1];
        let (mut indices, mut v0, mut vp, mut vm) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
        let mut last = None;
        for (r, c, tag, v) in trip {
            if last != Some((r, c)) {
                indices.push(c);
                v0.push(zero);
                vp.push(zero);
                vm.push(zero);
                indptr[r + 1] += 1;
                last = Some((r, c));
            }
            let slot = match tag {
                0 => v0.last_mut(),
                1 => vp.last_mut(),
                _ => vm.last_mut(),
            };
            *slot.expect("entry pushed") += v;
        }
        for r in 0..n {
            indptr[r + 1] += indptr[r];
        }
        FusedGenerator { dim: n, indptr, indices, v0, harmonic: Some((vp, vm, nu)) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `y = L(t) x`.
    pub fn apply_into(&self, t: f64, x: &[C64], y: &mut [C64]) {
        match &self.harmonic {
            None => {
                for (r, yr) in y.iter_mut().enumerate() {
                    let mut s = C64::new(0.0, 0.0);
                    for k in self.indptr[r]..self.indptr[r + 1] {
                        s += self.v0[k] * x[self.indices[k]];
                    }
                    *yr = s;
                }
            }
            Some((vp, vm, nu)) => {
                let ph = C64::from_polar(1.0, nu * t);
                let phc = ph.conj();
                for (r, yr) in y.iter_mut().enumerate() {
                    let mut s = C64::new(0.0, 0.0);
                    for k in self.indptr[r]..self.indptr[r + 1] {
                        s += (self.v0[k] + ph * vp[k] + phc * vm[k]) * x[self.indices[k]];
                    }
                    *yr = s;
                }
            }
        }
    }
}

impl LiouvillianProvider {
    /// Fused generator, optionally restricted by `reduce` (e.g. to a
    /// symmetry sector).
    pub fn fused(&self, reduce: impl Fn(&CsrMatrix) -> CsrMatrix) -> FusedGenerator {
        match self {
            LiouvillianProvider::Constant(l) => FusedGenerator::constant(&reduce(l.matrix())),
            LiouvillianProvider::Harmonic { static_part, plus, minus, nu } => FusedGenerator::harmonic(
                &reduce(static_part.matrix()),
                &reduce(plus.matrix()),
                &reduce(minus.matrix()),
                *nu,
            ),
        }
    }

    /// Pieces of the generator; one for a constant provider.
    pub fn pieces(&self) -> Vec<&SuperOperator> {
        match self {
            LiouvillianProvider::Constant(l) => vec![l],
            LiouvillianProvider::Harmonic { static_part, plus, minus, .. } => vec![static_part, plus, minus],
        }
    }
}

/// Provider for the representation selected in `p`.
pub fn liouvillian_provider(p: &SystemParams) -> Result<LiouvillianProvider, LiouvilleError> {
    let ops = CanonicalOps::for_params(p)?;
    liouvillian_provider_with(p, &ops)
}

pub fn liouvillian_provider_with(p: &SystemParams, ops: &CanonicalOps) -> Result<LiouvillianProvider, LiouvilleError> {
    let channels = standard_channels(p, ops);
    match p.representation {
        Representation::FullRotating => LiouvillianProvider::from_harmonic(&full_rotating_parts(p, ops), &channels),
        Representation::EffectiveTd => LiouvillianProvider::from_harmonic(&effective_td_parts(p, ops).total(), &channels),
        Representation::TimeIndependent => {
            let h = time_independent_parts(p, ops);
            Ok(LiouvillianProvider::Constant(build_liouvillian(&h, &channels)?))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{annihilator, pauli, BellState, DensityMatrix, PauliAxis};
    use ndarray::Array2;
    use rand::{Rng, SeedableRng};

    fn random_matrix(d: usize, rng: &mut impl Rng) -> Array2<C64> {
        Array2::from_shape_fn((d, d), |_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    fn vec_of(m: &Array2<C64>) -> Vec<C64> {
        m.t().iter().copied().collect()
    }

    fn unvec(v: &[C64], d: usize) -> Array2<C64> {
        Array2::from_shape_fn((d, d), |(i, j)| v[i + j * d])
    }

    #[test]
    fn photon_decay() {
        let a = annihilator(2).unwrap();
        let mut rho = Array2::zeros((3, 3));
        rho[[1, 1]] = C64::new(1.0, 0.0);
        let out = unvec(&dissipator(&a).apply(&vec_of(&rho)), 3);
        let mut expected = Array2::zeros((3, 3));
        expected[[0, 0]] = C64::new(1.0, 0.0);
        expected[[1, 1]] = C64::new(-1.0, 0.0);
        assert!((&out - &expected).iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn dephasing_spares_populations() {
        let z = pauli(PauliAxis::Z);
        let rho = Array2::from_diag(&ndarray::arr1(&[C64::new(0.3, 0.0), C64::new(0.7, 0.0)]));
        let out = dissipator(&z).apply(&vec_of(&rho));
        assert!(out.iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn dissipator_traceless() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let layout = Arc::new(SpaceLayout::single("x", 4));
        let x = Operator::new(layout, CsrMatrix::from_dense(&random_matrix(4, &mut rng))).unwrap();
        let l = dissipator(&x);
        assert!(l.trace_defect() < 1e-12);
        let out = unvec(&l.apply(&vec_of(&random_matrix(4, &mut rng))), 4);
        assert!(out.diag().sum().norm() < 1e-12);
    }

    #[test]
    fn unitary_part_is_commutator() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        let layout = Arc::new(SpaceLayout::single("x", 5));
        let hm = random_matrix(5, &mut rng);
        let hm = &hm + &hm.t().mapv(|z| z.conj());
        let h = Operator::new(layout, CsrMatrix::from_dense(&hm)).unwrap();
        let rho = random_matrix(5, &mut rng);
        let out = unvec(&build_liouvillian(&h, &[]).unwrap().apply(&vec_of(&rho)), 5);
        let expected = (hm.dot(&rho) - rho.dot(&hm)).mapv(|z| z * C64::new(0.0, -1.0));
        assert!((&out - &expected).iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn negative_rate_rejected() {
        let a = annihilator(1).unwrap();
        let h = Operator::zero(a.layout().clone());
        assert!(matches!(
            build_liouvillian(&h, &[CollapseChannel::new(a, -1.0)]),
            Err(LiouvilleError::NegativeRate { index: 0, .. })
        ));
    }

    #[test]
    fn dark_states() {
        let a = annihilator(3).unwrap();
        let l = build_liouvillian(&Operator::zero(a.layout().clone()), &[CollapseChannel::new(a, 1.0)]).unwrap();
        let mut vac = vec![C64::new(0.0, 0.0); 16];
        vac[0] = C64::new(1.0, 0.0);
        assert!(l.apply(&vac).iter().all(|z| z.norm() < 1e-15));

        let ops = CanonicalOps::new(1, 1).unwrap();
        let ch = [CollapseChannel::new(ops.sm[0].clone(), 0.1), CollapseChannel::new(ops.sm[1].clone(), 0.1)];
        let l = build_liouvillian(&ops.zero(), &ch).unwrap();
        let rho = DensityMatrix::bell_with_vacuum(ops.layout.clone(), BellState::TMinus).unwrap();
        assert!(l.apply(&rho.to_vec()).iter().all(|z| z.norm() < 1e-15));
    }

    fn small(rep: Representation, eps_dp: f64) -> SystemParams {
        SystemParams { n_max_sym: 1, n_max_asym: 1, eps_dp, representation: rep, ..Default::default() }
    }

    #[test]
    fn providers_trace_preserving() {
        for rep in [Representation::FullRotating, Representation::EffectiveTd, Representation::TimeIndependent] {
            let prov = liouvillian_provider(&small(rep, 0.01)).unwrap();
            for t in [0.0, 1.3, 77.0] {
                assert!(prov.at(t).trace_defect() < 1e-10, "{rep}");
            }
        }
    }

    #[test]
    fn single_drive_provider_constant() {
        for rep in [Representation::FullRotating, Representation::EffectiveTd] {
            assert!(liouvillian_provider(&small(rep, 0.0)).unwrap().is_constant());
        }
    }

    #[test]
    fn provider_periodic() {
        let prov = liouvillian_provider(&small(Representation::FullRotating, 0.01)).unwrap();
        let LiouvillianProvider::Harmonic { nu, .. } = prov else { panic!("expected harmonic provider") };
        let t = 0.731;
        let a = prov.at(t);
        let b = prov.at(t + TWO_PI / nu.abs());
        assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-9 * a.max_abs());
    }

    #[test]
    fn apply_into_matches_assembled() {
        let prov = liouvillian_provider(&small(Representation::EffectiveTd, 0.01)).unwrap();
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        let x: Vec<C64> = (0..prov.layout().dim().pow(2)).map(|_| C64::new(rng.gen(), rng.gen())).collect();
        let mut y = vec![C64::new(0.0, 0.0); x.len()];
        prov.apply_into(2.5, &x, &mut y);
        let z = prov.at(2.5).apply(&x);
        assert!(y.iter().zip(&z).all(|(a, b)| (a - b).norm() < 1e-12));
    }

    #[test]
    fn fused_matches_provider() {
        let prov = liouvillian_provider(&small(Representation::FullRotating, 0.01)).unwrap();
        let fused = prov.fused(|m| m.clone());
        let mut rng = rand::rngs::StdRng::seed_from_u64(5);
        let x: Vec<C64> = (0..fused.dim()).map(|_| C64::new(rng.gen(), rng.gen())).collect();
        let (mut a, mut b) = (vec![C64::new(0.0, 0.0); x.len()], vec![C64::new(0.0, 0.0); x.len()]);
        fused.apply_into(1.7, &x, &mut a);
        prov.apply_into(1.7, &x, &mut b);
        assert!(a.iter().zip(&b).all(|(u, v)| (u - v).norm() < 1e-12));
    }
}
