//! Reduction of a Liouvillian to the invariant sector of a signed-permutation
//! symmetry `S|i⟩ = s_i |π(i)⟩` with `S² = 1`.
//!
//! The superoperator `ρ ↦ SρS†` splits Liouville space into ±1 sectors. A
//! unique steady state lies in the +1 sector, which holds about half the
//! entries, so the sparse factorization there is several times cheaper.

use crate::algebra::layout::{ANTISYMMETRIC_MODE, QUBIT_1, QUBIT_2};
use num_complex::Complex64 as C64;

use crate::algebra::{AlgebraError, CsrMatrix, SpaceLayout};

#[derive(Clone, Debug, PartialEq)]
pub struct SignedPermutation {
    perm: Vec<usize>,
    sign: Vec<f64>,
}

impl SignedPermutation {
    /// `perm` must be an involution; `sign` entries must be ±1 with
    /// `sign[i] == sign[perm[i]]`.
    pub fn new(perm: Vec<usize>, sign: Vec<f64>) -> Option<Self> {
        let n = perm.len();
        let ok = sign.len() == n
            && perm.iter().enumerate().all(|(i, &p)| p < n && perm[p] == i)
            && sign.iter().enumerate().all(|(i, &s)| (s == 1.0 || s == -1.0) && sign[perm[i]] == s);
        ok.then_some(SignedPermutation { perm, sign })
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    /// Qubit exchange combined with the antisymmetric-mode parity
    /// `(−1)^{a†a}`, a symmetry of every model here: exchanging the qubits
    /// flips `σ₁ − σ₂`, which only ever appears multiplied by `a` or `a†`.
    pub fn exchange_parity(layout: &SpaceLayout) -> Result<Self, AlgebraError> {
        let pos = |label: &str| layout.position(label).ok_or_else(|| AlgebraError::UnknownLabel(label.to_string()));
        let (q1, q2, am) = (pos(QUBIT_1)?, pos(QUBIT_2)?, pos(ANTISYMMETRIC_MODE)?);
        let n = layout.dim();
        let mut perm = vec![0; n];
        let mut sign = vec![1.0; n];
        for i in 0..n {
            let mut digits = layout.decompose(i);
            digits.swap(q1, q2);
            perm[i] = layout.compose(&digits);
            if digits[am] % 2 == 1 {
                sign[i] = -1.0;
            }
        }
        Ok(SignedPermutation { perm, sign })
    }
}

/// The +1 sector of `ρ ↦ SρS†` in column-stacked Liouville space.
///
/// Sector coordinates are the entries of `vec(ρ)` at one representative of
/// each orbit `{(i, j), (π(i), π(j))}`; the partner entry carries the sign
/// `s_i s_j`. Lifting and projecting are therefore exact (no `1/√2`
/// weights), and the reduced generator is `Q L P` with `P` the lift and `Q`
/// the representative selection.
#[derive(Clone, Debug)]
pub struct EvenSector {
    d: usize,
    /// For each Liouville index, its sector column and sign (column
    /// `usize::MAX` if the index is absent from the sector).
    slot: Vec<(usize, f64)>,
    /// Representative Liouville index of each sector column.
    rep: Vec<usize>,
    /// Whether the column's orbit has two members.
    paired: Vec<bool>,
}

impl EvenSector {
    pub fn new(s: &SignedPermutation) -> Self {
        let d = s.dim();
        let n = d * d;
        const UNSET: usize = usize::MAX;
        const ODD: usize = usize::MAX - 1;
        let mut slot = vec![(UNSET, 0.0); n];
        let mut rep = Vec::with_capacity(n / 2 + d);
        let mut paired = Vec::with_capacity(n / 2 + d);
        for idx in 0..n {
            if slot[idx].0 != UNSET {
                continue;
            }
            let (i, j) = (idx % d, idx / d);
            let partner = s.perm[i] + s.perm[j] * d;
            let sgn = s.sign[i] * s.sign[j];
            let col = rep.len();
            if partner == idx && sgn < 0.0 {
                slot[idx] = (ODD, 0.0);
                continue;
            }
            slot[idx] = (col, 1.0);
            slot[partner] = (col, sgn);
            rep.push(idx);
            paired.push(partner != idx);
        }
        for e in slot.iter_mut() {
            if e.0 == ODD {
                e.0 = UNSET;
            }
        }
        EvenSector { d, slot, rep, paired }
    }

    pub fn dim(&self) -> usize {
        self.rep.len()
    }

    pub fn hilbert_dim(&self) -> usize {
        self.d
    }

    /// Sector column and sign of Liouville index `idx`, if present.
    pub fn slot(&self, idx: usize) -> Option<(usize, f64)> {
        let (c, w) = self.slot[idx];
        (c != usize::MAX).then_some((c, w))
    }

    /// Column and weight of `idx` in the orthonormal basis `P D` with
    /// `D = diag(1/√(orbit size))`.
    pub fn orthonormal_slot(&self, idx: usize) -> Option<(usize, f64)> {
        let (k, sgn) = self.slot(idx)?;
        Some((k, if self.paired[k] { sgn * std::f64::consts::FRAC_1_SQRT_2 } else { sgn }))
    }

    /// Whether Liouville index `idx` is the representative of its column.
    pub fn is_representative(&self, idx: usize) -> bool {
        matches!(self.slot(idx), Some((k, _)) if self.rep[k] == idx)
    }

    /// Sector coordinates of `v` (assumed to lie in the sector).
    pub fn project(&self, v: &[C64]) -> Vec<C64> {
        self.rep.iter().map(|&idx| v[idx]).collect()
    }

    /// `Q L P`: the generator restricted to the sector, in sector
    /// coordinates.
    pub fn reduce(&self, l: &CsrMatrix) -> CsrMatrix {
        let trip = l.triplets().filter_map(|(r, c, v)| {
            if !self.is_representative(r) {
                return None;
            }
            let (kc, sc) = self.slot(c)?;
            Some((self.slot[r].0, kc, v * sc))
        });
        CsrMatrix::from_triplets(self.dim(), self.dim(), trip, 0.0)
    }

    /// Whether `v` lies in the sector, to relative tolerance `tol`.
    pub fn contains(&self, v: &[C64], tol: f64) -> bool {
        let back = self.lift(&self.project(v));
        let scale = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
        back.iter().zip(v).all(|(a, b)| (a - b).norm() <= tol * scale.max(f64::MIN_POSITIVE))
    }

    /// Whether `l` maps the sector into itself, probed with a fixed
    /// pseudo-random sector vector.
    pub fn is_invariant(&self, l: &CsrMatrix, tol: f64) -> bool {
        let z: Vec<C64> = (0..self.dim())
            .map(|k| {
                let a = (k as f64 * 0.618_033_988_749_895).fract();
                let b = (k as f64 * 0.414_213_562_373_095 + 0.5).fract();
                C64::new(a - 0.5, b - 0.5)
            })
            .collect();
        let y = l.mul_vec(&self.lift(&z));
        self.contains(&y, tol)
    }

    /// Maps a sector vector back to Liouville space.
    /// Inverse of the coordinates used by [`orthonormal_slot`](Self::orthonormal_slot).
    pub fn lift_orthonormal(&self, x: &[C64]) -> Vec<C64> {
        (0..self.slot.len())
            .map(|idx| match self.orthonormal_slot(idx) {
                Some((k, w)) => x[k] * w,
                None => C64::new(0.0, 0.0),
            })
            .collect()
    }

    pub fn lift(&self, x: &[C64]) -> Vec<C64> {
        self.slot
            .iter()
            .map(|&(k, sgn)| if k == usize::MAX { C64::new(0.0, 0.0) } else { x[k] * sgn })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_involution() {
        assert!(SignedPermutation::new(vec![1, 2, 0], vec![1.0; 3]).is_none());
        assert!(SignedPermutation::new(vec![1, 0], vec![1.0, -1.0]).is_none());
        assert!(SignedPermutation::new(vec![1, 0, 2], vec![1.0, 1.0, -1.0]).is_some());
    }

    #[test]
    fn sector_roundtrip_exact_and_about_half() {
        let layout = SpaceLayout::canonical(2, 2);
        let s = SignedPermutation::exchange_parity(&layout).unwrap();
        let sec = EvenSector::new(&s);
        let n = layout.dim().pow(2);
        assert!(sec.dim() > n / 2 - layout.dim() && sec.dim() < n / 2 + layout.dim());
        let x: Vec<C64> = (0..sec.dim()).map(|k| C64::new(k as f64 / 7.0, -(k as f64).sqrt())).collect();
        assert_eq!(sec.project(&sec.lift(&x)), x);
        assert!(sec.contains(&sec.lift(&x), 0.0));
    }

    #[test]
    fn identity_lies_in_sector() {
        let layout = SpaceLayout::canonical(1, 2);
        let d = layout.dim();
        let sec = EvenSector::new(&SignedPermutation::exchange_parity(&layout).unwrap());
        for k in 0..d {
            assert!(sec.slot(k + k * d).is_some());
        }
    }

    #[test]
    fn liouvillians_respect_exchange_parity() {
        use crate::liouville::liouvillian_provider;
        use crate::model::{Representation, SystemParams};
        for rep in [Representation::FullRotating, Representation::EffectiveTd, Representation::TimeIndependent] {
            let p = SystemParams { n_max_sym: 2, n_max_asym: 2, eps_dp: 0.01, representation: rep, ..Default::default() };
            let prov = liouvillian_provider(&p).unwrap();
            let sec = EvenSector::new(&SignedPermutation::exchange_parity(prov.layout()).unwrap());
            for t in [0.0, 0.9] {
                assert!(sec.is_invariant(prov.at(t).matrix(), 1e-12), "{rep}");
            }
        }
    }

    #[test]
    fn broken_symmetry_detected() {
        use crate::liouville::hamiltonian_superop;
        use crate::model::CanonicalOps;
        let ops = CanonicalOps::new(1, 1).unwrap();
        let sec = EvenSector::new(&SignedPermutation::exchange_parity(&ops.layout).unwrap());
        assert!(!sec.is_invariant(hamiltonian_superop(&ops.sx[0]).matrix(), 1e-12));
        assert!(sec.is_invariant(hamiltonian_superop(&(&ops.sx[0] + &ops.sx[1])).matrix(), 1e-12));
    }
}
