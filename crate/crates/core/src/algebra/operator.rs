use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex64 as C64;

use super::{AlgebraError, CsrMatrix, SpaceLayout};

/// Sparse operator on a labeled tensor-product space.
///
/// Arithmetic through `std::ops` panics on layout mismatch, like shape
/// mismatches in `ndarray`; fallible entry points return [`AlgebraError`].
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    layout: Arc<SpaceLayout>,
    matrix: CsrMatrix,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PauliAxis {
    X,
    Y,
    Z,
    Plus,
    Minus,
}

impl Operator {
    pub fn new(layout: Arc<SpaceLayout>, matrix: CsrMatrix) -> Result<Self, AlgebraError> {
        let d = layout.dim();
        if matrix.shape() != (d, d) {
            return Err(AlgebraError::DimensionMismatch {
                expected: d,
                found: matrix.nrows().max(matrix.ncols()),
            });
        }
        Ok(Operator { layout, matrix })
    }

    pub fn identity(layout: Arc<SpaceLayout>) -> Self {
        let d = layout.dim();
        Operator { layout, matrix: CsrMatrix::identity(d) }
    }

    pub fn zero(layout: Arc<SpaceLayout>) -> Self {
        let d = layout.dim();
        Operator { layout, matrix: CsrMatrix::zeros(d, d) }
    }

    pub fn layout(&self) -> &Arc<SpaceLayout> {
        &self.layout
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CsrMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.matrix.get(row, col)
    }

    pub fn adjoint(&self) -> Self {
        Operator { layout: self.layout.clone(), matrix: self.matrix.adjoint() }
    }

    pub fn scale(&self, s: impl Into<C64>) -> Self {
        Operator { layout: self.layout.clone(), matrix: self.matrix.scale(s.into()) }
    }

    pub fn commutator(&self, other: &Operator) -> Self {
        &(self * other) - &(other * self)
    }

    /// `max |A - A†|` entrywise.
    pub fn hermiticity_defect(&self) -> f64 {
        self.matrix.max_abs_diff(&self.matrix.adjoint())
    }

    pub fn max_abs(&self) -> f64 {
        self.matrix.max_abs()
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim()).map(|i| self.matrix.get(i, i)).sum()
    }

    pub fn to_dense(&self) -> Array2<C64> {
        self.matrix.to_dense()
    }

    pub fn apply(&self, psi: &[C64]) -> Vec<C64> {
        self.matrix.mul_vec(psi)
    }

    pub fn same_layout(&self, other: &Operator) -> bool {
        Arc::ptr_eq(&self.layout, &other.layout) || *self.layout == *other.layout
    }

    fn check_layout(&self, other: &Operator) {
        assert!(
            self.same_layout(other),
            "operator layouts differ: {} vs {}",
            self.layout,
            other.layout
        );
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        self.check_layout(rhs);
        Operator { layout: self.layout.clone(), matrix: self.matrix.add(&rhs.matrix) }
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        self.check_layout(rhs);
        Operator { layout: self.layout.clone(), matrix: self.matrix.sub(&rhs.matrix) }
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        self.check_layout(rhs);
        Operator { layout: self.layout.clone(), matrix: self.matrix.matmul(&rhs.matrix) }
    }
}

impl Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        self.scale(-1.0)
    }
}

impl Mul<&Operator> for f64 {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        rhs.scale(self)
    }
}

impl Mul<&Operator> for C64 {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        rhs.scale(self)
    }
}

/// Kronecker product; the result lives on the concatenated layout.
pub fn kron(a: &Operator, b: &Operator) -> Operator {
    Operator {
        layout: Arc::new(a.layout.concat(&b.layout)),
        matrix: a.matrix.kron(&b.matrix),
    }
}

/// Places a single-factor operator on factor `label` of `layout`, with
/// identities on every other factor.
pub fn embed(
    local: &Operator,
    label: &str,
    layout: &Arc<SpaceLayout>,
) -> Result<Operator, AlgebraError> {
    let pos = layout
        .position(label)
        .ok_or_else(|| AlgebraError::UnknownLabel(label.to_string()))?;
    let target = layout.factors()[pos].dim;
    if local.dim() != target {
        return Err(AlgebraError::DimensionMismatch { expected: target, found: local.dim() });
    }
    let before: usize = layout.factors()[..pos].iter().map(|f| f.dim).product();
    let after: usize = layout.factors()[pos + 1..].iter().map(|f| f.dim).product();
    let matrix = CsrMatrix::identity(before)
        .kron(&local.matrix)
        .kron(&CsrMatrix::identity(after));
    Ok(Operator { layout: layout.clone(), matrix })
}

/// Pauli matrices in the basis `(|up>, |down>)`, so `σ^z = diag(1, -1)` and
/// `σ^+ = |up><down|`.
pub fn pauli(axis: PauliAxis) -> Operator {
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    let trip = match axis {
        PauliAxis::X => vec![(0, 1, one), (1, 0, one)],
        PauliAxis::Y => vec![(0, 1, -i), (1, 0, i)],
        PauliAxis::Z => vec![(0, 0, one), (1, 1, -one)],
        PauliAxis::Plus => vec![(0, 1, one)],
        PauliAxis::Minus => vec![(1, 0, one)],
    };
    Operator {
        layout: Arc::new(SpaceLayout::single("qubit", 2)),
        matrix: CsrMatrix::from_triplets(2, 2, trip, 0.0),
    }
}

/// Truncated bosonic annihilator on `n_max + 1` Fock states.
pub fn annihilator(n_max: usize) -> Result<Operator, AlgebraError> {
    if n_max < 1 {
        return Err(AlgebraError::Truncation(n_max));
    }
    let trip = (1..=n_max).map(|n| (n - 1, n, C64::new((n as f64).sqrt(), 0.0)));
    Ok(Operator {
        layout: Arc::new(SpaceLayout::single("mode", n_max + 1)),
        matrix: CsrMatrix::from_triplets(n_max + 1, n_max + 1, trip, 0.0),
    })
}

/// `a†a` on `n_max + 1` Fock states.
pub fn number(n_max: usize) -> Result<Operator, AlgebraError> {
    let a = annihilator(n_max)?;
    Ok(&a.adjoint() * &a)
}
