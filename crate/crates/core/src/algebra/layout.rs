use std::fmt;

use super::AlgebraError;

pub const QUBIT_1: &str = "q1";
pub const QUBIT_2: &str = "q2";
pub const SYMMETRIC_MODE: &str = "sym";
pub const ANTISYMMETRIC_MODE: &str = "asym";

/// One tensor factor of a composite Hilbert space.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Factor {
    pub label: String,
    pub dim: usize,
}

/// Ordered list of labeled tensor factors. Basis states are indexed
/// row-major: the first factor is the most significant digit.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SpaceLayout {
    factors: Vec<Factor>,
}

impl SpaceLayout {
    pub fn new<S: Into<String>>(
        factors: impl IntoIterator<Item = (S, usize)>,
    ) -> Result<Self, AlgebraError> {
        let factors: Vec<Factor> = factors
            .into_iter()
            .map(|(label, dim)| Factor { label: label.into(), dim })
            .collect();
        if factors.is_empty() {
            return Err(AlgebraError::EmptyLayout);
        }
        for (k, f) in factors.iter().enumerate() {
            if f.dim == 0 {
                return Err(AlgebraError::ZeroDimension(f.label.clone()));
            }
            if factors[..k].iter().any(|g| g.label == f.label) {
                return Err(AlgebraError::DuplicateLabel(f.label.clone()));
            }
        }
        Ok(SpaceLayout { factors })
    }

    pub fn single(label: &str, dim: usize) -> Self {
        Self::new([(label, dim)]).expect("single-factor layout")
    }

    /// `(q1, q2, sym, asym)` with the given photon-number cutoffs.
    pub fn canonical(n_max_sym: usize, n_max_asym: usize) -> Self {
        Self::new([
            (QUBIT_1, 2),
            (QUBIT_2, 2),
            (SYMMETRIC_MODE, n_max_sym + 1),
            (ANTISYMMETRIC_MODE, n_max_asym + 1),
        ])
        .expect("canonical layout")
    }

    /// The two-qubit sub-layout `(q1, q2)`.
    pub fn qubits() -> Self {
        Self::new([(QUBIT_1, 2), (QUBIT_2, 2)]).expect("qubit layout")
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn dim(&self) -> usize {
        self.factors.iter().map(|f| f.dim).product()
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.factors.iter().position(|f| f.label == label)
    }

    pub fn factor_dim(&self, label: &str) -> Option<usize> {
        self.position(label).map(|k| self.factors[k].dim)
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.factors.iter().map(|f| f.label.as_str())
    }

    /// Concatenates two layouts. Labels of `other` that collide with labels
    /// already present get a numeric suffix so the result stays unique.
    pub fn concat(&self, other: &SpaceLayout) -> SpaceLayout {
        let mut factors = self.factors.clone();
        for f in &other.factors {
            let mut label = f.label.clone();
            let mut k = factors.len();
            while factors.iter().any(|g| g.label == label) {
                label = format!("{}_{}", f.label, k);
                k += 1;
            }
            factors.push(Factor { label, dim: f.dim });
        }
        SpaceLayout { factors }
    }

    /// Splits a flat basis index into per-factor indices.
    pub fn decompose(&self, mut index: usize) -> Vec<usize> {
        let mut digits = vec![0; self.factors.len()];
        for (k, f) in self.factors.iter().enumerate().rev() {
            digits[k] = index % f.dim;
            index /= f.dim;
        }
        digits
    }

    pub fn compose(&self, digits: &[usize]) -> usize {
        debug_assert_eq!(digits.len(), self.factors.len());
        digits
            .iter()
            .zip(&self.factors)
            .fold(0, |acc, (&d, f)| acc * f.dim + d)
    }
}

impl fmt::Display for SpaceLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> =
            self.factors.iter().map(|g| format!("{}:{}", g.label, g.dim)).collect();
        write!(f, "[{}]", parts.join(" x "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_dimension() {
        assert_eq!(SpaceLayout::canonical(5, 5).dim(), 144);
        assert_eq!(SpaceLayout::canonical(1, 1).dim(), 16);
    }

    #[test]
    fn duplicate_labels_rejected() {
        assert!(matches!(
            SpaceLayout::new([("a", 2), ("a", 3)]),
            Err(AlgebraError::DuplicateLabel(_))
        ));
    }

    #[test]
    fn decompose_compose_roundtrip() {
        let l = SpaceLayout::canonical(2, 3);
        for i in 0..l.dim() {
            assert_eq!(l.compose(&l.decompose(i)), i);
        }
        assert_eq!(l.decompose(1), vec![0, 0, 0, 1]);
        assert_eq!(l.decompose(4), vec![0, 0, 1, 0]);
    }

    #[test]
    fn concat_disambiguates() {
        let a = SpaceLayout::single("qubit", 2);
        let c = a.concat(&a);
        assert_eq!(c.labels().collect::<Vec<_>>(), vec!["qubit", "qubit_1"]);
    }
}
