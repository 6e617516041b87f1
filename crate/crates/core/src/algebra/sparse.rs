//! Compressed-sparse-row complex matrices.
//!
//! Construction goes through coordinate triplets (duplicates are summed);
//! application and products work on the compressed rows.

use ndarray::Array2;
use num_complex::Complex64 as C64;

/// Sparse complex matrix in CSR form. Column indices within a row are sorted
/// and unique.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<C64>,
}

impl CsrMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        CsrMatrix {
            nrows,
            ncols,
            indptr: vec![0; nrows + 1],
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![C64::new(1.0, 0.0); n])
    }

    pub fn diagonal(diag: &[C64]) -> Self {
        Self::from_triplets(
            diag.len(),
            diag.len(),
            diag.iter().enumerate().map(|(i, &v)| (i, i, v)),
            0.0,
        )
    }

    /// Builds a matrix from `(row, col, value)` triplets. Repeated coordinates
    /// are summed; entries whose magnitude is not above `drop_tol` are not
    /// stored (so `drop_tol = 0` drops only exact zeros).
    pub fn from_triplets<I>(nrows: usize, ncols: usize, triplets: I, drop_tol: f64) -> Self
    where
        I: IntoIterator<Item = (usize, usize, C64)>,
    {
        let mut trip: Vec<(usize, usize, C64)> = triplets.into_iter().collect();
        for &(r, c, _) in &trip {
            assert!(
                r < nrows && c < ncols,
                "triplet ({r}, {c}) out of bounds for {nrows}x{ncols} matrix"
            );
        }
        trip.sort_unstable_by_key(|a| (a.0, a.1));

        let mut indptr = vec![0usize; nrows + 1];
        let mut indices = Vec::with_capacity(trip.len());
        let mut values = Vec::with_capacity(trip.len());
        let mut k = 0;
        while k < trip.len() {
            let (r, c, mut v) = trip[k];
            k += 1;
            while k < trip.len() && trip[k].0 == r && trip[k].1 == c {
                v += trip[k].2;
                k += 1;
            }
            if v.norm() > drop_tol {
                indices.push(c);
                values.push(v);
                indptr[r + 1] += 1;
            }
        }
        for r in 0..nrows {
            indptr[r + 1] += indptr[r];
        }
        CsrMatrix { nrows, ncols, indptr, indices, values }
    }

    pub fn from_dense(a: &Array2<C64>) -> Self {
        let (n, m) = a.dim();
        Self::from_triplets(
            n,
            m,
            a.indexed_iter().map(|((i, j), &v)| (i, j, v)),
            0.0,
        )
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nrows, self.ncols)
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn indptr(&self) -> &[usize] {
        &self.indptr
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    /// Iterates over stored entries as `(row, col, value)` in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.nrows).flat_map(move |r| {
            (self.indptr[r]..self.indptr[r + 1]).map(move |k| (r, self.indices[k], self.values[k]))
        })
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        let span = &self.indices[self.indptr[row]..self.indptr[row + 1]];
        match span.binary_search(&col) {
            Ok(k) => self.values[self.indptr[row] + k],
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    pub fn to_dense(&self) -> Array2<C64> {
        let mut out = Array2::zeros((self.nrows, self.ncols));
        for (r, c, v) in self.triplets() {
            out[[r, c]] = v;
        }
        out
    }

    /// Largest entry magnitude (0 for an empty matrix).
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= s);
        out.prune(0.0);
        out
    }

    pub fn conj(&self) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v = v.conj());
        out
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(
            self.ncols,
            self.nrows,
            self.triplets().map(|(r, c, v)| (c, r, v)),
            0.0,
        )
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(
            self.ncols,
            self.nrows,
            self.triplets().map(|(r, c, v)| (c, r, v.conj())),
            0.0,
        )
    }

    /// `alpha * self + beta * other`.
    pub fn lin_comb(&self, alpha: C64, other: &CsrMatrix, beta: C64) -> Self {
        assert_eq!(self.shape(), other.shape(), "shape mismatch in sparse sum");
        Self::from_triplets(
            self.nrows,
            self.ncols,
            self.triplets()
                .map(|(r, c, v)| (r, c, alpha * v))
                .chain(other.triplets().map(|(r, c, v)| (r, c, beta * v))),
            0.0,
        )
    }

    pub fn add(&self, other: &CsrMatrix) -> Self {
        self.lin_comb(C64::new(1.0, 0.0), other, C64::new(1.0, 0.0))
    }

    pub fn sub(&self, other: &CsrMatrix) -> Self {
        self.lin_comb(C64::new(1.0, 0.0), other, C64::new(-1.0, 0.0))
    }

    /// Sparse-sparse product using a dense row accumulator.
    pub fn matmul(&self, other: &CsrMatrix) -> Self {
        assert_eq!(self.ncols, other.nrows, "inner dimension mismatch in sparse product");
        let mut acc = vec![C64::new(0.0, 0.0); other.ncols];
        let mut touched = vec![false; other.ncols];
        let mut cols: Vec<usize> = Vec::new();
        let mut indptr = vec![0usize; self.nrows + 1];
        let mut indices = Vec::new();
        let mut values = Vec::new();
        for r in 0..self.nrows {
            for k in self.indptr[r]..self.indptr[r + 1] {
                let a = self.values[k];
                let mid = self.indices[k];
                for kk in other.indptr[mid]..other.indptr[mid + 1] {
                    let c = other.indices[kk];
                    if !touched[c] {
                        touched[c] = true;
                        cols.push(c);
                    }
                    acc[c] += a * other.values[kk];
                }
            }
            cols.sort_unstable();
            for &c in &cols {
                let v = acc[c];
                if v.norm() > 0.0 {
                    indices.push(c);
                    values.push(v);
                }
                acc[c] = C64::new(0.0, 0.0);
                touched[c] = false;
            }
            cols.clear();
            indptr[r + 1] = indices.len();
        }
        CsrMatrix { nrows: self.nrows, ncols: other.ncols, indptr, indices, values }
    }

    /// Kronecker product: block `(i, j)` of the result is `self[i, j] * other`.
    pub fn kron(&self, other: &CsrMatrix) -> Self {
        let (p, q) = other.shape();
        let mut trip = Vec::with_capacity(self.nnz() * other.nnz());
        for (r1, c1, v1) in self.triplets() {
            for (r2, c2, v2) in other.triplets() {
                trip.push((r1 * p + r2, c1 * q + c2, v1 * v2));
            }
        }
        Self::from_triplets(self.nrows * p, self.ncols * q, trip, 0.0)
    }

    /// `y += alpha * self * x`.
    pub fn mul_vec_acc(&self, x: &[C64], alpha: C64, y: &mut [C64]) {
        debug_assert_eq!(x.len(), self.ncols);
        debug_assert_eq!(y.len(), self.nrows);
        for (r, yr) in y.iter_mut().enumerate() {
            let mut s = C64::new(0.0, 0.0);
            for k in self.indptr[r]..self.indptr[r + 1] {
                s += self.values[k] * x[self.indices[k]];
            }
            *yr += alpha * s;
        }
    }

    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![C64::new(0.0, 0.0); self.nrows];
        self.mul_vec_acc(x, C64::new(1.0, 0.0), &mut y);
        y
    }

    /// Drops stored entries with magnitude not above `tol`.
    pub fn prune(&mut self, tol: f64) {
        let mut indptr = vec![0usize; self.nrows + 1];
        let mut w = 0;
        for r in 0..self.nrows {
            for k in self.indptr[r]..self.indptr[r + 1] {
                if self.values[k].norm() > tol {
                    self.indices[w] = self.indices[k];
                    self.values[w] = self.values[k];
                    w += 1;
                }
            }
            indptr[r + 1] = w;
        }
        self.indices.truncate(w);
        self.values.truncate(w);
        self.indptr = indptr;
    }

    /// Largest entrywise difference to `other`.
    pub fn max_abs_diff(&self, other: &CsrMatrix) -> f64 {
        self.sub(other).max_abs()
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }
}
