//! Compressed-row complex operators.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Entries with magnitude below this are structural zeros.
pub const ZERO_DROP: f64 = 1e-14;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Immutable sparse square matrix in CSR form.
///
/// Rows are sorted by column, duplicates are summed and entries below
/// [`ZERO_DROP`] are removed at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
}

impl SparseOperator {
    pub fn zeros(dim: usize) -> Self {
        SparseOperator {
            dim,
            row_ptr: vec![0; dim + 1],
            cols: Vec::new(),
            vals: Vec::new(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_triplets(dim, (0..dim).map(|i| (i, i, Complex64::new(1.0, 0.0))))
    }

    /// Builds a canonical operator from `(row, col, value)` triplets.
    pub fn from_triplets(dim: usize, triplets: impl IntoIterator<Item = (usize, usize, Complex64)>) -> Self {
        let mut entries: Vec<(usize, usize, Complex64)> = triplets.into_iter().collect();
        entries.sort_by_key(|&(r, c, _)| (r, c));

        let mut row_ptr = vec![0; dim + 1];
        let mut cols = Vec::with_capacity(entries.len());
        let mut vals: Vec<Complex64> = Vec::with_capacity(entries.len());
        let mut rows = Vec::with_capacity(entries.len());
        let mut iter = entries.into_iter().peekable();
        while let Some((r, c, mut v)) = iter.next() {
            assert!(r < dim && c < dim, "entry ({r}, {c}) outside dimension {dim}");
            while let Some(&(r2, c2, v2)) = iter.peek() {
                if (r2, c2) != (r, c) {
                    break;
                }
                v += v2;
                iter.next();
            }
            if v.norm() >= ZERO_DROP {
                rows.push(r);
                cols.push(c);
                vals.push(v);
            }
        }
        for &r in &rows {
            row_ptr[r + 1] += 1;
        }
        for i in 0..dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        SparseOperator {
            dim,
            row_ptr,
            cols,
            vals,
        }
    }

    /// Sparse view of a dense matrix.
    pub fn from_dense(m: &DMatrix<Complex64>) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "operator must be square");
        let n = m.nrows();
        Self::from_triplets(n, (0..n).flat_map(|r| (0..n).map(move |c| (r, c, m[(r, c)]))))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn is_zero(&self) -> bool {
        self.vals.is_empty()
    }

    /// Nonzero entries of one row as `(col, value)`.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[span.clone()]
            .iter()
            .copied()
            .zip(self.vals[span].iter().copied())
    }

    /// All nonzero entries in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.dim).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.cols[span.clone()].binary_search(&c) {
            Ok(k) => self.vals[span.start + k],
            Err(_) => ZERO,
        }
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (r, c, v) in self.triplets() {
            m[(r, c)] = v;
        }
        m
    }

    fn check_dim(&self, other: usize) -> Result<()> {
        if self.dim != other {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &SparseOperator) -> Result<SparseOperator> {
        self.check_dim(other.dim)?;
        Ok(Self::from_triplets(self.dim, self.triplets().chain(other.triplets())))
    }

    pub fn sub(&self, other: &SparseOperator) -> Result<SparseOperator> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, z: Complex64) -> SparseOperator {
        Self::from_triplets(self.dim, self.triplets().map(|(r, c, v)| (r, c, v * z)))
    }

    pub fn scale_real(&self, x: f64) -> SparseOperator {
        self.scale(Complex64::new(x, 0.0))
    }

    pub fn mul(&self, other: &SparseOperator) -> Result<SparseOperator> {
        self.check_dim(other.dim)?;
        let mut out = Vec::new();
        let mut acc = vec![ZERO; self.dim];
        let mut seen = vec![false; self.dim];
        let mut touched = Vec::new();
        for r in 0..self.dim {
            for (k, a) in self.row(r) {
                for (c, b) in other.row(k) {
                    if !seen[c] {
                        seen[c] = true;
                        touched.push(c);
                    }
                    acc[c] += a * b;
                }
            }
            for &c in &touched {
                out.push((r, c, acc[c]));
                acc[c] = ZERO;
                seen[c] = false;
            }
            touched.clear();
        }
        Ok(Self::from_triplets(self.dim, out))
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> SparseOperator {
        Self::from_triplets(self.dim, self.triplets().map(|(r, c, v)| (c, r, v.conj())))
    }

    /// `[A, B] = AB - BA`.
    pub fn commutator(&self, other: &SparseOperator) -> Result<SparseOperator> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    pub fn apply(&self, v: &DVector<Complex64>) -> Result<DVector<Complex64>> {
        self.check_dim(v.len())?;
        Ok(DVector::from_iterator(
            self.dim,
            (0..self.dim).map(|r| self.row(r).map(|(c, a)| a * v[c]).sum()),
        ))
    }

    /// Largest entry magnitude (0 for the zero operator).
    pub fn max_abs(&self) -> f64 {
        self.vals.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.vals.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Maximum entrywise distance to another operator.
    pub fn max_abs_diff(&self, other: &SparseOperator) -> Result<f64> {
        Ok(self.sub(other)?.max_abs())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.triplets()
            .all(|(r, c, v)| (v - self.get(c, r).conj()).norm() <= tol)
            && self
                .adjoint()
                .triplets()
                .all(|(r, c, v)| (v - self.get(r, c)).norm() <= tol)
    }

    /// Principal submatrix on `indices`, in that order.
    pub fn restrict(&self, indices: &[usize]) -> SparseOperator {
        let mut pos = vec![usize::MAX; self.dim];
        for (k, &i) in indices.iter().enumerate() {
            pos[i] = k;
        }
        let triplets = indices.iter().enumerate().flat_map(|(k, &r)| {
            let pos = &pos;
            self.row(r)
                .filter(move |&(c, _)| pos[c] != usize::MAX)
                .map(move |(c, v)| (k, pos[c], v))
        });
        SparseOperator::from_triplets(indices.len(), triplets.collect::<Vec<_>>())
    }

    /// `out += z · self · m` for dense `m`.
    pub(crate) fn mul_dense_acc(&self, m: &DMatrix<Complex64>, z: Complex64, out: &mut DMatrix<Complex64>) {
        let n = self.dim;
        let src = m.as_slice();
        let dst = out.as_mut_slice();
        for (src, dst) in src.chunks_exact(n).zip(dst.chunks_exact_mut(n)) {
            for (r, d) in dst.iter_mut().enumerate() {
                let span = self.row_ptr[r]..self.row_ptr[r + 1];
                if span.is_empty() {
                    continue;
                }
                let mut s = ZERO;
                for (&c, &a) in self.cols[span.clone()].iter().zip(&self.vals[span]) {
                    s += a * src[c];
                }
                *d += z * s;
            }
        }
    }

    /// `self · m` for dense `m`.
    pub fn mul_dense(&self, m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let mut out = DMatrix::zeros(self.dim, m.ncols());
        self.mul_dense_acc(m, Complex64::new(1.0, 0.0), &mut out);
        out
    }

    /// `m · self` for dense `m`.
    pub fn dense_mul(&self, m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let mut out = DMatrix::zeros(m.nrows(), self.dim);
        for (r, c, v) in self.triplets() {
            let src = m.column(r);
            let mut dst = out.column_mut(c);
            dst.axpy(v, &src, Complex64::new(1.0, 0.0));
        }
        out
    }
}

impl Add for &SparseOperator {
    type Output = SparseOperator;
    fn add(self, rhs: &SparseOperator) -> SparseOperator {
        SparseOperator::add(self, rhs).expect("operator dimensions differ")
    }
}

impl Sub for &SparseOperator {
    type Output = SparseOperator;
    fn sub(self, rhs: &SparseOperator) -> SparseOperator {
        SparseOperator::sub(self, rhs).expect("operator dimensions differ")
    }
}

impl Mul for &SparseOperator {
    type Output = SparseOperator;
    fn mul(self, rhs: &SparseOperator) -> SparseOperator {
        SparseOperator::mul(self, rhs).expect("operator dimensions differ")
    }
}

impl Neg for &SparseOperator {
    type Output = SparseOperator;
    fn neg(self) -> SparseOperator {
        self.scale_real(-1.0)
    }
}

/// Sum of operators of equal dimension; `None` for an empty list.
pub fn sum<'a>(ops: impl IntoIterator<Item = &'a SparseOperator>) -> Option<SparseOperator> {
    let mut it = ops.into_iter();
    let first = it.next()?;
    let dim = first.dim();
    let mut triplets: Vec<_> = first.triplets().collect();
    for op in it {
        assert_eq!(op.dim(), dim, "operator dimensions differ");
        triplets.extend(op.triplets());
    }
    Some(SparseOperator::from_triplets(dim, triplets))
}
