//! Dense pure and mixed states over a [`StateSpace`].

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::space::{BasisState, StateSpace};
use super::sparse::SparseOperator;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector(DVector<Complex64>);

impl StateVector {
    pub fn new(v: DVector<Complex64>) -> Self {
        StateVector(v)
    }

    pub fn zeros(dim: usize) -> Self {
        StateVector(DVector::zeros(dim))
    }

    /// The `i`-th basis vector of `space`.
    pub fn basis(space: &StateSpace, i: usize) -> Self {
        let mut v = DVector::zeros(space.dim());
        v[i] = Complex64::new(1.0, 0.0);
        StateVector(v)
    }

    pub fn from_basis_state(space: &StateSpace, state: &BasisState) -> Result<Self> {
        let i = space
            .index_of(state)
            .ok_or_else(|| Error::InvalidState(format!("{state} is not in the space")))?;
        Ok(Self::basis(space, i))
    }

    /// Superposition `Σ c_k |s_k⟩`, normalized.
    pub fn superposition(space: &StateSpace, terms: &[(BasisState, f64)]) -> Result<Self> {
        let mut v = DVector::zeros(space.dim());
        for (s, c) in terms {
            let i = space
                .index_of(s)
                .ok_or_else(|| Error::InvalidState(format!("{s} is not in the space")))?;
            v[i] += Complex64::new(*c, 0.0);
        }
        StateVector(v).normalized()
    }

    pub fn normalized(self) -> Result<Self> {
        let n = self.0.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        Ok(StateVector(self.0.unscale(n)))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn as_vector(&self) -> &DVector<Complex64> {
        &self.0
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.0.dotc(&other.0)
    }

    /// Restriction to a list of indices, in that order.
    pub fn restrict(&self, indices: &[usize]) -> StateVector {
        StateVector(DVector::from_iterator(
            indices.len(),
            indices.iter().map(|&i| self.0[i]),
        ))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(DMatrix<Complex64>);

impl DensityMatrix {
    /// Wraps a matrix without checks; see [`DensityMatrix::validate`].
    pub fn from_matrix(m: DMatrix<Complex64>) -> Self {
        DensityMatrix(m)
    }

    pub fn pure(psi: &StateVector) -> Self {
        let v = psi.as_vector();
        DensityMatrix(v * v.adjoint())
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix(DMatrix::identity(dim, dim).unscale(dim as f64))
    }

    /// Diagonal state with the given populations.
    pub fn diagonal(populations: &[f64]) -> Self {
        let n = populations.len();
        DensityMatrix(DMatrix::from_fn(n, n, |r, c| {
            if r == c {
                Complex64::new(populations[r], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    /// `max |ρ - ρ†|`.
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for c in 0..n {
            for r in c..n {
                worst = worst.max((self.0[(r, c)] - self.0[(c, r)].conj()).norm());
            }
        }
        worst
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let h = (&self.0 + self.0.adjoint()).unscale(2.0);
        h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn population(&self, i: usize) -> f64 {
        self.0[(i, i)].re
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn overlap(&self, psi: &StateVector) -> Result<Complex64> {
        if psi.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: psi.dim(),
            });
        }
        let v = psi.as_vector();
        Ok(v.dotc(&(&self.0 * v)))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Checks Hermiticity, unit trace and positivity against `tol`.
    pub fn validate(&self, tol: f64) -> Result<()> {
        if self.0.nrows() != self.0.ncols() {
            return Err(Error::DimensionMismatch {
                left: self.0.nrows(),
                right: self.0.ncols(),
            });
        }
        let herm = self.hermiticity_error();
        if herm > tol {
            return Err(Error::InvalidState(format!("not Hermitian (error {herm:.3e})")));
        }
        let drift = (self.trace() - Complex64::new(1.0, 0.0)).norm();
        if drift > tol {
            return Err(Error::InvalidState(format!("trace differs from 1 by {drift:.3e}")));
        }
        let lo = self.min_eigenvalue();
        if lo < -tol {
            return Err(Error::InvalidState(format!("negative eigenvalue {lo:.3e}")));
        }
        Ok(())
    }
}

/// `tr(Aρ)`.
pub fn expectation(a: &SparseOperator, rho: &DensityMatrix) -> Result<Complex64> {
    if a.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: rho.dim(),
        });
    }
    let m = rho.as_matrix();
    Ok(a.triplets().map(|(r, c, v)| v * m[(c, r)]).sum())
}
