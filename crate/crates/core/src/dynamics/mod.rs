//! Lindblad evolution, jump-conditioned feedback and steady states.

mod feedback;
mod integrate;
mod observables;
mod steady;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::CollapseChannel;
use crate::operator::{DensityMatrix, SparseOperator};

pub use feedback::{build_feedback_unitary, FeedbackKind, FeedbackScheme};
pub use integrate::{
    evolve, evolve_with_feedback, trajectory_csv, IntegratorConfig, Series, Trajectory, TRAJECTORY_HEADER,
};
pub use observables::{fidelity, ObservableSet};
pub use steady::{liouvillian, steady_state_direct, steady_state_effective, SteadyState};

/// `-i[H,ρ] + Σ (LρL† - ½{L†L, ρ})`, evaluated literally.
pub fn lindblad_rhs(h: &SparseOperator, channels: &[CollapseChannel], rho: &DensityMatrix) -> Result<DensityMatrix> {
    let n = rho.dim();
    if h.dim() != n {
        return Err(Error::DimensionMismatch {
            left: h.dim(),
            right: n,
        });
    }
    let r = rho.as_matrix();
    let minus_i = Complex64::new(0.0, -1.0);
    let mut out = (h.mul_dense(r) - h.dense_mul(r)) * minus_i;
    for ch in channels {
        let l = &ch.operator;
        if l.dim() != n {
            return Err(Error::DimensionMismatch {
                left: l.dim(),
                right: n,
            });
        }
        let ld = l.adjoint();
        let ldl = &ld * l;
        out += ld.dense_mul(&l.mul_dense(r));
        out -= (ldl.mul_dense(r) + ldl.dense_mul(r)).unscale(2.0);
    }
    Ok(DensityMatrix::from_matrix(out))
}

/// Connected components of the graph on `0..n` with the given edges, each
/// sorted, ordered by smallest member.
pub(crate) fn coupled_blocks(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Vec<Vec<usize>> {
    fn root(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    let mut parent: Vec<usize> = (0..n).collect();
    for (r, c) in edges {
        let (a, b) = (root(&mut parent, r), root(&mut parent, c));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = root(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }
    groups
}

/// Precomputed generator `ρ ↦ -i(H_NH ρ - ρ H_NH†) + Σ J ρ J†` for Hermitian `ρ`.
///
/// The sandwich operators `J` are the jump operators, left-multiplied by the
/// feedback unitary where one is set, stored as triplets: `JρJ†` costs
/// `nnz(J)²` that way. The decay part of `H_NH` always uses the bare
/// operators, and `(UL)†UL = L†L` anyway.
#[derive(Debug, Clone)]
pub(crate) struct Generator {
    h_nh: SparseOperator,
    sandwich: Vec<Vec<(usize, usize, Complex64)>>,
}

impl Generator {
    pub(crate) fn new(
        h: &SparseOperator,
        channels: &[CollapseChannel],
        feedback: Option<&FeedbackScheme>,
    ) -> Result<Self> {
        let n = h.dim();
        let mut h_nh = h.clone();
        let mut sandwich = Vec::with_capacity(channels.len());
        for ch in channels {
            let l = &ch.operator;
            if l.dim() != n {
                return Err(Error::DimensionMismatch {
                    left: l.dim(),
                    right: n,
                });
            }
            h_nh = &h_nh + &(&l.adjoint() * l).scale(Complex64::new(0.0, -0.5));
            let j = match feedback.and_then(|f| f.unitary(&ch.label)) {
                Some(u) => u.mul(l)?,
                None => l.clone(),
            };
            sandwich.push(j.triplets().collect());
        }
        if let Some(f) = feedback {
            f.check(n, channels)?;
        }
        Ok(Generator { h_nh, sandwich })
    }

    pub(crate) fn dim(&self) -> usize {
        self.h_nh.dim()
    }

    /// Blocks of basis states the generator never connects.
    pub(crate) fn blocks(&self) -> Vec<Vec<usize>> {
        let h = self.h_nh.triplets().map(|(r, c, _)| (r, c));
        let j = self.sandwich.iter().flatten().map(|&(r, c, _)| (r, c));
        coupled_blocks(self.dim(), h.chain(j))
    }

    /// The generator on the span of `indices`, which must be a union of blocks.
    pub(crate) fn restrict(&self, indices: &[usize]) -> Generator {
        let mut pos = vec![usize::MAX; self.dim()];
        for (k, &i) in indices.iter().enumerate() {
            pos[i] = k;
        }
        let sandwich = self
            .sandwich
            .iter()
            .map(|j| {
                j.iter()
                    .filter(|&&(r, c, _)| pos[r] != usize::MAX && pos[c] != usize::MAX)
                    .map(|&(r, c, v)| (pos[r], pos[c], v))
                    .collect::<Vec<_>>()
            })
            .filter(|j| !j.is_empty())
            .collect();
        Generator {
            h_nh: self.h_nh.restrict(indices),
            sandwich,
        }
    }

    /// Writes the generator applied to Hermitian `rho` into `out`, Hermitized;
    /// `scratch` is workspace.
    pub(crate) fn apply(
        &self,
        rho: &DMatrix<Complex64>,
        out: &mut DMatrix<Complex64>,
        scratch: &mut DMatrix<Complex64>,
    ) {
        scratch.fill(Complex64::new(0.0, 0.0));
        self.h_nh.mul_dense_acc(rho, Complex64::new(1.0, 0.0), scratch);
        let n = self.dim();
        // -i (X - X†)
        let x = scratch.as_slice();
        for (c, col) in out.as_mut_slice().chunks_exact_mut(n).enumerate() {
            for (r, o) in col.iter_mut().enumerate() {
                let d = x[c * n + r] - x[r * n + c].conj();
                *o = Complex64::new(d.im, -d.re);
            }
        }
        // (JρJ†)[r, s] = Σ J[r, c] ρ[c, d] conj(J[s, d])
        let rho = rho.as_slice();
        let out = out.as_mut_slice();
        for j in &self.sandwich {
            for &(s, d, b) in j {
                let b = b.conj();
                for &(r, c, a) in j {
                    out[s * n + r] += a * rho[d * n + c] * b;
                }
            }
        }
        // Exact Hermitian symmetry keeps the anti-Hermitian part of ρ, on which
        // this shortcut form is not the Lindblad generator, from ever appearing.
        for c in 0..n {
            for r in c..n {
                let v = (out[c * n + r] + out[r * n + c].conj()) * 0.5;
                out[c * n + r] = v;
                out[r * n + c] = v.conj();
            }
        }
    }
}
