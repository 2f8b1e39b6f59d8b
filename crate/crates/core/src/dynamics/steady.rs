//! Steady states from the null space of the Liouvillian.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{coupled_blocks, lindblad_rhs};
use crate::effective::EffectiveModel;
use crate::error::{Error, Result};
use crate::model::CollapseChannel;
use crate::operator::{DensityMatrix, SparseOperator, StateSpace};

/// Singular values below this fraction of the largest count as zero.
const NULL_TOL: f64 = 1e-9;
/// Components with seed weight below this are left empty.
const WEIGHT_FLOOR: f64 = 1e-14;
/// Largest component handled with a dense superoperator.
pub const MAX_COMPONENT: usize = 40;

/// One block of the coupling graph and the seed population it carries.
#[derive(Debug, Clone, PartialEq)]
pub struct SteadyComponent {
    pub indices: Vec<usize>,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteadyState {
    pub rho: DensityMatrix,
    /// `‖dρ/dt‖_max` at `rho`.
    pub residual: f64,
    pub components: Vec<SteadyComponent>,
}

/// Column-major superoperator: `vec(AXB) = (Bᵀ ⊗ A) vec(X)`.
pub fn liouvillian(h: &SparseOperator, channels: &[CollapseChannel]) -> Result<DMatrix<Complex64>> {
    let n = h.dim();
    let mut h_nh = h.to_dense();
    let mut jumps = Vec::with_capacity(channels.len());
    for ch in channels {
        if ch.operator.dim() != n {
            return Err(Error::DimensionMismatch {
                left: ch.operator.dim(),
                right: n,
            });
        }
        let l = ch.operator.to_dense();
        h_nh -= (l.adjoint() * &l) * Complex64::new(0.0, 0.5);
        jumps.push(l);
    }
    Ok(dense_liouvillian(&h_nh, &jumps))
}

fn dense_liouvillian(h_nh: &DMatrix<Complex64>, jumps: &[DMatrix<Complex64>]) -> DMatrix<Complex64> {
    let n = h_nh.nrows();
    let id = DMatrix::<Complex64>::identity(n, n);
    let i = Complex64::new(0.0, 1.0);
    let mut sup = id.kronecker(h_nh) * (-i) + h_nh.conjugate().kronecker(&id) * i;
    for l in jumps {
        sup += l.conjugate().kronecker(l);
    }
    sup
}

fn components(h: &SparseOperator, channels: &[CollapseChannel]) -> Vec<Vec<usize>> {
    let ops = std::iter::once(h).chain(channels.iter().map(|c| &c.operator));
    coupled_blocks(h.dim(), ops.flat_map(|op| op.triplets().map(|(r, c, _)| (r, c))))
}

fn sub(m: &DMatrix<Complex64>, idx: &[usize]) -> DMatrix<Complex64> {
    DMatrix::from_fn(idx.len(), idx.len(), |r, c| m[(idx[r], idx[c])])
}

/// Unique trace-one fixed point of one component.
fn component_fixed_point(
    h: &DMatrix<Complex64>,
    jumps: &[DMatrix<Complex64>],
    idx: &[usize],
    label: impl Fn() -> String,
) -> Result<DMatrix<Complex64>> {
    let k = idx.len();
    let mut h_nh = sub(h, idx);
    let mut local = Vec::with_capacity(jumps.len());
    for l in jumps {
        let l = sub(l, idx);
        h_nh -= (l.adjoint() * &l) * Complex64::new(0.0, 0.5);
        local.push(l);
    }
    let sup = dense_liouvillian(&h_nh, &local);
    let svd = sup.svd(false, true);
    let v_t = svd
        .v_t
        .ok_or_else(|| Error::Unsupported("SVD did not return V".into()))?;
    let sv = &svd.singular_values;
    let largest = sv.max();
    let null: Vec<usize> = (0..sv.len()).filter(|&i| sv[i] <= NULL_TOL * largest).collect();
    if null.len() != 1 {
        return Err(Error::DegenerateSteadyState {
            sector: label(),
            dimension: null.len(),
        });
    }
    let v = v_t.row(null[0]).adjoint();
    let x = DMatrix::from_column_slice(k, k, v.as_slice());
    let tr = x.trace();
    let x = x.map(|z| z / tr);
    Ok((&x + x.adjoint()).unscale(2.0))
}

/// Fixed point of the master equation reached from `seed`.
///
/// The basis splits into blocks that `H` and the jumps never connect; each
/// block keeps its seed population. Each populated block must have a
/// one-dimensional null space, otherwise the seed does not determine the
/// answer and [`Error::DegenerateSteadyState`] is returned. Coherences between
/// blocks are dropped.
pub fn steady_state_direct(
    h: &SparseOperator,
    channels: &[CollapseChannel],
    seed: &DensityMatrix,
) -> Result<SteadyState> {
    let n = h.dim();
    if seed.dim() != n {
        return Err(Error::DimensionMismatch {
            left: seed.dim(),
            right: n,
        });
    }
    let hd = h.to_dense();
    let mut jumps = Vec::with_capacity(channels.len());
    for ch in channels {
        if ch.operator.dim() != n {
            return Err(Error::DimensionMismatch {
                left: ch.operator.dim(),
                right: n,
            });
        }
        jumps.push(ch.operator.to_dense());
    }
    let total = seed.trace().re;
    let mut rho = DMatrix::<Complex64>::zeros(n, n);
    let mut report = Vec::new();
    for idx in components(h, channels) {
        let weight = idx.iter().map(|&i| seed.population(i)).sum::<f64>() / total;
        if weight > WEIGHT_FLOOR {
            if idx.len() > MAX_COMPONENT {
                return Err(Error::Unsupported(format!(
                    "coupled block of {} states exceeds the dense limit {MAX_COMPONENT}",
                    idx.len()
                )));
            }
            let x = component_fixed_point(&hd, &jumps, &idx, || format!("{idx:?}"))?;
            for (a, &r) in idx.iter().enumerate() {
                for (b, &c) in idx.iter().enumerate() {
                    rho[(r, c)] = x[(a, b)] * weight;
                }
            }
        }
        report.push(SteadyComponent { indices: idx, weight });
    }
    let rho = DensityMatrix::from_matrix(rho);
    let rhs = lindblad_rhs(h, channels, &rho)?;
    let residual = rhs.as_matrix().iter().map(|z| z.norm()).fold(0.0, f64::max);
    Ok(SteadyState {
        rho,
        residual,
        components: report,
    })
}

/// [`steady_state_direct`] on an effective model, with blocks labelled by state.
pub fn steady_state_effective(model: &EffectiveModel, seed: &DensityMatrix) -> Result<SteadyState> {
    steady_state_direct(&model.h_eff, &model.channels, seed).map_err(|e| match e {
        Error::DegenerateSteadyState { sector, dimension } => Error::DegenerateSteadyState {
            sector: relabel(&model.space, &sector),
            dimension,
        },
        e => e,
    })
}

fn relabel(space: &StateSpace, sector: &str) -> String {
    let labels: Vec<String> = sector
        .trim_matches(|c| c == '[' || c == ']')
        .split(',')
        .filter_map(|s| s.trim().parse::<usize>().ok())
        .map(|i| space.state(i).label())
        .collect();
    labels.join(",")
}
