//! Adiabatic elimination of the singly excited manifold.
//!
//! With `H_NH = H0 - (i/2) Σ L†L`, the ground-manifold dynamics is generated by
//!
//! ```text
//! H_eff = -½ [V₋ H_NH⁻¹ V₊ + V₋ (H_NH⁻¹)† V₊] + Hg
//! L_eff = L H_NH⁻¹ V₊
//! ```
//!
//! [`reduce_effective`] evaluates this numerically; [`closed_form_gamma`] and
//! [`closed_form_kappa`] give the analytic expressions for the two
//! single-dissipation limits.

mod closed_form;
mod dominant;
mod regime;
mod table;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{build_collapse_channels, build_drive, build_h0, build_hg, CollapseChannel, ModelParams};
use crate::operator::{AtomLevel, SparseOperator, StateSpace};

pub use closed_form::{closed_form_gamma, closed_form_kappa, ClosedFormContext};
pub use dominant::{dominant_channels, DiscardReport, DEFAULT_CUTOFF};
pub use regime::{regime_check, RegimeCheck, RegimeReport};
pub use table::{coefficient_csv, coefficient_table, write_coefficient_csv, CoefficientRow};

/// Largest accepted 1-norm condition number of the inverted block.
pub const CONDITION_LIMIT: f64 = 1e12;

/// Excitation-0 and excitation-≥1 index sets of a space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubspaceSplit {
    pub ground: Vec<usize>,
    pub excited: Vec<usize>,
}

impl SubspaceSplit {
    pub fn new(space: &StateSpace) -> Self {
        let (ground, excited) = (0..space.dim()).partition(|&i| space.state(i).excitation() == 0);
        SubspaceSplit { ground, excited }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Numeric,
    ClosedFormGamma,
    ClosedFormKappa,
}

impl Provenance {
    pub fn name(self) -> &'static str {
        match self {
            Provenance::Numeric => "numeric",
            Provenance::ClosedFormGamma => "closed_form_gamma",
            Provenance::ClosedFormKappa => "closed_form_kappa",
        }
    }
}

/// Effective Hamiltonian and jump operators on the sixteen-state ground manifold.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveModel {
    pub space: StateSpace,
    pub h_eff: SparseOperator,
    pub channels: Vec<CollapseChannel>,
    pub provenance: Provenance,
}

impl EffectiveModel {
    pub fn channel(&self, label: &str) -> Option<&SparseOperator> {
        self.channels.iter().find(|c| c.label == label).map(|c| &c.operator)
    }

    pub fn labels(&self) -> Vec<&str> {
        self.channels.iter().map(|c| c.label.as_str()).collect()
    }
}

/// `H0 - (i/2) Σ L†L` over all decay channels.
pub fn build_h_nh(params: &ModelParams, space: &StateSpace) -> Result<SparseOperator> {
    let h0 = build_h0(params, space)?;
    let channels = build_collapse_channels(params, space)?;
    Ok(non_hermitian(&h0, &channels))
}

fn non_hermitian(h0: &SparseOperator, channels: &[CollapseChannel]) -> SparseOperator {
    let mut out = h0.clone();
    for ch in channels {
        let ldl = &ch.operator.adjoint() * &ch.operator;
        out = &out + &ldl.scale(Complex64::new(0.0, -0.5));
    }
    out
}

/// Excitation-1 states reachable from `V₊|ground⟩` through `H_NH`.
fn reachable_block(
    space: &StateSpace,
    split: &SubspaceSplit,
    vp: &SparseOperator,
    h_nh: &SparseOperator,
) -> Vec<usize> {
    let n = space.dim();
    let mut seen = vec![false; n];
    let mut stack = Vec::new();
    let mut is_ground = vec![false; n];
    for &g in &split.ground {
        is_ground[g] = true;
    }
    for (r, c, _) in vp.triplets() {
        if is_ground[c] && !seen[r] {
            seen[r] = true;
            stack.push(r);
        }
    }
    // H_NH conserves excitation and is structurally symmetric, so following rows suffices.
    while let Some(i) = stack.pop() {
        for (j, _) in h_nh.row(i) {
            if !seen[j] && space.state(j).excitation() == 1 {
                seen[j] = true;
                stack.push(j);
            }
        }
    }
    (0..n).filter(|&i| seen[i]).collect()
}

fn submatrix(op: &SparseOperator, rows: &[usize], cols: &[usize]) -> DMatrix<Complex64> {
    let mut col_pos = vec![usize::MAX; op.dim()];
    for (k, &c) in cols.iter().enumerate() {
        col_pos[c] = k;
    }
    let mut out = DMatrix::zeros(rows.len(), cols.len());
    for (k, &r) in rows.iter().enumerate() {
        for (c, v) in op.row(r) {
            if col_pos[c] != usize::MAX {
                out[(k, col_pos[c])] = v;
            }
        }
    }
    out
}

fn norm1(m: &DMatrix<Complex64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Numerical effective model.
///
/// Fails with [`Error::NearSingular`] when the excited block cannot be inverted
/// reliably, which happens when nothing damps a resonant excitation.
pub fn reduce_effective(params: &ModelParams, space: &StateSpace) -> Result<EffectiveModel> {
    let h0 = build_h0(params, space)?;
    let hg = build_hg(params, space)?;
    let (vp, vm) = build_drive(params, space)?;
    let channels = build_collapse_channels(params, space)?;
    let h_nh = non_hermitian(&h0, &channels);
    let split = SubspaceSplit::new(space);
    let block = reachable_block(space, &split, &vp, &h_nh);
    let g = &split.ground;

    let a = submatrix(&h_nh, &block, &block);
    let inv = a.clone().try_inverse();
    let condition = inv.as_ref().map_or(f64::INFINITY, |inv| norm1(&a) * norm1(inv));
    let inv = match inv {
        Some(inv) if condition.is_finite() && condition <= CONDITION_LIMIT => inv,
        _ => {
            return Err(Error::NearSingular {
                condition,
                context: format!("{params:?}"),
            })
        }
    };

    let vp_block = submatrix(&vp, &block, g);
    let propagated = &inv * &vp_block;
    let m = submatrix(&vm, g, &block) * &propagated;
    let h_eff = (&m + m.adjoint()).unscale(-2.0) + submatrix(&hg, g, g);

    let channels = channels
        .iter()
        .map(|ch| {
            let l = submatrix(&ch.operator, g, &block) * &propagated;
            CollapseChannel::new(ch.label.clone(), SparseOperator::from_dense(&l))
        })
        .collect();
    Ok(EffectiveModel {
        space: StateSpace::ground_manifold(),
        h_eff: SparseOperator::from_dense(&h_eff),
        channels,
        provenance: Provenance::Numeric,
    })
}

/// Ground-manifold indices with atom 2 outside `ga`.
pub fn sector_without_atom2_ga(space: &StateSpace) -> Vec<usize> {
    (0..space.dim())
        .filter(|&i| space.state(i).atom2 != AtomLevel::Ga && space.state(i).excitation() == 0)
        .collect()
}

/// One entry where two operators disagree.
#[derive(Debug, Clone, PartialEq)]
pub struct Mismatch {
    pub row: usize,
    pub col: usize,
    pub left: Complex64,
    pub right: Complex64,
}

/// Entries of `a` and `b` on `indices × indices` that differ by more than
/// `rel·|a| ` and by more than `abs`.
pub fn compare_operators(
    a: &SparseOperator,
    b: &SparseOperator,
    indices: &[usize],
    rel: f64,
    abs: f64,
) -> Result<Vec<Mismatch>> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    let mut out = Vec::new();
    for &r in indices {
        for &c in indices {
            let (x, y) = (a.get(r, c), b.get(r, c));
            let d = (x - y).norm();
            if d > abs && d > rel * x.norm() {
                out.push(Mismatch {
                    row: r,
                    col: c,
                    left: x,
                    right: y,
                });
            }
        }
    }
    Ok(out)
}
