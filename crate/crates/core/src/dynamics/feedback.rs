//! Unitaries applied right after a detected jump.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::CollapseChannel;
use crate::operator::{AtomLevel, SparseOperator, StateSpace};

const UNITARY_TOL: f64 = 1e-12;

/// Which atom-2 pair the feedback flips.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeedbackKind {
    /// `g0 ↔ gR`
    SigmaX1,
    /// `g0 ↔ eR`
    SigmaX2,
}

impl FeedbackKind {
    pub fn partner(self) -> AtomLevel {
        match self {
            FeedbackKind::SigmaX1 => AtomLevel::GR,
            FeedbackKind::SigmaX2 => AtomLevel::ER,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FeedbackKind::SigmaX1 => "sigma-x1",
            FeedbackKind::SigmaX2 => "sigma-x2",
        }
    }
}

/// `exp(iπσ/2)` with `σ = |g0⟩₂⟨x| + |x⟩₂⟨g0|`: `i` times the swap on the
/// pair, identity elsewhere.
///
/// A basis state is swapped only if its partner is also in `space`, so the
/// result is unitary on every truncation.
pub fn build_feedback_unitary(kind: FeedbackKind, space: &StateSpace) -> SparseOperator {
    let x = kind.partner();
    let i = Complex64::new(0.0, 1.0);
    let one = Complex64::new(1.0, 0.0);
    let triplets = space.states().iter().enumerate().map(|(col, s)| {
        let flipped = match s.atom2 {
            AtomLevel::G0 => Some(x),
            a if a == x => Some(AtomLevel::G0),
            _ => None,
        };
        let target = flipped.and_then(|level| {
            let mut t = *s;
            t.atom2 = level;
            space.index_of(&t)
        });
        match target {
            Some(row) => (row, col, i),
            None => (col, col, one),
        }
    });
    SparseOperator::from_triplets(space.dim(), triplets.collect::<Vec<_>>())
}

/// Per-channel feedback unitaries; channels without one get the identity.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FeedbackScheme {
    unitaries: Vec<(String, SparseOperator)>,
}

impl FeedbackScheme {
    pub fn identity() -> Self {
        FeedbackScheme::default()
    }

    /// Assigns `u` to the channel labelled `label`, rejecting non-unitary `u`.
    pub fn with(mut self, label: impl Into<String>, u: SparseOperator) -> Result<Self> {
        let label = label.into();
        let deviation = (&u * &u.adjoint()).max_abs_diff(&SparseOperator::identity(u.dim()))?;
        if deviation > UNITARY_TOL {
            return Err(Error::NonUnitary {
                channel: label,
                deviation,
            });
        }
        self.unitaries.retain(|(l, _)| *l != label);
        self.unitaries.push((label, u));
        Ok(self)
    }

    pub fn unitary(&self, label: &str) -> Option<&SparseOperator> {
        self.unitaries.iter().find(|(l, _)| l == label).map(|(_, u)| u)
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.unitaries.iter().map(|(l, _)| l.as_str())
    }

    pub fn is_identity(&self) -> bool {
        self.unitaries.is_empty()
    }

    /// Every assigned label names a channel and every unitary has dimension `dim`.
    pub(crate) fn check(&self, dim: usize, channels: &[CollapseChannel]) -> Result<()> {
        for (label, u) in &self.unitaries {
            if u.dim() != dim {
                return Err(Error::DimensionMismatch {
                    left: u.dim(),
                    right: dim,
                });
            }
            if !channels.iter().any(|c| c.label == *label) {
                return Err(Error::InvalidParameter(format!("feedback on unknown channel {label}")));
            }
        }
        Ok(())
    }
}
