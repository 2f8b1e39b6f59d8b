//! Recorded expectation values.

use crate::error::{Error, Result};
use crate::model::target_states;
use crate::operator::{AtomLevel, BasisState, DensityMatrix, StateSpace, StateVector};

/// `⟨ψ|ρ|ψ⟩`; the imaginary part must be negligible.
pub fn fidelity(rho: &DensityMatrix, target: &StateVector) -> Result<f64> {
    let z = rho.overlap(target)?;
    if z.im.abs() > 1e-10 {
        return Err(Error::InvalidState(format!("overlap has imaginary part {:.3e}", z.im)));
    }
    Ok(z.re)
}

/// Labelled states whose populations are recorded; the first is the fidelity target.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableSet {
    entries: Vec<(String, StateVector)>,
}

impl ObservableSet {
    /// `T1, T2, T3, gLg0, gRg0, gagL`, all at vacuum.
    pub fn standard(space: &StateSpace) -> Result<Self> {
        let t = target_states(space)?;
        let basis = |a, b| StateVector::from_basis_state(space, &BasisState::ground(a, b));
        Ok(ObservableSet {
            entries: vec![
                ("T1".into(), t.t1),
                ("T2".into(), t.t2),
                ("T3".into(), t.t3),
                ("gLg0".into(), basis(AtomLevel::GL, AtomLevel::G0)?),
                ("gRg0".into(), basis(AtomLevel::GR, AtomLevel::G0)?),
                ("gagL".into(), basis(AtomLevel::Ga, AtomLevel::GL)?),
            ],
        })
    }

    /// Arbitrary labelled states of equal dimension; at least one is required.
    pub fn from_states(entries: Vec<(String, StateVector)>) -> Result<Self> {
        let dim = entries
            .first()
            .map(|e| e.1.dim())
            .ok_or_else(|| Error::InvalidParameter("observable set is empty".into()))?;
        if let Some((_, s)) = entries.iter().find(|e| e.1.dim() != dim) {
            return Err(Error::DimensionMismatch {
                left: s.dim(),
                right: dim,
            });
        }
        Ok(ObservableSet { entries })
    }

    pub fn with_extra(mut self, label: impl Into<String>, state: StateVector) -> Result<Self> {
        let dim = self.dim();
        if state.dim() != dim {
            return Err(Error::DimensionMismatch {
                left: state.dim(),
                right: dim,
            });
        }
        self.entries.push((label.into(), state));
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.entries[0].1.dim()
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(l, _)| l.as_str())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn target(&self) -> &StateVector {
        &self.entries[0].1
    }

    /// The same observables on the span of `indices`; exact for states supported there.
    pub(crate) fn restrict(&self, indices: &[usize]) -> ObservableSet {
        ObservableSet {
            entries: self
                .entries
                .iter()
                .map(|(l, s)| (l.clone(), s.restrict(indices)))
                .collect(),
        }
    }

    pub fn measure(&self, rho: &DensityMatrix) -> Result<Vec<f64>> {
        self.entries.iter().map(|(_, s)| fidelity(rho, s)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fidelity_examples() {
        let g = StateSpace::ground_manifold();
        let t = target_states(&g).unwrap();
        assert!((fidelity(&DensityMatrix::pure(&t.t1), &t.t1).unwrap() - 1.0).abs() < 1e-15);
        let gagl = StateVector::from_basis_state(&g, &BasisState::ground(AtomLevel::Ga, AtomLevel::GL)).unwrap();
        assert_eq!(fidelity(&DensityMatrix::pure(&gagl), &t.t1).unwrap(), 0.0);
        let mixed = DensityMatrix::maximally_mixed(16);
        assert!((fidelity(&mixed, &t.t1).unwrap() - 1.0 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn standard_set_order() {
        let set = ObservableSet::standard(&StateSpace::new(1, 1).unwrap()).unwrap();
        assert_eq!(
            set.labels().collect::<Vec<_>>(),
            ["T1", "T2", "T3", "gLg0", "gRg0", "gagL"]
        );
        assert_eq!(set.dim(), 104);
        assert!(set.clone().with_extra("bad", StateVector::zeros(3)).is_err());
    }
}
