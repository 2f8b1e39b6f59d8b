//! Lifting local atom and mode operators onto a truncated [`StateSpace`].

use num_complex::Complex64;

use super::space::{Atom, AtomLevel, BasisState, ModeId, StateSpace};
use super::sparse::SparseOperator;

/// One local factor of a product operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factor {
    /// `|bra⟩⟨ket|` on one atom.
    Transition {
        atom: Atom,
        bra: AtomLevel,
        ket: AtomLevel,
    },
    Create(ModeId),
    Annihilate(ModeId),
}

impl Factor {
    pub fn transition(atom: Atom, bra: AtomLevel, ket: AtomLevel) -> Self {
        Factor::Transition { atom, bra, ket }
    }

    /// Action on one untruncated product state.
    fn act(self, mut state: BasisState) -> Option<(BasisState, f64)> {
        match self {
            Factor::Transition { atom, bra, ket } => {
                if state.atom(atom) != ket {
                    return None;
                }
                state.set_atom(atom, bra);
                Some((state, 1.0))
            }
            Factor::Annihilate(mode) => {
                let n = state.photons[mode.slot()];
                if n == 0 {
                    return None;
                }
                state.photons[mode.slot()] = n - 1;
                Some((state, f64::from(n).sqrt()))
            }
            Factor::Create(mode) => {
                let n = state.photons[mode.slot()] + 1;
                state.photons[mode.slot()] = n;
                Some((state, f64::from(n).sqrt()))
            }
        }
    }
}

/// `coeff · P F₁F₂…Fₙ P` with `P` the projector onto `space`.
///
/// The product is evaluated on the untruncated tensor product and only the
/// final state is required to lie in the space, so intermediate states above
/// the truncation are not lost. The rightmost factor acts first.
pub fn lift_product(space: &StateSpace, coeff: Complex64, factors: &[Factor]) -> SparseOperator {
    let mut triplets = Vec::new();
    for (col, state) in space.states().iter().enumerate() {
        let mut current = *state;
        let mut amp = coeff;
        let mut alive = true;
        for factor in factors.iter().rev() {
            match factor.act(current) {
                Some((next, a)) => {
                    current = next;
                    amp *= a;
                }
                None => {
                    alive = false;
                    break;
                }
            }
        }
        if alive {
            if let Some(row) = space.index_of(&current) {
                triplets.push((row, col, amp));
            }
        }
    }
    SparseOperator::from_triplets(space.dim(), triplets)
}

/// `|bra⟩⟨ket|` on one atom, identity elsewhere.
pub fn lift_atom_op(space: &StateSpace, atom: Atom, bra: AtomLevel, ket: AtomLevel) -> SparseOperator {
    lift_product(space, Complex64::new(1.0, 0.0), &[Factor::transition(atom, bra, ket)])
}

/// Bosonic annihilator of one local mode.
pub fn lift_mode_annihilator(space: &StateSpace, mode: ModeId) -> SparseOperator {
    lift_product(space, Complex64::new(1.0, 0.0), &[Factor::Annihilate(mode)])
}

/// Diagonal operator counting excited atoms plus photons.
pub fn excitation_number_op(space: &StateSpace) -> SparseOperator {
    SparseOperator::from_triplets(
        space.dim(),
        space
            .states()
            .iter()
            .enumerate()
            .map(|(i, s)| (i, i, Complex64::new(f64::from(s.excitation()), 0.0))),
    )
}
