//! Truncated Hilbert space and the sparse operator algebra built on it.

mod lift;
mod space;
mod sparse;
mod state;

pub use lift::{excitation_number_op, lift_atom_op, lift_mode_annihilator, lift_product, Factor};
pub use space::{Atom, AtomLevel, BasisState, DelocalizedMode, ModeId, StateSpace};
pub use sparse::{sum, SparseOperator, ZERO_DROP};
pub use state::{expectation, DensityMatrix, StateVector};
