//! Two three-level-ground atoms in a pair of coupled bimode cavities, driven
//! towards the entangled state `(|gL gR⟩ + |gR gL⟩ + |ga g0⟩)/√3` by engineered
//! dissipation.
//!
//! * [`operator`]: truncated product basis and sparse complex operators.
//! * [`model`]: Hamiltonian pieces, decay channels and target states.
//! * [`effective`]: adiabatic elimination of the excited manifold, numerically
//!   and through closed-form expressions.
//! * [`dynamics`]: fixed-step Lindblad integration, feedback and steady states.
//!
//! Frequencies are in units of `g` and times in `1/g`.

pub mod dynamics;
pub mod effective;
pub mod error;
pub mod model;
pub mod operator;

pub use error::{Error, Result};
