//! Hamiltonian, decay channels and target states of the two-cavity model.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operator::{
    lift_atom_op, lift_mode_annihilator, lift_product, Atom, AtomLevel, BasisState, DelocalizedMode, Factor, ModeId,
    SparseOperator, StateSpace, StateVector,
};

use AtomLevel::*;

/// Physical parameters in units of `g`.
///
/// Couplings, drives, hoppings and decay rates are taken equal for both
/// polarisations and both cavities; the microwave amplitude on atom 2 is `-ω`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub g: f64,
    /// Optical pump Rabi frequency Ω.
    pub drive: f64,
    /// Microwave Rabi frequency ω.
    pub microwave: f64,
    /// Excited-state detuning Δ.
    pub atom_detuning: f64,
    /// Cavity detuning δ.
    pub cavity_detuning: f64,
    /// Photon hopping J.
    pub hopping: f64,
    pub kappa: f64,
    pub gamma: f64,
}

impl ModelParams {
    /// Parameters with δ set to [`delta_star`].
    pub fn at_delta_star(
        g: f64,
        drive: f64,
        microwave: f64,
        atom_detuning: f64,
        hopping: f64,
        kappa: f64,
        gamma: f64,
    ) -> Result<Self> {
        let p = ModelParams {
            g,
            drive,
            microwave,
            atom_detuning,
            cavity_detuning: delta_star(g, hopping, atom_detuning)?,
            hopping,
            kappa,
            gamma,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("g", self.g),
            ("Omega", self.drive),
            ("omega", self.microwave),
            ("Delta", self.atom_detuning),
            ("delta", self.cavity_detuning),
            ("J", self.hopping),
            ("kappa", self.kappa),
            ("gamma", self.gamma),
        ];
        if let Some((name, v)) = fields.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("{name} = {v} is not finite")));
        }
        if self.kappa < 0.0 {
            return Err(Error::NegativeRate {
                name: "kappa",
                value: self.kappa,
            });
        }
        if self.gamma < 0.0 {
            return Err(Error::NegativeRate {
                name: "gamma",
                value: self.gamma,
            });
        }
        Ok(())
    }
}

/// `δ* = (g² + √(g⁴ + 4J²Δ²)) / 2Δ`.
pub fn delta_star(g: f64, hopping: f64, atom_detuning: f64) -> Result<f64> {
    if atom_detuning <= 0.0 || !atom_detuning.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "delta_star needs Delta > 0, got {atom_detuning}"
        )));
    }
    let g2 = g * g;
    let root = (g2 * g2 + 4.0 * hopping * hopping * atom_detuning * atom_detuning).sqrt();
    Ok((g2 + root) / (2.0 * atom_detuning))
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn tr(atom: Atom, bra: AtomLevel, ket: AtomLevel) -> Factor {
    Factor::transition(atom, bra, ket)
}

fn total(dim: usize, terms: Vec<SparseOperator>) -> SparseOperator {
    crate::operator::sum(terms.iter()).unwrap_or_else(|| SparseOperator::zeros(dim))
}

/// Cavity detunings, atom–cavity couplings, excited-state detunings and hopping.
pub fn build_h0(params: &ModelParams, space: &StateSpace) -> Result<SparseOperator> {
    params.validate()?;
    let n = space.dim();
    let mut terms = Vec::new();
    for mode in ModeId::ALL {
        terms.push(lift_product(
            space,
            c(params.cavity_detuning),
            &[Factor::Create(mode), Factor::Annihilate(mode)],
        ));
    }
    let couplings = [
        (Atom::First, GL, E0, ModeId::AL1),
        (Atom::Second, G0, ER, ModeId::AL2),
        (Atom::First, GR, E0, ModeId::AR1),
        (Atom::Second, G0, EL, ModeId::AR2),
    ];
    for (atom, lower, upper, mode) in couplings {
        let up = lift_product(space, c(params.g), &[Factor::Create(mode), tr(atom, lower, upper)]);
        terms.push(up.adjoint());
        terms.push(up);
    }
    for (atom, level) in [(Atom::First, E0), (Atom::Second, EL), (Atom::Second, ER)] {
        terms.push(lift_atom_op(space, atom, level, level).scale_real(params.atom_detuning));
    }
    for (a, b) in [(ModeId::AL1, ModeId::AL2), (ModeId::AR1, ModeId::AR2)] {
        let hop = lift_product(space, c(params.hopping), &[Factor::Create(a), Factor::Annihilate(b)]);
        terms.push(hop.adjoint());
        terms.push(hop);
    }
    Ok(total(n, terms))
}

/// Microwave coupling of the ground levels, `ω` on atom 1 and `-ω` on atom 2.
pub fn build_hg(params: &ModelParams, space: &StateSpace) -> Result<SparseOperator> {
    params.validate()?;
    let w = params.microwave;
    let mut terms = Vec::new();
    for (atom, amp, hub) in [(Atom::First, w, Ga), (Atom::Second, -w, G0)] {
        for x in [GL, GR] {
            let op = lift_atom_op(space, atom, x, hub).scale_real(amp);
            terms.push(op.adjoint());
            terms.push(op);
        }
    }
    Ok(total(space.dim(), terms))
}

/// `(V₊, V₋)` with `V₊ = Ω(|e0⟩₁⟨ga| + |eL⟩₂⟨gL| + |eR⟩₂⟨gR|)`.
pub fn build_drive(params: &ModelParams, space: &StateSpace) -> Result<(SparseOperator, SparseOperator)> {
    params.validate()?;
    let vp = total(
        space.dim(),
        vec![
            lift_atom_op(space, Atom::First, E0, Ga),
            lift_atom_op(space, Atom::Second, EL, GL),
            lift_atom_op(space, Atom::Second, ER, GR),
        ],
    )
    .scale_real(params.drive);
    let vm = vp.adjoint();
    Ok((vp, vm))
}

pub fn build_h_full(params: &ModelParams, space: &StateSpace) -> Result<SparseOperator> {
    let (vp, vm) = build_drive(params, space)?;
    Ok(total(
        space.dim(),
        vec![build_h0(params, space)?, build_hg(params, space)?, vp, vm],
    ))
}

/// Annihilators of the delocalised modes, in [`DelocalizedMode::ALL`] order.
pub fn delocalized_modes(space: &StateSpace) -> [(DelocalizedMode, SparseOperator); 4] {
    DelocalizedMode::ALL.map(|m| {
        let [(a, sa), (b, sb)] = m.components();
        let op = &lift_mode_annihilator(space, a).scale_real(sa) + &lift_mode_annihilator(space, b).scale_real(sb);
        (m, op.scale_real(std::f64::consts::FRAC_1_SQRT_2))
    })
}

/// A jump operator with its rate folded in.
#[derive(Debug, Clone, PartialEq)]
pub struct CollapseChannel {
    pub label: String,
    pub operator: SparseOperator,
}

impl CollapseChannel {
    pub fn new(label: impl Into<String>, operator: SparseOperator) -> Self {
        CollapseChannel {
            label: label.into(),
            operator,
        }
    }
}

/// Cavity-loss and spontaneous-emission channels; zero-rate channels are left out.
pub fn build_collapse_channels(params: &ModelParams, space: &StateSpace) -> Result<Vec<CollapseChannel>> {
    params.validate()?;
    let mut out = Vec::new();
    if params.kappa > 0.0 {
        let s = params.kappa.sqrt();
        for (mode, op) in delocalized_modes(space) {
            out.push(CollapseChannel::new(format!("kappa.{}", mode.name()), op.scale_real(s)));
        }
    }
    if params.gamma > 0.0 {
        let s1 = (params.gamma / 3.0).sqrt();
        for x in [GL, Ga, GR] {
            out.push(CollapseChannel::new(
                format!("gamma1.{x}"),
                lift_atom_op(space, Atom::First, x, E0).scale_real(s1),
            ));
        }
        let s2 = (params.gamma / 2.0).sqrt();
        for (x, e) in [(GL, EL), (G0, EL), (GR, ER), (G0, ER)] {
            out.push(CollapseChannel::new(
                format!("gamma2.{x}_from_{e}"),
                lift_atom_op(space, Atom::Second, x, e).scale_real(s2),
            ));
        }
    }
    Ok(out)
}

/// The three symmetric ground-manifold states built from `|gL gR⟩`, `|gR gL⟩`, `|ga g0⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetStates {
    pub t1: StateVector,
    pub t2: StateVector,
    pub t3: StateVector,
}

pub fn target_states(space: &StateSpace) -> Result<TargetStates> {
    let lr = BasisState::ground(GL, GR);
    let rl = BasisState::ground(GR, GL);
    let a0 = BasisState::ground(Ga, G0);
    Ok(TargetStates {
        t1: StateVector::superposition(space, &[(lr, 1.0), (rl, 1.0), (a0, 1.0)])?,
        t2: StateVector::superposition(space, &[(lr, 1.0), (rl, 1.0), (a0, -2.0)])?,
        t3: StateVector::superposition(space, &[(lr, 1.0), (rl, -1.0)])?,
    })
}
