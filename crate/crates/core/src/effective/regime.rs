//! Advisory check of the inequalities behind the adiabatic elimination.

use crate::model::ModelParams;

/// Ratios at or above this count as "much larger".
const MUCH_LARGER: f64 = 10.0;

#[derive(Debug, Clone, PartialEq)]
pub struct RegimeCheck {
    pub name: &'static str,
    /// Large side over small side; infinite when the small side vanishes.
    pub ratio: f64,
    pub required: f64,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegimeReport {
    pub checks: Vec<RegimeCheck>,
}

impl RegimeReport {
    pub fn all_satisfied(&self) -> bool {
        self.checks.iter().all(|c| c.satisfied)
    }

    pub fn get(&self, name: &str) -> Option<&RegimeCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn violations(&self) -> Vec<&RegimeCheck> {
        self.checks.iter().filter(|c| !c.satisfied).collect()
    }
}

fn ratio(big: f64, small: f64) -> f64 {
    if small == 0.0 {
        f64::INFINITY
    } else {
        big / small
    }
}

fn check(name: &'static str, ratio: f64, required: f64) -> RegimeCheck {
    RegimeCheck {
        name,
        ratio,
        required,
        satisfied: ratio >= required,
    }
}

/// Evaluates `Δ ≫ γ`, `δΔ ≥ 2g²`, `ω ≫ Ω²` and `δ ≫ κ`; nothing is enforced.
pub fn regime_check(p: &ModelParams) -> RegimeReport {
    RegimeReport {
        checks: vec![
            check("Delta >> gamma", ratio(p.atom_detuning, p.gamma), MUCH_LARGER),
            check(
                "delta*Delta >= 2g^2",
                ratio(p.cavity_detuning * p.atom_detuning, 2.0 * p.g * p.g),
                1.0,
            ),
            check("omega >> Omega^2", ratio(p.microwave, p.drive * p.drive), MUCH_LARGER),
            check("delta >> kappa", ratio(p.cavity_detuning, p.kappa), MUCH_LARGER),
        ],
    }
}
