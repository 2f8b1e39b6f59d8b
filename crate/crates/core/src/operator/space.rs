//! Truncated product basis: two seven-level atoms and four bosonic modes.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// Internal level of one atom, in basis order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AtomLevel {
    GL,
    G0,
    GR,
    Ga,
    EL,
    E0,
    ER,
}

impl AtomLevel {
    pub const ALL: [AtomLevel; 7] = [
        AtomLevel::GL,
        AtomLevel::G0,
        AtomLevel::GR,
        AtomLevel::Ga,
        AtomLevel::EL,
        AtomLevel::E0,
        AtomLevel::ER,
    ];

    pub const GROUND: [AtomLevel; 4] = [AtomLevel::GL, AtomLevel::G0, AtomLevel::GR, AtomLevel::Ga];

    pub fn ordinal(self) -> usize {
        self as usize
    }

    pub fn is_excited(self) -> bool {
        matches!(self, AtomLevel::EL | AtomLevel::E0 | AtomLevel::ER)
    }

    pub fn excitation(self) -> u32 {
        u32::from(self.is_excited())
    }

    pub fn name(self) -> &'static str {
        match self {
            AtomLevel::GL => "gL",
            AtomLevel::G0 => "g0",
            AtomLevel::GR => "gR",
            AtomLevel::Ga => "ga",
            AtomLevel::EL => "eL",
            AtomLevel::E0 => "e0",
            AtomLevel::ER => "eR",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        AtomLevel::ALL.into_iter().find(|l| l.name() == name)
    }
}

impl fmt::Display for AtomLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Which atom a local operator acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Atom {
    First,
    Second,
}

/// Local cavity mode: `L`/`R` polarisation in cavity 1 or 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModeId {
    AL1,
    AL2,
    AR1,
    AR2,
}

impl ModeId {
    pub const ALL: [ModeId; 4] = [ModeId::AL1, ModeId::AL2, ModeId::AR1, ModeId::AR2];

    pub fn slot(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            ModeId::AL1 => "aL1",
            ModeId::AL2 => "aL2",
            ModeId::AR1 => "aR1",
            ModeId::AR2 => "aR2",
        }
    }
}

/// Delocalised normal modes of the hopping term, `c = (a_1 ∓ a_2)/√2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DelocalizedMode {
    CL1,
    CL2,
    CR1,
    CR2,
}

impl DelocalizedMode {
    pub const ALL: [DelocalizedMode; 4] = [
        DelocalizedMode::CL1,
        DelocalizedMode::CL2,
        DelocalizedMode::CR1,
        DelocalizedMode::CR2,
    ];

    /// The two local modes and their coefficients (before the 1/√2).
    pub fn components(self) -> [(ModeId, f64); 2] {
        match self {
            DelocalizedMode::CL1 => [(ModeId::AL1, 1.0), (ModeId::AL2, -1.0)],
            DelocalizedMode::CL2 => [(ModeId::AL1, 1.0), (ModeId::AL2, 1.0)],
            DelocalizedMode::CR1 => [(ModeId::AR1, 1.0), (ModeId::AR2, -1.0)],
            DelocalizedMode::CR2 => [(ModeId::AR1, 1.0), (ModeId::AR2, 1.0)],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DelocalizedMode::CL1 => "cL1",
            DelocalizedMode::CL2 => "cL2",
            DelocalizedMode::CR1 => "cR1",
            DelocalizedMode::CR2 => "cR2",
        }
    }
}

/// One product state `|atom1, atom2; n_aL1 n_aL2 n_aR1 n_aR2⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisState {
    pub atom1: AtomLevel,
    pub atom2: AtomLevel,
    pub photons: [u32; 4],
}

impl BasisState {
    pub fn ground(atom1: AtomLevel, atom2: AtomLevel) -> Self {
        BasisState {
            atom1,
            atom2,
            photons: [0; 4],
        }
    }

    pub fn with_photon(mut self, mode: ModeId) -> Self {
        self.photons[mode.slot()] += 1;
        self
    }

    pub fn excitation(&self) -> u32 {
        self.atom1.excitation() + self.atom2.excitation() + self.photons.iter().sum::<u32>()
    }

    pub fn atom(&self, atom: Atom) -> AtomLevel {
        match atom {
            Atom::First => self.atom1,
            Atom::Second => self.atom2,
        }
    }

    pub(crate) fn set_atom(&mut self, atom: Atom, level: AtomLevel) {
        match atom {
            Atom::First => self.atom1 = level,
            Atom::Second => self.atom2 = level,
        }
    }

    pub fn is_vacuum(&self) -> bool {
        self.photons.iter().all(|&n| n == 0)
    }

    /// Compact label such as `gagL` or `e0gL|aL1`.
    pub fn label(&self) -> String {
        let mut s = format!("{}{}", self.atom1, self.atom2);
        for mode in ModeId::ALL {
            match self.photons[mode.slot()] {
                0 => {}
                1 => {
                    s.push('|');
                    s.push_str(mode.name());
                }
                n => s.push_str(&format!("|{}^{}", mode.name(), n)),
            }
        }
        s
    }
}

impl fmt::Display for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Excitation-truncated basis with index lookup.
///
/// Ordering is lexicographic in `(atom1, atom2, photons)`, so two spaces built
/// from the same arguments are identical.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpace {
    states: Vec<BasisState>,
    index: HashMap<BasisState, usize>,
    max_excitation: u32,
    per_mode_cap: u32,
}

impl StateSpace {
    pub fn new(max_excitation: u32, per_mode_cap: u32) -> Result<Self> {
        if max_excitation == 0 {
            return Err(Error::InvalidSpace(
                "max_excitation must be at least 1; the drive needs the single-excitation manifold".into(),
            ));
        }
        if per_mode_cap == 0 {
            return Err(Error::InvalidSpace("per_mode_cap must be at least 1".into()));
        }
        Ok(Self::enumerate(max_excitation, per_mode_cap))
    }

    /// The sixteen two-atom ground states with vacuum photons.
    pub fn ground_manifold() -> Self {
        Self::enumerate(0, 0)
    }

    fn enumerate(max_excitation: u32, per_mode_cap: u32) -> Self {
        let mut states = Vec::new();
        for a1 in AtomLevel::ALL {
            for a2 in AtomLevel::ALL {
                let atoms = a1.excitation() + a2.excitation();
                if atoms > max_excitation {
                    continue;
                }
                let budget = max_excitation - atoms;
                for_each_occupation(per_mode_cap.min(budget), budget, |photons| {
                    states.push(BasisState {
                        atom1: a1,
                        atom2: a2,
                        photons,
                    });
                });
            }
        }
        let index = states.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        StateSpace {
            states,
            index,
            max_excitation,
            per_mode_cap,
        }
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[BasisState] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &BasisState {
        &self.states[i]
    }

    pub fn index_of(&self, state: &BasisState) -> Option<usize> {
        self.index.get(state).copied()
    }

    pub fn max_excitation(&self) -> u32 {
        self.max_excitation
    }

    pub fn per_mode_cap(&self) -> u32 {
        self.per_mode_cap
    }

    /// Index of a vacuum two-atom state, if present.
    pub fn ground_index(&self, atom1: AtomLevel, atom2: AtomLevel) -> Option<usize> {
        self.index_of(&BasisState::ground(atom1, atom2))
    }

    /// Indices with excitation number zero, in basis order.
    pub fn ground_indices(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.states[i].excitation() == 0).collect()
    }

    pub fn contains(&self, state: &BasisState) -> bool {
        self.index.contains_key(state)
    }
}

/// Calls `f` for every photon tuple with entries `≤ cap` and sum `≤ budget`,
/// in lexicographic order.
fn for_each_occupation(cap: u32, budget: u32, mut f: impl FnMut([u32; 4])) {
    for n0 in 0..=cap {
        for n1 in 0..=cap {
            for n2 in 0..=cap {
                for n3 in 0..=cap {
                    if n0 + n1 + n2 + n3 <= budget {
                        f([n0, n1, n2, n3]);
                    }
                }
            }
        }
    }
}
