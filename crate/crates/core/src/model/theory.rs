use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Family of the anyon theory.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Su2,
    Jk,
    Su2Conjugate,
    JkConjugate,
}

impl Family {
    pub fn is_jk(self) -> bool {
        matches!(self, Family::Jk | Family::JkConjugate)
    }

    pub fn is_conjugate(self) -> bool {
        matches!(self, Family::Su2Conjugate | Family::JkConjugate)
    }

    /// The family with all phases conjugated.
    pub fn conjugate(self) -> Family {
        match self {
            Family::Su2 => Family::Su2Conjugate,
            Family::Jk => Family::JkConjugate,
            Family::Su2Conjugate => Family::Su2,
            Family::JkConjugate => Family::Jk,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Su2 => "su2",
            Family::Jk => "jk",
            Family::Su2Conjugate => "su2-conjugate",
            Family::JkConjugate => "jk-conjugate",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A topological charge label in `0..=k`.
///
/// For SU(2)_k the label stores `2j`, so spin 1/2 is `Charge(1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Charge(pub u8);

impl Charge {
    pub const VACUUM: Charge = Charge(0);

    pub fn value(self) -> u8 {
        self.0
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn is_vacuum(self) -> bool {
        self.0 == 0
    }

    /// Label for SU(2) spin `j` (must be a non-negative multiple of 1/2).
    pub fn from_spin(j: f64) -> Result<Charge> {
        let two_j = 2.0 * j;
        if two_j < 0.0 || (two_j - two_j.round()).abs() > 1e-12 || two_j > 255.0 {
            return Err(Error::Invalid(format!("spin {j} is not a half-integer label")));
        }
        Ok(Charge(two_j.round() as u8))
    }

    pub fn spin(self) -> f64 {
        self.0 as f64 / 2.0
    }
}

impl From<u8> for Charge {
    fn from(v: u8) -> Self {
        Charge(v)
    }
}

impl fmt::Display for Charge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Largest supported level; labels must fit in a `u8`.
pub const MAX_LEVEL: u32 = 254;

/// Family plus level. Deformation parameters are derived on demand.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TheorySpec {
    family: Family,
    level: u32,
}

impl TheorySpec {
    pub fn new(family: Family, level: u32) -> Result<Self> {
        if level == 0 || level > MAX_LEVEL {
            return Err(Error::InvalidLevel(level));
        }
        Ok(TheorySpec { family, level })
    }

    /// JK_k. Panics if `level` is 0.
    pub fn jk(level: u32) -> Self {
        Self::new(Family::Jk, level).expect("level must be positive")
    }

    /// SU(2)_k. Panics if `level` is 0.
    pub fn su2(level: u32) -> Self {
        Self::new(Family::Su2, level).expect("level must be positive")
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn conjugate(&self) -> TheorySpec {
        TheorySpec {
            family: self.family.conjugate(),
            level: self.level,
        }
    }

    pub fn num_charges(&self) -> usize {
        self.level as usize + 1
    }

    pub fn charges(&self) -> impl Iterator<Item = Charge> + Clone {
        (0..=self.level as u8).map(Charge)
    }

    pub fn check_charge(&self, c: Charge) -> Result<Charge> {
        if u32::from(c.0) > self.level {
            Err(Error::InvalidCharge {
                charge: c.0 as u32,
                level: self.level,
            })
        } else {
            Ok(c)
        }
    }

    /// pi / (k + 2)
    pub fn angle(&self) -> f64 {
        PI / (self.level as f64 + 2.0)
    }

    /// q = exp(i 2 pi / (k+2)), conjugated for conjugate families.
    pub fn q(&self) -> Complex64 {
        let q = Complex64::from_polar(1.0, 2.0 * self.angle());
        if self.family.is_conjugate() {
            q.conj()
        } else {
            q
        }
    }

    /// A = i exp(-i pi / (2(k+2))), conjugated for conjugate families.
    pub fn kauffman_a(&self) -> Complex64 {
        let a = Complex64::i() * Complex64::from_polar(1.0, -self.angle() / 2.0);
        if self.family.is_conjugate() {
            a.conj()
        } else {
            a
        }
    }
}

impl fmt::Display for TheorySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}", self.family, self.level)
    }
}
