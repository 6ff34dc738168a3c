//! Finite gate groups, density evidence, random-walk statistics and word synthesis.

mod group;
mod index;
mod synth;
mod walk;

use std::sync::Arc;

pub use group::{close_group, continued_fraction, density_witness, group_commutator, Closure, ClosureJson, DensityReport, CLOSURE_CAP, CLOSURE_TOL};
pub use synth::{synthesize_word, Alphabet, GateWord, Letter, SynthJson, Synthesis, HALF_WORD_CAP, MAX_SYNTH_LENGTH};
pub use walk::{
    bqp_budget, bqp_limit, bqp_limit_constant, ln_never_negative, odd_double_factorial_ratio, path_counts, walk_exact, walk_monte_carlo, BqpReport, BqpRow,
    MonteCarlo, WalkJson, WalkStats, EXACT_M_LIMIT, MC_CHUNK, RECURRENCE_M_LIMIT,
};

use crate::encoding::{GateMatrix, JkGates};
use crate::error::{Error, Result};
use crate::model::AnyonModelData;
use crate::protocol::AncillaLibrary;

/// The JK_4 gates used by the analysis commands, including `K` read off a prepared `|K>`.
#[derive(Clone, Debug)]
pub struct GateSet {
    pub gates: JkGates,
    pub k: GateMatrix,
}

/// Named generator sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeneratorSet {
    /// `{R, G}` on 1111.
    Braid1111,
    /// `{Z, B}` on 1221.
    Braid1221,
    /// `{X, Z, B}` on 1221.
    Xzb,
    /// `{Z, B, K}` on 1221.
    Zbk,
}

impl std::str::FromStr for GeneratorSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "braid1111" => Ok(GeneratorSet::Braid1111),
            "braid1221" => Ok(GeneratorSet::Braid1221),
            "xzb" => Ok(GeneratorSet::Xzb),
            "zbk" => Ok(GeneratorSet::Zbk),
            _ => Err(Error::Invalid(format!("unknown generator set '{s}'"))),
        }
    }
}

impl GateSet {
    pub fn new(model: &Arc<AnyonModelData>) -> Result<Self> {
        let gates = JkGates::new(model)?;
        let k = AncillaLibrary::new(model)?.k_gate()?;
        Ok(GateSet { gates, k })
    }

    pub fn generators(&self, set: GeneratorSet) -> Vec<GateMatrix> {
        let g = &self.gates;
        match set {
            GeneratorSet::Braid1111 => vec![g.r.clone(), g.g.clone()],
            GeneratorSet::Braid1221 => vec![g.z.clone(), g.b.clone()],
            GeneratorSet::Xzb => vec![g.x.clone(), g.z.clone(), g.b.clone()],
            GeneratorSet::Zbk => vec![g.z.clone(), g.b.clone(), self.k.clone()],
        }
    }

    pub fn alphabet(&self, letters: &[Letter]) -> Result<Alphabet> {
        Alphabet::new(letters, &self.gates.z, &self.gates.b, &self.k, &self.gates.x)
    }

    pub fn density_witness(&self) -> Result<DensityReport> {
        density_witness(&self.gates.b, &self.k)
    }
}
