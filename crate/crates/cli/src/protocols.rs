use std::sync::Arc;

use anyonkit::encoding::{EncodingKind, GateMatrix, QubitRegister};
use anyonkit::model::AnyonModelData;
use anyonkit::protocol::*;
use anyonkit::{Error, Result};

use crate::args::{ProtocolArgs, ProtocolName};

impl ProtocolName {
    pub fn label(self) -> &'static str {
        match self {
            ProtocolName::SwitchEncoding => "switch-encoding",
            ProtocolName::Merge => "merge",
            ProtocolName::Split => "split",
            ProtocolName::Tqf => "tqf",
            ProtocolName::PhaseGate => "phase-gate",
            ProtocolName::PrepareState2 => "prepare-state2",
            ProtocolName::PreparePhi => "prepare-phi",
            ProtocolName::PrepareK => "prepare-k",
            ProtocolName::PreparePlus => "prepare-plus",
            ProtocolName::KWalk => "k-walk",
            ProtocolName::Bell => "bell",
            ProtocolName::PhiH => "phi-h",
            ProtocolName::Cz => "cz",
        }
    }

    /// Input register layout; empty for preparations from the vacuum.
    fn layout(self) -> Vec<EncodingKind> {
        use EncodingKind::*;
        match self {
            ProtocolName::SwitchEncoding => vec![E1111],
            ProtocolName::Merge | ProtocolName::Cz => vec![E1221, E1221],
            ProtocolName::Split | ProtocolName::Tqf => vec![E122221],
            ProtocolName::PhaseGate | ProtocolName::KWalk | ProtocolName::PreparePlus => vec![E1221],
            _ => vec![],
        }
    }
}

/// Everything a protocol needs besides the driver.
pub struct Setup {
    pub name: ProtocolName,
    model: Arc<AnyonModelData>,
    input: Option<QubitRegister>,
    ancilla: Option<QubitRegister>,
    max_attempts: u32,
    cutoff: CutoffPolicy,
    sign: Sign,
}

impl Setup {
    pub fn new(args: &ProtocolArgs, default_attempts: u32) -> Result<Self> {
        let model = Arc::new(anyonkit::model::AnyonModelData::new(anyonkit::model::TheorySpec::jk(4))?);
        let layout = args.name.layout();
        let input = if layout.is_empty() {
            if args.input.is_some() {
                return Err(Error::Invalid(format!("{} takes no input", args.name.label())));
            }
            None
        } else {
            let n: usize = layout.iter().map(|k| k.num_qubits()).sum();
            let bits: Vec<bool> = match &args.input {
                None => vec![false; n],
                Some(s) => s
                    .chars()
                    .map(|ch| match ch {
                        '0' => Ok(false),
                        '1' => Ok(true),
                        _ => Err(Error::Invalid(format!("input must be a bitstring, got '{s}'"))),
                    })
                    .collect::<Result<_>>()?,
            };
            if bits.len() != n {
                return Err(Error::Invalid(format!("{} expects {n} input bits, got {}", args.name.label(), bits.len())));
            }
            Some(QubitRegister::encode_layout(&model, &layout, &bits)?)
        };
        let ancilla = match args.name {
            ProtocolName::PhaseGate => Some(r_half_state(&model, args.phi)?),
            ProtocolName::KWalk => Some(AncillaLibrary::new(&model)?.k),
            ProtocolName::Cz => Some(AncillaLibrary::new(&model)?.phi_h),
            _ => None,
        };
        let cutoff = match args.k {
            Some(k) => CutoffPolicy::KSquared(k),
            None => CutoffPolicy::Fixed(args.cutoff),
        };
        Ok(Setup {
            name: args.name,
            model,
            input,
            ancilla,
            max_attempts: args.max_attempts.unwrap_or(default_attempts),
            cutoff,
            sign: if args.minus { Sign::Minus } else { Sign::Plus },
        })
    }

    pub fn run(&self, run: &mut Run) -> Result<Step> {
        let m = &self.model;
        let n = self.max_attempts;
        let input = || self.input.as_ref().expect("protocol has an input");
        let ancilla = || self.ancilla.as_ref().expect("protocol has an ancilla");
        match self.name {
            ProtocolName::SwitchEncoding => switch_encoding(input(), 0, run),
            ProtocolName::Merge => merge(input(), 0, n, run),
            ProtocolName::Split => split(input(), 0, n, run),
            ProtocolName::Tqf => tqf(input(), 0, n, run),
            ProtocolName::PhaseGate => phase_gate(input(), 0, ancilla(), n, run),
            ProtocolName::PrepareState2 => prepare_state2(m, n, run),
            ProtocolName::PreparePhi => prepare_phi(m, self.sign, n, run),
            ProtocolName::PrepareK => prepare_k(m, n, run),
            ProtocolName::PreparePlus => prepare_plus(input(), 0, run),
            ProtocolName::KWalk => k_gate_random_walk(input(), 0, ancilla(), self.cutoff, n, run),
            ProtocolName::Bell => prepare_bell(m, n, run),
            ProtocolName::PhiH => prepare_phi_h(m, &GateMatrix::hadamard(), n, run),
            ProtocolName::Cz => apply_cz(input(), 0, 1, ancilla(), 1e-9, n, run),
        }
    }
}
