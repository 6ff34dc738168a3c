//! Measurement-based protocols, runnable either with sampled outcomes or as an
//! exhaustive branch enumeration.

mod branch;
mod library;
mod run;
mod steps;

use std::collections::BTreeMap;

pub use branch::{branch_map, BranchTree, BranchTreeJson, Leaf, LeafJson, DEFAULT_MAX_BRANCHES};
pub use library::AncillaLibrary;
pub use run::{Driver, Run, Sampled, Scripted, Status, Step, StepRecord, BRANCH_EPS};
pub use steps::*;

use crate::encoding::QubitRegister;
use crate::error::Result;
use crate::state::AnyonState;

/// Everything observed in one run of a protocol.
#[derive(Clone, Debug)]
pub struct ProtocolOutcome {
    pub status: Status,
    pub records: Vec<StepRecord>,
    pub attempts: BTreeMap<String, u32>,
    pub info: BTreeMap<String, i64>,
    pub state: AnyonState,
    pub register: Option<QubitRegister>,
}

impl ProtocolOutcome {
    pub fn success(&self) -> bool {
        self.status == Status::Success
    }
}

/// Runs `protocol` with `driver` and collects the record.
pub fn execute<F>(driver: &mut dyn Driver, protocol: F) -> Result<ProtocolOutcome>
where
    F: FnOnce(&mut Run) -> Result<Step>,
{
    let mut run = Run::new(driver);
    let step = protocol(&mut run)?;
    Ok(ProtocolOutcome {
        status: step.status,
        records: run.records().to_vec(),
        attempts: run.attempts().clone(),
        info: run.info().clone(),
        state: step.state,
        register: step.register,
    })
}
