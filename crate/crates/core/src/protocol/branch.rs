use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use super::run::{Explorer, Run, Scripted, Status, Step, StepRecord};
use crate::encoding::{index_bits, EncodingKind, QubitRegister, LEAK_TOL};
use crate::error::{Error, Result};
use crate::model::{AnyonModelData, Charge};

/// Default cap on enumerated leaves.
pub const DEFAULT_MAX_BRANCHES: usize = 1 << 16;

/// One complete outcome sequence of a protocol.
#[derive(Clone, Debug)]
pub struct Leaf {
    pub records: Vec<StepRecord>,
    /// Product of the conditional probabilities along the branch.
    pub probability: f64,
    pub status: Status,
    pub info: BTreeMap<String, i64>,
    pub attempts: BTreeMap<String, u32>,
    /// Normalized final state of the branch.
    pub step: Step,
}

impl Leaf {
    pub fn outcomes(&self) -> Vec<Charge> {
        self.records.iter().map(|r| Charge(r.outcome)).collect()
    }

    /// Outcome labels as a compact key such as `"switch.x=1,switch.y=2"`.
    pub fn key(&self) -> String {
        self.records
            .iter()
            .map(|r| format!("{}={}", r.step, r.outcome))
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// Exhaustive enumeration of a protocol's measurement outcomes.
#[derive(Clone, Debug)]
pub struct BranchTree {
    pub leaves: Vec<Leaf>,
}

impl BranchTree {
    /// Runs `protocol` once per branch, depth first.
    pub fn enumerate<F>(mut protocol: F, max_branches: usize) -> Result<Self>
    where
        F: FnMut(&mut Run) -> Result<Step>,
    {
        let mut leaves = Vec::new();
        let mut prefix = Some(Vec::new());
        while let Some(p) = prefix {
            if leaves.len() >= max_branches {
                return Err(Error::TooManyBranches(max_branches));
            }
            let mut explorer = Explorer::with_prefix(p);
            let (step, records, info, attempts) = {
                let mut run = Run::new(&mut explorer);
                let step = protocol(&mut run)?;
                (step, run.records().to_vec(), run.info().clone(), run.attempts().clone())
            };
            let probability = records.iter().map(|r| r.prob).product();
            leaves.push(Leaf {
                records,
                probability,
                status: step.status,
                info,
                attempts,
                step,
            });
            prefix = explorer.next_prefix();
        }
        Ok(BranchTree { leaves })
    }

    pub fn total_probability(&self) -> f64 {
        self.leaves.iter().map(|l| l.probability).sum()
    }

    pub fn probability_where(&self, pred: impl Fn(&Leaf) -> bool) -> f64 {
        self.leaves.iter().filter(|l| pred(l)).map(|l| l.probability).sum()
    }

    /// Total probability per status.
    pub fn status_probabilities(&self) -> BTreeMap<Status, f64> {
        let mut m = BTreeMap::new();
        for l in &self.leaves {
            *m.entry(l.status).or_insert(0.0) += l.probability;
        }
        m
    }

    pub fn to_json(&self) -> BranchTreeJson {
        BranchTreeJson {
            total_probability: self.total_probability(),
            leaves: self
                .leaves
                .iter()
                .map(|l| LeafJson {
                    outcomes: l.records.clone(),
                    probability: l.probability,
                    status: l.status,
                    info: l.info.clone(),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LeafJson {
    pub outcomes: Vec<StepRecord>,
    pub probability: f64,
    pub status: Status,
    pub info: BTreeMap<String, i64>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BranchTreeJson {
    pub total_probability: f64,
    pub leaves: Vec<LeafJson>,
}

/// Linear map realised by one branch: each logical basis state of `layout` is pushed
/// through `protocol` with the outcomes forced to `outcomes` and no renormalization.
/// Columns follow the input basis order; rows the output register's basis.
pub fn branch_map<F>(model: &Arc<AnyonModelData>, layout: &[EncodingKind], outcomes: &[Charge], mut protocol: F) -> Result<DMatrix<Complex64>>
where
    F: FnMut(&QubitRegister, &mut Run) -> Result<Step>,
{
    let n: usize = layout.iter().map(|k| k.num_qubits()).sum();
    let mut columns = Vec::with_capacity(1 << n);
    for idx in 0..1usize << n {
        let input = QubitRegister::encode_layout(model, layout, &index_bits(idx, n))?;
        let mut driver = Scripted::new(outcomes.to_vec());
        let step = {
            let mut run = Run::new(&mut driver);
            protocol(&input, &mut run)?
        };
        if driver.remaining() != 0 {
            return Err(Error::Invalid(format!("branch ended with {} unused outcomes", driver.remaining())));
        }
        let reg = step
            .register
            .ok_or_else(|| Error::Precondition("branch does not end in an encoded register".into()))?;
        columns.push(reg.logical_vector(LEAK_TOL)?);
    }
    let rows = columns[0].len();
    Ok(DMatrix::from_fn(rows, columns.len(), |r, c| columns[c][r]))
}
