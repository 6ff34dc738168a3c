use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::encoding::QubitRegister;
use crate::error::{Error, Result};
use crate::model::Charge;
use crate::state::ops::sample_index;
use crate::state::AnyonState;

/// Conditional probabilities below this are treated as impossible branches.
pub const BRANCH_EPS: f64 = 1e-13;

/// Picks measurement outcomes for a protocol run.
pub trait Driver {
    /// Chooses an outcome given the conditional Born distribution at `step`.
    fn choose(&mut self, step: &str, dist: &[(Charge, f64)]) -> Result<Charge>;

    /// Whether post-measurement states are renormalized.
    fn renormalize(&self) -> bool {
        true
    }
}

/// Samples outcomes from an RNG.
pub struct Sampled<R> {
    rng: R,
}

impl<R: Rng> Sampled<R> {
    pub fn new(rng: R) -> Self {
        Sampled { rng }
    }

    pub fn into_inner(self) -> R {
        self.rng
    }
}

impl<R: Rng> Driver for Sampled<R> {
    fn choose(&mut self, _step: &str, dist: &[(Charge, f64)]) -> Result<Charge> {
        let w: Vec<f64> = dist.iter().map(|d| d.1).collect();
        Ok(dist[sample_index(&w, &mut self.rng)?].0)
    }
}

/// Replays a fixed outcome sequence without renormalizing, so the final state is
/// the linear image of the input under that branch.
pub struct Scripted {
    outcomes: Vec<Charge>,
    pos: usize,
}

impl Scripted {
    pub fn new(outcomes: Vec<Charge>) -> Self {
        Scripted { outcomes, pos: 0 }
    }

    /// Number of outcomes not yet consumed.
    pub fn remaining(&self) -> usize {
        self.outcomes.len() - self.pos
    }
}

impl Driver for Scripted {
    fn choose(&mut self, step: &str, dist: &[(Charge, f64)]) -> Result<Charge> {
        let c = *self.outcomes.get(self.pos).ok_or_else(|| Error::ScriptExhausted(step.to_string()))?;
        if !dist.iter().any(|d| d.0 == c) {
            return Err(Error::ScriptMismatch {
                step: step.to_string(),
                outcome: c,
            });
        }
        self.pos += 1;
        Ok(c)
    }

    fn renormalize(&self) -> bool {
        false
    }
}

/// Depth-first walker used by branch enumeration: follows a prefix, then takes the
/// first possible outcome, remembering the alternatives.
#[derive(Default)]
pub(crate) struct Explorer {
    prefix: Vec<Charge>,
    pub(crate) trail: Vec<(Vec<Charge>, usize)>,
}

impl Explorer {
    pub(crate) fn with_prefix(prefix: Vec<Charge>) -> Self {
        Explorer { prefix, trail: Vec::new() }
    }

    /// Prefix for the next unexplored branch, if any.
    pub(crate) fn next_prefix(&self) -> Option<Vec<Charge>> {
        let mut trail = self.trail.clone();
        while let Some((opts, idx)) = trail.pop() {
            if idx + 1 < opts.len() {
                let mut p: Vec<Charge> = trail.iter().map(|(o, i)| o[*i]).collect();
                p.push(opts[idx + 1]);
                return Some(p);
            }
        }
        None
    }
}

impl Driver for Explorer {
    fn choose(&mut self, step: &str, dist: &[(Charge, f64)]) -> Result<Charge> {
        let opts: Vec<Charge> = dist.iter().filter(|d| d.1 > BRANCH_EPS).map(|d| d.0).collect();
        if opts.is_empty() {
            return Err(Error::DegenerateState);
        }
        let depth = self.trail.len();
        let idx = match self.prefix.get(depth) {
            Some(c) => opts.iter().position(|o| o == c).ok_or_else(|| Error::ScriptMismatch {
                step: step.to_string(),
                outcome: *c,
            })?,
            None => 0,
        };
        self.trail.push((opts.clone(), idx));
        Ok(opts[idx])
    }
}

/// One measurement or fusion in a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: String,
    pub outcome: u8,
    /// Conditional Born probability of the outcome.
    pub prob: f64,
}

/// How a protocol ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Success,
    /// A branch the caller must discard or recycle.
    Discarded,
    /// A repeat-until-success loop ran out of attempts; the state is still valid.
    TimedOut,
}

/// Result of one protocol invocation.
#[derive(Clone, Debug)]
pub struct Step {
    pub status: Status,
    /// Final state; always present.
    pub state: AnyonState,
    /// Final register when the state sits in a known encoding.
    pub register: Option<QubitRegister>,
}

impl Step {
    pub fn success(register: QubitRegister) -> Self {
        Step {
            status: Status::Success,
            state: register.state().clone(),
            register: Some(register),
        }
    }

    pub fn ended(status: Status, register: QubitRegister) -> Self {
        Step {
            status,
            state: register.state().clone(),
            register: Some(register),
        }
    }

    pub fn discarded(state: AnyonState) -> Self {
        Step {
            status: Status::Discarded,
            state,
            register: None,
        }
    }

    pub fn is_success(&self) -> bool {
        self.status == Status::Success
    }

    /// The register of a successful step.
    pub fn into_register(self) -> Result<QubitRegister> {
        match (self.status, self.register) {
            (Status::Success, Some(r)) => Ok(r),
            (s, _) => Err(Error::Precondition(format!("protocol ended with {s:?}"))),
        }
    }
}

/// Bookkeeping shared by the steps of one protocol run.
pub struct Run<'d> {
    driver: &'d mut dyn Driver,
    records: Vec<StepRecord>,
    attempts: BTreeMap<String, u32>,
    info: BTreeMap<String, i64>,
}

impl<'d> Run<'d> {
    pub fn new(driver: &'d mut dyn Driver) -> Self {
        Run {
            driver,
            records: Vec::new(),
            attempts: BTreeMap::new(),
            info: BTreeMap::new(),
        }
    }

    pub fn renormalize(&self) -> bool {
        self.driver.renormalize()
    }

    pub fn records(&self) -> &[StepRecord] {
        &self.records
    }

    pub fn attempts(&self) -> &BTreeMap<String, u32> {
        &self.attempts
    }

    pub fn info(&self) -> &BTreeMap<String, i64> {
        &self.info
    }

    /// Counts one more attempt of the loop `name`.
    pub fn attempt(&mut self, name: &str) {
        *self.attempts.entry(name.to_string()).or_insert(0) += 1;
    }

    pub fn note(&mut self, key: &str, value: i64) {
        self.info.insert(key.to_string(), value);
    }

    fn decide(&mut self, step: &str, weights: Vec<(Charge, f64)>) -> Result<(Charge, f64)> {
        let total: f64 = weights.iter().map(|w| w.1).sum();
        let dist: Vec<(Charge, f64)> = if total > 0.0 {
            weights.iter().map(|&(c, p)| (c, p / total)).collect()
        } else {
            weights.iter().map(|&(c, _)| (c, 0.0)).collect()
        };
        let outcome = self.driver.choose(step, &dist)?;
        let prob = dist.iter().find(|d| d.0 == outcome).map_or(0.0, |d| d.1);
        self.records.push(StepRecord {
            step: step.to_string(),
            outcome: outcome.0,
            prob,
        });
        Ok((outcome, prob))
    }

    fn finish(&self, st: AnyonState) -> Result<AnyonState> {
        if self.renormalize() {
            st.normalized()
        } else {
            Ok(st)
        }
    }

    /// Measures the collective charge of a contiguous range.
    pub fn measure(&mut self, step: &str, st: &AnyonState, range: RangeInclusive<usize>) -> Result<(Charge, AnyonState)> {
        let weights = st.charge_distribution(range.clone())?;
        let (outcome, _) = self.decide(step, weights)?;
        let (_, proj) = st.project_charge(range, outcome)?;
        Ok((outcome, self.finish(proj)?))
    }

    /// Fuses particles `i` and `i + 1` and observes the outcome.
    pub fn fuse(&mut self, step: &str, st: &AnyonState, i: usize) -> Result<(Charge, AnyonState)> {
        let weights = st.fusion_distribution(i)?;
        let (outcome, _) = self.decide(step, weights)?;
        let (_, fused) = st.fuse_to(i, outcome)?;
        Ok((outcome, self.finish(fused)?))
    }
}
