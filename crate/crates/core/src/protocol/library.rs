use std::sync::Arc;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::run::{Run, Sampled, Step};
use super::steps::{prepare_bell, prepare_k, prepare_phi, prepare_plus, prepare_phi_h, prepare_state2, r_half_state, Sign, DEFAULT_MAX_ATTEMPTS};
use crate::encoding::{EncodingKind, GateMatrix, QubitRegister, LEAK_TOL};
use crate::error::{Error, Result};
use crate::model::AnyonModelData;

const MAX_RETRIES: usize = 10_000;

/// Ancilla states produced once by running the preparation protocols with a fixed
/// seed and retrying discarded branches.
#[derive(Clone, Debug)]
pub struct AncillaLibrary {
    model: Arc<AnyonModelData>,
    pub two: QubitRegister,
    pub phi_plus_1: QubitRegister,
    pub phi_minus_3: QubitRegister,
    pub k: QubitRegister,
    pub plus: QubitRegister,
    pub bell: QubitRegister,
    pub phi_h: QubitRegister,
}

fn until_success(rng: &mut ChaCha8Rng, mut f: impl FnMut(&mut Run) -> Result<Step>) -> Result<QubitRegister> {
    for _ in 0..MAX_RETRIES {
        let mut driver = Sampled::new(&mut *rng);
        let mut run = Run::new(&mut driver);
        let step = f(&mut run)?;
        if step.is_success() {
            return step.into_register();
        }
    }
    Err(Error::Invalid(format!("no success after {MAX_RETRIES} retries")))
}

impl AncillaLibrary {
    pub fn new(model: &Arc<AnyonModelData>) -> Result<Self> {
        Self::with_seed(model, 0)
    }

    pub fn with_seed(model: &Arc<AnyonModelData>, seed: u64) -> Result<Self> {
        let rng = &mut ChaCha8Rng::seed_from_u64(seed);
        let m = model;
        let n = DEFAULT_MAX_ATTEMPTS;
        let fresh = QubitRegister::encode(m, &[false], EncodingKind::E1221)?;
        Ok(AncillaLibrary {
            model: model.clone(),
            two: until_success(rng, |r| prepare_state2(m, n, r))?,
            phi_plus_1: until_success(rng, |r| prepare_phi(m, Sign::Plus, n, r))?,
            phi_minus_3: until_success(rng, |r| prepare_phi(m, Sign::Minus, n, r))?,
            k: until_success(rng, |r| prepare_k(m, n, r))?,
            plus: until_success(rng, |r| prepare_plus(&fresh, 0, r))?,
            bell: until_success(rng, |r| prepare_bell(m, n, r))?,
            phi_h: until_success(rng, |r| prepare_phi_h(m, &GateMatrix::hadamard(), n, r))?,
        })
    }

    pub fn model(&self) -> &Arc<AnyonModelData> {
        &self.model
    }

    /// `(e^{-i phi/2}|1> + e^{i phi/2}|3>)/sqrt 2`.
    pub fn r_half(&self, phi: f64) -> Result<QubitRegister> {
        r_half_state(&self.model, phi)
    }

    /// `e^{i alpha}` read off the prepared `|K>` as the ratio of its amplitudes.
    pub fn k_phase(&self) -> Result<Complex64> {
        let v = self.k.logical_vector(LEAK_TOL)?;
        Ok(v[1] / v[0])
    }

    /// `K = diag(1, e^{i alpha})`, derived from the prepared `|K>`.
    pub fn k_gate(&self) -> Result<GateMatrix> {
        Ok(GateMatrix::diagonal(&[Complex64::new(1.0, 0.0), self.k_phase()?]))
    }
}
