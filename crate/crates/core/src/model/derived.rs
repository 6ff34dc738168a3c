use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use super::data::AnyonModelData;
use super::theory::Charge;
use crate::error::{Error, Result};

/// Quantum dimensions, total dimension, twists, S-matrix and Frobenius-Schur indicators.
#[derive(Clone, Debug, Serialize)]
pub struct DerivedInvariants {
    pub qdims: Vec<f64>,
    pub total_dim: f64,
    pub twists: Vec<Complex64>,
    #[serde(skip)]
    pub s_matrix: DMatrix<Complex64>,
    pub frob_schur: Vec<i8>,
}

/// Collects the invariants and re-runs the cross-checks at `tol`.
pub fn derived_invariants(model: &AnyonModelData, tol: f64) -> Result<DerivedInvariants> {
    cross_check(model, tol)?;
    Ok(DerivedInvariants {
        qdims: model.qdims().to_vec(),
        total_dim: model.total_dim(),
        twists: model.twists().to_vec(),
        s_matrix: model.s_matrix().clone(),
        frob_schur: model.frobenius_schur_indicators().to_vec(),
    })
}

/// S-matrix from the twist-weighted fusion sum
/// `S_ab = D^{-1} sum_c N_{ab}^c theta_c / (theta_a theta_b) d_c`.
pub fn s_from_twists(model: &AnyonModelData) -> DMatrix<Complex64> {
    let n = model.num_charges();
    DMatrix::from_fn(n, n, |i, j| {
        let (a, b) = (Charge(i as u8), Charge(j as u8));
        let mut s = Complex64::new(0.0, 0.0);
        for c in model.fusion_outcomes(model.dual(a), b) {
            s += model.twist(c) / (model.twist(a) * model.twist(b)) * model.qdim(c);
        }
        s / model.total_dim()
    })
}

/// Twist from the R-symbols: `theta_a = sum_c (d_c / d_a) R^{aa}_c`.
pub fn twist_from_r(model: &AnyonModelData, a: Charge) -> Complex64 {
    model
        .fusion_outcomes(a, a)
        .map(|c| model.r_or_zero(a, a, c) * (model.qdim(c) / model.qdim(a)))
        .sum()
}

fn fail(check: &str, residual: f64, indices: Vec<u8>) -> Error {
    Error::Inconsistent {
        check: check.to_string(),
        residual,
        indices,
    }
}

pub(crate) fn cross_check(model: &AnyonModelData, tol: f64) -> Result<()> {
    let jk = model.spec().family().is_jk();
    let d2: f64 = model.qdims().iter().map(|d| d * d).sum();
    let r = (model.total_dim().powi(2) - d2).abs();
    if r > tol {
        return Err(fail("total-dimension", r, vec![]));
    }
    for a in model.charges() {
        let fa = model.f(a, a, a, a, Charge(0), Charge(0));
        let r = (model.qdim(a) * fa.norm() - 1.0).abs();
        if r > tol {
            return Err(fail("qdim-from-f", r, vec![a.0]));
        }
        let kappa = if jk || a.0 % 2 == 0 { 1 } else { -1 };
        if model.frobenius_schur(a) != kappa {
            return Err(fail("frobenius-schur", 2.0, vec![a.0]));
        }
        let r = (twist_from_r(model, a) - model.twist(a)).norm();
        if r > tol {
            return Err(fail("twist-from-r", r, vec![a.0]));
        }
        if model.qdim(a) < 1.0 - tol {
            return Err(fail("qdim-lower-bound", 1.0 - model.qdim(a), vec![a.0]));
        }
    }
    let st = s_from_twists(model);
    let diff = &st - model.s_matrix();
    let (mut worst, mut at) = (0.0, (0, 0));
    for i in 0..diff.nrows() {
        for j in 0..diff.ncols() {
            if diff[(i, j)].norm() > worst {
                worst = diff[(i, j)].norm();
                at = (i, j);
            }
        }
    }
    if worst > tol {
        return Err(fail("s-from-twists", worst, vec![at.0 as u8, at.1 as u8]));
    }
    Ok(())
}
