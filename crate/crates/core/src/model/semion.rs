use num_complex::Complex64;
use serde::Serialize;

use super::data::AnyonModelData;
use super::theory::{Charge, TheorySpec};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct SemionGluingReport {
    pub level: u32,
    pub twist_residual: f64,
    pub s_residual: f64,
    /// Worst pair `(a, b)` for the S comparison.
    pub worst_s: (u8, u8),
}

/// Checks that SU(2)_k equals conj(JK_k) times a semion restricted to pairs
/// `(a, a mod 2)`, comparing twists and S-matrices.
///
/// The semion factor is SU(2)_1 (twist `+i` on the nontrivial charge).
pub fn semion_gluing_check(level: u32, tol: f64) -> Result<SemionGluingReport> {
    let su2 = AnyonModelData::new(TheorySpec::su2(level))?;
    let jk_bar = AnyonModelData::new(TheorySpec::jk(level).conjugate())?;
    let semion = AnyonModelData::new(TheorySpec::su2(1))?;
    gluing_residuals(&su2, &jk_bar, &semion, tol)
}

/// Residuals of `target = glued(base x semion)` over the restricted charge set.
pub fn gluing_residuals(
    target: &AnyonModelData,
    base: &AnyonModelData,
    semion: &AnyonModelData,
    tol: f64,
) -> Result<SemionGluingReport> {
    if target.level() != base.level() || semion.level() != 1 {
        return Err(Error::Precondition("gluing needs matching levels and a level-1 semion".into()));
    }
    let pair = |a: Charge| Charge(a.0 % 2);
    let mut twist_residual: f64 = 0.0;
    let mut worst_twist = 0u8;
    for a in target.charges() {
        let glued = base.twist(a) * semion.twist(pair(a));
        let r = (glued - target.twist(a)).norm();
        if r > twist_residual {
            twist_residual = r;
            worst_twist = a.0;
        }
    }
    // Restricting the product keeps half the charges, which rescales S by sqrt(2).
    let mut s_residual: f64 = 0.0;
    let mut worst_s = (0, 0);
    for a in target.charges() {
        for b in target.charges() {
            let glued: Complex64 = base.s_matrix()[(a.index(), b.index())]
                * semion.s_matrix()[(pair(a).index(), pair(b).index())]
                * 2f64.sqrt();
            let r = (glued - target.s_matrix()[(a.index(), b.index())]).norm();
            if r > s_residual {
                s_residual = r;
                worst_s = (a.0, b.0);
            }
        }
    }
    if twist_residual > tol {
        return Err(Error::Inconsistent {
            check: "semion-gluing-twist".into(),
            residual: twist_residual,
            indices: vec![worst_twist],
        });
    }
    if s_residual > tol {
        return Err(Error::Inconsistent {
            check: "semion-gluing-s".into(),
            residual: s_residual,
            indices: vec![worst_s.0, worst_s.1],
        });
    }
    Ok(SemionGluingReport {
        level: target.level(),
        twist_residual,
        s_residual,
        worst_s,
    })
}
