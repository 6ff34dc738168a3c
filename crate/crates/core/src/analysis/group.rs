use std::collections::VecDeque;

use num_complex::Complex64;
use serde::Serialize;

use super::index::{quaternion, ProjectiveIndex};
use crate::encoding::{GateJson, GateMatrix};
use crate::error::{Error, Result};

/// Default dedup tolerance (projective Frobenius distance).
pub const CLOSURE_TOL: f64 = 1e-8;
/// Default bound on the number of distinct elements.
pub const CLOSURE_CAP: usize = 10_000;

/// Result of a projective group closure.
#[derive(Clone, Debug)]
pub struct Closure {
    /// Phase-canonical representatives, identity first.
    pub elements: Vec<GateMatrix>,
    /// False when the cap was reached before the set closed.
    pub finite: bool,
    pub cap: usize,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ClosureJson {
    pub size: usize,
    pub finite: bool,
    pub cap: usize,
    pub verdict: String,
    pub elements: Vec<GateJson>,
}

impl Closure {
    pub fn size(&self) -> usize {
        self.elements.len()
    }

    /// Index of the member projectively equal to `g`, if any.
    pub fn position(&self, g: &GateMatrix, tol: f64) -> Option<usize> {
        self.elements.iter().position(|e| e.projective_distance(g) < tol)
    }

    /// Checks that every product of two members is a member.
    pub fn is_closed(&self, tol: f64) -> bool {
        let mut index = ProjectiveIndex::new(1e-6);
        for e in &self.elements {
            index.insert(quaternion(e));
        }
        let r = tol / std::f64::consts::SQRT_2;
        self.elements
            .iter()
            .all(|a| self.elements.iter().all(|b| !index.within(&quaternion(&(a * b)), r).is_empty()))
    }

    pub fn to_json(&self, with_elements: bool) -> ClosureJson {
        ClosureJson {
            size: self.size(),
            finite: self.finite,
            cap: self.cap,
            verdict: if self.finite { "finite".into() } else { "possibly infinite".into() },
            elements: if with_elements { self.elements.iter().map(GateMatrix::to_json).collect() } else { Vec::new() },
        }
    }
}

/// Breadth-first closure of `generators` under multiplication, identifying gates
/// that differ by a global phase.
pub fn close_group(generators: &[GateMatrix], tol: f64, cap: usize) -> Result<Closure> {
    if generators.is_empty() || generators.len() > 4 {
        return Err(Error::Invalid(format!("expected 1 to 4 generators, got {}", generators.len())));
    }
    if let Some(g) = generators.iter().find(|g| g.dim() != 2 || !g.is_unitary(1e-9)) {
        return Err(Error::Invalid(format!("generators must be 2x2 unitaries, got dim {}", g.dim())));
    }
    let cell = (tol * 10.0).max(1e-6);
    let r = tol / std::f64::consts::SQRT_2;
    let mut index = ProjectiveIndex::new(cell);
    let mut elements = vec![GateMatrix::identity(2)];
    index.insert(quaternion(&elements[0]));
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for g in generators {
            let next = (&elements[i] * g).phase_canonical();
            let q = quaternion(&next);
            if !index.within(&q, r).is_empty() {
                continue;
            }
            if elements.len() >= cap {
                return Ok(Closure {
                    elements,
                    finite: false,
                    cap,
                });
            }
            index.insert(q);
            elements.push(next);
            queue.push_back(elements.len() - 1);
        }
    }
    Ok(Closure {
        elements,
        finite: true,
        cap,
    })
}

/// `[a, b] = a^-1 b^-1 a b`.
pub fn group_commutator(a: &GateMatrix, b: &GateMatrix) -> Result<GateMatrix> {
    Ok(&(&(&a.inverse()? * &b.inverse()?) * a) * b)
}

/// Numerical evidence that the gate set `{B, K}` is not finite.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DensityReport {
    /// Operator-norm distance of `[[B, K^-1], [B, K]]` from the identity.
    pub nested_commutator_distance: f64,
    /// Projective distance between `BK` and `KB`.
    pub bk_noncommutation: f64,
    /// `e^{i alpha}` as (re, im).
    pub k_phase: [f64; 2],
    pub cos_alpha: f64,
    /// Leading continued-fraction terms of `alpha / 2 pi`.
    pub continued_fraction: Vec<u64>,
    /// True if the expansion ended (remainder below 1e-9) within the computed depth.
    pub continued_fraction_terminated: bool,
}

/// Continued-fraction terms of `x`, stopping when the remainder vanishes or after `depth` terms.
pub fn continued_fraction(x: f64, depth: usize) -> (Vec<u64>, bool) {
    let mut terms = Vec::new();
    let mut y = x;
    for _ in 0..depth {
        let a = (y + 1e-9).floor();
        terms.push(a as u64);
        let frac = y - a;
        if frac.abs() < 1e-9 {
            return (terms, true);
        }
        y = 1.0 / frac;
    }
    (terms, false)
}

/// Commutator and irrationality evidence for the gates `b` and `k = diag(1, e^{i alpha})`.
pub fn density_witness(b: &GateMatrix, k: &GateMatrix) -> Result<DensityReport> {
    let k_inv = k.inverse()?;
    let nested = group_commutator(&group_commutator(b, &k_inv)?, &group_commutator(b, k)?)?;
    let phase: Complex64 = k.entry(1, 1) / k.entry(0, 0);
    let alpha = phase.arg().rem_euclid(2.0 * std::f64::consts::PI);
    let (cf, terminated) = continued_fraction(alpha / (2.0 * std::f64::consts::PI), 12);
    Ok(DensityReport {
        nested_commutator_distance: nested.distance_from_identity(),
        bk_noncommutation: (b * k).projective_distance(&(k * b)),
        k_phase: [phase.re, phase.im],
        cos_alpha: alpha.cos(),
        continued_fraction: cf,
        continued_fraction_terminated: terminated,
    })
}
