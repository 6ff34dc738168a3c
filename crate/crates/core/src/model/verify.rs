use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use super::data::AnyonModelData;
use super::derived::s_from_twists;
use super::tables::{jk4_reference, Symbol};
use super::theory::{Charge, Family, TheorySpec};
use crate::error::{Error, Result};

/// Largest residual found by one named check.
#[derive(Clone, Debug, Serialize, PartialEq)]
#[serde(rename_all = "camelCase")]
pub struct CheckResult {
    pub name: String,
    pub max_residual: f64,
    /// Labels of the worst instance (empty when every residual is zero).
    pub worst: Vec<u8>,
    pub instances: usize,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ConsistencyReport {
    pub family: Family,
    pub level: u32,
    pub tol: f64,
    pub checks: Vec<CheckResult>,
}

impl ConsistencyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.max_residual <= self.tol)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(move |c| c.max_residual > self.tol)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn max_residual(&self) -> f64 {
        self.checks.iter().map(|c| c.max_residual).fold(0.0, f64::max)
    }
}

struct Tracker {
    result: CheckResult,
}

impl Tracker {
    fn new(name: &str) -> Self {
        Tracker {
            result: CheckResult {
                name: name.to_string(),
                max_residual: 0.0,
                worst: Vec::new(),
                instances: 0,
            },
        }
    }

    fn record(&mut self, residual: f64, labels: &[u8]) {
        self.result.instances += 1;
        if residual > self.result.max_residual || residual.is_nan() {
            self.result.max_residual = if residual.is_nan() { f64::INFINITY } else { residual };
            self.result.worst = labels.to_vec();
        }
    }

    fn done(self) -> CheckResult {
        self.result
    }
}

fn ch(v: u8) -> Charge {
    Charge(v)
}

fn pentagon(m: &AnyonModelData) -> CheckResult {
    let mut t = Tracker::new("pentagon");
    let cs: Vec<u8> = m.charges().map(|c| c.0).collect();
    let n = |a: u8, b: u8, c: u8| m.fuses(ch(a), ch(b), ch(c));
    let f = |i: [u8; 6]| m.f_symbol(i);
    for &a in &cs {
        for &b in &cs {
            for &c in &cs {
                for &d in &cs {
                    for &e in &cs {
                        for &fx in cs.iter().filter(|&&x| n(a, b, x)) {
                            for &g in cs.iter().filter(|&&x| n(fx, c, x) && n(x, d, e)) {
                                for &l in cs.iter().filter(|&&x| n(c, d, x)) {
                                    for &k in cs.iter().filter(|&&x| n(b, l, x) && n(a, x, e)) {
                                        let lhs = f([fx, c, d, e, g, l]) * f([a, b, l, e, fx, k]);
                                        let rhs: Complex64 = cs
                                            .iter()
                                            .map(|&h| f([a, b, c, g, fx, h]) * f([a, h, d, e, g, k]) * f([b, c, d, k, h, l]))
                                            .sum();
                                        t.record((lhs - rhs).norm(), &[a, b, c, d, e, fx, g, k, l]);
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    t.done()
}

fn hexagons(m: &AnyonModelData) -> (CheckResult, CheckResult) {
    let mut t1 = Tracker::new("hexagon");
    let mut t2 = Tracker::new("hexagon-inverse");
    let cs: Vec<u8> = m.charges().map(|c| c.0).collect();
    let n = |a: u8, b: u8, c: u8| m.fuses(ch(a), ch(b), ch(c));
    let r = |a: u8, b: u8, c: u8| m.r_or_zero(ch(a), ch(b), ch(c));
    let f = |i: [u8; 6]| m.f_symbol(i);
    for &a in &cs {
        for &b in &cs {
            for &c in &cs {
                for &d in &cs {
                    for &e in cs.iter().filter(|&&x| n(a, c, x) && n(x, b, d)) {
                        for &g in cs.iter().filter(|&&x| n(c, b, x) && n(a, x, d)) {
                            let lhs = r(c, a, e) * f([a, c, b, d, e, g]) * r(c, b, g);
                            let rhs: Complex64 = cs
                                .iter()
                                .filter(|&&x| n(a, b, x) && n(c, x, d))
                                .map(|&x| f([c, a, b, d, e, x]) * r(c, x, d) * f([a, b, c, d, x, g]))
                                .sum();
                            t1.record((lhs - rhs).norm(), &[a, b, c, d, e, g]);

                            let lhs = r(a, c, e).conj() * f([a, c, b, d, e, g]) * r(b, c, g).conj();
                            let rhs: Complex64 = cs
                                .iter()
                                .filter(|&&x| n(a, b, x) && n(x, c, d))
                                .map(|&x| f([c, a, b, d, e, x]) * r(x, c, d).conj() * f([a, b, c, d, x, g]))
                                .sum();
                            t2.record((lhs - rhs).norm(), &[a, b, c, d, e, g]);
                        }
                    }
                }
            }
        }
    }
    (t1.done(), t2.done())
}

fn unitarity_residual(mat: &DMatrix<Complex64>) -> f64 {
    if mat.nrows() != mat.ncols() {
        return f64::INFINITY;
    }
    let prod = mat * mat.adjoint();
    let mut worst: f64 = 0.0;
    for i in 0..prod.nrows() {
        for j in 0..prod.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((prod[(i, j)] - target).norm());
        }
    }
    worst
}

fn f_unitarity(m: &AnyonModelData) -> CheckResult {
    let mut t = Tracker::new("f-unitarity");
    for a in m.charges() {
        for b in m.charges() {
            for c in m.charges() {
                for d in m.charges() {
                    let (es, _, mat) = m.f_matrix(a, b, c, d);
                    if es.is_empty() && mat.ncols() == 0 {
                        continue;
                    }
                    t.record(unitarity_residual(&mat), &[a.0, b.0, c.0, d.0]);
                }
            }
        }
    }
    t.done()
}

fn fusion_algebra(m: &AnyonModelData) -> CheckResult {
    let mut t = Tracker::new("fusion-algebra");
    for a in m.charges() {
        for b in m.charges() {
            for c in m.charges() {
                let comm = (m.n(a, b, c) as f64 - m.n(b, a, c) as f64).abs();
                t.record(comm, &[a.0, b.0, c.0]);
                for d in m.charges() {
                    let l: u32 = m.charges().map(|e| (m.n(a, b, e) * m.n(e, c, d)) as u32).sum();
                    let r: u32 = m.charges().map(|f| (m.n(b, c, f) * m.n(a, f, d)) as u32).sum();
                    t.record((l as f64 - r as f64).abs(), &[a.0, b.0, c.0, d.0]);
                }
            }
        }
    }
    t.done()
}

fn modular(m: &AnyonModelData) -> Vec<CheckResult> {
    let mut su = Tracker::new("s-unitarity");
    su.record(unitarity_residual(m.s_matrix()), &[]);

    let mut sx = Tracker::new("s-cross-check");
    let st = s_from_twists(m);
    for i in 0..st.nrows() {
        for j in 0..st.ncols() {
            sx.record((st[(i, j)] - m.s_matrix()[(i, j)]).norm(), &[i as u8, j as u8]);
        }
    }

    let mut qd = Tracker::new("qdim-identity");
    let mut root = Tracker::new("twist-root-of-unity");
    let mut dual = Tracker::new("twist-self-dual");
    let period = 4 * (m.level() + 2);
    for a in m.charges() {
        let fa = m.f(a, m.dual(a), a, a, Charge(0), Charge(0));
        qd.record((m.qdim(a) * fa.norm() - 1.0).abs(), &[a.0]);
        let th = m.twist(a);
        let best = (1..=period)
            .map(|p| (th.powu(p) - Complex64::new(1.0, 0.0)).norm())
            .fold(f64::INFINITY, f64::min);
        root.record(best, &[a.0]);
        dual.record((th - m.twist(m.dual(a))).norm(), &[a.0]);
    }
    vec![su.done(), sx.done(), qd.done(), root.done(), dual.done()]
}

fn jk_isotopy(m: &AnyonModelData) -> Vec<CheckResult> {
    let mut fs = Tracker::new("frobenius-schur");
    let mut bend = Tracker::new("bending");
    let mut vac = Tracker::new("vacuum-rows");
    for a in m.charges() {
        let kappa = m.qdim(a) * m.f(a, a, a, a, Charge(0), Charge(0));
        fs.record((kappa - Complex64::new(1.0, 0.0)).norm(), &[a.0]);
        for b in m.charges() {
            for c in m.fusion_outcomes(a, b) {
                let v = (m.qdim(c) / (m.qdim(a) * m.qdim(b))).sqrt();
                let x = m.f(a, a, b, b, Charge(0), c);
                let y = m.f(a, b, b, a, c, Charge(0));
                bend.record((x - v).norm().max((y - v).norm()), &[a.0, b.0, c.0]);
            }
        }
    }
    let cs: Vec<u8> = m.charges().map(|c| c.0).collect();
    for &a in &cs {
        for &b in &cs {
            for &c in &cs {
                for &d in &cs {
                    if a != 0 && b != 0 && c != 0 && d != 0 {
                        continue;
                    }
                    for &e in &cs {
                        for &f in &cs {
                            let idx = [a, b, c, d, e, f];
                            if super::symbols::f_admissible(idx, m.level()) {
                                vac.record((m.f_symbol(idx) - 1.0).norm(), &idx);
                            }
                        }
                    }
                }
            }
        }
    }
    vec![fs.done(), bend.done(), vac.done()]
}

fn reference_table(m: &AnyonModelData) -> CheckResult {
    let mut t = Tracker::new("reference-table");
    for entry in jk4_reference() {
        match entry.symbol {
            Symbol::F(idx) => t.record((m.f_symbol(idx) - entry.value).norm(), &idx),
            Symbol::R([a, b, c]) => t.record((m.r_or_zero(ch(a), ch(b), ch(c)) - entry.value).norm(), &[a, b, c]),
        }
    }
    t.done()
}

/// Computes every residual without failing.
pub fn consistency_report(m: &AnyonModelData, tol: f64) -> ConsistencyReport {
    let mut checks = vec![fusion_algebra(m), pentagon(m)];
    let (h1, h2) = hexagons(m);
    checks.push(h1);
    checks.push(h2);
    checks.push(f_unitarity(m));
    checks.extend(modular(m));
    if m.spec().family().is_jk() {
        checks.extend(jk_isotopy(m));
        if *m.spec() == TheorySpec::jk(4) {
            checks.push(reference_table(m));
        }
    }
    ConsistencyReport {
        family: m.spec().family(),
        level: m.level(),
        tol,
        checks,
    }
}

/// Runs every check; the first check over `tol` becomes the error.
pub fn verify_consistency(m: &AnyonModelData, tol: f64) -> Result<ConsistencyReport> {
    let report = consistency_report(m, tol);
    if let Some(bad) = report.failures().next() {
        return Err(Error::Inconsistent {
            check: bad.name.clone(),
            residual: bad.max_residual,
            indices: bad.worst.clone(),
        });
    }
    Ok(report)
}
