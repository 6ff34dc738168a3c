use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::qnum::{quantum_dimension, QFactorials};
use super::symbols::{
    f_admissible, f_closed_form, fusion_multiplicity, r_closed_form, s_closed_form, total_dimension_closed_form,
    twist_closed_form,
};
use super::theory::{Charge, TheorySpec};
use crate::error::{Error, Result};

/// Construction options for [`AnyonModelData`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelOptions {
    /// F-symbols are tabulated at construction when `k <= eager_bound`.
    pub eager_bound: u32,
    /// Tolerance for the cross-checks run at construction.
    pub tol: f64,
}

impl Default for ModelOptions {
    fn default() -> Self {
        ModelOptions {
            eager_bound: 8,
            tol: 1e-9,
        }
    }
}

/// Complete algebraic data of one theory. Immutable after construction.
#[derive(Clone, Debug)]
pub struct AnyonModelData {
    spec: TheorySpec,
    facts: QFactorials,
    f_table: Option<Vec<f64>>,
    f_overrides: HashMap<[u8; 6], Complex64>,
    r_table: Vec<Complex64>,
    qdims: Vec<f64>,
    total_dim: f64,
    twists: Vec<Complex64>,
    s_matrix: DMatrix<Complex64>,
    frob_schur: Vec<i8>,
}

fn f_index(idx: [u8; 6], n: usize) -> usize {
    idx.iter().fold(0usize, |acc, &x| acc * n + x as usize)
}

impl AnyonModelData {
    pub fn new(spec: TheorySpec) -> Result<Self> {
        Self::with_options(spec, ModelOptions::default())
    }

    pub fn with_options(spec: TheorySpec, options: ModelOptions) -> Result<Self> {
        let k = spec.level();
        let n = spec.num_charges();
        let facts = QFactorials::new(&spec);

        let f_table = (k <= options.eager_bound).then(|| {
            let mut table = vec![0.0; n.pow(6)];
            for a in 0..n as u8 {
                for b in 0..n as u8 {
                    for e in 0..n as u8 {
                        if fusion_multiplicity(a, b, e, k) == 0 {
                            continue;
                        }
                        for c in 0..n as u8 {
                            for d in 0..n as u8 {
                                if fusion_multiplicity(e, c, d, k) == 0 {
                                    continue;
                                }
                                for f in 0..n as u8 {
                                    let idx = [a, b, c, d, e, f];
                                    if f_admissible(idx, k) {
                                        table[f_index(idx, n)] = f_closed_form(&spec, &facts, idx);
                                    }
                                }
                            }
                        }
                    }
                }
            }
            table
        });

        let mut r_table = vec![Complex64::new(0.0, 0.0); n.pow(3)];
        for a in 0..n as u8 {
            for b in 0..n as u8 {
                for c in 0..n as u8 {
                    if fusion_multiplicity(a, b, c, k) == 1 {
                        r_table[(a as usize * n + b as usize) * n + c as usize] = r_closed_form(&spec, a, b, c);
                    }
                }
            }
        }

        let qdims: Vec<f64> = (0..n as u8).map(|a| quantum_dimension(a, &spec)).collect();
        let total_dim = total_dimension_closed_form(&spec);
        let twists: Vec<Complex64> = (0..n as u8).map(|a| twist_closed_form(&spec, a)).collect();
        let s_matrix = DMatrix::from_fn(n, n, |a, b| Complex64::new(s_closed_form(&spec, a as u8, b as u8), 0.0));

        let mut data = AnyonModelData {
            spec,
            facts,
            f_table,
            f_overrides: HashMap::new(),
            r_table,
            qdims,
            total_dim,
            twists,
            s_matrix,
            frob_schur: Vec::new(),
        };
        data.frob_schur = spec
            .charges()
            .map(|a| {
                let v = data.qdims[a.index()] * data.f_raw([a.0, a.0, a.0, a.0, 0, 0]).re;
                if v >= 0.0 {
                    1
                } else {
                    -1
                }
            })
            .collect();
        super::derived::cross_check(&data, options.tol)?;
        Ok(data)
    }

    /// Replaces a single F-symbol. Intended for exercising the verifier with corrupted data.
    pub fn with_f_override(mut self, idx: [Charge; 6], value: Complex64) -> Self {
        self.f_overrides.insert(idx.map(|c| c.0), value);
        self
    }

    pub fn spec(&self) -> &TheorySpec {
        &self.spec
    }

    pub fn level(&self) -> u32 {
        self.spec.level()
    }

    pub fn num_charges(&self) -> usize {
        self.spec.num_charges()
    }

    pub fn charges(&self) -> impl Iterator<Item = Charge> + Clone {
        self.spec.charges()
    }

    /// Every charge is self-dual in these theories.
    pub fn dual(&self, a: Charge) -> Charge {
        a
    }

    pub fn n(&self, a: Charge, b: Charge, c: Charge) -> u8 {
        fusion_multiplicity(a.0, b.0, c.0, self.spec.level())
    }

    pub fn fuses(&self, a: Charge, b: Charge, c: Charge) -> bool {
        self.n(a, b, c) == 1
    }

    /// Outcomes `c` with `N_{ab}^c = 1`, in increasing order.
    pub fn fusion_outcomes(&self, a: Charge, b: Charge) -> impl Iterator<Item = Charge> + '_ {
        self.charges().filter(move |&c| self.fuses(a, b, c))
    }

    fn f_raw(&self, idx: [u8; 6]) -> Complex64 {
        if !self.f_overrides.is_empty() {
            if let Some(v) = self.f_overrides.get(&idx) {
                return *v;
            }
        }
        let k = self.spec.level();
        if idx.iter().any(|&x| x as u32 > k) {
            return Complex64::new(0.0, 0.0);
        }
        let v = match &self.f_table {
            Some(t) => t[f_index(idx, self.num_charges())],
            None => f_closed_form(&self.spec, &self.facts, idx),
        };
        Complex64::new(v, 0.0)
    }

    /// `[F^{abc}_d]_{ef}`; zero when inadmissible.
    pub fn f(&self, a: Charge, b: Charge, c: Charge, d: Charge, e: Charge, f: Charge) -> Complex64 {
        self.f_raw([a.0, b.0, c.0, d.0, e.0, f.0])
    }

    /// Same as [`f`](Self::f) with raw labels.
    pub fn f_symbol(&self, idx: [u8; 6]) -> Complex64 {
        self.f_raw(idx)
    }

    /// The block `[F^{abc}_d]` with rows `e` and columns `f` over the admissible labels.
    pub fn f_matrix(&self, a: Charge, b: Charge, c: Charge, d: Charge) -> (Vec<Charge>, Vec<Charge>, DMatrix<Complex64>) {
        let es: Vec<Charge> = self.charges().filter(|&e| self.fuses(a, b, e) && self.fuses(e, c, d)).collect();
        let fs: Vec<Charge> = self.charges().filter(|&f| self.fuses(b, c, f) && self.fuses(a, f, d)).collect();
        let m = DMatrix::from_fn(es.len(), fs.len(), |i, j| self.f(a, b, c, d, es[i], fs[j]));
        (es, fs, m)
    }

    /// `R^{ab}_c`; errors when there is no vertex.
    pub fn r(&self, a: Charge, b: Charge, c: Charge) -> Result<Complex64> {
        if !self.fuses(a, b, c) {
            return Err(Error::NoVertex { a, b, c });
        }
        Ok(self.r_or_zero(a, b, c))
    }

    /// `R^{ab}_c`, or zero when there is no vertex.
    pub fn r_or_zero(&self, a: Charge, b: Charge, c: Charge) -> Complex64 {
        let n = self.num_charges();
        if a.index() >= n || b.index() >= n || c.index() >= n {
            return Complex64::new(0.0, 0.0);
        }
        self.r_table[(a.index() * n + b.index()) * n + c.index()]
    }

    pub fn qdim(&self, a: Charge) -> f64 {
        self.qdims[a.index()]
    }

    pub fn qdims(&self) -> &[f64] {
        &self.qdims
    }

    pub fn total_dim(&self) -> f64 {
        self.total_dim
    }

    pub fn twist(&self, a: Charge) -> Complex64 {
        self.twists[a.index()]
    }

    pub fn twists(&self) -> &[Complex64] {
        &self.twists
    }

    pub fn s_matrix(&self) -> &DMatrix<Complex64> {
        &self.s_matrix
    }

    pub fn frobenius_schur(&self, a: Charge) -> i8 {
        self.frob_schur[a.index()]
    }

    pub fn frobenius_schur_indicators(&self) -> &[i8] {
        &self.frob_schur
    }
}
