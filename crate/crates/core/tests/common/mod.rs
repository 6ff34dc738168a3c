//! Dense reference constructions built directly from F- and R-symbols.
#![allow(dead_code)]

use std::collections::HashMap;
use std::sync::Arc;

use anyonkit::model::{AnyonModelData, Charge};
use anyonkit::state::{chain_paths, AnyonState, Path};
use anyonkit::Complex64;
use nalgebra::{DMatrix, DVector};

pub fn ch(v: &[u8]) -> Vec<Charge> {
    v.iter().map(|&x| Charge(x)).collect()
}

pub struct DenseSpace {
    pub externals: Vec<Charge>,
    pub paths: Vec<Path>,
    pub index: HashMap<Path, usize>,
}

impl DenseSpace {
    pub fn new(m: &AnyonModelData, externals: &[Charge]) -> Self {
        let paths = chain_paths(m, externals, None);
        let index = paths.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        DenseSpace {
            externals: externals.to_vec(),
            paths,
            index,
        }
    }

    pub fn dim(&self) -> usize {
        self.paths.len()
    }

    pub fn vector(&self, st: &AnyonState) -> DVector<Complex64> {
        assert_eq!(st.externals(), &self.externals[..]);
        let mut v = DVector::zeros(self.dim());
        for (p, a) in st.to_left_nested().amplitudes() {
            v[self.index[p]] = *a;
        }
        v
    }

    pub fn state(&self, m: &Arc<AnyonModelData>, v: &DVector<Complex64>) -> AnyonState {
        AnyonState::from_amplitudes(
            m.clone(),
            self.externals.clone(),
            self.paths.iter().cloned().zip(v.iter().cloned()),
        )
        .unwrap()
    }
}

/// Dense braid `sigma_i` (ccw) from the pair change of basis
/// `phi_f = sum_c F^{c_{i-1} a_i a_{i+1}}_{c_{i+1}}[c_i, f] psi_c`.
pub fn dense_braid(m: &AnyonModelData, externals: &[Charge], i: usize) -> (Vec<Charge>, DMatrix<Complex64>) {
    let src = DenseSpace::new(m, externals);
    let mut swapped = externals.to_vec();
    swapped.swap(i, i + 1);
    let dst = DenseSpace::new(m, &swapped);
    let (a, b) = (externals[i], externals[i + 1]);
    let mut mat = DMatrix::zeros(dst.dim(), src.dim());
    for (col, p) in src.paths.iter().enumerate() {
        if i == 0 {
            // pair channel is c[1]; only c[0] changes
            let mut q = p.clone();
            q[0] = b;
            let r = m.r_or_zero(a, b, p[1]);
            mat[(dst.index[&q], col)] += r;
            continue;
        }
        let pre = p[i - 1];
        let post = p[i + 1];
        for f in m.charges() {
            let x = m.f(pre, a, b, post, p[i], f);
            if x.norm() == 0.0 {
                continue;
            }
            let r = m.r_or_zero(a, b, f);
            for c2 in m.charges() {
                let y = m.f(pre, b, a, post, c2, f);
                if y.norm() == 0.0 {
                    continue;
                }
                let mut q = p.clone();
                q[i] = c2;
                mat[(dst.index[&q], col)] += y.conj() * r * x;
            }
        }
    }
    (swapped, mat)
}

/// Dense projector onto collective charge `a` of particles `i..=j`: move the
/// block to the front with braids, read `c[j - i]`, move back.
pub fn dense_projector(m: &AnyonModelData, externals: &[Charge], i: usize, j: usize, a: Charge) -> DMatrix<Complex64> {
    let start = DenseSpace::new(m, externals);
    let mut u = DMatrix::<Complex64>::identity(start.dim(), start.dim());
    let mut ext = externals.to_vec();
    for t in 0..=(j - i) {
        let mut pos = i + t;
        while pos > t {
            let (next, b) = dense_braid(m, &ext, pos - 1);
            u = b * u;
            ext = next;
            pos -= 1;
        }
    }
    let front = DenseSpace::new(m, &ext);
    let d = DMatrix::from_fn(front.dim(), front.dim(), |r, c| {
        if r == c && front.paths[r][j - i] == a {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    u.adjoint() * d * u
}

pub fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn vmax_abs(v: &DVector<Complex64>) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
