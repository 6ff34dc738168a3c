//! Fusion-chain states of quasiparticles.
//!
//! A basis label is a path `c[0..n]` of collective charges for the left-nested
//! tree: `c[0] = a_0`, `c[i]` is the charge of particles `0..=i`, and `c[n-1]`
//! is the total charge.

mod json;
pub(crate) mod ops;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{AnyonModelData, Charge};

pub use json::{StateJson, TermJson};
pub use ops::{Chirality, FMove, Measurement};

/// Amplitudes below this magnitude are dropped after each operation.
pub const PRUNE: f64 = 1e-15;

/// Tree shape the path labels refer to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Basis {
    /// Canonical left-nested chain.
    LeftNested,
    /// Particles `start..=end` grouped into one collective charge.
    ///
    /// Slots `start..end` hold the running group charges, slot `end` onward
    /// hold the chain charges after the group.
    Grouped { start: usize, end: usize },
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Basis::LeftNested => f.write_str("left-nested"),
            Basis::Grouped { start, end } => write!(f, "grouped[{start}..={end}]"),
        }
    }
}

pub type Path = Vec<Charge>;

/// State vector over fusion-chain labels for a fixed list of external charges.
#[derive(Clone)]
pub struct AnyonState {
    model: Arc<AnyonModelData>,
    externals: Vec<Charge>,
    basis: Basis,
    amplitudes: BTreeMap<Path, Complex64>,
}

impl fmt::Debug for AnyonState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ext: Vec<u8> = self.externals.iter().map(|c| c.0).collect();
        write!(f, "AnyonState({ext:?}, {}; ", self.basis)?;
        for (i, (p, v)) in self.amplitudes.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            let p: Vec<u8> = p.iter().map(|c| c.0).collect();
            write!(f, "{p:?}: {:.6}{:+.6}i", v.re, v.im)?;
        }
        f.write_str(")")
    }
}

/// Every left-nested path for `externals`, optionally with a fixed total.
pub fn chain_paths(model: &AnyonModelData, externals: &[Charge], total: Option<Charge>) -> Vec<Path> {
    if externals.is_empty() {
        return if total.is_none_or(|t| t.is_vacuum()) { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    let mut stack = vec![vec![externals[0]]];
    while let Some(p) = stack.pop() {
        if p.len() == externals.len() {
            if total.is_none_or(|t| t == *p.last().unwrap()) {
                out.push(p);
            }
            continue;
        }
        let last = *p.last().unwrap();
        for c in model.fusion_outcomes(last, externals[p.len()]) {
            let mut q = p.clone();
            q.push(c);
            stack.push(q);
        }
    }
    out.sort();
    out
}

impl AnyonState {
    fn from_parts(model: Arc<AnyonModelData>, externals: Vec<Charge>, basis: Basis, amplitudes: BTreeMap<Path, Complex64>) -> Self {
        let mut s = AnyonState {
            model,
            externals,
            basis,
            amplitudes,
        };
        s.prune();
        s
    }

    fn prune(&mut self) {
        self.amplitudes.retain(|_, v| v.norm() > PRUNE);
    }

    /// The state with no quasiparticles.
    pub fn vacuum(model: Arc<AnyonModelData>) -> Self {
        let mut amplitudes = BTreeMap::new();
        amplitudes.insert(Vec::new(), Complex64::new(1.0, 0.0));
        AnyonState {
            model,
            externals: Vec::new(),
            basis: Basis::LeftNested,
            amplitudes,
        }
    }

    /// Checks that `path` is a valid left-nested label for `externals`.
    pub fn validate_path(model: &AnyonModelData, externals: &[Charge], path: &[Charge]) -> Result<()> {
        if path.len() != externals.len() {
            return Err(Error::InvalidPath(format!(
                "path has {} labels for {} particles",
                path.len(),
                externals.len()
            )));
        }
        for &c in externals.iter().chain(path) {
            model.spec().check_charge(c)?;
        }
        if let (Some(&p0), Some(&a0)) = (path.first(), externals.first()) {
            if p0 != a0 {
                return Err(Error::InvalidPath(format!("first label {p0} differs from first charge {a0}")));
            }
        }
        for i in 1..path.len() {
            if !model.fuses(path[i - 1], externals[i], path[i]) {
                return Err(Error::InvalidPath(format!(
                    "no vertex {} x {} -> {} at position {i}",
                    path[i - 1], externals[i], path[i]
                )));
            }
        }
        Ok(())
    }

    /// A single left-nested basis state.
    pub fn basis_state(model: Arc<AnyonModelData>, externals: Vec<Charge>, path: Path) -> Result<Self> {
        Self::from_amplitudes(model, externals, [(path, Complex64::new(1.0, 0.0))])
    }

    /// A left-nested state from explicit terms; repeated paths add up.
    pub fn from_amplitudes(
        model: Arc<AnyonModelData>,
        externals: Vec<Charge>,
        terms: impl IntoIterator<Item = (Path, Complex64)>,
    ) -> Result<Self> {
        let mut amplitudes = BTreeMap::new();
        for (p, v) in terms {
            Self::validate_path(&model, &externals, &p)?;
            *amplitudes.entry(p).or_insert(Complex64::new(0.0, 0.0)) += v;
        }
        Ok(Self::from_parts(model, externals, Basis::LeftNested, amplitudes))
    }

    pub fn model(&self) -> &Arc<AnyonModelData> {
        &self.model
    }

    pub fn externals(&self) -> &[Charge] {
        &self.externals
    }

    pub fn len(&self) -> usize {
        self.externals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.externals.is_empty()
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn amplitudes(&self) -> impl Iterator<Item = (&Path, &Complex64)> {
        self.amplitudes.iter()
    }

    pub fn amplitude(&self, path: &[Charge]) -> Complex64 {
        self.amplitudes.get(path).copied().unwrap_or_default()
    }

    pub fn support_size(&self) -> usize {
        self.amplitudes.len()
    }

    /// True when every amplitude vanished (e.g. after an impossible projection).
    pub fn is_zero(&self) -> bool {
        self.amplitudes.is_empty()
    }

    /// The total charge when it is the same on every term.
    pub fn total(&self) -> Option<Charge> {
        let mut totals = self.amplitudes.keys().map(|p| p.last().copied().unwrap_or(Charge::VACUUM));
        let first = totals.next()?;
        totals.all(|t| t == first).then_some(first)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(|v| v.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Unit-norm copy; fails on a zero state.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n < 1e-300 || !n.is_finite() {
            return Err(Error::DegenerateState);
        }
        Ok(self.scaled(Complex64::new(1.0 / n, 0.0)))
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        let amplitudes = self.amplitudes.iter().map(|(p, v)| (p.clone(), v * factor)).collect();
        Self::from_parts(self.model.clone(), self.externals.clone(), self.basis, amplitudes)
    }

    fn check_compatible(&self, other: &AnyonState) -> Result<()> {
        if self.externals != other.externals {
            return Err(Error::Shape(format!(
                "external charges differ: {:?} vs {:?}",
                self.externals, other.externals
            )));
        }
        if self.basis != other.basis {
            return Err(Error::Shape(format!("bases differ: {} vs {}", self.basis, other.basis)));
        }
        Ok(())
    }

    /// `<self|other>`, conjugate-linear in `self`.
    pub fn inner_product(&self, other: &AnyonState) -> Result<Complex64> {
        self.check_compatible(other)?;
        Ok(self
            .amplitudes
            .iter()
            .filter_map(|(p, v)| other.amplitudes.get(p).map(|w| v.conj() * w))
            .sum())
    }

    /// `self + other`.
    pub fn added(&self, other: &AnyonState) -> Result<Self> {
        self.check_compatible(other)?;
        let mut amplitudes = self.amplitudes.clone();
        for (p, v) in &other.amplitudes {
            *amplitudes.entry(p.clone()).or_default() += v;
        }
        Ok(Self::from_parts(self.model.clone(), self.externals.clone(), self.basis, amplitudes))
    }

    /// Euclidean distance `||self - other||`.
    pub fn distance(&self, other: &AnyonState) -> Result<f64> {
        Ok(self.added(&other.scaled(Complex64::new(-1.0, 0.0)))?.norm())
    }

    /// `|<self|other>|^2 / (<self|self><other|other>)`.
    pub fn fidelity(&self, other: &AnyonState) -> Result<f64> {
        let ip = self.inner_product(other)?;
        let den = self.norm_sqr() * other.norm_sqr();
        if den == 0.0 {
            return Err(Error::DegenerateState);
        }
        Ok(ip.norm_sqr() / den)
    }

    /// Applies `f` to every left-nested path, keeping amplitudes.
    pub fn relabel_paths(&self, externals: Vec<Charge>, f: impl Fn(&Path) -> Path) -> Result<Self> {
        self.require_left_nested()?;
        let mut amplitudes = BTreeMap::new();
        for (p, v) in &self.amplitudes {
            let q = f(p);
            Self::validate_path(&self.model, &externals, &q)?;
            *amplitudes.entry(q).or_insert(Complex64::new(0.0, 0.0)) += v;
        }
        Ok(Self::from_parts(self.model.clone(), externals, Basis::LeftNested, amplitudes))
    }

    fn require_left_nested(&self) -> Result<()> {
        if self.basis != Basis::LeftNested {
            return Err(Error::WrongBasis {
                expected: "left-nested".into(),
                found: self.basis.to_string(),
            });
        }
        Ok(())
    }

    /// Places `other` to the right of `self`. Requires `self` to have total charge 0.
    pub fn tensor(&self, other: &AnyonState) -> Result<Self> {
        self.require_left_nested()?;
        other.require_left_nested()?;
        if !Arc::ptr_eq(&self.model, &other.model) && self.model.spec() != other.model.spec() {
            return Err(Error::Shape("states belong to different theories".into()));
        }
        if !self.is_empty() && self.total() != Some(Charge::VACUUM) {
            return Err(Error::Precondition("left factor must have total charge 0".into()));
        }
        let mut externals = self.externals.clone();
        externals.extend_from_slice(&other.externals);
        let mut amplitudes = BTreeMap::new();
        for (p, v) in &self.amplitudes {
            for (q, w) in &other.amplitudes {
                let mut r = p.clone();
                r.extend_from_slice(q);
                amplitudes.insert(r, v * w);
            }
        }
        Ok(Self::from_parts(self.model.clone(), externals, Basis::LeftNested, amplitudes))
    }
}
