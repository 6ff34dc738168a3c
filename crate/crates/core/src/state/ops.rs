use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{AnyonState, Basis, Path};
use crate::error::{Error, Result};
use crate::model::Charge;

/// Direction of an elementary F-move on a grouped basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FMove {
    /// Pull the next particle into the group.
    Absorb,
    /// Push the last particle of the group back onto the chain.
    Release,
}

/// Exchange orientation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Chirality {
    Ccw,
    Cw,
}

impl Chirality {
    pub fn inverse(self) -> Self {
        match self {
            Chirality::Ccw => Chirality::Cw,
            Chirality::Cw => Chirality::Ccw,
        }
    }
}

/// Outcome of a sampled measurement or fusion.
#[derive(Clone, Debug)]
pub struct Measurement {
    pub outcome: Charge,
    pub probability: f64,
    pub state: AnyonState,
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Samples an index from non-negative weights.
pub(crate) fn sample_index<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> Result<usize> {
    let total: f64 = weights.iter().sum();
    if total <= 0.0 || !total.is_finite() {
        return Err(Error::DegenerateState);
    }
    let u: f64 = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last = None;
    for (i, &w) in weights.iter().enumerate() {
        if w <= 0.0 {
            continue;
        }
        acc += w;
        last = Some(i);
        if u < acc {
            return Ok(i);
        }
    }
    last.ok_or(Error::DegenerateState)
}

impl AnyonState {
    fn group_bounds(&self) -> Option<(usize, usize)> {
        match self.basis {
            Basis::LeftNested => None,
            Basis::Grouped { start, end } => Some((start, end)),
        }
    }

    fn prefix(path: &[Charge], start: usize) -> Charge {
        if start == 0 {
            Charge::VACUUM
        } else {
            path[start - 1]
        }
    }

    /// Elementary F-move.
    ///
    /// `Absorb` at `position` extends the group ending at `position - 1`
    /// (starting a two-particle group from the left-nested basis).
    /// `Release` at `position` removes particle `position` from the end of the group.
    pub fn apply_f_move(&self, position: usize, direction: FMove) -> Result<AnyonState> {
        let n = self.len();
        match direction {
            FMove::Absorb => {
                if position == 0 || position >= n {
                    return Err(Error::Index { index: position, limit: n });
                }
                let (s, e) = match self.group_bounds() {
                    None => (position - 1, position - 1),
                    Some((s, e)) if e + 1 == position => (s, e),
                    Some(_) => return Err(Error::Index { index: position, limit: n }),
                };
                Ok(self.absorb(s, e))
            }
            FMove::Release => match self.group_bounds() {
                Some((s, e)) if e == position => Ok(self.release(s, e)),
                _ => Err(Error::Index { index: position, limit: n }),
            },
        }
    }

    fn absorb(&self, s: usize, e: usize) -> AnyonState {
        let m = &self.model;
        let next = self.externals[e + 1];
        let mut out: BTreeMap<Path, Complex64> = BTreeMap::new();
        for (path, v) in &self.amplitudes {
            let g = if e == s { self.externals[s] } else { path[e - 1] };
            let pre = Self::prefix(path, s);
            for g2 in m.fusion_outcomes(g, next) {
                let coeff = m.f(pre, g, next, path[e + 1], path[e], g2);
                if coeff == zero() {
                    continue;
                }
                let mut q = path.clone();
                q[e] = g2;
                *out.entry(q).or_insert(zero()) += coeff * v;
            }
        }
        AnyonState::from_parts(
            self.model.clone(),
            self.externals.clone(),
            Basis::Grouped { start: s, end: e + 1 },
            out,
        )
    }

    fn release(&self, s: usize, e: usize) -> AnyonState {
        let m = &self.model;
        let last = self.externals[e];
        let mut out: BTreeMap<Path, Complex64> = BTreeMap::new();
        for (path, v) in &self.amplitudes {
            let g = path[e - 1];
            let g_prev = if e - 1 == s { self.externals[s] } else { path[e - 2] };
            let pre = Self::prefix(path, s);
            for c in m.fusion_outcomes(pre, g_prev) {
                let coeff = m.f(pre, g_prev, last, path[e], c, g);
                if coeff == zero() {
                    continue;
                }
                let mut q = path.clone();
                q[e - 1] = c;
                *out.entry(q).or_insert(zero()) += coeff.conj() * v;
            }
        }
        let basis = if e - 1 == s {
            Basis::LeftNested
        } else {
            Basis::Grouped { start: s, end: e - 1 }
        };
        AnyonState::from_parts(self.model.clone(), self.externals.clone(), basis, out)
    }

    /// Returns to the left-nested basis.
    pub fn to_left_nested(&self) -> AnyonState {
        let mut st = self.clone();
        while let Some((s, e)) = st.group_bounds() {
            st = st.release(s, e);
        }
        st
    }

    /// Groups particles `start..=end` (from the left-nested basis).
    pub fn grouped(&self, start: usize, end: usize) -> Result<AnyonState> {
        if start > end || end >= self.len() {
            return Err(Error::Index { index: end, limit: self.len() });
        }
        let mut st = self.to_left_nested();
        for e in start..end {
            st = st.absorb(start, e);
        }
        Ok(st)
    }

    /// Collective charge of the group on a grouped path.
    fn group_charge(&self, path: &[Charge]) -> Charge {
        match self.basis {
            Basis::LeftNested => unreachable!("group charge needs a grouped basis"),
            Basis::Grouped { end, .. } => path[end - 1],
        }
    }

    /// Exchanges particles `i` and `i + 1`.
    pub fn braid(&self, i: usize, chirality: Chirality) -> Result<AnyonState> {
        if i + 1 >= self.len() {
            return Err(Error::Index { index: i, limit: self.len().saturating_sub(1) });
        }
        let g = self.grouped(i, i + 1)?;
        let (a, b) = (self.externals[i], self.externals[i + 1]);
        let m = &self.model;
        let amplitudes = g
            .amplitudes
            .iter()
            .map(|(p, v)| {
                let f = p[i];
                let r = match chirality {
                    Chirality::Ccw => m.r_or_zero(a, b, f),
                    Chirality::Cw => m.r_or_zero(b, a, f).conj(),
                };
                (p.clone(), v * r)
            })
            .collect();
        let mut externals = self.externals.clone();
        externals.swap(i, i + 1);
        let swapped = AnyonState::from_parts(self.model.clone(), externals, g.basis, amplitudes);
        Ok(swapped.to_left_nested())
    }

    /// Applies a sequence of braids.
    pub fn braid_word(&self, word: &[(usize, Chirality)]) -> Result<AnyonState> {
        let mut st = self.clone();
        for &(i, c) in word {
            st = st.braid(i, c)?;
        }
        Ok(st)
    }

    /// `(<psi|Pi_a|psi>, Pi_a|psi>)` for the collective charge of `range`.
    pub fn project_charge(&self, range: RangeInclusive<usize>, a: Charge) -> Result<(f64, AnyonState)> {
        let (i, j) = (*range.start(), *range.end());
        if i > j || j >= self.len() {
            return Err(Error::Index { index: j, limit: self.len() });
        }
        let base = self.to_left_nested();
        let projected = if i == j {
            if base.externals[i] == a {
                base
            } else {
                AnyonState::from_parts(base.model.clone(), base.externals.clone(), Basis::LeftNested, BTreeMap::new())
            }
        } else {
            let g = base.grouped(i, j)?;
            let kept = g
                .amplitudes
                .iter()
                .filter(|(p, _)| g.group_charge(p) == a)
                .map(|(p, v)| (p.clone(), *v))
                .collect();
            AnyonState::from_parts(g.model.clone(), g.externals.clone(), g.basis, kept).to_left_nested()
        };
        Ok((projected.norm_sqr(), projected))
    }

    /// Born weights `<psi|Pi_a|psi>` for every charge `a`.
    pub fn charge_distribution(&self, range: RangeInclusive<usize>) -> Result<Vec<(Charge, f64)>> {
        self.model
            .charges()
            .map(|a| Ok((a, self.project_charge(range.clone(), a)?.0)))
            .collect()
    }

    /// Samples the collective charge of `range` and returns the normalized post-state.
    pub fn measure_charge<R: Rng + ?Sized>(&self, range: RangeInclusive<usize>, rng: &mut R) -> Result<Measurement> {
        let dist = self.charge_distribution(range.clone())?;
        let weights: Vec<f64> = dist.iter().map(|(_, p)| *p).collect();
        let idx = sample_index(&weights, rng)?;
        let total: f64 = weights.iter().sum();
        let outcome = dist[idx].0;
        let (p, st) = self.project_charge(range, outcome)?;
        Ok(Measurement {
            outcome,
            probability: p / total,
            state: st.normalized()?,
        })
    }

    /// Inserts a pair of `charge` particles in the vacuum channel before particle `position`.
    pub fn create_vacuum_pair(&self, charge: Charge, position: usize) -> Result<AnyonState> {
        let m = &self.model;
        m.spec().check_charge(charge)?;
        if m.dual(charge) != charge {
            return Err(Error::Precondition(format!("charge {charge} is not self-dual")));
        }
        let n = self.len();
        if position > n {
            return Err(Error::Index { index: position, limit: n });
        }
        let base = self.to_left_nested();
        let mut externals = base.externals[..position].to_vec();
        externals.push(charge);
        externals.push(charge);
        externals.extend_from_slice(&base.externals[position..]);
        let amplitudes = base
            .amplitudes
            .iter()
            .map(|(p, v)| {
                let mut q = p[..position].to_vec();
                q.push(Charge::VACUUM);
                q.push(AnyonState::prefix(p, position));
                q.extend_from_slice(&p[position..]);
                (q, *v)
            })
            .collect();
        let grouped = AnyonState::from_parts(
            self.model.clone(),
            externals,
            Basis::Grouped { start: position, end: position + 1 },
            amplitudes,
        );
        Ok(grouped.to_left_nested())
    }

    /// Projects the pair `(i, i + 1)` onto fusion channel `outcome` and replaces it by
    /// one particle of that charge. Returns the Born weight and the unnormalized state.
    pub fn fuse_to(&self, i: usize, outcome: Charge) -> Result<(f64, AnyonState)> {
        if i + 1 >= self.len() {
            return Err(Error::Index { index: i, limit: self.len().saturating_sub(1) });
        }
        let g = self.grouped(i, i + 1)?;
        let mut externals = self.externals[..i].to_vec();
        externals.push(outcome);
        externals.extend_from_slice(&self.externals[i + 2..]);
        let mut amplitudes = BTreeMap::new();
        for (p, v) in &g.amplitudes {
            if p[i] != outcome {
                continue;
            }
            let mut q = p.clone();
            q.remove(i);
            amplitudes.insert(q, *v);
        }
        let st = AnyonState::from_parts(self.model.clone(), externals, Basis::LeftNested, amplitudes);
        Ok((st.norm_sqr(), st))
    }

    /// Born weights of the fusion channels of pair `(i, i + 1)`.
    pub fn fusion_distribution(&self, i: usize) -> Result<Vec<(Charge, f64)>> {
        if i + 1 >= self.len() {
            return Err(Error::Index { index: i, limit: self.len().saturating_sub(1) });
        }
        let (a, b) = (self.externals[i], self.externals[i + 1]);
        self.model
            .fusion_outcomes(a, b)
            .map(|c| Ok((c, self.fuse_to(i, c)?.0)))
            .collect()
    }

    /// Samples the fusion outcome of pair `(i, i + 1)`.
    pub fn fuse_quasiparticles<R: Rng + ?Sized>(&self, i: usize, rng: &mut R) -> Result<Measurement> {
        let dist = self.fusion_distribution(i)?;
        let weights: Vec<f64> = dist.iter().map(|(_, p)| *p).collect();
        let idx = sample_index(&weights, rng)?;
        let total: f64 = weights.iter().sum();
        let (p, st) = self.fuse_to(i, dist[idx].0)?;
        Ok(Measurement {
            outcome: dist[idx].0,
            probability: p / total,
            state: st.normalized()?,
        })
    }

    /// Deletes a charge-0 particle.
    pub fn remove_vacuum_particle(&self, i: usize) -> Result<AnyonState> {
        if i >= self.len() {
            return Err(Error::Index { index: i, limit: self.len() });
        }
        if !self.externals[i].is_vacuum() {
            return Err(Error::Precondition(format!("particle {i} has charge {}", self.externals[i])));
        }
        let base = self.to_left_nested();
        let mut externals = base.externals.clone();
        externals.remove(i);
        let amplitudes = base
            .amplitudes
            .iter()
            .map(|(p, v)| {
                let mut q = p.clone();
                q.remove(i);
                (q, *v)
            })
            .collect();
        Ok(AnyonState::from_parts(self.model.clone(), externals, Basis::LeftNested, amplitudes))
    }

    /// Removes the pair `(i, i + 1)`, which must be in a definite vacuum channel
    /// (vacuum weight at least `1 - tol` of the norm). A zero state passes trivially.
    pub fn remove_ancilla_pair(&self, i: usize, tol: f64) -> Result<AnyonState> {
        if i + 1 >= self.len() {
            return Err(Error::Index { index: i, limit: self.len().saturating_sub(1) });
        }
        let total = self.norm_sqr();
        let (p0, _) = self.project_charge(i..=i + 1, Charge::VACUUM)?;
        let weight = if total > 0.0 { p0 / total } else { 1.0 };
        if weight < 1.0 - tol {
            return Err(Error::Entanglement { index: i, weight });
        }
        let (_, fused) = self.fuse_to(i, Charge::VACUUM)?;
        fused.remove_vacuum_particle(i)
    }
}
