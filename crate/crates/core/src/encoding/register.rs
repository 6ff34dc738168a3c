use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::gate::GateMatrix;
use crate::error::{Error, Result};
use crate::model::{AnyonModelData, Charge};
use crate::state::{AnyonState, Chirality, Path};

/// Qubit encodings in blocks of quasiparticles with total charge 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EncodingKind {
    /// Charges (1,1,1,1); logical basis a in {0, 2}.
    #[serde(rename = "1111")]
    E1111,
    /// Charges (1,2,2,1); logical basis a in {1, 3}.
    #[serde(rename = "1221")]
    E1221,
    /// Charges (1,2,2,2,2,1) with the middle line fixed to 1; basis (a, b) in {1, 3}^2.
    #[serde(rename = "122221")]
    E122221,
}

impl EncodingKind {
    pub fn externals(self) -> &'static [u8] {
        match self {
            EncodingKind::E1111 => &[1, 1, 1, 1],
            EncodingKind::E1221 => &[1, 2, 2, 1],
            EncodingKind::E122221 => &[1, 2, 2, 2, 2, 1],
        }
    }

    pub fn len(self) -> usize {
        self.externals().len()
    }

    pub fn num_qubits(self) -> usize {
        match self {
            EncodingKind::E122221 => 2,
            _ => 1,
        }
    }

    /// Charge labels for logical `|0>` and `|1>`.
    pub fn levels(self) -> [u8; 2] {
        match self {
            EncodingKind::E1111 => [0, 2],
            _ => [1, 3],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            EncodingKind::E1111 => "1111",
            EncodingKind::E1221 => "1221",
            EncodingKind::E122221 => "122221",
        }
    }

    /// Left-nested path of a logical basis state.
    pub fn block_path(self, bits: &[bool]) -> Result<Path> {
        if bits.len() != self.num_qubits() {
            return Err(Error::Shape(format!(
                "{} encodes {} qubit(s), got {} bits",
                self.name(),
                self.num_qubits(),
                bits.len()
            )));
        }
        let lv = |b: bool| Charge(self.levels()[usize::from(b)]);
        Ok(match self {
            EncodingKind::E1111 | EncodingKind::E1221 => vec![Charge(1), lv(bits[0]), Charge(1), Charge(0)],
            EncodingKind::E122221 => vec![Charge(1), lv(bits[0]), Charge(1), lv(bits[1]), Charge(1), Charge(0)],
        })
    }

    /// Inverse of [`block_path`](Self::block_path); `None` outside the logical subspace.
    pub fn decode_block(self, path: &[Charge]) -> Option<Vec<bool>> {
        let bit = |c: Charge| self.levels().iter().position(|&l| l == c.0).map(|i| i == 1);
        let bits = match self {
            EncodingKind::E1111 | EncodingKind::E1221 => vec![bit(*path.get(1)?)?],
            EncodingKind::E122221 => vec![bit(*path.get(1)?)?, bit(*path.get(3)?)?],
        };
        (self.block_path(&bits).ok()? == path).then_some(bits)
    }
}

impl fmt::Display for EncodingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EncodingKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1111" => Ok(EncodingKind::E1111),
            "1221" => Ok(EncodingKind::E1221),
            "122221" => Ok(EncodingKind::E122221),
            _ => Err(Error::Invalid(format!("unknown encoding '{s}'"))),
        }
    }
}

/// Logical basis label such as `"01"`; qubit 0 is the leftmost character.
pub fn bitstring(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Bits of basis index `idx` for `n` qubits, most significant first.
pub fn index_bits(idx: usize, n: usize) -> Vec<bool> {
    (0..n).map(|q| (idx >> (n - 1 - q)) & 1 == 1).collect()
}

fn bits_index(bits: &[bool]) -> usize {
    bits.iter().fold(0, |acc, &b| (acc << 1) | usize::from(b))
}

/// Encoded qubits: a sequence of blocks laid out left to right.
#[derive(Clone, Debug)]
pub struct QubitRegister {
    layout: Vec<EncodingKind>,
    state: AnyonState,
}

impl QubitRegister {
    /// Wraps a state; the externals must match the layout.
    pub fn from_state(layout: Vec<EncodingKind>, state: AnyonState) -> Result<Self> {
        let expect: Vec<Charge> = layout.iter().flat_map(|k| k.externals().iter().map(|&c| Charge(c))).collect();
        if state.externals() != &expect[..] {
            return Err(Error::Shape(format!(
                "externals {:?} do not match layout {:?}",
                state.externals(),
                layout
            )));
        }
        Ok(QubitRegister { layout, state })
    }

    /// One block in a logical basis state.
    pub fn encode(model: &Arc<AnyonModelData>, bits: &[bool], kind: EncodingKind) -> Result<Self> {
        Self::encode_layout(model, &[kind], bits)
    }

    /// Several blocks in a logical basis state.
    pub fn encode_layout(model: &Arc<AnyonModelData>, layout: &[EncodingKind], bits: &[bool]) -> Result<Self> {
        let n: usize = layout.iter().map(|k| k.num_qubits()).sum();
        if bits.len() != n {
            return Err(Error::Shape(format!("layout holds {n} qubits, got {} bits", bits.len())));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[bits_index(bits)] = Complex64::new(1.0, 0.0);
        Self::from_logical(model, layout, &amps)
    }

    /// Register with the given logical amplitudes (index order: qubit 0 most significant).
    pub fn from_logical(model: &Arc<AnyonModelData>, layout: &[EncodingKind], amps: &[Complex64]) -> Result<Self> {
        let n: usize = layout.iter().map(|k| k.num_qubits()).sum();
        if amps.len() != 1 << n {
            return Err(Error::Shape(format!("expected {} amplitudes, got {}", 1 << n, amps.len())));
        }
        let externals: Vec<Charge> = layout.iter().flat_map(|k| k.externals().iter().map(|&c| Charge(c))).collect();
        let mut terms = Vec::new();
        for (idx, &a) in amps.iter().enumerate() {
            if a == Complex64::new(0.0, 0.0) {
                continue;
            }
            let bits = index_bits(idx, n);
            let mut path = Vec::new();
            let mut q = 0;
            for k in layout {
                path.extend(k.block_path(&bits[q..q + k.num_qubits()])?);
                q += k.num_qubits();
            }
            terms.push((path, a));
        }
        let state = AnyonState::from_amplitudes(model.clone(), externals, terms)?;
        Ok(QubitRegister {
            layout: layout.to_vec(),
            state,
        })
    }

    pub fn layout(&self) -> &[EncodingKind] {
        &self.layout
    }

    pub fn state(&self) -> &AnyonState {
        &self.state
    }

    pub fn into_state(self) -> AnyonState {
        self.state
    }

    pub fn model(&self) -> &Arc<AnyonModelData> {
        self.state.model()
    }

    pub fn num_qubits(&self) -> usize {
        self.layout.iter().map(|k| k.num_qubits()).sum()
    }

    /// First particle index of block `b`.
    pub fn block_offset(&self, b: usize) -> usize {
        self.layout[..b].iter().map(|k| k.len()).sum()
    }

    /// Splits an amplitude map into logical and leaked parts.
    fn split(&self) -> (BTreeMap<usize, Complex64>, f64) {
        let st = self.state.to_left_nested();
        let n = self.num_qubits();
        let mut logical = BTreeMap::new();
        let mut leaked = 0.0;
        for (p, v) in st.amplitudes() {
            let mut bits = Vec::with_capacity(n);
            let mut off = 0;
            let mut ok = true;
            for k in &self.layout {
                match k.decode_block(&p[off..off + k.len()]) {
                    Some(b) => bits.extend(b),
                    None => {
                        ok = false;
                        break;
                    }
                }
                off += k.len();
            }
            if ok {
                *logical.entry(bits_index(&bits)).or_insert(Complex64::new(0.0, 0.0)) += v;
            } else {
                leaked += v.norm_sqr();
            }
        }
        (logical, leaked)
    }

    /// Squared norm outside the logical subspace.
    pub fn leaked_mass(&self) -> f64 {
        self.split().1
    }

    /// Logical amplitudes keyed by bitstring; fails when the leaked mass exceeds `tol`.
    pub fn decode(&self, tol: f64) -> Result<BTreeMap<String, Complex64>> {
        let n = self.num_qubits();
        let (logical, leaked) = self.split();
        if leaked > tol {
            return Err(Error::Leakage { leaked });
        }
        Ok(logical.into_iter().map(|(i, v)| (bitstring(&index_bits(i, n)), v)).collect())
    }

    /// Dense logical vector; fails on leakage above `tol`.
    pub fn logical_vector(&self, tol: f64) -> Result<DVector<Complex64>> {
        let (logical, leaked) = self.split();
        if leaked > tol {
            return Err(Error::Leakage { leaked });
        }
        let mut v = DVector::zeros(1 << self.num_qubits());
        for (i, a) in logical {
            v[i] = a;
        }
        Ok(v)
    }

    pub fn normalized(&self) -> Result<Self> {
        Ok(QubitRegister {
            layout: self.layout.clone(),
            state: self.state.normalized()?,
        })
    }

    pub fn with_state(&self, state: AnyonState) -> Result<Self> {
        Self::from_state(self.layout.clone(), state)
    }

    /// Applies a braid word with positions relative to block `b`.
    pub fn braid_block(&self, b: usize, word: &[(usize, Chirality)]) -> Result<Self> {
        let off = self.block_offset(b);
        let len = self.layout[b].len();
        if word.iter().any(|&(i, _)| i + 1 >= len) {
            return Err(Error::Index { index: len, limit: len - 1 });
        }
        let shifted: Vec<(usize, Chirality)> = word.iter().map(|&(i, c)| (i + off, c)).collect();
        self.with_state(self.state.braid_word(&shifted)?)
    }

    /// Applies a logical gate directly to the logical amplitudes (no anyon operations).
    pub fn apply_logical(&self, gate: &GateMatrix, tol: f64) -> Result<Self> {
        let v = self.logical_vector(tol)?;
        if gate.dim() != v.len() {
            return Err(Error::Shape(format!("gate dim {} vs register dim {}", gate.dim(), v.len())));
        }
        let w = gate.matrix() * v;
        Self::from_logical(self.model(), &self.layout, w.as_slice())
    }

    /// Places two registers side by side.
    pub fn tensor(&self, other: &QubitRegister) -> Result<Self> {
        let mut layout = self.layout.clone();
        layout.extend_from_slice(&other.layout);
        Self::from_state(layout, self.state.tensor(&other.state)?)
    }

    /// Reorders blocks. Blocks have total charge 0, so moving them is a relabeling.
    pub fn permute_blocks(&self, order: &[usize]) -> Result<Self> {
        let nb = self.layout.len();
        let mut seen = vec![false; nb];
        if order.len() != nb || order.iter().any(|&b| b >= nb || std::mem::replace(&mut seen[b], true)) {
            return Err(Error::Invalid(format!("{order:?} is not a permutation of {nb} blocks")));
        }
        let offsets: Vec<usize> = (0..nb).map(|b| self.block_offset(b)).collect();
        let lens: Vec<usize> = self.layout.iter().map(|k| k.len()).collect();
        let st = self.state.to_left_nested();
        let mut boundary_ok = true;
        for (p, _) in st.amplitudes() {
            for b in 0..nb {
                if !p[offsets[b] + lens[b] - 1].is_vacuum() {
                    boundary_ok = false;
                }
            }
        }
        if !boundary_ok {
            return Err(Error::Precondition("blocks must have total charge 0".into()));
        }
        let layout: Vec<EncodingKind> = order.iter().map(|&b| self.layout[b]).collect();
        let externals: Vec<Charge> = layout.iter().flat_map(|k| k.externals().iter().map(|&c| Charge(c))).collect();
        let state = st.relabel_paths(externals, |p| {
            order
                .iter()
                .flat_map(|&b| p[offsets[b]..offsets[b] + lens[b]].iter().copied())
                .collect()
        })?;
        Self::from_state(layout, state)
    }

    /// Splits off the first `blocks` blocks when the two parts are unentangled.
    pub fn split_blocks(&self, blocks: usize, tol: f64) -> Result<(QubitRegister, QubitRegister)> {
        let nq_left: usize = self.layout[..blocks].iter().map(|k| k.num_qubits()).sum();
        let nq = self.num_qubits();
        let nq_right = nq - nq_left;
        let v = self.logical_vector(tol)?;
        let mat = nalgebra::DMatrix::from_fn(1 << nq_left, 1 << nq_right, |r, c| v[(r << nq_right) | c]);
        let svd = mat.svd(true, true);
        let sv = &svd.singular_values;
        if sv.iter().skip(1).any(|&s| s > tol.sqrt().max(1e-7)) {
            return Err(Error::Precondition("register blocks are entangled".into()));
        }
        let u = svd.u.unwrap();
        let vt = svd.v_t.unwrap();
        let s0 = Complex64::new(sv[0], 0.0);
        let left: Vec<Complex64> = (0..(1 << nq_left)).map(|i| u[(i, 0)] * s0).collect();
        let right: Vec<Complex64> = (0..(1 << nq_right)).map(|i| vt[(0, i)]).collect();
        Ok((
            Self::from_logical(self.model(), &self.layout[..blocks], &left)?,
            Self::from_logical(self.model(), &self.layout[blocks..], &right)?,
        ))
    }
}
