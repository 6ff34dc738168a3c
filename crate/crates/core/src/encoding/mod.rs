//! Qubit encodings on JK_4-style anyon chains and the gates available on them.

mod gate;
mod register;

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

pub use gate::{GateJson, GateMatrix, MatrixJson, CANONICAL_EPS};
pub use register::{bitstring, index_bits, EncodingKind, QubitRegister};

use crate::error::{Error, Result};
use crate::model::{AnyonModelData, Charge};
use crate::state::Chirality;

/// Leakage allowed when reading a register back as logical amplitudes.
pub const LEAK_TOL: f64 = 1e-10;

/// Counterclockwise exchange of particles `b`, `c` sitting to the right of a
/// charge-`a` line inside total `d`, written in the left-nested basis.
///
/// Rows index the intermediate `a × c` labels after the exchange, columns the
/// `a × b` labels before it.
pub fn exchange_matrix(m: &AnyonModelData, a: Charge, b: Charge, c: Charge, d: Charge) -> (Vec<Charge>, Vec<Charge>, DMatrix<Complex64>) {
    let (es, fs, f_in) = m.f_matrix(a, b, c, d);
    let (es_out, fs_out, f_out) = m.f_matrix(a, c, b, d);
    let mat = DMatrix::from_fn(es_out.len(), es.len(), |row, col| {
        fs.iter()
            .enumerate()
            .filter_map(|(j, &f)| {
                let jo = fs_out.iter().position(|&g| g == f)?;
                Some(f_out[(row, jo)].conj() * m.r_or_zero(b, c, f) * f_in[(col, j)])
            })
            .sum()
    });
    (es_out, es, mat)
}

fn restrict(m: &DMatrix<Complex64>, rows: &[Charge], cols: &[Charge], want: [u8; 2], have: [u8; 2]) -> Result<GateMatrix> {
    let pick = |labels: &[Charge], l: u8| {
        labels
            .iter()
            .position(|c| c.0 == l)
            .ok_or_else(|| Error::Invalid(format!("label {l} missing from block")))
    };
    let mut out = DMatrix::zeros(2, 2);
    for (r, &lr) in want.iter().enumerate() {
        for (cc, &lc) in have.iter().enumerate() {
            out[(r, cc)] = m[(pick(rows, lr)?, pick(cols, lc)?)];
        }
    }
    GateMatrix::new(out)
}

/// `R` gate on a 1111 qubit: exchange of the first two particles.
pub fn r_gate(m: &AnyonModelData) -> Result<GateMatrix> {
    let one = Charge(1);
    Ok(GateMatrix::diagonal(&[m.r(one, one, Charge(0))?, m.r(one, one, Charge(2))?]))
}

/// `G` gate on a 1111 qubit: exchange of the middle two particles.
pub fn g_gate(m: &AnyonModelData) -> Result<GateMatrix> {
    let one = Charge(1);
    let (rows, cols, b) = exchange_matrix(m, one, one, one, one);
    restrict(&b, &rows, &cols, [0, 2], [0, 2])
}

/// `Z` gate on a 1221 qubit: full twist of the first two particles.
pub fn z_gate(m: &AnyonModelData) -> Result<GateMatrix> {
    let (one, two) = (Charge(1), Charge(2));
    let d: Result<Vec<Complex64>> = [1u8, 3].iter().map(|&a| Ok(m.r(two, one, Charge(a))? * m.r(one, two, Charge(a))?)).collect();
    Ok(GateMatrix::diagonal(&d?))
}

/// `B` gate on a 1221 qubit: exchange of the two charge-2 particles.
pub fn b_gate(m: &AnyonModelData) -> Result<GateMatrix> {
    let (one, two) = (Charge(1), Charge(2));
    let (rows, cols, b) = exchange_matrix(m, one, two, two, one);
    restrict(&b, &rows, &cols, [1, 3], [1, 3])
}

/// Non-unitary map `P^(x)` from a 1111 qubit (columns a = 0, 2) to a 1221 qubit
/// (rows b = 1, 3) realised by the switching protocol with intermediate outcome `x`.
pub fn switch_matrix(m: &AnyonModelData, x: Charge) -> Result<GateMatrix> {
    if x.0 != 1 && x.0 != 3 {
        return Err(Error::Invalid(format!("switch outcome must be 1 or 3, got {x}")));
    }
    let (one, two) = (Charge(1), Charge(2));
    let norm = 1.0 / m.qdim(two).sqrt();
    let mut out = DMatrix::zeros(2, 2);
    for (r, b) in [1u8, 3].into_iter().enumerate() {
        for (c, a) in [0u8, 2].into_iter().enumerate() {
            let (a, b) = (Charge(a), Charge(b));
            out[(r, c)] = m.f(x, two, one, a, one, b) * m.f(one, one, x, b, a, two) * norm;
        }
    }
    GateMatrix::new(out)
}

/// Logical action of a braid word on a single block, obtained by braiding every
/// basis state. Fails if the word leaks out of the encoded subspace.
pub fn gate_from_braid_word(model: &Arc<AnyonModelData>, kind: EncodingKind, word: &[(usize, Chirality)]) -> Result<GateMatrix> {
    let n = kind.num_qubits();
    let dim = 1 << n;
    let mut out = DMatrix::zeros(dim, dim);
    for col in 0..dim {
        let reg = QubitRegister::encode(model, &index_bits(col, n), kind)?;
        let v = reg.braid_block(0, word)?.logical_vector(LEAK_TOL)?;
        out.set_column(col, &v);
    }
    GateMatrix::new(out)
}

/// Logical NOT on a 1221 block: a charge-4 pair is created between the first two
/// particles and absorbed by deterministic fusions with its neighbours.
pub fn apply_x_via_fusion(reg: &QubitRegister, block: usize) -> Result<QubitRegister> {
    if reg.layout().get(block) != Some(&EncodingKind::E1221) {
        return Err(Error::Precondition(format!("block {block} is not a 1221 qubit")));
    }
    let off = reg.block_offset(block);
    let four = Charge(4);
    let two = Charge(2);
    let mut st = reg.state().create_vacuum_pair(four, off + 2)?;
    let before = st.norm_sqr();
    for i in [off + 1, off + 2] {
        let (p, next) = st.fuse_to(i, two)?;
        if (p - before).abs() > 1e-9 * before.max(1.0) {
            return Err(Error::Invalid(format!("fusion at {i} was not deterministic (weight {p})")));
        }
        st = next;
    }
    reg.with_state(st)
}

/// Logical action of [`apply_x_via_fusion`] on a single 1221 qubit.
pub fn x_gate_via_fusion(model: &Arc<AnyonModelData>) -> Result<GateMatrix> {
    let mut out = DMatrix::zeros(2, 2);
    for col in 0..2 {
        let reg = QubitRegister::encode(model, &[col == 1], EncodingKind::E1221)?;
        out.set_column(col, &apply_x_via_fusion(&reg, 0)?.logical_vector(LEAK_TOL)?);
    }
    GateMatrix::new(out)
}

/// Braid words realising the named gates on their home encodings.
pub mod words {
    use crate::state::Chirality::{self, Ccw};

    pub const R_1111: &[(usize, Chirality)] = &[(0, Ccw)];
    pub const G_1111: &[(usize, Chirality)] = &[(1, Ccw)];
    pub const Z_1221: &[(usize, Chirality)] = &[(0, Ccw), (0, Ccw)];
    pub const B_1221: &[(usize, Chirality)] = &[(1, Ccw)];
}

/// Named gates computed once from a model.
#[derive(Clone, Debug)]
pub struct JkGates {
    pub r: GateMatrix,
    pub g: GateMatrix,
    pub z: GateMatrix,
    pub b: GateMatrix,
    pub x: GateMatrix,
    pub p1: GateMatrix,
    pub p3: GateMatrix,
}

impl JkGates {
    pub fn new(model: &Arc<AnyonModelData>) -> Result<Self> {
        Ok(JkGates {
            r: r_gate(model)?,
            g: g_gate(model)?,
            z: z_gate(model)?,
            b: b_gate(model)?,
            x: x_gate_via_fusion(model)?,
            p1: switch_matrix(model, Charge(1))?,
            p3: switch_matrix(model, Charge(3))?,
        })
    }

    /// Named single-qubit gates native to an encoding.
    pub fn for_encoding(&self, kind: EncodingKind) -> Vec<(&'static str, &GateMatrix)> {
        match kind {
            EncodingKind::E1111 => vec![("R", &self.r), ("G", &self.g)],
            EncodingKind::E1221 => vec![("Z", &self.z), ("B", &self.b), ("X", &self.x)],
            EncodingKind::E122221 => vec![],
        }
    }
}
