use std::sync::Arc;

use num_complex::Complex64;

use super::run::{Run, Status, Step};
use crate::encoding::{apply_x_via_fusion, words, EncodingKind, GateMatrix, QubitRegister, LEAK_TOL};
use crate::error::{Error, Result};
use crate::model::{AnyonModelData, Charge};
use crate::state::{AnyonState, Chirality};

/// Default bound on repeat-until-success loops.
pub const DEFAULT_MAX_ATTEMPTS: u32 = 64;

/// Relative tolerance used when checking ancilla shapes.
pub const ANCILLA_TOL: f64 = 1e-10;

fn expect_kind(reg: &QubitRegister, block: usize, kind: EncodingKind) -> Result<usize> {
    match reg.layout().get(block) {
        Some(&k) if k == kind => Ok(reg.block_offset(block)),
        Some(k) => Err(Error::Precondition(format!("block {block} is {k}, expected {kind}"))),
        None => Err(Error::Index {
            index: block,
            limit: reg.layout().len(),
        }),
    }
}

/// Replaces `count` blocks starting at `block` by `with`.
fn relayout(reg: &QubitRegister, block: usize, count: usize, with: &[EncodingKind]) -> Vec<EncodingKind> {
    let mut l = reg.layout()[..block].to_vec();
    l.extend_from_slice(with);
    l.extend_from_slice(&reg.layout()[block + count..]);
    l
}

/// Switches a 1111 block to a 1221 block. Records `switch.x` and `switch.y`; the
/// run succeeds only on `y = 2`.
pub fn switch_encoding(reg: &QubitRegister, block: usize, run: &mut Run) -> Result<Step> {
    let off = expect_kind(reg, block, EncodingKind::E1111)?;
    let st = reg.state().create_vacuum_pair(Charge(2), off + 3)?;
    let (x, st) = run.fuse("switch.x", &st, off + 2)?;
    run.note("x", x.0 as i64);
    let (y, st) = run.fuse("switch.y", &st, off + 1)?;
    if y != Charge(2) {
        return Ok(Step::discarded(st));
    }
    let reg = QubitRegister::from_state(relayout(reg, block, 1, &[EncodingKind::E1221]), st)?;
    Ok(Step::success(reg))
}

/// Merges 1221 blocks `block` and `block + 1` into one 122221 block with a forced
/// measurement on the two middle charge-1 particles.
pub fn merge(reg: &QubitRegister, block: usize, max_attempts: u32, run: &mut Run) -> Result<Step> {
    let off = expect_kind(reg, block, EncodingKind::E1221)?;
    expect_kind(reg, block + 1, EncodingKind::E1221)?;
    let mut st = reg.state().clone();
    for _ in 0..max_attempts {
        run.attempt("merge");
        let (x, next) = run.measure("merge.x", &st, off + 3..=off + 4)?;
        if x.is_vacuum() {
            let st = next.remove_ancilla_pair(off + 3, LEAK_TOL)?;
            let reg = QubitRegister::from_state(relayout(reg, block, 2, &[EncodingKind::E122221]), st)?;
            return Ok(Step::success(reg));
        }
        let (_, next) = run.measure("merge.y", &next, off + 4..=off + 7)?;
        st = next;
    }
    Ok(Step::ended(Status::TimedOut, reg.with_state(st)?))
}

/// Splits a 122221 block back into two 1221 blocks.
pub fn split(reg: &QubitRegister, block: usize, max_attempts: u32, run: &mut Run) -> Result<Step> {
    let off = expect_kind(reg, block, EncodingKind::E122221)?;
    let mut st = reg.state().create_vacuum_pair(Charge(1), off + 3)?;
    let layout = relayout(reg, block, 1, &[EncodingKind::E1221, EncodingKind::E1221]);
    for _ in 0..max_attempts {
        run.attempt("split");
        let (y, next) = run.measure("split.y", &st, off + 4..=off + 7)?;
        if y.is_vacuum() {
            return Ok(Step::success(QubitRegister::from_state(layout, next)?));
        }
        let (_, next) = run.measure("split.x", &next, off + 3..=off + 4)?;
        st = next;
    }
    // the inserted pair is not removable here, so report the raw state
    Ok(Step {
        status: Status::TimedOut,
        state: st,
        register: None,
    })
}

/// Topological qubit fusion of a 122221 block into one 1221 block. The final
/// outcome `z` (0 or 4) is recorded under `z`.
pub fn tqf(reg: &QubitRegister, block: usize, max_attempts: u32, run: &mut Run) -> Result<Step> {
    let off = expect_kind(reg, block, EncodingKind::E122221)?;
    let layout = relayout(reg, block, 1, &[EncodingKind::E1221]);
    let mut st = reg.state().clone();
    for _ in 0..max_attempts {
        run.attempt("tqf");
        let (z, next) = run.measure("tqf.z", &st, off + 2..=off + 3)?;
        match z.0 {
            2 => {
                let (_, next) = run.measure("tqf.v", &next, off + 3..=off + 5)?;
                st = next;
            }
            0 | 4 => {
                let mut next = next;
                if z.0 == 4 {
                    next = next.create_vacuum_pair(Charge(4), off + 4)?;
                    let (_, s) = run.fuse("tqf.absorb", &next, off + 3)?;
                    let (_, s) = run.fuse("tqf.absorb", &s, off + 4)?;
                    next = s;
                }
                run.note("z", z.0 as i64);
                let out = next.remove_ancilla_pair(off + 2, LEAK_TOL)?;
                return Ok(Step::success(QubitRegister::from_state(layout, out)?));
            }
            _ => unreachable!("2 x 2 only fuses to 0, 2, 4"),
        }
    }
    Ok(Step::ended(Status::TimedOut, reg.with_state(st)?))
}

/// `|R_{phi/2}> = (e^{-i phi/2}|1> + e^{i phi/2}|3>)/sqrt 2` on a 1221 qubit.
pub fn r_half_state(model: &Arc<AnyonModelData>, phi: f64) -> Result<QubitRegister> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    QubitRegister::from_logical(
        model,
        &[EncodingKind::E1221],
        &[Complex64::from_polar(s, -phi / 2.0), Complex64::from_polar(s, phi / 2.0)],
    )
}

/// Checks that a 1221 ancilla is a balanced superposition.
fn check_balanced(anc: &QubitRegister) -> Result<()> {
    if anc.layout() != [EncodingKind::E1221] {
        return Err(Error::Precondition("phase ancilla must be a single 1221 qubit".into()));
    }
    let n2 = anc.state().norm_sqr();
    let v = anc.logical_vector(ANCILLA_TOL * n2.max(f64::MIN_POSITIVE))?;
    if (v[0].norm_sqr() - v[1].norm_sqr()).abs() > ANCILLA_TOL.sqrt() * n2 {
        return Err(Error::Precondition(format!(
            "phase ancilla is not balanced (weights {:.3e}, {:.3e})",
            v[0].norm_sqr(),
            v[1].norm_sqr()
        )));
    }
    Ok(())
}

/// Moves block `from` to just after block `to` by relabeling.
fn adjacent_order(nb: usize, first: usize, second: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..nb).filter(|&b| b != second).collect();
    let pos = order.iter().position(|&b| b == first).unwrap();
    order.insert(pos + 1, second);
    order
}

/// Consumes a balanced ancilla `(e^{-i phi/2}|1> + e^{i phi/2}|3>)/sqrt 2` to apply
/// `R_{+phi/2}` (`z = 0`, noted `sign = 1`) or `R_{-phi/2}` (`z = 4`, `sign = -1`) to
/// the 1221 block `block`.
pub fn phase_gate(reg: &QubitRegister, block: usize, ancilla: &QubitRegister, max_attempts: u32, run: &mut Run) -> Result<Step> {
    expect_kind(reg, block, EncodingKind::E1221)?;
    check_balanced(ancilla)?;
    let nb = reg.layout().len();
    let joined = reg.tensor(ancilla)?.permute_blocks(&adjacent_order(nb + 1, block, nb))?;
    let merged = merge(&joined, block, max_attempts, run)?;
    if !merged.is_success() {
        return Ok(merged);
    }
    let fused = tqf(merged.register.as_ref().unwrap(), block, max_attempts, run)?;
    if fused.is_success() {
        let z = run.info()["z"];
        run.note("sign", if z == 0 { 1 } else { -1 });
    }
    Ok(fused)
}

/// Prepares a 1111 qubit in `|2>` from two vacuum pairs by a forced measurement.
pub fn prepare_state2(model: &Arc<AnyonModelData>, max_attempts: u32, run: &mut Run) -> Result<Step> {
    let vac = AnyonState::vacuum(model.clone());
    let mut st = vac.create_vacuum_pair(Charge(1), 0)?.create_vacuum_pair(Charge(1), 2)?;
    for _ in 0..max_attempts {
        run.attempt("state2");
        let (_, next) = run.measure("state2.mid", &st, 1..=2)?;
        let (c, next) = run.measure("state2.left", &next, 0..=1)?;
        st = next;
        if c == Charge(2) {
            return Ok(Step::success(QubitRegister::from_state(vec![EncodingKind::E1111], st)?));
        }
    }
    Ok(Step::ended(Status::TimedOut, QubitRegister::from_state(vec![EncodingKind::E1111], st)?))
}

/// Sign of the exchange used in `|Phi_{s,x}>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn chirality(self) -> Chirality {
        match self {
            Sign::Plus => Chirality::Ccw,
            Sign::Minus => Chirality::Cw,
        }
    }

    /// Switch outcome paired with this sign in the ancilla recipe.
    pub fn target_x(self) -> Charge {
        match self {
            Sign::Plus => Charge(1),
            Sign::Minus => Charge(3),
        }
    }
}

/// Prepares `P^(x) G^s |2>` (normalized) on a 1221 qubit, with an X correction
/// when the switch lands on the other `x`.
pub fn prepare_phi(model: &Arc<AnyonModelData>, s: Sign, max_attempts: u32, run: &mut Run) -> Result<Step> {
    let two = prepare_state2(model, max_attempts, run)?;
    if !two.is_success() {
        return Ok(two);
    }
    let reg = two.into_register()?;
    let reg = reg.braid_block(0, &[(1, s.chirality())])?;
    let sw = switch_encoding(&reg, 0, run)?;
    if !sw.is_success() {
        return Ok(sw);
    }
    let mut reg = sw.into_register()?;
    if Charge(run.info()["x"] as u8) != s.target_x() {
        reg = apply_x_via_fusion(&reg, 0)?;
    }
    Ok(Step::success(reg))
}

/// Prepares `|K>` from `|Phi_{+1,1}> |Phi_{-1,3}>` by a merge and TQF; `z = 4` is
/// discarded.
pub fn prepare_k(model: &Arc<AnyonModelData>, max_attempts: u32, run: &mut Run) -> Result<Step> {
    let a = prepare_phi(model, Sign::Plus, max_attempts, run)?;
    if !a.is_success() {
        return Ok(a);
    }
    let b = prepare_phi(model, Sign::Minus, max_attempts, run)?;
    if !b.is_success() {
        return Ok(b);
    }
    prepare_k_from(&a.into_register()?, &b.into_register()?, max_attempts, run)
}

/// Second half of [`prepare_k`], starting from the two prepared ancillas.
pub fn prepare_k_from(phi_plus: &QubitRegister, phi_minus: &QubitRegister, max_attempts: u32, run: &mut Run) -> Result<Step> {
    let merged = merge(&phi_plus.tensor(phi_minus)?, 0, max_attempts, run)?;
    if !merged.is_success() {
        return Ok(merged);
    }
    let fused = tqf(merged.register.as_ref().unwrap(), 0, max_attempts, run)?;
    if fused.is_success() && run.info()["z"] != 0 {
        return Ok(Step::discarded(fused.state));
    }
    Ok(fused)
}

/// Step budget for the K random walk.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CutoffPolicy {
    /// At most this many steps.
    Fixed(u32),
    /// For a computation with `k` K gates: the largest odd integer not above `k^2`.
    KSquared(u32),
}

impl CutoffPolicy {
    pub fn budget(self) -> u32 {
        match self {
            CutoffPolicy::Fixed(n) => n,
            CutoffPolicy::KSquared(k) => {
                let n = k.saturating_mul(k).max(1);
                if n % 2 == 0 {
                    n - 1
                } else {
                    n
                }
            }
        }
    }
}

/// Applies `K` to a 1221 block by consuming copies of `k_state` until the net
/// exponent reaches +1 or the budget runs out. Notes `position` and `steps`.
pub fn k_gate_random_walk(
    reg: &QubitRegister,
    block: usize,
    k_state: &QubitRegister,
    policy: CutoffPolicy,
    max_attempts: u32,
    run: &mut Run,
) -> Result<Step> {
    let budget = policy.budget();
    let mut reg = reg.clone();
    let mut position = 0i64;
    for steps in 1..=budget {
        let step = phase_gate(&reg, block, k_state, max_attempts, run)?;
        if !step.is_success() {
            return Ok(step);
        }
        position += run.info()["sign"];
        reg = step.into_register()?;
        run.note("position", position);
        run.note("steps", steps as i64);
        if position == 1 {
            return Ok(Step::success(reg));
        }
    }
    Ok(Step::ended(Status::TimedOut, reg))
}

/// Turns a 1221 block into `|+>` by observing the charge-2 pair, correcting with `Z`.
pub fn prepare_plus(reg: &QubitRegister, block: usize, run: &mut Run) -> Result<Step> {
    let off = expect_kind(reg, block, EncodingKind::E1221)?;
    let (b, st) = run.measure("plus.b", reg.state(), off + 1..=off + 2)?;
    let mut out = reg.with_state(st)?;
    if b == Charge(2) {
        out = out.braid_block(block, words::Z_1221)?;
    }
    Ok(Step::success(out))
}

/// Exchanges used after the `r = 0` projection: particles 2,3 counterclockwise and
/// 4,5 clockwise.
pub const BELL_EXCHANGES: [(usize, Chirality); 2] = [(2, Chirality::Ccw), (4, Chirality::Cw)];

/// Prepares `|Phi+>` on two 1221 qubits: two `|+>` qubits, a forced projection of
/// particles 2..=5 onto total charge 0, then rearrangement into two blocks.
pub fn prepare_bell(model: &Arc<AnyonModelData>, max_attempts: u32, run: &mut Run) -> Result<Step> {
    let fresh = QubitRegister::encode(model, &[false], EncodingKind::E1221)?;
    let mut last = None;
    for _ in 0..max_attempts {
        run.attempt("bell");
        let a = prepare_plus(&fresh, 0, run)?.into_register()?;
        let b = prepare_plus(&fresh, 0, run)?.into_register()?;
        let pair = a.tensor(&b)?;
        let (r, st) = run.measure("bell.r", pair.state(), 2..=5)?;
        if !r.is_vacuum() {
            last = Some(st);
            continue;
        }
        let mut word = BELL_EXCHANGES.to_vec();
        // carry particles 6 and 7 leftwards past the neutral cluster 2..=5
        word.extend([5, 4, 3, 2].map(|i| (i, Chirality::Ccw)));
        word.extend([6, 5, 4, 3].map(|i| (i, Chirality::Ccw)));
        let st = st.braid_word(&word)?;
        let reg = QubitRegister::from_state(vec![EncodingKind::E1221; 2], st)?;
        return Ok(Step::success(reg));
    }
    Ok(Step {
        status: Status::TimedOut,
        state: last.unwrap_or_else(|| AnyonState::vacuum(model.clone())),
        register: None,
    })
}

/// `(1 (x) h)|Phi+>`; with the exact Hadamard this is `|Phi_H>`.
pub fn prepare_phi_h(model: &Arc<AnyonModelData>, h: &GateMatrix, max_attempts: u32, run: &mut Run) -> Result<Step> {
    if h.dim() != 2 {
        return Err(Error::Shape(format!("expected a single-qubit gate, got dim {}", h.dim())));
    }
    let bell = prepare_bell(model, max_attempts, run)?;
    if !bell.is_success() {
        return Ok(bell);
    }
    let reg = bell.into_register()?;
    let gate = GateMatrix::identity(2).kron(h);
    Ok(Step::success(reg.apply_logical(&gate, LEAK_TOL * reg.state().norm_sqr().max(1.0))?))
}

/// `|Phi_H> = (|11> + |13> + |31> - |33>)/2` as logical amplitudes.
pub fn phi_h_amplitudes() -> [Complex64; 4] {
    let h = Complex64::new(0.5, 0.0);
    [h, h, h, -h]
}

/// Consumes a `|Phi_H>` pair to apply controlled-Z to 1221 blocks `a` and `b`.
/// Notes `zA` and `zB`. `ancilla_tol` bounds the accepted infidelity of the pair.
pub fn apply_cz(
    reg: &QubitRegister,
    a: usize,
    b: usize,
    ancilla: &QubitRegister,
    ancilla_tol: f64,
    max_attempts: u32,
    run: &mut Run,
) -> Result<Step> {
    expect_kind(reg, a, EncodingKind::E1221)?;
    expect_kind(reg, b, EncodingKind::E1221)?;
    if a == b {
        return Err(Error::Invalid("controlled-Z needs two distinct blocks".into()));
    }
    if ancilla.layout() != [EncodingKind::E1221, EncodingKind::E1221] {
        return Err(Error::Precondition("ancilla must be two 1221 qubits".into()));
    }
    let n2 = ancilla.state().norm_sqr();
    if n2 > 0.0 {
        let target = QubitRegister::from_logical(ancilla.model(), ancilla.layout(), &phi_h_amplitudes())?;
        let fid = ancilla.state().fidelity(target.state())?;
        if fid < 1.0 - ancilla_tol {
            return Err(Error::Precondition(format!("ancilla fidelity with |Phi_H> is {fid}")));
        }
    }
    let nb = reg.layout().len();
    // order: other blocks, A, ancilla 1, B, ancilla 2
    let others: Vec<usize> = (0..nb).filter(|&x| x != a && x != b).collect();
    let mut order = others.clone();
    order.extend([a, nb, b, nb + 1]);
    let mut cur = reg.tensor(ancilla)?.permute_blocks(&order)?;
    let base = others.len();
    // z = 4 on one side flips that ancilla, which through |Phi_H> is a Z on the other qubit
    let mut flips = [false; 2];
    for (side, (label, blk)) in [("zA", base), ("zB", base + 1)].into_iter().enumerate() {
        let merged = merge(&cur, blk, max_attempts, run)?;
        if !merged.is_success() {
            return Ok(merged);
        }
        let fused = tqf(merged.register.as_ref().unwrap(), blk, max_attempts, run)?;
        if !fused.is_success() {
            return Ok(fused);
        }
        let z = run.info()["z"];
        run.note(label, z);
        cur = fused.into_register()?;
        flips[side] = z == 4;
    }
    if flips[0] {
        cur = cur.braid_block(base + 1, words::Z_1221)?;
    }
    if flips[1] {
        cur = cur.braid_block(base, words::Z_1221)?;
    }
    // back to the caller's block order
    let mut placed: Vec<usize> = others;
    placed.extend([a, b]);
    let mut inverse = vec![0; nb];
    for (pos, &orig) in placed.iter().enumerate() {
        inverse[orig] = pos;
    }
    Ok(Step::success(cur.permute_blocks(&inverse)?))
}
