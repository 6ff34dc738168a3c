use std::collections::BTreeMap;
use std::sync::Arc;

use anyonkit::analysis::{self, GateSet, GeneratorSet, Letter};
use anyonkit::encoding::{EncodingKind, GateMatrix, JkGates};
use anyonkit::model::{consistency_report, AnyonModelData, Family, ModelDump, TheorySpec};
use anyonkit::protocol::{execute, BranchTree, Sampled, StepRecord, DEFAULT_MAX_ATTEMPTS};
use anyonkit::{Complex64, Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::*;
use crate::protocols::Setup;

/// A command's result: the JSON payload, its CSV view and the exit code.
pub struct Output {
    pub json: Value,
    pub csv: Table,
    pub exit: i32,
}

#[derive(Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Output {
    fn ok(json: impl Serialize, csv: Table) -> Result<Self> {
        Ok(Output {
            json: serde_json::to_value(json).map_err(|e| Error::Invalid(e.to_string()))?,
            csv,
            exit: 0,
        })
    }
}

fn fmt(x: f64) -> String {
    format!("{x:e}")
}

fn model(args: &ModelArgs) -> Result<AnyonModelData> {
    let family = match (args.family, args.conjugate) {
        (FamilyArg::Jk, false) => Family::Jk,
        (FamilyArg::Jk, true) => Family::JkConjugate,
        (FamilyArg::Su2, false) => Family::Su2,
        (FamilyArg::Su2, true) => Family::Su2Conjugate,
    };
    AnyonModelData::new(TheorySpec::new(family, args.level)?)
}

pub fn model_dump(args: &ModelArgs) -> Result<Output> {
    let dump = ModelDump::from_model(&model(args)?);
    let mut t = Table {
        header: vec!["kind", "indices", "re", "im"],
        rows: Vec::new(),
    };
    for (kind, list) in [("F", &dump.f_symbols), ("R", &dump.r_symbols)] {
        for v in list {
            let idx: Vec<String> = v.idx.iter().map(u8::to_string).collect();
            t.rows.push(vec![kind.into(), idx.join(" "), fmt(v.re), fmt(v.im)]);
        }
    }
    Output::ok(dump, t)
}

pub fn model_verify(args: &ModelArgs, tol: f64) -> Result<Output> {
    let report = consistency_report(&model(args)?, tol);
    let passed = report.passed();
    let t = Table {
        header: vec!["check", "max_residual", "instances", "passed"],
        rows: report
            .checks
            .iter()
            .map(|c| vec![c.name.clone(), fmt(c.max_residual), c.instances.to_string(), (c.max_residual <= tol).to_string()])
            .collect(),
    };
    let mut out = Output::ok(
        json!({ "passed": passed, "maxResidual": report.max_residual(), "report": report }),
        t,
    )?;
    out.exit = if passed { 0 } else { 1 };
    Ok(out)
}

pub fn gates_dump(encoding: EncodingArg) -> Result<Output> {
    let m = Arc::new(AnyonModelData::new(TheorySpec::jk(4))?);
    let gates = JkGates::new(&m)?;
    let kind = match encoding {
        EncodingArg::E1111 => EncodingKind::E1111,
        EncodingArg::E1221 => EncodingKind::E1221,
    };
    let mut map = BTreeMap::new();
    let mut t = Table {
        header: vec!["gate", "row", "col", "re", "im", "canonical_re", "canonical_im"],
        rows: Vec::new(),
    };
    for (name, g) in gates.for_encoding(kind) {
        let canon = g.phase_canonical();
        for r in 0..g.dim() {
            for c in 0..g.dim() {
                let (z, w) = (g.entry(r, c), canon.entry(r, c));
                t.rows.push(vec![name.into(), r.to_string(), c.to_string(), fmt(z.re), fmt(z.im), fmt(w.re), fmt(w.im)]);
            }
        }
        map.insert(name, g.to_json());
    }
    Output::ok(json!({ "encoding": kind.name(), "gates": map }), t)
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ShotRecord {
    shot: u64,
    #[serde(flatten)]
    record: StepRecord,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct RunJson {
    protocol: &'static str,
    seed: u64,
    shots: u64,
    max_attempts: u32,
    records: Vec<ShotRecord>,
    statuses: BTreeMap<String, u64>,
    aggregate: BTreeMap<String, f64>,
}

/// Shot `s` draws from stream `s` of the ChaCha8 generator seeded with `seed`, so
/// adding shots leaves earlier shots unchanged.
pub fn protocol_run(args: &ProtocolArgs, seed: u64, shots: u64) -> Result<Output> {
    let setup = Setup::new(args, DEFAULT_MAX_ATTEMPTS)?;
    let outcomes: Vec<(String, Vec<StepRecord>)> = (0..shots)
        .into_par_iter()
        .map(|shot| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(shot);
            let mut driver = Sampled::new(rng);
            let out = execute(&mut driver, |r| setup.run(r))?;
            Ok((status_name(out.status), out.records))
        })
        .collect::<Result<_>>()?;
    let mut statuses = BTreeMap::new();
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    let mut records = Vec::new();
    for (shot, (status, recs)) in outcomes.into_iter().enumerate() {
        *statuses.entry(status).or_insert(0) += 1;
        let key = recs.iter().map(|r| format!("{}={}", r.step, r.outcome)).collect::<Vec<_>>().join(",");
        *counts.entry(key).or_insert(0) += 1;
        records.extend(recs.into_iter().map(|record| ShotRecord { shot: shot as u64, record }));
    }
    let aggregate: BTreeMap<String, f64> = counts.iter().map(|(k, &c)| (k.clone(), c as f64 / shots.max(1) as f64)).collect();
    let t = Table {
        header: vec!["branch", "count", "frequency"],
        rows: counts
            .iter()
            .map(|(k, &c)| vec![k.clone(), c.to_string(), (c as f64 / shots.max(1) as f64).to_string()])
            .collect(),
    };
    Output::ok(
        RunJson {
            protocol: args.name.label(),
            seed,
            shots,
            max_attempts: args.max_attempts.unwrap_or(DEFAULT_MAX_ATTEMPTS),
            records,
            statuses,
            aggregate,
        },
        t,
    )
}

fn status_name(s: anyonkit::protocol::Status) -> String {
    serde_json::to_value(s).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
}

/// Default loop bound for enumeration, small enough to keep trees finite.
const BRANCH_ATTEMPTS: u32 = 2;

pub fn protocol_branches(args: &ProtocolArgs, max_branches: usize) -> Result<Output> {
    let setup = Setup::new(args, BRANCH_ATTEMPTS)?;
    let tree = BranchTree::enumerate(|r| setup.run(r), max_branches)?;
    let t = Table {
        header: vec!["branch", "status", "probability"],
        rows: tree
            .leaves
            .iter()
            .map(|l| vec![l.key(), status_name(l.status), l.probability.to_string()])
            .collect(),
    };
    Output::ok(
        json!({
            "protocol": args.name.label(),
            "maxAttempts": args.max_attempts.unwrap_or(BRANCH_ATTEMPTS),
            "tree": tree.to_json(),
        }),
        t,
    )
}

fn gate_set() -> Result<GateSet> {
    GateSet::new(&Arc::new(AnyonModelData::new(TheorySpec::jk(4))?))
}

pub fn closure(set: SetArg, cap: usize, elements: bool, tol: f64) -> Result<Output> {
    let gs = gate_set()?;
    let (which, name) = match set {
        SetArg::Braid1111 => (GeneratorSet::Braid1111, "braid1111"),
        SetArg::Braid1221 => (GeneratorSet::Braid1221, "braid1221"),
        SetArg::Xzb => (GeneratorSet::Xzb, "xzb"),
        SetArg::Zbk => (GeneratorSet::Zbk, "zbk"),
    };
    // dedup needs a looser tolerance than the matrix checks
    let dedup = tol.max(analysis::CLOSURE_TOL);
    let cl = analysis::close_group(&gs.generators(which), dedup, cap)?;
    let t = Table {
        header: vec!["set", "size", "finite", "cap"],
        rows: vec![vec![name.into(), cl.size().to_string(), cl.finite.to_string(), cap.to_string()]],
    };
    Output::ok(json!({ "set": name, "closure": cl.to_json(elements) }), t)
}

pub fn density() -> Result<Output> {
    let r = gate_set()?.density_witness()?;
    let t = Table {
        header: vec!["nested_commutator_distance", "bk_noncommutation", "cos_alpha", "continued_fraction"],
        rows: vec![vec![
            r.nested_commutator_distance.to_string(),
            r.bk_noncommutation.to_string(),
            r.cos_alpha.to_string(),
            r.continued_fraction.iter().map(u64::to_string).collect::<Vec<_>>().join(" "),
        ]],
    };
    Output::ok(r, t)
}

pub fn walk(n: u64, trials: Option<u64>, seed: u64) -> Result<Output> {
    let stats = analysis::walk_exact(n)?;
    let mc = trials.map(|t| analysis::walk_monte_carlo(n, t, seed)).transpose()?;
    let exact = stats.exact_fraction().map(|(a, b)| format!("{a}/{b}"));
    let t = Table {
        header: vec!["n", "probability", "exact", "asymptotic", "mc_trials", "mc_fraction", "mc_sigma"],
        rows: vec![vec![
            n.to_string(),
            stats.probability.to_string(),
            exact.clone().unwrap_or_default(),
            stats.asymptotic().to_string(),
            mc.as_ref().map(|m| m.trials.to_string()).unwrap_or_default(),
            mc.as_ref().map(|m| m.fraction.to_string()).unwrap_or_default(),
            mc.as_ref().map(|m| m.sigma.to_string()).unwrap_or_default(),
        ]],
    };
    Output::ok(json!({ "walk": stats.to_json(), "exactFraction": exact, "monteCarlo": mc, "seed": seed }), t)
}

pub fn bqp(ks: &[u64]) -> Result<Output> {
    let r = analysis::bqp_limit(ks)?;
    let t = Table {
        header: vec!["k", "budget", "p_fail", "success", "limit", "relative_to_limit"],
        rows: r
            .rows
            .iter()
            .map(|row| {
                vec![
                    row.k.to_string(),
                    row.budget.to_string(),
                    row.p_fail.to_string(),
                    row.success.to_string(),
                    r.limit.to_string(),
                    row.relative_to_limit.to_string(),
                ]
            })
            .collect(),
    };
    Output::ok(r, t)
}

fn target_gate(t: TargetArg, gs: &GateSet) -> GateMatrix {
    let c = |re, im| Complex64::new(re, im);
    match t {
        TargetArg::H => GateMatrix::hadamard(),
        TargetArg::X => GateMatrix::pauli_x(),
        TargetArg::Z => GateMatrix::pauli_z(),
        TargetArg::S => GateMatrix::diagonal(&[c(1.0, 0.0), c(0.0, 1.0)]),
        TargetArg::T => GateMatrix::phase(std::f64::consts::FRAC_PI_4),
        TargetArg::B => gs.gates.b.clone(),
        TargetArg::I => GateMatrix::identity(2),
    }
}

pub fn synth(args: &SynthArgs) -> Result<Output> {
    let gs = gate_set()?;
    let letters: Vec<Letter> = args.alphabet.iter().map(|s| s.trim().parse()).collect::<Result<_>>()?;
    let alphabet = gs.alphabet(&letters)?;
    let s = analysis::synthesize_word(&target_gate(args.target, &gs), &alphabet, args.max_len, args.eps)?;
    let js = s.to_json();
    let t = Table {
        header: vec!["found", "word", "length", "k_count", "distance", "eps"],
        rows: vec![vec![
            js.found.to_string(),
            js.text.clone().unwrap_or_default(),
            js.length.map(|x| x.to_string()).unwrap_or_default(),
            js.k_count.map(|x| x.to_string()).unwrap_or_default(),
            js.distance.map(|x| x.to_string()).unwrap_or_default(),
            js.eps.to_string(),
        ]],
    };
    let mut out = Output::ok(json!({ "target": format!("{:?}", args.target), "result": js }), t)?;
    out.exit = if s.word.is_some() { 0 } else { 1 };
    Ok(out)
}
