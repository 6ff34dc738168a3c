use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "anyonkit", version, about = "SU(2)_k and Jones-Kauffman anyon models, qubit encodings and gate protocols")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Write output to a file instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Numerical tolerance for checks.
    #[arg(long, env = "ANYONKIT_TOL", default_value_t = 1e-9, global = true)]
    pub tol: f64,
    /// Worker threads for shot-level and Monte Carlo parallelism (0 = all cores).
    #[arg(long, default_value_t = 0, global = true)]
    pub threads: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Algebraic data of an anyon model.
    #[command(subcommand)]
    Model(ModelCmd),
    /// Braid and fusion gates on the qubit encodings.
    #[command(subcommand)]
    Gates(GatesCmd),
    /// Measurement-based protocols.
    #[command(subcommand)]
    Protocol(ProtocolCmd),
    /// Group closures, random walks and BQP bounds.
    #[command(subcommand)]
    Analyze(AnalyzeCmd),
    /// Search for a gate word approximating a target.
    Synth(SynthArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyArg {
    Jk,
    Su2,
}

#[derive(Args, Debug, Clone)]
pub struct ModelArgs {
    #[arg(long, value_enum, default_value_t = FamilyArg::Jk)]
    pub family: FamilyArg,
    #[arg(long)]
    pub level: u32,
    /// Use the complex-conjugate theory.
    #[arg(long)]
    pub conjugate: bool,
}

#[derive(Subcommand, Debug)]
pub enum ModelCmd {
    /// F-symbols, R-symbols, dimensions, twists and S-matrix.
    Dump(ModelArgs),
    /// Pentagon, hexagon, unitarity and modularity residuals. Exits 1 if any exceeds --tol.
    Verify(ModelArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum EncodingArg {
    #[value(name = "1111")]
    E1111,
    #[value(name = "1221")]
    E1221,
}

#[derive(Subcommand, Debug)]
pub enum GatesCmd {
    /// Gates native to an encoding, in exact and phase-canonical form.
    Dump {
        #[arg(long, value_enum, default_value_t = EncodingArg::E1221)]
        encoding: EncodingArg,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProtocolName {
    SwitchEncoding,
    Merge,
    Split,
    Tqf,
    PhaseGate,
    PrepareState2,
    PreparePhi,
    PrepareK,
    PreparePlus,
    KWalk,
    Bell,
    PhiH,
    Cz,
}

#[derive(Args, Debug, Clone)]
pub struct ProtocolArgs {
    #[arg(long, value_enum)]
    pub name: ProtocolName,
    /// Logical basis input as a bitstring, qubit 0 first (default all zeros).
    #[arg(long)]
    pub input: Option<String>,
    /// Angle of the phase-gate ancilla.
    #[arg(long, default_value_t = 0.5)]
    pub phi: f64,
    /// Bound on every repeat-until-success loop.
    #[arg(long)]
    pub max_attempts: Option<u32>,
    /// Step budget of the K walk (odd).
    #[arg(long, default_value_t = 7)]
    pub cutoff: u32,
    /// Use the k^2 budget rule with this k instead of --cutoff.
    #[arg(long)]
    pub k: Option<u32>,
    /// Use the minus sign for prepare-phi.
    #[arg(long)]
    pub minus: bool,
}

#[derive(Subcommand, Debug)]
pub enum ProtocolCmd {
    /// Sample shots with a seeded driver.
    Run {
        #[command(flatten)]
        args: ProtocolArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        shots: u64,
    },
    /// Enumerate every branch with its exact probability.
    Branches {
        #[command(flatten)]
        args: ProtocolArgs,
        #[arg(long, default_value_t = anyonkit::protocol::DEFAULT_MAX_BRANCHES)]
        max_branches: usize,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum SetArg {
    Braid1111,
    Braid1221,
    Xzb,
    Zbk,
}

#[derive(Subcommand, Debug)]
pub enum AnalyzeCmd {
    /// Projective closure of a generator set.
    Closure {
        #[arg(long, value_enum)]
        set: SetArg,
        #[arg(long, default_value_t = anyonkit::analysis::CLOSURE_CAP)]
        cap: usize,
        /// Include the group elements in the output.
        #[arg(long)]
        elements: bool,
    },
    /// Nested commutator of B and K and irrationality evidence for K's phase.
    Density,
    /// Probability that a symmetric walk never goes positive within n steps.
    Walk {
        #[arg(long)]
        n: u64,
        /// Also run this many Monte Carlo trials.
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Success probability of k random-walk K gates under the k^2 cutoff.
    Bqp {
        #[arg(long, value_delimiter = ',', required = true)]
        k: Vec<u64>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum TargetArg {
    H,
    X,
    Z,
    S,
    T,
    B,
    I,
}

#[derive(Args, Debug, Clone)]
pub struct SynthArgs {
    #[arg(long, value_enum, ignore_case = true)]
    pub target: TargetArg,
    #[arg(long, default_value_t = 0.05)]
    pub eps: f64,
    #[arg(long, default_value_t = 16)]
    pub max_len: usize,
    /// Comma-separated letters from Z, B, B^-1, K, K^-1, X.
    #[arg(long, value_delimiter = ',', default_value = "Z,B,K,K^-1")]
    pub alphabet: Vec<String>,
}
