use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Translation-finite sets, density witnesses and derivation diagnostics.
#[derive(Debug, Parser)]
#[command(name = "tfsets", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Seed for randomized searches; recorded in every report.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Also write the report into this directory.
    #[arg(long, global = true, env = "TFSETS_OUT_DIR")]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Text => "txt",
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Inspect and enumerate set descriptors.
    #[command(subcommand)]
    Set(SetCommand),
    /// Witness search, verification and T-set profiles.
    #[command(subcommand)]
    Tf(TfCommand),
    /// Banach density estimates and density witnesses.
    #[command(subcommand)]
    Density(DensityCommand),
    /// Explicit set constructions.
    #[command(subcommand)]
    Build(BuildCommand),
    /// Derivation operators on l1(Z+).
    #[command(subcommand)]
    Op(OpCommand),
}

impl Command {
    /// `"group action"`, as recorded in reports.
    pub fn name(&self) -> String {
        let (group, action) = match self {
            Command::Set(c) => ("set", c.name()),
            Command::Tf(c) => ("tf", c.name()),
            Command::Density(c) => ("density", c.name()),
            Command::Build(c) => ("build", c.name()),
            Command::Op(c) => ("op", c.name()),
        };
        format!("{group} {action}")
    }
}

/// A set: catalog shorthand (`evens`, `powers2`, `ap:1:2`, ...), inline JSON
/// or a path to a JSON descriptor.
#[derive(Debug, Clone, Args, Serialize)]
pub struct SetArg {
    #[arg(long = "set")]
    pub set: String,
}

#[derive(Debug, Subcommand)]
pub enum SetCommand {
    /// Descriptor summary and the first elements.
    Info(SetInfo),
    /// `S ∩ [0, W)`.
    Materialize(SetMaterialize),
}

impl SetCommand {
    fn name(&self) -> &'static str {
        match self {
            SetCommand::Info(_) => "info",
            SetCommand::Materialize(_) => "materialize",
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct SetInfo {
    #[command(flatten)]
    pub set: SetArg,
    /// Number of leading elements to list.
    #[arg(long, default_value_t = 20)]
    pub count: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct SetMaterialize {
    #[command(flatten)]
    pub set: SetArg,
    #[arg(long)]
    pub window: u64,
}

#[derive(Debug, Subcommand)]
pub enum TfCommand {
    /// Search for a witness `a_i + b_n ∈ S` (i <= n) inside a window.
    Witness(TfWitness),
    /// Recheck a witness against a set.
    Verify(TfVerify),
    /// Counts of `t` with `t, t + n ∈ S` for `n <= nmax`.
    Profile(TfProfile),
    /// Exact TF verdict for eventually periodic sets.
    Exact(TfExact),
    /// Extract a monochromatic witness from a witness for `A ∪ B`.
    RamseySplit(TfRamseySplit),
}

impl TfCommand {
    fn name(&self) -> &'static str {
        match self {
            TfCommand::Witness(_) => "witness",
            TfCommand::Verify(_) => "verify",
            TfCommand::Profile(_) => "profile",
            TfCommand::Exact(_) => "exact",
            TfCommand::RamseySplit(_) => "ramsey-split",
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct TfWitness {
    #[command(flatten)]
    pub set: SetArg,
    #[arg(long, default_value_t = 3)]
    pub depth: usize,
    /// All sums stay below this bound.
    #[arg(long, default_value_t = 1 << 16)]
    pub window: u64,
    /// Membership steps before giving up.
    #[arg(long, default_value_t = 1 << 26)]
    pub budget: u64,
}

/// A witness: JSON `{"a": [...], "b": [...]}`, a path to one, or the
/// `--a`/`--b` lists.
#[derive(Debug, Clone, Args, Serialize)]
pub struct WitnessArg {
    #[arg(long, conflicts_with_all = ["a", "b"])]
    pub witness: Option<String>,
    #[arg(long, value_delimiter = ',', requires = "b")]
    pub a: Vec<u64>,
    #[arg(long, value_delimiter = ',', requires = "a")]
    pub b: Vec<u64>,
}

#[derive(Debug, Args, Serialize)]
pub struct TfVerify {
    #[command(flatten)]
    pub set: SetArg,
    #[command(flatten)]
    pub witness: WitnessArg,
}

#[derive(Debug, Args, Serialize)]
pub struct TfProfile {
    #[command(flatten)]
    pub set: SetArg,
    #[arg(long, default_value_t = 16)]
    pub nmax: u64,
    #[arg(long, default_value_t = 1 << 12)]
    pub window: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct TfExact {
    #[command(flatten)]
    pub set: SetArg,
    /// Depth of the progression witness reported for non-TF sets.
    #[arg(long, default_value_t = 4)]
    pub depth: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct TfRamseySplit {
    #[arg(long = "set-a")]
    pub set_a: String,
    #[arg(long = "set-b")]
    pub set_b: String,
    #[command(flatten)]
    pub witness: WitnessArg,
    /// Depth of the extracted witness.
    #[arg(long, default_value_t = 3)]
    pub target: usize,
}

#[derive(Debug, Subcommand)]
pub enum DensityCommand {
    /// Windowed maxima of `|S ∩ (n, n + d]| / d`.
    Profile(DensityProfile),
    /// Witness built from positive density.
    Witness(DensityWitnessArgs),
    /// Block lengths `d_j`, thresholds `a_j` and multipliers `N_j` for `eps`.
    Schedule(DensitySchedule),
}

impl DensityCommand {
    fn name(&self) -> &'static str {
        match self {
            DensityCommand::Profile(_) => "profile",
            DensityCommand::Witness(_) => "witness",
            DensityCommand::Schedule(_) => "schedule",
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct DensityProfile {
    #[command(flatten)]
    pub set: SetArg,
    #[arg(long, default_value_t = 1 << 12)]
    pub window: u64,
    /// Block lengths.
    #[arg(long = "d", value_delimiter = ',', default_values_t = [1u64, 8, 64])]
    pub d: Vec<u64>,
}

#[derive(Debug, Args, Serialize)]
pub struct DensityWitnessArgs {
    #[command(flatten)]
    pub set: SetArg,
    /// Density threshold, as a fraction or decimal.
    #[arg(long)]
    pub eps: String,
    #[arg(long, default_value_t = 100_000)]
    pub window: u64,
    #[arg(long, default_value_t = 3)]
    pub depth: usize,
    /// Occurrences a pattern needs to count as recurrent.
    #[arg(long, default_value_t = 3)]
    pub r_min: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct DensitySchedule {
    #[arg(long)]
    pub eps: String,
    #[arg(long, default_value_t = 4)]
    pub levels: usize,
}

#[derive(Debug, Subcommand)]
pub enum BuildCommand {
    /// Clumpy set over a base set.
    Clumpy(BuildClumpy),
    /// Slowly growing T-set for a growth function.
    SlowTset(BuildSlowTset),
    /// Named sets.
    Catalog(BuildCatalog),
    /// Progression-block T-set with certified `pi_k` lower bounds.
    Appendix(BuildAppendix),
}

impl BuildCommand {
    fn name(&self) -> &'static str {
        match self {
            BuildCommand::Clumpy(_) => "clumpy",
            BuildCommand::SlowTset(_) => "slow-tset",
            BuildCommand::Catalog(_) => "catalog",
            BuildCommand::Appendix(_) => "appendix",
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct BuildClumpy {
    /// Base set, in any `--set` form.
    #[arg(long, default_value = "naturals")]
    pub base: String,
    #[arg(long, default_value_t = 20)]
    pub count: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct BuildSlowTset {
    /// `sqrt`, `log2`, `quadratic`, inline JSON or a path.
    #[arg(long, default_value = "sqrt")]
    pub growth: String,
    #[arg(long, default_value_t = 20)]
    pub count: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct BuildCatalog {
    #[arg(long)]
    pub name: String,
    #[arg(long, value_delimiter = ',')]
    pub params: Vec<u64>,
    /// Elements listed below this bound.
    #[arg(long, default_value_t = 64)]
    pub window: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct BuildAppendix {
    /// `linear` (tau_k = k), a constant, or a comma-separated list.
    #[arg(long, default_value = "linear")]
    pub tau: String,
    #[arg(long, default_value_t = 2)]
    pub rounds: u64,
    /// Certificate evaluations per round.
    #[arg(long, default_value_t = 2_000)]
    pub budget: u64,
    #[arg(long, default_value_t = 3)]
    pub min_block: u64,
}

#[derive(Debug, Subcommand)]
pub enum OpCommand {
    /// Column `k -> D_psi(delta_j)(delta_k)` for `k < W`.
    Column(OpColumn),
    /// Exact l1 norm of a column for an indicator coefficient field.
    Norm(OpNorm),
    /// Lower bound for `pi_p(D_psi)` from a family, or a seeded search.
    PiLower(OpPiLower),
    /// Level-set verdicts on weak compactness.
    WcDiagnostic(OpWcDiagnostic),
    /// Row decay and lower bound of a kernel.
    KernelCheck(OpKernelCheck),
}

impl OpCommand {
    fn name(&self) -> &'static str {
        match self {
            OpCommand::Column(_) => "column",
            OpCommand::Norm(_) => "norm",
            OpCommand::PiLower(_) => "pi-lower",
            OpCommand::WcDiagnostic(_) => "wc-diagnostic",
            OpCommand::KernelCheck(_) => "kernel-check",
        }
    }
}

/// A coefficient field: `indicator:<set>`, `constant:<q>`, `harmonic`,
/// `power:<scale>:<exponent>`, inline JSON or a path.
#[derive(Debug, Clone, Args, Serialize)]
pub struct PsiArg {
    #[arg(long)]
    pub psi: String,
}

#[derive(Debug, Args, Serialize)]
pub struct OpColumn {
    #[command(flatten)]
    pub psi: PsiArg,
    #[arg(long)]
    pub j: u64,
    #[arg(long, default_value_t = 32)]
    pub window: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct OpNorm {
    #[command(flatten)]
    pub set: SetArg,
    #[arg(long)]
    pub j: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct OpPiLower {
    #[command(flatten)]
    pub psi: PsiArg,
    /// Vectors separated by `;`, terms `index:coeff` separated by `,`;
    /// or JSON, or a path. Without a family a seeded search runs.
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long, default_value_t = 1.0)]
    pub p: f64,
    /// Search target ratio.
    #[arg(long, default_value_t = 1.0)]
    pub tau: f64,
    /// Search coordinates.
    #[arg(long, value_delimiter = ',', default_values_t = [1u64, 2, 3, 4, 5, 6, 7, 8])]
    pub pool: Vec<u64>,
    #[arg(long, default_value_t = 2_000)]
    pub budget: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct OpWcDiagnostic {
    #[command(flatten)]
    pub psi: PsiArg,
    /// Level thresholds.
    #[arg(long, value_delimiter = ',', required = true)]
    pub eps: Vec<String>,
    #[arg(long, default_value_t = 1 << 16)]
    pub window: u64,
    #[arg(long, default_value_t = 3)]
    pub depth: usize,
    #[arg(long, default_value_t = 1 << 26)]
    pub budget: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct OpKernelCheck {
    /// `default`, `zero`, `constant:<q>`, inline JSON or a path.
    #[arg(long, default_value = "default")]
    pub kernel: String,
    #[arg(long)]
    pub claimed_eta: Option<String>,
    #[arg(long, default_value_t = 64)]
    pub window: u64,
    /// Rows checked: `j <= rows`.
    #[arg(long, default_value_t = 32)]
    pub rows: u64,
}
