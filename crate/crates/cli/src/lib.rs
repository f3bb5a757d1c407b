//! `setpack` command line: solve, analyze, generate, sweep, verify, and the
//! approximation-factor table.
//!
//! Exit codes: 0 success, 1 usage, 2 parse or data error, 3 a verification
//! that should hold failed.

mod commands;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use setpack_core::analysis::BoundMode;
use setpack_core::ratio::Preset;
use setpack_core::solver::EnumerationMode;
use thiserror::Error;

pub use report::RunReport;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Verification(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) | CliError::Io(_) => 2,
            CliError::Verification(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "setpack", version, about = "Squared-weight local search for k-set packing and claw-free MWIS")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run greedy plus local search on an instance
    Solve(SolveArgs),
    /// Slack table, exchange graph and lemma checks for a pair (A, R)
    Analyze(AnalyzeArgs),
    /// Optimal epsilon and approximation factor per k
    RatioTable(RatioTableArgs),
    /// Write a generated instance
    Generate(GenerateArgs),
    /// Seeded generate/solve/exact runs with an aggregate ratio check
    Sweep(SweepArgs),
    /// Check claw-freeness, and optionally a solution's independence and
    /// local optimality
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Full,
    Connected,
}

impl From<ModeArg> for EnumerationMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Full => EnumerationMode::Full,
            ModeArg::Connected => EnumerationMode::Connected,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PresetArg {
    Small,
    Large,
}

impl From<PresetArg> for Preset {
    fn from(p: PresetArg) -> Self {
        match p {
            PresetArg::Small => Preset::Small,
            PresetArg::Large => Preset::Large,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundsArg {
    /// isolated vertices (s >= 1)
    One,
    /// isolated vertices and isolated edges (s >= 2)
    Two,
    /// plus stars (s >= k(k-1)+1)
    Small,
    /// plus isolated edges and larger trees (s >= 2k(k-1)+1)
    Large,
}

impl From<BoundsArg> for BoundMode {
    fn from(b: BoundsArg) -> Self {
        match b {
            BoundsArg::One => BoundMode::OneExchange,
            BoundsArg::Two => BoundMode::TwoExchange,
            BoundsArg::Small => BoundMode::Small,
            BoundsArg::Large => BoundMode::Large,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Fig2,
    Chain,
    Random,
    Kdm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepFamily {
    Random,
    Kdm,
}

#[derive(Debug, Args)]
pub struct InstanceArgs {
    /// Instance file (set-packing or graph format)
    pub input: PathBuf,
    /// Override k (graph files otherwise use the maximum degree)
    #[arg(long)]
    pub k: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    /// Exchange size parameter
    #[arg(long, conflicts_with = "preset")]
    pub s: Option<usize>,
    #[arg(long, value_enum)]
    pub preset: Option<PresetArg>,
    /// Weight exponent guiding the search
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..=2))]
    pub exponent: u32,
    /// Scale weights to integers with this epsilon before searching
    #[arg(long)]
    pub scale_eps: Option<f64>,
    /// Run the partial-enumeration wrapper
    #[arg(long)]
    pub partial_enum: bool,
    /// Target factor for partial enumeration (default: small-preset factor for k)
    #[arg(long, requires = "partial_enum")]
    pub alpha: Option<f64>,
    /// Also solve exactly and report w(O)/w(A)
    #[arg(long)]
    pub exact: bool,
    /// Node budget for the exact solver
    #[arg(long, requires = "exact")]
    pub exact_budget: Option<u64>,
    #[arg(long, value_enum, default_value_t = ModeArg::Connected)]
    pub mode: ModeArg,
    #[arg(long)]
    pub max_improvements: Option<u64>,
    /// Echoed only; the pipeline has no randomness
    #[arg(long)]
    pub seed: Option<u64>,
    /// Print the improvement trace
    #[arg(long)]
    pub trace: bool,
    /// Write the solution's vertex ids here
    #[arg(long)]
    pub emit_solution: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    /// Solution file for A
    #[arg(long = "a")]
    pub a: PathBuf,
    /// Solution file for the reference R
    #[arg(long = "r", required_unless_present = "exact_r", conflicts_with = "exact_r")]
    pub r: Option<PathBuf>,
    /// Use the exact optimum as R
    #[arg(long)]
    pub exact_r: bool,
    #[arg(long)]
    pub epsilon: f64,
    /// `auto` for 1 - sqrt(1 - epsilon), or a number
    #[arg(long, default_value = "auto")]
    pub delta: String,
    /// Which family of lower bounds to check
    #[arg(long, value_enum, default_value_t = BoundsArg::One)]
    pub bounds: BoundsArg,
    /// Exchange size at which A is re-checked (default: what the bounds need)
    #[arg(long)]
    pub s: Option<usize>,
    #[arg(long, value_enum, default_value_t = ModeArg::Connected)]
    pub mode: ModeArg,
}

#[derive(Debug, Args)]
pub struct RatioTableArgs {
    #[arg(long, default_value_t = 3)]
    pub k_min: usize,
    #[arg(long, default_value_t = 10)]
    pub k_max: usize,
}

#[derive(Debug, Args)]
pub struct RandomParams {
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    #[arg(long, default_value_t = 9)]
    pub universe: usize,
    #[arg(long, default_value_t = 12)]
    pub sets: usize,
    #[arg(long, default_value_t = 1.0)]
    pub weight_lo: f64,
    #[arg(long, default_value_t = 2.0)]
    pub weight_hi: f64,
    /// Part size for k-dimensional matching instances
    #[arg(long, default_value_t = 3)]
    pub part_size: usize,
    /// Set count for k-dimensional matching instances
    #[arg(long, default_value_t = 9)]
    pub edges: u64,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    /// Chain parameter epsilon
    #[arg(long, default_value_t = 0.3918)]
    pub epsilon: f64,
    /// Chain arm length
    #[arg(long, default_value_t = 30)]
    pub ell: usize,
    #[command(flatten)]
    pub params: RandomParams,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(short = 'o', long)]
    pub output: Option<PathBuf>,
    /// Chain only: write the designated current solution here
    #[arg(long)]
    pub emit_a: Option<PathBuf>,
    /// Chain only: write the designated reference solution here
    #[arg(long)]
    pub emit_r: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum, default_value_t = SweepFamily::Random)]
    pub family: SweepFamily,
    #[arg(long)]
    pub runs: usize,
    #[arg(long, value_enum, conflicts_with = "s")]
    pub preset: Option<PresetArg>,
    #[arg(long)]
    pub s: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed0: u64,
    /// Epsilon for the preset's bound (default: the optimal one)
    #[arg(long, requires = "preset")]
    pub epsilon: Option<f64>,
    #[command(flatten)]
    pub params: RandomParams,
    #[arg(long, value_enum, default_value_t = ModeArg::Connected)]
    pub mode: ModeArg,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[arg(long)]
    pub solution: Option<PathBuf>,
    /// Also require local optimality under s-exchanges
    #[arg(long, requires = "solution")]
    pub s: Option<usize>,
    #[arg(long, value_enum, default_value_t = ModeArg::Connected)]
    pub mode: ModeArg,
}

/// Parses `args` (program name first), runs the command, and returns the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    0
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    1
                }
            };
        }
    };
    match commands::dispatch(cli.command, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
