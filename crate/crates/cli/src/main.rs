//! `evpos`: spectral analysis and eventual-positivity certificates from the command line.

mod commands;
mod output;
mod reproduce;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Invalid arguments, unreadable input or an unknown id.
pub const EXIT_USAGE: u8 = 64;
/// A numerical kernel failed.
pub const EXIT_SOFTWARE: u8 = 70;

#[derive(Parser, Debug)]
#[command(name = "evpos", version, about = "Certify eventual positivity of matrix semigroups e^{tA}")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Spectrum report and spectral projection at s(A).
    Analyze(AnalyzeArgs),
    /// Positivity certificate; the exit code encodes the verdict.
    Certify(CertifyArgs),
    /// Deterministic report bundle for one gallery model.
    Reproduce(ReproduceArgs),
    /// Sweep the Dirichlet-to-Neumann model over λ.
    SweepDtn(SweepArgs),
    /// Plot-ready traces.
    Trace(TraceArgs),
}

#[derive(Args, Debug, Clone)]
pub struct InputArgs {
    /// Gallery model id.
    #[arg(long, conflicts_with = "matrix", required_unless_present = "matrix")]
    pub model: Option<String>,
    /// Matrix file (.json or .csv).
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub modes: Option<usize>,
    #[arg(long)]
    pub m_grid: Option<usize>,
    #[arg(long)]
    pub beta: Option<f64>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Output options for table-shaped commands, which default to CSV.
#[derive(Args, Debug, Clone)]
pub struct TableOutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct MarginArgs {
    #[arg(long)]
    pub zero_tol: Option<f64>,
    #[arg(long)]
    pub strict_margin: Option<f64>,
    /// Use the margins as absolute thresholds instead of fractions of the largest entry.
    #[arg(long)]
    pub absolute_margins: bool,
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Target {
    /// Success for Positive or EventuallyStronglyPositive.
    Strong,
    /// Also accept EventuallyPositive.
    Eventual,
}

#[derive(Args, Debug)]
pub struct CertifyArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub margins: MarginArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// End of the base time grid.
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Comma-separated offsets λ − s(A), strictly decreasing, for the resolvent test.
    #[arg(long)]
    pub lambda_schedule: Option<String>,
    #[arg(long, value_enum, default_value_t = Target::Strong)]
    pub target: Target,
}

#[derive(Args, Debug)]
pub struct ReproduceArgs {
    /// Model id.
    pub id: String,
    /// Write `<id>.json` and the CSV traces here; otherwise print the JSON bundle.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(long)]
    pub lambda_min: Option<f64>,
    #[arg(long)]
    pub lambda_max: Option<f64>,
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
    #[arg(long, default_value_t = 16)]
    pub modes: usize,
    #[arg(long, default_value_t = 512)]
    pub m_grid: usize,
    #[arg(long)]
    pub zero_tol: Option<f64>,
    #[command(flatten)]
    pub output: TableOutputArgs,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum TraceKind {
    /// Extreme entries and norms of e^{tA} on a log grid.
    Semigroup,
    /// ‖[λ′R(λ, A)]^n − P‖ for n = 1..steps.
    PowerProjection,
    /// Distance of (λ − s)R(λ, A)f to the cone as λ ↓ s(A).
    Asymptotic,
}

#[derive(Args, Debug)]
pub struct TraceArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum)]
    pub kind: TraceKind,
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long, default_value_t = 200)]
    pub points: usize,
    /// Resolvent parameter for the power-projection trace; defaults to s(A) + 1.
    #[arg(long)]
    pub at: Option<f64>,
    #[arg(long, default_value_t = 40)]
    pub steps: usize,
    /// Comma-separated offsets λ − s(A) for the asymptotic trace.
    #[arg(long)]
    pub lambda_schedule: Option<String>,
    /// Basis vector e_j used as f in the asymptotic trace; defaults to the all-ones vector.
    #[arg(long)]
    pub vector_index: Option<usize>,
    #[command(flatten)]
    pub output: TableOutputArgs,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Analyze(a) => commands::analyze(&a),
        Command::Certify(a) => commands::certify(&a),
        Command::Reproduce(a) => reproduce::run(&a),
        Command::SweepDtn(a) => commands::sweep_dtn(&a),
        Command::Trace(a) => commands::trace(&a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("evpos: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
