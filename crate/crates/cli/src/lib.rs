//! `hgamma` command-line front end. [`run`] is the whole program minus process
//! exit, so tests can drive it in-process.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use thiserror::Error;

pub mod commands;
pub mod literal;
pub mod render;
pub mod verify;

pub use literal::{format_complex, parse_complex, parse_gamma, parse_index, parse_point, ParseError};
pub use render::{render_lattice_ascii, render_lattice_svg};

/// Thread-count override for every parallel stage.
pub const THREADS_ENV: &str = "HGAMMA_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;
pub const EXIT_NOT_CONVERGED: i32 = 4;
pub const EXIT_VERIFY: i32 = 5;

#[derive(Debug, Parser)]
#[command(name = "hgamma", version, about = "Bergman kernels and L^p projection data on power-generalized Hartogs triangles")]
pub struct Cli {
    /// Write the artifact (JSON, SVG, ASCII or CSV) to this file instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Decimal digits trusted in a decimal `--gamma` literal.
    #[arg(long, global = true, value_name = "DIGITS")]
    pub precision: Option<u32>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Open interval of p on which the Bergman projection (or one sub-projection) is L^p bounded.
    LpRange(LpRangeArgs),
    /// Evaluate the Bergman kernel at a pair of points.
    Kernel(KernelArgs),
    /// Draw the allowable multi-indices in a window.
    Lattice(LatticeArgs),
    /// Monomial witnessing unboundedness at the endpoint of a sub-projection interval.
    Witness(WitnessArgs),
    /// For irrational gamma, a convergent whose monomial leaves L^p.
    Degenerate(DegenerateArgs),
    /// Certified kernel zero, or a modulus scan along a slice.
    Zeros(ZerosArgs),
    /// Squared L^2 norm of a monomial, optionally against an independent oracle.
    Norms(NormsArgs),
    /// Run a self-check suite; exits 5 on any failed check.
    Verify(VerifyArgs),
}

/// Either a rational `--m/--n` pair or a `--gamma` literal.
#[derive(Debug, Clone, Args)]
pub struct GammaArgs {
    #[arg(long, requires = "n", conflicts_with = "gamma")]
    pub m: Option<i64>,
    #[arg(long, requires = "m", conflicts_with = "gamma")]
    pub n: Option<i64>,
    /// `sqrt(K)`, `phi`, an integer, `p/q`, or a decimal (treated as irrational).
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct RationalArgs {
    #[arg(long)]
    pub m: i64,
    #[arg(long)]
    pub n: i64,
}

#[derive(Debug, Args)]
pub struct LpRangeArgs {
    #[command(flatten)]
    pub gamma: RationalArgs,
    /// Residue class of the sub-projection; the full projection when absent.
    #[arg(long)]
    pub j: Option<i64>,
}

#[derive(Debug, Args)]
pub struct KernelArgs {
    #[command(flatten)]
    pub gamma: GammaArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub z: String,
    #[arg(long, allow_hyphen_values = true)]
    pub w: String,
    /// Sum the monomial series instead of the closed form.
    #[arg(long)]
    pub series: bool,
    /// Absolute tolerance of the series.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LatticeFormat {
    Svg,
    Ascii,
    Json,
}

#[derive(Debug, Args)]
pub struct LatticeArgs {
    #[command(flatten)]
    pub gamma: RationalArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub a1_max: i64,
    #[arg(long, allow_hyphen_values = true)]
    pub a2_min: i64,
    #[arg(long, value_enum, default_value_t = LatticeFormat::Svg)]
    pub format: LatticeFormat,
}

#[derive(Debug, Args)]
pub struct WitnessArgs {
    #[command(flatten)]
    pub gamma: RationalArgs,
    /// Residue class; defaults to the critical class.
    #[arg(long)]
    pub j: Option<i64>,
    #[arg(long, default_value_t = 0)]
    pub k: u64,
}

#[derive(Debug, Args)]
pub struct DegenerateArgs {
    #[arg(long)]
    pub gamma: String,
    /// Exponent above the critical value, as an integer, `p/q` or decimal.
    #[arg(long)]
    pub p: String,
    #[arg(long, default_value_t = 25)]
    pub max_convergents: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SliceKind {
    /// `s = 0`.
    S0,
    /// Fixed `s` given by `--s`.
    FixedS,
}

#[derive(Debug, Args)]
pub struct ZerosArgs {
    #[arg(long)]
    pub gamma: String,
    /// Scan |B| over a polar grid instead of certifying the explicit zero.
    #[arg(long)]
    pub scan: bool,
    #[arg(long, value_enum, default_value_t = SliceKind::S0)]
    pub slice: SliceKind,
    /// Value of `s` on a fixed-s slice.
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<String>,
    #[arg(long, default_value_t = 400)]
    pub grid: usize,
    #[arg(long, default_value_t = 0.99)]
    pub t_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleKind {
    Mc,
    Radial,
}

#[derive(Debug, Args)]
pub struct NormsArgs {
    #[command(flatten)]
    pub gamma: GammaArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: String,
    #[arg(long, value_enum)]
    pub oracle: Option<OracleKind>,
    #[arg(long, default_value_t = 200_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Norms,
    Series,
    Reproducing,
    Schur,
    Biholo,
    Intervals,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Failure of a subcommand, mapped onto an exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Core(#[from] hgamma::Error),
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{failed} of {total} checks failed in suite {suite}")]
    VerifyFailed { suite: String, failed: usize, total: usize },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use hgamma::Error as E;
        match self {
            CliError::Usage(_) | CliError::Parse(_) => EXIT_USAGE,
            CliError::Core(E::NotConverged { .. } | E::QuadratureError { .. } | E::NotFound(_))
            | CliError::Core(E::PrecisionExhausted(_) | E::UnreliableEstimate(_)) => EXIT_NOT_CONVERGED,
            CliError::Core(_) | CliError::Io { .. } => EXIT_DOMAIN,
            CliError::VerifyFailed { .. } => EXIT_VERIFY,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "Usage",
            CliError::Parse(_) => "ParseError",
            CliError::Core(e) => e.kind(),
            CliError::Io { .. } => "Io",
            CliError::VerifyFailed { .. } => "VerifyFailed",
        }
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({ "error": self.kind(), "message": self.to_string() });
        if let CliError::Parse(p) = self {
            v["position"] = json!(p.position);
        }
        v
    }
}

/// What a subcommand produced. JSON goes to stdout; a text artifact goes to
/// `--out` when given and to stdout otherwise.
#[derive(Debug, Default)]
pub struct Output {
    pub json: Option<Value>,
    pub artifact: Option<String>,
    /// Set by `verify` when a check failed; the report is still printed.
    pub failure: Option<CliError>,
}

impl Output {
    pub fn json(v: Value) -> Self {
        Self { json: Some(v), ..Self::default() }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_ENV}={raw:?} is not a positive integer")))?;
    // A second call in the same process (tests) finds the pool already built.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}

fn write_file(path: &PathBuf, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn emit(cli_out: Option<&PathBuf>, output: &Output, stdout: &mut dyn Write) -> Result<(), CliError> {
    let io = |source| CliError::Io { path: "<stdout>".into(), source };
    match (&output.artifact, cli_out) {
        (Some(text), Some(path)) => write_file(path, text)?,
        (Some(text), None) => stdout.write_all(text.as_bytes()).map_err(io)?,
        (None, Some(path)) => {
            if let Some(v) = &output.json {
                write_file(path, &format!("{v}\n"))?;
            }
            return Ok(());
        }
        (None, None) => {}
    }
    if let Some(v) = &output.json {
        if output.artifact.is_none() || cli_out.is_some() {
            writeln!(stdout, "{v}").map_err(io)?;
        }
    }
    Ok(())
}

/// Parses `args` (including the program name), runs the subcommand and
/// returns the exit code. Errors are written to `stderr` as one JSON line.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return EXIT_OK;
            }
            let err = CliError::Usage(e.to_string().trim().to_string());
            let _ = writeln!(stderr, "{}", err.to_json());
            return EXIT_USAGE;
        }
    };
    let result = configure_threads().and_then(|_| commands::dispatch(&cli)).and_then(|output| {
        emit(cli.out.as_ref(), &output, stdout)?;
        output.failure.map_or(Ok(()), Err)
    });
    match result {
        Ok(()) => EXIT_OK,
        Err(err) => {
            let _ = writeln!(stderr, "{}", err.to_json());
            err.exit_code()
        }
    }
}
