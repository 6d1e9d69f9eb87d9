//! Command-line front end. [`run`] is the whole program; `main` only wires
//! it to the process.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

mod commands;
mod output;

pub use output::SCHEMA_VERSION;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: malformed JSON at line {line}, column {column}: {message}")]
    Json {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid MTC_TOLERANCE {0:?}: expected a positive number")]
    Tolerance(String),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] mtc_orbifold::Error),
}

impl CliError {
    /// 1 when the input was understood but fails verification, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        use mtc_orbifold::Error as E;
        match self {
            CliError::Core(
                E::NotModularData(_) | E::NotACocycle(..) | E::BadCharacterTable(_) | E::SimpleCurrent { .. },
            ) => 1,
            _ => 2,
        }
    }

    fn kind(&self) -> &'static str {
        if self.exit_code() == 1 {
            "verification"
        } else {
            "input"
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Transform,
    Raw,
}

#[derive(Debug, Parser)]
#[command(
    name = "mtc-orbifold",
    version,
    about = "Modular data and orbifold verification toolkit"
)]
pub struct Cli {
    #[arg(long, value_enum, default_value = "table", global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate modular data (symmetry, unitarity, S^2, vacuum row).
    Check { md: PathBuf },
    /// Fusion rules from the Verlinde formula.
    Fusion {
        md: PathBuf,
        /// Only products with this label on the left.
        #[arg(long)]
        of: Option<String>,
    },
    /// Quantum dimensions and the global dimension.
    Qdim { md: PathBuf },
    /// Global dimension.
    Glob { md: PathBuf },
    /// Derive the orbifold irreducibles and run every identity.
    Orbifold { md: PathBuf, descriptor: PathBuf },
    /// Drinfeld double of an abelian group such as Z3 or Z2xZ2.
    Double {
        #[arg(long)]
        group: String,
    },
    /// Evaluate or dump a character such as lattice(2,1) or heisenberg_twisted(1).
    Char {
        #[arg(long)]
        model: String,
        /// Evaluate at tau = i*Y.
        #[arg(long)]
        eval: Option<f64>,
        /// Truncation order: q-exponents up to N are kept.
        #[arg(long, default_value_t = 100)]
        terms: i64,
        /// Print the truncated series as exponent/coefficient lines.
        #[arg(long)]
        dump: bool,
    },
    /// Quantum dimension as a character limit, for a bundled model
    /// (lattice_k2, heisenberg_d1, ...) or an explicit pair "NUM/DEN".
    QdimLimit {
        #[arg(long)]
        model_pair: String,
        #[arg(long, value_enum, default_value = "transform")]
        strategy: StrategyArg,
    },
    /// Solve the sector-mass system for Z_T.
    SectorMass {
        #[arg(long = "T", value_name = "T")]
        t: usize,
    },
    /// Bundled models.
    Model {
        #[command(subcommand)]
        action: ModelAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum ModelAction {
    /// Write the modular data, descriptor and characters of a bundled model.
    Export {
        name: String,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Check { .. } => "check",
            Command::Fusion { .. } => "fusion",
            Command::Qdim { .. } => "qdim",
            Command::Glob { .. } => "glob",
            Command::Orbifold { .. } => "orbifold",
            Command::Double { .. } => "double",
            Command::Char { .. } => "char",
            Command::QdimLimit { .. } => "qdim-limit",
            Command::SectorMass { .. } => "sector-mass",
            Command::Model { .. } => "model export",
        }
    }
}

/// Runs with the tolerance override taken from `MTC_TOLERANCE`.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let tol = std::env::var("MTC_TOLERANCE").ok();
    run_with_tolerance(argv, tol.as_deref(), out, err)
}

pub fn run_with_tolerance<I, T>(argv: I, tolerance: Option<&str>, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                2
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    let name = cli.command.name();
    let result = parse_tolerance(tolerance).and_then(|tol| commands::execute(&cli.command, tol));
    match result {
        Ok(report) => {
            let written = match cli.format {
                Format::Json => writeln!(out, "{}", pretty(&report.envelope())),
                Format::Table => writeln!(out, "{}status: {}", report.table, output::flag(report.pass)),
            };
            if written.is_err() {
                return 2;
            }
            if report.pass {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let code = e.exit_code();
            let _ = writeln!(err, "error: {e}");
            if cli.format == Format::Json {
                let _ = writeln!(
                    out,
                    "{}",
                    pretty(&output::error_envelope(name, e.kind(), &e.to_string()))
                );
            }
            code
        }
    }
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values serialize")
}

fn parse_tolerance(raw: Option<&str>) -> Result<Option<f64>, CliError> {
    match raw.map(str::trim) {
        None | Some("") => Ok(None),
        Some(s) => match s.parse::<f64>() {
            Ok(t) if t > 0.0 && t.is_finite() => Ok(Some(t)),
            _ => Err(CliError::Tolerance(s.to_string())),
        },
    }
}
