//! `halfspace-ns` command-line driver.
//!
//! Exit status: 0 when every gate passes, 1 for usage errors, 2 for bad
//! data (config, field files, grids), 3 when a numeric gate fails. Errors
//! go to stderr as one line: `halfspace-ns: error[<kind>]: <message>`.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use halfspace_ns::{Error, ReportFormat};

#[derive(Debug, Parser)]
#[command(name = "halfspace-ns", version, about = "Stationary Navier-Stokes on the half space: solver and diagnostics")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Run configuration (`key=value` lines)
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory (overrides `out`)
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// RNG seed (overrides `seed`)
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,

    /// Report format (overrides `format`)
    #[arg(long, global = true, value_name = "FORMAT", value_parser = ["csv", "json-lines"])]
    format: Option<String>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// Picard solve of the nonlinear problem
    Solve,
    /// Linear Stokes solve with residuals
    Linear,
    /// Besov norms of the configured boundary and force
    Besov,
    /// Inverse Fourier identities and trace identities
    KernelsCheck,
    /// Distance-to-profile ladder (n = 4)
    Asymptotics,
    /// Invariant battery with a pass/fail summary
    Verify,
}

/// Failure classes mapped onto exit codes.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Data(String, String),
    Gate(String, String),
}

impl Failure {
    pub fn gate(name: &str, message: impl Into<String>) -> Self {
        Failure::Gate(name.into(), message.into())
    }

    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Data(..) => 2,
            Failure::Gate(..) => 3,
        }
    }

    fn line(&self) -> String {
        let (kind, msg) = match self {
            Failure::Usage(m) => ("usage".to_string(), m.clone()),
            Failure::Data(k, m) => (k.clone(), m.clone()),
            Failure::Gate(g, m) => (format!("gate:{g}"), m.clone()),
        };
        let msg: String = msg.split_whitespace().collect::<Vec<_>>().join(" ");
        format!("halfspace-ns: error[{kind}]: {msg}")
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::Config { .. } => Failure::Data("config".into(), msg),
            Error::Format { .. } => Failure::Data("field-file".into(), msg),
            Error::Io(_) => Failure::Data("io".into(), msg),
            Error::InvalidGrid(_) | Error::GridMismatch(_) | Error::ComponentMismatch { .. } => Failure::Data("grid".into(), msg),
            Error::InvalidArgument(_) | Error::Inadmissible(_) => Failure::Data("argument".into(), msg),
            Error::Smallness { gate, .. } => Failure::gate(gate, msg),
            Error::NotConverged { .. } => Failure::gate("convergence", msg),
            Error::InfiniteNorm(_) => Failure::gate("finite-norm", msg),
            Error::Overflow(_) | Error::NonFiniteSymbol { .. } => Failure::gate("finite", msg),
            Error::QuadratureDivergence { .. } => Failure::gate("quadrature", msg),
        }
    }
}

fn init_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("HALFSPACE_NS_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| Failure::Usage(format!("HALFSPACE_NS_THREADS=`{raw}` is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Usage(format!("thread pool: {e}")))
}

fn run() -> Result<(), Failure> {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // --help / --version
            print!("{e}");
            return Ok(());
        }
        Err(e) => return Err(Failure::Usage(e.kind().to_string() + ": " + e.to_string().lines().next().unwrap_or(""))),
    };
    init_threads()?;
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::Data("io".into(), format!("{}: {e}", path.display())))?;
            halfspace_ns::RunConfig::parse(&text)?
        }
        None => halfspace_ns::RunConfig::default(),
    };
    if let Some(out) = cli.out {
        cfg.out = out;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(f) = cli.format {
        cfg.format = f.parse::<ReportFormat>().map_err(Failure::Usage)?;
    }
    std::fs::create_dir_all(&cfg.out).map_err(|e| Failure::Data("io".into(), format!("{}: {e}", cfg.out.display())))?;
    commands::dispatch(cli.command, &cfg)
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.line());
            ExitCode::from(f.code())
        }
    }
}
