//! `kinetic-levy`: command-line driver for the spectral tables, tail and
//! exponent computations, limit-equation studies and Monte-Carlo checks.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::Overrides;
use output::{now_unix, out_dir, RunManifest, Writer};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
    Model(kinetic_levy::Error),
}

impl From<kinetic_levy::Error> for CliError {
    fn from(e: kinetic_levy::Error) -> Self {
        CliError::Model(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Model(e) => write!(f, "{e}"),
        }
    }
}

pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_TOLERANCE: u8 = 3;
pub const EXIT_BUDGET: u8 = 4;

/// 2: bad input, 3: numerical failure, 4: simulation budget exhausted.
fn exit_code(e: &CliError) -> u8 {
    use kinetic_levy::Error as E;
    match e {
        CliError::Config(_) | CliError::Io(_) => EXIT_CONFIG,
        CliError::Model(E::InvalidParameter(_) | E::Degenerate(_) | E::Singularity(_) | E::GridMismatch(_)) => EXIT_CONFIG,
        CliError::Model(E::Budget(_) | E::InsufficientTrajectory(_)) => EXIT_BUDGET,
        CliError::Model(E::Quadrature(_) | E::NonConvergence(_) | E::Bracketing(_)) => EXIT_TOLERANCE,
    }
}

#[derive(Debug, Parser)]
#[command(name = "kinetic-levy", version, about)]
struct Cli {
    /// Master seed for Monte-Carlo subcommands (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory (default: $KINETIC_LEVY_OUT or ./kinetic_levy_out).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// ω, θ², v, λ, Ψ and π density on a k grid.
    SpectralTable(Overrides),
    /// Scaled flight tails N^α π(Ψ > N r) against their limits.
    Tails(Overrides),
    /// Lévy exponent Φ_δ on a θ grid.
    LevyExponent(Overrides),
    /// Critical-scaling evolution against the B → 0 / B → ∞ limits.
    PdeLimit(Overrides),
    /// Characteristic functions of the rescaled flight process.
    McCharfn(Overrides),
    /// Law of large numbers for the rescaled clock.
    McClock(Overrides),
    /// Hydrodynamic limit of the kinetic solution.
    McHydro(Overrides),
    /// Runs the acceptance criteria.
    VerifyAll {
        /// Subset of criteria, comma separated (default: all).
        #[arg(long, value_delimiter = ',')]
        criteria: Vec<u8>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::SpectralTable(_) => "spectral-table",
            Command::Tails(_) => "tails",
            Command::LevyExponent(_) => "levy-exponent",
            Command::PdeLimit(_) => "pde-limit",
            Command::McCharfn(_) => "mc-charfn",
            Command::McClock(_) => "mc-clock",
            Command::McHydro(_) => "mc-hydro",
            Command::VerifyAll { .. } => "verify-all",
        }
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("--threads: {e}")))?;
    }
    let started = now_unix();
    let mut w = Writer::new(out_dir(cli.out))?;
    let seed = cli.seed;
    let outcome = match &cli.command {
        Command::SpectralTable(ov) => commands::spectral_table(ov, &mut w),
        Command::Tails(ov) => commands::tails(ov, &mut w),
        Command::LevyExponent(ov) => commands::exponent(ov, &mut w),
        Command::PdeLimit(ov) => commands::pde_limit(ov, &mut w),
        Command::McCharfn(ov) => commands::mc_charfn(ov, seed, &mut w),
        Command::McClock(ov) => commands::mc_clock(ov, seed, &mut w),
        Command::McHydro(ov) => commands::mc_hydro(ov, seed, &mut w),
        Command::VerifyAll { criteria } => commands::verify_all(criteria, seed.unwrap_or(42), &mut w),
    }?;
    let code = if outcome.passed { 0 } else { EXIT_TOLERANCE };
    let manifest = RunManifest {
        subcommand: cli.command.name().into(),
        config_digest: outcome.digest,
        seed: outcome.seed,
        version: env!("CARGO_PKG_VERSION").into(),
        started_unix: started,
        finished_unix: now_unix(),
        outputs: w.written.clone(),
        exit_code: code.into(),
    };
    let path = w.manifest(&manifest)?;
    eprintln!("wrote {} (exit {code})", path.display());
    if !outcome.passed {
        eprintln!("{}: at least one tolerance check failed", manifest.subcommand);
    }
    Ok(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
