//! `toricomplex`: complexity invariants of invariant pairs on toric varieties.
//!
//! Exit codes: 0 success, 1 validation error, 2 a certified property failed
//! on the instance, 3 I/O or parse error.

mod commands;
mod input;
mod report;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::CheckKind;
use report::Format;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 1,
            CliError::Io(_) | CliError::Parse(_) => 3,
        }
    }
}

#[derive(Parser)]
#[command(name = "toricomplex", version, about = "Exact complexity invariants of toric log pairs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Input JSON file, or `-` for stdin.
    #[arg(long, global = true)]
    input: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// `projective`, `local:<cone>` or `relative`; overrides the input's mode.
    #[arg(long, global = true)]
    mode: Option<String>,
    /// Largest orbifold index searched.
    #[arg(long, global = true, default_value_t = 12, value_parser = clap::value_parser!(u64).range(1..=64))]
    orbifold_cap: u64,
    /// Largest number of boundary primes the minimizer accepts.
    #[arg(long, global = true, default_value_t = 12, value_parser = clap::value_parser!(u64).range(1..=64))]
    partition_limit: u64,
    /// Pass to the index-one cover when Cl(Y_x) has torsion (`cone`).
    #[arg(long, global = true)]
    torsion_cover: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a fan and pair.
    Validate,
    /// Class group of the fan.
    Classgroup,
    /// (c, c̄, ĉ) of the pair, and of a given decomposition.
    Complexity,
    /// Minimize c̄ and ĉ with realizing decompositions.
    Minimize,
    /// Adjunction to the divisor `ray`.
    Adjoin,
    /// Weighted blow-up of a cone at `v` and the orbifold cone isomorphism.
    Cone,
    /// Birational surgeries.
    Check {
        #[command(subcommand)]
        kind: CheckKind,
    },
    /// Hilbert bases of a cone and its dual.
    Hilbert,
}

pub struct Options {
    pub mode: Option<String>,
    pub orbifold_cap: u64,
    pub partition_limit: usize,
    pub torsion_cover: bool,
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("TORICOMPLEX_THREADS") else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Parse(format!("TORICOMPLEX_THREADS={v:?}: positive integer expected")))?;
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Io(e.to_string()))?;
    #[cfg(not(feature = "parallel"))]
    let _ = n;
    Ok(())
}

fn run(cli: Cli) -> Result<report::Report, CliError> {
    configure_threads()?;
    let opts = Options {
        mode: cli.mode,
        orbifold_cap: cli.orbifold_cap,
        partition_limit: cli.partition_limit as usize,
        torsion_cover: cli.torsion_cover,
    };
    let text = cli.input.as_deref().map(input::read_source).transpose()?;
    let need = || text.as_deref().ok_or_else(|| CliError::Io("--input is required".into()));
    match cli.command {
        Command::Validate => commands::validate(need()?, &opts),
        Command::Classgroup => commands::classgroup(need()?, &opts),
        Command::Complexity => commands::complexity(need()?, &opts),
        Command::Minimize => commands::minimize_cmd(need()?, &opts),
        Command::Adjoin => commands::adjoin(need()?, &opts),
        Command::Cone => commands::cone(need()?, &opts),
        Command::Hilbert => commands::hilbert(need()?, &opts),
        Command::Check { kind } => commands::check(kind, text.as_deref(), &opts),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    let format = cli.format;
    match run(cli) {
        Ok(r) => {
            print!("{}", r.render(format));
            ExitCode::from(if r.holds { 0 } else { 2 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
