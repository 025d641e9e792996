//! `skalab`: command-line front end.
//!
//! Exit codes: 0 success, 1 a verdict or check failed, 2 usage or malformed
//! input, 3 budget exceeded, 4 I/O failure, 5 complexity infinite within
//! `l_max`.

mod commands;
mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use skalab::protocol::Variant;
use skalab::{BitString, Rational};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Failed(String),
    Budget(String),
    Io(String),
    Infinite,
}

impl CliError {
    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }

    fn code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Budget(_) => 3,
            CliError::Io(_) => 4,
            CliError::Infinite => 5,
        }
    }
}

impl From<skalab::Error> for CliError {
    fn from(e: skalab::Error) -> Self {
        match e {
            skalab::Error::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "skalab", version, about = "Secret key agreement laboratory at desk scale")]
struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact space-bounded complexity of one string.
    Oracle(OracleArgs),
    /// Run a seeded sweep of protocol runs and write its report.
    Run(RunArgs),
    /// Build or verify extractor tables.
    #[command(subcommand)]
    Extractor(ExtractorCommand),
    /// Parse and validate a transcript file.
    Replay { file: PathBuf },
    /// Summarize a report, optionally regenerating it from its config.
    Report {
        file: PathBuf,
        /// Re-run the embedded config and compare digests.
        #[arg(long)]
        verify: bool,
        /// Extractor table used by the original run (variant B).
        #[arg(long)]
        extractor: Option<PathBuf>,
    },
}

/// A bit string literal, or `@path` to read one from a file.
#[derive(Clone, Debug)]
pub struct BitsArg(pub BitString);

fn parse_bits(s: &str) -> Result<BitsArg, String> {
    let text = match s.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?,
        None => s.to_string(),
    };
    text.trim()
        .parse()
        .map(BitsArg)
        .map_err(|e: skalab::Error| e.to_string())
}

fn parse_rational(s: &str) -> Result<Rational, String> {
    s.parse().map_err(|e: skalab::Error| e.to_string())
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    s.parse().map_err(|e: skalab::Error| e.to_string())
}

#[derive(Args)]
pub struct ScheduleArgs {
    #[arg(long)]
    base_space: Option<u64>,
    #[arg(long, value_parser = parse_rational)]
    ratio: Option<Rational>,
    #[arg(long, allow_hyphen_values = true)]
    level_min: Option<i32>,
    #[arg(long)]
    level_max: Option<i32>,
    /// Largest space bound of any level.
    #[arg(long)]
    space_cap: Option<u64>,
}

#[derive(Args)]
pub struct OracleArgs {
    /// Target string (bits or @file).
    #[arg(long, value_parser = parse_bits)]
    x: BitsArg,
    /// Condition part, repeatable (bits or @file).
    #[arg(long = "cond", value_parser = parse_bits)]
    cond: Vec<BitsArg>,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    level: i32,
    #[arg(long)]
    l_max: Option<usize>,
    #[arg(long)]
    quota: Option<u64>,
    /// Fixed step cap instead of the configuration bound.
    #[arg(long)]
    step_cap: Option<u64>,
    #[command(flatten)]
    schedule: ScheduleArgs,
}

#[derive(Args)]
pub struct RunArgs {
    /// TOML config file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_parser = parse_variant)]
    variant: Option<Variant>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_parser = parse_rational)]
    epsilon: Option<Rational>,
    #[arg(long)]
    trials: Option<u64>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    flips: Option<usize>,
    #[arg(long)]
    c: Option<usize>,
    #[arg(long)]
    l_max: Option<usize>,
    #[arg(long)]
    quota: Option<u64>,
    #[arg(long)]
    step_cap: Option<u64>,
    /// Extractor table file (variant B).
    #[arg(long)]
    extractor: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    schedule: ScheduleArgs,
}

#[derive(Subcommand)]
pub enum ExtractorCommand {
    /// Search seeded random tables for a prefix-certified extractor.
    Build {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, value_parser = parse_rational)]
        epsilon: Rational,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Certify prefixes 1..=K (default: min(n, m)).
        #[arg(long)]
        certify: Option<usize>,
        #[arg(long, default_value_t = 1000)]
        attempts: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check the (k, epsilon) extractor property.
    Verify {
        /// Table file.
        #[arg(long, conflicts_with_all = ["identity", "constant"])]
        table: Option<PathBuf>,
        /// Built-in table E(x, w) = w, as N:D.
        #[arg(long, conflicts_with = "constant")]
        identity: Option<String>,
        /// Built-in all-zero table, as N:D:M.
        #[arg(long)]
        constant: Option<String>,
        #[arg(long)]
        k: usize,
        #[arg(long, value_parser = parse_rational)]
        epsilon: Rational,
        /// Use the first K output bits.
        #[arg(long)]
        prefix: Option<usize>,
        /// Sample random sources from this seed instead of enumerating all.
        #[arg(long)]
        sampled: Option<u64>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match cli.command {
        Command::Oracle(args) => commands::oracle(args),
        Command::Run(args) => commands::run(args),
        Command::Extractor(cmd) => commands::extractor(cmd),
        Command::Replay { file } => commands::replay(&file),
        Command::Report {
            file,
            verify,
            extractor,
        } => commands::report(&file, verify, extractor.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::Infinite => {}
                CliError::Usage(m) | CliError::Failed(m) | CliError::Budget(m) | CliError::Io(m) => {
                    eprintln!("error: {m}")
                }
            }
            ExitCode::from(e.code())
        }
    }
}
