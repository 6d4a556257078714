//! `transdeg`: degree tables, hypothesis certificates, dynamical degrees,
//! polynomial construction and Diophantine diagnostics.
//!
//! Exit codes: 0 success, 1 validation, 2 cross-check failure, 3 refuted,
//! 4 inconclusive, 5 precision ceiling.

mod commands;
mod config;
mod exit;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_rational::BigRational;
use serde_json::json;

use crate::commands::Outcome;
use crate::config::{Flags, RunConfig};
use crate::exit::{CliError, Exit};
use crate::output::Output;

#[derive(Parser, Debug)]
#[command(name = "transdeg", version, about = "Degree growth and certificates for toric-involution maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact degree table with a symbolic cross-check of the first iterates.
    Degrees {
        /// Last iterate checked by the symbolic oracle.
        #[arg(long, default_value_t = 2)]
        oracle_max: usize,
        /// Random lines per oracle evaluation.
        #[arg(long, default_value_t = 5)]
        trials: usize,
    },
    /// Every hypothesis certificate for the matrix.
    Certify,
    /// Certified dynamical degree.
    Dyndeg,
    /// Builds a polynomial satisfying the hypotheses, or certifies `--candidate`.
    Construct {
        #[arg(long)]
        candidate: Option<String>,
    },
    /// Convergent, irregular-index, approximant and residual tables.
    Diagnose {
        /// Rational scale `x` of the weights.
        #[arg(long, default_value = "3/4")]
        scale: String,
        /// Replace the selector by its first piece (a control run).
        #[arg(long)]
        constant_selector: bool,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Degrees { .. } => "degrees",
            Command::Certify => "certify",
            Command::Dyndeg => "dyndeg",
            Command::Construct { .. } => "construct",
            Command::Diagnose { .. } => "diagnose",
        }
    }
}

fn run_command(cli: &Cli, config: &RunConfig, out: &Output) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Degrees { oracle_max, trials } => commands::cmd_degrees(config, out, *oracle_max, *trials),
        Command::Certify => commands::cmd_certify(config),
        Command::Dyndeg => commands::cmd_dyndeg(config, out),
        Command::Construct { candidate } => commands::cmd_construct(config, candidate.as_deref()),
        Command::Diagnose { scale, constant_selector } => {
            let x: BigRational = scale
                .parse()
                .map_err(|_| CliError::new(Exit::Validation, format!("bad scale {scale:?}")))?;
            commands::cmd_diagnose(config, out, &x, *constant_selector)
        }
    }
}

fn run(cli: &Cli) -> Result<Exit, CliError> {
    let config = RunConfig::resolve(&cli.flags)?;
    if let Some(jobs) = config.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::new(Exit::Validation, format!("--jobs: {e}")))?;
    }
    let out = Output::create(&config.out)?;
    let outcome = run_command(cli, &config, &out);
    let (exit, error) = match &outcome {
        Ok(o) => (o.exit, None),
        Err(e) => (e.exit, Some(e.message.as_str())),
    };
    let empty = Outcome { exit, certificates: Vec::new(), extra: json!({}) };
    let o = outcome.as_ref().unwrap_or(&empty);
    out.bundle(cli.command.name(), &config.echo(), exit, &o.certificates, o.extra.clone(), error)?;
    match outcome {
        Ok(o) => Ok(o.exit),
        Err(e) => Err(e),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { Exit::Validation } else { Exit::Ok };
            let _ = e.print();
            return ExitCode::from(code.code());
        }
    };
    match run(&cli) {
        Ok(exit) => ExitCode::from(exit.code()),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit.code())
        }
    }
}
