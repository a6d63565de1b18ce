//! `hypersaw`: samplers, experiments and verification suites for
//! self-avoiding walks on hyperbolic space.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 configuration or usage
//! error, 3 sampler infeasibility, 4 a verification suite failed. Errors are
//! reported on stderr as `{"error": {"kind": ..., "message": ...}}`.

mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use hypersaw::Error;
use serde_json::json;

use crate::commands::Outcome;
use crate::config::{Flags, Resolved};

#[derive(Parser, Debug)]
#[command(name = "hypersaw", version, about = "Self-avoiding walks on hyperbolic space")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Draw walks and write one JSON file per walk.
    Sample,
    /// Estimate E[d(x_0, x_n)] / n for one walk length.
    Speed,
    /// Speed estimates over --n-values.
    Scan,
    /// Displacements with step length given by --eps-rule, plus exponent fits.
    Scaling,
    /// Run the geometric verification suites.
    Verify,
    /// Continue an MCMC chain from a checkpoint.
    Resume,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Usage(_) => 2,
        Error::Feasibility { .. } => 3,
        _ => 1,
    }
}

fn report(e: &Error) -> ExitCode {
    let mut body = json!({ "kind": e.kind(), "message": e.to_string() });
    if let Error::Feasibility { attempts, acceptance_rate } = e {
        body["attempts"] = json!(attempts);
        body["acceptance_rate"] = json!(acceptance_rate);
    }
    eprintln!("{}", json!({ "error": body }));
    ExitCode::from(exit_code(e))
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    let cfg = Resolved::new(&cli.flags)?;
    if let Some(jobs) = cfg.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| Error::Config(format!("cannot start {jobs} workers: {e}")))?;
    }
    match cli.command {
        Command::Sample => commands::sample(&cfg),
        Command::Speed => commands::speed(&cfg),
        Command::Scan => commands::scan(&cfg),
        Command::Scaling => commands::scaling(&cfg),
        Command::Verify => commands::verify(&cfg),
        Command::Resume => commands::resume(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.render().to_string();
            let text = text.trim_end().trim_start_matches("error: ");
            return report(&Error::Config(text.to_owned()));
        }
    };
    match run(&cli) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::VerificationFailed) => {
            eprintln!(
                "{}",
                json!({ "error": { "kind": "verification", "message": "one or more verification suites failed" } })
            );
            ExitCode::from(4)
        }
        Err(e) => report(&e),
    }
}
