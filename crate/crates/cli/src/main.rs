use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rcndl_cli::{cmd_check, cmd_oracle, cmd_run, Outcome, RunFlags};

/// Minimum cross entropy reasoning over RCNDL networks.
#[derive(Parser)]
#[command(name = "rcndl", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Apply evidence and report posterior marginals
    Run {
        model: PathBuf,
        /// Evidence file; omitted means no evidence
        evidence: Option<PathBuf>,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Preprocess a model and print its intermediate form
    Check {
        model: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Run, then compare every posterior with the full-joint solution
    Oracle {
        model: PathBuf,
        evidence: Option<PathBuf>,
        #[command(flatten)]
        flags: RunFlags,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run {
            model,
            evidence,
            flags,
        } => cmd_run(model, evidence.as_deref(), flags),
        Command::Check { model, json } => cmd_check(model, *json),
        Command::Oracle {
            model,
            evidence,
            flags,
        } => cmd_oracle(model, evidence.as_deref(), flags),
    };
    match result {
        Ok(Outcome { stdout, code }) => {
            print!("{stdout}");
            if code != 0 {
                eprintln!("rcndl: constraints not satisfied within the pass limit");
            }
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("rcndl: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
