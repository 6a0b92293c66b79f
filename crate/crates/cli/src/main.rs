//! `vexforce`: limit-order trading games on continuous price paths, with
//! roughness analytics and multi-scale forcing experiments.
//!
//! Exit codes: 0 success, 1 invalid input or configuration, 2 runtime
//! failure (I/O, numerics, budget aborts).

mod analyze;
mod force;
mod game_cmd;
mod out;
mod paths_cmd;
mod sweep;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "vexforce", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate sample-path files
    Paths {
        #[command(subcommand)]
        cmd: paths_cmd::PathsCmd,
    },
    /// Run the limit-order game on a path
    Game {
        #[command(subcommand)]
        cmd: game_cmd::GameCmd,
    },
    /// Seeded Monte Carlo multi-scale sweep
    Sweep(sweep::SweepArgs),
    /// Forcing constructions (ladders, two accounts)
    Force {
        #[command(subcommand)]
        cmd: force::ForceCmd,
    },
    /// Roughness analytics on a path file
    Analyze(analyze::AnalyzeArgs),
}

/// Wrap a CLI-level validation failure so it maps to exit code 1 like the
/// library's own validation errors.
pub(crate) fn invalid(msg: impl Into<String>) -> anyhow::Error {
    vexforce_core::Error::validation(msg).into()
}

fn exit_code(err: &anyhow::Error) -> u8 {
    use vexforce_core::Error;
    match err.downcast_ref::<Error>() {
        Some(Error::Validation(_)) | Some(Error::Parse { .. }) => 1,
        _ => 2,
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match &cli.command {
        Command::Paths { cmd: paths_cmd::PathsCmd::Gen(args) } => paths_cmd::run(args),
        Command::Game { cmd: game_cmd::GameCmd::Run(args) } => game_cmd::run(args),
        Command::Sweep(args) => sweep::run(args),
        Command::Force { cmd: force::ForceCmd::Run(args) } => force::run(args),
        Command::Analyze(args) => analyze::run(args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Usage problems are validation failures; --help/--version are
            // successful terminations.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
