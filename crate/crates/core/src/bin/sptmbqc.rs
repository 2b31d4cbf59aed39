use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sptmbqc::cli::{execute, Command, Overrides, RunConfig};

/// Measurement-based computation on spin-1 chains: build states, run protocols, verify.
#[derive(Parser)]
#[command(version)]
struct Args {
    /// Key-value configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte Carlo rounds per readout axis.
    #[arg(long, global = true)]
    rounds: Option<u64>,
    /// Output directory (otherwise $SPTMBQC_OUT, then the config, then ./sptmbqc-out).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Build or diagonalize a chain state and cache it with metadata.
    BuildState,
    /// Execute a measurement plan: exact path sum, closed form and Monte Carlo.
    Run,
    /// Run the algebraic verification suite; exits 1 on any failed check.
    Verify,
    /// Tabulate string orders over a (theta, D_x, D_z) grid as CSV.
    Sweep,
    /// Check one teleportation step over random inputs and tilt angles.
    TeleportDemo,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let command = match args.command {
        Cmd::BuildState => Command::BuildState,
        Cmd::Run => Command::Run,
        Cmd::Verify => Command::Verify,
        Cmd::Sweep => Command::Sweep,
        Cmd::TeleportDemo => Command::TeleportDemo,
    };
    let overrides = Overrides { seed: args.seed, rounds: args.rounds, out: args.out, jobs: args.jobs, out_env: None }.with_env();
    let outcome = RunConfig::load(args.config.as_deref(), &overrides).and_then(|config| execute(command, &config));
    match outcome {
        Ok(o) => {
            println!("{}", o.summary);
            for f in &o.files {
                println!("wrote {}", f.display());
            }
            if o.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("{}: {e}", command.name());
            ExitCode::from(2)
        }
    }
}
