//! `atomnav`: scenario runner for the cold-atom-beam sensor simulator.
//!
//! Exit codes: 0 ok, 1 I/O failure, 2 configuration error, 3 check failure.

use std::path::PathBuf;
use std::process::ExitCode;

use atomnav::Exec;
use clap::{Parser, Subcommand};

mod commands;
mod error;
mod scenario;

use error::CliError;
use scenario::Block;

#[derive(Parser)]
#[command(
    name = "atomnav",
    version,
    about = "Cold atomic beam interferometer and navigation simulator"
)]
struct Cli {
    /// Scenario JSON document. Without it every block takes its defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides `output.dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overrides the scan and lock-in seeds.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Print the machine-readable summary to stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Evaluate everything on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one PZT fringe scan and fit it.
    Fringe,
    /// Dual-beam sensing plus dead reckoning against the truth profile.
    Navigate,
    /// Evaluate a frequency-chain file and run its lock checks.
    Chain { file: PathBuf },
    /// Lock-in demodulation and offset-lock servo demo.
    Lockin,
    /// Raman beam tilt check.
    Align,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let required: &[Block] = match cli.command {
        Command::Chain { ref file } => return commands::chain(file),
        Command::Fringe => &[Block::Scan],
        Command::Navigate => &[Block::Scan, Block::Navigation],
        Command::Lockin => &[Block::Lockin],
        Command::Align => &[Block::Alignment],
    };
    let loaded = scenario::load(cli.config.as_deref(), required)?;
    if cli.config.is_none() {
        eprintln!("no --config given; all scenario blocks use defaults");
    } else {
        for d in &loaded.defaults {
            eprintln!("default applied: {d}");
        }
    }
    let mut scenario = loaded.scenario;
    if let Some(seed) = cli.seed {
        scenario.override_seed(seed);
    }
    if let Some(out) = &cli.out {
        scenario.output_dir = out.display().to_string();
    }
    let ctx = commands::Context {
        out_dir: PathBuf::from(&scenario.output_dir),
        scenario,
        json: cli.json,
        exec: if cli.sequential {
            Exec::Sequential
        } else {
            Exec::default()
        },
    };
    match cli.command {
        Command::Fringe => commands::fringe(&ctx),
        Command::Navigate => commands::navigate_cmd(&ctx),
        Command::Lockin => commands::lockin(&ctx),
        Command::Align => commands::align(&ctx),
        Command::Chain { .. } => unreachable!("handled above"),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("atomnav: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
