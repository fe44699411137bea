mod commands;
mod config;
mod error;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::Context;
use error::{CliError, CliResult};

const DEFAULT_OUT: &str = "sigecc-out";

/// Significance-aware codebook search, channel simulation and profiling.
#[derive(Debug, Parser)]
#[command(name = "sigecc", version)]
struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Overrides the seed in the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (default: sigecc-out).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Search for a codebook that minimizes the expected-loss objective.
    Optimize {
        /// Search over generator matrices and write generator.txt.
        #[arg(long)]
        linear: bool,
    },
    /// Monte Carlo sweep over codebooks, decoders and SNRs.
    Simulate,
    /// Pairwise value difference vs Hamming distance for a codebook file.
    Profile {
        #[arg(value_name = "CODEBOOK")]
        codebook: PathBuf,
    },
    /// Write a baseline codebook: hamming74, hamming128 or hadamard83.
    Baselines { name: String },
    /// Re-run a recorded manifest and verify its checksums.
    Replay {
        #[arg(value_name = "MANIFEST")]
        manifest: PathBuf,
    },
}

fn run(cli: Cli) -> CliResult<()> {
    sigecc::par::set_jobs(cli.jobs).map_err(CliError::usage)?;
    let ctx = Context {
        config: cli.config,
        seed: cli.seed,
        out: cli
            .out
            .clone()
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)),
    };
    let m = match cli.command {
        Command::Optimize { linear } => commands::optimize(&ctx, linear)?,
        Command::Simulate => commands::simulate(&ctx)?,
        Command::Profile { codebook } => commands::profile(&ctx, &codebook)?,
        Command::Baselines { name } => commands::baselines(&ctx, &name)?,
        Command::Replay { manifest } => commands::replay(&manifest, cli.out)?,
    };
    for name in m.artifacts.keys() {
        println!("{}", m.out.join(name).display());
    }
    println!("{}", m.out.join(manifest::MANIFEST_FILE).display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
