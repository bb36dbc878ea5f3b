mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{CliError, Context};
use config::RunConfig;

#[derive(Parser)]
#[command(name = "holovortex", version, about = "Fork-hologram vortex beam pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Run configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory; overrides `[output] dir`.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Input CFLD1 field for `propagate` and `analyze`.
    #[arg(long, global = true, value_name = "PATH")]
    input: Option<PathBuf>,

    /// Accepted for interface stability; the pipeline draws no random numbers.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,

    /// Worker threads. Outputs do not depend on this.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Write thickness.pgm and transmission.cfld.
    Synthesize,
    /// Illuminate and propagate a hologram-exit field.
    Propagate,
    /// OAM spectrum, singularity map and radial profile of a field.
    Analyze,
    /// Radial LG spectrum and the Gaussian-apodised vortex profile.
    Modal,
    /// synthesize, propagate, analyze, then modal if configured.
    Pipeline,
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::config("--threads", "must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::runtime("--threads", e.to_string()))?;
    }
    let _ = cli.seed;
    let path = cli
        .config
        .ok_or_else(|| CliError::config("--config", "a configuration file is required"))?;
    let config = RunConfig::load(&path)?;
    let cx = Context::new(config, cli.out, cli.input)?;
    match cli.command {
        Command::Synthesize => commands::synthesize(&cx).map(drop),
        Command::Propagate => commands::propagate(&cx, None).map(drop),
        Command::Analyze => commands::analyze(&cx, None),
        Command::Modal => commands::modal(&cx),
        Command::Pipeline => commands::pipeline(&cx),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            eprintln!("error: arguments: {}", first.trim_start_matches("error: "));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.code as u8)
        }
    }
}
