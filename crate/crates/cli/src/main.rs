use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use halfspec_cli::config::Loaded;
use halfspec_cli::{cmd_solve, cmd_sweep, cmd_thresholds, cmd_verify, CliError, Options};

#[derive(Parser, Debug)]
#[command(name = "halfspec", version, about = "Thresholds, solves and sweeps for the half-Laplacian Dirichlet problem")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Run configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides `output` in the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Overrides `seed` in the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Log progress to stderr (repeat for more detail).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Certify the parameter thresholds.
    Thresholds,
    /// Find the minimiser and mountain-pass solutions at one lambda.
    Solve,
    /// Solve over a lambda sweep.
    Sweep,
    /// Run the invariant suite.
    Verify,
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let loaded = match &cli.config {
        Some(p) => Loaded::from_path(p)?,
        None if matches!(cli.command, Command::Verify) => Loaded::defaults(),
        None => return Err(CliError::Config("--config is required".into())),
    };
    if cli.jobs == Some(0) {
        return Err(CliError::Config("--jobs must be >= 1".into()));
    }
    let opts = Options {
        out: cli.out.clone(),
        jobs: cli.jobs,
        seed: cli.seed,
    };
    match cli.command {
        Command::Thresholds => cmd_thresholds(&loaded, &opts).map(drop),
        Command::Solve => cmd_solve(&loaded, &opts).map(drop),
        Command::Sweep => cmd_sweep(&loaded, &opts).map(drop),
        Command::Verify => cmd_verify(&loaded, &opts).map(drop),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).init();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
