use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tfim_fidelity::cli::{self, CliError, RunOptions};
use tfim_fidelity::oracle::{validate_against_oracle, ValidationOptions};

#[derive(Parser)]
#[command(name = "tfim", version, about = "Disordered transverse-field Ising chain experiments")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML config.
    Run {
        config: PathBuf,
        /// Worker threads (default: config, then TFIM_WORKERS, then all cores).
        #[arg(long)]
        workers: Option<usize>,
        /// Output directory, overriding the config.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Suppress progress output.
        #[arg(long)]
        quiet: bool,
    },
    /// Parse and check a config without running it.
    Validate { config: PathBuf },
    /// Compare the free-fermion solver against exact diagonalization.
    Oracle {
        length: usize,
        realizations: usize,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match dispatch(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn dispatch(args: Args) -> Result<(), CliError> {
    match args.command {
        Command::Run {
            config,
            workers,
            output,
            quiet,
        } => {
            let cfg = cli::load_config(&config)?;
            let summary = cli::run_experiment(&cfg, Some(&config), &RunOptions { workers, output, quiet })?;
            for f in &summary.files {
                println!("{}", f.display());
            }
            Ok(())
        }
        Command::Validate { config } => {
            let cfg = cli::load_config(&config)?;
            println!("{}: ok ({})", config.display(), cfg.experiment.name());
            Ok(())
        }
        Command::Oracle {
            length,
            realizations,
            seed,
        } => {
            let mut opts = ValidationOptions::new(length, realizations);
            opts.seed = seed;
            let report = validate_against_oracle(&opts)?;
            for c in &report.checks {
                let status = if c.passed() { "ok" } else { "FAILED" };
                println!("{:<28} {:>10.3e}  (tol {:.0e})  {status}", c.name, c.max_deviation, c.tolerance);
            }
            if report.passed() {
                Ok(())
            } else {
                Err(CliError::OracleMismatch(format!("L = {length}")))
            }
        }
    }
}
