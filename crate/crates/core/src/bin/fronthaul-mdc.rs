use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fronthaul_mdc::error::Error;
use fronthaul_mdc::experiment::{emit_csv, emit_summary, read_csv, run_sweep, summarize, SweepOptions, SweepSpec};

#[derive(Parser)]
#[command(version, about = "Parameter sweeps for multiple-description fronthaul compression")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a sweep and write one CSV row per scheme, axis point and channel draw.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
        /// Monte Carlo trials per row, overriding the config.
        #[arg(long = "mc-trials")]
        mc_trials: Option<u64>,
        /// Extra deterministic starts per solve.
        #[arg(long = "n-starts", default_value_t = 1)]
        n_starts: usize,
    },
    /// Average a sweep CSV over channel draws.
    Summarize {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a sweep config without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) => 2,
        _ => 1,
    }
}

fn run(cmd: Command) -> Result<(), Error> {
    match cmd {
        Command::Sweep { config, out, jobs, mc_trials, n_starts } => {
            let spec = SweepSpec::load(&config)?;
            let mut opts = SweepOptions { jobs, mc_trials, ..Default::default() };
            opts.solver.n_starts = n_starts.max(1);
            let rows = run_sweep(&spec, &opts)?;
            emit_csv(&rows, &out)?;
            eprintln!("wrote {} rows to {}", rows.len(), out.display());
        }
        Command::Summarize { input, out } => {
            let rows = summarize(&read_csv(&input)?);
            emit_summary(&rows, &out)?;
            eprintln!("wrote {} points to {}", rows.len(), out.display());
        }
        Command::Validate { config } => {
            let spec = SweepSpec::load(&config)?;
            println!("ok: {} rows", spec.row_count()?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match catch_unwind(AssertUnwindSafe(|| run(cli.command))) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(_) => {
            eprintln!("error: internal solver panic");
            ExitCode::from(3)
        }
    }
}
