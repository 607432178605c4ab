//! Scenario-driven command line for oscillator-network synchronization
//! analysis: coupling bounds, hypothesis audits, simulations, and strength
//! sweeps.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use syncnet_cli::exec;
use syncnet_cli::scenario::{Overrides, Scenario};

#[derive(Parser)]
#[command(
    name = "syncnet",
    version,
    about = "Coupling thresholds, hypothesis audits, and synchronization verification for nonlinearly coupled oscillator networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Override the scenario seeds (initial conditions and audits).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Override the scenario output directory.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,

    /// Override the integrator step.
    #[arg(long, global = true)]
    dt: Option<f64>,

    /// Override the integration end time.
    #[arg(long, global = true)]
    t_end: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the bound and threshold, run audits if configured, integrate,
    /// and write the trajectory CSV plus a report.
    Run { file: PathBuf },
    /// Integrate once per strength in the configured epsilon range and write
    /// a verdict table.
    Sweep { file: PathBuf },
    /// Run the five hypothesis audits and write a consolidated report.
    Audit { file: PathBuf },
    /// Compute the coupling bound and sufficient threshold only.
    Bound { file: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let overrides = Overrides {
        seed: cli.seed,
        out_dir: cli.out_dir,
        dt: cli.dt,
        t_end: cli.t_end,
    };
    let outcome = match &cli.command {
        Command::Run { file } => Scenario::load(file, &overrides).and_then(|s| exec::cmd_run(&s)),
        Command::Sweep { file } => {
            Scenario::load(file, &overrides).and_then(|s| exec::cmd_sweep(&s))
        }
        Command::Audit { file } => {
            Scenario::load(file, &overrides).and_then(|s| exec::cmd_audit(&s))
        }
        Command::Bound { file } => {
            Scenario::load(file, &overrides).and_then(|s| exec::cmd_bound(&s))
        }
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("one or more requested checks failed");
            ExitCode::FAILURE
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
