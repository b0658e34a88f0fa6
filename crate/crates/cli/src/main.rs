//! `etc-lab`: experiments on time- and event-triggered consensus.
//!
//! Exit codes: 0 success, 2 usage error, 3 calibration failure,
//! 4 self-test failure, 1 anything else (I/O and the like).

mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{CalibrateArgs, RatioArgs, SelfTestArgs, SimulateArgs, SweepArgs, Table1Args, TrajectoryArgs};

/// Bad flag combination detected after parsing.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Debug, Parser)]
#[command(name = "etc-lab", version, about = "Time- vs event-triggered consensus experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a batch of trials for one scenario.
    Simulate(SimulateArgs),
    /// Tune a level-trigger threshold to a target inter-event time.
    Calibrate(CalibrateArgs),
    /// All sixteen cost cells of the reference comparison table.
    Table1(Table1Args),
    /// One scenario across several fleet sizes.
    SweepN(SweepArgs),
    /// Level vs periodic cost ratios with local information, by fleet size.
    RatioCurve(RatioArgs),
    /// Dump one short trajectory for plotting.
    Trajectory(TrajectoryArgs),
    /// Quick reduced-budget checks of the engine.
    SelfTest(SelfTestArgs),
}

fn configure_threads() -> Result<(), UsageError> {
    let Ok(raw) = std::env::var("THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| UsageError(format!("THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| UsageError(e.to_string()))
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Simulate(a) => commands::simulate(&a)?,
        Command::Calibrate(a) => commands::calibrate(&a)?,
        Command::Table1(a) => {
            if commands::table1(&a)? > 0 {
                return Ok(ExitCode::from(3));
            }
        }
        Command::SweepN(a) => commands::sweep_n(&a)?,
        Command::RatioCurve(a) => commands::ratio_curve(&a)?,
        Command::Trajectory(a) => commands::trajectory(&a)?,
        Command::SelfTest(a) => {
            let failed = commands::self_test(&a)?;
            if failed > 0 {
                eprintln!("self-test: {failed} check(s) failed");
                return Ok(ExitCode::from(4));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::exit_code_for(&e))
        }
    }
}
