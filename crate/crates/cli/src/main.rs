use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use nsx_core::experiments::{execute, obtain_calibration, Command, RunConfig, Scenario};

#[derive(Parser)]
#[command(name = "nsx", version, about = "Pseudospectral Navier-Stokes laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build the two-scale datum and write its size ledger and snapshots.
    Construct(RunArgs),
    /// Evolve the datum with the direct solver.
    Evolve(RunArgs),
    /// Run the static inequality suite.
    Verify(RunArgs),
    /// Finite-time scenario: both solvers to T > 1.
    Thm22(RunArgs),
    /// Late-time scenario: split evolution, t*, long-horizon continuation.
    Thm23(RunArgs),
    /// Partitioned stability envelope for a nearby datum.
    Stability(RunArgs),
    /// Energy-dissipation scenario under the small-energy assumption.
    Thm52(RunArgs),
    /// Condition map over a grid of scaling knobs.
    Sweep(RunArgs),
    /// Print a reference configuration as JSON.
    Config {
        #[arg(value_enum)]
        scenario: ScenarioArg,
    },
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration; the reference configuration when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Recalibrate even when a matching calibration.json exists.
    #[arg(long)]
    self_calibrate: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScenarioArg {
    Thm22,
    Thm23,
    Stability51,
    Thm52,
    Sweep,
    Verify,
}

impl From<ScenarioArg> for Scenario {
    fn from(s: ScenarioArg) -> Self {
        match s {
            ScenarioArg::Thm22 => Scenario::Thm22,
            ScenarioArg::Thm23 => Scenario::Thm23,
            ScenarioArg::Stability51 => Scenario::Stability51,
            ScenarioArg::Thm52 => Scenario::Thm52,
            ScenarioArg::Sweep => Scenario::Sweep,
            ScenarioArg::Verify => Scenario::Verify,
        }
    }
}

fn default_scenario(c: Command) -> Scenario {
    match c {
        Command::Thm23 => Scenario::Thm23,
        Command::Stability => Scenario::Stability51,
        Command::Thm52 => Scenario::Thm52,
        Command::Sweep => Scenario::Sweep,
        Command::Verify => Scenario::Verify,
        Command::Construct | Command::Evolve | Command::Thm22 => Scenario::Thm22,
    }
}

fn run(command: Command, args: RunArgs) -> Result<()> {
    let cfg = match &args.config {
        Some(p) => RunConfig::load(p).with_context(|| format!("loading {}", p.display()))?,
        None => RunConfig::reference(default_scenario(command)),
    };
    let out = args
        .out
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("nsx-out"));
    std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    let cal = if command.needs_calibration() {
        Some(obtain_calibration(&cfg, Some(&out), args.self_calibrate).context("calibration")?)
    } else {
        None
    };
    let report = execute(command, &cfg, cal.as_ref(), &out)?;
    emit(&serde_json::to_string_pretty(&report)?)
}

/// Prints to stdout; a closed pipe is not an error.
fn emit(text: &str) -> Result<()> {
    match writeln!(std::io::stdout().lock(), "{text}") {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r?),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Cmd::Construct(a) => run(Command::Construct, a),
        Cmd::Evolve(a) => run(Command::Evolve, a),
        Cmd::Verify(a) => run(Command::Verify, a),
        Cmd::Thm22(a) => run(Command::Thm22, a),
        Cmd::Thm23(a) => run(Command::Thm23, a),
        Cmd::Stability(a) => run(Command::Stability, a),
        Cmd::Thm52(a) => run(Command::Thm52, a),
        Cmd::Sweep(a) => run(Command::Sweep, a),
        Cmd::Config { scenario } => RunConfig::reference(scenario.into())
            .to_json()
            .map_err(Into::into)
            .and_then(|s| emit(&s)),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
