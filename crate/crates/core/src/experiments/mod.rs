//! Scenario runners, configuration, calibration caching and output.

pub mod calib;
pub mod config;
pub mod data;
pub mod output;
pub mod scenarios;
pub mod stability;
pub mod sweep;
pub mod verify;

use std::path::Path;

use serde::{Deserialize, Serialize};

pub use calib::{obtain_calibration, CALIBRATION_FILE};
pub use config::{CalibrationConfig, DuhamelConfig, RunConfig, ScalingVariant, Scenario, SeedConfig, SweepAxes, VerifyConfig};
pub use data::{build_datum, effective_params, Datum};
pub use output::{write_outcome, write_report, Artifacts, Outcome};
pub use scenarios::{continue_run, run_thm22, run_thm23, run_thm52, Thm22Report, Thm23Report, Thm52Report};
pub use stability::{
    partition_l5, run_stability51, run_stability51_from, stability_baseline, stability_perturbation, StabilityLedger,
};
pub use sweep::{run_sweep, sweep_cells, SweepReport};
pub use verify::{beta_by_quadrature, run_verify, VerifyReport};

use crate::error::Result;
use crate::initial::{Calibration, SizeLedger};
use crate::leray::{evolve, smoothness_proxy, EvolveOptions, SmoothnessVerdict};
use crate::norms::ScalingParams;

/// What a command-line invocation runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Construct,
    Evolve,
    Verify,
    Thm22,
    Thm23,
    Stability,
    Thm52,
    Sweep,
}

impl Command {
    pub fn needs_calibration(&self) -> bool {
        !matches!(self, Command::Construct | Command::Evolve)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructReport {
    pub scenario: String,
    pub scaling: ScalingParams,
    pub reference: SizeLedger,
    pub datum: SizeLedger,
    pub u0_l3: f64,
    pub w0_l3: f64,
    pub triangle_holds: bool,
}

pub fn run_construct(cfg: &RunConfig) -> Result<Outcome<ConstructReport>> {
    let d = build_datum(cfg)?;
    let report = ConstructReport {
        scenario: "construct".into(),
        scaling: d.params,
        reference: d.reference_sizes,
        datum: d.parts.v0_sizes,
        u0_l3: d.parts.u0_l3,
        w0_l3: d.parts.w0_l3,
        triangle_holds: d.parts.triangle_holds,
    };
    Ok(Outcome {
        report,
        artifacts: Artifacts {
            snapshots: vec![
                ("reference".into(), d.reference.clone()),
                ("v0".into(), d.parts.v0.clone()),
                ("u0".into(), d.parts.u0.clone()),
                ("w0".into(), d.parts.w0.clone()),
            ],
            ..Default::default()
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolveReport {
    pub scenario: String,
    pub t_final: f64,
    pub steps: usize,
    pub sup_l3: f64,
    pub final_l2: f64,
    pub energy_max_relative_residual: f64,
    pub energy_inequality_holds: bool,
    pub smoothness: SmoothnessVerdict,
}

pub fn run_evolve(cfg: &RunConfig) -> Result<Outcome<EvolveReport>> {
    let d = build_datum(cfg)?;
    let opts = EvolveOptions {
        exponent_q: cfg.exponent_q,
        snapshot_times: cfg.snapshot_times.clone(),
        ..Default::default()
    };
    let run = evolve(d.v0(), cfg.mollifier, &cfg.stepper, &opts)?;
    let m = &run.monitor;
    let report = EvolveReport {
        scenario: "evolve".into(),
        t_final: cfg.stepper.t_final,
        steps: cfg.stepper.steps(),
        sup_l3: m.l3.iter().copied().fold(0.0, f64::max),
        final_l2: *m.l2.last().expect("nonempty monitor"),
        energy_max_relative_residual: m.max_relative_energy_residual(),
        energy_inequality_holds: m.energy_inequality_holds(10.0),
        smoothness: smoothness_proxy(m),
    };
    let mut snapshots = vec![("v0".to_string(), d.v0().clone()), ("final".to_string(), run.final_state.clone())];
    for (i, s) in run.snapshots.iter().enumerate() {
        snapshots.push((format!("t{i:03}"), s.clone()));
    }
    Ok(Outcome {
        report,
        artifacts: Artifacts {
            monitors: vec![("v".into(), run.monitor)],
            picard: None,
            snapshots,
        },
    })
}

/// Runs `command` and writes every artifact under `out`. Returns the
/// report as JSON. With NSX_THREADS set the run is confined to a pool of
/// that size; NSX_THREADS=1 is the serial mode reruns are compared in.
pub fn execute(command: Command, cfg: &RunConfig, cal: Option<&Calibration>, out: &Path) -> Result<serde_json::Value> {
    match sweep::thread_cap() {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| crate::error::NsxError::Config(e.to_string()))?
            .install(|| execute_here(command, cfg, cal, out)),
        None => execute_here(command, cfg, cal, out),
    }
}

fn execute_here(command: Command, cfg: &RunConfig, cal: Option<&Calibration>, out: &Path) -> Result<serde_json::Value> {
    let width = cfg.mollifier_width();
    let need = || cal.ok_or(crate::error::NsxError::NotCalibrated);
    fn emit<R: Serialize>(out: &Path, o: &Outcome<R>, width: f64) -> Result<serde_json::Value> {
        write_outcome(out, o, width)?;
        Ok(serde_json::to_value(&o.report)?)
    }
    match command {
        Command::Construct => emit(out, &run_construct(cfg)?, width),
        Command::Evolve => emit(out, &run_evolve(cfg)?, width),
        Command::Thm22 => emit(out, &run_thm22(cfg, need()?)?, width),
        Command::Thm23 => emit(out, &run_thm23(cfg, need()?)?, width),
        Command::Thm52 => emit(out, &run_thm52(cfg, need()?)?, width),
        Command::Stability => emit(out, &run_stability51(cfg, need()?)?, width),
        Command::Verify => {
            let r = run_verify(cfg, need()?)?;
            write_report(out, &r)?;
            Ok(serde_json::to_value(&r)?)
        }
        Command::Sweep => {
            let r = run_sweep(cfg, need()?)?;
            write_report(out, &r)?;
            Ok(serde_json::to_value(&r)?)
        }
    }
}
