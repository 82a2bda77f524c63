//! Grid sweeps over the scaling knobs and the final time, one isolated run
//! per cell.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use super::data::build_datum;
use crate::error::{NsxError, Result};
use crate::initial::{bootstrap_constants, check_condition, BootstrapInputs, Calibration, ConditionId, ConditionInputs, ConditionReport};
use crate::leray::{evolve, smoothness_proxy, EvolveOptions};
use crate::norms::ScalingParams;

pub const THREADS_ENV: &str = "NSX_THREADS";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub scaling: ScalingParams,
    pub t_final: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellEvolution {
    pub sup_l3: f64,
    pub max_energy_residual: f64,
    pub smooth: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub cell: SweepCell,
    pub conditions: Vec<ConditionReport>,
    pub all_pass: bool,
    pub bootstrap_k: Option<f64>,
    pub m_v: Option<f64>,
    pub v0_l2: f64,
    pub v0_l3: f64,
    pub v0_grad_l2: f64,
    pub evolution: Option<CellEvolution>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub scenario: String,
    pub calibration_hash: String,
    pub cells: Vec<CellReport>,
}

fn axis(values: &[f64], base: f64) -> Vec<f64> {
    if values.is_empty() {
        vec![base]
    } else {
        values.to_vec()
    }
}

/// The cartesian product of the configured axes, in row-major order
/// (lambda_tilde slowest, t_final fastest).
pub fn sweep_cells(cfg: &RunConfig) -> Vec<SweepCell> {
    let s = &cfg.sweep;
    let mut out = Vec::new();
    for lt in axis(&s.lambda_tilde, cfg.scaling.lambda_tilde) {
        for lh in axis(&s.lambda_hat, cfg.scaling.lambda_hat) {
            for sf in axis(&s.split_fraction, cfg.scaling.split_fraction) {
                for t in axis(&s.t_final, cfg.stepper.t_final) {
                    out.push(SweepCell {
                        scaling: ScalingParams {
                            lambda_tilde: lt,
                            lambda_hat: lh,
                            split_fraction: sf,
                        },
                        t_final: t,
                    });
                }
            }
        }
    }
    out
}

fn cell_config(cfg: &RunConfig, cell: &SweepCell) -> RunConfig {
    let mut c = cfg.clone();
    c.scaling = cell.scaling;
    c.stepper.t_final = cell.t_final;
    c
}

/// Conditions for the regime selected by the final time: the finite-time
/// pair when T > 1, the late-time set otherwise.
fn regime_conditions(t: f64) -> &'static [ConditionId] {
    if t > 1.0 {
        &[ConditionId::StokesSmallness, ConditionId::PerturbationSmallness]
    } else {
        &[ConditionId::GlobalPerturbation, ConditionId::StokesEnergy, ConditionId::BallRadius]
    }
}

pub fn run_cell(cfg: &RunConfig, cell: &SweepCell, cal: &Calibration) -> Result<CellReport> {
    let c = cal.universal()?;
    let cc = cell_config(cfg, cell);
    let datum = build_datum(&cc)?;
    let inputs = ConditionInputs::from_fields(datum.u0(), datum.w0(), cc.exponent_q, cell.t_final)?;
    let conditions: Vec<ConditionReport> = regime_conditions(cell.t_final)
        .iter()
        .map(|id| check_condition(*id, &inputs, cc.threshold_theta, cal))
        .collect::<Result<_>>()?;
    let boot = bootstrap_constants(&BootstrapInputs {
        w0_l3: datum.parts.w0_l3,
        u0_lq: inputs.u0_lq.unwrap_or(0.0),
        grad_u0_l3: inputs.grad_u0_l3.unwrap_or(0.0),
        u0_l3: datum.parts.u0_l3,
        t_final: cell.t_final,
        constant: c,
    })
    .ok();
    let evolution = if cfg.sweep.evolve {
        let opts = EvolveOptions {
            exponent_q: cc.exponent_q,
            ..Default::default()
        };
        let run = evolve(datum.v0(), cc.mollifier, &cc.stepper, &opts)?;
        let m = &run.monitor;
        Some(CellEvolution {
            sup_l3: m.l3.iter().copied().fold(0.0, f64::max),
            max_energy_residual: m.max_relative_energy_residual(),
            smooth: smoothness_proxy(m).pass,
        })
    } else {
        None
    };
    let sizes = datum.parts.v0_sizes;
    Ok(CellReport {
        cell: cell.clone(),
        all_pass: conditions.iter().all(|r| r.pass),
        conditions,
        bootstrap_k: boot.map(|b| b.k),
        m_v: boot.map(|b| b.m_v),
        v0_l2: sizes.l2,
        v0_l3: sizes.l3,
        v0_grad_l2: sizes.grad_l2,
        evolution,
        error: None,
    })
}

pub(crate) fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV).ok().and_then(|s| s.trim().parse().ok()).filter(|n| *n > 0)
}

/// Runs every cell on a pool capped by NSX_THREADS. A cell that fails is
/// reported with its error; the order of cells is that of `sweep_cells`.
pub fn run_sweep(cfg: &RunConfig, cal: &Calibration) -> Result<SweepReport> {
    cal.universal()?;
    let cells = sweep_cells(cfg);
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_cap() {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| NsxError::Config(e.to_string()))?;
    let reports: Vec<CellReport> = pool.install(|| {
        cells
            .par_iter()
            .map(|cell| {
                run_cell(cfg, cell, cal).unwrap_or_else(|e| CellReport {
                    cell: cell.clone(),
                    conditions: Vec::new(),
                    all_pass: false,
                    bootstrap_k: None,
                    m_v: None,
                    v0_l2: f64::NAN,
                    v0_l3: f64::NAN,
                    v0_grad_l2: f64::NAN,
                    evolution: None,
                    error: Some(e.to_string()),
                })
            })
            .collect()
    });
    Ok(SweepReport {
        scenario: "sweep".into(),
        calibration_hash: cal.hash(),
        cells: reports,
    })
}
