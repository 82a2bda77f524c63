//! Scenario runners for the finite-time, late-time and energy-dissipation
//! arguments.

use serde::{Deserialize, Serialize};

use super::config::{RunConfig, ScalingVariant};
use super::data::{build_datum, Datum};
use super::output::{Artifacts, Outcome};
use crate::error::{NsxError, Result};
use crate::initial::{
    bootstrap_constants, check_condition, BootstrapInputs, BootstrapReport, Calibration, ConditionId, ConditionInputs,
    ConditionReport, SizeLedger,
};
use crate::leray::{
    assumption_a_monitor, ess_monitor, evolve, evolve_split, find_t_star, smoothness_proxy, sup_l3_after,
    weighted_decay_holds, AssumptionAReport, EssReport, EvolveOptions, SmoothnessVerdict, TStarReport, TimeStepper,
    Trajectory, TrajectoryMonitor,
};
use crate::mild::picard_solve_w;
use crate::norms::{FieldSamples, ScalingParams};
use crate::spectral::{heat_propagate, SpectralVectorField};

pub const IN_HYPOTHESIS: &str = "in-hypothesis";
pub const OUT_OF_HYPOTHESIS: &str = "out-of-hypothesis";

fn label(pass: bool) -> String {
    if pass { IN_HYPOTHESIS } else { OUT_OF_HYPOTHESIS }.to_string()
}

fn evolve_options(cfg: &RunConfig) -> EvolveOptions {
    EvolveOptions {
        exponent_q: cfg.exponent_q,
        snapshot_times: cfg.snapshot_times.clone(),
        ..Default::default()
    }
}

fn conditions(ids: &[ConditionId], inputs: &ConditionInputs, cfg: &RunConfig, cal: &Calibration) -> Result<Vec<ConditionReport>> {
    ids.iter()
        .map(|id| check_condition(*id, inputs, cfg.threshold_theta, cal))
        .collect()
}

/// Continues a run from `state` (tagged with its time) up to `until`.
pub fn continue_run(state: &SpectralVectorField, cfg: &RunConfig, until: f64) -> Result<Trajectory> {
    let dt = cfg.horizon_dt.unwrap_or(cfg.stepper.dt);
    let span = until - state.time_tag();
    if !(span > 0.0) {
        return Err(NsxError::InvalidTime(span));
    }
    let stepper = TimeStepper {
        dt: dt.min(span),
        t_final: span,
        ..cfg.stepper
    };
    let opts = EvolveOptions {
        snapshot_times: Vec::new(),
        ..evolve_options(cfg)
    };
    evolve(state, cfg.mollifier, &stepper, &opts)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LargenessLedger {
    pub reference: SizeLedger,
    pub datum: SizeLedger,
    pub l2_ratio: f64,
    pub l3_ratio: f64,
    pub grad_l2_ratio: f64,
    pub caloric_ratio: f64,
}

impl LargenessLedger {
    fn of(d: &Datum) -> Self {
        let (r, v) = (d.reference_sizes, d.parts.v0_sizes);
        let ratio = |a: f64, b: f64| if b > 0.0 { a / b } else { f64::NAN };
        Self {
            reference: r,
            datum: v,
            l2_ratio: ratio(v.l2, r.l2),
            l3_ratio: ratio(v.l3, r.l3),
            grad_l2_ratio: ratio(v.grad_l2, r.grad_l2),
            caloric_ratio: ratio(v.caloric, r.caloric),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MildSummary {
    pub converged: bool,
    pub iterations: usize,
    pub residual_history: Vec<f64>,
    pub contraction_ratios: Vec<f64>,
    pub in_k_ball: Option<bool>,
    pub max_weighted_lq: f64,
    pub max_weighted_grad_l3: f64,
    /// Relative L2 gap between u(T) + w(T) and the direct solver at T.
    pub final_gap_to_direct: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectSummary {
    pub ess: EssReport,
    pub energy_max_relative_residual: f64,
    pub energy_inequality_holds: bool,
    pub max_divergence: f64,
    /// t^{(1-3/q)/2} ||v||_q <= K + C ||u0||_3 at every sample.
    pub weighted_decay_holds: Option<bool>,
}

fn direct_summary(mon: &TrajectoryMonitor, boot: Option<&BootstrapReport>, c: f64, u0_l3: f64) -> Result<DirectSummary> {
    Ok(DirectSummary {
        ess: ess_monitor(mon, boot.map(|b| b.m_v))?,
        energy_max_relative_residual: mon.max_relative_energy_residual(),
        energy_inequality_holds: mon.energy_inequality_holds(10.0),
        max_divergence: mon.divergence.iter().fold(0.0, |a: f64, b| a.max(*b)),
        weighted_decay_holds: boot.map(|b| weighted_decay_holds(mon, b.k, c, u0_l3)),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Thm22Report {
    pub scenario: String,
    pub calibration_hash: String,
    pub c_cal: f64,
    pub t_final: f64,
    pub scaling: ScalingParams,
    pub scaling_variant: ScalingVariant,
    pub label: String,
    pub conditions: Vec<ConditionReport>,
    pub bootstrap: Option<BootstrapReport>,
    pub bootstrap_error: Option<String>,
    pub largeness: LargenessLedger,
    pub mild: MildSummary,
    pub direct: DirectSummary,
}

fn bootstrap_inputs(inputs: &ConditionInputs, u0_l3: f64, c: f64) -> BootstrapInputs {
    BootstrapInputs {
        w0_l3: inputs.w0_l3.unwrap_or(0.0),
        u0_lq: inputs.u0_lq.unwrap_or(0.0),
        grad_u0_l3: inputs.grad_u0_l3.unwrap_or(0.0),
        u0_l3,
        t_final: inputs.t_final,
        constant: c,
    }
}

pub fn run_thm22(cfg: &RunConfig, cal: &Calibration) -> Result<Outcome<Thm22Report>> {
    let t_final = cfg.stepper.t_final;
    if !(t_final > 1.0) {
        return Err(NsxError::Config(format!("thm22 needs t_final > 1, got {t_final}")));
    }
    let c = cal.universal()?;
    let datum = build_datum(cfg)?;
    let inputs = ConditionInputs::from_fields(datum.u0(), datum.w0(), cfg.exponent_q, t_final)?;
    let conds = conditions(
        &[ConditionId::StokesSmallness, ConditionId::PerturbationSmallness],
        &inputs,
        cfg,
        cal,
    )?;
    let in_hyp = conds.iter().all(|r| r.pass);
    let u0_l3 = datum.parts.u0_l3;
    let (bootstrap, bootstrap_error) = match bootstrap_constants(&bootstrap_inputs(&inputs, u0_l3, c)) {
        Ok(b) => (Some(b), None),
        Err(e) => (None, Some(e.to_string())),
    };

    let direct = evolve(datum.v0(), cfg.mollifier, &cfg.stepper, &evolve_options(cfg))?;

    let grid = cfg.duhamel_grid()?;
    let picard = picard_solve_w(datum.u0(), datum.w0(), &grid, &cfg.picard_config(bootstrap.map(|b| b.k)));
    let mild = match &picard {
        Ok(st) => {
            let v_mild = heat_propagate(datum.u0(), t_final)?.try_add(st.final_field())?;
            MildSummary {
                converged: true,
                iterations: st.iterate_index,
                residual_history: st.residual_history.clone(),
                contraction_ratios: st.contraction_ratios(),
                in_k_ball: st.in_k_ball,
                max_weighted_lq: st.weighted_lq.iter().fold(0.0, |a: f64, b| a.max(*b)),
                max_weighted_grad_l3: st.weighted_grad_l3.iter().fold(0.0, |a: f64, b| a.max(*b)),
                final_gap_to_direct: Some(v_mild.relative_l2_distance(&direct.final_state)?),
                error: None,
            }
        }
        Err(e) => MildSummary {
            converged: false,
            iterations: 0,
            residual_history: Vec::new(),
            contraction_ratios: Vec::new(),
            in_k_ball: None,
            max_weighted_lq: f64::NAN,
            max_weighted_grad_l3: f64::NAN,
            final_gap_to_direct: None,
            error: Some(e.to_string()),
        },
    };

    let report = Thm22Report {
        scenario: "thm22".into(),
        calibration_hash: cal.hash(),
        c_cal: c,
        t_final,
        scaling: datum.params,
        scaling_variant: cfg.scaling_variant,
        label: label(in_hyp),
        conditions: conds,
        bootstrap,
        bootstrap_error,
        largeness: LargenessLedger::of(&datum),
        mild,
        direct: direct_summary(&direct.monitor, bootstrap.as_ref(), c, u0_l3)?,
    };
    let mut snapshots = vec![
        ("v0".to_string(), datum.v0().clone()),
        ("final".to_string(), direct.final_state.clone()),
    ];
    for (i, s) in direct.snapshots.iter().enumerate() {
        snapshots.push((format!("t{i:03}"), s.clone()));
    }
    Ok(Outcome {
        report,
        artifacts: Artifacts {
            monitors: vec![("v".into(), direct.monitor)],
            picard: picard.ok(),
            snapshots,
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Thm23Report {
    pub scenario: String,
    pub calibration_hash: String,
    pub c_cal: f64,
    pub t_final: f64,
    pub horizon: f64,
    pub scaling: ScalingParams,
    pub scaling_variant: ScalingVariant,
    pub label: String,
    pub conditions: Vec<ConditionReport>,
    /// Radius (1 - sqrt(1 - 4C²||w0||_3)) / (2C) of the small-data bound.
    pub small_data_radius: Option<f64>,
    /// sup over [0, T] of ||w||_3 stays below that radius.
    pub small_data_bound_holds: Option<bool>,
    pub t_star: TStarReport,
    pub v_l3_at_t_star: Option<f64>,
    pub t_star_threshold: f64,
    pub t_star_bound_holds: Option<bool>,
    pub sup_l3_after_t_star: Option<f64>,
    pub continuation_threshold: f64,
    pub continuation_holds: Option<bool>,
    pub smoothness: SmoothnessVerdict,
    pub energy_max_relative_residual: f64,
    pub statement: String,
}

/// (1 - sqrt(1 - 4C²a)) / (2C), the smaller fixed point of the quadratic
/// bound for data of L^3 size a; None when it is not real.
pub fn small_data_radius(a: f64, c: f64) -> Option<f64> {
    let inner = 1.0 - 4.0 * c * c * a;
    (inner >= 0.0).then(|| (1.0 - inner.sqrt()) / (2.0 * c))
}

pub fn run_thm23(cfg: &RunConfig, cal: &Calibration) -> Result<Outcome<Thm23Report>> {
    let t_final = cfg.stepper.t_final;
    if !(t_final > 0.0 && t_final < 1.0) {
        return Err(NsxError::Config(format!("thm23 needs 0 < t_final < 1, got {t_final}")));
    }
    let c = cal.universal()?;
    let datum = build_datum(cfg)?;
    let mut inputs = ConditionInputs::from_fields(datum.u0(), datum.w0(), cfg.exponent_q, t_final)?;
    let mut conds = conditions(
        &[ConditionId::GlobalPerturbation, ConditionId::StokesEnergy, ConditionId::BallRadius],
        &inputs,
        cfg,
        cal,
    )?;
    let split = evolve_split(datum.u0(), datum.w0(), cfg.mollifier, &cfg.stepper, &evolve_options(cfg))?;
    inputs.max_w_l3 = split.w.monitor.l3.iter().copied().reduce(f64::max);
    conds.push(check_condition(ConditionId::PerturbationTrajectory, &inputs, cfg.threshold_theta, cal)?);
    let in_hyp = conds.iter().all(|r| r.pass);

    let w0_l3 = datum.parts.w0_l3;
    let small_data_radius = small_data_radius(w0_l3, c);
    let small_data_bound_holds = small_data_radius.map(|k| split.w.monitor.l3.iter().all(|l| *l < k));

    let t_star = find_t_star(&split.u.monitor, t_final, c)?;
    let v_mon = &split.v.monitor;
    let v_l3_at_t_star = t_star
        .t_star
        .and_then(|ts| v_mon.times.iter().position(|t| *t == ts).map(|i| v_mon.l3[i]));
    let t_star_threshold = 1.0 / (4.0 * c);
    let continuation = continue_run(&split.v.final_state, cfg, cfg.horizon())?;
    let continuation_threshold = 1.0 / (2.0 * c);
    let sup_after = t_star.t_star.map(|ts| {
        let a = sup_l3_after(v_mon, ts).unwrap_or(0.0);
        let b = sup_l3_after(&continuation.monitor, ts).unwrap_or(0.0);
        a.max(b)
    });
    let continuation_holds = sup_after.map(|s| s <= continuation_threshold);
    let (s1, s2) = (smoothness_proxy(v_mon), smoothness_proxy(&continuation.monitor));
    let smoothness = SmoothnessVerdict {
        finite: s1.finite && s2.finite,
        gradient_envelope_ok: s1.gradient_envelope_ok
            && continuation.monitor.grad_l2.iter().all(|g| *g <= 10.0 * v_mon.grad_l2[0]),
        max_tail_fraction: s1.max_tail_fraction.max(s2.max_tail_fraction),
        tail_ok: s1.tail_ok && s2.tail_ok,
        pass: false,
    };
    let smoothness = SmoothnessVerdict {
        pass: smoothness.finite && smoothness.gradient_envelope_ok && smoothness.tail_ok,
        ..smoothness
    };
    let chain_ok = v_l3_at_t_star.map(|l| l < t_star_threshold).unwrap_or(false) && continuation_holds.unwrap_or(false);
    let statement = if chain_ok {
        format!(
            "the computed trajectory satisfies the late-time bound chain on [{t_final}, {}]",
            cfg.horizon()
        )
    } else {
        "the computed trajectory does not complete the late-time bound chain".to_string()
    };
    let report = Thm23Report {
        scenario: "thm23".into(),
        calibration_hash: cal.hash(),
        c_cal: c,
        t_final,
        horizon: cfg.horizon(),
        scaling: datum.params,
        scaling_variant: cfg.scaling_variant,
        label: label(in_hyp),
        conditions: conds,
        small_data_radius,
        small_data_bound_holds,
        t_star_bound_holds: v_l3_at_t_star.map(|l| l < t_star_threshold),
        t_star,
        v_l3_at_t_star,
        t_star_threshold,
        sup_l3_after_t_star: sup_after,
        continuation_threshold,
        continuation_holds,
        smoothness,
        energy_max_relative_residual: v_mon
            .max_relative_energy_residual()
            .max(continuation.monitor.max_relative_energy_residual()),
        statement,
    };
    Ok(Outcome {
        report,
        artifacts: Artifacts {
            monitors: vec![
                ("v".into(), split.v.monitor),
                ("w".into(), split.w.monitor),
                ("u".into(), split.u.monitor),
                ("continuation".into(), continuation.monitor),
            ],
            picard: None,
            snapshots: vec![
                ("v0".into(), datum.v0().clone()),
                ("t_final".into(), split.v.final_state),
                ("horizon".into(), continuation.final_state),
            ],
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Thm52Report {
    pub scenario: String,
    pub calibration_hash: String,
    pub c_cal: f64,
    pub t_final: f64,
    pub horizon: f64,
    pub label: String,
    pub conditions: Vec<ConditionReport>,
    pub assumption_a: AssumptionAReport,
    /// inf over [T/2, T] of ||v||_3 from the dense samples, for comparison
    /// with the chain.
    pub t_star: Option<f64>,
    pub v_l3_at_t_star: Option<f64>,
    pub t_star_threshold: f64,
    pub sup_l3_after_t_final: Option<f64>,
    pub continuation_threshold: f64,
    pub continuation_holds: Option<bool>,
    pub smoothness: SmoothnessVerdict,
}

pub fn run_thm52(cfg: &RunConfig, cal: &Calibration) -> Result<Outcome<Thm52Report>> {
    let t_final = cfg.stepper.t_final;
    if !(t_final > 1.0) {
        return Err(NsxError::Config(format!("thm52 needs t_final > 1, got {t_final}")));
    }
    let c = cal.universal()?;
    let datum = build_datum(cfg)?;
    let inputs = ConditionInputs::from_fields(datum.u0(), datum.w0(), cfg.exponent_q, t_final)?;
    let conds = conditions(
        &[ConditionId::StokesSmallness, ConditionId::PerturbationSmallness],
        &inputs,
        cfg,
        cal,
    )?;
    let direct = evolve(datum.v0(), cfg.mollifier, &cfg.stepper, &evolve_options(cfg))?;
    let mon = &direct.monitor;
    let assumption_a = assumption_a_monitor(mon, t_final, cfg.eps_a, c)?;
    let t_star_threshold = 1.0 / (4.0 * c);
    let hit = mon
        .times
        .iter()
        .zip(&mon.l3)
        .find(|(t, l)| **t > mon.times[0] && **t <= mon.times[0] + t_final + 1e-12 && **l < t_star_threshold);
    let continuation_threshold = 1.0 / (2.0 * c);
    let continuation = continue_run(&direct.final_state, cfg, cfg.horizon())?;
    let sup_after = sup_l3_after(&continuation.monitor, t_final);
    let s1 = smoothness_proxy(mon);
    let s2 = smoothness_proxy(&continuation.monitor);
    let smoothness = SmoothnessVerdict {
        finite: s1.finite && s2.finite,
        gradient_envelope_ok: s1.gradient_envelope_ok,
        max_tail_fraction: s1.max_tail_fraction.max(s2.max_tail_fraction),
        tail_ok: s1.tail_ok && s2.tail_ok,
        pass: s1.pass && s2.finite && s2.tail_ok,
    };
    let report = Thm52Report {
        scenario: "thm52".into(),
        calibration_hash: cal.hash(),
        c_cal: c,
        t_final,
        horizon: cfg.horizon(),
        label: label(conds.iter().all(|r| r.pass) && assumption_a.holds),
        conditions: conds,
        assumption_a,
        t_star: hit.map(|(t, _)| *t),
        v_l3_at_t_star: hit.map(|(_, l)| *l),
        t_star_threshold,
        sup_l3_after_t_final: sup_after,
        continuation_threshold,
        continuation_holds: sup_after.map(|s| s <= continuation_threshold),
        smoothness,
    };
    Ok(Outcome {
        report,
        artifacts: Artifacts {
            monitors: vec![("v".into(), direct.monitor), ("continuation".into(), continuation.monitor)],
            picard: None,
            snapshots: vec![
                ("v0".into(), datum.v0().clone()),
                ("t_final".into(), direct.final_state),
                ("horizon".into(), continuation.final_state),
            ],
        },
    })
}

/// ||f||_3 by direct sampling.
pub fn l3(f: &SpectralVectorField) -> Result<f64> {
    FieldSamples::of(f).lp(3.0)
}
