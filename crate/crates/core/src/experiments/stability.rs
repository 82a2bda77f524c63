//! Subinterval partition of a baseline run and the geometric envelope for
//! the difference of two nearby solutions.

use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use super::data::build_datum;
use super::output::{Artifacts, Outcome};
use crate::error::{NsxError, Result};
use crate::initial::random::{element_rng, random_direction};
use crate::initial::{check_condition, make_divfree_seed, Calibration, ConditionId, ConditionInputs, ConditionReport};
use crate::leray::{evolve, evolve_pair, EvolveOptions, Trajectory, TrajectoryMonitor};
use crate::norms::FieldSamples;
use crate::numerics::trapezoid;
use crate::spectral::{leray_project, SpectralVectorField};

/// Split the sampled window into the fewest consecutive intervals whose
/// L^5-in-time-L^5 norm of `l5` stays below `limit`. Interval ends fall on
/// sample times.
pub fn partition_l5(times: &[f64], l5: &[f64], limit: f64) -> Result<Vec<f64>> {
    if times.len() < 2 || times.len() != l5.len() {
        return Err(NsxError::PartitionFailed("need at least two samples".into()));
    }
    if !(limit > 0.0 && limit.is_finite()) {
        return Err(NsxError::PartitionFailed(format!("invalid limit {limit}")));
    }
    let budget = limit.powi(5);
    let mut ends = vec![times[0]];
    let mut acc = 0.0;
    let mut start = 0;
    for j in 0..times.len() - 1 {
        let panel = 0.5 * (times[j + 1] - times[j]) * (l5[j].powi(5) + l5[j + 1].powi(5));
        if !panel.is_finite() {
            return Err(NsxError::PartitionFailed(format!("non-finite L5 mass at t = {}", times[j])));
        }
        if acc + panel >= budget {
            if j == start {
                return Err(NsxError::PartitionFailed(format!(
                    "a single step at t = {} carries L5 mass {panel:e} over the budget {budget:e}",
                    times[j]
                )));
            }
            ends.push(times[j]);
            start = j;
            acc = 0.0;
        }
        acc += panel;
    }
    ends.push(*times.last().expect("nonempty"));
    Ok(ends)
}

fn window(mon: &TrajectoryMonitor, a: f64, b: f64) -> (Vec<f64>, Vec<usize>) {
    let idx: Vec<usize> = (0..mon.len())
        .filter(|&i| mon.times[i] >= a - 1e-12 && mon.times[i] <= b + 1e-12)
        .collect();
    (idx.iter().map(|&i| mon.times[i]).collect(), idx)
}

/// (∫_a^b ||f||_5^5)^{1/5} from the sampled series.
pub fn l5l5(mon: &TrajectoryMonitor, a: f64, b: f64) -> f64 {
    let (t, idx) = window(mon, a, b);
    let y: Vec<f64> = idx.iter().map(|&i| mon.l5[i].powi(5)).collect();
    if t.len() < 2 {
        return 0.0;
    }
    trapezoid(&t, &y).powf(0.2)
}

fn sup_l3(mon: &TrajectoryMonitor, a: f64, b: f64) -> f64 {
    let (_, idx) = window(mon, a, b);
    idx.iter().map(|&i| mon.l3[i]).fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalRow {
    pub start: f64,
    pub end: f64,
    pub v_l5l5: f64,
    /// (2C)^{i+1} ||w0||_3
    pub bound: f64,
    pub w_sup_l3: f64,
    pub w_l5l5: f64,
    pub sup_within: bool,
    pub l5l5_within: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityLedger {
    pub scenario: String,
    pub calibration_hash: String,
    pub c_cal: f64,
    pub t_final: f64,
    pub partition: Vec<f64>,
    pub intervals: Vec<IntervalRow>,
    pub interval_limit: f64,
    pub partition_size: usize,
    pub perturbation_threshold: f64,
    pub perturbation_scale: f64,
    pub w0_l3: f64,
    pub condition: ConditionReport,
    pub label: String,
    pub envelope_holds: bool,
    pub sup_w_l3: f64,
    /// ||w(T)||_3
    pub final_w_l3: f64,
    /// sup_t ||w(t)||_3 / ||w0||_3, to be compared with (2C)^M.
    pub final_ratio: f64,
    pub final_constant: f64,
    pub final_holds: bool,
}

/// Perturbation shaped like the primary seed, with an rng-drawn
/// orientation, projected and rescaled to the given L^3 size.
pub fn stability_perturbation(cfg: &RunConfig, l3_size: f64) -> Result<SpectralVectorField> {
    let mut rng = element_rng(cfg.rng_seed, 0);
    let spec = cfg.seed.primary.with_orientation(random_direction(&mut rng));
    let raw = leray_project(&make_divfree_seed(&spec, &cfg.grid)?);
    let size = FieldSamples::of(&raw).lp(3.0)?;
    if !(size > 0.0) {
        return Err(NsxError::InvalidArgument("perturbation seed vanishes on the grid".into()));
    }
    Ok(raw.scaled(l3_size / size))
}

fn options(cfg: &RunConfig) -> EvolveOptions {
    EvolveOptions {
        exponent_q: cfg.exponent_q,
        snapshot_times: cfg.snapshot_times.clone(),
        ..Default::default()
    }
}

/// Evolves the baseline datum alone.
pub fn stability_baseline(cfg: &RunConfig) -> Result<Trajectory> {
    let datum = build_datum(cfg)?;
    evolve(datum.v0(), cfg.mollifier, &cfg.stepper, &options(cfg))
}

pub fn run_stability51(cfg: &RunConfig, cal: &Calibration) -> Result<Outcome<StabilityLedger>> {
    let baseline = stability_baseline(cfg)?;
    run_stability51_from(cfg, cal, &baseline, cfg.perturbation_scale)
}

/// As `run_stability51`, reusing an already computed baseline run.
pub fn run_stability51_from(
    cfg: &RunConfig,
    cal: &Calibration,
    baseline: &Trajectory,
    perturbation_scale: f64,
) -> Result<Outcome<StabilityLedger>> {
    if !(perturbation_scale >= 0.0 && perturbation_scale.is_finite()) {
        return Err(NsxError::InvalidArgument(format!(
            "perturbation scale must be nonnegative, got {perturbation_scale}"
        )));
    }
    let c = cal.universal()?;
    let mon = &baseline.monitor;
    let interval_limit = 1.0 / (4.0 * c);
    let partition = partition_l5(&mon.times, &mon.l5, interval_limit)?;
    let m = partition.len() - 1;
    let growth = 2.0 * c;
    let threshold = 1.0 / (8.0 * c * growth.powi(m as i32));
    let w0_target = perturbation_scale * threshold;
    let v0 = &baseline.initial;
    let perturbed = if w0_target > 0.0 {
        v0.try_add(&stability_perturbation(cfg, w0_target)?)?
    } else {
        v0.clone()
    };
    let pair = evolve_pair(v0, &perturbed, cfg.mollifier, &cfg.stepper, &options(cfg))?;
    let diff = &pair.difference;
    let w0_l3 = diff.l3[0];
    let inputs = ConditionInputs {
        t_final: cfg.stepper.t_final,
        w0_l3: Some(w0_l3),
        partition_intervals: Some(m),
        ..Default::default()
    };
    let condition = check_condition(ConditionId::StabilityPerturbation, &inputs, cfg.threshold_theta, cal)?;
    let intervals: Vec<IntervalRow> = partition
        .windows(2)
        .enumerate()
        .map(|(i, w)| {
            let bound = growth.powi(i as i32 + 1) * w0_l3;
            let w_sup_l3 = sup_l3(diff, w[0], w[1]);
            let w_l5l5 = l5l5(diff, w[0], w[1]);
            IntervalRow {
                start: w[0],
                end: w[1],
                v_l5l5: l5l5(mon, w[0], w[1]),
                bound,
                w_sup_l3,
                w_l5l5,
                sup_within: w_sup_l3 <= bound,
                l5l5_within: w_l5l5 <= bound,
            }
        })
        .collect();
    let envelope_holds = intervals.iter().all(|r| r.sup_within);
    let sup_w_l3 = diff.l3.iter().copied().fold(0.0, f64::max);
    let final_constant = growth.powi(m as i32);
    let final_ratio = if w0_l3 > 0.0 { sup_w_l3 / w0_l3 } else { 0.0 };
    let ledger = StabilityLedger {
        scenario: "stability51".into(),
        calibration_hash: cal.hash(),
        c_cal: c,
        t_final: cfg.stepper.t_final,
        partition,
        intervals,
        interval_limit,
        partition_size: m,
        perturbation_threshold: threshold,
        perturbation_scale,
        w0_l3,
        label: if condition.pass { "in-hypothesis" } else { "out-of-hypothesis" }.into(),
        condition,
        envelope_holds,
        sup_w_l3,
        final_w_l3: *diff.l3.last().expect("nonempty monitor"),
        final_ratio,
        final_constant,
        final_holds: sup_w_l3 <= final_constant * w0_l3,
    };
    Ok(Outcome {
        report: ledger,
        artifacts: Artifacts {
            monitors: vec![
                ("difference".into(), pair.difference),
                ("base".into(), pair.base.monitor),
                ("perturbed".into(), pair.perturbed.monitor),
            ],
            picard: None,
            snapshots: vec![
                ("v0".into(), pair.base.initial),
                ("perturbed0".into(), pair.perturbed.initial),
                ("base_final".into(), pair.base.final_state),
                ("perturbed_final".into(), pair.perturbed.final_state),
            ],
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_respects_budget() {
        let t: Vec<f64> = (0..=100).map(|i| i as f64 * 0.01).collect();
        let l5 = vec![1.0; t.len()];
        // each interval may hold mass < 0.5^5
        let p = partition_l5(&t, &l5, 0.5).unwrap();
        for w in p.windows(2) {
            assert!(w[1] - w[0] < 0.5f64.powi(5) + 1e-12);
        }
        assert_eq!(*p.last().unwrap(), 1.0);
        assert_eq!(p.len() - 1, 34);
    }

    #[test]
    fn oversized_step_is_an_error() {
        let t = [0.0, 1.0, 2.0];
        let l5 = [10.0, 10.0, 10.0];
        assert!(matches!(partition_l5(&t, &l5, 0.5), Err(NsxError::PartitionFailed(_))));
    }

    #[test]
    fn small_mass_is_one_interval() {
        let t = [0.0, 1.0, 2.0];
        let p = partition_l5(&t, &[0.01; 3], 0.5).unwrap();
        assert_eq!(p, vec![0.0, 2.0]);
    }
}
