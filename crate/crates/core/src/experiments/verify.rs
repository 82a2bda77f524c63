//! The static inequality suite: heat-kernel bounds on random fields,
//! calibrated constants on their corpus, and beta identities.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use crate::error::Result;
use crate::initial::calibration::{corpus_element, element_ratios, HEAT_EXPONENT_PAIRS, HEAT_TIMES};
use crate::initial::random::{element_rng, random_bandlimited};
use crate::initial::{Calibration, InequalityId};
use crate::mild::{beta_function, small_ball_beta_pairs};
use crate::norms::prop31_check;
use crate::numerics::adaptive_gauss_kronrod;
use crate::spectral::GridSpec;

pub const BETA_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatSuite {
    pub fields: usize,
    pub checks: usize,
    pub violations: usize,
    pub max_heat_ratio: f64,
    pub max_grad_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibratedRow {
    pub inequality: InequalityId,
    pub constant: f64,
    pub max_ratio: f64,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaRow {
    pub a: f64,
    pub b: f64,
    pub closed_form: f64,
    pub quadrature: f64,
    pub relative_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub scenario: String,
    pub calibration_hash: String,
    pub heat: HeatSuite,
    pub calibrated: Vec<CalibratedRow>,
    pub beta: Vec<BetaRow>,
    pub pass: bool,
}

/// Heat-kernel bounds with exact kernel norms on `count` random fields.
pub fn heat_suite(grid: &GridSpec, count: usize, rng_seed: u64) -> Result<HeatSuite> {
    let per_field: Vec<(usize, f64, f64)> = (0..count)
        .into_par_iter()
        .map(|i| {
            let f = random_bandlimited(grid, &mut element_rng(rng_seed, i as u64), 4);
            let mut bad = 0;
            let (mut mh, mut mg) = (0.0f64, 0.0f64);
            for &(p, q) in &HEAT_EXPONENT_PAIRS {
                for &t in &HEAT_TIMES {
                    let o = prop31_check(&f, p, q, t)?;
                    if !o.pass() {
                        bad += 1;
                    }
                    mh = mh.max(o.heat.ratio);
                    mg = mg.max(o.grad.ratio);
                }
            }
            Ok((bad, mh, mg))
        })
        .collect::<Result<_>>()?;
    Ok(HeatSuite {
        fields: count,
        checks: count * HEAT_EXPONENT_PAIRS.len() * HEAT_TIMES.len(),
        violations: per_field.iter().map(|r| r.0).sum(),
        max_heat_ratio: per_field.iter().map(|r| r.1).fold(0.0, f64::max),
        max_grad_ratio: per_field.iter().map(|r| r.2).fold(0.0, f64::max),
    })
}

/// Re-evaluates every calibrated inequality on the calibration corpus.
pub fn calibrated_suite(cal: &Calibration, corpus_seed: u64, grid: &GridSpec, size: usize) -> Result<Vec<CalibratedRow>> {
    let ratios: Vec<Vec<(InequalityId, Option<f64>)>> = (0..size)
        .into_par_iter()
        .map(|i| element_ratios(&corpus_element(corpus_seed, i, grid)?))
        .collect::<Result<_>>()?;
    InequalityId::ALL
        .iter()
        .map(|&id| {
            let constant = cal.constant(id)?;
            let vals: Vec<f64> = ratios
                .iter()
                .flat_map(|v| v.iter().filter(|(i, _)| *i == id).filter_map(|(_, r)| *r))
                .collect();
            Ok(CalibratedRow {
                inequality: id,
                constant,
                max_ratio: vals.iter().copied().fold(0.0, f64::max),
                failures: vals.iter().filter(|r| **r > constant).count(),
            })
        })
        .collect()
}

/// ∫_0^1 s^{a-1} (1-s)^{b-1} ds, split at 1/2 with the substitutions
/// s = u^{1/a} and 1 - s = u^{1/b} removing the endpoint singularities.
pub fn beta_by_quadrature(a: f64, b: f64) -> f64 {
    let half = |a: f64, b: f64| {
        let top = 0.5f64.powf(a);
        adaptive_gauss_kronrod(&|u: f64| (1.0 - u.powf(1.0 / a)).powf(b - 1.0), 0.0, top, 1e-14) / a
    };
    half(a, b) + half(b, a)
}

pub fn beta_table(q: f64) -> Result<Vec<BetaRow>> {
    small_ball_beta_pairs(q)
        .into_iter()
        .map(|(a, b)| {
            let closed_form = beta_function(a, b)?;
            let quadrature = beta_by_quadrature(a, b);
            Ok(BetaRow {
                a,
                b,
                closed_form,
                quadrature,
                relative_error: (closed_form - quadrature).abs() / closed_form,
            })
        })
        .collect()
}

pub fn run_verify(cfg: &RunConfig, cal: &Calibration) -> Result<VerifyReport> {
    let grid = GridSpec::new(cfg.verify.n_per_axis, cfg.grid.box_length)?;
    let heat = heat_suite(&grid, cfg.verify.fields, cfg.rng_seed)?;
    let calibrated = calibrated_suite(
        cal,
        cfg.calibration.corpus_seed,
        &cfg.calibration_grid()?,
        cfg.calibration.corpus_size,
    )?;
    let beta = beta_table(cfg.exponent_q)?;
    let pass = heat.violations == 0
        && calibrated.iter().all(|r| r.failures == 0)
        && beta.iter().all(|r| r.relative_error < BETA_TOLERANCE);
    Ok(VerifyReport {
        scenario: "verify".into(),
        calibration_hash: cal.hash(),
        heat,
        calibrated,
        beta,
        pass,
    })
}
