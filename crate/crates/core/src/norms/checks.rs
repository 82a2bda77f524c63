//! Checkers for the static inequalities. Each reports the two sides and
//! their ratio instead of only a verdict.

use serde::{Deserialize, Serialize};

use super::kernel::{grad_kernel_norm, kernel_norm_exact, young_exponent};
use super::lp::{grad_three_halves_power_l2, lp, FieldSamples};
use super::scaling::ExponentTriple;
use crate::error::Result;
use crate::initial::calibration::{Calibration, InequalityId};
use crate::spectral::{heat_propagate, nonlinear_term, SpectralVectorField};

/// Outcome of checking lhs <= rhs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Margin {
    pub lhs: f64,
    pub rhs: f64,
    /// lhs / rhs, or 0 when both sides vanish.
    pub ratio: f64,
    pub pass: bool,
    pub vacuous: bool,
}

impl Margin {
    pub fn new(lhs: f64, rhs: f64) -> Self {
        if lhs == 0.0 && rhs == 0.0 {
            return Self {
                lhs,
                rhs,
                ratio: 0.0,
                pass: true,
                vacuous: true,
            };
        }
        Self {
            lhs,
            rhs,
            ratio: lhs / rhs,
            pass: lhs <= rhs,
            vacuous: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prop31Outcome {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub t: f64,
    pub heat: Margin,
    pub grad: Margin,
}

impl Prop31Outcome {
    pub fn pass(&self) -> bool {
        self.heat.pass && self.grad.pass
    }
}

/// Young's inequality for K_t * f and grad K_t * f with exact kernel norms.
pub fn prop31_check(f: &SpectralVectorField, p: f64, q: f64, t: f64) -> Result<Prop31Outcome> {
    let r = young_exponent(p, q)?;
    let k_norm = kernel_norm_exact(t, r)?;
    let gk_norm = grad_kernel_norm(t, r)?;
    let fp = lp(f, p)?;
    let heated = heat_propagate(f, t)?;
    let heat_q = lp(&heated, q)?;
    let grad_q = FieldSamples::of_gradient(&heated).lp(q)?;
    Ok(Prop31Outcome {
        p,
        q,
        r,
        t,
        heat: Margin::new(heat_q, k_norm * fp),
        grad: Margin::new(grad_q, gk_norm * fp),
    })
}

/// ||P(a . grad b)||_p <= C ||a||_r ||grad b||_s.
pub fn bilinear_bound_check(
    a: &SpectralVectorField,
    b: &SpectralVectorField,
    triple: &ExponentTriple,
    cal: &Calibration,
) -> Result<Margin> {
    triple.validate()?;
    let c = cal.constant(InequalityId::Bilinear)?;
    let parts = bilinear_parts(a, b, triple)?;
    Ok(Margin::new(parts.0, c * parts.1))
}

fn bilinear_parts(a: &SpectralVectorField, b: &SpectralVectorField, triple: &ExponentTriple) -> Result<(f64, f64)> {
    let lhs = lp(&nonlinear_term(a, b)?, triple.p)?;
    let rhs = lp(a, triple.r)? * FieldSamples::of_gradient(b).lp(triple.s)?;
    Ok((lhs, rhs))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterpolationOutcome {
    pub l3: Margin,
    pub l5: Margin,
}

/// ||f||_3 <= C ||f||_2^{1/2} ||grad f||_2^{1/2} and
/// ||f||_5 <= C ||f||_3^{2/5} ||grad |f|^{3/2}||_2^{2/5}.
pub fn interpolation_check(f: &SpectralVectorField, cal: &Calibration) -> Result<InterpolationOutcome> {
    let c3 = cal.constant(InequalityId::InterpL3)?;
    let c5 = cal.constant(InequalityId::InterpL5)?;
    let (l3_lhs, l3_rhs) = interp_l3_parts(f)?;
    let (l5_lhs, l5_rhs) = interp_l5_parts(f)?;
    Ok(InterpolationOutcome {
        l3: Margin::new(l3_lhs, c3 * l3_rhs),
        l5: Margin::new(l5_lhs, c5 * l5_rhs),
    })
}

fn interp_l3_parts(f: &SpectralVectorField) -> Result<(f64, f64)> {
    let lhs = lp(f, 3.0)?;
    let rhs = (f.l2_parseval() * f.grad_l2_parseval()).sqrt();
    Ok((lhs, rhs))
}

fn interp_l5_parts(f: &SpectralVectorField) -> Result<(f64, f64)> {
    let s = FieldSamples::of(f);
    let lhs = s.lp(5.0)?;
    let rhs = s.lp(3.0)?.powf(0.4) * grad_three_halves_power_l2(f).powf(0.4);
    Ok((lhs, rhs))
}

fn ratio(parts: (f64, f64)) -> Option<f64> {
    if parts.1 > 0.0 {
        Some(parts.0 / parts.1)
    } else {
        None
    }
}

/// t^{(3/2)(1/p - 1/q)} ||K_t * f||_q / ||f||_p.
pub fn heat_lq_ratio(f: &SpectralVectorField, p: f64, q: f64, t: f64) -> Result<Option<f64>> {
    let lhs = lp(&heat_propagate(f, t)?, q)? * t.powf(1.5 * (1.0 / p - 1.0 / q));
    Ok(ratio((lhs, lp(f, p)?)))
}

/// t^{(1 + 3/p - 3/q)/2} ||grad K_t * f||_q / ||f||_p.
pub fn heat_grad_ratio(f: &SpectralVectorField, p: f64, q: f64, t: f64) -> Result<Option<f64>> {
    let heated = heat_propagate(f, t)?;
    let lhs = FieldSamples::of_gradient(&heated).lp(q)? * t.powf(0.5 * (1.0 + 3.0 / p - 3.0 / q));
    Ok(ratio((lhs, lp(f, p)?)))
}

pub fn bilinear_ratio(a: &SpectralVectorField, b: &SpectralVectorField, triple: &ExponentTriple) -> Result<Option<f64>> {
    triple.validate()?;
    Ok(ratio(bilinear_parts(a, b, triple)?))
}

pub fn interp_l3_ratio(f: &SpectralVectorField) -> Result<Option<f64>> {
    Ok(ratio(interp_l3_parts(f)?))
}

pub fn interp_l5_ratio(f: &SpectralVectorField) -> Result<Option<f64>> {
    Ok(ratio(interp_l5_parts(f)?))
}

/// ||f||_6 / ||grad f||_2.
pub fn sobolev_ratio(f: &SpectralVectorField) -> Result<Option<f64>> {
    Ok(ratio((lp(f, 6.0)?, f.grad_l2_parseval())))
}
