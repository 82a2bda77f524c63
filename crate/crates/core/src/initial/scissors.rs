//! The two-scale construction: split a datum into a Stokes part and a
//! perturbation, then rescale the parts independently.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::norms::{besov_caloric_norm, geometric_times, scale_field, FieldSamples, ScalingParams};
use crate::spectral::SpectralVectorField;

/// theta0 = u0 + w0 with w0 = eps * theta0.
pub fn scissors_split(
    theta0: &SpectralVectorField,
    params: &ScalingParams,
) -> Result<(SpectralVectorField, SpectralVectorField)> {
    params.validate()?;
    let w0 = theta0.scaled(params.split_fraction);
    let u0 = theta0.try_sub(&w0)?;
    Ok((u0, w0))
}

/// Norms that measure how large a datum is in critical and non-critical
/// senses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SizeLedger {
    pub l2: f64,
    pub l3: f64,
    pub l6: f64,
    pub grad_l2: f64,
    pub caloric: f64,
}

/// Time grid for the caloric proxy: 40 points with ratio sqrt(2) from 1e-3.
pub fn default_caloric_times() -> Vec<f64> {
    geometric_times(1e-3, std::f64::consts::SQRT_2, 40)
}

pub fn size_ledger(f: &SpectralVectorField) -> Result<SizeLedger> {
    let s = FieldSamples::of(f);
    Ok(SizeLedger {
        l2: f.l2_parseval(),
        l3: s.lp(3.0)?,
        l6: s.lp(6.0)?,
        grad_l2: f.grad_l2_parseval(),
        caloric: besov_caloric_norm(f, &default_caloric_times())?,
    })
}

#[derive(Debug, Clone)]
pub struct ScissorsOutcome {
    pub v0: SpectralVectorField,
    pub u0: SpectralVectorField,
    pub w0: SpectralVectorField,
    pub u0_l3: f64,
    pub w0_l3: f64,
    pub v0_l3: f64,
    /// ||v0||_3 <= ||u0||_3 + ||w0||_3.
    pub triangle_holds: bool,
    pub v0_sizes: SizeLedger,
}

fn assemble(u0: SpectralVectorField, w0: SpectralVectorField) -> Result<ScissorsOutcome> {
    let v0 = u0.try_add(&w0)?;
    let u0_l3 = FieldSamples::of(&u0).lp(3.0)?;
    let w0_l3 = FieldSamples::of(&w0).lp(3.0)?;
    let v0_sizes = size_ledger(&v0)?;
    Ok(ScissorsOutcome {
        triangle_holds: v0_sizes.l3 <= (u0_l3 + w0_l3) * (1.0 + 1e-12),
        v0_l3: v0_sizes.l3,
        v0,
        u0,
        w0,
        u0_l3,
        w0_l3,
        v0_sizes,
    })
}

/// v0 = u0^{lambda_tilde} + w0^{lambda_hat}.
pub fn apply_scissors_scaling(
    u0: &SpectralVectorField,
    w0: &SpectralVectorField,
    params: &ScalingParams,
) -> Result<ScissorsOutcome> {
    params.validate()?;
    assemble(scale_field(u0, params.lambda_tilde)?, scale_field(w0, params.lambda_hat)?)
}

/// Second route: v0 = u_tilde^{lambda_tilde} + eps * w_tilde^{lambda_hat}
/// from two independent seeds.
pub fn two_seed_construction(
    u_tilde: &SpectralVectorField,
    w_tilde: &SpectralVectorField,
    params: &ScalingParams,
) -> Result<ScissorsOutcome> {
    params.validate()?;
    let u0 = scale_field(u_tilde, params.lambda_tilde)?;
    let w0 = scale_field(w_tilde, params.lambda_hat)?.scaled(params.split_fraction);
    assemble(u0, w0)
}
