//! Assembly of the two-scale datum from a run configuration.

use super::config::{RunConfig, ScalingVariant};
use crate::error::Result;
use crate::initial::{
    apply_scissors_scaling, make_divfree_seed, scissors_split, size_ledger, two_seed_construction, ScissorsOutcome,
    SizeLedger,
};
use crate::norms::ScalingParams;
use crate::spectral::SpectralVectorField;

#[derive(Debug, Clone)]
pub struct Datum {
    /// The unscaled datum the construction starts from.
    pub reference: SpectralVectorField,
    pub reference_sizes: SizeLedger,
    pub parts: ScissorsOutcome,
    pub params: ScalingParams,
}

impl Datum {
    pub fn u0(&self) -> &SpectralVectorField {
        &self.parts.u0
    }
    pub fn w0(&self) -> &SpectralVectorField {
        &self.parts.w0
    }
    pub fn v0(&self) -> &SpectralVectorField {
        &self.parts.v0
    }
}

pub fn effective_params(cfg: &RunConfig) -> ScalingParams {
    match cfg.scaling_variant {
        ScalingVariant::Distinct => cfg.scaling,
        ScalingVariant::Shared => ScalingParams {
            lambda_hat: cfg.scaling.lambda_tilde,
            ..cfg.scaling
        },
    }
}

pub fn build_datum(cfg: &RunConfig) -> Result<Datum> {
    let params = effective_params(cfg);
    let primary = make_divfree_seed(&cfg.seed.primary, &cfg.grid)?;
    let (reference, parts) = match &cfg.seed.perturbation {
        None => {
            let (u, w) = scissors_split(&primary, &params)?;
            (primary.clone(), apply_scissors_scaling(&u, &w, &params)?)
        }
        Some(spec) => {
            let second = make_divfree_seed(spec, &cfg.grid)?;
            let reference = primary.add_scaled(params.split_fraction, &second)?;
            (reference, two_seed_construction(&primary, &second, &params)?)
        }
    };
    Ok(Datum {
        reference_sizes: size_ledger(&reference)?,
        reference,
        parts,
        params,
    })
}
