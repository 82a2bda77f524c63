use serde::{Deserialize, Serialize};

use crate::error::{NsxError, Result};
use crate::spectral::SpectralVectorField;

/// Knobs of the two-scale construction: the large scale applied to the
/// Stokes part, the second scale applied to the perturbation, and the
/// fraction of the datum assigned to the perturbation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingParams {
    pub lambda_tilde: f64,
    pub lambda_hat: f64,
    pub split_fraction: f64,
}

impl Default for ScalingParams {
    fn default() -> Self {
        Self {
            lambda_tilde: 1.0,
            lambda_hat: 1.0,
            split_fraction: 0.5,
        }
    }
}

impl ScalingParams {
    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| x > 0.0 && x.is_finite();
        if !ok(self.lambda_tilde) || !ok(self.lambda_hat) {
            return Err(NsxError::InvalidArgument("scaling factors must be positive".into()));
        }
        if !(self.split_fraction > 0.0 && self.split_fraction <= 1.0) {
            return Err(NsxError::InvalidArgument(format!(
                "split fraction must lie in (0, 1], got {}",
                self.split_fraction
            )));
        }
        Ok(())
    }
}

/// Exponents for the bilinear estimate ||P(a . grad b)||_p <= C ||a||_r ||grad b||_s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentTriple {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub s: f64,
}

impl ExponentTriple {
    /// The standard choice r = q, s = 3, 1/p = 1/q + 1/3.
    pub fn for_q(q: f64) -> Result<Self> {
        if !(q > 3.0 && q.is_finite()) {
            return Err(NsxError::InvalidExponent(format!("q must satisfy 3 < q < inf, got {q}")));
        }
        let p = 1.0 / (1.0 / q + 1.0 / 3.0);
        Ok(Self { p, q, r: q, s: 3.0 })
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 1.0 && self.p <= self.q && self.q.is_finite()) {
            return Err(NsxError::InvalidExponent(format!(
                "need 1 < p <= q < inf, got p={}, q={}",
                self.p, self.q
            )));
        }
        if (1.0 / self.p - 1.0 / self.r - 1.0 / self.s).abs() > 1e-12 {
            return Err(NsxError::InvalidExponent(format!(
                "Hölder relation 1/p = 1/r + 1/s violated: p={}, r={}, s={}",
                self.p, self.r, self.s
            )));
        }
        Ok(())
    }
}

/// lambda * f(lambda x), evaluated exactly from the analytic description
/// carried by `f`.
pub fn scale_field(f: &SpectralVectorField, lambda: f64) -> Result<SpectralVectorField> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(NsxError::InvalidArgument(format!("scale must be positive, got {lambda}")));
    }
    let seeds = f.provenance().ok_or(NsxError::NotAnalytic)?;
    let limit = f.grid().box_length / 4.0;
    let radius = seeds.max_radius() / lambda;
    if radius > limit {
        return Err(NsxError::ScaleOutOfBox { radius, limit });
    }
    Ok(seeds.rescaled(lambda).realize(f.grid())?.with_time_tag(f.time_tag()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::initial::seed::{make_divfree_seed, SeedSpec};
    use crate::spectral::GridSpec;

    #[test]
    fn unit_scale_is_identity() {
        let g = GridSpec::new(16, 8.0).unwrap();
        let f = make_divfree_seed(&SeedSpec::gaussian_curl(0.8, 1.0), &g).unwrap();
        let s = scale_field(&f, 1.0).unwrap();
        assert!(s.relative_l2_distance(&f).unwrap() < 1e-15);
    }

    #[test]
    fn grid_data_cannot_be_rescaled() {
        let g = GridSpec::new(16, 8.0).unwrap();
        let f = make_divfree_seed(&SeedSpec::gaussian_curl(0.8, 1.0), &g).unwrap();
        let plain = crate::spectral::leray_project(&f);
        assert_eq!(scale_field(&plain, 2.0).unwrap_err(), NsxError::NotAnalytic);
        assert!(matches!(scale_field(&f, 0.3), Err(NsxError::ScaleOutOfBox { .. })));
    }

    #[test]
    fn triple_for_q6() {
        let t = ExponentTriple::for_q(6.0).unwrap();
        assert!((t.p - 2.0).abs() < 1e-14);
        t.validate().unwrap();
        assert!(ExponentTriple::for_q(3.0).is_err());
    }
}
