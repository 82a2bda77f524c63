//! Analytic divergence-free seeds v = curl A with Gaussian-windowed vector
//! potentials. Their Fourier coefficients are evaluated in closed form, so
//! the rescaled field lambda * v(lambda x) is again a member of the family.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{NsxError, Result};
use crate::spectral::wavenumbers::wavenumbers;
use crate::spectral::{GridSpec, SpectralVectorField};

/// Wave number of the Taylor–Green pattern in units of 1/radius.
pub const TAYLOR_GREEN_WAVENUMBER: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SeedKind {
    #[default]
    GaussianCurl,
    TaylorGreenWindowed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeedSpec {
    #[serde(default)]
    pub kind: SeedKind,
    #[serde(default)]
    pub center: [f64; 3],
    pub radius: f64,
    pub amplitude: f64,
    #[serde(default = "default_orientation")]
    pub orientation: [f64; 3],
}

fn default_orientation() -> [f64; 3] {
    [0.0, 0.0, 1.0]
}

impl SeedSpec {
    pub fn gaussian_curl(radius: f64, amplitude: f64) -> Self {
        Self {
            kind: SeedKind::GaussianCurl,
            center: [0.0; 3],
            radius,
            amplitude,
            orientation: default_orientation(),
        }
    }

    pub fn taylor_green(radius: f64, amplitude: f64) -> Self {
        Self {
            kind: SeedKind::TaylorGreenWindowed,
            ..Self::gaussian_curl(radius, amplitude)
        }
    }

    pub fn with_orientation(mut self, e: [f64; 3]) -> Self {
        self.orientation = e;
        self
    }

    pub fn with_center(mut self, c: [f64; 3]) -> Self {
        self.center = c;
        self
    }

    fn unit_orientation(&self) -> Result<[f64; 3]> {
        let e = self.orientation;
        let norm = (e[0] * e[0] + e[1] * e[1] + e[2] * e[2]).sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(NsxError::InvalidArgument("seed orientation must be a nonzero vector".into()));
        }
        Ok([e[0] / norm, e[1] / norm, e[2] / norm])
    }

    /// The seed of lambda * f(lambda x): radius and center shrink by lambda,
    /// the potential amplitude is unchanged.
    pub fn rescaled(&self, lambda: f64) -> Self {
        Self {
            center: [self.center[0] / lambda, self.center[1] / lambda, self.center[2] / lambda],
            radius: self.radius / lambda,
            ..*self
        }
    }

    /// Fourier transform over R^3 of the scalar window profile at k.
    fn profile_transform(&self, k: [f64; 3]) -> Complex64 {
        let r = self.radius;
        let gauss = |q: [f64; 3]| {
            let d2 = (k[0] - q[0]).powi(2) + (k[1] - q[1]).powi(2) + (k[2] - q[2]).powi(2);
            PI.powf(1.5) * r.powi(3) * (-0.25 * d2 * r * r).exp()
        };
        match self.kind {
            SeedKind::GaussianCurl => Complex64::new(gauss([0.0; 3]), 0.0),
            SeedKind::TaylorGreenWindowed => {
                // sin(a) sin(b) cos(c) = sum_s (-s1 s2 / 8) exp(i s.(a,b,c))
                let kap = TAYLOR_GREEN_WAVENUMBER / r;
                let mut acc = 0.0;
                for s1 in [-1.0, 1.0] {
                    for s2 in [-1.0, 1.0] {
                        for s3 in [-1.0, 1.0] {
                            acc += -s1 * s2 / 8.0 * gauss([kap * s1, kap * s2, kap * s3]);
                        }
                    }
                }
                Complex64::new(acc, 0.0)
            }
        }
    }

    /// Add weight * (this seed) into the coefficient arrays.
    fn accumulate(&self, grid: &GridSpec, weight: f64, out: &mut [Vec<Complex64>; 3]) -> Result<()> {
        let e = self.unit_orientation()?;
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(NsxError::InvalidArgument(format!("seed radius must be positive, got {}", self.radius)));
        }
        let w = wavenumbers(grid);
        let scale = weight * self.amplitude / grid.volume();
        if scale == 0.0 {
            return Ok(());
        }
        let shift = [
            self.center[0] - grid.origin(),
            self.center[1] - grid.origin(),
            self.center[2] - grid.origin(),
        ];
        for idx in 0..grid.spectral_len() {
            let m = grid.mode_indices(idx);
            if m.iter().any(|&mi| grid.is_nyquist(mi)) {
                continue;
            }
            let k = w.k[idx];
            let ke = w.k_eff[idx];
            let phase = -(k[0] * shift[0] + k[1] * shift[1] + k[2] * shift[2]);
            let a_hat = self.profile_transform(k) * Complex64::from_polar(scale, phase);
            // curl: i k x (e a_hat)
            let cross = [ke[1] * e[2] - ke[2] * e[1], ke[2] * e[0] - ke[0] * e[2], ke[0] * e[1] - ke[1] * e[0]];
            for c in 0..3 {
                out[c][idx] += Complex64::new(0.0, cross[c]) * a_hat;
            }
        }
        Ok(())
    }
}

/// A finite linear combination of analytic seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedSum {
    pub terms: Vec<(f64, SeedSpec)>,
}

impl SeedSum {
    pub fn single(spec: SeedSpec) -> Self {
        Self {
            terms: vec![(1.0, spec)],
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            terms: self.terms.iter().map(|(w, s)| (w * c, *s)).collect(),
        }
    }

    pub fn combined(&self, alpha: f64, other: &Self, beta: f64) -> Self {
        let mut terms: Vec<(f64, SeedSpec)> = self.terms.iter().map(|(w, s)| (alpha * w, *s)).collect();
        terms.extend(other.terms.iter().map(|(w, s)| (beta * w, *s)));
        Self { terms }
    }

    pub fn rescaled(&self, lambda: f64) -> Self {
        Self {
            terms: self.terms.iter().map(|(w, s)| (*w, s.rescaled(lambda))).collect(),
        }
    }

    pub fn max_radius(&self) -> f64 {
        self.terms.iter().map(|(_, s)| s.radius).fold(0.0, f64::max)
    }

    /// Evaluate the sum on a grid; the result keeps this description.
    pub fn realize(&self, grid: &GridSpec) -> Result<SpectralVectorField> {
        let mut comps = SpectralVectorField::zeros(*grid).into_components();
        for (w, s) in &self.terms {
            s.accumulate(grid, *w, &mut comps)?;
        }
        Ok(SpectralVectorField::from_components(*grid, comps, 0.0)?.with_provenance(Some(Arc::new(self.clone()))))
    }
}

/// Build the divergence-free, mean-free seed field.
pub fn make_divfree_seed(spec: &SeedSpec, grid: &GridSpec) -> Result<SpectralVectorField> {
    let limit = grid.box_length / 8.0;
    if spec.radius > limit {
        return Err(NsxError::SeedOutOfBox {
            radius: spec.radius,
            limit,
        });
    }
    SeedSum::single(*spec).realize(grid)
}
