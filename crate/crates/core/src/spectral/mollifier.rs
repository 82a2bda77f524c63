use serde::{Deserialize, Serialize};

use super::fft;
use super::field::SpectralVectorField;
use super::grid::GridSpec;
use crate::error::{NsxError, Result};
use crate::numerics::compensated_sum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum MollifierProfile {
    #[default]
    Bump,
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MollifierSpec {
    pub width: f64,
    #[serde(default)]
    pub profile: MollifierProfile,
}

impl MollifierSpec {
    pub fn bump(width: f64) -> Self {
        Self {
            width,
            profile: MollifierProfile::Bump,
        }
    }

    pub fn gaussian(width: f64) -> Self {
        Self {
            width,
            profile: MollifierProfile::Gaussian,
        }
    }

    fn profile_at(&self, r: f64) -> f64 {
        let s = r / self.width;
        match self.profile {
            MollifierProfile::Bump => {
                if s < 1.0 {
                    (-1.0 / (1.0 - s * s)).exp()
                } else {
                    0.0
                }
            }
            MollifierProfile::Gaussian => (-s * s).exp(),
        }
    }
}

/// Grid samples of the kernel centred on index 0 with minimum-image
/// distances, normalized to unit mass under the grid quadrature.
pub fn sampled_kernel(spec: &MollifierSpec, grid: &GridSpec) -> Result<Vec<f64>> {
    let h = grid.spacing();
    if !(spec.width.is_finite() && spec.width >= 2.0 * h) {
        return Err(NsxError::UnderresolvedMollifier {
            width: spec.width,
            min: 2.0 * h,
        });
    }
    let n = grid.n();
    let image = |j: usize| -> f64 {
        let m = if j <= n / 2 { j as f64 } else { j as f64 - n as f64 };
        m * h
    };
    let mut values = Vec::with_capacity(grid.physical_len());
    for i0 in 0..n {
        let d0 = image(i0);
        for i1 in 0..n {
            let d1 = image(i1);
            for i2 in 0..n {
                let d2 = image(i2);
                values.push(spec.profile_at((d0 * d0 + d1 * d1 + d2 * d2).sqrt()));
            }
        }
    }
    let mass = grid.cell_volume() * compensated_sum(values.iter().copied());
    for v in values.iter_mut() {
        *v /= mass;
    }
    Ok(values)
}

/// Precomputed Fourier multiplier of rho_eps on a grid.
#[derive(Debug, Clone)]
pub struct Mollifier {
    pub spec: MollifierSpec,
    pub grid: GridSpec,
    multiplier: Vec<f64>,
}

impl Mollifier {
    pub fn new(spec: MollifierSpec, grid: GridSpec) -> Result<Self> {
        let kernel = sampled_kernel(&spec, &grid)?;
        let coeffs = fft::forward(grid.n(), &kernel);
        // convolution multiplier is L^3 times the series coefficient; the
        // kernel is even, so it is real
        let vol = grid.volume();
        let mut multiplier: Vec<f64> = coeffs.iter().map(|z| vol * z.re).collect();
        multiplier[0] = 1.0;
        Ok(Self {
            spec,
            grid,
            multiplier,
        })
    }

    pub fn multiplier(&self) -> &[f64] {
        &self.multiplier
    }

    pub fn apply(&self, f: &SpectralVectorField) -> Result<SpectralVectorField> {
        if *f.grid() != self.grid {
            return Err(NsxError::GridMismatch);
        }
        Ok(f.apply_multiplier(&self.multiplier).with_time_tag(f.time_tag()))
    }
}

/// rho_eps * f.
pub fn mollify(f: &SpectralVectorField, spec: &MollifierSpec) -> Result<SpectralVectorField> {
    Mollifier::new(*spec, *f.grid())?.apply(f)
}
