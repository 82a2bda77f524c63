use serde::{Deserialize, Serialize};

use crate::error::{NsxError, Result};
use crate::numerics::CompensatedSum;
use crate::spectral::fft;
use crate::spectral::wavenumbers::wavenumbers;
use crate::spectral::{GridSpec, ScalarField, SpectralVectorField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quadrature {
    TrapezoidPeriodic,
}

/// A single Lebesgue norm value. `exponent` is `f64::INFINITY` for the sup norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub exponent: f64,
    pub value: f64,
    pub grid: GridSpec,
    pub quadrature: Quadrature,
}

pub fn validate_exponent(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        return Err(NsxError::InvalidExponent(format!("Lebesgue exponent must be >= 1, got {p}")));
    }
    Ok(())
}

/// L^p norm of pointwise magnitudes sampled on the grid.
pub fn lp_of_samples(magnitudes: &[f64], p: f64, cell_volume: f64) -> Result<f64> {
    validate_exponent(p)?;
    if p.is_infinite() {
        return Ok(magnitudes.iter().copied().fold(0.0, f64::max));
    }
    let mut acc = CompensatedSum::new();
    if p == 2.0 {
        for &m in magnitudes {
            acc.add(m * m);
        }
    } else {
        for &m in magnitudes {
            if m > 0.0 {
                acc.add(m.powf(p));
            }
        }
    }
    Ok((cell_volume * acc.value()).powf(1.0 / p))
}

/// Pointwise Euclidean magnitudes of a vector (or Frobenius norms of a
/// tensor) given component samples.
pub fn magnitudes(components: &[Vec<f64>]) -> Vec<f64> {
    let len = components[0].len();
    (0..len)
        .map(|i| components.iter().map(|c| c[i] * c[i]).sum::<f64>().sqrt())
        .collect()
}

/// Physical samples of a field with cached magnitudes, so several norms can
/// share one set of transforms.
#[derive(Debug, Clone)]
pub struct FieldSamples {
    pub grid: GridSpec,
    pub magnitude: Vec<f64>,
}

impl FieldSamples {
    pub fn of(f: &SpectralVectorField) -> Self {
        let phys = f.to_physical();
        Self {
            grid: *f.grid(),
            magnitude: magnitudes(&phys),
        }
    }

    /// Frobenius magnitude of the gradient tensor.
    pub fn of_gradient(f: &SpectralVectorField) -> Self {
        Self {
            grid: *f.grid(),
            magnitude: magnitudes(&gradient_tensor(f)),
        }
    }

    pub fn lp(&self, p: f64) -> Result<f64> {
        lp_of_samples(&self.magnitude, p, self.grid.cell_volume())
    }
}

/// The nine physical components d_j f_i, ordered (i, j) row-major.
pub fn gradient_tensor(f: &SpectralVectorField) -> Vec<Vec<f64>> {
    let g = f.grid();
    let w = wavenumbers(g);
    let mut out = Vec::with_capacity(9);
    let mut buf = vec![num_complex::Complex64::new(0.0, 0.0); g.spectral_len()];
    for i in 0..3 {
        let fi = f.component(i);
        for j in 0..3 {
            for (idx, b) in buf.iter_mut().enumerate() {
                *b = num_complex::Complex64::new(0.0, w.k_eff[idx][j]) * fi[idx];
            }
            out.push(fft::inverse(g.n(), &buf));
        }
    }
    out
}

pub fn lp_norm(f: &SpectralVectorField, p: f64) -> Result<NormReport> {
    validate_exponent(p)?;
    let value = FieldSamples::of(f).lp(p)?;
    Ok(NormReport {
        exponent: p,
        value,
        grid: *f.grid(),
        quadrature: Quadrature::TrapezoidPeriodic,
    })
}

/// Convenience: the value of `lp_norm`.
pub fn lp(f: &SpectralVectorField, p: f64) -> Result<f64> {
    Ok(lp_norm(f, p)?.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GradNorms {
    pub l2: NormReport,
    pub l3: NormReport,
}

pub fn grad_norms(f: &SpectralVectorField) -> GradNorms {
    let s = FieldSamples::of_gradient(f);
    let report = |p: f64| NormReport {
        exponent: p,
        value: s.lp(p).expect("valid exponent"),
        grid: *f.grid(),
        quadrature: Quadrature::TrapezoidPeriodic,
    };
    GradNorms {
        l2: report(2.0),
        l3: report(3.0),
    }
}

/// ||grad |f|^{3/2}||_{L^2}, with |f|^{3/2} transformed and dealiased before
/// differentiation.
pub fn grad_three_halves_power_l2(f: &SpectralVectorField) -> f64 {
    let g = *f.grid();
    let s = FieldSamples::of(f);
    let powered: Vec<f64> = s.magnitude.iter().map(|m| m * m.sqrt()).collect();
    let mut scalar = ScalarField::from_physical(g, &powered, crate::spectral::ScalarRole::Diagnostic)
        .expect("sample count matches grid");
    let w = wavenumbers(&g);
    let mut acc = CompensatedSum::new();
    for (idx, z) in scalar.coefficients.iter_mut().enumerate() {
        if !w.dealias[idx] {
            continue;
        }
        acc.add(w.parseval[idx] * w.k2_eff[idx] * z.norm_sqr());
    }
    (g.volume() * acc.value()).sqrt()
}
