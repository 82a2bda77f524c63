//! Pressure recovery by a spectral Poisson solve. For a base flow v and a
//! difference field w the pressure of the difference system solves
//! -Δq = ∂i∂j(v_i w_j + w_i v_j + w_i w_j).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::initial::calibration::{Calibration, InequalityId};
use crate::norms::checks::Margin;
use crate::norms::lp::{lp_of_samples, FieldSamples};
use crate::spectral::fft;
use crate::spectral::wavenumbers::wavenumbers;
use crate::spectral::{dealias, solve_poisson, ScalarField, ScalarRole, SpectralVectorField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PressureSource {
    DifferenceSystem,
    Primal,
}

#[derive(Debug, Clone)]
pub struct PressureField {
    pub q: ScalarField,
    pub recovered_from: PressureSource,
    /// The right-hand side ∂i∂j(T_ij) the pressure was solved against.
    pub source: ScalarField,
}

/// Spectral ∂i∂j T_ij for a symmetric tensor given by its six upper entries.
fn double_divergence(grid: &crate::spectral::GridSpec, t: &[Vec<f64>; 6]) -> ScalarField {
    let w = wavenumbers(grid);
    let hats: Vec<Vec<Complex64>> = t.iter().map(|c| fft::forward(grid.n(), c)).collect();
    // (00, 01, 02, 11, 12, 22)
    let pairs = [(0, 0, 1.0), (0, 1, 2.0), (0, 2, 2.0), (1, 1, 1.0), (1, 2, 2.0), (2, 2, 1.0)];
    let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.spectral_len()];
    for (slot, &(i, j, mult)) in pairs.iter().enumerate() {
        for (idx, c) in coeffs.iter_mut().enumerate() {
            if !w.dealias[idx] {
                continue;
            }
            let k = w.k_eff[idx];
            *c -= mult * k[i] * k[j] * hats[slot][idx];
        }
    }
    ScalarField {
        grid: *grid,
        coefficients: coeffs,
        role: ScalarRole::Diagnostic,
    }
}

fn sym_products(a: &[Vec<f64>; 3], b: &[Vec<f64>; 3]) -> [Vec<f64>; 6] {
    let idx = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];
    idx.map(|(i, j)| {
        (0..a[0].len())
            .map(|x| a[i][x] * b[j][x] + a[j][x] * b[i][x])
            .collect()
    })
}

/// Solve -Δq = ∂i∂j(v_i w_j + w_i v_j + w_i w_j) with zero mean.
pub fn recover_pressure_difference(v: &SpectralVectorField, w: &SpectralVectorField) -> Result<PressureField> {
    v.ensure_same_grid(w)?;
    let grid = *v.grid();
    let vp = dealias(v).to_physical();
    let wp = dealias(w).to_physical();
    let mut t = sym_products(&vp, &wp);
    let ww = sym_products(&wp, &wp);
    for (ti, wi) in t.iter_mut().zip(&ww) {
        for (a, b) in ti.iter_mut().zip(wi) {
            *a += 0.5 * b;
        }
    }
    let source = double_divergence(&grid, &t);
    Ok(PressureField {
        q: solve_poisson(&source, ScalarRole::Pressure),
        recovered_from: PressureSource::DifferenceSystem,
        source,
    })
}

/// Solve -Δp = ∂i∂j(v_i v_j).
pub fn recover_pressure(v: &SpectralVectorField) -> PressureField {
    let grid = *v.grid();
    let vp = dealias(v).to_physical();
    let mut t = sym_products(&vp, &vp);
    for ti in t.iter_mut() {
        for a in ti.iter_mut() {
            *a *= 0.5;
        }
    }
    let source = double_divergence(&grid, &t);
    PressureField {
        q: solve_poisson(&source, ScalarRole::Pressure),
        recovered_from: PressureSource::Primal,
        source,
    }
}

/// Largest mismatch between -Δq and the source, relative to the source.
pub fn poisson_residual(p: &PressureField) -> f64 {
    let w = wavenumbers(&p.q.grid);
    let mut num: f64 = 0.0;
    let mut den: f64 = 0.0;
    for idx in 1..p.q.coefficients.len() {
        let lhs = w.k2_eff[idx] * p.q.coefficients[idx];
        num = num.max((lhs - p.source.coefficients[idx]).norm());
        den = den.max(p.source.coefficients[idx].norm());
    }
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// (||q||_{5/2}, ||w||_5 (||w||_5 + ||v||_5)).
pub fn calderon_zygmund_parts(v: &SpectralVectorField, w: &SpectralVectorField) -> Result<(f64, f64)> {
    let p = recover_pressure_difference(v, w)?;
    let q_phys: Vec<f64> = p.q.to_physical().iter().map(|x| x.abs()).collect();
    let q_norm = lp_of_samples(&q_phys, 2.5, v.grid().cell_volume())?;
    let w5 = FieldSamples::of(w).lp(5.0)?;
    let v5 = FieldSamples::of(v).lp(5.0)?;
    Ok((q_norm, w5 * (w5 + v5)))
}

pub fn calderon_zygmund_ratio(v: &SpectralVectorField, w: &SpectralVectorField) -> Result<Option<f64>> {
    let (lhs, rhs) = calderon_zygmund_parts(v, w)?;
    Ok(if rhs > 0.0 { Some(lhs / rhs) } else { None })
}

/// ||q||_{5/2} <= C ||w||_5 (||w||_5 + ||v||_5) with the calibrated constant.
pub fn calderon_zygmund_check(v: &SpectralVectorField, w: &SpectralVectorField, cal: &Calibration) -> Result<Margin> {
    let c = cal.constant(InequalityId::CalderonZygmund)?;
    let (lhs, rhs) = calderon_zygmund_parts(v, w)?;
    Ok(Margin::new(lhs, c * rhs))
}
