use num_complex::Complex64;

use super::fft;
use super::field::{ScalarField, ScalarRole, SpectralVectorField};
use super::grid::GridSpec;
use super::wavenumbers::wavenumbers;
use crate::error::{NsxError, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// exp(-|k|^2 t) for every stored mode.
pub fn heat_multiplier(grid: &GridSpec, t: f64) -> Result<Vec<f64>> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(NsxError::InvalidTime(t));
    }
    Ok(wavenumbers(grid).k2.iter().map(|k2| (-k2 * t).exp()).collect())
}

/// Convolution with the heat kernel K_t.
pub fn heat_propagate(f: &SpectralVectorField, t: f64) -> Result<SpectralVectorField> {
    if t == 0.0 {
        return Ok(f.clone());
    }
    let m = heat_multiplier(f.grid(), t)?;
    let tag = f.time_tag() + t;
    Ok(f.apply_multiplier(&m).with_time_tag(tag))
}

/// Helmholtz–Leray projection onto divergence-free fields.
pub fn leray_project(f: &SpectralVectorField) -> SpectralVectorField {
    let w = wavenumbers(f.grid());
    let [mut a, mut b, mut c] = f.clone().into_components();
    for idx in 0..a.len() {
        let k2 = w.k2_eff[idx];
        if k2 == 0.0 {
            continue;
        }
        let k = w.k_eff[idx];
        let dot = (a[idx] * k[0] + b[idx] * k[1] + c[idx] * k[2]) / k2;
        a[idx] -= dot * k[0];
        b[idx] -= dot * k[1];
        c[idx] -= dot * k[2];
    }
    SpectralVectorField::from_components(*f.grid(), [a, b, c], f.time_tag()).expect("same grid")
}

pub fn gradient(f: &ScalarField) -> SpectralVectorField {
    let w = wavenumbers(&f.grid);
    let mut comps: [Vec<Complex64>; 3] = Default::default();
    for (axis, comp) in comps.iter_mut().enumerate() {
        *comp = f
            .coefficients
            .iter()
            .zip(&w.k_eff)
            .map(|(z, k)| I * k[axis] * z)
            .collect();
    }
    SpectralVectorField::from_components(f.grid, comps, 0.0).expect("same grid")
}

pub fn divergence(f: &SpectralVectorField) -> ScalarField {
    let w = wavenumbers(f.grid());
    let [a, b, c] = f.components();
    let coefficients = (0..a.len())
        .map(|idx| {
            let k = w.k_eff[idx];
            I * (a[idx] * k[0] + b[idx] * k[1] + c[idx] * k[2])
        })
        .collect();
    ScalarField {
        grid: *f.grid(),
        coefficients,
        role: ScalarRole::Diagnostic,
    }
}

/// Spectral Laplacian, consistent with divergence(gradient(.)).
pub fn laplacian(f: &ScalarField) -> ScalarField {
    let w = wavenumbers(&f.grid);
    ScalarField {
        grid: f.grid,
        coefficients: f.coefficients.iter().zip(&w.k2_eff).map(|(z, k2)| -k2 * z).collect(),
        role: f.role,
    }
}

/// Solve -Δq = s with zero mean.
pub fn solve_poisson(source: &ScalarField, role: ScalarRole) -> ScalarField {
    let w = wavenumbers(&source.grid);
    ScalarField {
        grid: source.grid,
        coefficients: source
            .coefficients
            .iter()
            .zip(&w.k2_eff)
            .map(|(z, &k2)| if k2 == 0.0 { Complex64::new(0.0, 0.0) } else { z / k2 })
            .collect(),
        role,
    }
}

/// Zero every mode outside the dealiasing window.
pub fn dealias(f: &SpectralVectorField) -> SpectralVectorField {
    let w = wavenumbers(f.grid());
    let m: Vec<f64> = w.dealias.iter().map(|&keep| if keep { 1.0 } else { 0.0 }).collect();
    f.apply_multiplier(&m).with_time_tag(f.time_tag())
}

/// P(a . grad b), evaluated pseudospectrally with dealiasing.
pub fn nonlinear_term(a: &SpectralVectorField, b: &SpectralVectorField) -> Result<SpectralVectorField> {
    a.ensure_same_grid(b)?;
    let grid = *a.grid();
    let n = grid.n();
    let w = wavenumbers(&grid);
    let a_phys = dealias(a).to_physical();
    let b_t = dealias(b);
    let mut out: [Vec<Complex64>; 3] = Default::default();
    let mut deriv = vec![Complex64::new(0.0, 0.0); grid.spectral_len()];
    for (i, slot) in out.iter_mut().enumerate() {
        let mut prod = vec![0.0; grid.physical_len()];
        let bi = b_t.component(i);
        for (j, aj) in a_phys.iter().enumerate() {
            for (idx, d) in deriv.iter_mut().enumerate() {
                *d = I * w.k_eff[idx][j] * bi[idx];
            }
            let dj = fft::inverse(n, &deriv);
            for ((p, x), y) in prod.iter_mut().zip(aj).zip(&dj) {
                *p += x * y;
            }
        }
        *slot = fft::forward(n, &prod);
    }
    let raw = SpectralVectorField::from_components(grid, out, a.time_tag())?;
    Ok(leray_project(&dealias(&raw)))
}

/// P(v . grad v) for divergence-free v, via the divergence form div(v ⊗ v).
/// Needs 3 inverse and 6 forward transforms instead of 12 and 3.
pub fn nonlinear_self(v: &SpectralVectorField) -> SpectralVectorField {
    let grid = *v.grid();
    let n = grid.n();
    let w = wavenumbers(&grid);
    let p = dealias(v).to_physical();
    let pair = |i: usize, j: usize| -> Vec<Complex64> {
        let prod: Vec<f64> = p[i].iter().zip(&p[j]).map(|(x, y)| x * y).collect();
        fft::forward(n, &prod)
    };
    let t00 = pair(0, 0);
    let t01 = pair(0, 1);
    let t02 = pair(0, 2);
    let t11 = pair(1, 1);
    let t12 = pair(1, 2);
    let t22 = pair(2, 2);
    let rows = [[&t00, &t01, &t02], [&t01, &t11, &t12], [&t02, &t12, &t22]];
    let mut out: [Vec<Complex64>; 3] = Default::default();
    for (i, slot) in out.iter_mut().enumerate() {
        *slot = (0..grid.spectral_len())
            .map(|idx| {
                let k = w.k_eff[idx];
                I * (k[0] * rows[i][0][idx] + k[1] * rows[i][1][idx] + k[2] * rows[i][2][idx])
            })
            .collect();
    }
    let raw = SpectralVectorField::from_components(grid, out, v.time_tag()).expect("same grid");
    leray_project(&dealias(&raw))
}

/// Largest |div f| coefficient relative to the largest |k||f| coefficient.
pub fn relative_divergence(f: &SpectralVectorField) -> f64 {
    let w = wavenumbers(f.grid());
    let d = divergence(f);
    let mut num: f64 = 0.0;
    let mut den: f64 = 0.0;
    for idx in 0..d.coefficients.len() {
        num = num.max(d.coefficients[idx].norm());
        let kk = w.k2_eff[idx].sqrt();
        for c in f.components() {
            den = den.max(kk * c[idx].norm());
        }
    }
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::field::sample_grid;
    use std::f64::consts::PI;

    fn grid() -> GridSpec {
        GridSpec::new(16, 2.0 * PI).unwrap()
    }

    #[test]
    fn projector_kills_longitudinal_mode() {
        let g = grid();
        let s = sample_grid(&g, |x| (2.0 * PI * x[0] / g.box_length).sin());
        let z = vec![0.0; g.physical_len()];
        let f = SpectralVectorField::from_physical(g, &[s, z.clone(), z]).unwrap();
        let p = leray_project(&f);
        assert!(p.l2_parseval() < 1e-13);
    }

    #[test]
    fn gradient_of_sine_is_cosine() {
        let g = GridSpec::new(16, 4.0).unwrap();
        let kk = 2.0 * PI / g.box_length;
        let s = ScalarField::from_physical(g, &sample_grid(&g, |x| (kk * x[0]).sin()), ScalarRole::Diagnostic).unwrap();
        let grad = gradient(&s).to_physical();
        let expect = sample_grid(&g, |x| kk * (kk * x[0]).cos());
        let err = grad[0].iter().zip(&expect).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-13);
        assert!(grad[1].iter().all(|v| v.abs() < 1e-13));
    }

    #[test]
    fn div_grad_is_laplacian() {
        let g = grid();
        let s = ScalarField::from_physical(g, &sample_grid(&g, |x| (x[0] + 2.0 * x[1]).sin() * x[2].cos()), ScalarRole::Diagnostic).unwrap();
        let a = divergence(&gradient(&s));
        let b = laplacian(&s);
        for (x, y) in a.coefficients.iter().zip(&b.coefficients) {
            assert!((x - y).norm() < 1e-15);
        }
    }

    #[test]
    fn heat_rejects_negative_time() {
        let f = SpectralVectorField::zeros(grid());
        assert!(matches!(heat_propagate(&f, -1.0), Err(NsxError::InvalidTime(_))));
    }

    #[test]
    fn single_mode_advection_by_hand() {
        // a = (0, cos x, 0), b = (sin y, 0, 0): a . grad b = (cos x cos y, 0, 0),
        // whose projection is (1/2) cos x cos y (1, -1, 0) ... computed below.
        let g = grid();
        let z = vec![0.0; g.physical_len()];
        let a = SpectralVectorField::from_physical(g, &[z.clone(), sample_grid(&g, |x| x[0].cos()), z.clone()]).unwrap();
        let b = SpectralVectorField::from_physical(g, &[sample_grid(&g, |x| x[1].sin()), z.clone(), z]).unwrap();
        let out = nonlinear_term(&a, &b).unwrap().to_physical();
        // cos x cos y = (cos(x+y) + cos(x-y))/2; each wave with k = (1,±1,0)
        // projects to c - (c.k)k/2 with c = (1,0,0): (1/2, ∓1/2, 0).
        let e0 = sample_grid(&g, |x| 0.5 * x[0].cos() * x[1].cos());
        let e1 = sample_grid(&g, |x| 0.5 * x[0].sin() * x[1].sin());
        let err0 = out[0].iter().zip(&e0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let err1 = out[1].iter().zip(&e1).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err0 < 1e-13 && err1 < 1e-13, "{err0} {err1}");
    }
}
