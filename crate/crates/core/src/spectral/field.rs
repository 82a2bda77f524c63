use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

use super::fft;
use super::grid::GridSpec;
use super::wavenumbers::wavenumbers;
use crate::error::{NsxError, Result};
use crate::initial::seed::SeedSum;
use crate::numerics::CompensatedSum;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Divergence-free (or general) real vector field stored as three
/// half-spectrum coefficient arrays.
#[derive(Debug, Clone)]
pub struct SpectralVectorField {
    grid: GridSpec,
    components: [Vec<Complex64>; 3],
    time_tag: f64,
    // Analytic description of the field, kept while only linear
    // combinations are applied. Enables exact rescaling.
    provenance: Option<Arc<SeedSum>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarRole {
    Pressure,
    Potential,
    Diagnostic,
}

#[derive(Debug, Clone)]
pub struct ScalarField {
    pub grid: GridSpec,
    pub coefficients: Vec<Complex64>,
    pub role: ScalarRole,
}

/// Physical-space samples of a vector field, last index fastest.
pub type PhysicalVector = [Vec<f64>; 3];

impl SpectralVectorField {
    pub fn zeros(grid: GridSpec) -> Self {
        let len = grid.spectral_len();
        Self {
            grid,
            components: [vec![ZERO; len], vec![ZERO; len], vec![ZERO; len]],
            time_tag: 0.0,
            provenance: None,
        }
    }

    pub fn from_components(grid: GridSpec, components: [Vec<Complex64>; 3], time_tag: f64) -> Result<Self> {
        let len = grid.spectral_len();
        if components.iter().any(|c| c.len() != len) {
            return Err(NsxError::InvalidArgument(format!(
                "component length must be {len} for this grid"
            )));
        }
        if !(time_tag >= 0.0 && time_tag.is_finite()) {
            return Err(NsxError::InvalidTime(time_tag));
        }
        Ok(Self {
            grid,
            components,
            time_tag,
            provenance: None,
        })
    }

    pub fn from_physical(grid: GridSpec, values: &PhysicalVector) -> Result<Self> {
        let n = grid.n();
        if values.iter().any(|v| v.len() != grid.physical_len()) {
            return Err(NsxError::InvalidArgument("physical sample count does not match grid".into()));
        }
        let components = [fft::forward(n, &values[0]), fft::forward(n, &values[1]), fft::forward(n, &values[2])];
        Self::from_components(grid, components, 0.0)
    }

    pub fn to_physical(&self) -> PhysicalVector {
        let n = self.grid.n();
        [
            fft::inverse(n, &self.components[0]),
            fft::inverse(n, &self.components[1]),
            fft::inverse(n, &self.components[2]),
        ]
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn time_tag(&self) -> f64 {
        self.time_tag
    }

    pub fn set_time_tag(&mut self, t: f64) {
        self.time_tag = t;
    }

    pub fn with_time_tag(mut self, t: f64) -> Self {
        self.time_tag = t;
        self
    }

    pub fn component(&self, i: usize) -> &[Complex64] {
        &self.components[i]
    }

    pub fn components(&self) -> &[Vec<Complex64>; 3] {
        &self.components
    }

    /// Mutable access drops any analytic provenance.
    pub fn component_mut(&mut self, i: usize) -> &mut Vec<Complex64> {
        self.provenance = None;
        &mut self.components[i]
    }

    pub fn into_components(self) -> [Vec<Complex64>; 3] {
        self.components
    }

    pub fn provenance(&self) -> Option<&Arc<SeedSum>> {
        self.provenance.as_ref()
    }

    pub(crate) fn with_provenance(mut self, p: Option<Arc<SeedSum>>) -> Self {
        self.provenance = p;
        self
    }

    pub fn drop_provenance(mut self) -> Self {
        self.provenance = None;
        self
    }

    pub fn ensure_same_grid(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(NsxError::GridMismatch);
        }
        Ok(())
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        for comp in out.components.iter_mut() {
            for z in comp.iter_mut() {
                *z *= c;
            }
        }
        out.provenance = self.provenance.as_ref().map(|p| Arc::new(p.scaled(c)));
        out
    }

    /// self + alpha * other, keeping the time tag of self.
    pub fn add_scaled(&self, alpha: f64, other: &Self) -> Result<Self> {
        self.ensure_same_grid(other)?;
        let mut out = self.clone();
        for (dst, src) in out.components.iter_mut().zip(&other.components) {
            for (d, s) in dst.iter_mut().zip(src) {
                *d += alpha * s;
            }
        }
        out.provenance = match (&self.provenance, &other.provenance) {
            (Some(a), Some(b)) => Some(Arc::new(a.combined(1.0, b, alpha))),
            _ => None,
        };
        Ok(out)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.add_scaled(1.0, other)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.add_scaled(-1.0, other)
    }

    /// In-place self += alpha * other; drops provenance.
    pub fn axpy(&mut self, alpha: f64, other: &Self) -> Result<()> {
        self.ensure_same_grid(other)?;
        self.provenance = None;
        for (dst, src) in self.components.iter_mut().zip(&other.components) {
            for (d, s) in dst.iter_mut().zip(src) {
                *d += alpha * s;
            }
        }
        Ok(())
    }

    /// Mode-wise multiplication by a real multiplier shared by all components.
    pub fn apply_multiplier(&self, m: &[f64]) -> Self {
        let mut out = self.clone();
        out.provenance = None;
        for comp in out.components.iter_mut() {
            for (z, &f) in comp.iter_mut().zip(m) {
                *z *= f;
            }
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.components
            .iter()
            .all(|c| c.iter().all(|z| z.re.is_finite() && z.im.is_finite()))
    }

    /// L2 norm from the coefficients: ||f||^2 = L^3 sum |c_k|^2.
    pub fn l2_parseval(&self) -> f64 {
        self.parseval_sum(|_, z| z.norm_sqr()).sqrt()
    }

    /// ||grad f||_2 from the coefficients.
    pub fn grad_l2_parseval(&self) -> f64 {
        let w = wavenumbers(&self.grid);
        self.parseval_sum(|idx, z| z.norm_sqr() * w.k2_eff[idx]).sqrt()
    }

    fn parseval_sum<F: Fn(usize, &Complex64) -> f64>(&self, f: F) -> f64 {
        let w = wavenumbers(&self.grid);
        let mut acc = CompensatedSum::new();
        for comp in &self.components {
            for (idx, z) in comp.iter().enumerate() {
                acc.add(w.parseval[idx] * f(idx, z));
            }
        }
        self.grid.volume() * acc.value()
    }

    /// Relative L2 distance ||self - other|| / max(||other||, tiny).
    pub fn relative_l2_distance(&self, other: &Self) -> Result<f64> {
        let diff = self.try_sub(other)?;
        let denom = other.l2_parseval();
        let num = diff.l2_parseval();
        if denom == 0.0 {
            return Ok(num);
        }
        Ok(num / denom)
    }

    /// Largest departure from Hermitian symmetry in the self-conjugate planes,
    /// relative to the largest coefficient.
    pub fn hermitian_defect(&self) -> f64 {
        let g = &self.grid;
        let n = g.n();
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for comp in &self.components {
            for z in comp {
                scale = scale.max(z.norm());
            }
            for &i2 in &[0, n / 2] {
                for i0 in 0..n {
                    for i1 in 0..n {
                        let j0 = (n - i0) % n;
                        let j1 = (n - i1) % n;
                        let a = comp[g.flat_index(i0, i1, i2)];
                        let b = comp[g.flat_index(j0, j1, i2)];
                        worst = worst.max((a - b.conj()).norm());
                    }
                }
            }
        }
        if scale == 0.0 {
            0.0
        } else {
            worst / scale
        }
    }

    /// Replace every coefficient by its Hermitian-symmetrized value.
    pub fn symmetrize(&mut self) {
        let g = self.grid;
        let n = g.n();
        self.provenance = None;
        for comp in self.components.iter_mut() {
            for &i2 in &[0, n / 2] {
                for i0 in 0..n {
                    for i1 in 0..n {
                        let a = g.flat_index(i0, i1, i2);
                        let b = g.flat_index((n - i0) % n, (n - i1) % n, i2);
                        if a <= b {
                            let avg = 0.5 * (comp[a] + comp[b].conj());
                            comp[a] = avg;
                            comp[b] = avg.conj();
                        }
                    }
                }
            }
        }
    }

    /// Mean-mode coefficients.
    pub fn mean(&self) -> [Complex64; 3] {
        [self.components[0][0], self.components[1][0], self.components[2][0]]
    }
}

impl ScalarField {
    pub fn zeros(grid: GridSpec, role: ScalarRole) -> Self {
        Self {
            grid,
            coefficients: vec![ZERO; grid.spectral_len()],
            role,
        }
    }

    pub fn from_physical(grid: GridSpec, values: &[f64], role: ScalarRole) -> Result<Self> {
        if values.len() != grid.physical_len() {
            return Err(NsxError::InvalidArgument("physical sample count does not match grid".into()));
        }
        Ok(Self {
            grid,
            coefficients: fft::forward(grid.n(), values),
            role,
        })
    }

    pub fn to_physical(&self) -> Vec<f64> {
        fft::inverse(self.grid.n(), &self.coefficients)
    }
}

/// Sample a real function of position on the grid (last index fastest).
pub fn sample_grid<F: Fn([f64; 3]) -> f64>(grid: &GridSpec, f: F) -> Vec<f64> {
    let n = grid.n();
    let mut out = Vec::with_capacity(grid.physical_len());
    for i0 in 0..n {
        let x0 = grid.coordinate(i0);
        for i1 in 0..n {
            let x1 = grid.coordinate(i1);
            for i2 in 0..n {
                out.push(f([x0, x1, grid.coordinate(i2)]));
            }
        }
    }
    out
}
