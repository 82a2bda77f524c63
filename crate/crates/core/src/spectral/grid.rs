use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{NsxError, Result};

/// Periodic grid on the box [-L/2, L/2)^3.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n_per_axis: usize,
    pub box_length: f64,
    #[serde(default = "default_dealias")]
    pub dealias_fraction: f64,
}

fn default_dealias() -> f64 {
    2.0 / 3.0
}

impl GridSpec {
    pub fn new(n_per_axis: usize, box_length: f64) -> Result<Self> {
        Self::with_dealias(n_per_axis, box_length, default_dealias())
    }

    pub fn with_dealias(n_per_axis: usize, box_length: f64, dealias_fraction: f64) -> Result<Self> {
        let g = GridSpec {
            n_per_axis,
            box_length,
            dealias_fraction,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_per_axis;
        if n < 8 || n % 2 != 0 {
            return Err(NsxError::InvalidGrid(format!(
                "n_per_axis must be even and at least 8, got {n}"
            )));
        }
        if !(self.box_length > 0.0 && self.box_length.is_finite()) {
            return Err(NsxError::InvalidGrid(format!(
                "box_length must be positive, got {}",
                self.box_length
            )));
        }
        let f = self.dealias_fraction;
        if !(f > 0.0 && f <= 1.0) || f * (n as f64) < 4.0 {
            return Err(NsxError::InvalidGrid(format!(
                "dealias_fraction {f} must lie in (0,1] and keep at least 4 modes"
            )));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n_per_axis
    }

    /// Length of the last (halved) spectral axis.
    pub fn n_half(&self) -> usize {
        self.n_per_axis / 2 + 1
    }

    pub fn spectral_len(&self) -> usize {
        self.n_per_axis * self.n_per_axis * self.n_half()
    }

    pub fn physical_len(&self) -> usize {
        self.n_per_axis.pow(3)
    }

    pub fn spacing(&self) -> f64 {
        self.box_length / self.n_per_axis as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(3)
    }

    pub fn volume(&self) -> f64 {
        self.box_length.powi(3)
    }

    pub fn origin(&self) -> f64 {
        -0.5 * self.box_length
    }

    pub fn fundamental(&self) -> f64 {
        2.0 * PI / self.box_length
    }

    /// Physical coordinate of grid index j along any axis.
    pub fn coordinate(&self, j: usize) -> f64 {
        self.origin() + j as f64 * self.spacing()
    }

    /// Signed integer wave index for the full axes.
    pub fn signed_index(&self, j: usize) -> i64 {
        let n = self.n_per_axis as i64;
        let j = j as i64;
        if j < n / 2 {
            j
        } else {
            j - n
        }
    }

    pub fn is_nyquist(&self, m: i64) -> bool {
        m.unsigned_abs() as usize == self.n_per_axis / 2
    }

    /// Integer wave indices (m0, m1, m2) of a flat spectral index.
    pub fn mode_indices(&self, idx: usize) -> [i64; 3] {
        let nh = self.n_half();
        let n = self.n_per_axis;
        let i2 = idx % nh;
        let i1 = (idx / nh) % n;
        let i0 = idx / (nh * n);
        [self.signed_index(i0), self.signed_index(i1), i2 as i64]
    }

    pub fn flat_index(&self, i0: usize, i1: usize, i2: usize) -> usize {
        (i0 * self.n_per_axis + i1) * self.n_half() + i2
    }

    /// True wave vector of every stored mode.
    pub fn wavevectors(&self) -> Vec<[f64; 3]> {
        let k0 = self.fundamental();
        (0..self.spectral_len())
            .map(|idx| {
                let m = self.mode_indices(idx);
                [m[0] as f64 * k0, m[1] as f64 * k0, m[2] as f64 * k0]
            })
            .collect()
    }

    /// Wave vectors used for differentiation: Nyquist components are zeroed
    /// so that derivatives of real fields stay real.
    pub fn derivative_wavevectors(&self) -> Vec<[f64; 3]> {
        let k0 = self.fundamental();
        (0..self.spectral_len())
            .map(|idx| {
                let m = self.mode_indices(idx);
                let mut k = [0.0; 3];
                for a in 0..3 {
                    if !self.is_nyquist(m[a]) {
                        k[a] = m[a] as f64 * k0;
                    }
                }
                k
            })
            .collect()
    }

    /// Weight of a stored mode in Parseval sums over the full spectrum.
    pub fn parseval_weight(&self, idx: usize) -> f64 {
        let i2 = idx % self.n_half();
        if i2 == 0 || i2 == self.n_per_axis / 2 {
            1.0
        } else {
            2.0
        }
    }

    /// Largest retained |m| under the dealiasing rule is strictly below this.
    pub fn dealias_cutoff(&self) -> f64 {
        self.dealias_fraction * self.n_per_axis as f64 / 2.0
    }

    pub fn dealias_mask(&self) -> Vec<bool> {
        let cut = self.dealias_cutoff();
        (0..self.spectral_len())
            .map(|idx| {
                let m = self.mode_indices(idx);
                m.iter().all(|&mi| (mi.abs() as f64) < cut)
            })
            .collect()
    }
}
