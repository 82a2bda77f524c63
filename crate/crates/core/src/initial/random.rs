//! Seeded random fields for calibration corpora and property tests.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::seed::{make_divfree_seed, SeedKind, SeedSpec};
use crate::error::Result;
use crate::spectral::{leray_project, GridSpec, SpectralVectorField};

/// Independent stream for element `index` of a corpus drawn with `seed`.
pub fn element_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    // Box–Muller; one variate per call keeps the stream layout simple.
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Divergence-free, mean-free trigonometric polynomial with modes
/// |m_i| <= max_mode and a mildly decaying random spectrum.
pub fn random_bandlimited<R: Rng>(grid: &GridSpec, rng: &mut R, max_mode: i64) -> SpectralVectorField {
    let mut f = SpectralVectorField::zeros(*grid);
    let amp = rng.gen_range(0.2..2.0);
    for c in 0..3 {
        let comp = f.component_mut(c);
        for (idx, z) in comp.iter_mut().enumerate() {
            let m = grid.mode_indices(idx);
            if m.iter().any(|&mi| mi.abs() > max_mode || grid.is_nyquist(mi)) || m == [0, 0, 0] {
                continue;
            }
            let m2 = (m[0] * m[0] + m[1] * m[1] + m[2] * m[2]) as f64;
            let s = amp / (1.0 + m2);
            *z = Complex64::new(s * standard_normal(rng), s * standard_normal(rng));
        }
    }
    f.symmetrize();
    leray_project(&f)
}

/// A random member of the analytic seed family that fits the box.
pub fn random_seed_spec<R: Rng>(grid: &GridSpec, rng: &mut R) -> SeedSpec {
    let l = grid.box_length;
    let h = grid.spacing();
    let radius = rng.gen_range((3.0 * h).min(l / 8.0)..=l / 8.0);
    let kind = if rng.gen_bool(0.5) {
        SeedKind::GaussianCurl
    } else {
        SeedKind::TaylorGreenWindowed
    };
    let orientation = [standard_normal(rng), standard_normal(rng), standard_normal(rng) + 1e-3];
    let center = [
        rng.gen_range(-l / 8.0..l / 8.0),
        rng.gen_range(-l / 8.0..l / 8.0),
        rng.gen_range(-l / 8.0..l / 8.0),
    ];
    SeedSpec {
        kind,
        center,
        radius,
        amplitude: rng.gen_range(0.2..2.0),
        orientation,
    }
}

pub fn random_seed_field<R: Rng>(grid: &GridSpec, rng: &mut R) -> Result<SpectralVectorField> {
    make_divfree_seed(&random_seed_spec(grid, rng), grid)
}

/// Unit vector with random direction.
pub fn random_direction<R: Rng>(rng: &mut R) -> [f64; 3] {
    loop {
        let v = [standard_normal(rng), standard_normal(rng), standard_normal(rng)];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-6 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}
