//! Lebesgue norms of the heat kernel K_t(x) = (4 pi t)^{-3/2} exp(-|x|^2/(4t))
//! and of its gradient on R^3.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Mutex, OnceLock};

use crate::error::{NsxError, Result};
use crate::numerics::adaptive_gauss_kronrod;

fn check_args(t: f64, r: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(NsxError::InvalidTime(t));
    }
    if r.is_nan() || r < 1.0 {
        return Err(NsxError::InvalidExponent(format!("kernel exponent must be >= 1, got {r}")));
    }
    Ok(())
}

/// ||K_t||_{L^r} in closed form.
pub fn kernel_norm_exact(t: f64, r: f64) -> Result<f64> {
    check_args(t, r)?;
    if r.is_infinite() {
        return Ok((4.0 * PI * t).powf(-1.5));
    }
    Ok((4.0 * PI * t).powf(-1.5 * (1.0 - 1.0 / r)) * r.powf(-1.5 / r))
}

/// ||grad K_t||_{L^r}, by radial quadrature at relative tolerance 1e-8.
/// Results are cached per (t, r).
pub fn grad_kernel_norm(t: f64, r: f64) -> Result<f64> {
    check_args(t, r)?;
    static CACHE: OnceLock<Mutex<HashMap<(u64, u64), f64>>> = OnceLock::new();
    let key = (t.to_bits(), r.to_bits());
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().expect("kernel cache poisoned").get(&key) {
        return Ok(*v);
    }
    let value = if r.is_infinite() {
        // max of rho/(2t) exp(-rho^2/4t) at rho = sqrt(2t)
        (4.0 * PI * t).powf(-1.5) * (2.0 * t).sqrt() / (2.0 * t) * (-0.5f64).exp()
    } else {
        // |grad K_t|(rho) = rho/(2t) (4 pi t)^{-3/2} exp(-rho^2/(4t)); with
        // rho = sqrt(4t/r) s the radial integral becomes dimensionless.
        let scale = (4.0 * t / r).sqrt();
        let radial = adaptive_gauss_kronrod(&|s: f64| s.powf(2.0 + r) * (-s * s).exp(), 0.0, 40.0, 1e-12);
        let integral = 4.0 * PI * (2.0 * t).powf(-r) * (4.0 * PI * t).powf(-1.5 * r) * scale.powf(3.0 + r) * radial;
        integral.powf(1.0 / r)
    };
    cache.lock().expect("kernel cache poisoned").insert(key, value);
    Ok(value)
}

/// The Young exponent r with 1/q + 1 = 1/r + 1/p.
pub fn young_exponent(p: f64, q: f64) -> Result<f64> {
    if !(p > 1.0 && p <= q && q.is_finite()) {
        return Err(NsxError::InvalidExponent(format!("need 1 < p <= q < inf, got p={p}, q={q}")));
    }
    let inv_r = 1.0 + 1.0 / q - 1.0 / p;
    Ok(1.0 / inv_r)
}
