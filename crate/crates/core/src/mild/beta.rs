use statrs::function::gamma::ln_gamma;

use crate::error::{NsxError, Result};

/// Euler beta function B(a, b) = Γ(a)Γ(b)/Γ(a+b).
pub fn beta_function(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
        return Err(NsxError::InvalidArgument(format!("beta arguments must be positive, got ({a}, {b})")));
    }
    Ok((ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)).exp())
}

/// Every (a, b) produced by the substitution s = tγ in the small-ball
/// estimates for the perturbation, for a given q > 3 and 1/p = 1/q + 1/3.
pub fn small_ball_beta_pairs(q: f64) -> Vec<(f64, f64)> {
    let p = 1.0 / (1.0 / q + 1.0 / 3.0);
    vec![
        (1.5 / q, 0.5),
        (0.5, 0.5),
        (0.5 * (1.0 + 3.0 / q), 0.5),
        (1.0, 0.5),
        (0.5 * (1.0 - 3.0 / q), 1.5 / q),
        (0.5, 1.0 - 1.5 / p),
        (0.5 + 1.5 / p, 1.0 - 1.5 / p),
        (0.5 * (2.0 - 3.0 / q), 3.0 / q),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        assert!((beta_function(1.0, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((beta_function(0.5, 0.5).unwrap() - std::f64::consts::PI).abs() < 1e-13);
        assert!(beta_function(0.0, 1.0).is_err());
    }
}
