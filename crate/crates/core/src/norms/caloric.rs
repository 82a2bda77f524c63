use super::lp::lp;
use crate::error::{NsxError, Result};
use crate::spectral::{heat_propagate, SpectralVectorField};

/// max over the time grid of t^{1/2} ||K_t * f||_{L^inf}, a computable
/// proxy for the critical negative-regularity norm of f.
pub fn besov_caloric_norm(f: &SpectralVectorField, t_grid: &[f64]) -> Result<f64> {
    if t_grid.is_empty() {
        return Err(NsxError::InvalidArgument("caloric norm needs a nonempty time grid".into()));
    }
    let mut best: f64 = 0.0;
    for &t in t_grid {
        if !(t > 0.0 && t.is_finite()) {
            return Err(NsxError::InvalidTime(t));
        }
        let v = t.sqrt() * lp(&heat_propagate(f, t)?, f64::INFINITY)?;
        best = best.max(v);
    }
    Ok(best)
}

/// `count` times log-spaced by `ratio`, starting at `t0`.
pub fn geometric_times(t0: f64, ratio: f64, count: usize) -> Vec<f64> {
    (0..count).map(|i| t0 * ratio.powi(i as i32)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::GridSpec;

    #[test]
    fn empty_grid_is_rejected() {
        let f = SpectralVectorField::zeros(GridSpec::new(8, 1.0).unwrap());
        assert!(matches!(besov_caloric_norm(&f, &[]), Err(NsxError::InvalidArgument(_))));
        assert_eq!(besov_caloric_norm(&f, &[0.1, 1.0]).unwrap(), 0.0);
    }
}
