use std::f64::consts::PI;

use nsx_core::initial::random::{element_rng, random_bandlimited};
use nsx_core::initial::{make_divfree_seed, SeedSpec};
use nsx_core::norms::{
    besov_caloric_norm, geometric_times, grad_kernel_norm, kernel_norm_exact, lp, prop31_check, scale_field,
    young_exponent, ExponentTriple, FieldSamples,
};
use nsx_core::numerics::adaptive_gauss_kronrod;
use nsx_core::spectral::{heat_propagate, GridSpec};
use nsx_core::NsxError;
use proptest::prelude::*;
use statrs::function::gamma::gamma;

/// ∫_{R^3} |K_t|^r by radial quadrature.
fn kernel_norm_quadrature(t: f64, r: f64) -> f64 {
    let k = |rho: f64| (4.0 * PI * t).powf(-1.5) * (-rho * rho / (4.0 * t)).exp();
    let upper = 20.0 * (t / r).sqrt();
    let m = adaptive_gauss_kronrod(&|rho: f64| 4.0 * PI * rho * rho * k(rho).powf(r), 0.0, upper, 1e-13);
    m.powf(1.0 / r)
}

/// ||grad K_t||_r from ∫_0^∞ ρ^m e^{-aρ²} dρ = Γ((m+1)/2) / (2 a^{(m+1)/2}).
fn grad_kernel_gamma(t: f64, r: f64) -> f64 {
    let m = r + 2.0;
    let a = r / (4.0 * t);
    let moment = gamma((m + 1.0) / 2.0) / (2.0 * a.powf((m + 1.0) / 2.0));
    (4.0 * PI * (2.0 * t).powf(-r) * (4.0 * PI * t).powf(-1.5 * r) * moment).powf(1.0 / r)
}

#[test]
fn gradient_kernel_at_large_exponent() {
    for t in [0.01, 1.0] {
        let a = grad_kernel_norm(t, 40.0).unwrap();
        assert!((a - grad_kernel_gamma(t, 40.0)).abs() < 1e-7 * a);
    }
}

#[test]
fn caloric_norm_of_zero_and_ordering() {
    let g = GridSpec::new(16, 8.0).unwrap();
    let f = make_divfree_seed(&SeedSpec::gaussian_curl(1.0, 1.0), &g).unwrap();
    let times = geometric_times(0.01, 2.0, 8);
    assert_eq!(times.len(), 8);
    assert!((times[3] - 0.08).abs() < 1e-15);
    let a = besov_caloric_norm(&f, &times).unwrap();
    let b = besov_caloric_norm(&f.scaled(2.0), &times).unwrap();
    assert!((b - 2.0 * a).abs() < 1e-12 * b);
}

#[test]
fn exponent_validation() {
    assert!(matches!(young_exponent(2.0, 1.5), Err(NsxError::InvalidExponent(_))));
    assert!(matches!(kernel_norm_exact(-1.0, 2.0), Err(NsxError::InvalidTime(_))));
    let g = GridSpec::new(8, 4.0).unwrap();
    let f = random_bandlimited(&g, &mut element_rng(0, 0), 2);
    assert!(prop31_check(&f, 6.0, 2.0, 0.1).is_err());
}

#[test]
fn critical_norm_is_scale_invariant() {
    let g = GridSpec::new(48, 16.0).unwrap();
    let f = make_divfree_seed(&SeedSpec::gaussian_curl(1.5, 1.0), &g).unwrap();
    let base = lp(&f, 3.0).unwrap();
    for lambda in [0.5, 2.0] {
        let s = scale_field(&f, lambda).unwrap();
        assert!((lp(&s, 3.0).unwrap() / base - 1.0).abs() < 1e-3);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn closed_form_kernel_norm(t in 0.01f64..4.0, r in 1.0f64..12.0) {
        let a = kernel_norm_exact(t, r).unwrap();
        let b = kernel_norm_quadrature(t, r);
        prop_assert!((a - b).abs() < 1e-9 * a, "{} {}", a, b);
    }

    #[test]
    fn gradient_kernel_norm_two_routes(t in 0.01f64..4.0, r in 1.0f64..12.0) {
        let a = grad_kernel_norm(t, r).unwrap();
        let b = grad_kernel_gamma(t, r);
        prop_assert!((a - b).abs() < 1e-7 * b, "{} {}", a, b);
    }

    #[test]
    fn young_relation(p in 1.01f64..6.0, extra in 0.0f64..20.0) {
        let q = p + extra;
        let r = young_exponent(p, q).unwrap();
        prop_assert!(r >= 1.0);
        prop_assert!((1.0 / q + 1.0 - 1.0 / r - 1.0 / p).abs() < 1e-13);
    }

    #[test]
    fn heat_decay_rate_in_the_kernel(t in 0.01f64..10.0, s in 0.1f64..10.0) {
        // ||K_{st}||_r = s^{-3/2 (1 - 1/r)} ||K_t||_r
        let r = 3.0;
        let a = kernel_norm_exact(s * t, r).unwrap();
        let b = s.powf(-1.5 * (1.0 - 1.0 / r)) * kernel_norm_exact(t, r).unwrap();
        prop_assert!((a - b).abs() < 1e-12 * b);
    }

    #[test]
    fn scaling_law(lambda in 0.5f64..2.0, p_index in 0usize..3) {
        let p = [2.0, 3.0, 6.0][p_index];
        // original and rescaled radii both in [1, 4] at dx = 1/4: |f|^p is only
        // finitely smooth where f vanishes, so the sampled integral needs the margin
        let g = GridSpec::new(128, 32.0).unwrap();
        let f = make_divfree_seed(&SeedSpec::gaussian_curl(2.0, 1.0), &g).unwrap();
        let s = scale_field(&f, lambda).unwrap();
        let ratio = lp(&s, p).unwrap() / lp(&f, p).unwrap();
        let expected = lambda.powf(1.0 - 3.0 / p);
        prop_assert!((ratio / expected - 1.0).abs() < 1e-3, "{} {}", ratio, expected);
    }

    #[test]
    fn box_holder(seed in 0u64..10_000, p in 1.0f64..4.0, extra in 0.0f64..4.0) {
        // on a box of volume V: ||f||_p <= V^{1/p - 1/q} ||f||_q
        let g = GridSpec::new(16, 3.0).unwrap();
        let f = random_bandlimited(&g, &mut element_rng(seed, 0), 4);
        let s = FieldSamples::of(&f);
        let q = p + extra;
        let lhs = s.lp(p).unwrap();
        let rhs = g.volume().powf(1.0 / p - 1.0 / q) * s.lp(q).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-12));
    }

    #[test]
    fn heat_bounds_hold_on_random_fields(seed in 0u64..10_000, pair in 0usize..3, t_index in 0usize..3) {
        let (p, q) = [(2.0, 6.0), (3.0, 6.0), (1.5, 3.0)][pair];
        let t = [0.01, 0.1, 1.0][t_index];
        let g = GridSpec::new(24, 16.0).unwrap();
        let f = random_bandlimited(&g, &mut element_rng(seed, 0), 4);
        let o = prop31_check(&f, p, q, t).unwrap();
        prop_assert!(o.pass(), "{:?}", o);
        prop_assert!(o.heat.lhs <= FieldSamples::of(&heat_propagate(&f, t).unwrap()).lp(q).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn hoelder_triple(q in 3.01f64..50.0) {
        let t = ExponentTriple::for_q(q).unwrap();
        t.validate().unwrap();
        prop_assert!(t.p > 1.0 && t.p < 3.0);
    }
}
