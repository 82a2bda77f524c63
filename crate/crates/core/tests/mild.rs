use std::f64::consts::PI;

use nsx_core::initial::{make_divfree_seed, SeedSpec};
use nsx_core::mild::{
    beta_function, duhamel_integral, duhamel_integral_checked, picard_solve_v, picard_solve_w, small_ball_beta_pairs,
    split_consistency, stokes_evolve, DuhamelGrid, DuhamelRule, PicardConfig, PicardStart,
};
use nsx_core::spectral::{heat_propagate, sample_grid, GridSpec, SpectralVectorField};
use nsx_core::NsxError;
use proptest::prelude::*;

/// (0, 0, sin(2x + y)) on the 2π box: divergence-free, one heat rate |k|² = 5.
fn single_mode() -> (SpectralVectorField, f64) {
    let g = GridSpec::new(8, 2.0 * PI).unwrap();
    let z = vec![0.0; g.physical_len()];
    let s = sample_grid(&g, |x| (2.0 * x[0] + x[1]).sin());
    (SpectralVectorField::from_physical(g, &[z.clone(), z, s]).unwrap(), 5.0)
}

fn trapezoid(t: f64, count: usize) -> DuhamelGrid {
    DuhamelGrid::graded(t, count, 1.0, DuhamelRule::GradedTrapezoid).unwrap()
}

#[test]
fn constant_forcing_closed_form() {
    let (f, lam) = single_mode();
    let t = 0.7;
    let got = duhamel_integral(|_| Ok(f.clone()), t, &trapezoid(t, 8)).unwrap();
    let expect = f.scaled(-(-lam * t).exp_m1() / lam);
    assert!(got.relative_l2_distance(&expect).unwrap() < 1e-14);
}

#[test]
fn linear_forcing_is_integrated_exactly() {
    let (f, lam) = single_mode();
    let t = 1.3;
    let grid = DuhamelGrid::graded(t, 9, 2.0, DuhamelRule::GradedTrapezoid).unwrap();
    let got = duhamel_integral(|s| Ok(f.scaled(s)), t, &grid).unwrap();
    // ∫ exp(-λ(t-s)) s ds
    let exact = (lam * t - 1.0 + (-lam * t).exp()) / (lam * lam);
    assert!(got.relative_l2_distance(&f.scaled(exact)).unwrap() < 1e-13);
}

fn singular_forcing_error(beta: f64, count: usize) -> f64 {
    let (f, lam) = single_mode();
    let t: f64 = 0.9;
    let grid = DuhamelGrid::graded(t, count, 1.0, DuhamelRule::GaussJacobiComposite)
        .unwrap()
        .with_endpoint_exponent(beta)
        .unwrap();
    let got = duhamel_integral(|s| Ok(f.scaled(s.powf(-beta))), t, &grid).unwrap();
    // ∫ exp(-λ(t-s)) s^{-β} ds = Σ (-λ)^n t^{n+a} / (a (a+1) ... (a+n)), a = 1 - β
    let a = 1.0 - beta;
    let mut exact = 0.0;
    let mut term = t.powf(a) / a;
    for n in 0..80 {
        exact += term;
        term *= -lam * t / (a + n as f64 + 1.0);
    }
    got.relative_l2_distance(&f.scaled(exact)).unwrap()
}

#[test]
fn gauss_jacobi_handles_endpoint_singularity() {
    for beta in [0.25, 0.5, 0.75] {
        let (coarse, fine) = (singular_forcing_error(beta, 16), singular_forcing_error(beta, 32));
        assert!(coarse < 1e-8, "beta {beta}: {coarse}");
        let design = DuhamelGrid::graded(0.9, 16, 1.0, DuhamelRule::GaussJacobiComposite)
            .unwrap()
            .with_endpoint_exponent(beta)
            .unwrap()
            .design_order();
        let order = (coarse / fine).log2();
        assert!((order / design - 1.0).abs() < 0.2, "beta {beta}: order {order}");
    }
}

fn cos_forcing_error(count: usize) -> f64 {
    let (f, lam) = single_mode();
    let (t, om): (f64, f64) = (1.0, 3.0);
    let got = duhamel_integral(|s| Ok(f.scaled((om * s).cos())), t, &trapezoid(t, count)).unwrap();
    let exact = (lam * (om * t).cos() + om * (om * t).sin() - lam * (-lam * t).exp()) / (lam * lam + om * om);
    got.relative_l2_distance(&f.scaled(exact)).unwrap()
}

#[test]
fn trapezoid_refinement_reaches_design_order() {
    let (e1, e2, e3) = (cos_forcing_error(16), cos_forcing_error(32), cos_forcing_error(64));
    let design = trapezoid(1.0, 16).design_order();
    for (a, b) in [(e1, e2), (e2, e3)] {
        let order = (a / b).log2();
        assert!((order / design - 1.0).abs() < 0.2, "order {order}");
    }
}

#[test]
fn fast_forcing_is_flagged_under_resolved() {
    let (f, _) = single_mode();
    let err = duhamel_integral_checked(|s| Ok(f.scaled((60.0 * s).sin())), 1.0, &trapezoid(1.0, 8), 1e-6)
        .unwrap_err();
    assert!(matches!(err, NsxError::QuadratureUnderResolved(_)));
    assert!(duhamel_integral_checked(|_| Ok(f.clone()), 1.0, &trapezoid(1.0, 8), 1e-6).is_ok());
}

#[test]
fn stokes_flow_is_the_heat_flow() {
    let g = GridSpec::new(16, 8.0).unwrap();
    let u0 = make_divfree_seed(&SeedSpec::gaussian_curl(1.0, 0.5), &g).unwrap();
    let times = [0.0, 0.1, 0.5, 2.0];
    let out = stokes_evolve(&u0, &times).unwrap();
    for (f, &t) in out.iter().zip(&times) {
        assert!(f.relative_l2_distance(&heat_propagate(&u0, t).unwrap()).unwrap() < 1e-15);
        assert_eq!(f.time_tag(), t);
    }
    assert!(matches!(stokes_evolve(&u0, &[0.5, 0.1]), Err(NsxError::InvalidArgument(_))));
    assert!(matches!(stokes_evolve(&u0, &[-0.1]), Err(NsxError::InvalidTime(_))));
}

#[test]
fn zero_data_stay_zero() {
    let g = GridSpec::new(8, 4.0).unwrap();
    let z = SpectralVectorField::zeros(g);
    let grid = trapezoid(1.0, 8);
    let st = picard_solve_w(&z, &z, &grid, &PicardConfig::default()).unwrap();
    assert_eq!(st.iterate_index, 1);
    assert!(st.w_trajectory.iter().all(|w| w.l2_parseval() == 0.0));
}

fn small_seed() -> SpectralVectorField {
    let g = GridSpec::new(16, 16.0).unwrap();
    make_divfree_seed(&SeedSpec::gaussian_curl(2.0, 0.1), &g).unwrap()
}

#[test]
fn small_data_contract() {
    let v0 = small_seed();
    let grid = DuhamelGrid::graded(0.5, 16, 2.0, DuhamelRule::GradedTrapezoid).unwrap();
    let cfg = PicardConfig {
        tol: 1e-10,
        k_ball_radius: Some(1.0),
        ..Default::default()
    };
    let st = picard_solve_v(&v0, &grid, &cfg).unwrap();
    assert!(st.residual < 1e-10);
    assert!(st.residual_nonincreasing());
    assert!(st.contraction_ratios().iter().all(|&r| r < 0.5));
    assert_eq!(st.in_k_ball, Some(true));
    assert_eq!(st.w_trajectory.len(), grid.count());
    // zero start reaches the same fixed point
    let zero = picard_solve_v(
        &v0,
        &grid,
        &PicardConfig {
            start: PicardStart::Zero,
            ..cfg.clone()
        },
    )
    .unwrap();
    assert!(zero.final_field().relative_l2_distance(st.final_field()).unwrap() < 1e-8);
}

#[test]
fn iteration_budget_is_reported() {
    let v0 = small_seed();
    let grid = trapezoid(0.5, 8);
    let cfg = PicardConfig {
        max_iter: 1,
        tol: 1e-14,
        ..Default::default()
    };
    assert!(matches!(picard_solve_v(&v0, &grid, &cfg), Err(NsxError::NoConvergence { iterations: 1, .. })));
}

#[test]
fn split_and_unsplit_agree() {
    let v0 = small_seed();
    let u0 = v0.scaled(0.6);
    let w0 = v0.scaled(0.4);
    let grid = trapezoid(0.5, 8);
    let gap = split_consistency(&u0, &w0, &grid, &PicardConfig::default()).unwrap();
    assert!(gap < 1e-8, "{gap}");
}

#[test]
fn picard_csv_has_the_expected_header() {
    let v0 = small_seed();
    let st = picard_solve_v(&v0, &trapezoid(0.5, 8), &PicardConfig::default()).unwrap();
    let mut buf = Vec::new();
    st.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "iterate,node_time,weighted_Lq_residual,weighted_grad_L3,in_K_ball"
    );
    assert_eq!(text.lines().count(), 1 + st.rows.len());
}

proptest! {
    #[test]
    fn beta_symmetry_and_recurrence(a in 0.05f64..5.0, b in 0.05f64..5.0) {
        let ab = beta_function(a, b).unwrap();
        prop_assert!((ab / beta_function(b, a).unwrap() - 1.0).abs() < 1e-13);
        let sum = beta_function(a + 1.0, b).unwrap() + beta_function(a, b + 1.0).unwrap();
        prop_assert!((sum / ab - 1.0).abs() < 1e-12);
        prop_assert!((beta_function(a + 1.0, b).unwrap() / ab - a / (a + b)).abs() < 1e-12);
    }

    #[test]
    fn small_ball_pairs_are_admissible(q in 3.01f64..200.0) {
        for (a, b) in small_ball_beta_pairs(q) {
            prop_assert!(a > 0.0 && b > 0.0);
            prop_assert!(beta_function(a, b).unwrap().is_finite());
        }
    }
}
