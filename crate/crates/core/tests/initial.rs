use nsx_core::initial::calibration::{calibrate_c, Calibration};
use nsx_core::initial::{
    apply_scissors_scaling, bootstrap_constants, check_condition, make_divfree_seed, scissors_split,
    two_seed_construction, BootstrapInputs, ConditionId, ConditionInputs, SeedSpec, DEFAULT_THETA,
};
use nsx_core::norms::{lp, scale_field, ScalingParams};
use nsx_core::spectral::GridSpec;
use nsx_core::NsxError;
use proptest::prelude::*;

fn grid() -> GridSpec {
    GridSpec::new(32, 16.0).unwrap()
}

#[test]
fn scissors_parts_sum_back() {
    let g = grid();
    let theta = make_divfree_seed(&SeedSpec::gaussian_curl(1.5, 0.8), &g).unwrap();
    let params = ScalingParams {
        split_fraction: 0.3,
        ..Default::default()
    };
    let (u0, w0) = scissors_split(&theta, &params).unwrap();
    assert!(u0.try_add(&w0).unwrap().relative_l2_distance(&theta).unwrap() < 1e-15);
    assert!(w0.relative_l2_distance(&theta.scaled(0.3)).unwrap() < 1e-15);
    assert!(u0.relative_l2_distance(&theta.scaled(0.7)).unwrap() < 1e-15);
}

#[test]
fn split_fraction_outside_unit_interval_is_refused() {
    let g = grid();
    let theta = make_divfree_seed(&SeedSpec::gaussian_curl(1.5, 0.8), &g).unwrap();
    for eps in [0.0, -0.1, 1.5, f64::NAN] {
        let params = ScalingParams {
            split_fraction: eps,
            ..Default::default()
        };
        assert!(matches!(scissors_split(&theta, &params), Err(NsxError::InvalidArgument(_))));
    }
}

#[test]
fn two_routes_agree_on_a_single_seed() {
    let g = grid();
    let theta = make_divfree_seed(&SeedSpec::gaussian_curl(1.5, 0.8), &g).unwrap();
    let params = ScalingParams {
        lambda_tilde: 0.75,
        lambda_hat: 1.5,
        split_fraction: 0.25,
    };
    // route one: split first, rescale the parts
    let (u0, w0) = scissors_split(&theta, &params).unwrap();
    let a = apply_scissors_scaling(&u0, &w0, &params).unwrap();
    // route two: rescale (1 - eps) theta and theta separately, then weight
    let b = two_seed_construction(&theta.scaled(1.0 - params.split_fraction), &theta, &params).unwrap();
    assert!(a.v0.relative_l2_distance(&b.v0).unwrap() < 1e-13);
    assert!((a.w0_l3 - b.w0_l3).abs() < 1e-13);
    assert!(a.triangle_holds && b.triangle_holds);
    // the perturbation part is the rescaled field times eps
    let direct = scale_field(&theta, params.lambda_hat).unwrap().scaled(params.split_fraction);
    assert!(a.w0.relative_l2_distance(&direct).unwrap() < 1e-13);
}

#[test]
fn critical_size_of_parts_tracks_the_split() {
    let g = GridSpec::new(64, 16.0).unwrap();
    let theta = make_divfree_seed(&SeedSpec::gaussian_curl(1.5, 0.8), &g).unwrap();
    let l3 = lp(&theta, 3.0).unwrap();
    let params = ScalingParams {
        lambda_tilde: 0.5,
        lambda_hat: 1.25,
        split_fraction: 0.2,
    };
    let (u0, w0) = scissors_split(&theta, &params).unwrap();
    let out = apply_scissors_scaling(&u0, &w0, &params).unwrap();
    assert!((out.w0_l3 / (0.2 * l3) - 1.0).abs() < 1e-3);
    assert!((out.u0_l3 / (0.8 * l3) - 1.0).abs() < 1e-3);
}

#[test]
fn no_closure_reports_discriminant() {
    // C = 1, T = 1, m = 0: discriminant 1 - 4 ||w0||
    let err = bootstrap_constants(&BootstrapInputs::perturbation_only(0.3, 1.0, 1.0)).unwrap_err();
    match err {
        NsxError::NoClosure { discriminant } => assert!((discriminant + 0.2).abs() < 1e-14),
        other => panic!("unexpected {other:?}"),
    }
    assert!(bootstrap_constants(&BootstrapInputs::perturbation_only(0.25, 1.0, 1.0)).is_ok());
}

#[test]
fn bootstrap_rejects_bad_inputs() {
    assert!(matches!(
        bootstrap_constants(&BootstrapInputs::perturbation_only(0.1, 0.0, 1.0)),
        Err(NsxError::InvalidTime(_))
    ));
    assert!(matches!(
        bootstrap_constants(&BootstrapInputs::perturbation_only(-0.1, 1.0, 1.0)),
        Err(NsxError::InvalidArgument(_))
    ));
    assert!(matches!(
        bootstrap_constants(&BootstrapInputs::perturbation_only(0.1, 1.0, 0.0)),
        Err(NsxError::InvalidArgument(_))
    ));
}

proptest! {
    #[test]
    fn bootstrap_root_solves_the_quadratic(
        c in 0.2f64..3.0,
        w in 0.0f64..0.05,
        m in 0.0f64..0.1,
        t in 0.01f64..4.0,
    ) {
        let inp = BootstrapInputs { w0_l3: w, u0_lq: m, grad_u0_l3: 0.5 * m, u0_l3: m, t_final: t, constant: c };
        match bootstrap_constants(&inp) {
            Ok(r) => {
                let b = 2.0 * c * t.sqrt() * m - 1.0;
                let k = r.k;
                let resid = c * k * k + b * k + c * (w + t * m * m);
                prop_assert!(resid.abs() < 1e-12 * (1.0 + k));
                prop_assert!(k >= 0.0);
                // smaller root
                let other = (-b + r.discriminant.sqrt()) / (2.0 * c);
                prop_assert!(k <= other * (1.0 + 1e-12));
                prop_assert!((r.m_v - r.m_u - r.m_w).abs() < 1e-15);
            }
            Err(NsxError::NoClosure { discriminant }) => prop_assert!(discriminant < 0.0),
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn small_ball_radius_formula(c in 0.2f64..3.0, frac in 0.0f64..1.0) {
        // a ranges over [0, 1/(16 C^2)], where the radius is real
        let w = frac / (16.0 * c * c);
        let r = bootstrap_constants(&BootstrapInputs::perturbation_only(w, 1.0, c)).unwrap();
        let kp = r.k_prime.unwrap();
        prop_assert!((2.0 * c * kp * kp - kp + 2.0 * c * w).abs() < 1e-12);
    }
}

#[test]
fn condition_thresholds() {
    let c: f64 = 0.8;
    let cal = Calibration::uniform(c);
    let inp = ConditionInputs {
        t_final: 4.0,
        u0_lq: Some(0.01),
        grad_u0_l3: Some(0.02),
        u0_l2: Some(0.05),
        w0_l3: Some(0.1),
        max_w_l3: Some(0.1),
        partition_intervals: Some(3),
    };
    let check = |id| check_condition(id, &inp, DEFAULT_THETA, &cal).unwrap();
    let r = check(ConditionId::StokesSmallness);
    assert!((r.lhs - 0.04).abs() < 1e-15 && (r.threshold - 0.125 / c).abs() < 1e-15 && r.pass);
    let r = check(ConditionId::PerturbationSmallness);
    assert!(r.pass && r.condition_id == 17);
    let r = check(ConditionId::GlobalPerturbation);
    assert!((r.threshold - 1.0 / (4.0 * c)).abs() < 1e-15);
    let r = check(ConditionId::PerturbationTrajectory);
    assert!(r.pass && (r.threshold - 1.0 / (8.0 * c)).abs() < 1e-15);
    let r = check(ConditionId::StokesEnergy);
    assert!((r.lhs - 0.05 / 2f64.sqrt()).abs() < 1e-15);
    let r = check(ConditionId::BallRadius);
    assert!((r.lhs - (1.0 - (1.0 - 4.0 * c * c * 0.1f64).sqrt())).abs() < 1e-15);
    assert!(r.pass && r.threshold == 0.25);
    let r = check(ConditionId::StabilityPerturbation);
    assert!((r.threshold - 1.0 / (8.0 * c * (2.0 * c).powi(3))).abs() < 1e-15);
}

#[test]
fn missing_norm_is_an_argument_error() {
    let cal = Calibration::uniform(1.0);
    let inp = ConditionInputs {
        t_final: 1.0,
        ..Default::default()
    };
    assert!(matches!(
        check_condition(ConditionId::StokesSmallness, &inp, DEFAULT_THETA, &cal),
        Err(NsxError::InvalidArgument(_))
    ));
    assert!(matches!(
        check_condition(ConditionId::StabilityPerturbation, &inp, DEFAULT_THETA, &cal),
        Err(NsxError::InvalidArgument(_))
    ));
}

#[test]
fn calibration_is_deterministic_and_round_trips() {
    let g = GridSpec::new(16, 16.0).unwrap();
    let (c1, a) = calibrate_c(11, &g, 6).unwrap();
    let (c2, b) = calibrate_c(11, &g, 6).unwrap();
    assert_eq!(c1, c2);
    assert_eq!(a.hash(), b.hash());
    assert!(c1 > 0.0 && c1.is_finite());
    assert!(a.matches(11, &g) && !a.matches(12, &g));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cal.json");
    a.save(&path).unwrap();
    let back = Calibration::load(&path).unwrap();
    assert_eq!(back, a);
    assert_eq!(back.universal().unwrap(), c1);
    let (_, other) = calibrate_c(12, &g, 6).unwrap();
    assert_ne!(other.hash(), a.hash());
}
