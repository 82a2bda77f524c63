use nsx_core::initial::{make_divfree_seed, SeedSpec};
use nsx_core::leray::monitor::cumulative_hermite;
use nsx_core::leray::{
    assumption_a_monitor, evolve, evolve_pair, evolve_split, find_t_star, poisson_residual, recover_pressure,
    recover_pressure_difference, Dynamics, EvolveOptions, Scheme, TimeStepper, TrajectoryMonitor,
};
use nsx_core::spectral::{heat_propagate, sample_grid, GridSpec, MollifierSpec, SpectralVectorField};
use nsx_core::NsxError;
use proptest::prelude::*;

fn grid() -> GridSpec {
    GridSpec::new(16, 16.0).unwrap()
}

fn seed(r: f64, a: f64) -> SpectralVectorField {
    make_divfree_seed(&SeedSpec::gaussian_curl(r, a), &grid()).unwrap()
}

fn stokes_opts() -> EvolveOptions {
    EvolveOptions {
        dynamics: Dynamics::Stokes,
        ..Default::default()
    }
}

#[test]
fn stokes_dynamics_is_the_heat_flow() {
    let v0 = seed(2.0, 1.0);
    let st = TimeStepper::new(Scheme::IntegratingFactorRk4, 0.05, 1.0);
    let run = evolve(&v0, None, &st, &stokes_opts()).unwrap();
    let exact = heat_propagate(&v0, 1.0).unwrap();
    assert!(run.final_state.relative_l2_distance(&exact).unwrap() < 1e-13);
    // the semi-implicit scheme is second order on the linear part
    let st = TimeStepper::new(Scheme::ImexCnAb2, 0.01, 1.0);
    let run = evolve(&v0, None, &st, &stokes_opts()).unwrap();
    assert!(run.final_state.relative_l2_distance(&exact).unwrap() < 1e-3);
}

#[test]
fn stokes_energy_balance_closes() {
    let v0 = seed(2.0, 1.0);
    let st = TimeStepper::new(Scheme::IntegratingFactorRk4, 0.01, 1.0);
    let run = evolve(&v0, None, &st, &stokes_opts()).unwrap();
    assert!(run.monitor.max_relative_energy_residual() < 1e-8);
    assert!(run.monitor.energy_inequality_holds(1.0));
}

#[test]
fn navier_stokes_energy_balance_closes() {
    let v0 = seed(2.0, 2.0);
    let st = TimeStepper::new(Scheme::IntegratingFactorRk4, 0.01, 1.0);
    let run = evolve(&v0, Some(MollifierSpec::bump(2.0)), &st, &EvolveOptions::default()).unwrap();
    assert!(run.monitor.max_relative_energy_residual() < 1e-6);
    assert!(run.monitor.divergence.iter().all(|d| *d < 1e-12));
}

#[test]
fn split_parts_sum_to_the_full_flow() {
    let v0 = seed(2.0, 2.0);
    let u0 = v0.scaled(0.7);
    let w0 = v0.scaled(0.3);
    let st = TimeStepper::new(Scheme::IntegratingFactorRk4, 0.01, 0.5);
    let moll = Some(MollifierSpec::bump(2.0));
    let split = evolve_split(&u0, &w0, moll, &st, &EvolveOptions::default()).unwrap();
    let sum = split.w.final_state.try_add(&split.u.final_state).unwrap();
    assert!(sum.relative_l2_distance(&split.v.final_state).unwrap() < 1e-14);
    let full = evolve(&v0, moll, &st, &EvolveOptions::default()).unwrap();
    assert!(split.v.final_state.relative_l2_distance(&full.final_state).unwrap() < 1e-12);
    // w alone is the flow from w0
    let w_alone = evolve(&w0, moll, &st, &EvolveOptions::default()).unwrap();
    assert!(split.w.final_state.relative_l2_distance(&w_alone.final_state).unwrap() < 1e-12);
}

#[test]
fn paired_difference_monitor() {
    let v0 = seed(2.0, 1.0);
    let st = TimeStepper::new(Scheme::IntegratingFactorRk4, 0.02, 0.4);
    let pair = evolve_pair(&v0, &v0, None, &st, &EvolveOptions::default()).unwrap();
    assert!(pair.difference.l3.iter().all(|x| *x == 0.0));
    assert_eq!(pair.difference.times, pair.base.monitor.times);
}

#[test]
fn schemes_agree_at_small_step() {
    let v0 = seed(2.0, 2.0);
    let moll = Some(MollifierSpec::bump(2.0));
    let a = evolve(&v0, moll, &TimeStepper::new(Scheme::IntegratingFactorRk4, 0.01, 0.5), &EvolveOptions::default())
        .unwrap();
    let b = evolve(&v0, moll, &TimeStepper::new(Scheme::ImexCnAb2, 0.002, 0.5), &EvolveOptions::default()).unwrap();
    assert!(a.final_state.relative_l2_distance(&b.final_state).unwrap() < 1e-4);
}

#[test]
fn diffusive_guard_refuses_large_steps() {
    let v0 = seed(2.0, 1.0);
    // dx = 1, guard 0.5 dx^2
    let st = TimeStepper::new(Scheme::IntegratingFactorRk4, 0.6, 1.2);
    match evolve(&v0, None, &st, &EvolveOptions::default()) {
        Err(NsxError::StepTooLarge { dt, limit }) => {
            assert_eq!(dt, 0.6);
            assert!((limit - 0.5).abs() < 1e-15);
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn non_solenoidal_data_are_refused() {
    let g = grid();
    let s = sample_grid(&g, |x| (2.0 * std::f64::consts::PI * x[0] / g.box_length).sin());
    let z = vec![0.0; g.physical_len()];
    let f = SpectralVectorField::from_physical(g, &[s, z.clone(), z]).unwrap();
    let st = TimeStepper::new(Scheme::IntegratingFactorRk4, 0.05, 0.5);
    assert!(matches!(evolve(&f, None, &st, &EvolveOptions::default()), Err(NsxError::InvalidArgument(_))));
}

#[test]
fn snapshots_land_on_requested_times() {
    let v0 = seed(2.0, 1.0);
    let st = TimeStepper::new(Scheme::IntegratingFactorRk4, 0.05, 1.0);
    let opts = EvolveOptions {
        dynamics: Dynamics::Stokes,
        snapshot_times: vec![0.5, 0.25],
        ..Default::default()
    };
    let run = evolve(&v0, None, &st, &opts).unwrap();
    assert_eq!(run.snapshots.len(), 2);
    let exact = heat_propagate(&v0, 0.25).unwrap();
    assert!(run.snapshots[0].relative_l2_distance(&exact).unwrap() < 1e-13);
}

#[test]
fn monitor_csv_header() {
    let v0 = seed(2.0, 1.0);
    let st = TimeStepper::new(Scheme::IntegratingFactorRk4, 0.1, 0.5);
    let run = evolve(&v0, None, &st, &stokes_opts()).unwrap();
    let mut buf = Vec::new();
    run.monitor.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "t,l2,l3,l6,grad_l2,grad_l3,decay18,decay19,energy_residual,tail_fraction"
    );
    assert_eq!(text.lines().count(), 1 + run.monitor.len());
}

fn synthetic(times: Vec<f64>, l3: Vec<f64>, l2: Vec<f64>) -> TrajectoryMonitor {
    let n = times.len();
    TrajectoryMonitor {
        times,
        l3,
        l2,
        grad_l2: vec![0.0; n],
        dissipation_slope: vec![0.0; n],
        ..TrajectoryMonitor::new(6.0)
    }
}

#[test]
fn t_star_is_first_small_sample_after_the_start() {
    let c = 1.0;
    // threshold 1/8; the start sample is below it but excluded
    let mon = synthetic(vec![0.0, 0.1, 0.2, 0.3, 0.4], vec![0.1, 0.2, 0.13, 0.12, 0.05], vec![1.0; 5]);
    let r = find_t_star(&mon, 0.4, c).unwrap();
    assert_eq!(r.threshold, 0.125);
    assert_eq!(r.t_star, Some(0.3));
    // the window ends at T
    let r = find_t_star(&mon, 0.25, c).unwrap();
    assert_eq!(r.t_star, None);
    // ∫ ||u||_3^4 against C ||u0||_2^4 = 1
    assert!(r.integral_bound_holds && r.integral_bound == 1.0);
    assert!(find_t_star(&TrajectoryMonitor::new(6.0), 1.0, c).is_err());
}

#[test]
fn assumption_a_from_an_exact_energy_profile() {
    // ||v||² = e^{-2t}, ||grad v||² = e^{-2t}: the energy equality holds exactly
    let times: Vec<f64> = (0..=200).map(|i| i as f64 * 0.01).collect();
    let l2: Vec<f64> = times.iter().map(|t| (-t).exp()).collect();
    let mut mon = synthetic(times.clone(), vec![0.3; times.len()], l2.clone());
    mon.grad_l2 = l2.clone();
    mon.dissipation_slope = times.iter().map(|t| -2.0 * (-2.0 * t).exp()).collect();
    let t_final = 2.0;
    let dissipated = 0.5 * (1.0 - (-2.0f64).exp());
    let residual = (dissipated - 0.5f64).abs();
    let r = assumption_a_monitor(&mon, t_final, residual * 1.01, 1.0).unwrap();
    assert!((r.residual / residual - 1.0).abs() < 1e-8);
    assert!(r.holds);
    assert!((r.v_half_l2 - (-1.0f64).exp()).abs() < 1e-4);
    let chain = r.chain.unwrap();
    assert_eq!(chain.inf_l3, 0.3);
    assert!(!assumption_a_monitor(&mon, t_final, residual * 0.99, 1.0).unwrap().holds);
    assert!(assumption_a_monitor(&mon, t_final, 0.0, 1.0).is_err());
    assert!(assumption_a_monitor(&mon, 5.0, 0.1, 1.0).is_err());
}

#[test]
fn taylor_green_pressure() {
    let g = GridSpec::new(16, 2.0 * std::f64::consts::PI).unwrap();
    let vx = sample_grid(&g, |x| x[0].sin() * x[1].cos());
    let vy = sample_grid(&g, |x| -x[0].cos() * x[1].sin());
    let z = vec![0.0; g.physical_len()];
    let v = SpectralVectorField::from_physical(g, &[vx, vy, z]).unwrap();
    let p = recover_pressure(&v);
    let expect = sample_grid(&g, |x| 0.25 * ((2.0 * x[0]).cos() + (2.0 * x[1]).cos()));
    let got = p.q.to_physical();
    let err = got.iter().zip(&expect).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(err < 1e-13, "{err}");
    assert!(poisson_residual(&p) < 1e-14);
}

#[test]
fn difference_pressure_is_the_bilinear_increment() {
    let v = seed(2.0, 1.0);
    let w = make_divfree_seed(&SeedSpec::gaussian_curl(1.5, 0.7).with_center([1.0, -0.5, 0.3]), &grid()).unwrap();
    let full = recover_pressure(&v.try_add(&w).unwrap());
    let base = recover_pressure(&v);
    let diff = recover_pressure_difference(&v, &w).unwrap();
    let scale = full.q.coefficients.iter().map(|z| z.norm()).fold(0.0, f64::max);
    for ((a, b), c) in full.q.coefficients.iter().zip(&base.q.coefficients).zip(&diff.q.coefficients) {
        assert!((a - b - c).norm() < 1e-12 * scale);
    }
    assert!(poisson_residual(&diff) < 1e-14);
}

proptest! {
    #[test]
    fn corrected_trapezoid_is_exact_for_cubics(
        c in prop::array::uniform4(-2.0f64..2.0),
        steps in prop::collection::vec(0.01f64..0.3, 2..20),
    ) {
        let mut t = vec![0.0];
        for h in &steps {
            t.push(t.last().unwrap() + h);
        }
        let f: Vec<f64> = t.iter().map(|x| c[0] + c[1] * x + c[2] * x * x + c[3] * x * x * x).collect();
        let df: Vec<f64> = t.iter().map(|x| c[1] + 2.0 * c[2] * x + 3.0 * c[3] * x * x).collect();
        let (cum, _) = cumulative_hermite(&t, &f, &df);
        for (x, got) in t.iter().zip(&cum) {
            let exact = c[0] * x + c[1] * x * x / 2.0 + c[2] * x.powi(3) / 3.0 + c[3] * x.powi(4) / 4.0;
            prop_assert!((got - exact).abs() < 1e-12 * (1.0 + exact.abs()));
        }
    }
}
