use nsx_core::experiments::{
    build_datum, execute, obtain_calibration, run_stability51, run_sweep, run_thm22, run_thm23, run_thm52,
    stability_baseline, run_stability51_from, sweep_cells, Command, RunConfig, Scenario, CALIBRATION_FILE,
};
use nsx_core::initial::{Calibration, SeedSpec};
use nsx_core::leray::{Scheme, TimeStepper};
use nsx_core::spectral::{GridSpec, MollifierSpec};
use nsx_core::NsxError;

/// A 16^3 version of the reference configuration that runs in seconds.
fn small(scenario: Scenario) -> RunConfig {
    let mut cfg = RunConfig::reference(scenario);
    cfg.grid = GridSpec::new(16, 16.0).unwrap();
    cfg.stepper = TimeStepper::new(Scheme::IntegratingFactorRk4, 0.05, cfg.stepper.t_final);
    cfg.horizon_dt = Some(0.1);
    cfg.mollifier = Some(MollifierSpec::bump(2.0));
    cfg.duhamel.nodes = 16;
    cfg.calibration.n_per_axis = 16;
    cfg.calibration.corpus_size = 8;
    if scenario == Scenario::Thm23 {
        cfg.horizon_factor = 4.0;
    }
    cfg
}

fn cal() -> Calibration {
    Calibration::uniform(0.64)
}

#[test]
fn config_round_trips_through_json() {
    let cfg = small(Scenario::Thm22);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    std::fs::write(&path, cfg.to_json().unwrap()).unwrap();
    assert_eq!(RunConfig::load(&path).unwrap(), cfg);
}

#[test]
fn invalid_configs_are_refused() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    let mut cfg = small(Scenario::Thm22);
    cfg.exponent_q = 2.5;
    std::fs::write(&path, cfg.to_json().unwrap()).unwrap();
    assert!(matches!(RunConfig::load(&path), Err(NsxError::Config(_))));

    let mut cfg = small(Scenario::Thm22);
    cfg.stepper.dt = 0.9;
    std::fs::write(&path, cfg.to_json().unwrap()).unwrap();
    assert!(matches!(RunConfig::load(&path), Err(NsxError::StepTooLarge { .. })));

    std::fs::write(&path, "{\"scenario\": \"thm22\"}").unwrap();
    assert!(matches!(RunConfig::load(&path), Err(NsxError::Config(_))));
}

#[test]
fn final_time_guards() {
    let mut cfg = small(Scenario::Thm22);
    cfg.stepper.t_final = 0.5;
    assert!(matches!(run_thm22(&cfg, &cal()), Err(NsxError::Config(_))));
    assert!(matches!(run_thm52(&cfg, &cal()), Err(NsxError::Config(_))));
    let mut cfg = small(Scenario::Thm23);
    cfg.stepper.t_final = 1.5;
    assert!(matches!(run_thm23(&cfg, &cal()), Err(NsxError::Config(_))));
}

#[test]
fn small_reference_datum_is_in_hypothesis() {
    let out = run_thm22(&small(Scenario::Thm22), &cal()).unwrap().report;
    assert_eq!(out.label, "in-hypothesis");
    assert!(out.conditions.iter().all(|c| c.pass));
    assert!(out.mild.converged);
    // coarse step; the tight ledger check lives in the acceptance run
    assert!(out.direct.energy_max_relative_residual < 1e-4);
}

#[test]
fn whole_datum_as_perturbation_is_out_of_hypothesis() {
    let mut cfg = small(Scenario::Thm22);
    cfg.seed.primary = SeedSpec::gaussian_curl(2.0, 2.0);
    cfg.scaling.split_fraction = 1.0;
    cfg.scaling.lambda_hat = 1.0;
    let out = run_thm22(&cfg, &cal()).unwrap().report;
    assert_eq!(out.label, "out-of-hypothesis");
    assert!(!out.conditions[1].pass);
}

#[test]
fn late_time_scenario_reports_every_condition() {
    let out = run_thm23(&small(Scenario::Thm23), &cal()).unwrap().report;
    let ids: Vec<u32> = out.conditions.iter().map(|c| c.condition_id).collect();
    assert_eq!(ids, vec![23, 26, 28, 25]);
    assert_eq!(out.horizon, 2.0);
    assert!(out.smoothness.finite);
}

#[test]
fn energy_scenario_runs_to_the_horizon() {
    let out = run_thm52(&small(Scenario::Thm52), &cal()).unwrap().report;
    assert_eq!(out.horizon, 10.0);
    assert!(out.assumption_a.chain.is_some());
    assert!(out.sup_l3_after_t_final.is_some());
}

#[test]
fn zero_perturbation_stays_zero() {
    let cfg = small(Scenario::Stability51);
    let baseline = stability_baseline(&cfg).unwrap();
    let out = run_stability51_from(&cfg, &cal(), &baseline, 0.0).unwrap().report;
    assert_eq!(out.w0_l3, 0.0);
    assert_eq!(out.sup_w_l3, 0.0);
    assert!(out.envelope_holds);
    assert!(run_stability51_from(&cfg, &cal(), &baseline, -1.0).is_err());
    let full = run_stability51(&cfg, &cal()).unwrap().report;
    assert!((full.w0_l3 / (cfg.perturbation_scale * full.perturbation_threshold) - 1.0).abs() < 1e-12);
    assert_eq!(full.partition.first(), Some(&0.0));
    assert_eq!(full.partition.last(), Some(&cfg.stepper.t_final));
}

#[test]
fn sweep_shrinks_the_stokes_condition_with_the_scale() {
    let mut cfg = small(Scenario::Sweep);
    cfg.sweep.lambda_tilde = vec![1.0, 0.75, 0.5];
    cfg.sweep.t_final = vec![0.5, 2.0];
    assert_eq!(sweep_cells(&cfg).len(), 6);
    let r = run_sweep(&cfg, &cal()).unwrap();
    assert_eq!(r.cells.len(), 6);
    assert!(r.cells.iter().all(|c| c.error.is_none()));
    // T = 2 cells use the finite-time pair
    let lhs: Vec<f64> = r.cells.iter().skip(1).step_by(2).map(|c| c.conditions[0].lhs).collect();
    assert!(lhs.windows(2).all(|w| w[1] < w[0]), "{lhs:?}");
    assert!(r.cells.iter().step_by(2).all(|c| c.conditions.len() == 3));
}

#[test]
fn construct_is_deterministic() {
    let cfg = small(Scenario::Thm22);
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let ra = execute(Command::Construct, &cfg, None, a.path()).unwrap();
    let rb = execute(Command::Construct, &cfg, None, b.path()).unwrap();
    assert_eq!(ra, rb);
    for f in ["report.json", "snapshots/v0.nssf", "snapshots/w0.nssf"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
    let d = build_datum(&cfg).unwrap();
    assert!(d.parts.triangle_holds);
}

#[test]
fn calibrated_commands_need_a_calibration() {
    let dir = tempfile::tempdir().unwrap();
    let err = execute(Command::Thm22, &small(Scenario::Thm22), None, dir.path()).unwrap_err();
    assert_eq!(err, NsxError::NotCalibrated);
}

#[test]
fn evolve_writes_monitors_and_snapshots() {
    let mut cfg = small(Scenario::Thm22);
    cfg.snapshot_times = vec![1.0];
    let dir = tempfile::tempdir().unwrap();
    let r = execute(Command::Evolve, &cfg, None, dir.path()).unwrap();
    assert_eq!(r["steps"], 40);
    for f in ["report.json", "monitors.csv", "snapshots/v0.nssf", "snapshots/final.nssf", "snapshots/t000.nssf"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
}

#[test]
fn calibration_is_cached_in_the_output_directory() {
    let cfg = small(Scenario::Thm22);
    let dir = tempfile::tempdir().unwrap();
    let first = obtain_calibration(&cfg, Some(dir.path()), false).unwrap();
    assert!(dir.path().join(CALIBRATION_FILE).exists());
    // a planted file with matching seed and grid is reused as is
    let mut planted = first.clone();
    for r in &mut planted.records {
        r.constant = 0.5;
    }
    planted.save(&dir.path().join(CALIBRATION_FILE)).unwrap();
    let reused = obtain_calibration(&cfg, Some(dir.path()), false).unwrap();
    assert_eq!(reused.universal().unwrap(), 0.5);
    // forcing recalibrates and overwrites
    let fresh = obtain_calibration(&cfg, Some(dir.path()), true).unwrap();
    assert_eq!(fresh.hash(), first.hash());
    // a file for another corpus is ignored
    let mut other = cfg.clone();
    other.calibration.corpus_seed = 99;
    let recal = obtain_calibration(&other, Some(dir.path()), false).unwrap();
    assert!(recal.matches(99, &other.calibration_grid().unwrap()));
}
