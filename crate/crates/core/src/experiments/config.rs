use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{NsxError, Result};
use crate::initial::{SeedSpec, DEFAULT_THETA};
use crate::leray::{Scheme, TimeStepper};
use crate::mild::{DuhamelGrid, DuhamelRule, PicardConfig, PicardStart};
use crate::norms::ScalingParams;
use crate::spectral::{GridSpec, MollifierSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Thm22,
    Thm23,
    Stability51,
    Thm52,
    Sweep,
    Verify,
}

/// Which scales the two parts of the datum receive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ScalingVariant {
    /// Stokes part by lambda_tilde, perturbation by lambda_hat.
    #[default]
    Distinct,
    /// Both parts by lambda_tilde.
    Shared,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedConfig {
    /// Seed for the whole datum, or for the Stokes part when a second seed
    /// is given.
    pub primary: SeedSpec,
    /// Independent perturbation seed (two-seed route).
    #[serde(default)]
    pub perturbation: Option<SeedSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DuhamelConfig {
    #[serde(default = "default_nodes")]
    pub nodes: usize,
    #[serde(default = "default_grading")]
    pub grading_exponent: f64,
    #[serde(default)]
    pub rule: DuhamelRule,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub start: PicardStart,
    /// Mirror the direct solver's mollifier inside the Picard forcing.
    #[serde(default)]
    pub mollify: bool,
}

fn default_nodes() -> usize {
    64
}
fn default_grading() -> f64 {
    2.0
}
fn default_max_iter() -> usize {
    40
}
fn default_tol() -> f64 {
    1e-10
}

impl Default for DuhamelConfig {
    fn default() -> Self {
        Self {
            nodes: default_nodes(),
            grading_exponent: default_grading(),
            rule: DuhamelRule::GradedTrapezoid,
            max_iter: default_max_iter(),
            tol: default_tol(),
            start: PicardStart::Caloric,
            mollify: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationConfig {
    #[serde(default = "default_corpus_seed")]
    pub corpus_seed: u64,
    #[serde(default = "default_corpus_size")]
    pub corpus_size: usize,
    /// Points per axis of the calibration grid (box length as the run).
    #[serde(default = "default_calibration_n")]
    pub n_per_axis: usize,
    /// Existing calibration file to reuse when it matches.
    #[serde(default)]
    pub path: Option<PathBuf>,
}

fn default_corpus_seed() -> u64 {
    7
}
fn default_corpus_size() -> usize {
    crate::initial::calibration::DEFAULT_CORPUS_SIZE
}
fn default_calibration_n() -> usize {
    32
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        Self {
            corpus_seed: default_corpus_seed(),
            corpus_size: default_corpus_size(),
            n_per_axis: default_calibration_n(),
            path: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct SweepAxes {
    #[serde(default)]
    pub lambda_tilde: Vec<f64>,
    #[serde(default)]
    pub lambda_hat: Vec<f64>,
    #[serde(default)]
    pub split_fraction: Vec<f64>,
    #[serde(default)]
    pub t_final: Vec<f64>,
    /// Also integrate each cell with the direct solver.
    #[serde(default)]
    pub evolve: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    #[serde(default = "default_verify_fields")]
    pub fields: usize,
    #[serde(default = "default_calibration_n")]
    pub n_per_axis: usize,
}

fn default_verify_fields() -> usize {
    200
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            fields: default_verify_fields(),
            n_per_axis: default_calibration_n(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub grid: GridSpec,
    pub stepper: TimeStepper,
    pub seed: SeedConfig,
    #[serde(default)]
    pub scaling: ScalingParams,
    #[serde(default)]
    pub scaling_variant: ScalingVariant,
    #[serde(default = "default_q")]
    pub exponent_q: f64,
    #[serde(default = "default_theta")]
    pub threshold_theta: f64,
    #[serde(default)]
    pub mollifier: Option<MollifierSpec>,
    #[serde(default)]
    pub duhamel: DuhamelConfig,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub rng_seed: u64,
    #[serde(default)]
    pub calibration: CalibrationConfig,
    /// Continuation horizon as a multiple of t_final.
    #[serde(default = "default_horizon")]
    pub horizon_factor: f64,
    /// Step used past t_final; defaults to the stepper's dt.
    #[serde(default)]
    pub horizon_dt: Option<f64>,
    #[serde(default = "default_eps_a")]
    pub eps_a: f64,
    #[serde(default = "default_perturbation_scale")]
    pub perturbation_scale: f64,
    #[serde(default)]
    pub sweep: SweepAxes,
    #[serde(default)]
    pub verify: VerifyConfig,
    /// Times (from the start) at which snapshots are written.
    #[serde(default)]
    pub snapshot_times: Vec<f64>,
}

fn default_q() -> f64 {
    6.0
}
fn default_theta() -> f64 {
    DEFAULT_THETA
}
fn default_horizon() -> f64 {
    20.0
}
fn default_eps_a() -> f64 {
    0.05
}
fn default_perturbation_scale() -> f64 {
    0.5
}

impl RunConfig {
    /// The reference two-scale datum on a 48^3 box of side 16.
    pub fn reference(scenario: Scenario) -> Self {
        let grid = GridSpec::new(48, 16.0).expect("valid grid");
        let mut cfg = Self {
            scenario,
            grid,
            stepper: TimeStepper::new(Scheme::IntegratingFactorRk4, 0.01, 2.0),
            seed: SeedConfig {
                primary: SeedSpec::gaussian_curl(2.0, 0.25),
                perturbation: None,
            },
            scaling: ScalingParams {
                lambda_tilde: 0.5,
                lambda_hat: 4.0 / 3.0,
                split_fraction: 0.5,
            },
            scaling_variant: ScalingVariant::Distinct,
            exponent_q: default_q(),
            threshold_theta: default_theta(),
            mollifier: Some(MollifierSpec::bump(0.75)),
            duhamel: DuhamelConfig::default(),
            output_dir: None,
            rng_seed: 11,
            calibration: CalibrationConfig::default(),
            horizon_factor: default_horizon(),
            horizon_dt: None,
            eps_a: default_eps_a(),
            perturbation_scale: default_perturbation_scale(),
            sweep: SweepAxes::default(),
            verify: VerifyConfig::default(),
            snapshot_times: Vec::new(),
        };
        if scenario == Scenario::Thm23 {
            cfg.stepper = TimeStepper::new(Scheme::IntegratingFactorRk4, 0.005, 0.5);
            cfg.horizon_dt = Some(0.02);
            cfg.seed = SeedConfig {
                primary: SeedSpec::gaussian_curl(1.5, 0.06),
                perturbation: Some(SeedSpec::taylor_green(2.0, 0.15)),
            };
            cfg.scaling = ScalingParams {
                lambda_tilde: 1.0,
                lambda_hat: 1.0,
                split_fraction: 1.0,
            };
            cfg.scaling_variant = ScalingVariant::Shared;
        }
        if scenario == Scenario::Thm52 {
            cfg.horizon_factor = 5.0;
            cfg.eps_a = 0.1;
            cfg.horizon_dt = Some(0.05);
        }
        cfg
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg: Self = serde_json::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        self.stepper.validate(&self.grid)?;
        self.scaling.validate()?;
        if !(self.exponent_q > 3.0 && self.exponent_q.is_finite()) {
            return Err(NsxError::Config(format!("exponent_q must exceed 3, got {}", self.exponent_q)));
        }
        if !(self.threshold_theta > 0.0) {
            return Err(NsxError::Config("threshold_theta must be positive".into()));
        }
        if !(self.horizon_factor >= 1.0) {
            return Err(NsxError::Config("horizon_factor must be at least 1".into()));
        }
        if !(self.eps_a > 0.0) || !(self.perturbation_scale > 0.0) {
            return Err(NsxError::Config("eps_a and perturbation_scale must be positive".into()));
        }
        self.duhamel_grid()?;
        Ok(())
    }

    pub fn duhamel_grid(&self) -> Result<DuhamelGrid> {
        DuhamelGrid::graded(self.stepper.t_final, self.duhamel.nodes, self.duhamel.grading_exponent, self.duhamel.rule)
    }

    pub fn picard_config(&self, k_ball_radius: Option<f64>) -> PicardConfig {
        PicardConfig {
            max_iter: self.duhamel.max_iter,
            tol: self.duhamel.tol,
            exponent_q: self.exponent_q,
            start: self.duhamel.start,
            forcing: Default::default(),
            mollifier: if self.duhamel.mollify { self.mollifier } else { None },
            k_ball_radius,
        }
    }

    pub fn calibration_grid(&self) -> Result<GridSpec> {
        GridSpec::new(self.calibration.n_per_axis, self.grid.box_length)
    }

    pub fn horizon(&self) -> f64 {
        self.horizon_factor * self.stepper.t_final
    }

    pub fn mollifier_width(&self) -> f64 {
        self.mollifier.map(|m| m.width).unwrap_or(0.0)
    }
}
