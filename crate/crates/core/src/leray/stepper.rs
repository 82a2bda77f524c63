//! Time integration of ∂t v = Δv + N(v) for systems of spectral fields
//! with the diffusion handled exactly or semi-implicitly.

use serde::{Deserialize, Serialize};

use crate::error::{NsxError, Result};
use crate::spectral::wavenumbers::wavenumbers;
use crate::spectral::{heat_multiplier, GridSpec, SpectralVectorField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    #[default]
    IntegratingFactorRk4,
    ImexCnAb2,
}

impl Scheme {
    pub fn order(&self) -> u32 {
        match self {
            Scheme::IntegratingFactorRk4 => 4,
            Scheme::ImexCnAb2 => 2,
        }
    }
}

/// Largest dt·max|v|/dx allowed before a run is stopped.
pub const ADVECTIVE_CFL_LIMIT: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeStepper {
    #[serde(default)]
    pub scheme: Scheme,
    pub dt: f64,
    pub t_final: f64,
    #[serde(default = "default_cfl")]
    pub cfl_safety: f64,
}

fn default_cfl() -> f64 {
    0.5
}

impl TimeStepper {
    pub fn new(scheme: Scheme, dt: f64, t_final: f64) -> Self {
        Self {
            scheme,
            dt,
            t_final,
            cfl_safety: default_cfl(),
        }
    }

    pub fn with_t_final(mut self, t_final: f64) -> Self {
        self.t_final = t_final;
        self
    }

    /// Checks the basic invariants and the diffusive guard on `grid`.
    pub fn validate(&self, grid: &GridSpec) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(NsxError::InvalidTime(self.dt));
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(NsxError::InvalidTime(self.t_final));
        }
        if self.t_final < self.dt {
            return Err(NsxError::InvalidArgument(format!(
                "t_final {} is shorter than one step {}",
                self.t_final, self.dt
            )));
        }
        if !(self.cfl_safety > 0.0 && self.cfl_safety < 1.0) {
            return Err(NsxError::InvalidArgument(format!("cfl_safety must lie in (0,1), got {}", self.cfl_safety)));
        }
        let limit = self.cfl_safety * grid.spacing().powi(2);
        if self.dt > limit {
            return Err(NsxError::StepTooLarge { dt: self.dt, limit });
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        ((self.t_final / self.dt) - 1e-9).ceil().max(1.0) as usize
    }

    /// Uniform step that lands exactly on t_final.
    pub fn step_size(&self) -> f64 {
        self.t_final / self.steps() as f64
    }

    pub fn sample_every(&self) -> usize {
        ((self.t_final / self.dt / 512.0).floor() as usize).max(1)
    }
}

pub type System = Vec<SpectralVectorField>;

/// Nonlinear part of the right-hand side for a system of fields.
pub trait Forcing {
    fn eval(&self, state: &[SpectralVectorField]) -> Result<System>;
}

impl<F> Forcing for F
where
    F: Fn(&[SpectralVectorField]) -> Result<System>,
{
    fn eval(&self, state: &[SpectralVectorField]) -> Result<System> {
        self(state)
    }
}

/// One integration owning its state.
pub struct Integrator<F: Forcing> {
    scheme: Scheme,
    h: f64,
    forcing: F,
    state: System,
    t: f64,
    steps_taken: usize,
    cached: Option<System>,
    previous: Option<System>,
    e_half: Vec<f64>,
    e_full: Vec<f64>,
    cn_explicit: Vec<f64>,
    cn_implicit_inv: Vec<f64>,
}

fn combine(terms: &[(f64, &SpectralVectorField)]) -> Result<SpectralVectorField> {
    let mut out = terms[0].1.scaled(terms[0].0);
    for (a, f) in &terms[1..] {
        out.axpy(*a, f)?;
    }
    Ok(out)
}

impl<F: Forcing> Integrator<F> {
    pub fn new(stepper: &TimeStepper, initial: System, forcing: F) -> Result<Self> {
        let grid = *initial
            .first()
            .ok_or_else(|| NsxError::InvalidArgument("empty system".into()))?
            .grid();
        for f in &initial {
            if f.grid() != &grid {
                return Err(NsxError::GridMismatch);
            }
        }
        stepper.validate(&grid)?;
        let h = stepper.step_size();
        let w = wavenumbers(&grid);
        let cn_explicit = w.k2.iter().map(|k2| 1.0 - 0.5 * h * k2).collect();
        let cn_implicit_inv = w.k2.iter().map(|k2| 1.0 / (1.0 + 0.5 * h * k2)).collect();
        Ok(Self {
            scheme: stepper.scheme,
            h,
            forcing,
            t: initial[0].time_tag(),
            state: initial,
            steps_taken: 0,
            cached: None,
            previous: None,
            e_half: heat_multiplier(&grid, 0.5 * h)?,
            e_full: heat_multiplier(&grid, h)?,
            cn_explicit,
            cn_implicit_inv,
        })
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn state(&self) -> &[SpectralVectorField] {
        &self.state
    }

    pub fn into_state(self) -> System {
        self.state
    }

    pub fn steps_taken(&self) -> usize {
        self.steps_taken
    }

    pub fn step_size(&self) -> f64 {
        self.h
    }

    /// Nonlinear part at the current state; reused as the first stage of
    /// the next step.
    pub fn current_forcing(&mut self) -> Result<&System> {
        if self.cached.is_none() {
            self.cached = Some(self.forcing.eval(&self.state)?);
        }
        Ok(self.cached.as_ref().expect("just filled"))
    }

    pub fn step(&mut self) -> Result<()> {
        let k1 = match self.cached.take() {
            Some(k) => k,
            None => self.forcing.eval(&self.state)?,
        };
        let h = self.h;
        let next: System = match self.scheme {
            Scheme::IntegratingFactorRk4 => {
                let (eh, ef) = (&self.e_half, &self.e_full);
                let s2: System = self
                    .state
                    .iter()
                    .zip(&k1)
                    .map(|(v, k)| Ok(v.add_scaled(0.5 * h, k)?.apply_multiplier(eh)))
                    .collect::<Result<_>>()?;
                let k2 = self.forcing.eval(&s2)?;
                let vh: System = self.state.iter().map(|v| v.apply_multiplier(eh)).collect();
                let s3: System = vh.iter().zip(&k2).map(|(v, k)| v.add_scaled(0.5 * h, k)).collect::<Result<_>>()?;
                let k3 = self.forcing.eval(&s3)?;
                let s4: System = self
                    .state
                    .iter()
                    .zip(&k3)
                    .map(|(v, k)| v.apply_multiplier(ef).add_scaled(h, &k.apply_multiplier(eh)))
                    .collect::<Result<_>>()?;
                let k4 = self.forcing.eval(&s4)?;
                (0..self.state.len())
                    .map(|i| {
                        let a = combine(&[(1.0, &self.state[i]), (h / 6.0, &k1[i])])?.apply_multiplier(ef);
                        let b = combine(&[(h / 3.0, &k2[i]), (h / 3.0, &k3[i])])?.apply_multiplier(eh);
                        combine(&[(1.0, &a), (1.0, &b), (h / 6.0, &k4[i])])
                    })
                    .collect::<Result<_>>()?
            }
            Scheme::ImexCnAb2 => {
                let extrap: System = match &self.previous {
                    Some(prev) => k1
                        .iter()
                        .zip(prev)
                        .map(|(a, b)| combine(&[(1.5, a), (-0.5, b)]))
                        .collect::<Result<_>>()?,
                    None => k1.clone(),
                };
                self.state
                    .iter()
                    .zip(&extrap)
                    .map(|(v, n)| {
                        Ok(v.apply_multiplier(&self.cn_explicit)
                            .add_scaled(h, n)?
                            .apply_multiplier(&self.cn_implicit_inv))
                    })
                    .collect::<Result<_>>()?
            }
        };
        self.previous = Some(k1);
        let t_next = self.t + h;
        if next.iter().any(|f| !f.is_finite()) {
            return Err(NsxError::Diverged { last_valid_time: self.t });
        }
        self.state = next.into_iter().map(|f| f.with_time_tag(t_next)).collect();
        self.t = t_next;
        self.steps_taken += 1;
        Ok(())
    }
}
