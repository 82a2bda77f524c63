//! Direct integration of the mollified system and its split and paired
//! variants.

use serde::{Deserialize, Serialize};

use super::monitor::TrajectoryMonitor;
use super::stepper::{Integrator, System, TimeStepper, ADVECTIVE_CFL_LIMIT};
use crate::error::{NsxError, Result};
use crate::spectral::{nonlinear_term, relative_divergence, Mollifier, MollifierSpec, SpectralVectorField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Dynamics {
    #[default]
    NavierStokes,
    /// Nonlinearity switched off.
    Stokes,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolveOptions {
    #[serde(default)]
    pub dynamics: Dynamics,
    #[serde(default = "default_q")]
    pub exponent_q: f64,
    /// Times (from the start of the run) at which the state is kept.
    #[serde(default)]
    pub snapshot_times: Vec<f64>,
}

fn default_q() -> f64 {
    6.0
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            dynamics: Dynamics::NavierStokes,
            exponent_q: default_q(),
            snapshot_times: Vec::new(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub initial: SpectralVectorField,
    pub monitor: TrajectoryMonitor,
    pub snapshots: Vec<SpectralVectorField>,
    pub final_state: SpectralVectorField,
}

/// A monitored linear combination of the system's fields.
pub type View = Vec<(usize, f64)>;

#[derive(Debug, Clone)]
pub struct SystemRun {
    pub monitors: Vec<TrajectoryMonitor>,
    pub snapshots: Vec<System>,
    pub final_state: System,
}

fn combine_view(view: &View, fields: &[SpectralVectorField]) -> Result<SpectralVectorField> {
    let mut out = fields[view[0].0].scaled(view[0].1);
    for &(i, c) in &view[1..] {
        out.axpy(c, &fields[i])?;
    }
    Ok(out.with_time_tag(fields[view[0].0].time_tag()))
}

/// -P((ρ*v)·∇v), or the zero field when the nonlinearity is off.
pub struct Advection {
    mollifier: Option<Mollifier>,
    dynamics: Dynamics,
}

impl Advection {
    pub fn new(spec: Option<MollifierSpec>, v: &SpectralVectorField, dynamics: Dynamics) -> Result<Self> {
        Ok(Self {
            mollifier: spec.map(|m| Mollifier::new(m, *v.grid())).transpose()?,
            dynamics,
        })
    }

    pub fn eval(&self, v: &SpectralVectorField) -> Result<SpectralVectorField> {
        if self.dynamics == Dynamics::Stokes {
            return Ok(SpectralVectorField::zeros(*v.grid()));
        }
        let a = match &self.mollifier {
            Some(m) => m.apply(v)?,
            None => v.clone(),
        };
        Ok(nonlinear_term(&a, v)?.scaled(-1.0))
    }
}

pub fn check_initial(v0: &SpectralVectorField) -> Result<()> {
    if !v0.is_finite() {
        return Err(NsxError::InvalidArgument("initial field is not finite".into()));
    }
    let scale = v0.l2_parseval() / v0.grid().volume().sqrt();
    let mean = v0.mean().iter().map(|z| z.norm()).fold(0.0, f64::max);
    if mean > 1e-12 * scale.max(f64::MIN_POSITIVE) {
        return Err(NsxError::InvalidArgument(format!("initial field has mean {mean:.3e}")));
    }
    let div = relative_divergence(v0);
    if div > 1e-8 {
        return Err(NsxError::InvalidArgument(format!("initial field has relative divergence {div:.3e}")));
    }
    Ok(())
}

/// Integrates a system, recording one monitor per view.
pub fn run_system<F>(
    initial: System,
    forcing: F,
    stepper: &TimeStepper,
    opts: &EvolveOptions,
    views: &[View],
) -> Result<SystemRun>
where
    F: Fn(&[SpectralVectorField]) -> Result<System>,
{
    let t0 = initial[0].time_tag();
    let dx = initial[0].grid().spacing();
    let mut integ = Integrator::new(stepper, initial, forcing)?;
    let h = integ.step_size();
    let steps = stepper.steps();
    let every = stepper.sample_every();
    let mut monitors = vec![TrajectoryMonitor::new(opts.exponent_q); views.len()];
    let mut snapshots = Vec::new();
    let mut pending: Vec<f64> = opts.snapshot_times.clone();
    pending.sort_by(f64::total_cmp);
    let mut next_snap = 0;
    for step in 0..=steps {
        let t_rel = step as f64 * h;
        while next_snap < pending.len() && pending[next_snap] < t_rel + 0.5 * h {
            snapshots.push(integ.state().to_vec());
            next_snap += 1;
        }
        if step % every == 0 || step == steps {
            let tendency = integ.current_forcing()?.clone();
            let state = integ.state();
            for (view, mon) in views.iter().zip(monitors.iter_mut()) {
                let v = combine_view(view, state)?;
                let n = combine_view(view, &tendency)?;
                mon.record(t0 + t_rel, &v, Some(&n))?;
                let vmax = *mon.linf.last().expect("recorded");
                if h * vmax / dx > ADVECTIVE_CFL_LIMIT {
                    return Err(NsxError::StepTooLarge {
                        dt: h,
                        limit: ADVECTIVE_CFL_LIMIT * dx / vmax,
                    });
                }
            }
        }
        if step < steps {
            integ.step()?;
        }
    }
    for m in &mut monitors {
        m.finalize();
    }
    Ok(SystemRun {
        monitors,
        snapshots,
        final_state: integ.into_state(),
    })
}

/// ∂t v = Δv - P((ρ_ε*v)·∇v) from v0.
pub fn evolve(
    v0: &SpectralVectorField,
    mollifier: Option<MollifierSpec>,
    stepper: &TimeStepper,
    opts: &EvolveOptions,
) -> Result<Trajectory> {
    check_initial(v0)?;
    let adv = Advection::new(mollifier, v0, opts.dynamics)?;
    let run = run_system(
        vec![v0.clone()],
        |s: &[SpectralVectorField]| Ok(vec![adv.eval(&s[0])?]),
        stepper,
        opts,
        &[vec![(0, 1.0)]],
    )?;
    let mut run = run;
    Ok(Trajectory {
        initial: v0.clone(),
        monitor: run.monitors.remove(0),
        snapshots: run.snapshots.into_iter().map(|mut s| s.remove(0)).collect(),
        final_state: run.final_state.remove(0),
    })
}

/// The regularized flow w from w0 alone.
pub fn evolve_split_ns(
    w0: &SpectralVectorField,
    mollifier: Option<MollifierSpec>,
    stepper: &TimeStepper,
    opts: &EvolveOptions,
) -> Result<Trajectory> {
    evolve(w0, mollifier, stepper, opts)
}

#[derive(Debug, Clone)]
pub struct SplitTrajectory {
    pub w: Trajectory,
    pub u: Trajectory,
    pub v: Trajectory,
}

/// Evolves w (full equation from w0) and u (driven by w) in lockstep, so
/// the stage values of w seen by u are those of the recorded w run.
pub fn evolve_split(
    u0: &SpectralVectorField,
    w0: &SpectralVectorField,
    mollifier: Option<MollifierSpec>,
    stepper: &TimeStepper,
    opts: &EvolveOptions,
) -> Result<SplitTrajectory> {
    u0.ensure_same_grid(w0)?;
    check_initial(u0)?;
    check_initial(w0)?;
    let adv = Advection::new(mollifier, w0, opts.dynamics)?;
    let forcing = |s: &[SpectralVectorField]| -> Result<System> {
        let nw = adv.eval(&s[0])?;
        let nv = adv.eval(&s[0].try_add(&s[1])?)?;
        let nu = nv.try_sub(&nw)?;
        Ok(vec![nw, nu])
    };
    let views = [vec![(0, 1.0)], vec![(1, 1.0)], vec![(0, 1.0), (1, 1.0)]];
    let mut run = run_system(vec![w0.clone(), u0.clone()], forcing, stepper, opts, &views)?;
    let split = |i: usize, run: &mut SystemRun| -> Result<Trajectory> {
        let snaps = run
            .snapshots
            .iter()
            .map(|s| combine_view(&views[i], s))
            .collect::<Result<Vec<_>>>()?;
        Ok(Trajectory {
            initial: combine_view(&views[i], &[w0.clone(), u0.clone()])?,
            monitor: std::mem::take(&mut run.monitors[i]),
            snapshots: snaps,
            final_state: combine_view(&views[i], &run.final_state)?,
        })
    };
    let w = split(0, &mut run)?;
    let u = split(1, &mut run)?;
    let v = split(2, &mut run)?;
    Ok(SplitTrajectory { w, u, v })
}

/// The perturbation u driven by a previously computed w trajectory. The
/// w run is replayed in lockstep from its initial state; its recorded
/// sample times and sizes must match the replay.
pub fn evolve_split_pert(
    u0: &SpectralVectorField,
    w_traj: &Trajectory,
    mollifier: Option<MollifierSpec>,
    stepper: &TimeStepper,
    opts: &EvolveOptions,
) -> Result<Trajectory> {
    let split = evolve_split(u0, &w_traj.initial, mollifier, stepper, opts)?;
    let (a, b) = (&split.w.monitor, &w_traj.monitor);
    if a.times.len() != b.times.len() || a.times.iter().zip(&b.times).any(|(x, y)| (x - y).abs() > 1e-12) {
        return Err(NsxError::GridMismatch);
    }
    for (x, y) in a.l2.iter().zip(&b.l2) {
        if (x - y).abs() > 1e-10 * y.abs().max(f64::MIN_POSITIVE) {
            return Err(NsxError::GridMismatch);
        }
    }
    Ok(split.u)
}

#[derive(Debug, Clone)]
pub struct PairedTrajectory {
    pub base: Trajectory,
    pub perturbed: Trajectory,
    /// Monitor of base - perturbed.
    pub difference: TrajectoryMonitor,
}

/// Two independent runs advanced in lockstep so their difference can be
/// sampled at common times.
pub fn evolve_pair(
    v0: &SpectralVectorField,
    v0_perturbed: &SpectralVectorField,
    mollifier: Option<MollifierSpec>,
    stepper: &TimeStepper,
    opts: &EvolveOptions,
) -> Result<PairedTrajectory> {
    v0.ensure_same_grid(v0_perturbed)?;
    check_initial(v0)?;
    check_initial(v0_perturbed)?;
    let adv = Advection::new(mollifier, v0, opts.dynamics)?;
    let forcing = |s: &[SpectralVectorField]| -> Result<System> { Ok(vec![adv.eval(&s[0])?, adv.eval(&s[1])?]) };
    let views = [vec![(0, 1.0)], vec![(1, 1.0)], vec![(0, 1.0), (1, -1.0)]];
    let mut run = run_system(vec![v0.clone(), v0_perturbed.clone()], forcing, stepper, opts, &views)?;
    let difference = run.monitors.pop().expect("three views");
    let perturbed_mon = run.monitors.pop().expect("three views");
    let base_mon = run.monitors.pop().expect("three views");
    let mut base_snaps = Vec::new();
    let mut pert_snaps = Vec::new();
    for mut s in run.snapshots {
        pert_snaps.push(s.pop().expect("pair"));
        base_snaps.push(s.pop().expect("pair"));
    }
    let perturbed_final = run.final_state.pop().expect("pair");
    let base_final = run.final_state.pop().expect("pair");
    Ok(PairedTrajectory {
        base: Trajectory {
            initial: v0.clone(),
            monitor: base_mon,
            snapshots: base_snaps,
            final_state: base_final,
        },
        perturbed: Trajectory {
            initial: v0_perturbed.clone(),
            monitor: perturbed_mon,
            snapshots: pert_snaps,
            final_state: perturbed_final,
        },
        difference,
    })
}
