//! Picard iteration of the mild (Duhamel) form of the perturbation and
//! full equations on a graded time grid.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::quadrature::{product_panel, DuhamelGrid};
use crate::error::{NsxError, Result};
use crate::norms::{grad_norms, lp};
use crate::spectral::{heat_propagate, nonlinear_self, nonlinear_term, Mollifier, MollifierSpec, SpectralVectorField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum PicardStart {
    /// K_t * w0
    #[default]
    Caloric,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ForcingForm {
    /// P(v . grad v) with v = u + w
    #[default]
    Combined,
    /// The four bilinear terms in w and u evaluated separately.
    FourTerm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PicardConfig {
    pub max_iter: usize,
    pub tol: f64,
    pub exponent_q: f64,
    #[serde(default)]
    pub start: PicardStart,
    #[serde(default)]
    pub forcing: ForcingForm,
    #[serde(default)]
    pub mollifier: Option<MollifierSpec>,
    /// Radius of the ball the weighted norms are checked against.
    #[serde(default)]
    pub k_ball_radius: Option<f64>,
}

impl Default for PicardConfig {
    fn default() -> Self {
        Self {
            max_iter: 40,
            tol: 1e-10,
            exponent_q: 6.0,
            start: PicardStart::Caloric,
            forcing: ForcingForm::Combined,
            mollifier: None,
            k_ball_radius: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PicardRow {
    pub iterate: usize,
    pub node_time: f64,
    #[serde(rename = "weighted_Lq_residual")]
    pub weighted_lq_residual: f64,
    #[serde(rename = "weighted_grad_L3")]
    pub weighted_grad_l3: f64,
    #[serde(rename = "in_K_ball")]
    pub in_k_ball: Option<bool>,
}

#[derive(Debug, Clone)]
pub struct PicardState {
    pub iterate_index: usize,
    pub node_times: Vec<f64>,
    pub w_trajectory: Vec<SpectralVectorField>,
    /// Relative weighted residual of the last accepted iterate.
    pub residual: f64,
    pub residual_history: Vec<f64>,
    pub k_ball_radius: Option<f64>,
    /// t^{(1 - 3/q)/2} ||w(t)||_q at each node.
    pub weighted_lq: Vec<f64>,
    /// t^{1/2} ||grad w(t)||_3 at each node.
    pub weighted_grad_l3: Vec<f64>,
    pub in_k_ball: Option<bool>,
    pub rows: Vec<PicardRow>,
}

impl PicardState {
    pub fn final_field(&self) -> &SpectralVectorField {
        self.w_trajectory.last().expect("grid has at least one node")
    }

    /// Successive residual ratios r(n+1)/r(n).
    pub fn contraction_ratios(&self) -> Vec<f64> {
        self.residual_history
            .windows(2)
            .map(|w| if w[0] > 0.0 { w[1] / w[0] } else { 0.0 })
            .collect()
    }

    pub fn residual_nonincreasing(&self) -> bool {
        self.residual_history.windows(2).all(|w| w[1] <= w[0])
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for row in &self.rows {
            w.serialize(row).map_err(|e| NsxError::Io(e.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }
}

fn weight_exponent(q: f64) -> Result<f64> {
    if !(q > 3.0 && q.is_finite()) {
        return Err(NsxError::InvalidExponent(format!("weighted norm needs 3 < q < inf, got {q}")));
    }
    Ok(0.5 * (1.0 - 3.0 / q))
}

fn forcing(
    u: &SpectralVectorField,
    w: &SpectralVectorField,
    form: ForcingForm,
    moll: Option<&Mollifier>,
) -> Result<SpectralVectorField> {
    let adv = |a: &SpectralVectorField, b: &SpectralVectorField| -> Result<SpectralVectorField> {
        match moll {
            Some(m) => nonlinear_term(&m.apply(a)?, b),
            None => nonlinear_term(a, b),
        }
    };
    let total = match form {
        ForcingForm::Combined => {
            let v = u.try_add(w)?;
            match moll {
                Some(_) => adv(&v, &v)?,
                None => nonlinear_self(&v),
            }
        }
        ForcingForm::FourTerm => {
            let mut s = adv(w, w)?;
            s.axpy(1.0, &adv(u, w)?)?;
            s.axpy(1.0, &adv(w, u)?)?;
            s.axpy(1.0, &adv(u, u)?)?;
            s
        }
    };
    Ok(total.scaled(-1.0))
}

/// Picard iteration for the perturbation w driven by the Stokes flow of u0.
pub fn picard_solve_w(
    u0: &SpectralVectorField,
    w0: &SpectralVectorField,
    grid: &DuhamelGrid,
    cfg: &PicardConfig,
) -> Result<PicardState> {
    u0.ensure_same_grid(w0)?;
    let gamma = weight_exponent(cfg.exponent_q)?;
    if !(cfg.tol > 0.0) {
        return Err(NsxError::InvalidArgument("tolerance must be positive".into()));
    }
    if cfg.max_iter == 0 {
        return Err(NsxError::InvalidArgument("max_iter must be at least 1".into()));
    }
    let moll = cfg.mollifier.map(|m| Mollifier::new(m, *u0.grid())).transpose()?;
    let times = grid.times_with_origin();
    let u: Vec<SpectralVectorField> = times
        .par_iter()
        .map(|&t| heat_propagate(u0, t))
        .collect::<Result<_>>()?;
    let caloric: Vec<SpectralVectorField> = times
        .par_iter()
        .map(|&t| heat_propagate(w0, t))
        .collect::<Result<_>>()?;
    let mut w: Vec<SpectralVectorField> = match cfg.start {
        PicardStart::Caloric => caloric.clone(),
        PicardStart::Zero => {
            let mut z = vec![SpectralVectorField::zeros(*w0.grid()); times.len()];
            z[0] = w0.clone();
            z
        }
    };
    let mut rows = Vec::new();
    let mut history = Vec::new();
    for iterate in 1..=cfg.max_iter {
        let f: Vec<SpectralVectorField> = u
            .par_iter()
            .zip(w.par_iter())
            .map(|(uj, wj)| forcing(uj, wj, cfg.forcing, moll.as_ref()))
            .collect::<Result<_>>()?;
        let mut next = Vec::with_capacity(times.len());
        next.push(w0.clone().with_time_tag(0.0));
        let mut integral = SpectralVectorField::zeros(*w0.grid());
        for j in 1..times.len() {
            let h = times[j] - times[j - 1];
            integral = heat_propagate(&integral, h)?;
            product_panel(Some(&f[j - 1]), &f[j], h, 0.0, &mut integral)?;
            next.push(caloric[j].try_add(&integral)?.with_time_tag(times[j]));
        }
        if let Some(bad) = next.iter().position(|x| !x.is_finite()) {
            return Err(NsxError::Diverged {
                last_valid_time: times[bad.saturating_sub(1)],
            });
        }
        let stats: Vec<(f64, f64, f64)> = (1..times.len())
            .into_par_iter()
            .map(|j| {
                let tg = times[j].powf(gamma);
                let diff = lp(&next[j].try_sub(&w[j])?, cfg.exponent_q)?;
                let size = lp(&next[j], cfg.exponent_q)?;
                let grad = grad_norms(&next[j]).l3.value;
                Ok((tg * diff, tg * size, times[j].sqrt() * grad))
            })
            .collect::<Result<_>>()?;
        let sup_diff = stats.iter().map(|s| s.0).fold(0.0, f64::max);
        let sup_size = stats.iter().map(|s| s.1).fold(0.0, f64::max);
        let residual = if sup_size > 0.0 { sup_diff / sup_size } else { sup_diff };
        if !residual.is_finite() {
            return Err(NsxError::Diverged { last_valid_time: 0.0 });
        }
        for (j, s) in stats.iter().enumerate() {
            rows.push(PicardRow {
                iterate,
                node_time: times[j + 1],
                weighted_lq_residual: s.0,
                weighted_grad_l3: s.2,
                in_k_ball: cfg.k_ball_radius.map(|k| s.1 <= k && s.2 <= k),
            });
        }
        history.push(residual);
        w = next;
        if residual < cfg.tol {
            let weighted_lq: Vec<f64> = stats.iter().map(|s| s.1).collect();
            let weighted_grad_l3: Vec<f64> = stats.iter().map(|s| s.2).collect();
            let in_k_ball = cfg
                .k_ball_radius
                .map(|k| weighted_lq.iter().chain(&weighted_grad_l3).all(|&x| x <= k));
            w.remove(0);
            return Ok(PicardState {
                iterate_index: iterate,
                node_times: grid.nodes.clone(),
                w_trajectory: w,
                residual,
                residual_history: history,
                k_ball_radius: cfg.k_ball_radius,
                weighted_lq,
                weighted_grad_l3,
                in_k_ball,
                rows,
            });
        }
    }
    Err(NsxError::NoConvergence {
        iterations: cfg.max_iter,
        residual: history.last().copied().unwrap_or(f64::INFINITY),
    })
}

/// Picard iteration for the unsplit equation started at v0.
pub fn picard_solve_v(v0: &SpectralVectorField, grid: &DuhamelGrid, cfg: &PicardConfig) -> Result<PicardState> {
    let zero = SpectralVectorField::zeros(*v0.grid());
    picard_solve_w(&zero, v0, grid, cfg)
}

/// Largest relative weighted L^q gap between the unsplit solution from
/// u0 + w0 and the Stokes flow of u0 plus the perturbation.
pub fn split_consistency(
    u0: &SpectralVectorField,
    w0: &SpectralVectorField,
    grid: &DuhamelGrid,
    cfg: &PicardConfig,
) -> Result<f64> {
    let gamma = weight_exponent(cfg.exponent_q)?;
    let split = picard_solve_w(u0, w0, grid, cfg)?;
    let full = picard_solve_v(&u0.try_add(w0)?, grid, cfg)?;
    let mut gap: f64 = 0.0;
    let mut size: f64 = 0.0;
    for (j, &t) in grid.nodes.iter().enumerate() {
        let recombined = heat_propagate(u0, t)?.try_add(&split.w_trajectory[j])?;
        let tg = t.powf(gamma);
        gap = gap.max(tg * lp(&full.w_trajectory[j].try_sub(&recombined)?, cfg.exponent_q)?);
        size = size.max(tg * lp(&full.w_trajectory[j], cfg.exponent_q)?);
    }
    Ok(if size > 0.0 { gap / size } else { gap })
}
