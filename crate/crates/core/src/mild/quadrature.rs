//! Time quadrature of Duhamel integrals ∫_0^t K_{t-s} * F(s) ds, mode by
//! mode, with the heat factor integrated exactly.

use serde::{Deserialize, Serialize};

use crate::error::{NsxError, Result};
use crate::numerics::gauss_jacobi;
use crate::spectral::wavenumbers::wavenumbers;
use crate::spectral::{heat_propagate, SpectralVectorField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum DuhamelRule {
    #[default]
    GradedTrapezoid,
    GaussJacobiComposite,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DuhamelGrid {
    pub t_final: f64,
    /// Graded nodes in (0, t_final]; the origin is implicit.
    pub nodes: Vec<f64>,
    pub rule: DuhamelRule,
    pub grading_exponent: f64,
    /// Exponent beta of an integrable endpoint singularity F(s) ~ s^{-beta}.
    pub endpoint_exponent: f64,
    /// Points per panel for the Gauss rules.
    pub gauss_points: usize,
}

pub const MIN_NODES: usize = 8;

impl DuhamelGrid {
    pub fn graded(t_final: f64, count: usize, grading_exponent: f64, rule: DuhamelRule) -> Result<Self> {
        if !(t_final > 0.0 && t_final.is_finite()) {
            return Err(NsxError::InvalidTime(t_final));
        }
        if count < MIN_NODES {
            return Err(NsxError::InvalidArgument(format!("need at least {MIN_NODES} Duhamel nodes, got {count}")));
        }
        if !(grading_exponent >= 1.0) {
            return Err(NsxError::InvalidArgument(format!("grading exponent must be >= 1, got {grading_exponent}")));
        }
        Ok(Self {
            t_final,
            nodes: graded_nodes(t_final, count, grading_exponent),
            rule,
            grading_exponent,
            endpoint_exponent: 0.0,
            gauss_points: 4,
        })
    }

    pub fn with_endpoint_exponent(mut self, beta: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&beta) {
            return Err(NsxError::InvalidArgument(format!("endpoint exponent must lie in [0,1), got {beta}")));
        }
        self.endpoint_exponent = beta;
        Ok(self)
    }

    pub fn count(&self) -> usize {
        self.nodes.len()
    }

    /// Nodes including the origin.
    pub fn times_with_origin(&self) -> Vec<f64> {
        let mut t = Vec::with_capacity(self.nodes.len() + 1);
        t.push(0.0);
        t.extend_from_slice(&self.nodes);
        t
    }

    /// Convergence order the rule is designed to reach.
    pub fn design_order(&self) -> f64 {
        match self.rule {
            DuhamelRule::GradedTrapezoid if self.endpoint_exponent > 0.0 => {
                (self.grading_exponent * (1.0 - self.endpoint_exponent)).min(2.0)
            }
            DuhamelRule::GradedTrapezoid => 2.0,
            // only the first panel absorbs the singularity; its neighbours
            // still see s^{-beta}
            DuhamelRule::GaussJacobiComposite if self.endpoint_exponent > 0.0 => {
                (self.grading_exponent * (1.0 - self.endpoint_exponent)).min(2.0 * self.gauss_points as f64)
            }
            DuhamelRule::GaussJacobiComposite => 2.0 * self.gauss_points as f64,
        }
    }
}

/// s_j = t (j/N)^g for j = 1..=N.
pub fn graded_nodes(t: f64, count: usize, g: f64) -> Vec<f64> {
    (1..=count).map(|j| t * (j as f64 / count as f64).powf(g)).collect()
}

/// ∫_0^h exp(-λσ) dσ and ∫_0^h exp(-λσ) σ/h dσ.
pub fn panel_moments(lambda: f64, h: f64) -> (f64, f64) {
    let x = lambda * h;
    if x < 1.0 {
        // phi0/h = sum (-x)^n/(n+1)!, phi1/h = sum (-x)^n/(n! (n+2))
        let (mut phi0, mut phi1) = (0.0, 0.0);
        let mut term = 1.0;
        for n in 0..24 {
            let nf = n as f64;
            phi0 += term / (nf + 1.0);
            phi1 += term / (nf + 2.0);
            term *= -x / (nf + 1.0);
        }
        (h * phi0, h * phi1)
    } else {
        let e = (-x).exp();
        ((1.0 - e) / lambda, (1.0 - e * (1.0 + x)) / (lambda * lambda * h))
    }
}

/// One product-trapezoid panel ending a distance `tau` before the
/// evaluation time: F linear between `left` (at the panel start) and
/// `right` (at its end), integrated exactly against the heat factor.
/// With `left = None` the forcing is held constant at `right`.
pub fn product_panel(
    left: Option<&SpectralVectorField>,
    right: &SpectralVectorField,
    h: f64,
    tau: f64,
    out: &mut SpectralVectorField,
) -> Result<()> {
    right.ensure_same_grid(out)?;
    let w = wavenumbers(right.grid());
    for c in 0..3 {
        let r = right.component(c);
        let l = left.map(|f| f.component(c));
        let dst = out.component_mut(c);
        for idx in 0..dst.len() {
            let lam = w.k2[idx];
            let (phi0, phi1) = panel_moments(lam, h);
            let decay = (-lam * tau).exp();
            dst[idx] += match l {
                Some(l) => decay * (phi1 * l[idx] + (phi0 - phi1) * r[idx]),
                None => decay * phi0 * r[idx],
            };
        }
    }
    Ok(())
}

/// ∫_0^t K_{t-s} * F(s) ds on the grid's nodes regraded to [0, t].
pub fn duhamel_integral<F>(forcing: F, t: f64, grid: &DuhamelGrid) -> Result<SpectralVectorField>
where
    F: Fn(f64) -> Result<SpectralVectorField>,
{
    duhamel_on_nodes(&forcing, t, grid, grid.count())
}

/// As `duhamel_integral`, but also evaluates the rule on every other node
/// and fails when the two disagree by more than `tol` relative.
pub fn duhamel_integral_checked<F>(forcing: F, t: f64, grid: &DuhamelGrid, tol: f64) -> Result<SpectralVectorField>
where
    F: Fn(f64) -> Result<SpectralVectorField>,
{
    let fine = duhamel_on_nodes(&forcing, t, grid, grid.count())?;
    let coarse = duhamel_on_nodes(&forcing, t, grid, grid.count() / 2)?;
    let scale = fine.l2_parseval();
    let diff = fine.try_sub(&coarse)?.l2_parseval();
    let estimate = if scale > 0.0 { diff / scale } else { diff };
    if estimate > tol {
        return Err(NsxError::QuadratureUnderResolved(format!(
            "{} nodes give relative change {estimate:.3e} > {tol:.3e}",
            grid.count()
        )));
    }
    Ok(fine)
}

fn duhamel_on_nodes<F>(forcing: &F, t: f64, grid: &DuhamelGrid, count: usize) -> Result<SpectralVectorField>
where
    F: Fn(f64) -> Result<SpectralVectorField>,
{
    if !(t > 0.0 && t.is_finite()) {
        return Err(NsxError::InvalidTime(t));
    }
    let nodes = graded_nodes(t, count, grid.grading_exponent);
    let beta = grid.endpoint_exponent;
    let first = forcing(nodes[0])?;
    let mut out = SpectralVectorField::zeros(*first.grid());
    match grid.rule {
        DuhamelRule::GradedTrapezoid => {
            // first panel
            if beta > 0.0 {
                product_panel(None, &first, nodes[0], t - nodes[0], &mut out)?;
            } else {
                let f0 = forcing(0.0)?;
                product_panel(Some(&f0), &first, nodes[0], t - nodes[0], &mut out)?;
            }
            let mut prev = first;
            for j in 1..nodes.len() {
                let cur = forcing(nodes[j])?;
                product_panel(Some(&prev), &cur, nodes[j] - nodes[j - 1], t - nodes[j], &mut out)?;
                prev = cur;
            }
        }
        DuhamelRule::GaussJacobiComposite => {
            let n = grid.gauss_points;
            // first panel: weight s^{-beta} absorbed by the rule
            let gj = gauss_jacobi(n, 0.0, -beta);
            let s1 = nodes[0];
            let scale = (0.5 * s1).powf(1.0 - beta);
            for (x, wgt) in gj.nodes.iter().zip(&gj.weights) {
                let s = 0.5 * s1 * (1.0 + x);
                let regular = forcing(s)?.scaled(s.powf(beta));
                out.axpy(scale * wgt, &heat_propagate(&regular, t - s)?)?;
            }
            let gl = gauss_jacobi(n, 0.0, 0.0);
            for j in 1..nodes.len() {
                let (a, b) = (nodes[j - 1], nodes[j]);
                let half = 0.5 * (b - a);
                for (x, wgt) in gl.nodes.iter().zip(&gl.weights) {
                    let s = a + half * (1.0 + x);
                    out.axpy(half * wgt, &heat_propagate(&forcing(s)?, t - s)?)?;
                }
            }
        }
    }
    Ok(out.with_time_tag(t))
}

/// Heat flow of u0 at each requested time.
pub fn stokes_evolve(u0: &SpectralVectorField, times: &[f64]) -> Result<Vec<SpectralVectorField>> {
    let mut prev = f64::NEG_INFINITY;
    for &t in times {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(NsxError::InvalidTime(t));
        }
        if t < prev {
            return Err(NsxError::InvalidArgument("times must be nondecreasing".into()));
        }
        prev = t;
    }
    times
        .iter()
        .map(|&t| heat_propagate(u0, t).map(|f| f.with_time_tag(u0.time_tag() + t)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments_match_closed_form_across_branch() {
        for &(lam, h) in &[(1e-6, 0.5), (0.0019, 0.5), (0.0021, 0.5), (1.99, 0.5), (2.01, 0.5), (30.0, 0.2)] {
            let (p0, p1) = panel_moments(lam, h);
            let exact0 = -(-lam * h).exp_m1() / lam;
            assert!((p0 - exact0).abs() < 1e-13 * h, "{lam} {h}");
            let q = crate::numerics::adaptive_gauss_kronrod(&|s: f64| (-lam * s).exp() * s / h, 0.0, h, 1e-14);
            assert!((p1 - q).abs() < 1e-12 * h, "{lam} {h} {p1} {q}");
        }
    }

    #[test]
    fn grid_validation() {
        assert!(DuhamelGrid::graded(1.0, 7, 2.0, DuhamelRule::GradedTrapezoid).is_err());
        assert!(DuhamelGrid::graded(1.0, 8, 0.5, DuhamelRule::GradedTrapezoid).is_err());
        let g = DuhamelGrid::graded(2.0, 8, 2.0, DuhamelRule::GradedTrapezoid).unwrap();
        assert!(g.nodes[0] > 0.0);
        assert!((g.nodes[7] - 2.0).abs() < 1e-15);
        assert!(g.nodes.windows(2).all(|w| w[0] < w[1]));
    }
}
