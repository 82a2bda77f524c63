//! Along-trajectory norm series and the energy ledger.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{NsxError, Result};
use crate::norms::FieldSamples;
use crate::numerics::CompensatedSum;
use crate::spectral::wavenumbers::wavenumbers;
use crate::spectral::{relative_divergence, SpectralVectorField};

/// Spectral tail used by the resolvedness proxy: modes with some
/// |m_i| >= n/4.
pub fn tail_fraction(f: &SpectralVectorField) -> f64 {
    let g = f.grid();
    let w = wavenumbers(g);
    let cut = (g.n() / 4) as i64;
    let mut tail = CompensatedSum::new();
    let mut total = CompensatedSum::new();
    for comp in f.components() {
        for (idx, z) in comp.iter().enumerate() {
            let e = w.parseval[idx] * z.norm_sqr();
            total.add(e);
            if g.mode_indices(idx).iter().any(|m| m.abs() >= cut) {
                tail.add(e);
            }
        }
    }
    let t = total.value();
    if t > 0.0 {
        tail.value() / t
    } else {
        0.0
    }
}

/// d/dt ||grad v||_2^2 given the nonlinear tendency at the same instant.
pub fn dissipation_slope(v: &SpectralVectorField, tendency: Option<&SpectralVectorField>) -> Result<f64> {
    if let Some(n) = tendency {
        v.ensure_same_grid(n)?;
    }
    let w = wavenumbers(v.grid());
    let mut acc = CompensatedSum::new();
    for c in 0..3 {
        let vc = v.component(c);
        let nc = tendency.map(|n| n.component(c));
        for idx in 0..vc.len() {
            let k2 = w.k2[idx];
            let mut dv = -k2 * vc[idx];
            if let Some(nc) = nc {
                dv += nc[idx];
            }
            acc.add(w.parseval[idx] * k2 * (vc[idx].conj() * dv).re);
        }
    }
    Ok(2.0 * v.grid().volume() * acc.value())
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryMonitor {
    pub exponent_q: f64,
    pub times: Vec<f64>,
    pub l2: Vec<f64>,
    pub l3: Vec<f64>,
    pub l5: Vec<f64>,
    pub l6: Vec<f64>,
    pub lq: Vec<f64>,
    pub linf: Vec<f64>,
    pub grad_l2: Vec<f64>,
    pub grad_l3: Vec<f64>,
    /// d/dt ||grad v||_2^2
    pub dissipation_slope: Vec<f64>,
    pub decay18: Vec<f64>,
    pub decay19: Vec<f64>,
    pub tail_fraction: Vec<f64>,
    pub divergence: Vec<f64>,
    pub energy_lhs: Vec<f64>,
    pub energy_rhs: Vec<f64>,
    pub energy_residual: Vec<f64>,
    pub quadrature_error: Vec<f64>,
    pub ess_sup_l3: f64,
    pub assumption_a_residual: Option<f64>,
    pub t_star: Option<f64>,
}

impl TrajectoryMonitor {
    pub fn new(exponent_q: f64) -> Self {
        Self {
            exponent_q,
            ..Default::default()
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Appends one sample. `time` is measured from the start of the run.
    pub fn record(&mut self, time: f64, v: &SpectralVectorField, tendency: Option<&SpectralVectorField>) -> Result<()> {
        if let Some(&last) = self.times.last() {
            if time <= last {
                return Err(NsxError::InvalidArgument(format!("monitor times must increase ({time} after {last})")));
            }
        }
        let s = FieldSamples::of(v);
        let gs = FieldSamples::of_gradient(v);
        let q = self.exponent_q;
        let lq = s.lp(q)?;
        let grad_l3 = gs.lp(3.0)?;
        let gamma = 0.5 * (1.0 - 3.0 / q);
        self.times.push(time);
        self.l2.push(v.l2_parseval());
        self.l3.push(s.lp(3.0)?);
        self.l5.push(s.lp(5.0)?);
        self.l6.push(s.lp(6.0)?);
        self.lq.push(lq);
        self.linf.push(s.lp(f64::INFINITY)?);
        self.grad_l2.push(v.grad_l2_parseval());
        self.grad_l3.push(grad_l3);
        self.dissipation_slope.push(dissipation_slope(v, tendency)?);
        self.decay18.push(time.powf(gamma) * lq);
        self.decay19.push(time.sqrt() * grad_l3);
        self.tail_fraction.push(tail_fraction(v));
        self.divergence.push(relative_divergence(v));
        self.ess_sup_l3 = self.ess_sup_l3.max(*self.l3.last().expect("pushed"));
        Ok(())
    }

    /// Fills the energy series from the recorded norms.
    pub fn finalize(&mut self) {
        let ledger = energy_ledger(self);
        self.energy_lhs = ledger.lhs;
        self.energy_rhs = ledger.rhs;
        self.energy_residual = ledger.residual;
        self.quadrature_error = ledger.error_estimate;
    }

    /// Cumulative ∫_0^{t_m} ||grad v||_2^2 at every sample.
    pub fn dissipation_integral(&self) -> Vec<f64> {
        cumulative_hermite(&self.times, &self.grad_l2.iter().map(|g| g * g).collect::<Vec<_>>(), &self.dissipation_slope).0
    }

    /// Energy balance holds up to `factor` times the quadrature estimate.
    pub fn energy_inequality_holds(&self, factor: f64) -> bool {
        self.energy_lhs
            .iter()
            .zip(&self.energy_rhs)
            .zip(&self.quadrature_error)
            .all(|((l, r), e)| *l <= r + factor * e + 4.0 * f64::EPSILON * r)
    }

    pub fn max_relative_energy_residual(&self) -> f64 {
        let e0 = self.energy_rhs.first().copied().unwrap_or(0.0);
        let m = self.energy_residual.iter().fold(0.0f64, |a, r| a.max(r.abs()));
        if e0 > 0.0 {
            m / e0
        } else {
            m
        }
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        #[derive(Serialize)]
        struct Row {
            t: f64,
            l2: f64,
            l3: f64,
            l6: f64,
            grad_l2: f64,
            grad_l3: f64,
            decay18: f64,
            decay19: f64,
            energy_residual: f64,
            tail_fraction: f64,
        }
        let mut w = csv::Writer::from_writer(out);
        for i in 0..self.len() {
            w.serialize(Row {
                t: self.times[i],
                l2: self.l2[i],
                l3: self.l3[i],
                l6: self.l6[i],
                grad_l2: self.grad_l2[i],
                grad_l3: self.grad_l3[i],
                decay18: self.decay18[i],
                decay19: self.decay19[i],
                energy_residual: self.energy_residual.get(i).copied().unwrap_or(f64::NAN),
                tail_fraction: self.tail_fraction[i],
            })
            .map_err(|e| NsxError::Io(e.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyLedger {
    pub times: Vec<f64>,
    /// ½||v(t)||² + ∫_0^t ||grad v||²
    pub lhs: Vec<f64>,
    /// ½||v_0||²
    pub rhs: Vec<f64>,
    pub residual: Vec<f64>,
    /// Size of the endpoint correction, a bound on the plain trapezoid error.
    pub error_estimate: Vec<f64>,
}

/// Trapezoid with the Euler–Maclaurin endpoint correction on each panel,
/// exact for cubics. Returns the cumulative integral and the cumulative
/// magnitude of the corrections.
pub fn cumulative_hermite(t: &[f64], f: &[f64], df: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut acc = CompensatedSum::new();
    let mut corr = 0.0;
    let mut out = Vec::with_capacity(t.len());
    let mut err = Vec::with_capacity(t.len());
    if t.is_empty() {
        return (out, err);
    }
    out.push(0.0);
    err.push(0.0);
    for i in 1..t.len() {
        let h = t[i] - t[i - 1];
        let c = h * h / 12.0 * (df[i] - df[i - 1]);
        acc.add(0.5 * h * (f[i] + f[i - 1]));
        acc.add(-c);
        corr += c.abs();
        out.push(acc.value());
        err.push(corr);
    }
    (out, err)
}

pub fn energy_ledger(m: &TrajectoryMonitor) -> EnergyLedger {
    let (integral, error_estimate) = cumulative_hermite(
        &m.times,
        &m.grad_l2.iter().map(|g| g * g).collect::<Vec<_>>(),
        &m.dissipation_slope,
    );
    let e0 = 0.5 * m.l2.first().map(|x| x * x).unwrap_or(0.0);
    let lhs: Vec<f64> = m.l2.iter().zip(&integral).map(|(l, i)| 0.5 * l * l + i).collect();
    let residual = lhs.iter().map(|l| l - e0).collect();
    EnergyLedger {
        times: m.times.clone(),
        rhs: vec![e0; lhs.len()],
        lhs,
        residual,
        error_estimate,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_exact_for_cubics() {
        let t: Vec<f64> = (0..7).map(|i| (i as f64 * 0.3).powi(2)).collect();
        let f: Vec<f64> = t.iter().map(|x| x * x * x - 2.0 * x).collect();
        let df: Vec<f64> = t.iter().map(|x| 3.0 * x * x - 2.0).collect();
        let (c, _) = cumulative_hermite(&t, &f, &df);
        for (ti, ci) in t.iter().zip(&c) {
            let exact = ti.powi(4) / 4.0 - ti * ti;
            assert!((ci - exact).abs() < 1e-12, "{ci} {exact}");
        }
    }
}
