//! Post-processing of monitor series: t*, assumption (A), the ESS bound
//! and the resolvedness proxy.

use serde::{Deserialize, Serialize};

use super::monitor::TrajectoryMonitor;
use crate::error::{NsxError, Result};
use crate::numerics::trapezoid;

/// Largest allowed top-octave energy fraction for a run to count as resolved.
pub const TAIL_TOLERANCE: f64 = 1e-6;
/// sup ||grad v||_2 may grow to this multiple of its initial value.
pub const GRADIENT_ENVELOPE: f64 = 10.0;
/// Slack on the sup L^3 comparison against M_v.
pub const ESS_SLACK: f64 = 1.05;

fn interpolate(times: &[f64], values: &[f64], t: f64) -> Option<f64> {
    if times.is_empty() || t < times[0] || t > *times.last()? + 1e-12 {
        return None;
    }
    let i = times.partition_point(|&s| s < t);
    if i == 0 {
        return Some(values[0]);
    }
    if i >= times.len() {
        return values.last().copied();
    }
    let (t0, t1) = (times[i - 1], times[i]);
    let a = (t - t0) / (t1 - t0);
    Some((1.0 - a) * values[i - 1] + a * values[i])
}

/// Trapezoid of g over the samples with times in [a, b].
fn window_integral(times: &[f64], g: &[f64], a: f64, b: f64) -> f64 {
    let (t, y): (Vec<f64>, Vec<f64>) = times
        .iter()
        .zip(g)
        .filter(|(s, _)| **s >= a - 1e-12 && **s <= b + 1e-12)
        .map(|(s, v)| (*s, *v))
        .unzip();
    if t.len() < 2 {
        return 0.0;
    }
    trapezoid(&t, &y)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TStarReport {
    /// ∫_0^T ||u||_3^4 dt
    pub l3_fourth_integral: f64,
    /// C ||u0||_2^4
    pub integral_bound: f64,
    pub integral_bound_holds: bool,
    pub threshold: f64,
    pub t_star: Option<f64>,
}

/// Earliest sample in (0, T] where ||u||_3 < 1/(8C), with the L^4-in-time
/// bound evaluated alongside.
pub fn find_t_star(u: &TrajectoryMonitor, t_final: f64, c_cal: f64) -> Result<TStarReport> {
    if u.is_empty() {
        return Err(NsxError::InvalidArgument("empty trajectory".into()));
    }
    let l3_4: Vec<f64> = u.l3.iter().map(|x| x.powi(4)).collect();
    let t0 = u.times[0];
    let integral = window_integral(&u.times, &l3_4, t0, t0 + t_final);
    let bound = c_cal * u.l2[0].powi(4);
    let threshold = 1.0 / (8.0 * c_cal);
    let t_star = u
        .times
        .iter()
        .zip(&u.l3)
        .find(|(t, l)| **t > t0 && **t <= t0 + t_final + 1e-12 && **l < threshold)
        .map(|(t, _)| *t);
    Ok(TStarReport {
        l3_fourth_integral: integral,
        integral_bound: bound,
        integral_bound_holds: integral <= bound,
        threshold,
        t_star,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssumptionAReport {
    pub eps: f64,
    /// |∫_0^{T/2} ||grad v||² - ½||v0||²|
    pub residual: f64,
    pub holds: bool,
    pub v_half_l2: f64,
    /// ||v(T/2)||_2 < 2 eps
    pub linear_reading: bool,
    /// ||v(T/2)||_2² < 2 eps
    pub squared_reading: bool,
    /// eps < 1/(8C²), reported only.
    pub eps_below_constant_chain: bool,
    pub chain: Option<InfChain>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfChain {
    /// inf over samples in [T/2, T] of ||v||_3
    pub inf_l3: f64,
    /// ∫_{T/2}^T ||v||_3^4
    pub l3_fourth_integral: f64,
    /// (C/4) ||v(T/2)||_2^4
    pub l3_fourth_bound: f64,
    /// C 2^{-1/4} T^{-1/4} ||v(T/2)||_2
    pub sharp_bound: f64,
    /// C ||v(T/2)||_2
    pub bound: f64,
    pub holds: bool,
}

pub fn assumption_a_monitor(v: &TrajectoryMonitor, t_final: f64, eps: f64, c_cal: f64) -> Result<AssumptionAReport> {
    if !(eps > 0.0) {
        return Err(NsxError::InvalidArgument("eps must be positive".into()));
    }
    if v.is_empty() {
        return Err(NsxError::InvalidArgument("empty trajectory".into()));
    }
    let t0 = v.times[0];
    let half = t0 + 0.5 * t_final;
    let cumulative = v.dissipation_integral();
    let dissipated = interpolate(&v.times, &cumulative, half)
        .ok_or_else(|| NsxError::InvalidArgument(format!("trajectory does not reach {half}")))?;
    let v_half = interpolate(&v.times, &v.l2, half).expect("covered");
    let e0 = 0.5 * v.l2[0] * v.l2[0];
    let residual = (dissipated - e0).abs();
    let chain = if *v.times.last().expect("nonempty") + 1e-12 >= t0 + t_final {
        let inf_l3 = v
            .times
            .iter()
            .zip(&v.l3)
            .filter(|(t, _)| **t >= half - 1e-12 && **t <= t0 + t_final + 1e-12)
            .map(|(_, l)| *l)
            .fold(f64::INFINITY, f64::min);
        let l3_4: Vec<f64> = v.l3.iter().map(|x| x.powi(4)).collect();
        let sharp = c_cal * 2f64.powf(-0.25) * t_final.powf(-0.25) * v_half;
        Some(InfChain {
            inf_l3,
            l3_fourth_integral: window_integral(&v.times, &l3_4, half, t0 + t_final),
            l3_fourth_bound: 0.25 * c_cal * v_half.powi(4),
            sharp_bound: sharp,
            bound: c_cal * v_half,
            holds: inf_l3 < c_cal * v_half,
        })
    } else {
        None
    };
    Ok(AssumptionAReport {
        eps,
        residual,
        holds: residual < eps,
        v_half_l2: v_half,
        linear_reading: v_half < 2.0 * eps,
        squared_reading: v_half * v_half < 2.0 * eps,
        eps_below_constant_chain: eps < 1.0 / (8.0 * c_cal * c_cal),
        chain,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothnessVerdict {
    pub finite: bool,
    pub gradient_envelope_ok: bool,
    pub max_tail_fraction: f64,
    pub tail_ok: bool,
    pub pass: bool,
}

pub fn smoothness_proxy(v: &TrajectoryMonitor) -> SmoothnessVerdict {
    let finite = v.l2.iter().chain(&v.grad_l2).chain(&v.l3).all(|x| x.is_finite());
    let g0 = v.grad_l2.first().copied().unwrap_or(0.0);
    let sup_g = v.grad_l2.iter().fold(0.0f64, |a, b| a.max(*b));
    let gradient_envelope_ok = sup_g <= GRADIENT_ENVELOPE * g0;
    let max_tail = v.tail_fraction.iter().fold(0.0f64, |a, b| a.max(*b));
    let tail_ok = max_tail < TAIL_TOLERANCE;
    SmoothnessVerdict {
        finite,
        gradient_envelope_ok,
        max_tail_fraction: max_tail,
        tail_ok,
        pass: finite && gradient_envelope_ok && tail_ok,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EssReport {
    pub sup_l3: f64,
    pub sup_grad_l2: f64,
    pub m_v: Option<f64>,
    /// sup ||v||_3 <= M_v with the discretization slack.
    pub within_m_v: Option<bool>,
    pub smoothness: SmoothnessVerdict,
}

pub fn ess_monitor(v: &TrajectoryMonitor, m_v: Option<f64>) -> Result<EssReport> {
    if v.is_empty() {
        return Err(NsxError::InvalidArgument("empty trajectory".into()));
    }
    let sup_l3 = v.l3.iter().fold(0.0f64, |a, b| a.max(*b));
    Ok(EssReport {
        sup_l3,
        sup_grad_l2: v.grad_l2.iter().fold(0.0f64, |a, b| a.max(*b)),
        m_v,
        within_m_v: m_v.map(|m| sup_l3 <= ESS_SLACK * m),
        smoothness: smoothness_proxy(v),
    })
}

/// sup of ||v||_3 over samples at or after `t`.
pub fn sup_l3_after(v: &TrajectoryMonitor, t: f64) -> Option<f64> {
    v.times
        .iter()
        .zip(&v.l3)
        .filter(|(s, _)| **s >= t - 1e-12)
        .map(|(_, l)| *l)
        .reduce(f64::max)
}

/// Every sample satisfies t^{(1-3/q)/2} ||v||_q <= K + C ||u0||_3.
pub fn weighted_decay_holds(v: &TrajectoryMonitor, k: f64, c_cal: f64, u0_l3: f64) -> bool {
    v.decay18.iter().all(|d| *d <= k + c_cal * u0_l3)
}
