//! Closure of the fixed-point ball for the perturbation equation and the
//! resulting uniform bounds.

use serde::{Deserialize, Serialize};

use crate::error::{NsxError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapInputs {
    /// ||w0||_{L^3}
    pub w0_l3: f64,
    /// ||u0||_{L^q}
    pub u0_lq: f64,
    /// ||grad u0||_{L^3}
    pub grad_u0_l3: f64,
    /// ||u0||_{L^3}
    pub u0_l3: f64,
    pub t_final: f64,
    pub constant: f64,
}

impl BootstrapInputs {
    /// Perturbation only (no Stokes part).
    pub fn perturbation_only(w0_l3: f64, t_final: f64, constant: f64) -> Self {
        Self {
            w0_l3,
            u0_lq: 0.0,
            grad_u0_l3: 0.0,
            u0_l3: 0.0,
            t_final,
            constant,
        }
    }

    pub fn stokes_size(&self) -> f64 {
        self.u0_lq.max(self.grad_u0_l3)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapReport {
    pub c_cal: f64,
    /// Smaller root of C K^2 + (2 C T^{1/2} m - 1) K + C (||w0|| + T m^2) = 0.
    pub k: f64,
    /// (1/2 - sqrt(1/4 - 4 C^2 ||w0||)) / (2C) when real.
    pub k_prime: Option<f64>,
    pub discriminant: f64,
    pub m_u: f64,
    pub m_w: f64,
    pub m_v: f64,
}

pub fn bootstrap_constants(inp: &BootstrapInputs) -> Result<BootstrapReport> {
    let c = inp.constant;
    let vals = [inp.w0_l3, inp.u0_lq, inp.grad_u0_l3, inp.u0_l3];
    if !(c > 0.0 && c.is_finite()) || vals.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
        return Err(NsxError::InvalidArgument("bootstrap inputs must be nonnegative and finite".into()));
    }
    if !(inp.t_final > 0.0 && inp.t_final.is_finite()) {
        return Err(NsxError::InvalidTime(inp.t_final));
    }
    let m = inp.stokes_size();
    let t = inp.t_final;
    let b = 1.0 - 2.0 * c * t.sqrt() * m;
    let discriminant = b * b - 4.0 * c * c * (inp.w0_l3 + t * m * m);
    if discriminant < 0.0 {
        return Err(NsxError::NoClosure { discriminant });
    }
    // smaller root, written to avoid cancellation when the constant term is tiny
    let k = if b > 0.0 {
        2.0 * c * (inp.w0_l3 + t * m * m) / (b + discriminant.sqrt())
    } else {
        (b - discriminant.sqrt()) / (2.0 * c)
    };
    let inner = 0.25 - 4.0 * c * c * inp.w0_l3;
    let k_prime = if inner >= 0.0 {
        Some((0.5 - inner.sqrt()) / (2.0 * c))
    } else {
        None
    };
    let m_u = inp.u0_l3;
    let m_w = c * inp.w0_l3 + c * k * k + 2.0 * c * m_u * k + c * m_u * m_u;
    Ok(BootstrapReport {
        c_cal: c,
        k,
        k_prime,
        discriminant,
        m_u,
        m_w,
        m_v: m_u + m_w,
    })
}
