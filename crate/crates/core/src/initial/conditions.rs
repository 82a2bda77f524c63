//! Smallness conditions on the data. Every condition is a strict
//! inequality lhs < threshold.

use serde::{Deserialize, Serialize};

use crate::error::{NsxError, Result};
use crate::initial::calibration::Calibration;
use crate::norms::FieldSamples;
use crate::spectral::SpectralVectorField;

/// Default numerator of the thresholds in the two hypotheses of the
/// small-ball lemma: threshold = theta / C.
pub const DEFAULT_THETA: f64 = 0.125;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConditionId {
    /// T^{1/2} max{||u0||_q, ||grad u0||_3} < theta / C
    StokesSmallness,
    /// ||w0||_3 < theta / C
    PerturbationSmallness,
    /// ||w0||_3 < 1 / (4C)
    GlobalPerturbation,
    /// max_{[0,T]} ||w(t)||_3 < 1 / (8C)
    PerturbationTrajectory,
    /// T^{-1/4} ||u0||_2 < 1 / (8C)
    StokesEnergy,
    /// 1 - sqrt(1 - 4 C^2 ||w0||_3) < 1/4
    BallRadius,
    /// ||w0||_3 < 1 / (8C (2C)^M)
    StabilityPerturbation,
}

impl ConditionId {
    /// Equation label used in reports.
    pub fn label(&self) -> u32 {
        match self {
            ConditionId::StokesSmallness => 16,
            ConditionId::PerturbationSmallness => 17,
            ConditionId::GlobalPerturbation => 23,
            ConditionId::PerturbationTrajectory => 25,
            ConditionId::StokesEnergy => 26,
            ConditionId::BallRadius => 28,
            ConditionId::StabilityPerturbation => 37,
        }
    }

    pub fn from_label(label: u32) -> Result<Self> {
        Ok(match label {
            16 => ConditionId::StokesSmallness,
            17 => ConditionId::PerturbationSmallness,
            23 => ConditionId::GlobalPerturbation,
            25 => ConditionId::PerturbationTrajectory,
            26 => ConditionId::StokesEnergy,
            28 => ConditionId::BallRadius,
            37 => ConditionId::StabilityPerturbation,
            other => return Err(NsxError::InvalidArgument(format!("unknown condition {other}"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub condition_id: u32,
    pub lhs: f64,
    pub threshold: f64,
    pub pass: bool,
}

/// Norms a condition may need. Unused entries may stay `None`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ConditionInputs {
    pub t_final: f64,
    pub u0_lq: Option<f64>,
    pub grad_u0_l3: Option<f64>,
    pub u0_l2: Option<f64>,
    pub w0_l3: Option<f64>,
    pub max_w_l3: Option<f64>,
    pub partition_intervals: Option<usize>,
}

impl ConditionInputs {
    /// Compute every data norm from the two parts of the datum.
    pub fn from_fields(u0: &SpectralVectorField, w0: &SpectralVectorField, q: f64, t_final: f64) -> Result<Self> {
        let su = FieldSamples::of(u0);
        Ok(Self {
            t_final,
            u0_lq: Some(su.lp(q)?),
            grad_u0_l3: Some(FieldSamples::of_gradient(u0).lp(3.0)?),
            u0_l2: Some(u0.l2_parseval()),
            w0_l3: Some(FieldSamples::of(w0).lp(3.0)?),
            max_w_l3: None,
            partition_intervals: None,
        })
    }
}

fn need(v: Option<f64>, what: &str) -> Result<f64> {
    v.ok_or_else(|| NsxError::InvalidArgument(format!("condition needs {what}")))
}

pub fn check_condition(
    id: ConditionId,
    inputs: &ConditionInputs,
    theta: f64,
    cal: &Calibration,
) -> Result<ConditionReport> {
    let c = cal.universal()?;
    let t = inputs.t_final;
    let (lhs, threshold) = match id {
        ConditionId::StokesSmallness => {
            let m = need(inputs.u0_lq, "||u0||_q")?.max(need(inputs.grad_u0_l3, "||grad u0||_3")?);
            (t.sqrt() * m, theta / c)
        }
        ConditionId::PerturbationSmallness => (need(inputs.w0_l3, "||w0||_3")?, theta / c),
        ConditionId::GlobalPerturbation => (need(inputs.w0_l3, "||w0||_3")?, 1.0 / (4.0 * c)),
        ConditionId::PerturbationTrajectory => (need(inputs.max_w_l3, "max ||w(t)||_3")?, 1.0 / (8.0 * c)),
        ConditionId::StokesEnergy => {
            if !(t > 0.0) {
                return Err(NsxError::InvalidTime(t));
            }
            (t.powf(-0.25) * need(inputs.u0_l2, "||u0||_2")?, 1.0 / (8.0 * c))
        }
        ConditionId::BallRadius => {
            let w = need(inputs.w0_l3, "||w0||_3")?;
            (1.0 - (1.0 - 4.0 * c * c * w).max(0.0).sqrt(), 0.25)
        }
        ConditionId::StabilityPerturbation => {
            let m = inputs
                .partition_intervals
                .ok_or_else(|| NsxError::InvalidArgument("condition needs the partition size".into()))?;
            let w = need(inputs.w0_l3, "||w0||_3")?;
            (w, 1.0 / (8.0 * c * (2.0 * c).powi(m as i32)))
        }
    };
    Ok(ConditionReport {
        condition_id: id.label(),
        lhs,
        threshold,
        pass: lhs < threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equality_fails() {
        let cal = Calibration::uniform(1.0);
        let inp = ConditionInputs {
            t_final: 1.0,
            w0_l3: Some(0.125),
            ..Default::default()
        };
        let r = check_condition(ConditionId::PerturbationSmallness, &inp, 0.125, &cal).unwrap();
        assert!(!r.pass);
    }

    #[test]
    fn energy_condition_arithmetic() {
        let c = 1.7;
        let cal = Calibration::uniform(c);
        let t: f64 = 1.0 / 16.0;
        let inp = ConditionInputs {
            t_final: t,
            u0_l2: Some(1.0 / (8.0 * c) * t.powf(0.25) * 0.9),
            ..Default::default()
        };
        let r = check_condition(ConditionId::StokesEnergy, &inp, DEFAULT_THETA, &cal).unwrap();
        assert!(r.pass);
        assert!((r.lhs / r.threshold - 0.9).abs() < 1e-12);
    }

    #[test]
    fn uncalibrated_is_refused() {
        let inp = ConditionInputs::default();
        let err = check_condition(ConditionId::BallRadius, &inp, DEFAULT_THETA, &Calibration::default()).unwrap_err();
        assert_eq!(err, NsxError::NotCalibrated);
    }

    #[test]
    fn labels_round_trip() {
        for l in [16, 17, 23, 25, 26, 28, 37] {
            assert_eq!(ConditionId::from_label(l).unwrap().label(), l);
        }
    }
}
