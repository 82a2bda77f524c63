//! Empirical constants for the inequalities: each constant is 1.05 times
//! the largest ratio seen over a seeded corpus of band-limited and analytic
//! seed fields.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::Path;

use super::random::{element_rng, random_bandlimited, random_seed_field};
use crate::error::{NsxError, Result};
use crate::leray::pressure::calderon_zygmund_ratio;
use crate::norms::checks::{
    bilinear_ratio, heat_grad_ratio, heat_lq_ratio, interp_l3_ratio, interp_l5_ratio, sobolev_ratio,
};
use crate::norms::scaling::ExponentTriple;
use crate::spectral::{GridSpec, SpectralVectorField};

pub const INFLATION: f64 = 1.05;
pub const DEFAULT_CORPUS_SIZE: usize = 100;
pub const HEAT_EXPONENT_PAIRS: [(f64, f64); 3] = [(2.0, 6.0), (3.0, 6.0), (1.5, 3.0)];
pub const HEAT_TIMES: [f64; 3] = [0.01, 0.1, 1.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InequalityId {
    HeatLq,
    HeatGrad,
    Bilinear,
    InterpL3,
    InterpL5,
    CalderonZygmund,
    Sobolev,
}

impl InequalityId {
    pub const ALL: [InequalityId; 7] = [
        InequalityId::HeatLq,
        InequalityId::HeatGrad,
        InequalityId::Bilinear,
        InequalityId::InterpL3,
        InequalityId::InterpL5,
        InequalityId::CalderonZygmund,
        InequalityId::Sobolev,
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationRecord {
    pub inequality_id: InequalityId,
    pub constant: f64,
    pub corpus_seed: u64,
    pub grid: GridSpec,
    /// Seconds since the Unix epoch at which the record was produced.
    pub timestamp: u64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Calibration {
    pub records: Vec<CalibrationRecord>,
}

#[derive(Serialize)]
struct HashedRecord<'a> {
    inequality_id: InequalityId,
    constant: f64,
    corpus_seed: u64,
    grid: &'a GridSpec,
}

impl Calibration {
    /// Every inequality gets the same constant. Meant for tests and for
    /// experiments run with a hand-chosen constant.
    pub fn uniform(constant: f64) -> Self {
        Self {
            records: InequalityId::ALL
                .iter()
                .map(|&id| CalibrationRecord {
                    inequality_id: id,
                    constant,
                    corpus_seed: 0,
                    grid: GridSpec::new(8, 1.0).expect("valid grid"),
                    timestamp: 0,
                })
                .collect(),
        }
    }

    pub fn constant(&self, id: InequalityId) -> Result<f64> {
        self.records
            .iter()
            .find(|r| r.inequality_id == id)
            .map(|r| r.constant)
            .ok_or(NsxError::NotCalibrated)
    }

    /// The single constant used in conditions: the largest per-inequality one.
    pub fn universal(&self) -> Result<f64> {
        if self.records.is_empty() {
            return Err(NsxError::NotCalibrated);
        }
        Ok(self.records.iter().map(|r| r.constant).fold(0.0, f64::max))
    }

    pub fn matches(&self, corpus_seed: u64, grid: &GridSpec) -> bool {
        !self.records.is_empty() && self.records.iter().all(|r| r.corpus_seed == corpus_seed && r.grid == *grid)
    }

    /// SHA-256 of the records with timestamps omitted.
    pub fn hash(&self) -> String {
        let hashed: Vec<HashedRecord> = self
            .records
            .iter()
            .map(|r| HashedRecord {
                inequality_id: r.inequality_id,
                constant: r.constant,
                corpus_seed: r.corpus_seed,
                grid: &r.grid,
            })
            .collect();
        let bytes = serde_json::to_vec(&hashed).expect("records serialize");
        hex::encode(Sha256::digest(bytes))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.records)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(Self {
            records: serde_json::from_str(s)?,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// One corpus element: a primary field and a partner for two-field
/// inequalities.
#[derive(Debug, Clone)]
pub struct CorpusElement {
    pub primary: SpectralVectorField,
    pub partner: SpectralVectorField,
}

pub fn corpus_element(seed: u64, index: usize, grid: &GridSpec) -> Result<CorpusElement> {
    let mut rng = element_rng(seed, index as u64);
    let (primary, partner) = if index % 2 == 0 {
        (random_bandlimited(grid, &mut rng, 4), random_bandlimited(grid, &mut rng, 4))
    } else {
        (random_seed_field(grid, &mut rng)?, random_seed_field(grid, &mut rng)?)
    };
    Ok(CorpusElement { primary, partner })
}

/// Largest ratio per inequality over one element; None where vacuous.
pub fn element_ratios(e: &CorpusElement) -> Result<Vec<(InequalityId, Option<f64>)>> {
    let f = &e.primary;
    let fold = |acc: Option<f64>, r: Option<f64>| match (acc, r) {
        (Some(a), Some(b)) => Some(a.max(b)),
        (a, b) => a.or(b),
    };
    let mut heat = None;
    let mut grad = None;
    for &(p, q) in &HEAT_EXPONENT_PAIRS {
        for &t in &HEAT_TIMES {
            heat = fold(heat, heat_lq_ratio(f, p, q, t)?);
            grad = fold(grad, heat_grad_ratio(f, p, q, t)?);
        }
    }
    let triple = ExponentTriple::for_q(6.0)?;
    Ok(vec![
        (InequalityId::HeatLq, heat),
        (InequalityId::HeatGrad, grad),
        (InequalityId::Bilinear, bilinear_ratio(f, &e.partner, &triple)?),
        (InequalityId::InterpL3, interp_l3_ratio(f)?),
        (InequalityId::InterpL5, interp_l5_ratio(f)?),
        (InequalityId::CalderonZygmund, calderon_zygmund_ratio(&e.partner, f)?),
        (InequalityId::Sobolev, sobolev_ratio(f)?),
    ])
}

fn now_seconds() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Calibrate on an explicit corpus.
pub fn calibrate_on(corpus: &[CorpusElement], corpus_seed: u64, grid: &GridSpec) -> Result<Calibration> {
    let per_element: Vec<Vec<(InequalityId, Option<f64>)>> =
        corpus.par_iter().map(element_ratios).collect::<Result<_>>()?;
    let timestamp = now_seconds();
    let mut records = Vec::new();
    for id in InequalityId::ALL {
        let best = per_element
            .iter()
            .flat_map(|v| v.iter().filter(|(i, _)| *i == id).filter_map(|(_, r)| *r))
            .fold(None, |acc: Option<f64>, r| Some(acc.map_or(r, |a| a.max(r))));
        match best {
            Some(b) if b > 0.0 => records.push(CalibrationRecord {
                inequality_id: id,
                constant: INFLATION * b,
                corpus_seed,
                grid: *grid,
                timestamp,
            }),
            _ => return Err(NsxError::VacuousCorpus),
        }
    }
    Ok(Calibration { records })
}

/// Draw the seeded corpus of `size` elements and calibrate every inequality.
/// Returns the universal constant and the records.
pub fn calibrate_c(corpus_seed: u64, grid: &GridSpec, size: usize) -> Result<(f64, Calibration)> {
    let corpus: Vec<CorpusElement> = (0..size)
        .into_par_iter()
        .map(|i| corpus_element(corpus_seed, i, grid))
        .collect::<Result<_>>()?;
    let cal = calibrate_on(&corpus, corpus_seed, grid)?;
    Ok((cal.universal()?, cal))
}
