use std::path::Path;

use super::config::RunConfig;
use crate::error::Result;
use crate::initial::{calibrate_c, Calibration};

pub const CALIBRATION_FILE: &str = "calibration.json";

/// Reuses a matching calibration (configured path, then the output
/// directory) unless `force` is set; otherwise calibrates and, when an
/// output directory is given, saves the result there.
pub fn obtain_calibration(cfg: &RunConfig, out_dir: Option<&Path>, force: bool) -> Result<Calibration> {
    let grid = cfg.calibration_grid()?;
    let seed = cfg.calibration.corpus_seed;
    if !force {
        let candidates = cfg
            .calibration
            .path
            .iter()
            .cloned()
            .chain(out_dir.map(|d| d.join(CALIBRATION_FILE)));
        for path in candidates {
            if path.exists() {
                let cal = Calibration::load(&path)?;
                if cal.matches(seed, &grid) {
                    log::info!("reusing calibration from {}", path.display());
                    return Ok(cal);
                }
            }
        }
    }
    log::info!("calibrating on {} fields at {}^3", cfg.calibration.corpus_size, grid.n());
    let (_, cal) = calibrate_c(seed, &grid, cfg.calibration.corpus_size)?;
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir)?;
        cal.save(&dir.join(CALIBRATION_FILE))?;
    }
    Ok(cal)
}
