use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use serde::Serialize;

use crate::error::Result;
use crate::leray::TrajectoryMonitor;
use crate::mild::PicardState;
use crate::spectral::{save_snapshot, SpectralVectorField};

#[derive(Debug, Clone, Default)]
pub struct Artifacts {
    /// The first monitor is written as monitors.csv, the others as
    /// monitors_<name>.csv.
    pub monitors: Vec<(String, TrajectoryMonitor)>,
    pub picard: Option<PicardState>,
    pub snapshots: Vec<(String, SpectralVectorField)>,
}

#[derive(Debug, Clone)]
pub struct Outcome<R> {
    pub report: R,
    pub artifacts: Artifacts,
}

pub fn write_report<R: Serialize>(dir: &Path, report: &R) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let text = serde_json::to_string_pretty(report)?;
    std::fs::write(dir.join("report.json"), text + "\n")?;
    Ok(())
}

pub fn write_outcome<R: Serialize>(dir: &Path, outcome: &Outcome<R>, mollifier_width: f64) -> Result<()> {
    write_report(dir, &outcome.report)?;
    let a = &outcome.artifacts;
    for (i, (name, mon)) in a.monitors.iter().enumerate() {
        let file = if i == 0 {
            "monitors.csv".to_string()
        } else {
            format!("monitors_{name}.csv")
        };
        mon.write_csv(BufWriter::new(File::create(dir.join(file))?))?;
    }
    if let Some(p) = &a.picard {
        p.write_csv(BufWriter::new(File::create(dir.join("picard.csv"))?))?;
    }
    if !a.snapshots.is_empty() {
        let snap_dir = dir.join("snapshots");
        std::fs::create_dir_all(&snap_dir)?;
        for (name, f) in &a.snapshots {
            save_snapshot(&snap_dir.join(format!("{name}.nssf")), f, mollifier_width)?;
        }
    }
    Ok(())
}
