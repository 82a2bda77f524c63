//! NSSF snapshot files: magic `NSSF`, u32 version, 3 x u32 grid sizes,
//! f64 box length, f64 time tag, f64 mollifier width (0 when unmollified),
//! then the full n^3 spectrum of each component as (re, im) f64 pairs,
//! first index slowest. Little-endian throughout.

use num_complex::Complex64;
use std::io::{Read, Write};
use std::path::Path;

use super::field::SpectralVectorField;
use super::grid::GridSpec;
use crate::error::{NsxError, Result};

pub const MAGIC: &[u8; 4] = b"NSSF";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub field: SpectralVectorField,
    pub mollifier_width: f64,
}

pub fn write_snapshot<W: Write>(mut w: W, field: &SpectralVectorField, mollifier_width: f64) -> Result<()> {
    let g = field.grid();
    let n = g.n();
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    for _ in 0..3 {
        w.write_all(&(n as u32).to_le_bytes())?;
    }
    w.write_all(&g.box_length.to_le_bytes())?;
    w.write_all(&field.time_tag().to_le_bytes())?;
    w.write_all(&mollifier_width.to_le_bytes())?;
    let mut buf = Vec::with_capacity(16 * n * n * n);
    for comp in field.components() {
        buf.clear();
        for i0 in 0..n {
            for i1 in 0..n {
                for i2 in 0..n {
                    let z = if i2 <= n / 2 {
                        comp[g.flat_index(i0, i1, i2)]
                    } else {
                        comp[g.flat_index((n - i0) % n, (n - i1) % n, n - i2)].conj()
                    };
                    buf.extend_from_slice(&z.re.to_le_bytes());
                    buf.extend_from_slice(&z.im.to_le_bytes());
                }
            }
        }
        w.write_all(&buf)?;
    }
    Ok(())
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

/// Read a snapshot. The dealiasing fraction is not stored; `dealias_fraction`
/// supplies it.
pub fn read_snapshot<R: Read>(mut r: R, dealias_fraction: f64) -> Result<Snapshot> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(NsxError::Format("bad magic bytes".into()));
    }
    let version = read_u32(&mut r)?;
    if version != VERSION {
        return Err(NsxError::Format(format!("unsupported version {version}")));
    }
    let dims = [read_u32(&mut r)?, read_u32(&mut r)?, read_u32(&mut r)?];
    if dims[0] != dims[1] || dims[1] != dims[2] {
        return Err(NsxError::Format(format!("non-cubic grid {dims:?}")));
    }
    let n = dims[0] as usize;
    let box_length = read_f64(&mut r)?;
    let time_tag = read_f64(&mut r)?;
    let mollifier_width = read_f64(&mut r)?;
    let grid = GridSpec::with_dealias(n, box_length, dealias_fraction)?;
    let mut raw = vec![0u8; 16 * n * n * n];
    let mut comps: [Vec<Complex64>; 3] = Default::default();
    for comp in comps.iter_mut() {
        r.read_exact(&mut raw)?;
        let mut half = vec![Complex64::new(0.0, 0.0); grid.spectral_len()];
        for i0 in 0..n {
            for i1 in 0..n {
                for i2 in 0..=n / 2 {
                    let off = 16 * ((i0 * n + i1) * n + i2);
                    let re = f64::from_le_bytes(raw[off..off + 8].try_into().unwrap());
                    let im = f64::from_le_bytes(raw[off + 8..off + 16].try_into().unwrap());
                    half[grid.flat_index(i0, i1, i2)] = Complex64::new(re, im);
                }
            }
        }
        *comp = half;
    }
    let field = SpectralVectorField::from_components(grid, comps, time_tag)?;
    Ok(Snapshot {
        field,
        mollifier_width,
    })
}

pub fn save_snapshot(path: &Path, field: &SpectralVectorField, mollifier_width: f64) -> Result<()> {
    let file = std::fs::File::create(path)?;
    let mut w = std::io::BufWriter::new(file);
    write_snapshot(&mut w, field, mollifier_width)?;
    w.flush()?;
    Ok(())
}

pub fn load_snapshot(path: &Path, dealias_fraction: f64) -> Result<Snapshot> {
    let file = std::fs::File::open(path)?;
    read_snapshot(std::io::BufReader::new(file), dealias_fraction)
}
