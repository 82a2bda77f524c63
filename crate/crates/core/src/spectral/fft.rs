//! Real-to-complex 3D transforms on the half spectrum n x n x (n/2+1).
//!
//! Forward transforms are normalized by 1/n^3 so that coefficients are the
//! Fourier-series amplitudes: f(x_j) = sum_k c_k exp(i k . (x_j - x_0)).

use num_complex::Complex64;
use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};
use rustfft::{Fft, FftPlanner};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

struct Plans {
    n: usize,
    r2c: Arc<dyn RealToComplex<f64>>,
    c2r: Arc<dyn ComplexToReal<f64>>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

fn plans(n: usize) -> Arc<Plans> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Plans>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("fft plan cache poisoned");
    guard
        .entry(n)
        .or_insert_with(|| {
            let mut rp = RealFftPlanner::<f64>::new();
            let mut cp = FftPlanner::<f64>::new();
            Arc::new(Plans {
                n,
                r2c: rp.plan_fft_forward(n),
                c2r: rp.plan_fft_inverse(n),
                fwd: cp.plan_fft_forward(n),
                inv: cp.plan_fft_inverse(n),
            })
        })
        .clone()
}

fn transpose(src: &[Complex64], dst: &mut [Complex64], rows: usize, cols: usize) {
    const B: usize = 16;
    for rb in (0..rows).step_by(B) {
        for cb in (0..cols).step_by(B) {
            for r in rb..(rb + B).min(rows) {
                for c in cb..(cb + B).min(cols) {
                    dst[c * rows + r] = src[r * cols + c];
                }
            }
        }
    }
}

/// Transform the two full axes in place. Each axis is made contiguous by a
/// transpose so that whole batches go through one FFT call.
fn full_axes(p: &Plans, data: &mut [Complex64], fft: &Arc<dyn Fft<f64>>, axis0_first: bool) {
    let n = p.n;
    let nh = n / 2 + 1;
    let slab = n * nh;
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    let mut work = vec![Complex64::new(0.0, 0.0); data.len()];
    let mut axis1 = |data: &mut [Complex64], work: &mut [Complex64]| {
        for s in 0..n {
            let range = s * slab..(s + 1) * slab;
            transpose(&data[range.clone()], &mut work[range.clone()], n, nh);
            fft.process_with_scratch(&mut work[range.clone()], &mut scratch);
            transpose(&work[range.clone()], &mut data[range], nh, n);
        }
    };
    let mut scratch0 = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    let mut axis0 = |data: &mut [Complex64], work: &mut [Complex64]| {
        transpose(data, work, n, slab);
        fft.process_with_scratch(work, &mut scratch0);
        transpose(work, data, slab, n);
    };
    if axis0_first {
        axis0(data, &mut work);
        axis1(data, &mut work);
    } else {
        axis1(data, &mut work);
        axis0(data, &mut work);
    }
}

/// Forward transform of a real n^3 array (last index fastest).
pub fn forward(n: usize, real: &[f64]) -> Vec<Complex64> {
    let p = plans(n);
    let nh = n / 2 + 1;
    assert_eq!(real.len(), n * n * n);
    let mut out = vec![Complex64::new(0.0, 0.0); n * n * nh];
    let mut input = vec![0.0; n];
    let mut scratch = vec![Complex64::new(0.0, 0.0); p.r2c.get_scratch_len()];
    for row in 0..n * n {
        input.copy_from_slice(&real[row * n..(row + 1) * n]);
        p.r2c
            .process_with_scratch(&mut input, &mut out[row * nh..(row + 1) * nh], &mut scratch)
            .expect("r2c length mismatch");
    }
    let fwd = p.fwd.clone();
    full_axes(&p, &mut out, &fwd, false);
    let norm = 1.0 / (n * n * n) as f64;
    for z in out.iter_mut() {
        *z *= norm;
    }
    out
}

/// Inverse transform from half-spectrum coefficients to a real n^3 array.
pub fn inverse(n: usize, spec: &[Complex64]) -> Vec<f64> {
    let p = plans(n);
    let nh = n / 2 + 1;
    assert_eq!(spec.len(), n * n * nh);
    let mut work = spec.to_vec();
    let inv = p.inv.clone();
    full_axes(&p, &mut work, &inv, true);
    let mut out = vec![0.0; n * n * n];
    let mut scratch = vec![Complex64::new(0.0, 0.0); p.c2r.get_scratch_len()];
    for row in 0..n * n {
        let line = &mut work[row * nh..(row + 1) * nh];
        // A real signal has real DC and Nyquist terms along the halved axis.
        line[0].im = 0.0;
        line[nh - 1].im = 0.0;
        p.c2r
            .process_with_scratch(line, &mut out[row * n..(row + 1) * n], &mut scratch)
            .expect("c2r length mismatch");
    }
    out
}
