use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::grid::GridSpec;

/// Per-grid mode tables shared by all operators.
#[derive(Debug)]
pub struct Wavenumbers {
    pub k: Vec<[f64; 3]>,
    pub k2: Vec<f64>,
    pub k_eff: Vec<[f64; 3]>,
    pub k2_eff: Vec<f64>,
    pub dealias: Vec<bool>,
    pub parseval: Vec<f64>,
}

type Key = (usize, u64, u64);

pub fn wavenumbers(grid: &GridSpec) -> Arc<Wavenumbers> {
    static CACHE: OnceLock<Mutex<HashMap<Key, Arc<Wavenumbers>>>> = OnceLock::new();
    let key = (grid.n_per_axis, grid.box_length.to_bits(), grid.dealias_fraction.to_bits());
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("wavenumber cache poisoned");
    guard
        .entry(key)
        .or_insert_with(|| {
            let k = grid.wavevectors();
            let k_eff = grid.derivative_wavevectors();
            let norm2 = |v: &[f64; 3]| v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
            Arc::new(Wavenumbers {
                k2: k.iter().map(norm2).collect(),
                k2_eff: k_eff.iter().map(norm2).collect(),
                k,
                k_eff,
                dealias: grid.dealias_mask(),
                parseval: (0..grid.spectral_len()).map(|i| grid.parseval_weight(i)).collect(),
            })
        })
        .clone()
}
