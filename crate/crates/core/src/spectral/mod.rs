//! Periodic-box spectral representation and operators.

pub mod fft;
pub mod field;
pub mod grid;
pub mod mollifier;
pub mod ops;
pub mod snapshot;
pub mod wavenumbers;

pub use field::{sample_grid, PhysicalVector, ScalarField, ScalarRole, SpectralVectorField};
pub use grid::GridSpec;
pub use snapshot::{load_snapshot, read_snapshot, save_snapshot, write_snapshot, Snapshot};
pub use mollifier::{mollify, Mollifier, MollifierProfile, MollifierSpec};
pub use ops::{
    dealias, divergence, gradient, heat_multiplier, heat_propagate, laplacian, leray_project, nonlinear_self,
    nonlinear_term, relative_divergence, solve_poisson,
};
