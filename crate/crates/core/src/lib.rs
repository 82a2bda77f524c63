//! Pseudospectral laboratory for the incompressible Navier–Stokes equations
//! on a periodic box: mild (Duhamel/Picard) and direct solvers, norm and
//! scaling utilities, and checkers for the inequalities that control
//! large-data smoothness arguments.

pub mod error;
pub mod experiments;
pub mod initial;
pub mod leray;
pub mod mild;
pub mod norms;
pub mod numerics;
pub mod spectral;

pub use error::{NsxError, Result};
