pub mod beta;
pub mod picard;
pub mod quadrature;

pub use beta::{beta_function, small_ball_beta_pairs};
pub use picard::{
    picard_solve_v, picard_solve_w, split_consistency, ForcingForm, PicardConfig, PicardRow, PicardStart, PicardState,
};
pub use quadrature::{
    duhamel_integral, duhamel_integral_checked, graded_nodes, panel_moments, stokes_evolve, DuhamelGrid, DuhamelRule,
};
