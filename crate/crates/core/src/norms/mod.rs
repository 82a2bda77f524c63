//! Lebesgue and Sobolev norms, the scaling group, heat-kernel norms and
//! inequality checkers.

pub mod caloric;
pub mod checks;
pub mod kernel;
pub mod lp;
pub mod scaling;

pub use caloric::{besov_caloric_norm, geometric_times};
pub use checks::{bilinear_bound_check, interpolation_check, prop31_check, InterpolationOutcome, Margin, Prop31Outcome};
pub use kernel::{grad_kernel_norm, kernel_norm_exact, young_exponent};
pub use lp::{grad_norms, grad_three_halves_power_l2, lp, lp_norm, FieldSamples, GradNorms, NormReport};
pub use scaling::{scale_field, ExponentTriple, ScalingParams};
