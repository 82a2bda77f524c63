//! Seeds, the two-scale splitting construction, smallness conditions,
//! bootstrap constants and calibration of inequality constants.

pub mod bootstrap;
pub mod calibration;
pub mod conditions;
pub mod random;
pub mod scissors;
pub mod seed;

pub use bootstrap::{bootstrap_constants, BootstrapInputs, BootstrapReport};
pub use calibration::{calibrate_c, Calibration, CalibrationRecord, InequalityId};
pub use conditions::{check_condition, ConditionId, ConditionInputs, ConditionReport, DEFAULT_THETA};
pub use scissors::{apply_scissors_scaling, scissors_split, size_ledger, two_seed_construction, ScissorsOutcome, SizeLedger};
pub use seed::{make_divfree_seed, SeedKind, SeedSpec, SeedSum};
