pub mod diagnostics;
pub mod evolve;
pub mod monitor;
pub mod pressure;
pub mod stepper;

pub use diagnostics::{
    assumption_a_monitor, ess_monitor, find_t_star, smoothness_proxy, sup_l3_after, weighted_decay_holds,
    AssumptionAReport, EssReport, InfChain, SmoothnessVerdict, TStarReport,
};
pub use evolve::{
    evolve, evolve_pair, evolve_split, evolve_split_ns, evolve_split_pert, run_system, Dynamics, EvolveOptions,
    PairedTrajectory, SplitTrajectory, SystemRun, Trajectory, View,
};
pub use monitor::{energy_ledger, EnergyLedger, TrajectoryMonitor};
pub use pressure::{
    calderon_zygmund_check, calderon_zygmund_parts, calderon_zygmund_ratio, poisson_residual, recover_pressure,
    recover_pressure_difference, PressureField, PressureSource,
};
pub use stepper::{Integrator, Scheme, TimeStepper};
