//! Complex-time integration, certified regions and their numerical checks.

mod budget;
mod calibrate;
mod chain;
mod convergence;
mod ray;
mod region;

pub use budget::{energy_budget, BudgetReport, BudgetStep, BUDGET_TOLERANCE, MAX_SPACING};
pub use calibrate::{calibrate_constant, Calibration, CalibrationSettings, CalibrationStep};
pub use chain::{chain_disks, Coverage, Disk, SchedulePoint};
pub use convergence::{galerkin_convergence, ConvergenceReport, CutoffDeviation};
pub use ray::{
    integrate_ray, integrate_ray_with, Integrator, RaySpec, RayStatus, RayStepper, RayTrajectory, Sample,
    DEFAULT_BLOWUP_FACTOR, RADIUS_GUARD,
};
pub use region::{
    certified_radius, run_ray, sweep_theta, CertifiedRegion, ConstantPolicy, EmpiricalTag, RayOutcome, Sweep,
};
