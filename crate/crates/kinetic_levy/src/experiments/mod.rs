//! Monte-Carlo checks of the scaling limits: characteristic functions of the
//! rescaled flight process, the law of large numbers for the clock, and the
//! hydrodynamic limit of the kinetic solution.

mod charfn;
mod clock;
mod config;
mod ensemble;
mod hydro;

pub use charfn::{charfn_convergence, scaled_flight_samples, CharfnOptions};
pub use clock::{clock_convergence, ClockOptions};
pub use config::{ExperimentConfig, ExperimentReport, ReportRow};
pub use ensemble::{ensemble_map, trajectory_rng};
pub use hydro::{hydro_limit_f, hydro_reference, HydroOptions};
