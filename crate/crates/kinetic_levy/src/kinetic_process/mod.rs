//! The pure-jump process (K, I) of phonon modes, its clock 𝒯, the flight
//! functional Z, and quadrature versions of the generator ℒ_B and the
//! collision operator C_B.
//!
//! After the first jump the chain is an i.i.d. sequence with law π_B, so a
//! trajectory is a sequence of independent draws with exponential holding
//! times `λ(X_n)τ_n`.

mod generator;
mod sampling;
mod split;
mod trajectory;

pub use generator::{apply_collision, apply_generator, generator_reduced, pi_average};
pub use sampling::{exp1, sample_pi, step_chain};
pub use split::{Arrival, ClockPiece, FlightSimulator, SplitConfig, SplitSampler};
pub use trajectory::{
    clock_inverse, flight_integral, flight_integral_with_prefactor, flight_path, simulate_trajectory,
    simulate_until, FlightPath, Trajectory, FLIGHT_PREFACTOR,
};
