//! Smooth-solution solvers for the compressible Euler and acoustic systems and
//! the Navier–Stokes-type right-hand side.

mod acoustic;
mod euler;
mod navier_stokes;
mod spectral;

pub use acoustic::{acoustic_exact, acoustic_limit_profile, acoustic_solve, acoustic_speed, AcousticState};
pub use euler::{
    conservative, euler_primitive_rates, euler_rhs, euler_solve, primitive, simple_wave, sound_speed,
    EulerOptions, EulerSolution,
};
pub use navier_stokes::{ns_type_rhs, StressTensor};
pub use spectral::Spectral;
