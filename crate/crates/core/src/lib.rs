//! Numerics for the Landau equation with Coulomb interactions: phase-space
//! lattices, the conservative discrete collision operator, the macro–micro
//! decomposition with Burnett functions, fluid solvers, a kinetic solver for the
//! scaled equation, and energy/entropy diagnostics.

pub mod collision;
pub mod diagnostics;
pub mod error;
pub mod fft;
pub mod fluid;
pub mod kinetic;
pub mod macro_micro;
pub mod maxwellian;
pub mod phase_space;
pub mod stencil;

pub use error::{LandauError, Result};
