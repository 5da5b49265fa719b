//! Time integration of `∂_tF + v·∇_xF = (1/ε) Q(F, F)` on a periodic torus.

mod runs;
mod step;

pub use runs::{
    acoustic_initial_state, run_acoustic_limit, run_euler_limit, AcousticLimitRun, AcousticSnapshot,
    EulerLimitRun, EulerLimitSnapshot,
};
pub use step::{InitialMode, KineticRunConfig, KineticSolver, StepReport, TimeStepPolicy};
