use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LandauError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("non-finite value at node {node} (v = {velocity:?})")]
    NonFinite { node: usize, velocity: [f64; 3] },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("moment recovery failed at x-node {x_node}: {reason}")]
    MomentRecovery { x_node: usize, reason: String },
    #[error("right-hand side is not microscopic (relative macroscopic content {defect:.3e})")]
    NotMicroscopic { defect: f64 },
    #[error(
        "ill-conditioned linearized operator (eigenvalue ratio {ratio:.3e}); increase n_v or reduce L_v"
    )]
    Conditioning { ratio: f64 },
    #[error("iterative solve did not converge after {iterations} iterations (residual {residual:.3e})")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("time step {dt:.4e} violates the transport CFL limit {limit:.4e}")]
    Cfl { dt: f64, limit: f64 },
    #[error("gradient steepening at t = {time:.4}: max|grad u| grew by {ratio:.1}x")]
    Steepening { time: f64, ratio: f64 },
    #[error("negative mass at x-node {x_node}, v-node {v_node}: F = {value:.3e} (max F = {max:.3e})")]
    NegativeMass {
        x_node: usize,
        v_node: usize,
        value: f64,
        max: f64,
    },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, LandauError>;
