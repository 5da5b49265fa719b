//! The Coulomb Landau operator: kernel table, conservative discrete `Q`, the
//! collision frequency `σ`, and the linearizations `L_M`, `𝓛`, `Γ`.

mod convolution;
mod kernel;
mod norms;
mod operator;

pub use convolution::{apply_direct, matrix_terms, vector_terms, Convolver, Term};
pub use kernel::{build_kernel_table, coulomb, pair_index, KernelTable, LATTICE_SELF_CELL, PAIRS};
pub use norms::{sigma_norm, weight_power};
pub use operator::{CollisionOperator, ConvolutionPath, LinearizedOperator, Reference, SigmaField};
