//! Macro–micro decomposition: projections, the constrained inverse of `L_M`,
//! Burnett functions, transport coefficients and the first-order correction `Ḡ`.

mod basis;
mod burnett;
mod consistency;
mod identities;
mod inverse;

pub use basis::{project_p0, project_p1, MacroBasis};
pub use burnett::{
    a_hat, b_hat, correction_gbar, correction_gbar_direct, transport_coefficients, transport_source,
    BurnettSet, BurnettTable, Gradients, GramCheck, TransportCoefficients,
};
pub use consistency::{theta_consistency_check, ConsistencyReport};
pub use identities::{
    burnett_expansion, decay_envelope, decomposition_check, hydrodynamic_identities,
    p1_transport_identity_check, transport_of_maxwellian, weighted_decay_integral,
};
pub use inverse::{solve_lm_inverse, InverseMethod, InverseOptions, LmInverse, SolveReport};
