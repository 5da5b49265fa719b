//! Norms, energy functionals, the relative entropy pair, identity residuals and
//! rate fits evaluated on snapshots.

mod energy;
mod entropy;
mod fit;
mod norms;

pub use energy::{energy_functionals, EnergyInput, EnergyOptions, EnergyReport, EnergyTerm};
pub use entropy::{
    entropy_equivalence_check, entropy_pair, entropy_balance_residual, macroscopic_entropy, psi, EntropyPair,
};
pub use fit::{convergence_fit, Fit};
pub use norms::{field_totals, l2_norm, mu_weighted_distance, relative_drift};
