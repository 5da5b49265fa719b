use super::euler::euler_rhs;
use super::spectral::Spectral;
use crate::macro_micro::TransportCoefficients;
use crate::maxwellian::FluidState;

/// Viscous stress `D_ij = ∂_j u_i + ∂_i u_j − (2/3) δ_ij ∇·u`, stored as `d[i][j]`.
#[derive(Debug, Clone)]
pub struct StressTensor {
    pub d: [[Vec<f64>; 3]; 3],
}

impl StressTensor {
    pub fn new(state: &FluidState, sp: &Spectral) -> Self {
        let n = state.len();
        let grad = [0, 1, 2].map(|i| sp.gradient(&state.u[i]));
        let div: Vec<f64> = (0..n).map(|k| (0..3).map(|j| grad[j][j][k]).sum()).collect();
        let d = [0, 1, 2].map(|i| {
            [0, 1, 2].map(|j| {
                (0..n)
                    .map(|k| {
                        grad[i][j][k] + grad[j][i][k] - if i == j { 2.0 / 3.0 * div[k] } else { 0.0 }
                    })
                    .collect()
            })
        });
        Self { d }
    }

    pub fn max_trace(&self) -> f64 {
        (0..self.d[0][0].len())
            .map(|k| (self.d[0][0][k] + self.d[1][1][k] + self.d[2][2][k]).abs())
            .fold(0.0, f64::max)
    }
}

/// Euler right-hand side plus the first-order viscous and heat-flux terms
/// `ε Σ_j ∂_j[μ(θ) D_ij]` and `ε Σ_j ∂_j(κ(θ) ∂_jθ) + ε Σ_ij ∂_j[μ(θ) u_i D_ij]`,
/// in conservative variables.
pub fn ns_type_rhs(state: &FluidState, eps: f64, transport: &TransportCoefficients, sp: &Spectral) -> [Vec<f64>; 5] {
    let mut out = euler_rhs(state, sp);
    if eps == 0.0 {
        return out;
    }
    let n = state.len();
    let stress = StressTensor::new(state, sp);
    let mu: Vec<f64> = state.theta.iter().map(|&t| transport.mu(t)).collect();
    let kappa: Vec<f64> = state.theta.iter().map(|&t| transport.kappa(t)).collect();
    let grad_theta = sp.gradient(&state.theta);
    let dims = sp.grid().dim();
    for j in 0..dims {
        for i in 0..3 {
            let flux: Vec<f64> = (0..n).map(|k| mu[k] * stress.d[i][j][k]).collect();
            let d = sp.derivative(&flux, j);
            for k in 0..n {
                out[1 + i][k] += eps * d[k];
            }
        }
        let mut flux: Vec<f64> = (0..n).map(|k| kappa[k] * grad_theta[j][k]).collect();
        for i in 0..3 {
            for k in 0..n {
                flux[k] += mu[k] * state.u[i][k] * stress.d[i][j][k];
            }
        }
        let d = sp.derivative(&flux, j);
        for k in 0..n {
            out[4][k] += eps * d[k];
        }
    }
    out
}
