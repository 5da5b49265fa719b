use crate::error::{LandauError, Result};
use crate::fluid::{euler_primitive_rates, Spectral};
use crate::maxwellian::{FluidState, R_GAS};

const FLOOR: f64 = 1e-14;

/// `Ψ(s) = s − ln s − 1`.
pub fn psi(s: f64) -> f64 {
    s - s.ln() - 1.0
}

/// `S = −(2/3) ln ρ + ln(2πRθ) + 1`, the entropy with `−(3/2)ρS = ∫ M ln M dv`.
pub fn macroscopic_entropy(rho: f64, theta: f64) -> f64 {
    -2.0 / 3.0 * rho.ln() + (2.0 * std::f64::consts::PI * R_GAS * theta).ln() + 1.0
}

/// Relative entropy `η` and flux `q` of a state around a background.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyPair {
    pub eta: Vec<f64>,
    pub q: [Vec<f64>; 3],
}

fn check(state: &FluidState, background: &FluidState) -> Result<()> {
    if state.len() != background.len() {
        return Err(LandauError::GridMismatch("state and background have different lengths".into()));
    }
    state.validate()?;
    background.validate()
}

/// `η = ρθ̄Ψ(ρ̄/ρ) + (3/2)ρθ̄Ψ(θ/θ̄) + (3/4)ρ|u − ū|²` and
/// `q_j = u_jη + (u_j − ū_j)(ρθ − ρ̄θ̄)`.
pub fn entropy_pair(state: &FluidState, background: &FluidState) -> Result<EntropyPair> {
    check(state, background)?;
    let n = state.len();
    let mut eta = vec![0.0; n];
    let mut q = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    for k in 0..n {
        let s = state.node(k);
        let b = background.node(k);
        let du2: f64 = (0..3).map(|i| (s.u[i] - b.u[i]).powi(2)).sum();
        let e = s.rho * b.theta * psi(b.rho / s.rho) + 1.5 * s.rho * b.theta * psi(s.theta / b.theta) + 0.75 * s.rho * du2;
        eta[k] = e;
        for j in 0..3 {
            q[j][k] = s.u[j] * e + (s.u[j] - b.u[j]) * (s.rho * s.theta - b.rho * b.theta);
        }
    }
    Ok(EntropyPair { eta, q })
}

/// Smallest and largest `η / |(ρ̃, ũ, θ̃)|²` over nodes with a nonzero perturbation.
pub fn entropy_equivalence_check(state: &FluidState, background: &FluidState) -> Result<(f64, f64)> {
    let pair = entropy_pair(state, background)?;
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for k in 0..state.len() {
        let s = state.node(k);
        let b = background.node(k);
        let d2 = (s.rho - b.rho).powi(2)
            + (0..3).map(|i| (s.u[i] - b.u[i]).powi(2)).sum::<f64>()
            + (s.theta - b.theta).powi(2);
        if d2 > 0.0 {
            let r = pair.eta[k] / d2;
            lo = lo.min(r);
            hi = hi.max(r);
        }
    }
    if lo.is_infinite() {
        return Err(LandauError::InvalidInput("state coincides with the background everywhere".into()));
    }
    Ok((lo, hi))
}

/// Nodewise residual, relative to the largest term over the field, of the identity
/// `∇_{[ρ̄,ū,S̄]}η·∂_t(ρ̄,ū,S̄) + Σ_j ∇_{[ρ̄,ū,S̄]}q_j·∂_j(ρ̄,ū,S̄)
///  = −(3/2)ρũ·(ũ·∇ū) − (2/3)ρθ̄(∇·ū)Ψ(ρ̄/ρ) − ρθ̄(∇·ū)Ψ(θ/θ̄) − (3/2)ρ∇θ̄·ũ((2/3)ln(ρ̄/ρ) + ln(θ/θ̄))`,
/// with the background time derivatives taken from the Euler equations.
pub fn entropy_balance_residual(state: &FluidState, background: &FluidState, sp: &Spectral) -> Result<Vec<f64>> {
    check(state, background)?;
    if background.len() != sp.grid().len() {
        return Err(LandauError::GridMismatch("background does not match the spectral grid".into()));
    }
    let rates = euler_primitive_rates(background, sp);
    let grad_rho = sp.gradient(&background.rho);
    let grad_theta = sp.gradient(&background.theta);
    let grad_u = [0, 1, 2].map(|i| sp.gradient(&background.u[i]));
    let n = state.len();
    let mut out = vec![0.0; n];
    let mut scale = FLOOR;
    for k in 0..n {
        let s = state.node(k);
        let b = background.node(k);
        let (rho, u, theta) = (s.rho, s.u, s.theta);
        let (rb, ub, tb) = (b.rho, b.u, b.theta);
        let big_s = macroscopic_entropy(rho, theta);
        let sb = macroscopic_entropy(rb, tb);
        let ds = big_s - sb;
        let dt_rho = rates.rho[k];
        let dt_u = [rates.u[0][k], rates.u[1][k], rates.u[2][k]];
        let dt_s = -2.0 / 3.0 * dt_rho / rb + rates.theta[k] / tb;
        let gr = [grad_rho[0][k], grad_rho[1][k], grad_rho[2][k]];
        let gt = [grad_theta[0][k], grad_theta[1][k], grad_theta[2][k]];
        let gs: Vec<f64> = (0..3).map(|j| -2.0 / 3.0 * gr[j] / rb + gt[j] / tb).collect();
        // ∂_j ū_i
        let gu = |i: usize, j: usize| grad_u[i][j][k];

        let eta_rho = -(rho / rb) * tb * ds - 5.0 / (3.0 * rb) * tb * (rho - rb);
        let eta_u: Vec<f64> = (0..3).map(|i| -1.5 * rho * (u[i] - ub[i])).collect();
        let eta_s = -1.5 * rho * tb * ds - tb * (rho - rb);
        let mut lhs = eta_rho * dt_rho + eta_s * dt_s + (0..3).map(|i| eta_u[i] * dt_u[i]).sum::<f64>();
        for j in 0..3 {
            let q_rho = -u[j] * (rho / rb) * tb * ds - 5.0 * u[j] / (3.0 * rb) * tb * (rho - rb) - 5.0 / 3.0 * tb * (u[j] - ub[j]);
            let q_s = -1.5 * u[j] * rho * tb * ds + ub[j] * tb * rb - u[j] * rho * tb;
            lhs += q_rho * gr[j] + q_s * gs[j];
            for i in 0..3 {
                let mut q_u = -1.5 * u[j] * rho * (u[i] - ub[i]);
                if i == j {
                    q_u -= rho * theta - rb * tb;
                }
                lhs += q_u * gu(i, j);
            }
        }

        let ut: Vec<f64> = (0..3).map(|i| u[i] - ub[i]).collect();
        let div: f64 = (0..3).map(|i| gu(i, i)).sum();
        let mut quad = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                quad += ut[i] * ut[j] * gu(i, j);
            }
        }
        let logs = 2.0 / 3.0 * (rb / rho).ln() + (theta / tb).ln();
        let rhs = -1.5 * rho * quad - 2.0 / 3.0 * rho * tb * div * psi(rb / rho) - rho * tb * div * psi(theta / tb)
            - 1.5 * rho * logs * (0..3).map(|j| gt[j] * ut[j]).sum::<f64>();
        out[k] = (lhs - rhs).abs();
        scale = scale.max(lhs.abs()).max(rhs.abs());
    }
    out.iter_mut().for_each(|r| *r /= scale);
    Ok(out)
}
