use rustfft::num_complex::Complex64;

use super::spectral::Spectral;
use crate::phase_space::{SpatialGrid, VelocityGrid};

/// Acoustic fluctuation `(ϱ, φ, ϑ)` and its amplitude `δ`.
#[derive(Debug, Clone, PartialEq)]
pub struct AcousticState {
    pub rho: Vec<f64>,
    pub phi: [Vec<f64>; 3],
    pub theta: Vec<f64>,
    pub delta: f64,
}

/// `c = √(5/3)`.
pub fn acoustic_speed() -> f64 {
    (5.0f64 / 3.0).sqrt()
}

impl AcousticState {
    pub fn from_fn(grid: &SpatialGrid, delta: f64, f: impl Fn([f64; 3]) -> (f64, [f64; 3], f64)) -> Self {
        let vals: Vec<_> = (0..grid.len()).map(|k| f(grid.position(k))).collect();
        Self {
            rho: vals.iter().map(|v| v.0).collect(),
            phi: [0, 1, 2].map(|d| vals.iter().map(|v| v.1[d]).collect()),
            theta: vals.iter().map(|v| v.2).collect(),
            delta,
        }
    }

    /// `‖(ϱ, φ, √(3/2) ϑ)‖²_{H^s}`.
    pub fn quadratic_form(&self, sp: &Spectral, s: f64) -> f64 {
        sp.hs_norm_sq(&self.rho, s)
            + self.phi.iter().map(|p| sp.hs_norm_sq(p, s)).sum::<f64>()
            + 1.5 * sp.hs_norm_sq(&self.theta, s)
    }
}

/// Exact evolution of the linear acoustic system, mode by mode.
///
/// With `q = ϱ + ϑ` and the longitudinal flux `φ_L = n·φ̂`, each mode obeys
/// `q(t) = q_0 cos(cκt) − i c φ_{L,0} sin(cκt)`, `φ_L(t) = φ_{L,0} cos(cκt) − i (q_0/c) sin(cκt)`,
/// while `ϱ − (3/2)ϑ` and the transverse part of `φ̂` stay constant.
pub fn acoustic_exact(init: &AcousticState, t: f64, sp: &Spectral) -> AcousticState {
    let c = acoustic_speed();
    let r = sp.forward(&init.rho);
    let th = sp.forward(&init.theta);
    let ph = [0, 1, 2].map(|d| sp.forward(&init.phi[d]));
    let len = r.len();
    let mut r_out = vec![Complex64::default(); len];
    let mut th_out = vec![Complex64::default(); len];
    let mut ph_out = [0, 1, 2].map(|_| vec![Complex64::default(); len]);
    let i = Complex64::new(0.0, 1.0);
    for q in 0..len {
        let k = sp.full_wavevector(q);
        let kappa = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
        if kappa == 0.0 {
            r_out[q] = r[q];
            th_out[q] = th[q];
            for d in 0..3 {
                ph_out[d][q] = ph[d][q];
            }
            continue;
        }
        let n = k.map(|x| x / kappa);
        let phl: Complex64 = (0..3).map(|d| n[d] * ph[d][q]).sum();
        let q0 = r[q] + th[q];
        let w = r[q] - 1.5 * th[q];
        let (sn, cs) = (c * kappa * t).sin_cos();
        let qt = q0 * cs - i * c * phl * sn;
        let pt = phl * cs - i * (q0 / c) * sn;
        let tht = (qt - w) * 0.4;
        th_out[q] = tht;
        r_out[q] = qt - tht;
        for d in 0..3 {
            ph_out[d][q] = ph[d][q] + n[d] * (pt - phl);
        }
    }
    AcousticState {
        rho: sp.inverse_real(r_out),
        phi: ph_out.map(|b| sp.inverse_real(b)),
        theta: sp.inverse_real(th_out),
        delta: init.delta,
    }
}

/// The acoustic solver; the system is linear with constant coefficients, so the
/// solver is the exact propagator.
pub fn acoustic_solve(init: &AcousticState, t: f64, sp: &Spectral) -> AcousticState {
    acoustic_exact(init, t, sp)
}

/// `𝐟 = {ϱ + v·φ + ((|v|² − 3)/2) ϑ} √μ` at one spatial node.
pub fn acoustic_limit_profile(rho: f64, phi: [f64; 3], theta: f64, grid: &VelocityGrid) -> Vec<f64> {
    let norm = (2.0 * std::f64::consts::PI).powf(-1.5);
    grid.sample(|v| {
        let v2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        let sqrt_mu = (norm * (-0.5 * v2).exp()).sqrt();
        (rho + v[0] * phi[0] + v[1] * phi[1] + v[2] * phi[2] + 0.5 * (v2 - 3.0) * theta) * sqrt_mu
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standing_wave_oracle() {
        let g = SpatialGrid::line(16).unwrap();
        let sp = Spectral::new(&g);
        let k = 2.0;
        let init = AcousticState::from_fn(&g, 0.1, |x| ((k * x[0]).cos(), [0.0; 3], 2.0 / 3.0 * (k * x[0]).cos()));
        let c = acoustic_speed();
        let t = 0.37;
        let s = acoustic_exact(&init, t, &sp);
        for n in 0..g.len() {
            let x = g.position(n)[0];
            assert!((s.rho[n] - (k * x).cos() * (c * k * t).cos()).abs() < 1e-12);
            assert!((s.phi[0][n] - c * (k * x).sin() * (c * k * t).sin()).abs() < 1e-12);
            assert!((s.theta[n] - 2.0 / 3.0 * s.rho[n]).abs() < 1e-12);
        }
    }

    #[test]
    fn divergence_free_flux_is_stationary() {
        let g = SpatialGrid::new(3, 8, 2.0 * std::f64::consts::PI).unwrap();
        let sp = Spectral::new(&g);
        let init = AcousticState::from_fn(&g, 0.1, |x| (0.0, [x[1].sin(), x[2].cos(), 0.0], 0.0));
        let s = acoustic_exact(&init, 1.3, &sp);
        for n in 0..g.len() {
            assert!(s.rho[n].abs() < 1e-13 && s.theta[n].abs() < 1e-13);
            assert!((s.phi[0][n] - init.phi[0][n]).abs() < 1e-13);
        }
    }
}
