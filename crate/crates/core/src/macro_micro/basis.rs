use nalgebra::Matrix5;

use crate::error::{LandauError, Result};
use crate::maxwellian::{maxwellian, MaxwellState};
use crate::phase_space::VelocityGrid;

/// The five macroscopic basis functions of a Maxwellian and the projections onto
/// their span.
///
/// `chi` holds the closed-form functions; `ortho` is their Cholesky
/// orthonormalization in `⟨·, ·/M⟩` on the lattice, which spans the same space
/// and makes the discrete projector exactly idempotent.
#[derive(Debug, Clone)]
pub struct MacroBasis {
    pub state: MaxwellState,
    pub m: Vec<f64>,
    pub chi: [Vec<f64>; 5],
    pub ortho: [Vec<f64>; 5],
    pub gram: Matrix5<f64>,
    grid: VelocityGrid,
}

impl MacroBasis {
    pub fn new(state: MaxwellState, grid: &VelocityGrid) -> Result<Self> {
        let m = maxwellian(&state, grid)?;
        Self::with_values(state, m, grid)
    }

    /// Basis for the given lattice Maxwellian values of `state`.
    pub fn with_values(state: MaxwellState, m: Vec<f64>, grid: &VelocityGrid) -> Result<Self> {
        let rt = state.r_theta();
        let rho = state.rho;
        let comps = grid.components();
        let len = grid.len();
        let mut chi: [Vec<f64>; 5] = Default::default();
        chi[0] = m.iter().map(|x| x / rho.sqrt()).collect();
        for d in 0..3 {
            chi[1 + d] = (0..len)
                .map(|p| (comps[d][p] - state.u[d]) * m[p] / (rt * rho).sqrt())
                .collect();
        }
        chi[4] = (0..len)
            .map(|p| {
                let w2: f64 = (0..3).map(|d| (comps[d][p] - state.u[d]).powi(2)).sum();
                (w2 / rt - 3.0) * m[p] / (6.0 * rho).sqrt()
            })
            .collect();
        let mut gram = Matrix5::zeros();
        for i in 0..5 {
            for j in i..5 {
                let g = grid.dot_weighted(&chi[i], &chi[j], &m);
                gram[(i, j)] = g;
                gram[(j, i)] = g;
            }
        }
        let chol = gram
            .cholesky()
            .ok_or_else(|| LandauError::Domain("macro Gram matrix is not positive definite".into()))?;
        let linv = chol
            .l()
            .try_inverse()
            .ok_or_else(|| LandauError::Domain("singular macro Gram factor".into()))?;
        let mut ortho: [Vec<f64>; 5] = Default::default();
        for i in 0..5 {
            let mut v = vec![0.0; len];
            for j in 0..=i {
                let c = linv[(i, j)];
                for p in 0..len {
                    v[p] += c * chi[j][p];
                }
            }
            ortho[i] = v;
        }
        Ok(Self {
            state,
            m,
            chi,
            ortho,
            gram,
            grid: grid.clone(),
        })
    }

    pub fn grid(&self) -> &VelocityGrid {
        &self.grid
    }

    /// Largest entry of `gram − I`.
    pub fn gram_deviation(&self) -> f64 {
        (self.gram - Matrix5::identity()).abs().max()
    }

    /// Coefficients `⟨h, χ̃_i/M⟩` in the orthonormal basis.
    pub fn coefficients(&self, h: &[f64]) -> [f64; 5] {
        let mut c = [0.0; 5];
        for (ci, e) in c.iter_mut().zip(&self.ortho) {
            *ci = self.grid.dot_weighted(h, e, &self.m);
        }
        c
    }

    pub fn project_p0(&self, h: &[f64]) -> Vec<f64> {
        let c = self.coefficients(h);
        let mut out = vec![0.0; h.len()];
        for (ci, e) in c.iter().zip(&self.ortho) {
            for (o, x) in out.iter_mut().zip(e) {
                *o += ci * x;
            }
        }
        out
    }

    pub fn project_p1(&self, h: &[f64]) -> Vec<f64> {
        let p0 = self.project_p0(h);
        h.iter().zip(&p0).map(|(a, b)| a - b).collect()
    }

    /// `‖h‖` in `⟨·, ·/M⟩`.
    pub fn norm(&self, h: &[f64]) -> f64 {
        self.grid.dot_weighted(h, h, &self.m).max(0.0).sqrt()
    }

    /// `‖P_0 h‖ / ‖h‖` in `⟨·, ·/M⟩`.
    pub fn macroscopic_fraction(&self, h: &[f64]) -> f64 {
        let total = self.norm(h);
        if total == 0.0 {
            return 0.0;
        }
        let c = self.coefficients(h);
        c.iter().map(|x| x * x).sum::<f64>().sqrt() / total
    }
}

/// `P_0 h` for the Maxwellian of `state`.
pub fn project_p0(h: &[f64], state: &MaxwellState, grid: &VelocityGrid) -> Result<Vec<f64>> {
    Ok(MacroBasis::new(*state, grid)?.project_p0(h))
}

/// `P_1 h = h − P_0 h`.
pub fn project_p1(h: &[f64], state: &MaxwellState, grid: &VelocityGrid) -> Result<Vec<f64>> {
    Ok(MacroBasis::new(*state, grid)?.project_p1(h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_space::build_velocity_grid;

    fn basis() -> MacroBasis {
        let g = build_velocity_grid(6.0, 17).unwrap();
        MacroBasis::new(MaxwellState::new(1.2, [0.3, -0.1, 0.2], 1.4), &g).unwrap()
    }

    #[test]
    fn maxwellian_and_momentum_are_macroscopic() {
        let b = basis();
        let p1 = b.project_p1(&b.m);
        assert!(p1.iter().all(|x| x.abs() < 1e-14));
        let comps = b.grid().components();
        let vm: Vec<f64> = comps[0].iter().zip(&b.m).map(|(v, m)| v * m).collect();
        let p1 = b.project_p1(&vm);
        assert!(p1.iter().all(|x| x.abs() < 1e-14));
    }

    #[test]
    fn gram_is_nearly_identity() {
        assert!(basis().gram_deviation() < 1e-6);
    }

    #[test]
    fn projector_algebra() {
        let b = basis();
        let h: Vec<f64> = (0..b.m.len())
            .map(|p| b.m[p] * ((p as f64 * 0.77).sin() + 0.3))
            .collect();
        let p0 = b.project_p0(&h);
        let p0p0 = b.project_p0(&p0);
        let p1p0 = b.project_p1(&p0);
        let p0p1 = b.project_p0(&b.project_p1(&h));
        let scale = b.norm(&h);
        let diff: Vec<f64> = p0.iter().zip(&p0p0).map(|(a, c)| a - c).collect();
        assert!(b.norm(&diff) < 1e-12 * scale);
        assert!(b.norm(&p1p0) < 1e-12 * scale);
        assert!(b.norm(&p0p1) < 1e-12 * scale);
    }
}
