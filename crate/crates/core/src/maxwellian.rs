//! Maxwellians, fluid moments and collision invariants.

use nalgebra::{Matrix5, Vector5};

use crate::error::{LandauError, Result};
use crate::phase_space::{DistributionField, Role, SpatialGrid, VelocityGrid};

/// Gas constant; with this choice the internal energy per unit mass equals θ.
pub const R_GAS: f64 = 2.0 / 3.0;

/// Fluid state `(ρ, u, θ)` at one spatial node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxwellState {
    pub rho: f64,
    pub u: [f64; 3],
    pub theta: f64,
}

impl MaxwellState {
    pub fn new(rho: f64, u: [f64; 3], theta: f64) -> Self {
        Self { rho, u, theta }
    }

    /// The reference equilibrium `(1, 0, 3/2)`, for which `Rθ = 1`.
    pub fn global() -> Self {
        Self::new(1.0, [0.0; 3], 1.5)
    }

    pub fn r_theta(&self) -> f64 {
        R_GAS * self.theta
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0) || !self.rho.is_finite() {
            return Err(LandauError::Domain(format!("density must be positive, got {}", self.rho)));
        }
        if !(self.theta > 0.0) || !self.theta.is_finite() {
            return Err(LandauError::Domain(format!(
                "temperature must be positive, got {}",
                self.theta
            )));
        }
        if self.u.iter().any(|x| !x.is_finite()) {
            return Err(LandauError::Domain("bulk velocity is not finite".into()));
        }
        Ok(())
    }

    /// `M(v)` at a single velocity.
    pub fn eval(&self, v: [f64; 3]) -> f64 {
        let rt = self.r_theta();
        let d2: f64 = (0..3).map(|d| (v[d] - self.u[d]).powi(2)).sum();
        self.rho * (2.0 * std::f64::consts::PI * rt).powf(-1.5) * (-d2 / (2.0 * rt)).exp()
    }

    /// Reduced velocity `w = (v - u)/√(Rθ)`.
    pub fn reduced(&self, v: [f64; 3]) -> [f64; 3] {
        let s = self.r_theta().sqrt();
        [(v[0] - self.u[0]) / s, (v[1] - self.u[1]) / s, (v[2] - self.u[2]) / s]
    }
}

/// Fluid fields over a spatial grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FluidState {
    pub rho: Vec<f64>,
    pub u: [Vec<f64>; 3],
    pub theta: Vec<f64>,
}

impl FluidState {
    pub fn uniform(grid: &SpatialGrid, s: MaxwellState) -> Self {
        let n = grid.len();
        Self {
            rho: vec![s.rho; n],
            u: s.u.map(|c| vec![c; n]),
            theta: vec![s.theta; n],
        }
    }

    pub fn from_fn(grid: &SpatialGrid, f: impl Fn([f64; 3]) -> MaxwellState) -> Self {
        Self::from_states(&(0..grid.len()).map(|k| f(grid.position(k))).collect::<Vec<_>>())
    }

    pub fn from_states(states: &[MaxwellState]) -> Self {
        Self {
            rho: states.iter().map(|s| s.rho).collect(),
            u: [0, 1, 2].map(|d| states.iter().map(|s| s.u[d]).collect()),
            theta: states.iter().map(|s| s.theta).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }

    pub fn node(&self, k: usize) -> MaxwellState {
        MaxwellState::new(
            self.rho[k],
            [self.u[0][k], self.u[1][k], self.u[2][k]],
            self.theta[k],
        )
    }

    pub fn validate(&self) -> Result<()> {
        for k in 0..self.len() {
            self.node(k).validate().map_err(|e| LandauError::MomentRecovery {
                x_node: k,
                reason: e.to_string(),
            })?;
        }
        Ok(())
    }

    /// Fields in the fixed order `ρ, u1, u2, u3, θ`.
    pub fn fields(&self) -> [&Vec<f64>; 5] {
        [&self.rho, &self.u[0], &self.u[1], &self.u[2], &self.theta]
    }
}

/// `M_[ρ,u,θ](v)` sampled on the lattice.
pub fn maxwellian(state: &MaxwellState, grid: &VelocityGrid) -> Result<Vec<f64>> {
    state.validate()?;
    Ok(grid.sample(|v| state.eval(v)))
}

/// The global Maxwellian `μ = M_[1,0,3/2]`.
pub fn global_maxwellian(grid: &VelocityGrid) -> Vec<f64> {
    grid.sample(|v| MaxwellState::global().eval(v))
}

/// The five collision invariants `1, v_1, v_2, v_3, |v|²/2` on a lattice.
#[derive(Debug, Clone)]
pub struct CollisionInvariantSet {
    psi: [Vec<f64>; 5],
}

impl CollisionInvariantSet {
    pub fn new(grid: &VelocityGrid) -> Self {
        let [v1, v2, v3] = grid.components();
        let energy = (0..grid.len())
            .map(|p| 0.5 * (v1[p] * v1[p] + v2[p] * v2[p] + v3[p] * v3[p]))
            .collect();
        Self {
            psi: [vec![1.0; grid.len()], v1, v2, v3, energy],
        }
    }

    pub fn get(&self, i: usize) -> &[f64] {
        &self.psi[i]
    }

    pub fn all(&self) -> &[Vec<f64>; 5] {
        &self.psi
    }

    /// `(⟨g, ψ_0⟩, …, ⟨g, ψ_4⟩)`.
    pub fn project(&self, g: &[f64], grid: &VelocityGrid) -> [f64; 5] {
        let mut out = [0.0; 5];
        for (o, psi) in out.iter_mut().zip(&self.psi) {
            *o = grid.dot(g, psi);
        }
        out
    }
}

/// Mass, momentum and energy moments `(m_0, m_1..3, m_4)`.
pub fn moments(f: &[f64], grid: &VelocityGrid) -> [f64; 5] {
    CollisionInvariantSet::new(grid).project(f, grid)
}

/// Collision-invariant defect; identical to `moments` but named for its use on collision outputs.
pub fn invariant_defect(q: &[f64], grid: &VelocityGrid) -> [f64; 5] {
    moments(q, grid)
}

/// `ρ = m_0`, `u = m/ρ`, `θ = m_4/ρ - |u|²/2`.
pub fn fluid_from_moments(m: &[f64; 5], x_node: usize) -> Result<MaxwellState> {
    if !(m[0] > 0.0) || !m[0].is_finite() {
        return Err(LandauError::MomentRecovery {
            x_node,
            reason: format!("nonpositive density {}", m[0]),
        });
    }
    let rho = m[0];
    let u = [m[1] / rho, m[2] / rho, m[3] / rho];
    let theta = m[4] / rho - 0.5 * (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
    if !(theta > 0.0) || !theta.is_finite() {
        return Err(LandauError::MomentRecovery {
            x_node,
            reason: format!("nonpositive internal energy {theta}"),
        });
    }
    Ok(MaxwellState::new(rho, u, theta))
}

/// A lattice Maxwellian whose discrete moments equal `m`.
///
/// Starts from the closed-form recovery and applies Newton corrections to the
/// parameters, so the residual `F - M` has vanishing discrete moments.
pub fn matched_maxwellian(
    m: &[f64; 5],
    grid: &VelocityGrid,
    invariants: &CollisionInvariantSet,
    x_node: usize,
) -> Result<(MaxwellState, Vec<f64>)> {
    let mut s = fluid_from_moments(m, x_node)?;
    let scale = m[0].abs() + m[4].abs();
    let [v1, v2, v3] = grid.components();
    let mut values = maxwellian(&s, grid)?;
    for _ in 0..12 {
        let cur = invariants.project(&values, grid);
        let res: Vec<f64> = (0..5).map(|i| m[i] - cur[i]).collect();
        if res.iter().all(|r| r.abs() <= 1e-15 * scale) {
            break;
        }
        let rt = s.r_theta();
        let len = grid.len();
        let mut dfields = vec![vec![0.0; len]; 5];
        for p in 0..len {
            let w = [v1[p] - s.u[0], v2[p] - s.u[1], v3[p] - s.u[2]];
            let w2 = w[0] * w[0] + w[1] * w[1] + w[2] * w[2];
            let mv = values[p];
            dfields[0][p] = mv / s.rho;
            for d in 0..3 {
                dfields[1 + d][p] = mv * w[d] / rt;
            }
            dfields[4][p] = mv * (w2 / (2.0 * rt * s.theta) - 1.5 / s.theta);
        }
        let mut jac = Matrix5::zeros();
        for (c, df) in dfields.iter().enumerate() {
            let col = invariants.project(df, grid);
            for r in 0..5 {
                jac[(r, c)] = col[r];
            }
        }
        let rhs = Vector5::from_iterator(res.iter().copied());
        let Some(step) = jac.lu().solve(&rhs) else {
            break;
        };
        let next = MaxwellState::new(
            s.rho + step[0],
            [s.u[0] + step[1], s.u[1] + step[2], s.u[2] + step[3]],
            s.theta + step[4],
        );
        if next.validate().is_err() {
            break;
        }
        s = next;
        values = maxwellian(&s, grid)?;
    }
    Ok((s, values))
}

/// Nodewise macro–micro split of a kinetic field: matched local Maxwellians and
/// their values, stored like `field`.
pub fn local_maxwellians(
    field: &DistributionField,
    invariants: &CollisionInvariantSet,
) -> Result<(FluidState, DistributionField)> {
    let grid = &field.velocity;
    let mut states = Vec::with_capacity(field.space.len());
    let mut m = DistributionField::zeros(field.space, grid.clone(), Role::Maxwellian);
    m.time = field.time;
    for k in 0..field.space.len() {
        let mom = moments(field.node(k), grid);
        let (s, values) = matched_maxwellian(&mom, grid, invariants, k)?;
        states.push(s);
        m.node_mut(k).copy_from_slice(&values);
    }
    Ok((FluidState::from_states(&states), m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_space::build_velocity_grid;

    #[test]
    fn global_state_has_unit_r_theta_and_peak() {
        let s = MaxwellState::global();
        assert!((s.r_theta() - 1.0).abs() < 1e-15);
        let peak = (2.0 * std::f64::consts::PI).powf(-1.5);
        assert!((s.eval([0.0; 3]) - peak).abs() < 1e-16);
        let t = MaxwellState::new(1.3, [0.2, -0.1, 0.4], 1.2);
        let expected = 1.3 * (2.0 * std::f64::consts::PI * t.r_theta()).powf(-1.5);
        assert!((t.eval(t.u) - expected).abs() < 1e-15);
    }

    #[test]
    fn invalid_state_rejected() {
        let g = build_velocity_grid(6.0, 5).unwrap();
        assert!(maxwellian(&MaxwellState::new(1.0, [0.0; 3], 0.0), &g).is_err());
        assert!(maxwellian(&MaxwellState::new(-1.0, [0.0; 3], 1.0), &g).is_err());
    }

    #[test]
    fn moments_of_maxwellians() {
        let g = build_velocity_grid(6.0, 49).unwrap();
        let s = MaxwellState::new(1.1, [0.2, 0.0, 0.0], 1.4);
        let m = moments(&maxwellian(&s, &g).unwrap(), &g);
        let r = fluid_from_moments(&m, 0).unwrap();
        assert!((r.rho - s.rho).abs() < 1e-5);
        assert!((r.u[0] - s.u[0]).abs() < 1e-5);
        assert!((r.theta - s.theta).abs() < 1e-5);

        let mu = global_maxwellian(&g);
        let m = invariant_defect(&mu, &g);
        assert!((m[0] - 1.0).abs() < 1e-6 && (m[4] - 1.5).abs() < 1e-6);
        let two: Vec<f64> = mu.iter().map(|x| 2.0 * x).collect();
        let r = fluid_from_moments(&moments(&two, &g), 0).unwrap();
        assert!((r.rho - 2.0).abs() < 1e-6 && (r.theta - 1.5).abs() < 1e-6);
        assert!(r.u.iter().all(|x| x.abs() < 1e-15));
    }

    #[test]
    fn recovery_errors_name_node() {
        let err = fluid_from_moments(&[1.0, 2.0, 0.0, 0.0, 1.0], 7).unwrap_err();
        assert!(matches!(err, LandauError::MomentRecovery { x_node: 7, .. }));
        assert!(fluid_from_moments(&[0.0, 0.0, 0.0, 0.0, 1.0], 3).is_err());
    }

    #[test]
    fn matched_maxwellian_reproduces_moments() {
        let g = build_velocity_grid(6.0, 11).unwrap();
        let inv = CollisionInvariantSet::new(&g);
        let f: Vec<f64> = g.sample(|v| {
            MaxwellState::new(1.0, [0.3, 0.0, 0.1], 1.3).eval(v) * (1.0 + 0.1 * (v[0] - v[1]).tanh())
        });
        let m = moments(&f, &g);
        let (_, mm) = matched_maxwellian(&m, &g, &inv, 0).unwrap();
        let back = moments(&mm, &g);
        for i in 0..5 {
            assert!((back[i] - m[i]).abs() < 1e-14);
        }
    }
}
