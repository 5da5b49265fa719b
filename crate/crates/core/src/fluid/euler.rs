use super::spectral::Spectral;
use crate::error::{LandauError, Result};
use crate::maxwellian::{FluidState, R_GAS};
use crate::phase_space::SpatialGrid;

#[derive(Debug, Clone, PartialEq)]
pub struct EulerOptions {
    pub cfl: f64,
    /// Overrides the CFL-derived step when set.
    pub fixed_dt: Option<f64>,
    pub steepening_factor: f64,
    /// Times at which states are stored, in addition to `0` and `τ`.
    pub output_times: Vec<f64>,
}

impl Default for EulerOptions {
    fn default() -> Self {
        Self {
            cfl: 0.4,
            fixed_dt: None,
            steepening_factor: 20.0,
            output_times: Vec::new(),
        }
    }
}

/// Stored states of a smooth Euler trajectory.
#[derive(Debug, Clone)]
pub struct EulerSolution {
    pub grid: SpatialGrid,
    pub times: Vec<f64>,
    pub states: Vec<FluidState>,
    /// `max` deviation of the initial data from `(1, 0, 3/2)`.
    pub amplitude: f64,
    pub horizon: f64,
    /// Total mass, momentum and energy at each stored time.
    pub totals: Vec<[f64; 5]>,
    pub steps: usize,
}

impl EulerSolution {
    /// Stored state at time `t` (exact match within `1e-12`).
    pub fn at(&self, t: f64) -> Option<&FluidState> {
        self.times
            .iter()
            .position(|&s| (s - t).abs() <= 1e-12 * (1.0 + t.abs()))
            .map(|i| &self.states[i])
    }

    /// Largest relative drift of the conserved totals.
    pub fn conservation_drift(&self) -> f64 {
        let first = self.totals[0];
        let scale = first.iter().fold(1e-300f64, |m, x| m.max(x.abs()));
        self.totals
            .iter()
            .flat_map(|t| (0..5).map(move |c| (t[c] - first[c]).abs()))
            .fold(0.0, f64::max)
            / scale
    }
}

/// Conservative variables `(ρ, ρu, ρ(θ + |u|²/2))`.
pub fn conservative(state: &FluidState) -> [Vec<f64>; 5] {
    let n = state.len();
    let mut u = [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    for k in 0..n {
        let s = state.node(k);
        let v2 = s.u[0] * s.u[0] + s.u[1] * s.u[1] + s.u[2] * s.u[2];
        u[0][k] = s.rho;
        for d in 0..3 {
            u[1 + d][k] = s.rho * s.u[d];
        }
        u[4][k] = s.rho * (s.theta + 0.5 * v2);
    }
    u
}

pub fn primitive(c: &[Vec<f64>; 5]) -> FluidState {
    let n = c[0].len();
    let mut out = FluidState {
        rho: vec![0.0; n],
        u: [vec![0.0; n], vec![0.0; n], vec![0.0; n]],
        theta: vec![0.0; n],
    };
    for k in 0..n {
        let rho = c[0][k];
        let u = [c[1][k] / rho, c[2][k] / rho, c[3][k] / rho];
        out.rho[k] = rho;
        for d in 0..3 {
            out.u[d][k] = u[d];
        }
        out.theta[k] = c[4][k] / rho - 0.5 * (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
    }
    out
}

/// `−∇·F(U)` for the Euler fluxes.
pub fn euler_rhs(state: &FluidState, sp: &Spectral) -> [Vec<f64>; 5] {
    let n = state.len();
    let c = conservative(state);
    let mut out = [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    let dims = sp.grid().dim();
    for j in 0..dims {
        let mut fluxes: [Vec<f64>; 5] = Default::default();
        for f in fluxes.iter_mut() {
            *f = vec![0.0; n];
        }
        for k in 0..n {
            let uj = state.u[j][k];
            let p = R_GAS * state.rho[k] * state.theta[k];
            fluxes[0][k] = c[0][k] * uj;
            for i in 0..3 {
                fluxes[1 + i][k] = c[1 + i][k] * uj + if i == j { p } else { 0.0 };
            }
            fluxes[4][k] = (c[4][k] + p) * uj;
        }
        for (o, f) in out.iter_mut().zip(&fluxes) {
            let d = sp.derivative(f, j);
            for (a, b) in o.iter_mut().zip(&d) {
                *a -= b;
            }
        }
    }
    out
}

/// Time derivatives of `(ρ, u, θ)` along smooth Euler solutions.
pub fn euler_primitive_rates(state: &FluidState, sp: &Spectral) -> FluidState {
    let n = state.len();
    let grad_rho = sp.gradient(&state.rho);
    let grad_theta = sp.gradient(&state.theta);
    let grad_u = [0, 1, 2].map(|i| sp.gradient(&state.u[i]));
    let mut out = FluidState {
        rho: vec![0.0; n],
        u: [vec![0.0; n], vec![0.0; n], vec![0.0; n]],
        theta: vec![0.0; n],
    };
    for k in 0..n {
        let s = state.node(k);
        let div: f64 = (0..3).map(|j| grad_u[j][j][k]).sum();
        let adv_rho: f64 = (0..3).map(|j| s.u[j] * grad_rho[j][k]).sum();
        let adv_theta: f64 = (0..3).map(|j| s.u[j] * grad_theta[j][k]).sum();
        out.rho[k] = -adv_rho - s.rho * div;
        out.theta[k] = -adv_theta - R_GAS * s.theta * div;
        for i in 0..3 {
            let adv: f64 = (0..3).map(|j| s.u[j] * grad_u[i][j][k]).sum();
            let grad_p = R_GAS * (s.theta * grad_rho[i][k] + s.rho * grad_theta[i][k]);
            out.u[i][k] = -adv - grad_p / s.rho;
        }
    }
    out
}

fn max_velocity_gradient(state: &FluidState, sp: &Spectral) -> f64 {
    state
        .u
        .iter()
        .flat_map(|ui| sp.gradient(ui))
        .flat_map(|g| g.into_iter())
        .fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Reference gradient scale for the steepening monitor: the initial velocity
/// gradient, or the acoustic velocity gradient `c|∇ρ|/ρ`, `c|∇θ|/θ` if larger.
fn gradient_scale(state: &FluidState, sp: &Spectral) -> f64 {
    let mut g = max_velocity_gradient(state, sp);
    let grad_rho = sp.gradient(&state.rho);
    let grad_theta = sp.gradient(&state.theta);
    for k in 0..state.len() {
        let c = sound_speed(state.theta[k]);
        for d in 0..3 {
            g = g.max(c * grad_rho[d][k].abs() / state.rho[k]);
            g = g.max(c * grad_theta[d][k].abs() / state.theta[k]);
        }
    }
    g
}

/// `√((5/3) R θ)`.
pub fn sound_speed(theta: f64) -> f64 {
    (5.0 / 3.0 * R_GAS * theta).sqrt()
}

fn max_signal_speed(state: &FluidState) -> f64 {
    (0..state.len())
        .map(|k| {
            let s = state.node(k);
            s.u.iter().fold(0.0f64, |m, x| m.max(x.abs())) + sound_speed(s.theta)
        })
        .fold(0.0, f64::max)
}

fn totals(c: &[Vec<f64>; 5], grid: &SpatialGrid) -> [f64; 5] {
    [0, 1, 2, 3, 4].map(|i| grid.quad(&c[i]))
}

/// Advances the compressible Euler system with Fourier-spectral derivatives and RK4.
pub fn euler_solve(init: &FluidState, tau: f64, grid: &SpatialGrid, opts: &EulerOptions) -> Result<EulerSolution> {
    if init.len() != grid.len() {
        return Err(LandauError::GridMismatch("initial state does not match the spatial grid".into()));
    }
    init.validate()?;
    let sp = Spectral::new(grid);
    let amplitude = (0..init.len())
        .map(|k| {
            let s = init.node(k);
            [s.rho - 1.0, s.u[0], s.u[1], s.u[2], s.theta - 1.5]
                .iter()
                .fold(0.0f64, |m, x| m.max(x.abs()))
        })
        .fold(0.0, f64::max);
    let mut stops: Vec<f64> = opts
        .output_times
        .iter()
        .copied()
        .filter(|&t| t > 0.0 && t < tau)
        .collect();
    stops.push(tau);
    stops.sort_by(|a, b| a.total_cmp(b));
    stops.dedup_by(|a, b| (*a - *b).abs() < 1e-12);

    let g0 = gradient_scale(init, &sp);
    let mut state = init.clone();
    let mut c = conservative(&state);
    let mut sol = EulerSolution {
        grid: *grid,
        times: vec![0.0],
        states: vec![init.clone()],
        amplitude,
        horizon: tau,
        totals: vec![totals(&c, grid)],
        steps: 0,
    };
    let h = grid.spacing();
    let mut t = 0.0;
    for &stop in &stops {
        let span = stop - t;
        if span <= 0.0 {
            continue;
        }
        let dt_max = match opts.fixed_dt {
            Some(dt) => dt,
            None => opts.cfl * h / max_signal_speed(&state),
        };
        let steps = (span / dt_max - 1e-9).ceil().max(1.0) as usize;
        let dt = span / steps as f64;
        let limit = h / max_signal_speed(&state);
        if dt > limit {
            return Err(LandauError::Cfl { dt, limit });
        }
        for _ in 0..steps {
            c = rk4_step(&c, dt, &sp)?;
            t += dt;
            sol.steps += 1;
            state = primitive(&c);
            if let Err(e) = state.validate() {
                return Err(LandauError::Domain(format!("Euler state left the admissible region: {e}")));
            }
            let g = max_velocity_gradient(&state, &sp);
            if g0 > 0.0 && g > opts.steepening_factor * g0 {
                return Err(LandauError::Steepening { time: t, ratio: g / g0 });
            }
            if !g.is_finite() {
                return Err(LandauError::Steepening { time: t, ratio: f64::INFINITY });
            }
        }
        t = stop;
        sol.times.push(stop);
        sol.states.push(state.clone());
        sol.totals.push(totals(&c, grid));
    }
    Ok(sol)
}

fn rk4_step(c: &[Vec<f64>; 5], dt: f64, sp: &Spectral) -> Result<[Vec<f64>; 5]> {
    let rate = |c: &[Vec<f64>; 5]| euler_rhs(&primitive(c), sp);
    let axpy = |c: &[Vec<f64>; 5], k: &[Vec<f64>; 5], a: f64| -> [Vec<f64>; 5] {
        [0, 1, 2, 3, 4].map(|i| c[i].iter().zip(&k[i]).map(|(x, y)| x + a * y).collect())
    };
    let k1 = rate(c);
    let k2 = rate(&axpy(c, &k1, 0.5 * dt));
    let k3 = rate(&axpy(c, &k2, 0.5 * dt));
    let k4 = rate(&axpy(c, &k3, dt));
    Ok([0, 1, 2, 3, 4].map(|i| {
        (0..c[i].len())
            .map(|k| c[i][k] + dt / 6.0 * (k1[i][k] + 2.0 * k2[i][k] + 2.0 * k3[i][k] + k4[i][k]))
            .collect()
    }))
}

/// Right-moving simple wave of amplitude `a` at wavenumber 1 along `x_1`:
/// `ρ = 1 + a cos x`, `u_1 = a c_0 cos x`, `θ = (3/2)(1 + (2/3) a cos x)`.
pub fn simple_wave(grid: &SpatialGrid, amplitude: f64) -> FluidState {
    let c0 = sound_speed(1.5);
    FluidState::from_fn(grid, |x| {
        let s = amplitude * x[0].cos();
        crate::maxwellian::MaxwellState::new(1.0 + s, [c0 * s, 0.0, 0.0], 1.5 * (1.0 + 2.0 / 3.0 * s))
    })
}
