use super::step::{InitialMode, KineticRunConfig, KineticSolver};
use crate::collision::CollisionOperator;
use crate::diagnostics::{field_totals, mu_weighted_distance, relative_drift};
use crate::error::{LandauError, Result};
use crate::fluid::{acoustic_exact, acoustic_limit_profile, AcousticState, EulerSolution};
use crate::macro_micro::{correction_gbar, BurnettTable, Gradients, MacroBasis};
use crate::maxwellian::{global_maxwellian, local_maxwellians, maxwellian, moments, FluidState, MaxwellState};
use crate::phase_space::{DistributionField, Role};

/// Decomposition of one Euler-limit snapshot.
#[derive(Debug, Clone)]
pub struct EulerLimitSnapshot {
    pub time: f64,
    pub total: DistributionField,
    /// Fluid state recovered from the moments of `F`.
    pub fluid: FluidState,
    pub background: FluidState,
    /// `G = F − M` with `M` the matched local Maxwellian of `F`.
    pub g: DistributionField,
    pub gbar: DistributionField,
    /// `f = (G − Ḡ)/√μ`.
    pub f: DistributionField,
    /// `‖(F − M_[ρ̄,ū,θ̄])/√μ‖` in `L²_xL²_v` and `L^∞_xL²_v`.
    pub distance: (f64, f64),
    /// Largest `|∫ψ G dv| / ∫ F dv` over nodes and invariants.
    pub micro_defect: f64,
    pub totals: [f64; 5],
}

#[derive(Debug, Clone)]
pub struct EulerLimitRun {
    pub eps: f64,
    pub snapshots: Vec<EulerLimitSnapshot>,
    pub steps: usize,
    pub dt: f64,
    /// Smallest `min F / max F` over all steps.
    pub min_ratio: f64,
    /// Largest relative drift of total mass, momentum and energy.
    pub conservation_drift: f64,
}

impl EulerLimitRun {
    pub fn at(&self, t: f64) -> Option<&EulerLimitSnapshot> {
        self.snapshots.iter().find(|s| (s.time - t).abs() <= 1e-12 * (1.0 + t))
    }
}

fn background_gradients(state: &FluidState, solver: &KineticSolver<'_>) -> Vec<Gradients> {
    let sp = solver.spectral();
    let gt = sp.gradient(&state.theta);
    let gu = [0, 1, 2].map(|i| sp.gradient(&state.u[i]));
    (0..state.len())
        .map(|k| Gradients {
            grad_theta: [gt[0][k], gt[1][k], gt[2][k]],
            grad_u: [0, 1, 2].map(|i| [0, 1, 2].map(|j| gu[j][i][k])),
        })
        .collect()
}

fn decompose(
    f: &DistributionField,
    background: &FluidState,
    solver: &KineticSolver<'_>,
    table: &BurnettTable,
    eps: f64,
    mu: &[f64],
) -> Result<EulerLimitSnapshot> {
    let op = solver.operator();
    let grid = &f.velocity;
    let nx = f.space.len();
    let (fluid, m) = local_maxwellians(f, op.invariants())?;
    let mut g = DistributionField::zeros(f.space, grid.clone(), Role::Microscopic);
    let mut gbar = DistributionField::zeros(f.space, grid.clone(), Role::Correction);
    let mut pert = DistributionField::zeros(f.space, grid.clone(), Role::Perturbation);
    let mut mbar = DistributionField::zeros(f.space, grid.clone(), Role::Maxwellian);
    g.time = f.time;
    gbar.time = f.time;
    pert.time = f.time;
    let grads = background_gradients(background, solver);
    let mut micro_defect: f64 = 0.0;
    for k in 0..nx {
        let state = background.node(k);
        let basis = MacroBasis::new(state, grid)?;
        let (a, b) = table.evaluate(&basis);
        let gb = correction_gbar(&grads[k], state.theta, eps, &a, &b);
        let fk = f.node(k);
        let mk = m.node(k);
        let gk: Vec<f64> = fk.iter().zip(mk).map(|(x, y)| x - y).collect();
        let mass = moments(fk, grid)[0].abs().max(1e-300);
        for c in moments(&gk, grid) {
            micro_defect = micro_defect.max(c.abs() / mass);
        }
        for p in 0..grid.len() {
            pert.node_mut(k)[p] = (gk[p] - gb[p]) / mu[p].sqrt();
        }
        g.node_mut(k).copy_from_slice(&gk);
        gbar.node_mut(k).copy_from_slice(&gb);
        mbar.node_mut(k).copy_from_slice(&basis.m);
    }
    let distance = mu_weighted_distance(f, &mbar, mu)?;
    Ok(EulerLimitSnapshot {
        time: f.time,
        total: f.clone(),
        fluid,
        background: background.clone(),
        g,
        gbar,
        f: pert,
        distance,
        micro_defect,
        totals: field_totals(f),
    })
}

/// Advances `F^ε` from `M_[ρ̄,ū,θ̄](0)` and decomposes it at each output time
/// against the stored Euler background.
pub fn run_euler_limit(
    op: &CollisionOperator,
    cfg: &KineticRunConfig,
    background: &EulerSolution,
    table: &BurnettTable,
) -> Result<EulerLimitRun> {
    if cfg.mode != InitialMode::EulerLimit {
        return Err(LandauError::InvalidInput("configuration is not in euler-limit mode".into()));
    }
    if background.grid != cfg.space || table.grid != cfg.velocity {
        return Err(LandauError::GridMismatch("background or Burnett table grid differs from the run".into()));
    }
    let solver = KineticSolver::new(op, cfg)?;
    let stops = cfg.stops();
    let states: Vec<&FluidState> = stops
        .iter()
        .map(|&t| {
            background
                .at(t)
                .ok_or_else(|| LandauError::InvalidInput(format!("Euler background has no state at t = {t}")))
        })
        .collect::<Result<_>>()?;
    let grid = &cfg.velocity;
    let mu = global_maxwellian(grid);
    let init = states[0];
    let mut nodes = Vec::with_capacity(init.len());
    for k in 0..init.len() {
        nodes.push(maxwellian(&init.node(k), grid)?);
    }
    let mut f = DistributionField::from_nodes(cfg.space, grid.clone(), Role::Total, |k| nodes[k].clone());
    let mut run = EulerLimitRun {
        eps: cfg.eps,
        snapshots: Vec::with_capacity(stops.len()),
        steps: 0,
        dt: solver.max_dt(),
        min_ratio: f.extremes().0 / f.extremes().2,
        conservation_drift: 0.0,
    };
    for (i, &t) in stops.iter().enumerate() {
        let reports = solver.advance(&mut f, t)?;
        run.steps += reports.len();
        for r in &reports {
            run.min_ratio = run.min_ratio.min(r.min_ratio);
            run.dt = r.dt.min(run.dt);
        }
        run.snapshots.push(decompose(&f, states[i], &solver, table, cfg.eps, &mu)?);
    }
    let totals: Vec<[f64; 5]> = run.snapshots.iter().map(|s| s.totals).collect();
    run.conservation_drift = relative_drift(&totals);
    Ok(run)
}

#[derive(Debug, Clone)]
pub struct AcousticSnapshot {
    pub time: f64,
    /// `𝐟^ε = (F − μ)/(δ√μ)`.
    pub fluctuation: DistributionField,
    /// `𝐟 = {ϱ + v·φ + ((|v|² − 3)/2)ϑ}√μ` from the exact acoustic solution.
    pub target: DistributionField,
    /// `‖𝐟^ε − 𝐟‖` in `L²_xL²_v` and `L^∞_xL²_v`.
    pub error: (f64, f64),
    pub totals: [f64; 5],
}

#[derive(Debug, Clone)]
pub struct AcousticLimitRun {
    pub eps: f64,
    pub delta: f64,
    pub snapshots: Vec<AcousticSnapshot>,
    pub steps: usize,
    pub dt: f64,
    pub min_ratio: f64,
    pub conservation_drift: f64,
}

impl AcousticLimitRun {
    pub fn at(&self, t: f64) -> Option<&AcousticSnapshot> {
        self.snapshots.iter().find(|s| (s.time - t).abs() <= 1e-12 * (1.0 + t))
    }
}

/// `M_[1 + δϱ, δφ, (3/2)(1 + δϑ)]` parameters at node `k`.
pub fn acoustic_initial_state(init: &AcousticState, delta: f64, k: usize) -> MaxwellState {
    MaxwellState::new(
        1.0 + delta * init.rho[k],
        [0, 1, 2].map(|d| delta * init.phi[d][k]),
        1.5 * (1.0 + delta * init.theta[k]),
    )
}

/// Advances `F^ε` from `μ^δ(0)` and compares the fluctuation with the exact
/// acoustic profile at each output time.
pub fn run_acoustic_limit(op: &CollisionOperator, cfg: &KineticRunConfig, init: &AcousticState) -> Result<AcousticLimitRun> {
    if cfg.mode != InitialMode::AcousticLimit {
        return Err(LandauError::InvalidInput("configuration is not in acoustic-limit mode".into()));
    }
    if init.rho.len() != cfg.space.len() {
        return Err(LandauError::GridMismatch("acoustic data does not match the spatial grid".into()));
    }
    let solver = KineticSolver::new(op, cfg)?;
    let grid = &cfg.velocity;
    let mu = global_maxwellian(grid);
    let sqrt_mu: Vec<f64> = mu.iter().map(|x| x.sqrt()).collect();
    let delta = cfg.delta;
    let mut nodes = Vec::with_capacity(cfg.space.len());
    for k in 0..cfg.space.len() {
        nodes.push(maxwellian(&acoustic_initial_state(init, delta, k), grid)?);
    }
    let mut f = DistributionField::from_nodes(cfg.space, grid.clone(), Role::Total, |k| nodes[k].clone());
    let mut run = AcousticLimitRun {
        eps: cfg.eps,
        delta,
        snapshots: Vec::new(),
        steps: 0,
        dt: solver.max_dt(),
        min_ratio: f.extremes().0 / f.extremes().2,
        conservation_drift: 0.0,
    };
    for t in cfg.stops() {
        let reports = solver.advance(&mut f, t)?;
        run.steps += reports.len();
        for r in &reports {
            run.min_ratio = run.min_ratio.min(r.min_ratio);
            run.dt = r.dt.min(run.dt);
        }
        let exact = acoustic_exact(init, t, solver.spectral());
        let mut fluct = DistributionField::zeros(cfg.space, grid.clone(), Role::Perturbation);
        let mut target = DistributionField::zeros(cfg.space, grid.clone(), Role::Perturbation);
        fluct.time = t;
        target.time = t;
        for k in 0..cfg.space.len() {
            let prof = acoustic_limit_profile(
                exact.rho[k],
                [exact.phi[0][k], exact.phi[1][k], exact.phi[2][k]],
                exact.theta[k],
                grid,
            );
            target.node_mut(k).copy_from_slice(&prof);
            let fk = f.node(k);
            for p in 0..grid.len() {
                fluct.node_mut(k)[p] = (fk[p] - mu[p]) / (delta * sqrt_mu[p]);
            }
        }
        let mut diff = fluct.clone();
        for (d, t) in diff.values.iter_mut().zip(&target.values) {
            *d -= t;
        }
        let zero = DistributionField::zeros(cfg.space, grid.clone(), Role::Perturbation);
        let ones = vec![1.0; grid.len()];
        let error = mu_weighted_distance(&diff, &zero, &ones)?;
        run.snapshots.push(AcousticSnapshot {
            time: t,
            fluctuation: fluct,
            target,
            error,
            totals: field_totals(&f),
        });
    }
    let totals: Vec<[f64; 5]> = run.snapshots.iter().map(|s| s.totals).collect();
    run.conservation_drift = relative_drift(&totals);
    Ok(run)
}
