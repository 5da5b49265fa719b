use rayon::prelude::*;

use crate::collision::CollisionOperator;
use crate::error::{LandauError, Result};
use crate::fluid::Spectral;
use crate::maxwellian::{matched_maxwellian, moments};
use crate::phase_space::{DistributionField, SpatialGrid, VelocityGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialMode {
    /// `F(0) = M_[ρ̄, ū, θ̄](0)` from a smooth Euler background.
    EulerLimit,
    /// `F(0) = M_[1 + δϱ_0, δφ_0, (3/2)(1 + δϑ_0)]`.
    AcousticLimit,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeStepPolicy {
    /// Fraction of the transport limit `h_x / max|v_i|`.
    pub cfl: f64,
    /// Cap `dt ≤ eps_fraction · ε`.
    pub eps_fraction: f64,
    /// Overrides both caps when set.
    pub fixed_dt: Option<f64>,
}

impl Default for TimeStepPolicy {
    fn default() -> Self {
        Self {
            cfl: 0.9,
            eps_fraction: 0.1,
            fixed_dt: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KineticRunConfig {
    pub eps: f64,
    /// Fluctuation amplitude of the acoustic mode.
    pub delta: f64,
    /// Background amplitude of the Euler mode.
    pub amplitude: f64,
    pub tau: f64,
    pub output_times: Vec<f64>,
    pub step: TimeStepPolicy,
    pub mode: InitialMode,
    pub space: SpatialGrid,
    pub velocity: VelocityGrid,
    /// `ν = penalty_factor · ρ · max eig σ`.
    pub penalty_factor: f64,
    /// A run aborts when `min F < −negativity_tolerance · max F`.
    pub negativity_tolerance: f64,
}

impl KineticRunConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0) {
            return Err(LandauError::InvalidInput(format!("ε must be positive, got {}", self.eps)));
        }
        if self.mode == InitialMode::AcousticLimit && !(self.delta > 0.0) {
            return Err(LandauError::InvalidInput(format!("δ must be positive, got {}", self.delta)));
        }
        if !(self.tau > 0.0) {
            return Err(LandauError::InvalidInput(format!("τ must be positive, got {}", self.tau)));
        }
        if self.output_times.iter().any(|&t| !(0.0..=self.tau).contains(&t)) {
            return Err(LandauError::InvalidInput("output times must lie in [0, τ]".into()));
        }
        if !(self.penalty_factor > 0.0) || !(self.step.cfl > 0.0) || !(self.step.eps_fraction > 0.0) {
            return Err(LandauError::InvalidInput("step policy and penalty must be positive".into()));
        }
        Ok(())
    }

    /// Sorted output times including `0` and `τ`.
    pub fn stops(&self) -> Vec<f64> {
        let mut t = self.output_times.clone();
        t.push(0.0);
        t.push(self.tau);
        t.sort_by(|a, b| a.total_cmp(b));
        t.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        t
    }
}

/// Per-step bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport {
    pub dt: f64,
    /// `min F / max F` after the step.
    pub min_ratio: f64,
}

/// Strang splitting of exact transport and an exponential Maxwellian-penalized
/// collision step.
pub struct KineticSolver<'a> {
    op: &'a CollisionOperator,
    spectral: Spectral,
    eps: f64,
    penalty: f64,
    negativity_tolerance: f64,
    step: TimeStepPolicy,
}

/// `φ_1(z) = (e^z − 1)/z` and `φ_2(z) = (e^z − 1 − z)/z²`, with series near zero.
fn phi12(z: f64) -> (f64, f64) {
    if z.abs() < 1e-3 {
        (
            1.0 + z / 2.0 + z * z / 6.0 + z * z * z / 24.0,
            0.5 + z / 6.0 + z * z / 24.0 + z * z * z / 120.0,
        )
    } else {
        let e = z.exp_m1();
        (e / z, (e - z) / (z * z))
    }
}

impl<'a> KineticSolver<'a> {
    pub fn new(op: &'a CollisionOperator, cfg: &KineticRunConfig) -> Result<Self> {
        cfg.validate()?;
        if *op.grid() != cfg.velocity {
            return Err(LandauError::GridMismatch("collision operator and run velocity grid differ".into()));
        }
        let sigma_max = op.sigma_field().max_eigenvalue();
        Ok(Self {
            op,
            spectral: Spectral::new(&cfg.space),
            eps: cfg.eps,
            penalty: cfg.penalty_factor * sigma_max,
            negativity_tolerance: cfg.negativity_tolerance,
            step: cfg.step,
        })
    }

    pub fn spectral(&self) -> &Spectral {
        &self.spectral
    }

    pub fn operator(&self) -> &CollisionOperator {
        self.op
    }

    /// Transport limit `h_x / max|v_i|` over the active axes.
    pub fn transport_limit(&self) -> f64 {
        self.spectral.grid().spacing() / self.op.grid().extent()
    }

    /// Largest admissible step under the policy.
    pub fn max_dt(&self) -> f64 {
        match self.step.fixed_dt {
            Some(dt) => dt,
            None => (self.step.cfl * self.transport_limit()).min(self.step.eps_fraction * self.eps),
        }
    }

    /// Exact free transport `F(x, v) ← F(x − v t, v)` per velocity node.
    pub fn transport(&self, f: &mut DistributionField, t: f64) {
        let nv = f.velocity.len();
        let nx = f.space.len();
        let grid = &f.velocity;
        let values = &f.values;
        let sp = &self.spectral;
        let lines: Vec<Vec<f64>> = (0..nv)
            .into_par_iter()
            .map(|p| {
                let line: Vec<f64> = (0..nx).map(|k| values[k * nv + p]).collect();
                sp.shift(&line, grid.velocity(p), t)
            })
            .collect();
        for (p, line) in lines.iter().enumerate() {
            for k in 0..nx {
                f.values[k * nv + p] = line[k];
            }
        }
    }

    /// One exponential-RK2 collision step at one x-node: with `M` the matched
    /// Maxwellian and `G = F − M`, `∂_tG = −λG + N(F)`, where `λ = ν/ε` and
    /// `N(F) = (1/ε)[Q(F, F) + νG]`.
    pub fn collide_node(&self, f: &mut [f64], dt: f64, x_node: usize) -> Result<()> {
        let grid = self.op.grid();
        let m = moments(f, grid);
        let (state, maxw) = matched_maxwellian(&m, grid, self.op.invariants(), x_node)?;
        let nu = self.penalty * state.rho;
        let lambda = nu / self.eps;
        let g: Vec<f64> = f.iter().zip(&maxw).map(|(a, b)| a - b).collect();
        let rate = |g: &[f64]| -> Result<Vec<f64>> {
            let full: Vec<f64> = g.iter().zip(&maxw).map(|(a, b)| a + b).collect();
            let q = self.op.collision_q(&full, &full)?;
            Ok(q.iter().zip(g).map(|(q, g)| (q + nu * g) / self.eps).collect())
        };
        let z = -lambda * dt;
        let decay = z.exp();
        let (p1, p2) = phi12(z);
        let n0 = rate(&g)?;
        let a: Vec<f64> = g.iter().zip(&n0).map(|(g, n)| decay * g + dt * p1 * n).collect();
        let n1 = rate(&a)?;
        for p in 0..f.len() {
            f[p] = maxw[p] + a[p] + dt * p2 * (n1[p] - n0[p]);
        }
        Ok(())
    }

    /// Collision step on every x-node.
    pub fn collide(&self, f: &mut DistributionField, dt: f64) -> Result<()> {
        let nv = f.velocity.len();
        f.values
            .par_chunks_mut(nv)
            .enumerate()
            .try_for_each(|(k, block)| self.collide_node(block, dt, k))
    }

    /// Strang step: half transport, full collision, half transport.
    pub fn kinetic_step(&self, f: &mut DistributionField, dt: f64) -> Result<StepReport> {
        let limit = self.transport_limit();
        if dt > limit * (1.0 + 1e-12) {
            return Err(LandauError::Cfl { dt, limit });
        }
        if let Some((x_node, v)) = f.first_non_finite() {
            return Err(LandauError::NonFinite {
                node: x_node,
                velocity: f.velocity.velocity(v),
            });
        }
        self.transport(f, 0.5 * dt);
        self.collide(f, dt)?;
        self.transport(f, 0.5 * dt);
        f.time += dt;
        if let Some((x_node, v)) = f.first_non_finite() {
            return Err(LandauError::NonFinite {
                node: x_node,
                velocity: f.velocity.velocity(v),
            });
        }
        let (min, (x_node, v_node), max) = f.extremes();
        if min < -self.negativity_tolerance * max {
            return Err(LandauError::NegativeMass {
                x_node,
                v_node,
                value: min,
                max,
            });
        }
        Ok(StepReport {
            dt,
            min_ratio: min / max,
        })
    }

    /// Advances `f` to time `t_end`, with equal steps no larger than [`Self::max_dt`].
    pub fn advance(&self, f: &mut DistributionField, t_end: f64) -> Result<Vec<StepReport>> {
        let span = t_end - f.time;
        if span <= 1e-14 {
            return Ok(Vec::new());
        }
        let steps = (span / self.max_dt() - 1e-9).ceil().max(1.0) as usize;
        let dt = span / steps as f64;
        let start = f.time;
        let mut reports = Vec::with_capacity(steps);
        for s in 0..steps {
            reports.push(self.kinetic_step(f, dt)?);
            f.time = start + (s + 1) as f64 * dt;
        }
        f.time = t_end;
        Ok(reports)
    }
}
