use super::inverse::{InverseOptions, LmInverse};
use crate::collision::CollisionOperator;
use crate::error::{LandauError, Result};
use crate::fluid::Spectral;
use crate::maxwellian::local_maxwellians;
use crate::phase_space::DistributionField;

const FLOOR: f64 = 1e-14;
/// Below this size relative to `M`, `G` is rounding noise and the residual is reported as zero.
const NOISE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyReport {
    /// `‖G − L_M^{-1}[εP_1(v·∇_xM) + Θ]‖ / ‖G‖` aggregated over the checked nodes.
    pub residual: f64,
    pub per_node: Vec<(usize, f64)>,
    /// `‖Θ‖ / ‖εP_1(v·∇_xM)‖` over the checked nodes.
    pub theta_fraction: f64,
    pub max_iterations: usize,
}

/// Spatial gradient of a kinetic field, per velocity node.
fn x_gradient(field: &[f64], nx: usize, nv: usize, sp: &Spectral) -> [Vec<f64>; 3] {
    let dim = sp.grid().dim();
    let mut out = [vec![0.0; nx * nv], vec![0.0; nx * nv], vec![0.0; nx * nv]];
    let mut line = vec![0.0; nx];
    for p in 0..nv {
        for k in 0..nx {
            line[k] = field[k * nv + p];
        }
        for (axis, o) in out.iter_mut().enumerate().take(dim) {
            let d = sp.derivative(&line, axis);
            for k in 0..nx {
                o[k * nv + p] = d[k];
            }
        }
    }
    out
}

/// Checks `G = L_M^{-1}[εP_1(v·∇_xM)] + L_M^{-1}Θ` with
/// `Θ = ε∂_tG + εP_1(v·∇_xG) − Q(G, G)` on the middle of three equally spaced
/// snapshots of `F`, at the x-nodes in `nodes`.
pub fn theta_consistency_check(
    op: &CollisionOperator,
    snapshots: [&DistributionField; 3],
    eps: f64,
    nodes: &[usize],
    opts: InverseOptions,
) -> Result<ConsistencyReport> {
    let [before, now, after] = snapshots;
    if !before.same_grids(now) || !after.same_grids(now) || *op.grid() != now.velocity {
        return Err(LandauError::GridMismatch("consistency snapshots".into()));
    }
    let dt = 0.5 * (after.time - before.time);
    if !(dt > 0.0) || ((now.time - before.time) - dt).abs() > 1e-9 * dt.max(1.0) {
        return Err(LandauError::InvalidInput("snapshots must be equally spaced in time".into()));
    }
    let grid = &now.velocity;
    let nv = grid.len();
    let nx = now.space.len();
    let sp = Spectral::new(&now.space);
    let split = |f: &DistributionField| -> Result<(Vec<f64>, Vec<f64>)> {
        let (_, m) = local_maxwellians(f, op.invariants())?;
        let g = f.values.iter().zip(&m.values).map(|(a, b)| a - b).collect();
        Ok((m.values, g))
    };
    let (_, g_before) = split(before)?;
    let (m_now, g_now) = split(now)?;
    let (_, g_after) = split(after)?;
    let (states, _) = local_maxwellians(now, op.invariants())?;
    let grad_m = x_gradient(&m_now, nx, nv, &sp);
    let grad_g = x_gradient(&g_now, nx, nv, &sp);
    let vel = grid.components();

    let mut per_node = Vec::with_capacity(nodes.len());
    let (mut num, mut den, mut th, mut src) = (0.0, 0.0, 0.0, 0.0);
    let mut max_iterations = 0;
    for &k in nodes {
        if k >= nx {
            return Err(LandauError::InvalidInput(format!("x-node {k} out of range")));
        }
        let block = k * nv..(k + 1) * nv;
        let inv = LmInverse::new(op, states.node(k), opts)?;
        let basis = inv.basis();
        let transport = |grad: &[Vec<f64>; 3]| -> Vec<f64> {
            (0..nv)
                .map(|p| (0..3).map(|d| vel[d][p] * grad[d][k * nv + p]).sum())
                .collect()
        };
        let g = &g_now[block.clone()];
        let source: Vec<f64> = basis.project_p1(&transport(&grad_m)).iter().map(|x| eps * x).collect();
        let pg = basis.project_p1(&transport(&grad_g));
        let q = op.collision_q(g, g)?;
        let theta: Vec<f64> = (0..nv)
            .map(|p| {
                let dtg = (g_after[k * nv + p] - g_before[k * nv + p]) / (2.0 * dt);
                eps * dtg + eps * pg[p] - q[p]
            })
            .collect();
        let rhs: Vec<f64> = source.iter().zip(&theta).map(|(a, b)| a + b).collect();
        let (sol, report) = inv.solve(&basis.project_p1(&rhs))?;
        max_iterations = max_iterations.max(report.iterations);
        let diff: Vec<f64> = g.iter().zip(&sol).map(|(a, b)| a - b).collect();
        let gn = basis.norm(g);
        let scale = gn.max(NOISE * basis.norm(&basis.m)).max(FLOOR);
        let r = if gn <= NOISE * basis.norm(&basis.m) { 0.0 } else { basis.norm(&diff) / scale };
        per_node.push((k, r));
        if r > 0.0 {
            num += basis.norm(&diff).powi(2);
            den += gn * gn;
        }
        th += basis.norm(&theta).powi(2);
        src += basis.norm(&source).powi(2);
    }
    Ok(ConsistencyReport {
        residual: if den > 0.0 { (num / den).sqrt() } else { 0.0 },
        per_node,
        theta_fraction: if src > 0.0 { (th / src).sqrt() } else { 0.0 },
        max_iterations,
    })
}
