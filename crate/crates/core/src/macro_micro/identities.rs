use super::basis::MacroBasis;
use super::burnett::{correction_gbar, transport_source, BurnettSet, Gradients};
use super::inverse::LmInverse;
use crate::collision::pair_index;
use crate::error::Result;


const FLOOR: f64 = 1e-14;

fn relative(basis: &MacroBasis, a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    basis.norm(&d) / basis.norm(a).max(basis.norm(b)).max(FLOOR)
}

/// `√(R/θ) Σ_j ∂_jθ Â_j M + Σ_ij ∂_iu_j B̂_ij M` from the microscopic hats of `set`.
pub fn burnett_expansion(set: &BurnettSet, grads: &Gradients) -> Vec<f64> {
    let ones = 1.0;
    correction_gbar(grads, set.state.theta, ones, &set.a_rhs, &set.b_rhs)
}

/// Relative residual of
/// `P_1 v·{|v−u|²∇θ/(2Rθ²) + ((v−u)·∇u)/(Rθ)} M = √(R/θ) Σ ∂_jθ Â_j M + Σ ∂_iu_j B̂_ij M`.
pub fn p1_transport_identity_check(basis: &MacroBasis, set: &BurnettSet, grads: &Gradients) -> f64 {
    let lhs = transport_source(basis, grads);
    let rhs = burnett_expansion(set, grads);
    relative(basis, &lhs, &rhs)
}

/// `v·∇_x M` for a Maxwellian with the given spatial gradients (`grad_rho[k] = ∂_kρ`).
pub fn transport_of_maxwellian(basis: &MacroBasis, grad_rho: [f64; 3], grads: &Gradients) -> Vec<f64> {
    let s = basis.state;
    let rt = s.r_theta();
    let grid = basis.grid();
    (0..grid.len())
        .map(|p| {
            let v = grid.velocity(p);
            let c = [v[0] - s.u[0], v[1] - s.u[1], v[2] - s.u[2]];
            let c2 = c[0] * c[0] + c[1] * c[1] + c[2] * c[2];
            let mut acc = 0.0;
            for k in 0..3 {
                let mut d = grad_rho[k] / s.rho + (c2 / (2.0 * rt) - 1.5) * grads.grad_theta[k] / s.theta;
                for j in 0..3 {
                    d += c[j] * grads.grad_u[k][j] / rt;
                }
                acc += v[k] * d;
            }
            acc * basis.m[p]
        })
        .collect()
}

/// Relative residual of `P_1(v·∇_xM) = P_1 v·{…θ̃, ũ…}M + (1/ε) L_M Ḡ`, with the
/// total gradients split as background + perturbation.
pub fn decomposition_check(
    inv: &LmInverse<'_>,
    set: &BurnettSet,
    grad_rho: [f64; 3],
    background: &Gradients,
    perturbation: &Gradients,
    eps: f64,
) -> f64 {
    let basis = inv.basis();
    let total = background.add(perturbation);
    let lhs = basis.project_p1(&transport_of_maxwellian(basis, grad_rho, &total));
    let gbar = correction_gbar(background, set.state.theta, eps, &set.a, &set.b);
    let lg = inv.linearized().apply(&gbar);
    let tilde = transport_source(basis, perturbation);
    let rhs: Vec<f64> = tilde.iter().zip(&lg).map(|(a, b)| a + b / eps).collect();
    relative(basis, &lhs, &rhs)
}

/// Maximal relative errors of
/// `∫ v_iv_j L_M^{-1}Θ dv = Rθ ∫ B_ij Θ/M dv` and
/// `∫ (½v_i|v|² − v_i u·v) L_M^{-1}Θ dv = (Rθ)^{3/2} ∫ A_i Θ/M dv`
/// for a microscopic `Θ`.
pub fn hydrodynamic_identities(inv: &LmInverse<'_>, set: &BurnettSet, theta_src: &[f64]) -> Result<(f64, f64)> {
    let basis = inv.basis();
    let grid = basis.grid();
    let s = basis.state;
    let rt = s.r_theta();
    let (g, _) = inv.solve(theta_src)?;
    let comps = grid.components();
    let mut err_b: f64 = 0.0;
    let mut scale_b: f64 = FLOOR;
    let mut rows = Vec::new();
    for i in 0..3 {
        for j in i..3 {
            let poly: Vec<f64> = (0..grid.len()).map(|p| comps[i][p] * comps[j][p]).collect();
            let lhs = grid.dot(&poly, &g);
            let rhs = rt * grid.dot_weighted(&set.b[pair_index(i, j)], theta_src, &basis.m);
            rows.push((lhs, rhs));
        }
    }
    for &(l, r) in &rows {
        scale_b = scale_b.max(l.abs()).max(r.abs());
    }
    for &(l, r) in &rows {
        err_b = err_b.max((l - r).abs() / scale_b);
    }
    let mut rows = Vec::new();
    for i in 0..3 {
        let poly: Vec<f64> = (0..grid.len())
            .map(|p| {
                let v = [comps[0][p], comps[1][p], comps[2][p]];
                let v2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
                let uv = s.u[0] * v[0] + s.u[1] * v[1] + s.u[2] * v[2];
                0.5 * v[i] * v2 - v[i] * uv
            })
            .collect();
        let lhs = grid.dot(&poly, &g);
        let rhs = rt.powf(1.5) * grid.dot_weighted(&set.a[i], theta_src, &basis.m);
        rows.push((lhs, rhs));
    }
    let scale_a = rows.iter().fold(FLOOR, |m, &(l, r)| m.max(l.abs()).max(r.abs()));
    let err_a = rows.iter().fold(0.0f64, |m, &(l, r)| m.max((l - r).abs() / scale_a));
    Ok((err_b, err_a))
}

/// Fitted constant `C` of `|f(v)| ≤ C M(v)^p` over `|v − u| ≥ radius`, together with
/// the largest ratio on the outer shell `|v − u| ≥ 2·radius`.
pub fn decay_envelope(basis: &MacroBasis, f: &[f64], radius: f64, power: f64) -> (f64, f64) {
    let grid = basis.grid();
    let s = basis.state;
    let mut c: f64 = 0.0;
    let mut outer: f64 = 0.0;
    for p in 0..grid.len() {
        let v = grid.velocity(p);
        let r = ((v[0] - s.u[0]).powi(2) + (v[1] - s.u[1]).powi(2) + (v[2] - s.u[2]).powi(2)).sqrt();
        if r >= radius {
            let ratio = f[p].abs() / basis.m[p].powf(power);
            c = c.max(ratio);
            if r >= 2.0 * radius {
                outer = outer.max(ratio);
            }
        }
    }
    (c, outer)
}

/// `∫ |⟨v⟩^k √μ f|² / M² dv`, the weighted decay integral for Burnett inverses.
pub fn weighted_decay_integral(basis: &MacroBasis, mu: &[f64], f: &[f64], k: i32) -> f64 {
    let grid = basis.grid();
    let vals: Vec<f64> = (0..grid.len())
        .map(|p| {
            let v = grid.velocity(p);
            let w = (1.0 + v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).powi(k);
            w * mu[p] * f[p] * f[p] / (basis.m[p] * basis.m[p])
        })
        .collect();
    grid.quad(&vals)
}

