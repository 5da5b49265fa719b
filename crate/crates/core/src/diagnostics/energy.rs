use rayon::prelude::*;

use crate::collision::{sigma_norm, weight_power, CollisionOperator, SigmaField};
use crate::error::{LandauError, Result};
use crate::fluid::Spectral;
use crate::phase_space::DistributionField;
use crate::stencil::diff;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyOptions {
    /// Sobolev order `N`.
    pub order: usize,
    /// Cap on the total velocity-derivative order `|β|`.
    pub max_velocity_order: usize,
}

impl Default for EnergyOptions {
    fn default() -> Self {
        Self {
            order: 3,
            max_velocity_order: 2,
        }
    }
}

/// Fields entering `E_N` and `D_N`.
pub struct EnergyInput<'a> {
    /// `(ρ̃, ũ_1, ũ_2, ũ_3, θ̃)`.
    pub fluid: [&'a [f64]; 5],
    /// The microscopic perturbation `f`.
    pub f: &'a DistributionField,
    pub eps: f64,
}

/// One weighted constituent of `E_N` or `D_N`; `value` already includes its weight.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyTerm {
    pub label: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyReport {
    pub e_n: f64,
    pub d_n: f64,
    pub e_terms: Vec<EnergyTerm>,
    pub d_terms: Vec<EnergyTerm>,
    /// `Σ_{|α|=m} ‖∂^α(ρ̃, ũ, θ̃)‖²` for `m = 0..=N`.
    pub fluid_by_order: Vec<f64>,
}

fn multi_indices(dims: usize, order: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for a in 0..=order {
        for b in 0..=order - a {
            let c = order - a - b;
            let idx = [a, b, c];
            if (dims..3).all(|d| idx[d] == 0) {
                out.push(idx);
            }
        }
    }
    out
}

fn label(a: [usize; 3]) -> String {
    format!("{}{}{}", a[0], a[1], a[2])
}

/// `∂_x^α` of every velocity line of `f`.
fn x_derivative(f: &DistributionField, alpha: [usize; 3], sp: &Spectral) -> Vec<f64> {
    if alpha == [0, 0, 0] {
        return f.values.clone();
    }
    let nv = f.velocity.len();
    let nx = f.space.len();
    let orders = alpha.map(|a| a as u32);
    let lines: Vec<Vec<f64>> = (0..nv)
        .into_par_iter()
        .map(|p| {
            let line: Vec<f64> = (0..nx).map(|k| f.values[k * nv + p]).collect();
            sp.derivative_multi(&line, orders)
        })
        .collect();
    let mut out = vec![0.0; nx * nv];
    for (p, line) in lines.iter().enumerate() {
        for k in 0..nx {
            out[k * nv + p] = line[k];
        }
    }
    out
}

/// `∂_v^β` of one velocity block.
fn v_derivative(block: &[f64], beta: [usize; 3], n: usize, h: f64) -> Vec<f64> {
    let mut cur = block.to_vec();
    let mut next = vec![0.0; cur.len()];
    for axis in 0..3 {
        for _ in 0..beta[axis] {
            diff(&cur, n, h, axis, &mut next);
            std::mem::swap(&mut cur, &mut next);
        }
    }
    cur
}

/// `E_N` and `D_N` with every constituent term, using spectral x-derivatives and
/// stencil v-derivatives.
pub fn energy_functionals(
    input: &EnergyInput<'_>,
    op: &CollisionOperator,
    sigma: &SigmaField,
    sp: &Spectral,
    opts: EnergyOptions,
) -> Result<EnergyReport> {
    let f = input.f;
    if *op.grid() != f.velocity || *sp.grid() != f.space {
        return Err(LandauError::GridMismatch("energy inputs live on different grids".into()));
    }
    if input.fluid.iter().any(|c| c.len() != f.space.len()) {
        return Err(LandauError::GridMismatch("fluid perturbation does not match the spatial grid".into()));
    }
    if opts.order == 0 {
        return Err(LandauError::InvalidInput("energy order must be at least 1".into()));
    }
    let n = opts.order;
    let eps = input.eps;
    let dims = sp.grid().dim();
    let cell = f.space.cell_volume();
    let vgrid = &f.velocity;
    let nv = vgrid.len();
    let (vn, vh) = (vgrid.n(), vgrid.spacing());

    let mut e_terms = Vec::new();
    let mut d_terms = Vec::new();
    let mut fluid_by_order = Vec::with_capacity(n + 1);
    for m in 0..=n {
        let mut order_sum = 0.0;
        for alpha in multi_indices(dims, m) {
            let orders = alpha.map(|a| a as u32);
            let fl: f64 = input
                .fluid
                .iter()
                .map(|c| {
                    let d = sp.derivative_multi(c, orders);
                    d.iter().map(|x| x * x).sum::<f64>() * cell
                })
                .sum();
            order_sum += fl;
            let a = label(alpha);
            if m < n {
                e_terms.push(EnergyTerm { label: format!("fluid a={a}"), value: fl });
            } else {
                e_terms.push(EnergyTerm { label: format!("eps2 fluid a={a}"), value: eps * eps * fl });
            }
            if m >= 1 {
                d_terms.push(EnergyTerm { label: format!("eps fluid a={a}"), value: eps * fl });
            }

            let dx = x_derivative(f, alpha, sp);
            let blocks: Vec<&[f64]> = dx.chunks(nv).collect();
            let (l2, sig): (f64, f64) = blocks
                .par_iter()
                .map(|b| {
                    let sq: Vec<f64> = b.iter().map(|x| x * x).collect();
                    (vgrid.quad(&sq), sigma_norm(op, sigma, b, 0.0).powi(2))
                })
                .collect::<Vec<_>>()
                .into_iter()
                .fold((0.0, 0.0), |x, y| (x.0 + y.0, x.1 + y.1));
            let (l2, sig) = (l2 * cell, sig * cell);
            if m < n {
                e_terms.push(EnergyTerm { label: format!("f a={a}"), value: l2 });
                d_terms.push(EnergyTerm { label: format!("sigma f a={a} / eps"), value: sig / eps });
            } else {
                e_terms.push(EnergyTerm { label: format!("eps2 f a={a}"), value: eps * eps * l2 });
                d_terms.push(EnergyTerm { label: format!("eps sigma f a={a}"), value: eps * sig });
            }

            let top = (n - m).min(opts.max_velocity_order);
            for bo in 1..=top {
                for beta in multi_indices(3, bo) {
                    let l = bo as f64;
                    let (w2, ws): (f64, f64) = blocks
                        .par_iter()
                        .map(|blk| {
                            let db = v_derivative(blk, beta, vn, vh);
                            let sq: Vec<f64> = (0..nv)
                                .map(|p| weight_power(vgrid.velocity(p), l) * db[p] * db[p])
                                .collect();
                            (vgrid.quad(&sq), sigma_norm(op, sigma, &db, l).powi(2))
                        })
                        .collect::<Vec<_>>()
                        .into_iter()
                        .fold((0.0, 0.0), |x, y| (x.0 + y.0, x.1 + y.1));
                    let b = label(beta);
                    e_terms.push(EnergyTerm { label: format!("f a={a} b={b}"), value: w2 * cell });
                    d_terms.push(EnergyTerm {
                        label: format!("sigma f a={a} b={b} / eps"),
                        value: ws * cell / eps,
                    });
                }
            }
        }
        fluid_by_order.push(order_sum);
    }
    Ok(EnergyReport {
        e_n: e_terms.iter().map(|t| t.value).sum(),
        d_n: d_terms.iter().map(|t| t.value).sum(),
        e_terms,
        d_terms,
        fluid_by_order,
    })
}
