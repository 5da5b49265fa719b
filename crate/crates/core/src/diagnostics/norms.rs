use crate::error::{LandauError, Result};
use crate::maxwellian::moments;
use crate::phase_space::DistributionField;

/// `‖(F − M)/√μ‖` in `L²_xL²_v` and `L^∞_xL²_v`.
pub fn mu_weighted_distance(f: &DistributionField, m: &DistributionField, mu: &[f64]) -> Result<(f64, f64)> {
    if !f.same_grids(m) || mu.len() != f.velocity.len() {
        return Err(LandauError::GridMismatch("distance operands live on different grids".into()));
    }
    let grid = &f.velocity;
    let mut sum = 0.0;
    let mut sup: f64 = 0.0;
    let mut node = vec![0.0; grid.len()];
    for (a, b) in f.nodes().zip(m.nodes()) {
        for p in 0..grid.len() {
            let d = (a[p] - b[p]) / mu[p].sqrt();
            node[p] = d * d;
        }
        let sq = grid.quad(&node);
        sum += sq;
        sup = sup.max(sq);
    }
    Ok(((sum * f.space.cell_volume()).sqrt(), sup.sqrt()))
}

/// `‖f‖_{L²_xL²_v}`.
pub fn l2_norm(f: &DistributionField) -> f64 {
    let grid = &f.velocity;
    let sum: f64 = f
        .nodes()
        .map(|a| {
            let sq: Vec<f64> = a.iter().map(|x| x * x).collect();
            grid.quad(&sq)
        })
        .sum();
    (sum * f.space.cell_volume()).sqrt()
}

/// Total mass, momentum and energy `∫∫ ψ F dv dx`.
pub fn field_totals(f: &DistributionField) -> [f64; 5] {
    let mut out = [0.0; 5];
    for node in f.nodes() {
        let m = moments(node, &f.velocity);
        for i in 0..5 {
            out[i] += m[i];
        }
    }
    out.map(|x| x * f.space.cell_volume())
}

/// Largest drift of each total from its first value, relative to the largest
/// initial total.
pub fn relative_drift(totals: &[[f64; 5]]) -> f64 {
    let Some(first) = totals.first() else {
        return 0.0;
    };
    let scale = first.iter().fold(1e-300f64, |m, x| m.max(x.abs()));
    totals
        .iter()
        .flat_map(|t| (0..5).map(move |c| (t[c] - first[c]).abs()))
        .fold(0.0, f64::max)
        / scale
}
