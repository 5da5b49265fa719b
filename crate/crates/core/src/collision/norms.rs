use super::operator::{CollisionOperator, SigmaField};

/// `w(v)^{2ℓ}` with `w = ⟨v⟩^{-1} = (1 + |v|²)^{-1/2}`.
pub fn weight_power(v: [f64; 3], l: f64) -> f64 {
    (1.0 + v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).powf(-l)
}

/// `|f|_{σ,ℓ}` with `|f|²_{σ,ℓ} = Σ ∫ w^{2ℓ} (σ^{ij} ∂_i f ∂_j f + σ^{ij} (v_i/2)(v_j/2) f²) dv`.
pub fn sigma_norm(op: &CollisionOperator, sigma: &SigmaField, f: &[f64], l: f64) -> f64 {
    let grid = op.grid();
    let df = op.gradient(f);
    let integrand: Vec<f64> = (0..grid.len())
        .map(|p| {
            let v = grid.velocity(p);
            let s = sigma.at(p);
            let mut acc = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    acc += s[i][j] * (df[i][p] * df[j][p] + 0.25 * v[i] * v[j] * f[p] * f[p]);
                }
            }
            weight_power(v, l) * acc
        })
        .collect();
    grid.quad(&integrand).max(0.0).sqrt()
}
