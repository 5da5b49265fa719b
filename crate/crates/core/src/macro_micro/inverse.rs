use nalgebra::{DMatrix, DVector};

use super::basis::MacroBasis;
use crate::collision::{CollisionOperator, LinearizedOperator, Reference};
use crate::error::{LandauError, Result};
use crate::maxwellian::MaxwellState;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InverseMethod {
    /// Projected, Jacobi-preconditioned conjugate gradients.
    Iterative,
    /// Dense KKT factorization with the deflation constraints as Lagrange rows.
    Dense,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InverseOptions {
    pub method: InverseMethod,
    pub tolerance: f64,
    pub max_iterations: usize,
    pub conditioning_floor: f64,
    pub microscopic_tolerance: f64,
}

impl Default for InverseOptions {
    fn default() -> Self {
        Self {
            method: InverseMethod::Iterative,
            tolerance: 1e-11,
            max_iterations: 40_000,
            conditioning_floor: 1e-10,
            microscopic_tolerance: 1e-8,
        }
    }
}

/// Outcome of one constrained solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveReport {
    pub iterations: usize,
    /// `‖L_M g − rhs‖ / ‖rhs‖` in `⟨·, ·/M⟩`.
    pub residual: f64,
    /// Extreme eigenvalues of the solved operator on the microscopic subspace
    /// (Lanczos estimates for the iterative method).
    pub lambda_min: f64,
    pub lambda_max: f64,
}

impl SolveReport {
    pub fn conditioning(&self) -> f64 {
        self.lambda_min / self.lambda_max
    }
}

/// Inverse of `L_M` on the microscopic subspace.
///
/// Works with `y = g/√M`, where `S y = −M^{-1/2} L_M (M^{1/2} y)` is symmetric
/// positive semidefinite with null space spanned by `χ̃_k/√M`. The centered
/// velocity stencil annihilates the seven lattice checkerboard patterns
/// `(−1)^{i}`, `(−1)^{j}`, …, `(−1)^{i+j+k}` away from the box faces, so
/// `φ = h/M` of that form spans a near-null space of `S`; it is deflated together
/// with the invariants.
pub struct LmInverse<'a> {
    lin: LinearizedOperator<'a>,
    basis: MacroBasis,
    sqrt_m: Vec<f64>,
    null: Vec<Vec<f64>>,
    diag: Vec<f64>,
    opts: InverseOptions,
    dense: Option<DenseKkt>,
}

struct DenseKkt {
    lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    lambda_min: f64,
    lambda_max: f64,
}

impl<'a> LmInverse<'a> {
    pub fn new(op: &'a CollisionOperator, state: MaxwellState, opts: InverseOptions) -> Result<Self> {
        let reference = Reference::new(state, op.grid())?;
        Self::with_reference(op, reference, opts)
    }

    pub fn with_reference(
        op: &'a CollisionOperator,
        reference: Reference,
        opts: InverseOptions,
    ) -> Result<Self> {
        let basis = MacroBasis::with_values(reference.state, reference.values.clone(), op.grid())?;
        let lin = op.linearized(&reference)?;
        let sqrt_m: Vec<f64> = reference.values.iter().map(|m| m.sqrt()).collect();
        let null = deflation_space(&basis, &sqrt_m);
        let diag = jacobi_diagonal(op, &reference);
        let mut inv = Self {
            lin,
            basis,
            sqrt_m,
            null,
            diag,
            opts,
            dense: None,
        };
        if opts.method == InverseMethod::Dense {
            inv.dense = Some(inv.factor_dense()?);
        }
        Ok(inv)
    }

    pub fn basis(&self) -> &MacroBasis {
        &self.basis
    }

    pub fn linearized(&self) -> &LinearizedOperator<'a> {
        &self.lin
    }

    fn dot(&self, a: &[f64], b: &[f64]) -> f64 {
        self.basis.grid().dot(a, b)
    }

    fn project(&self, y: &mut [f64]) {
        for n in &self.null {
            let c = self.dot(y, n);
            for (a, b) in y.iter_mut().zip(n) {
                *a -= c * b;
            }
        }
    }

    /// `S y`.
    pub fn apply_s(&self, y: &[f64]) -> Vec<f64> {
        let h: Vec<f64> = y.iter().zip(&self.sqrt_m).map(|(a, s)| a * s).collect();
        let l = self.lin.apply(&h);
        l.iter().zip(&self.sqrt_m).map(|(a, s)| -a / s).collect()
    }

    /// The unique microscopic `g` with `L_M g = rhs`.
    pub fn solve(&self, rhs: &[f64]) -> Result<(Vec<f64>, SolveReport)> {
        let frac = self.basis.macroscopic_fraction(rhs);
        if frac > self.opts.microscopic_tolerance {
            return Err(LandauError::NotMicroscopic { defect: frac });
        }
        let mut b: Vec<f64> = rhs.iter().zip(&self.sqrt_m).map(|(a, s)| -a / s).collect();
        self.project(&mut b);
        let bnorm = self.dot(&b, &b).sqrt();
        if bnorm == 0.0 {
            let report = SolveReport {
                iterations: 0,
                residual: 0.0,
                lambda_min: f64::NAN,
                lambda_max: f64::NAN,
            };
            return Ok((vec![0.0; rhs.len()], report));
        }
        let (y, iterations, lambda_min, lambda_max) = match &self.dense {
            Some(d) => {
                let y = self.solve_dense(d, &b)?;
                (y, 0, d.lambda_min, d.lambda_max)
            }
            None => self.solve_cg(&b, bnorm)?,
        };
        if lambda_min / lambda_max < self.opts.conditioning_floor {
            return Err(LandauError::Conditioning {
                ratio: lambda_min / lambda_max,
            });
        }
        let mut sy = self.apply_s(&y);
        self.project(&mut sy);
        let res: Vec<f64> = sy.iter().zip(&b).map(|(a, c)| a - c).collect();
        let residual = self.dot(&res, &res).sqrt() / bnorm;
        let g: Vec<f64> = y.iter().zip(&self.sqrt_m).map(|(a, s)| a * s).collect();
        Ok((
            g,
            SolveReport {
                iterations,
                residual,
                lambda_min,
                lambda_max,
            },
        ))
    }

    fn solve_cg(&self, b: &[f64], bnorm: f64) -> Result<(Vec<f64>, usize, f64, f64)> {
        let len = b.len();
        let mut x = vec![0.0; len];
        let mut r = b.to_vec();
        let precondition = |r: &[f64]| {
            let mut z: Vec<f64> = r.iter().zip(&self.diag).map(|(a, d)| a / d).collect();
            self.project(&mut z);
            z
        };
        let mut z = precondition(&r);
        let mut p = z.clone();
        let mut rz = self.dot(&r, &z);
        let mut alphas = Vec::new();
        let mut betas = Vec::new();
        let mut rnorm = bnorm;
        for it in 0..self.opts.max_iterations {
            let mut q = self.apply_s(&p);
            self.project(&mut q);
            let pq = self.dot(&p, &q);
            if !(pq > 0.0) {
                return Err(LandauError::Conditioning { ratio: 0.0 });
            }
            let alpha = rz / pq;
            alphas.push(alpha);
            for k in 0..len {
                x[k] += alpha * p[k];
                r[k] -= alpha * q[k];
            }
            rnorm = self.dot(&r, &r).sqrt();
            if rnorm <= self.opts.tolerance * bnorm {
                let (lo, hi) = lanczos_extremes(&alphas, &betas);
                return Ok((x, it + 1, lo, hi));
            }
            z = precondition(&r);
            let rz_new = self.dot(&r, &z);
            let beta = rz_new / rz;
            betas.push(beta);
            rz = rz_new;
            for k in 0..len {
                p[k] = z[k] + beta * p[k];
            }
        }
        Err(LandauError::NotConverged {
            iterations: self.opts.max_iterations,
            residual: rnorm / bnorm,
        })
    }

    /// Dense matrix of `S` (column `p` is `S e_p`).
    pub fn dense_s(&self) -> DMatrix<f64> {
        let len = self.sqrt_m.len();
        let mut s = DMatrix::zeros(len, len);
        let mut e = vec![0.0; len];
        for p in 0..len {
            e[p] = 1.0;
            let col = self.apply_s(&e);
            e[p] = 0.0;
            for q in 0..len {
                s[(q, p)] = col[q];
            }
        }
        s
    }

    fn factor_dense(&self) -> Result<DenseKkt> {
        let s = self.dense_s();
        let len = s.nrows();
        let w = self.basis.grid().weight();
        let sym = (&s + s.transpose()) * 0.5;
        let mut eig: Vec<f64> = sym.symmetric_eigenvalues().iter().map(|x| x.abs()).collect();
        eig.sort_by(|a, b| a.total_cmp(b));
        let k = self.null.len();
        let lambda_min = eig[k];
        let lambda_max = eig[len - 1];
        let mut kkt = DMatrix::zeros(len + k, len + k);
        kkt.view_mut((0, 0), (len, len)).copy_from(&s);
        for (k, n) in self.null.iter().enumerate() {
            for q in 0..len {
                kkt[(q, len + k)] = n[q];
                kkt[(len + k, q)] = w * n[q];
            }
        }
        Ok(DenseKkt {
            lu: kkt.lu(),
            lambda_min,
            lambda_max,
        })
    }

    fn solve_dense(&self, d: &DenseKkt, b: &[f64]) -> Result<Vec<f64>> {
        let len = b.len();
        let mut rhs = DVector::zeros(len + self.null.len());
        for q in 0..len {
            rhs[q] = b[q];
        }
        let sol = d
            .lu
            .solve(&rhs)
            .ok_or(LandauError::Conditioning { ratio: 0.0 })?;
        Ok((0..len).map(|q| sol[q]).collect())
    }
}

/// Orthonormal basis (in the lattice inner product) of the invariants `χ̃_k/√M`
/// followed by the checkerboard modes `c_S √M`.
fn deflation_space(basis: &MacroBasis, sqrt_m: &[f64]) -> Vec<Vec<f64>> {
    let grid = basis.grid();
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(12);
    for k in 0..5 {
        out.push(basis.ortho[k].iter().zip(sqrt_m).map(|(a, s)| a / s).collect());
    }
    for mask in 1..8usize {
        let mode: Vec<f64> = (0..grid.len())
            .map(|p| {
                let t = grid.triple(p);
                let parity: usize = (0..3).filter(|&d| mask >> d & 1 == 1).map(|d| t[d]).sum();
                if parity.is_multiple_of(2) { sqrt_m[p] } else { -sqrt_m[p] }
            })
            .collect();
        out.push(mode);
    }
    for k in 0..out.len() {
        for _ in 0..2 {
            for j in 0..k {
                let c = grid.dot(&out[k], &out[j]);
                let (head, tail) = out.split_at_mut(k);
                for (a, b) in tail[0].iter_mut().zip(&head[j]) {
                    *a -= c * b;
                }
            }
        }
        let n = grid.dot(&out[k], &out[k]).sqrt();
        out[k].iter_mut().for_each(|a| *a /= n);
    }
    out
}

/// Approximate diagonal of `S`: the 4th-order stencil weight of `−∇·(σ_M ∇)` plus
/// the confining potential `¼ aᵀ σ_M a`.
fn jacobi_diagonal(op: &CollisionOperator, reference: &Reference) -> Vec<f64> {
    let sigma = op.sigma_of(&reference.values);
    let h = op.grid().spacing();
    let stencil = 130.0 / 144.0 / (h * h);
    (0..reference.values.len())
        .map(|p| {
            let a = [0, 1, 2].map(|d| reference.drift[d][p]);
            let trace = sigma[0][p] + sigma[3][p] + sigma[5][p];
            let mut quad = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    quad += sigma[crate::collision::pair_index(i, j)][p] * a[i] * a[j];
                }
            }
            (stencil * trace + 0.25 * quad).max(1e-300)
        })
        .collect()
}

/// Extreme eigenvalues of the CG Lanczos tridiagonal matrix.
fn lanczos_extremes(alphas: &[f64], betas: &[f64]) -> (f64, f64) {
    let m = alphas.len();
    let mut diag = vec![0.0; m];
    let mut off = vec![0.0; m.saturating_sub(1)];
    for k in 0..m {
        diag[k] = 1.0 / alphas[k];
        if k > 0 {
            diag[k] += betas[k - 1] / alphas[k - 1];
        }
        if k + 1 < m {
            off[k] = betas[k].sqrt() / alphas[k];
        }
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for k in 0..m {
        let r = (if k > 0 { off[k - 1].abs() } else { 0.0 })
            + (if k + 1 < m { off[k].abs() } else { 0.0 });
        lo = lo.min(diag[k] - r);
        hi = hi.max(diag[k] + r);
    }
    let count_below = |x: f64| -> usize {
        let mut count = 0;
        let mut d = 1.0;
        for k in 0..m {
            let o2 = if k > 0 { off[k - 1] * off[k - 1] } else { 0.0 };
            d = diag[k] - x - if k > 0 { o2 / d } else { 0.0 };
            if d == 0.0 {
                d = -1e-300;
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    };
    let bisect = |target: usize| -> f64 {
        let (mut a, mut b) = (lo, hi);
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if count_below(mid) > target {
                b = mid;
            } else {
                a = mid;
            }
            if b - a <= 1e-14 * hi.abs().max(1e-300) {
                break;
            }
        }
        0.5 * (a + b)
    };
    (bisect(0), bisect(m - 1))
}

/// Solves `L_M g = rhs` on the microscopic subspace for the Maxwellian of `state`.
pub fn solve_lm_inverse(
    op: &CollisionOperator,
    rhs: &[f64],
    state: &MaxwellState,
    opts: InverseOptions,
) -> Result<(Vec<f64>, SolveReport)> {
    LmInverse::new(op, *state, opts)?.solve(rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lanczos_extremes_of_diagonal_problem() {
        // CG on diag(1, 2, 4) from a uniform start: exact after three steps.
        let d = [1.0, 2.0, 4.0];
        let b = [1.0, 1.0, 1.0];
        let mut x = [0.0; 3];
        let mut r = b;
        let mut p = r;
        let mut rr: f64 = r.iter().map(|v| v * v).sum();
        let (mut alphas, mut betas) = (vec![], vec![]);
        for _ in 0..3 {
            let q: Vec<f64> = (0..3).map(|k| d[k] * p[k]).collect();
            let alpha = rr / (0..3).map(|k| p[k] * q[k]).sum::<f64>();
            alphas.push(alpha);
            for k in 0..3 {
                x[k] += alpha * p[k];
                r[k] -= alpha * q[k];
            }
            let rr_new: f64 = r.iter().map(|v| v * v).sum();
            betas.push(rr_new / rr);
            rr = rr_new;
            for k in 0..3 {
                p[k] = r[k] + betas.last().unwrap() * p[k];
            }
        }
        let (lo, hi) = lanczos_extremes(&alphas, &betas);
        assert!((lo - 1.0).abs() < 1e-9 && (hi - 4.0).abs() < 1e-9);
    }
}
