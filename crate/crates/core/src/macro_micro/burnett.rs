use super::basis::MacroBasis;
use super::inverse::{InverseOptions, LmInverse, SolveReport};
use crate::collision::{pair_index, CollisionOperator, PAIRS};
use crate::error::Result;
use crate::maxwellian::{MaxwellState, R_GAS};
use crate::phase_space::VelocityGrid;

/// `Â_j(w) = ((|w|² − 5)/2) w_j`.
pub fn a_hat(w: [f64; 3], j: usize) -> f64 {
    let w2 = w[0] * w[0] + w[1] * w[1] + w[2] * w[2];
    0.5 * (w2 - 5.0) * w[j]
}

/// `B̂_ij(w) = w_i w_j − δ_ij |w|²/3`.
pub fn b_hat(w: [f64; 3], i: usize, j: usize) -> f64 {
    let w2 = w[0] * w[0] + w[1] * w[1] + w[2] * w[2];
    w[i] * w[j] - if i == j { w2 / 3.0 } else { 0.0 }
}

/// Viscosity and heat conductivity, `μ(θ) = μ(θ_0)(θ/θ_0)^{5/2}` and likewise for κ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransportCoefficients {
    pub theta_ref: f64,
    pub mu_ref: f64,
    pub kappa_ref: f64,
}

impl TransportCoefficients {
    pub fn mu(&self, theta: f64) -> f64 {
        self.mu_ref * (theta / self.theta_ref).powf(2.5)
    }

    pub fn kappa(&self, theta: f64) -> f64 {
        self.kappa_ref * (theta / self.theta_ref).powf(2.5)
    }
}

/// Burnett functions of one Maxwellian and their inverses under `L_M`.
///
/// `a_hat[j]`, `b_hat[e]` hold the polynomials `Â_j(w)`, `B̂_ij(w)` (without `M`);
/// `a_rhs`, `b_rhs` the microscopic right-hand sides `P_1(Â M)`, `P_1(B̂ M)`;
/// `a`, `b` the solutions `A_j`, `B_ij`. Symmetric pairs are indexed by [`PAIRS`].
#[derive(Debug, Clone)]
pub struct BurnettSet {
    pub state: MaxwellState,
    pub grid: VelocityGrid,
    pub m: Vec<f64>,
    pub a_hat: [Vec<f64>; 3],
    pub b_hat: [Vec<f64>; 6],
    pub a_rhs: [Vec<f64>; 3],
    pub b_rhs: [Vec<f64>; 6],
    pub a: [Vec<f64>; 3],
    pub b: [Vec<f64>; 6],
    pub reports: Vec<SolveReport>,
}

fn hats(state: &MaxwellState, grid: &VelocityGrid) -> ([Vec<f64>; 3], [Vec<f64>; 6]) {
    let a = [0, 1, 2].map(|j| grid.sample(|v| a_hat(state.reduced(v), j)));
    let b = [0, 1, 2, 3, 4, 5].map(|e| {
        let (i, j) = PAIRS[e];
        grid.sample(|v| b_hat(state.reduced(v), i, j))
    });
    (a, b)
}

fn times(a: &[f64], m: &[f64]) -> Vec<f64> {
    a.iter().zip(m).map(|(x, y)| x * y).collect()
}

impl BurnettSet {
    pub fn compute(op: &CollisionOperator, state: MaxwellState, opts: InverseOptions) -> Result<Self> {
        let inv = LmInverse::new(op, state, opts)?;
        Self::with_inverse(&inv)
    }

    pub fn with_inverse(inv: &LmInverse<'_>) -> Result<Self> {
        let basis = inv.basis();
        let grid = basis.grid().clone();
        let state = basis.state;
        let (a_hat, b_hat) = hats(&state, &grid);
        let a_rhs = [0, 1, 2].map(|j| basis.project_p1(&times(&a_hat[j], &basis.m)));
        let b_rhs = [0, 1, 2, 3, 4, 5].map(|e| basis.project_p1(&times(&b_hat[e], &basis.m)));
        let mut reports = Vec::new();
        let mut solve = |rhs: &Vec<f64>| -> Result<Vec<f64>> {
            let (g, r) = inv.solve(rhs)?;
            reports.push(r);
            Ok(g)
        };
        let a = [solve(&a_rhs[0])?, solve(&a_rhs[1])?, solve(&a_rhs[2])?];
        let mut b: [Vec<f64>; 6] = Default::default();
        for e in 0..6 {
            b[e] = solve(&b_rhs[e])?;
        }
        Ok(Self {
            state,
            grid,
            m: basis.m.clone(),
            a_hat,
            b_hat,
            a_rhs,
            b_rhs,
            a,
            b,
            reports,
        })
    }

    pub fn b_at(&self, i: usize, j: usize) -> &[f64] {
        &self.b[pair_index(i, j)]
    }

    /// `⟨Â_i, A_j⟩ = ∫ Â_i A_j dv`.
    pub fn a_gram(&self, i: usize, j: usize) -> f64 {
        self.grid.dot(&self.a_hat[i], &self.a[j])
    }

    /// `⟨Â_i, B_jk⟩`.
    pub fn a_b_cross(&self, i: usize, j: usize, k: usize) -> f64 {
        self.grid.dot(&self.a_hat[i], self.b_at(j, k))
    }

    /// `⟨B̂_ij, B_kl⟩`.
    pub fn b_gram(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.grid.dot(&self.b_hat[pair_index(i, j)], self.b_at(k, l))
    }

    pub fn transport(&self) -> TransportCoefficients {
        let theta = self.state.theta;
        TransportCoefficients {
            theta_ref: theta,
            mu_ref: -R_GAS * theta * self.b_gram(0, 1, 0, 1),
            kappa_ref: -R_GAS * R_GAS * theta * self.a_gram(0, 0),
        }
    }

    /// Structure and sign checks on the Gram tables, numbered 1 to 8.
    pub fn lemma_checks(&self, tol: f64) -> Vec<GramCheck> {
        let mut checks = Vec::new();
        let a_scale = (0..3).map(|i| self.a_gram(i, i).abs()).fold(0.0, f64::max);
        let b_scale = (0..3)
            .flat_map(|i| (0..3).map(move |j| (i, j)))
            .map(|(i, j)| self.b_gram(i, j, i, j).abs())
            .fold(0.0, f64::max);
        let mut push = |bullet: usize, name: String, value: f64, scale: f64, positivity: Option<f64>| {
            let pass = value.abs() <= tol * scale && positivity.is_none_or(|p| p > 0.0);
            checks.push(GramCheck {
                bullet,
                name,
                value,
                scale,
                pass,
            });
        };

        let a_diag: Vec<f64> = (0..3).map(|i| -self.a_gram(i, i)).collect();
        push(
            1,
            "-<A^_i,A_i> positive and independent of i".into(),
            spread(&a_diag),
            a_scale,
            Some(min(&a_diag)),
        );
        let mut off: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    off = off.max(self.a_gram(i, j).abs());
                }
            }
        }
        let mut cross: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    cross = cross.max(self.a_b_cross(i, j, k).abs());
                }
            }
        }
        push(2, "<A^_i,A_j> = 0 (i != j), <A^_i,B_jk> = 0".into(), off.max(cross), a_scale.max(b_scale), None);

        let mut sym: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        let g = self.b_gram(i, j, k, l);
                        sym = sym
                            .max((g - self.b_gram(k, l, i, j)).abs())
                            .max((g - self.b_gram(j, i, k, l)).abs());
                    }
                }
            }
        }
        push(3, "<B^_ij,B_kl> = <B^_kl,B_ij> = <B^_ji,B_kl>".into(), sym, b_scale, None);

        let shear: Vec<f64> = [(0, 1), (0, 2), (1, 2)]
            .iter()
            .map(|&(i, j)| -self.b_gram(i, j, i, j))
            .collect();
        push(
            4,
            "-<B^_ij,B_ij> positive and independent of i != j".into(),
            spread(&shear),
            b_scale,
            Some(min(&shear)),
        );
        let cross_diag: Vec<f64> = (0..3)
            .flat_map(|i| (0..3).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| self.b_gram(i, i, j, j))
            .collect();
        push(
            5,
            "<B^_ii,B_jj> positive and independent of i != j".into(),
            spread(&cross_diag),
            b_scale,
            Some(min(&cross_diag)),
        );
        let diag: Vec<f64> = (0..3).map(|i| -self.b_gram(i, i, i, i)).collect();
        push(
            6,
            "-<B^_ii,B_ii> positive and independent of i".into(),
            spread(&diag),
            b_scale,
            Some(min(&diag)),
        );
        let mut zero: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        let allowed = (i, j) == (k, l) || (i, j) == (l, k) || (i == j && k == l);
                        if !allowed {
                            zero = zero.max(self.b_gram(i, j, k, l).abs());
                        }
                    }
                }
            }
        }
        push(7, "<B^_ij,B_kl> = 0 otherwise".into(), zero, b_scale, None);
        let mut iso: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    let d = self.b_gram(i, i, i, i) - self.b_gram(i, i, j, j) - 2.0 * self.b_gram(i, j, i, j);
                    iso = iso.max(d.abs());
                }
            }
        }
        push(8, "<B^_ii,B_ii> - <B^_ii,B_jj> = 2<B^_ij,B_ij>".into(), iso, b_scale, None);
        checks
    }
}

fn spread(xs: &[f64]) -> f64 {
    xs.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b)) - min(xs)
}

fn min(xs: &[f64]) -> f64 {
    xs.iter().fold(f64::INFINITY, |a, &b| a.min(b))
}

/// One structural equality or positivity check on the Burnett Gram tables.
#[derive(Debug, Clone, PartialEq)]
pub struct GramCheck {
    pub bullet: usize,
    pub name: String,
    pub value: f64,
    pub scale: f64,
    pub pass: bool,
}

/// `μ(θ)` and `κ(θ)` from the two solves `A_1`, `B_12` only.
pub fn transport_coefficients(
    op: &CollisionOperator,
    state: MaxwellState,
    opts: InverseOptions,
) -> Result<TransportCoefficients> {
    let inv = LmInverse::new(op, state, opts)?;
    let grid = op.grid();
    let basis = inv.basis();
    let (a_hat, b_hat) = hats(&state, grid);
    let (a1, _) = inv.solve(&basis.project_p1(&times(&a_hat[0], &basis.m)))?;
    let (b12, _) = inv.solve(&basis.project_p1(&times(&b_hat[1], &basis.m)))?;
    let theta = state.theta;
    Ok(TransportCoefficients {
        theta_ref: theta,
        mu_ref: -R_GAS * theta * grid.dot(&b_hat[1], &b12),
        kappa_ref: -R_GAS * R_GAS * theta * grid.dot(&a_hat[0], &a1),
    })
}

/// Burnett inverses of the global Maxwellian, reusable for any state through the
/// scaling `A_j^{[ρ,u,θ]}(v) = A_j^{[1,0,3/2]}((v − u)/√(Rθ))`.
#[derive(Debug, Clone)]
pub struct BurnettTable {
    pub grid: VelocityGrid,
    ratio: Vec<[f64; 9]>,
}

impl BurnettTable {
    pub fn from_set(set: &BurnettSet) -> Self {
        let mu = &set.m;
        let ratio = (0..set.grid.len())
            .map(|p| {
                let mut r = [0.0; 9];
                for j in 0..3 {
                    r[j] = set.a[j][p] / mu[p];
                }
                for e in 0..6 {
                    r[3 + e] = set.b[e][p] / mu[p];
                }
                r
            })
            .collect();
        Self {
            grid: set.grid.clone(),
            ratio,
        }
    }

    pub fn compute(op: &CollisionOperator, opts: InverseOptions) -> Result<Self> {
        Ok(Self::from_set(&BurnettSet::compute(op, MaxwellState::global(), opts)?))
    }

    /// Tricubic interpolation of `(A_j, B_e)/μ` at the reduced velocity `w`;
    /// zero outside the table.
    fn interpolate(&self, w: [f64; 3]) -> [f64; 9] {
        let n = self.grid.n();
        let h = self.grid.spacing();
        let ext = self.grid.extent();
        let mut base = [0usize; 3];
        let mut weights = [[0.0; 4]; 3];
        for d in 0..3 {
            if w[d].abs() > ext {
                return [0.0; 9];
            }
            let s = (w[d] + ext) / h;
            let i0 = (s.floor() as isize - 1).clamp(0, n as isize - 4) as usize;
            let t = s - i0 as f64;
            base[d] = i0;
            for a in 0..4 {
                let mut c = 1.0;
                for b in 0..4 {
                    if a != b {
                        c *= (t - b as f64) / (a as f64 - b as f64);
                    }
                }
                weights[d][a] = c;
            }
        }
        let mut out = [0.0; 9];
        for a in 0..4 {
            for b in 0..4 {
                let wab = weights[0][a] * weights[1][b];
                for c in 0..4 {
                    let wt = wab * weights[2][c];
                    let p = self.grid.index(base[0] + a, base[1] + b, base[2] + c);
                    let r = &self.ratio[p];
                    for q in 0..9 {
                        out[q] += wt * r[q];
                    }
                }
            }
        }
        out
    }

    /// `A_j` and `B_e` of the Maxwellian in `basis`, sampled on its lattice and
    /// projected onto the microscopic subspace.
    pub fn evaluate(&self, basis: &MacroBasis) -> ([Vec<f64>; 3], [Vec<f64>; 6]) {
        let grid = basis.grid();
        let state = basis.state;
        let len = grid.len();
        let mut a: [Vec<f64>; 3] = Default::default();
        let mut b: [Vec<f64>; 6] = Default::default();
        for f in a.iter_mut().chain(b.iter_mut()) {
            *f = vec![0.0; len];
        }
        let norm = (2.0 * std::f64::consts::PI).powf(-1.5);
        for p in 0..len {
            let w = state.reduced(grid.velocity(p));
            let w2 = w[0] * w[0] + w[1] * w[1] + w[2] * w[2];
            let mu_w = norm * (-0.5 * w2).exp();
            let r = self.interpolate(w);
            for j in 0..3 {
                a[j][p] = r[j] * mu_w;
            }
            for e in 0..6 {
                b[e][p] = r[3 + e] * mu_w;
            }
        }
        (a.map(|f| basis.project_p1(&f)), b.map(|f| basis.project_p1(&f)))
    }
}

/// Background gradients entering the first-order correction:
/// `grad_theta[j] = ∂_j θ̄`, `grad_u[i][j] = ∂_i ū_j`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Gradients {
    pub grad_theta: [f64; 3],
    pub grad_u: [[f64; 3]; 3],
}

impl Gradients {
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            grad_theta: self.grad_theta.map(|x| s * x),
            grad_u: self.grad_u.map(|r| r.map(|x| s * x)),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = *self;
        for i in 0..3 {
            out.grad_theta[i] += o.grad_theta[i];
            for j in 0..3 {
                out.grad_u[i][j] += o.grad_u[i][j];
            }
        }
        out
    }
}

/// `Ḡ = ε √(R/θ) Σ_j ∂_jθ̄ A_j + ε Σ_ij ∂_iū_j B_ij`.
pub fn correction_gbar(
    grads: &Gradients,
    theta: f64,
    eps: f64,
    a: &[Vec<f64>; 3],
    b: &[Vec<f64>; 6],
) -> Vec<f64> {
    let len = a[0].len();
    let mut out = vec![0.0; len];
    let ct = eps * (R_GAS / theta).sqrt();
    for j in 0..3 {
        let c = ct * grads.grad_theta[j];
        if c != 0.0 {
            for (o, x) in out.iter_mut().zip(&a[j]) {
                *o += c * x;
            }
        }
    }
    for i in 0..3 {
        for j in 0..3 {
            let c = eps * grads.grad_u[i][j];
            if c != 0.0 {
                for (o, x) in out.iter_mut().zip(&b[pair_index(i, j)]) {
                    *o += c * x;
                }
            }
        }
    }
    out
}

/// `P_1{ v·( |v−u|² ∇θ/(2Rθ²) + ((v−u)·∇u)/(Rθ) ) M }`.
pub fn transport_source(basis: &MacroBasis, grads: &Gradients) -> Vec<f64> {
    let s = basis.state;
    let rt = s.r_theta();
    let grid = basis.grid();
    let raw: Vec<f64> = (0..grid.len())
        .map(|p| {
            let v = grid.velocity(p);
            let c = [v[0] - s.u[0], v[1] - s.u[1], v[2] - s.u[2]];
            let c2 = c[0] * c[0] + c[1] * c[1] + c[2] * c[2];
            let mut acc = 0.0;
            for j in 0..3 {
                let mut flux = c2 * grads.grad_theta[j] / (2.0 * rt * s.theta);
                for i in 0..3 {
                    flux += c[i] * grads.grad_u[i][j] / rt;
                }
                acc += v[j] * flux;
            }
            acc * basis.m[p]
        })
        .collect();
    basis.project_p1(&raw)
}

/// `Ḡ = ε L_M^{-1} P_1{…}` by a direct constrained solve.
pub fn correction_gbar_direct(inv: &LmInverse<'_>, grads: &Gradients, eps: f64) -> Result<Vec<f64>> {
    let rhs = transport_source(inv.basis(), grads);
    let (g, _) = inv.solve(&rhs)?;
    Ok(g.into_iter().map(|x| eps * x).collect())
}
