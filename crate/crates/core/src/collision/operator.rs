use nalgebra::{Matrix5, Vector5};

use super::convolution::{apply_direct, matrix_terms, vector_terms, Convolver, Term};
use super::kernel::{pair_index, KernelTable};
use crate::error::{LandauError, Result};
use crate::maxwellian::{global_maxwellian, maxwellian, CollisionInvariantSet, MaxwellState};
use crate::phase_space::VelocityGrid;
use crate::stencil::{diff, diff_transpose_add};

/// How kernel convolutions are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvolutionPath {
    Direct,
    Fft,
}

/// Maxwellian used to adapt velocity gradients: `D_r f = r D(f/r) − a f` with
/// `a = (v − u_r)/(Rθ_r)`, so that `D_r r = −a r` holds exactly.
#[derive(Debug, Clone)]
pub struct Reference {
    pub state: MaxwellState,
    pub values: Vec<f64>,
    pub drift: [Vec<f64>; 3],
}

impl Reference {
    pub fn new(state: MaxwellState, grid: &VelocityGrid) -> Result<Self> {
        let values = maxwellian(&state, grid)?;
        let rt = state.r_theta();
        let comps = grid.components();
        let drift = [0, 1, 2].map(|d| comps[d].iter().map(|v| (v - state.u[d]) / rt).collect());
        Ok(Self {
            state,
            values,
            drift,
        })
    }

    pub fn global(grid: &VelocityGrid) -> Self {
        Self::new(MaxwellState::global(), grid).expect("global state is valid")
    }
}

/// Discrete Landau operator on one velocity lattice.
#[derive(Debug, Clone)]
pub struct CollisionOperator {
    grid: VelocityGrid,
    table: KernelTable,
    conv: Convolver,
    invariants: CollisionInvariantSet,
    mu: Vec<f64>,
    mu_reference: Reference,
    correction_basis: Vec<Vec<f64>>,
    gram_inv: Matrix5<f64>,
    path: ConvolutionPath,
}

impl CollisionOperator {
    pub fn new(grid: &VelocityGrid) -> Result<Self> {
        if grid.n() < 5 {
            return Err(LandauError::InvalidGrid(format!(
                "collision stencils need n_v >= 5, got {}",
                grid.n()
            )));
        }
        let table = KernelTable::new(grid);
        let conv = Convolver::new(&table);
        let invariants = CollisionInvariantSet::new(grid);
        let mu = global_maxwellian(grid);
        let correction_basis: Vec<Vec<f64>> = invariants
            .all()
            .iter()
            .map(|psi| psi.iter().zip(&mu).map(|(a, b)| a * b).collect())
            .collect();
        let mut gram = Matrix5::zeros();
        for (l, phi) in correction_basis.iter().enumerate() {
            let col = invariants.project(phi, grid);
            for k in 0..5 {
                gram[(k, l)] = col[k];
            }
        }
        let gram_inv = gram
            .try_inverse()
            .ok_or_else(|| LandauError::InvalidGrid("singular invariant Gram matrix".into()))?;
        Ok(Self {
            grid: grid.clone(),
            table,
            conv,
            invariants,
            mu_reference: Reference::global(grid),
            mu,
            correction_basis,
            gram_inv,
            path: ConvolutionPath::Fft,
        })
    }

    pub fn with_path(mut self, path: ConvolutionPath) -> Self {
        self.path = path;
        self
    }

    pub fn path(&self) -> ConvolutionPath {
        self.path
    }

    pub fn grid(&self) -> &VelocityGrid {
        &self.grid
    }

    pub fn table(&self) -> &KernelTable {
        &self.table
    }

    pub fn invariants(&self) -> &CollisionInvariantSet {
        &self.invariants
    }

    /// The global Maxwellian on this lattice.
    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn mu_reference(&self) -> &Reference {
        &self.mu_reference
    }

    fn check(&self, f: &[f64]) -> Result<()> {
        if f.len() != self.grid.len() {
            return Err(LandauError::GridMismatch(format!(
                "field has {} entries, lattice has {}",
                f.len(),
                self.grid.len()
            )));
        }
        Ok(())
    }

    pub fn convolve(&self, inputs: &[&[f64]], outputs: &[Vec<Term>]) -> Vec<Vec<f64>> {
        match self.path {
            ConvolutionPath::Fft => self.conv.apply(inputs, outputs),
            ConvolutionPath::Direct => apply_direct(&self.table, inputs, outputs),
        }
    }

    /// Plain finite-difference gradient.
    pub fn gradient(&self, f: &[f64]) -> [Vec<f64>; 3] {
        let (n, h) = (self.grid.n(), self.grid.spacing());
        [0, 1, 2].map(|axis| {
            let mut out = vec![0.0; f.len()];
            diff(f, n, h, axis, &mut out);
            out
        })
    }

    /// Reference-adapted gradient `r D(f/r) − a f`.
    pub fn adapted_gradient(&self, f: &[f64], r: &Reference) -> [Vec<f64>; 3] {
        let ratio: Vec<f64> = f.iter().zip(&r.values).map(|(a, b)| a / b).collect();
        let mut g = self.gradient(&ratio);
        for d in 0..3 {
            for p in 0..f.len() {
                g[d][p] = r.values[p] * g[d][p] - r.drift[d][p] * f[p];
            }
        }
        g
    }

    /// Discrete divergence `−Σ_i D_i^T J_i`.
    pub fn divergence(&self, j: &[Vec<f64>; 3]) -> Vec<f64> {
        let (n, h) = (self.grid.n(), self.grid.spacing());
        let mut out = vec![0.0; self.grid.len()];
        for (axis, ji) in j.iter().enumerate() {
            diff_transpose_add(ji, n, h, axis, &mut out);
        }
        for x in out.iter_mut() {
            *x = -*x;
        }
        out
    }

    /// Removes the collision-invariant content of `q` along `span{ψ_l μ}`.
    pub fn correct(&self, q: &mut [f64]) {
        let d = Vector5::from(self.invariants.project(q, &self.grid));
        let c = self.gram_inv * d;
        for (l, phi) in self.correction_basis.iter().enumerate() {
            for (x, b) in q.iter_mut().zip(phi) {
                *x -= c[l] * b;
            }
        }
    }

    /// Uncorrected `Q(F_1, F_2)` with gradients adapted to `r`.
    pub fn collision_q_raw(&self, f1: &[f64], f2: &[f64], r: &Reference) -> Result<Vec<f64>> {
        self.check(f1)?;
        self.check(f2)?;
        self.check(&r.values)?;
        let g1 = self.adapted_gradient(f1, r);
        let g2 = self.adapted_gradient(f2, r);
        let inputs: Vec<&[f64]> = vec![f1, &g1[0], &g1[1], &g1[2]];
        let mut outs = matrix_terms(0);
        outs.extend(vector_terms(1));
        let conv = self.convolve(&inputs, &outs);
        let len = self.grid.len();
        let flux = [0, 1, 2].map(|i| {
            let mut ji = vec![0.0; len];
            for p in 0..len {
                let mut acc = -conv[6 + i][p] * f2[p];
                for j in 0..3 {
                    acc += conv[pair_index(i, j)][p] * g2[j][p];
                }
                ji[p] = acc;
            }
            ji
        });
        Ok(self.divergence(&flux))
    }

    /// Conservation-corrected `Q(F_1, F_2)`.
    pub fn collision_q_with(&self, f1: &[f64], f2: &[f64], r: &Reference) -> Result<Vec<f64>> {
        let mut q = self.collision_q_raw(f1, f2, r)?;
        self.correct(&mut q);
        Ok(q)
    }

    /// Conservation-corrected `Q(F_1, F_2)` with gradients adapted to `μ`.
    pub fn collision_q(&self, f1: &[f64], f2: &[f64]) -> Result<Vec<f64>> {
        self.collision_q_with(f1, f2, &self.mu_reference)
    }

    /// `σ = W ∗ g` for a density `g`, six entries per node.
    pub fn sigma_of(&self, g: &[f64]) -> [Vec<f64>; 6] {
        let out = self.convolve(&[g], &matrix_terms(0));
        let mut it = out.into_iter();
        [0; 6].map(|_| it.next().expect("six entries"))
    }

    /// `Q(h, M) + Q(M, h)` through the general bilinear path.
    pub fn linearized_general(&self, h: &[f64], m: &[f64], r: &Reference) -> Result<Vec<f64>> {
        let mut a = self.collision_q_raw(h, m, r)?;
        let b = self.collision_q_raw(m, h, r)?;
        for (x, y) in a.iter_mut().zip(&b) {
            *x += y;
        }
        self.correct(&mut a);
        Ok(a)
    }

    /// Linearization about the Maxwellian of `r`.
    pub fn linearized(&self, r: &Reference) -> Result<LinearizedOperator<'_>> {
        LinearizedOperator::new(self, r.clone())
    }

    /// `L_M h` for the Maxwellian with parameters `state`.
    pub fn linearized_lm(&self, h: &[f64], state: &MaxwellState) -> Result<Vec<f64>> {
        let r = Reference::new(*state, &self.grid)?;
        Ok(self.linearized(&r)?.apply(h))
    }

    fn over_sqrt_mu(&self, q: Vec<f64>) -> Vec<f64> {
        q.into_iter().zip(&self.mu).map(|(a, m)| a / m.sqrt()).collect()
    }

    fn times_sqrt_mu(&self, f: &[f64]) -> Vec<f64> {
        f.iter().zip(&self.mu).map(|(a, m)| a * m.sqrt()).collect()
    }

    /// `Γ(h, g) = μ^{-1/2} Q(√μ h, √μ g)`.
    pub fn gamma(&self, h: &[f64], g: &[f64]) -> Result<Vec<f64>> {
        let q = self.collision_q(&self.times_sqrt_mu(h), &self.times_sqrt_mu(g))?;
        Ok(self.over_sqrt_mu(q))
    }

    /// `𝓛h = Γ(h, √μ) + Γ(√μ, h)`.
    pub fn script_l(&self, h: &[f64]) -> Result<Vec<f64>> {
        let sqrt_mu: Vec<f64> = self.mu.iter().map(|m| m.sqrt()).collect();
        let mut a = self.gamma(h, &sqrt_mu)?;
        let b = self.gamma(&sqrt_mu, h)?;
        for (x, y) in a.iter_mut().zip(&b) {
            *x += y;
        }
        Ok(a)
    }

    /// The collision frequency `σ = Φ ∗ μ`.
    pub fn sigma_field(&self) -> SigmaField {
        SigmaField {
            entries: self.sigma_of(&self.mu),
        }
    }
}

/// `L_M` for a fixed Maxwellian, with `Φ ∗ M` cached:
/// `L_M h = −Dᵀ{ M [ (Φ∗M) Dφ − Φ∗(M Dφ) ] }`, `φ = h/M`.
#[derive(Debug, Clone)]
pub struct LinearizedOperator<'a> {
    op: &'a CollisionOperator,
    reference: Reference,
    sigma: [Vec<f64>; 6],
}

impl<'a> LinearizedOperator<'a> {
    pub fn new(op: &'a CollisionOperator, reference: Reference) -> Result<Self> {
        op.check(&reference.values)?;
        if let Some(p) = reference.values.iter().position(|&m| !(m > 0.0)) {
            return Err(LandauError::Domain(format!(
                "Maxwellian must be strictly positive, got {} at node {p}",
                reference.values[p]
            )));
        }
        let sigma = op.sigma_of(&reference.values);
        Ok(Self {
            op,
            reference,
            sigma,
        })
    }

    pub fn reference(&self) -> &Reference {
        &self.reference
    }

    pub fn operator(&self) -> &CollisionOperator {
        self.op
    }

    pub fn apply(&self, h: &[f64]) -> Vec<f64> {
        let m = &self.reference.values;
        let phi: Vec<f64> = h.iter().zip(m).map(|(a, b)| a / b).collect();
        let dphi = self.op.gradient(&phi);
        let y: [Vec<f64>; 3] =
            [0, 1, 2].map(|d| dphi[d].iter().zip(m).map(|(a, b)| a * b).collect());
        let inputs: Vec<&[f64]> = vec![&y[0], &y[1], &y[2]];
        let c = self.op.convolve(&inputs, &vector_terms(0));
        let len = h.len();
        let flux = [0, 1, 2].map(|i| {
            let mut ji = vec![0.0; len];
            for p in 0..len {
                let mut acc = -c[i][p];
                for j in 0..3 {
                    acc += self.sigma[pair_index(i, j)][p] * dphi[j][p];
                }
                ji[p] = m[p] * acc;
            }
            ji
        });
        let mut out = self.op.divergence(&flux);
        self.op.correct(&mut out);
        out
    }
}

/// `σ^{ij}(v)` on the lattice.
#[derive(Debug, Clone)]
pub struct SigmaField {
    pub entries: [Vec<f64>; 6],
}

impl SigmaField {
    pub fn at(&self, p: usize) -> [[f64; 3]; 3] {
        let mut m = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = self.entries[pair_index(i, j)][p];
            }
        }
        m
    }

    pub fn len(&self) -> usize {
        self.entries[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries[0].is_empty()
    }

    /// Eigenvalues at node `p`, ascending.
    pub fn eigenvalues(&self, p: usize) -> [f64; 3] {
        let m = nalgebra::Matrix3::from_fn(|i, j| self.at(p)[i][j]);
        let mut e: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        e.sort_by(|a, b| a.total_cmp(b));
        [e[0], e[1], e[2]]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        (0..self.len())
            .map(|p| self.eigenvalues(p)[2])
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Nodes where the Cholesky factorization fails.
    pub fn non_positive_nodes(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&p| {
                nalgebra::Matrix3::from_fn(|i, j| self.at(p)[i][j])
                    .cholesky()
                    .is_none()
            })
            .collect()
    }
}
