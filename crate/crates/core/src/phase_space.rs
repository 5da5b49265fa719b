//! Spatial and velocity lattices, phase-space field storage and velocity quadrature.

use crate::error::{LandauError, Result};

/// Truncated uniform velocity lattice covering `[-L_v, L_v]^3`.
///
/// Node `(i, j, k)` sits at flat index `(i * n + j) * n + k` with coordinates
/// `(-L_v + i h, -L_v + j h, -L_v + k h)`.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityGrid {
    extent: f64,
    n: usize,
    h: f64,
    axis: Vec<f64>,
}

impl VelocityGrid {
    pub fn new(extent: f64, n: usize) -> Result<Self> {
        if !(extent > 0.0) || !extent.is_finite() {
            return Err(LandauError::InvalidGrid(format!(
                "velocity extent must be positive, got {extent}"
            )));
        }
        if n.is_multiple_of(2) {
            return Err(LandauError::InvalidGrid(format!(
                "n_v must be odd so that v = 0 is a node, got {n}"
            )));
        }
        if n < 3 {
            return Err(LandauError::InvalidGrid(format!("n_v must be at least 3, got {n}")));
        }
        let h = 2.0 * extent / (n - 1) as f64;
        let c = (n / 2) as isize;
        let axis = (0..n).map(|i| (i as isize - c) as f64 * h).collect();
        Ok(Self { extent, n, h, axis })
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    /// Nodes per axis.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn weight(&self) -> f64 {
        self.h * self.h * self.h
    }

    pub fn axis(&self) -> &[f64] {
        &self.axis
    }

    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.n + j) * self.n + k
    }

    pub fn triple(&self, idx: usize) -> [usize; 3] {
        let n = self.n;
        [idx / (n * n), (idx / n) % n, idx % n]
    }

    pub fn velocity(&self, idx: usize) -> [f64; 3] {
        let [i, j, k] = self.triple(idx);
        [self.axis[i], self.axis[j], self.axis[k]]
    }

    /// Index of the mirrored node `-v`.
    pub fn mirror(&self, idx: usize) -> usize {
        let n = self.n;
        let [i, j, k] = self.triple(idx);
        self.index(n - 1 - i, n - 1 - j, n - 1 - k)
    }

    /// Component arrays `[v_1, v_2, v_3]` over all nodes.
    pub fn components(&self) -> [Vec<f64>; 3] {
        let len = self.len();
        let mut out = [vec![0.0; len], vec![0.0; len], vec![0.0; len]];
        for idx in 0..len {
            let v = self.velocity(idx);
            for d in 0..3 {
                out[d][idx] = v[d];
            }
        }
        out
    }

    /// Evaluates `f(v)` at every node.
    pub fn sample(&self, f: impl Fn([f64; 3]) -> f64) -> Vec<f64> {
        (0..self.len()).map(|idx| f(self.velocity(idx))).collect()
    }

    /// Unchecked quadrature `Σ h³ g_j`.
    ///
    /// Mirror nodes `v` and `−v` are added first, so odd fields integrate to exactly zero.
    pub fn quad(&self, g: &[f64]) -> f64 {
        let len = g.len();
        let folded: Vec<f64> = (0..len / 2)
            .map(|p| g[p] + g[len - 1 - p])
            .chain(std::iter::once(g[len / 2]))
            .collect();
        self.weight() * pairwise_sum(&folded)
    }

    /// Quadrature of the product `Σ h³ a_j b_j`.
    pub fn dot(&self, a: &[f64], b: &[f64]) -> f64 {
        let prod: Vec<f64> = a.iter().zip(b).map(|(x, y)| x * y).collect();
        self.quad(&prod)
    }

    /// Quadrature of `a_j b_j / w_j`.
    pub fn dot_weighted(&self, a: &[f64], b: &[f64], w: &[f64]) -> f64 {
        let prod: Vec<f64> = a
            .iter()
            .zip(b)
            .zip(w)
            .map(|((x, y), z)| x * y / z)
            .collect();
        self.quad(&prod)
    }

    pub fn norm(&self, a: &[f64]) -> f64 {
        self.dot(a, a).sqrt()
    }
}

/// Builds the velocity lattice; `n_v` must be odd.
pub fn build_velocity_grid(extent: f64, n: usize) -> Result<VelocityGrid> {
    VelocityGrid::new(extent, n)
}

/// Deterministic pairwise tree summation.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const BLOCK: usize = 32;
    if xs.len() <= BLOCK {
        return xs.iter().fold(0.0, |acc, &x| acc + x);
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Quadrature `Σ h³ g(v_j)` with a finiteness check.
pub fn integrate_v(g: &[f64], grid: &VelocityGrid) -> Result<f64> {
    if g.len() != grid.len() {
        return Err(LandauError::GridMismatch(format!(
            "field has {} entries, grid has {} nodes",
            g.len(),
            grid.len()
        )));
    }
    if let Some(node) = g.iter().position(|x| !x.is_finite()) {
        return Err(LandauError::NonFinite {
            node,
            velocity: grid.velocity(node),
        });
    }
    Ok(grid.quad(g))
}

/// Uniform periodic grid in one or three dimensions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialGrid {
    dim: usize,
    n: usize,
    period: f64,
}

impl SpatialGrid {
    pub fn new(dim: usize, n: usize, period: f64) -> Result<Self> {
        if dim != 1 && dim != 3 {
            return Err(LandauError::InvalidGrid(format!(
                "spatial dimension must be 1 or 3, got {dim}"
            )));
        }
        if n < 4 || !n.is_multiple_of(2) {
            return Err(LandauError::InvalidGrid(format!(
                "n_x must be even and at least 4, got {n}"
            )));
        }
        if !(period > 0.0) || !period.is_finite() {
            return Err(LandauError::InvalidGrid(format!(
                "period must be positive, got {period}"
            )));
        }
        Ok(Self { dim, n, period })
    }

    /// `n` nodes on a `2π`-periodic line.
    pub fn line(n: usize) -> Result<Self> {
        Self::new(1, n, 2.0 * std::f64::consts::PI)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn spacing(&self) -> f64 {
        self.period / self.n as f64
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Array shape padded to three axes (unused axes have length 1).
    pub fn shape(&self) -> [usize; 3] {
        if self.dim == 1 {
            [self.n, 1, 1]
        } else {
            [self.n; 3]
        }
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    pub fn volume(&self) -> f64 {
        self.period.powi(self.dim as i32)
    }

    pub fn position(&self, idx: usize) -> [f64; 3] {
        let h = self.spacing();
        let s = self.shape();
        let i = idx / (s[1] * s[2]);
        let j = (idx / s[2]) % s[1];
        let k = idx % s[2];
        [i as f64 * h, j as f64 * h, k as f64 * h]
    }

    pub fn sample(&self, f: impl Fn([f64; 3]) -> f64) -> Vec<f64> {
        (0..self.len()).map(|idx| f(self.position(idx))).collect()
    }

    /// Integer wavenumber of FFT bin `j` on an axis with `n` points.
    pub fn mode(&self, j: usize) -> f64 {
        let n = self.n;
        let m = if j <= n / 2 { j as f64 } else { j as f64 - n as f64 };
        m * 2.0 * std::f64::consts::PI / self.period
    }

    /// Quadrature `Σ h_x^d g_k`.
    pub fn quad(&self, g: &[f64]) -> f64 {
        self.cell_volume() * pairwise_sum(g)
    }
}

/// What a phase-space field represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Total,
    Microscopic,
    Perturbation,
    Correction,
    Maxwellian,
    Fluid,
}

impl Role {
    pub fn tag(&self) -> &'static str {
        match self {
            Role::Total => "total",
            Role::Microscopic => "microscopic",
            Role::Perturbation => "perturbation",
            Role::Correction => "correction",
            Role::Maxwellian => "maxwellian",
            Role::Fluid => "fluid",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        Some(match tag {
            "total" => Role::Total,
            "microscopic" => Role::Microscopic,
            "perturbation" => Role::Perturbation,
            "correction" => Role::Correction,
            "maxwellian" => Role::Maxwellian,
            "fluid" => Role::Fluid,
            _ => return None,
        })
    }
}

/// Values `F(x_k, v_j)` stored x-major: the velocity block of x-node `k`
/// occupies `values[k * n_v^3 .. (k + 1) * n_v^3]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionField {
    pub space: SpatialGrid,
    pub velocity: VelocityGrid,
    pub role: Role,
    pub time: f64,
    pub values: Vec<f64>,
}

impl DistributionField {
    pub fn zeros(space: SpatialGrid, velocity: VelocityGrid, role: Role) -> Self {
        let len = space.len() * velocity.len();
        Self {
            space,
            velocity,
            role,
            time: 0.0,
            values: vec![0.0; len],
        }
    }

    pub fn from_nodes(
        space: SpatialGrid,
        velocity: VelocityGrid,
        role: Role,
        f: impl Fn(usize) -> Vec<f64>,
    ) -> Self {
        let mut field = Self::zeros(space, velocity, role);
        let nv = field.velocity.len();
        for (k, block) in field.values.chunks_mut(nv).enumerate() {
            block.copy_from_slice(&f(k));
        }
        field
    }

    pub fn node(&self, k: usize) -> &[f64] {
        let nv = self.velocity.len();
        &self.values[k * nv..(k + 1) * nv]
    }

    pub fn node_mut(&mut self, k: usize) -> &mut [f64] {
        let nv = self.velocity.len();
        &mut self.values[k * nv..(k + 1) * nv]
    }

    pub fn nodes(&self) -> std::slice::Chunks<'_, f64> {
        self.values.chunks(self.velocity.len())
    }

    pub fn same_grids(&self, other: &Self) -> bool {
        self.space == other.space && self.velocity == other.velocity
    }

    /// Position of the first non-finite value as `(x_node, v_node)`.
    pub fn first_non_finite(&self) -> Option<(usize, usize)> {
        let nv = self.velocity.len();
        self.values
            .iter()
            .position(|x| !x.is_finite())
            .map(|p| (p / nv, p % nv))
    }

    /// Smallest value and its `(x_node, v_node)`, plus the largest value.
    pub fn extremes(&self) -> (f64, (usize, usize), f64) {
        let nv = self.velocity.len();
        let mut min = f64::INFINITY;
        let mut at = 0;
        let mut max = f64::NEG_INFINITY;
        for (p, &x) in self.values.iter().enumerate() {
            if x < min {
                min = x;
                at = p;
            }
            max = max.max(x);
        }
        (min, (at / nv, at % nv), max)
    }
}
