use crate::phase_space::VelocityGrid;

/// Index pairs of the six independent entries of a symmetric 3×3 matrix.
pub const PAIRS: [(usize, usize); 6] = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];

/// Position of `(i, j)` in [`PAIRS`].
pub fn pair_index(i: usize, j: usize) -> usize {
    let (a, b) = if i <= j { (i, j) } else { (j, i) };
    match (a, b) {
        (0, 0) => 0,
        (0, 1) => 1,
        (0, 2) => 2,
        (1, 1) => 3,
        (1, 2) => 4,
        _ => 5,
    }
}

/// Lattice constant of the simple cubic lattice: the limit of
/// `h³ Σ_{j≠0} 1/|jh| − ∫ 1/|x| dx` per unit `h²` over a large cube, with sign flipped.
pub const LATTICE_SELF_CELL: f64 = 2.837_297_479_480_6;

/// The Coulomb matrix `Φ(ξ) = (I − ξ⊗ξ/|ξ|²)/|ξ|`, with `Φ(0) = 0`.
pub fn coulomb(xi: [f64; 3]) -> [f64; 6] {
    let r2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
    if r2 == 0.0 {
        return [0.0; 6];
    }
    let r = r2.sqrt();
    let mut out = [0.0; 6];
    for (slot, &(i, j)) in out.iter_mut().zip(PAIRS.iter()) {
        let delta = if i == j { 1.0 } else { 0.0 };
        *slot = (delta - xi[i] * xi[j] / r2) / r;
    }
    out
}

/// `Φ(v_i − v_j)` for every lattice offset in `[−(n−1), n−1]³`.
#[derive(Debug, Clone)]
pub struct KernelTable {
    n: usize,
    h: f64,
    entries: Vec<[f64; 6]>,
}

impl KernelTable {
    pub fn new(grid: &VelocityGrid) -> Self {
        let n = grid.n();
        let h = grid.spacing();
        let m = 2 * n - 1;
        let off = (n - 1) as isize;
        let mut entries = Vec::with_capacity(m * m * m);
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    let xi = [a, b, c].map(|t| (t as isize - off) as f64 * h);
                    entries.push(coulomb(xi));
                }
            }
        }
        Self { n, h, entries }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    /// `Φ` at the offset `(a, b, c)` in lattice units.
    pub fn get(&self, a: isize, b: isize, c: isize) -> [f64; 6] {
        let m = 2 * self.n - 1;
        let off = self.n as isize - 1;
        let idx = (((a + off) as usize * m) + (b + off) as usize) * m + (c + off) as usize;
        self.entries[idx]
    }

    /// Quadrature weight applied at zero offset: the corrected trapezoid rule
    /// for the `1/|ξ|` singularity, `(2/3) C h²` times the identity.
    pub fn self_weight(&self) -> f64 {
        2.0 / 3.0 * LATTICE_SELF_CELL * self.h * self.h
    }

    /// Convolution weight `h³ Φ(ξ)` (or the singular-cell weight at `ξ = 0`).
    pub fn weight(&self, a: isize, b: isize, c: isize) -> [f64; 6] {
        if a == 0 && b == 0 && c == 0 {
            let s = self.self_weight();
            return [s, 0.0, 0.0, s, 0.0, s];
        }
        let h3 = self.h.powi(3);
        self.get(a, b, c).map(|x| h3 * x)
    }
}

/// Builds the kernel table for a velocity lattice.
pub fn build_kernel_table(grid: &VelocityGrid) -> KernelTable {
    KernelTable::new(grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_space::build_velocity_grid;

    #[test]
    fn unit_offsets() {
        assert_eq!(coulomb([1.0, 0.0, 0.0]), [0.0, 0.0, 0.0, 1.0, 0.0, 1.0]);
        assert_eq!(coulomb([0.0, 0.0, 2.0]), [0.5, 0.0, 0.0, 0.5, 0.0, 0.0]);
        assert_eq!(coulomb([0.0; 3]), [0.0; 6]);
    }

    #[test]
    fn table_is_even_and_annihilates_offsets() {
        let g = build_velocity_grid(2.0, 5).unwrap();
        let t = build_kernel_table(&g);
        for (a, b, c) in [(1, 2, -3), (4, 0, 1), (-2, -2, 2)] {
            assert_eq!(t.get(a, b, c), t.get(-a, -b, -c));
            let xi = [a as f64, b as f64, c as f64];
            let p = t.get(a, b, c);
            for i in 0..3 {
                let s: f64 = (0..3).map(|j| p[pair_index(i, j)] * xi[j]).sum();
                assert!(s.abs() < 1e-15);
            }
        }
        assert_eq!(t.get(0, 0, 0), [0.0; 6]);
    }
}
