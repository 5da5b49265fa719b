//! Multi-dimensional complex FFTs built from batched 1-D transforms and axis rotations.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Plans for an FFT over a row-major array of shape `[a, b, c]`.
#[derive(Clone)]
pub struct FftNd {
    shape: [usize; 3],
    forward: [Arc<dyn Fft<f64>>; 3],
    inverse: [Arc<dyn Fft<f64>>; 3],
}

impl std::fmt::Debug for FftNd {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FftNd").field("shape", &self.shape).finish()
    }
}

impl FftNd {
    pub fn new(shape: [usize; 3]) -> Self {
        let mut planner = FftPlanner::new();
        let forward = shape.map(|n| planner.plan_fft_forward(n));
        let inverse = shape.map(|n| planner.plan_fft_inverse(n));
        Self {
            shape,
            forward,
            inverse,
        }
    }

    pub fn shape(&self) -> [usize; 3] {
        self.shape
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Unnormalized forward transform in place.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.run(data, &self.forward);
    }

    /// Inverse transform in place, normalized by the number of points.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.run(data, &self.inverse);
        let scale = 1.0 / self.len() as f64;
        for z in data.iter_mut() {
            *z *= scale;
        }
    }

    fn run(&self, data: &mut [Complex64], plans: &[Arc<dyn Fft<f64>>; 3]) {
        assert_eq!(data.len(), self.len());
        let [a, b, c] = self.shape;
        let mut scratch = vec![Complex64::default(); data.len()];
        // Each pass transforms the contiguous last axis and then rotates
        // (x, y, z) -> (z, x, y); three passes restore the original layout.
        let mut dims = [a, b, c];
        let mut order = [0usize, 1, 2];
        for _ in 0..3 {
            let last = dims[2];
            if last > 1 {
                plans[order[2]].process(data);
            }
            rotate(data, &mut scratch, dims);
            data.copy_from_slice(&scratch);
            dims = [dims[2], dims[0], dims[1]];
            order = [order[2], order[0], order[1]];
        }
    }
}

/// Writes `out[z][x][y] = data[x][y][z]`.
fn rotate(data: &[Complex64], out: &mut [Complex64], [a, b, c]: [usize; 3]) {
    let rows = a * b;
    if c == 1 || rows == 1 {
        out.copy_from_slice(data);
        return;
    }
    const TILE: usize = 16;
    for r0 in (0..rows).step_by(TILE) {
        let r1 = (r0 + TILE).min(rows);
        for z0 in (0..c).step_by(TILE) {
            let z1 = (z0 + TILE).min(c);
            for r in r0..r1 {
                for z in z0..z1 {
                    out[z * rows + r] = data[r * c + z];
                }
            }
        }
    }
}

/// Smallest integer `>= n` whose prime factors are all in {2, 3, 5, 7}.
pub fn smooth_size(n: usize) -> usize {
    let mut m = n.max(1);
    loop {
        let mut r = m;
        for p in [2, 3, 5, 7] {
            while r.is_multiple_of(p) {
                r /= p;
            }
        }
        if r == 1 {
            return m;
        }
        m += 1;
    }
}
