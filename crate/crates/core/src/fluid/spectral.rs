use rustfft::num_complex::Complex64;

use crate::fft::FftNd;
use crate::phase_space::SpatialGrid;

/// Fourier-spectral calculus on a periodic spatial grid.
#[derive(Debug, Clone)]
pub struct Spectral {
    grid: SpatialGrid,
    plan: FftNd,
    k: [Vec<f64>; 3],
}

impl Spectral {
    pub fn new(grid: &SpatialGrid) -> Self {
        let shape = grid.shape();
        let n = grid.n();
        let k = [0, 1, 2].map(|d| {
            (0..shape[d])
                .map(|j| if shape[d] == 1 || 2 * j == n { 0.0 } else { grid.mode(j) })
                .collect()
        });
        Self {
            grid: *grid,
            plan: FftNd::new(shape),
            k,
        }
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    fn shape(&self) -> [usize; 3] {
        self.grid.shape()
    }

    pub fn forward(&self, f: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = f.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.plan.forward(&mut buf);
        buf
    }

    pub fn inverse_real(&self, mut buf: Vec<Complex64>) -> Vec<f64> {
        self.plan.inverse(&mut buf);
        buf.into_iter().map(|z| z.re).collect()
    }

    /// Wavevector of flat spectral index `q` (Nyquist components set to zero).
    pub fn wavevector(&self, q: usize) -> [f64; 3] {
        let s = self.shape();
        let i = q / (s[1] * s[2]);
        let j = (q / s[2]) % s[1];
        let l = q % s[2];
        [self.k[0][i], self.k[1][j], self.k[2][l]]
    }

    /// Wavevector including Nyquist components (used for phase shifts and norms).
    pub fn full_wavevector(&self, q: usize) -> [f64; 3] {
        let s = self.shape();
        let idx = [q / (s[1] * s[2]), (q / s[2]) % s[1], q % s[2]];
        [0, 1, 2].map(|d| if s[d] == 1 { 0.0 } else { self.grid.mode(idx[d]) })
    }

    /// `∂^α f` with `α = orders`.
    pub fn derivative_multi(&self, f: &[f64], orders: [u32; 3]) -> Vec<f64> {
        if orders == [0, 0, 0] {
            return f.to_vec();
        }
        let mut buf = self.forward(f);
        for (q, z) in buf.iter_mut().enumerate() {
            let k = self.wavevector(q);
            let mut factor = Complex64::new(1.0, 0.0);
            for d in 0..3 {
                for _ in 0..orders[d] {
                    factor *= Complex64::new(0.0, k[d]);
                }
            }
            *z *= factor;
        }
        self.inverse_real(buf)
    }

    pub fn derivative(&self, f: &[f64], axis: usize) -> Vec<f64> {
        let mut o = [0; 3];
        o[axis] = 1;
        self.derivative_multi(f, o)
    }

    /// All three partial derivatives (zero along absent axes).
    pub fn gradient(&self, f: &[f64]) -> [Vec<f64>; 3] {
        let active = self.grid.dim();
        [0, 1, 2].map(|d| {
            if d < 3 && (active == 3 || d == 0) {
                self.derivative(f, d)
            } else {
                vec![0.0; f.len()]
            }
        })
    }

    /// `f(x − c t)` for a constant velocity `c`, by exact phase shift.
    ///
    /// The Nyquist component is advanced with `cos(k c t)` so the output stays real.
    pub fn shift(&self, f: &[f64], c: [f64; 3], t: f64) -> Vec<f64> {
        let mut buf = self.forward(f);
        self.shift_spectrum(&mut buf, c, t);
        self.inverse_real(buf)
    }

    pub fn shift_spectrum(&self, buf: &mut [Complex64], c: [f64; 3], t: f64) {
        let s = self.shape();
        let n = self.grid.n();
        for (q, z) in buf.iter_mut().enumerate() {
            let idx = [q / (s[1] * s[2]), (q / s[2]) % s[1], q % s[2]];
            let k = self.full_wavevector(q);
            let phase = -(k[0] * c[0] + k[1] * c[1] + k[2] * c[2]) * t;
            let nyquist = (0..3).any(|d| s[d] > 1 && 2 * idx[d] == n);
            if nyquist {
                *z *= phase.cos();
            } else {
                *z *= Complex64::from_polar(1.0, phase);
            }
        }
    }

    /// `‖f‖_{H^s}` with the multiplier `(1 + |k|²)^s`.
    pub fn hs_norm_sq(&self, f: &[f64], s: f64) -> f64 {
        let buf = self.forward(f);
        let len = f.len() as f64;
        let vol = self.grid.volume();
        buf.iter()
            .enumerate()
            .map(|(q, z)| {
                let k = self.full_wavevector(q);
                let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
                (1.0 + k2).powf(s) * z.norm_sqr()
            })
            .sum::<f64>()
            * vol
            / (len * len)
    }
}
