//! Discrete convolutions `(W ∗ f)(v_i) = Σ_j W(v_i − v_j) f(v_j)` with the weighted
//! Coulomb kernel, by direct summation and by zero-padded FFT.

use rustfft::num_complex::Complex64;

use super::kernel::{pair_index, KernelTable};
use crate::fft::{smooth_size, FftNd};

/// One output: `Σ_t W_{pair_t} ∗ input_t`.
pub type Term = (usize, usize);

/// FFT engine holding the kernel spectra for one lattice.
#[derive(Debug, Clone)]
pub struct Convolver {
    n: usize,
    p: usize,
    plan: FftNd,
    spectra: [Vec<f64>; 6],
}

impl Convolver {
    pub fn new(table: &KernelTable) -> Self {
        let n = table.n();
        let p = smooth_size(2 * n - 1);
        let plan = FftNd::new([p; 3]);
        let len = p * p * p;
        let lim = n as isize - 1;
        let wrap = |t: isize| -> Option<isize> {
            let q = if t <= lim { t } else { t - p as isize };
            (q >= -lim && q <= lim).then_some(q)
        };
        let mut spectra: [Vec<f64>; 6] = Default::default();
        for (e, spec) in spectra.iter_mut().enumerate() {
            let mut buf = vec![Complex64::default(); len];
            for a in 0..p {
                let Some(qa) = wrap(a as isize) else { continue };
                for b in 0..p {
                    let Some(qb) = wrap(b as isize) else { continue };
                    for c in 0..p {
                        let Some(qc) = wrap(c as isize) else { continue };
                        let w = table.weight(qa, qb, qc);
                        buf[(a * p + b) * p + c] = Complex64::new(w[e], 0.0);
                    }
                }
            }
            plan.forward(&mut buf);
            *spec = buf.iter().map(|z| z.re).collect();
        }
        Self { n, p, plan, spectra }
    }

    fn embed(&self, re: &[f64], im: Option<&[f64]>) -> Vec<Complex64> {
        let (n, p) = (self.n, self.p);
        let mut buf = vec![Complex64::default(); p * p * p];
        for i in 0..n {
            for j in 0..n {
                let src = (i * n + j) * n;
                let dst = (i * p + j) * p;
                for k in 0..n {
                    let y = im.map_or(0.0, |x| x[src + k]);
                    buf[dst + k] = Complex64::new(re[src + k], y);
                }
            }
        }
        self.plan.forward(&mut buf);
        buf
    }

    /// Spectra of the real inputs, transformed two at a time.
    fn spectra_of(&self, inputs: &[&[f64]]) -> Vec<Vec<Complex64>> {
        let p = self.p;
        let mut out = Vec::with_capacity(inputs.len());
        for chunk in inputs.chunks(2) {
            if chunk.len() == 1 {
                out.push(self.embed(chunk[0], None));
                continue;
            }
            let z = self.embed(chunk[0], Some(chunk[1]));
            let len = z.len();
            let mut x = vec![Complex64::default(); len];
            let mut y = vec![Complex64::default(); len];
            let neg = |t: usize| if t == 0 { 0 } else { p - t };
            for a in 0..p {
                for b in 0..p {
                    for c in 0..p {
                        let k = (a * p + b) * p + c;
                        let mk = (neg(a) * p + neg(b)) * p + neg(c);
                        let zc = z[mk].conj();
                        x[k] = (z[k] + zc) * 0.5;
                        y[k] = (z[k] - zc) * Complex64::new(0.0, -0.5);
                    }
                }
            }
            out.push(x);
            out.push(y);
        }
        out
    }

    /// Evaluates each output `Σ_t W_{e_t} ∗ inputs[s_t]` where the terms are `(e_t, s_t)`.
    pub fn apply(&self, inputs: &[&[f64]], outputs: &[Vec<Term>]) -> Vec<Vec<f64>> {
        let spec = self.spectra_of(inputs);
        let (n, p) = (self.n, self.p);
        let len = p * p * p;
        let mut result = Vec::with_capacity(outputs.len());
        for pair in outputs.chunks(2) {
            let mut buf = vec![Complex64::default(); len];
            for (slot, terms) in pair.iter().enumerate() {
                let unit = if slot == 0 {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 1.0)
                };
                for &(e, s) in terms {
                    let k = &self.spectra[e];
                    let x = &spec[s];
                    for q in 0..len {
                        buf[q] += unit * x[q] * k[q];
                    }
                }
            }
            self.plan.inverse(&mut buf);
            for slot in 0..pair.len() {
                let mut out = vec![0.0; n * n * n];
                for i in 0..n {
                    for j in 0..n {
                        let src = (i * p + j) * p;
                        let dst = (i * n + j) * n;
                        for k in 0..n {
                            let z = buf[src + k];
                            out[dst + k] = if slot == 0 { z.re } else { z.im };
                        }
                    }
                }
                result.push(out);
            }
        }
        result
    }
}

/// Direct evaluation of the same outputs as [`Convolver::apply`].
pub fn apply_direct(table: &KernelTable, inputs: &[&[f64]], outputs: &[Vec<Term>]) -> Vec<Vec<f64>> {
    let n = table.n();
    let len = n * n * n;
    let idx3 = |p: usize| [(p / (n * n)) as isize, ((p / n) % n) as isize, (p % n) as isize];
    outputs
        .iter()
        .map(|terms| {
            (0..len)
                .map(|p| {
                    let a = idx3(p);
                    let mut acc = 0.0;
                    for q in 0..len {
                        let b = idx3(q);
                        let w = table.weight(a[0] - b[0], a[1] - b[1], a[2] - b[2]);
                        for &(e, s) in terms {
                            acc += w[e] * inputs[s][q];
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// Terms for the six entries of `W ∗ f` with `f` at input slot `s`.
pub fn matrix_terms(s: usize) -> Vec<Vec<Term>> {
    (0..6).map(|e| vec![(e, s)]).collect()
}

/// Terms for `(W ∗ g)_i = Σ_j W_ij ∗ g_j` with `g_j` at input slot `first + j`.
pub fn vector_terms(first: usize) -> Vec<Vec<Term>> {
    (0..3)
        .map(|i| (0..3).map(|j| (pair_index(i, j), first + j)).collect())
        .collect()
}
