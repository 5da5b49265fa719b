//! Finite differences along one axis of the velocity lattice.
//!
//! Interior nodes use the 4th-order centered stencil; the outermost two layers on
//! each side use 2nd-order one-sided stencils. `diff_transpose` applies the
//! matrix transpose, so `-diff_transpose` is the discrete divergence adjoint to
//! `diff` under the uniform lattice inner product.

/// `out = D_axis f` on an `n^3` lattice with spacing `h`.
pub fn diff(f: &[f64], n: usize, h: f64, axis: usize, out: &mut [f64]) {
    let stride = stride(n, axis);
    for_each_line(n, axis, |base| {
        line_diff(&f[base..], stride, n, h, &mut out[base..]);
    });
}

/// `out = D_axis^T f`.
pub fn diff_transpose(f: &[f64], n: usize, h: f64, axis: usize, out: &mut [f64]) {
    let stride = stride(n, axis);
    for_each_line(n, axis, |base| {
        line_diff_transpose(&f[base..], stride, n, h, &mut out[base..]);
    });
}

/// Adds `D_axis^T f` into `out`.
pub fn diff_transpose_add(f: &[f64], n: usize, h: f64, axis: usize, out: &mut [f64]) {
    let mut tmp = vec![0.0; f.len()];
    diff_transpose(f, n, h, axis, &mut tmp);
    for (o, t) in out.iter_mut().zip(&tmp) {
        *o += t;
    }
}

fn stride(n: usize, axis: usize) -> usize {
    match axis {
        0 => n * n,
        1 => n,
        _ => 1,
    }
}

fn for_each_line(n: usize, axis: usize, mut f: impl FnMut(usize)) {
    for a in 0..n {
        for b in 0..n {
            let base = match axis {
                0 => a * n + b,
                1 => a * n * n + b,
                _ => (a * n + b) * n,
            };
            f(base);
        }
    }
}

/// Row `i` of the difference matrix as `(first column, coefficients)`.
fn row(i: usize, n: usize) -> (usize, [f64; 5], usize) {
    const C4: [f64; 5] = [1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0];
    const FWD: [f64; 5] = [-1.5, 2.0, -0.5, 0.0, 0.0];
    const BWD: [f64; 5] = [0.5, -2.0, 1.5, 0.0, 0.0];
    if i < 2 {
        (i, FWD, 3)
    } else if i + 2 >= n {
        (i - 2, BWD, 3)
    } else {
        (i - 2, C4, 5)
    }
}

fn line_diff(f: &[f64], s: usize, n: usize, h: f64, out: &mut [f64]) {
    let inv = 1.0 / h;
    for i in 0..n {
        let (c0, coef, m) = row(i, n);
        let mut acc = 0.0;
        for t in 0..m {
            acc += coef[t] * f[(c0 + t) * s];
        }
        out[i * s] = acc * inv;
    }
}

fn line_diff_transpose(f: &[f64], s: usize, n: usize, h: f64, out: &mut [f64]) {
    let inv = 1.0 / h;
    for i in 0..n {
        out[i * s] = 0.0;
    }
    for i in 0..n {
        let (c0, coef, m) = row(i, n);
        let fi = f[i * s] * inv;
        for t in 0..m {
            out[(c0 + t) * s] += coef[t] * fi;
        }
    }
}
