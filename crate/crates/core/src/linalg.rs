//! Small dense and tridiagonal kernels.
//!
//! Symmetric tridiagonal matrices are passed as a diagonal slice of length `n`
//! and an off-diagonal slice of length `n - 1`, `off[i]` coupling rows `i` and
//! `i + 1`.

use alloc::vec;
use alloc::vec::Vec;

use crate::math;
use crate::{Error, Result};

const MAX_QL_SWEEPS: usize = 60;

/// Eigenvalues of a symmetric tridiagonal matrix by the implicit QL method,
/// sorted ascending.
pub fn tridiagonal_eigenvalues(diag: &[f64], off: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    check_shape(n, off.len())?;
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..n.saturating_sub(1)].copy_from_slice(off);

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = math::abs(d[m]) + math::abs(d[m + 1]);
                if math::abs(e[m]) <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_QL_SWEEPS {
                return Err(Error::NoConvergence {
                    index: l,
                    iterations: MAX_QL_SWEEPS,
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = math::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + if g >= 0.0 { r } else { -r });
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = math::hypot(f, g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Pivots of the `LDL^T` factorization of a symmetric tridiagonal matrix.
/// Fails unless every pivot is positive.
pub fn tridiagonal_ldlt(diag: &[f64], off: &[f64]) -> Result<Vec<f64>> {
    check_shape(diag.len(), off.len())?;
    let mut pivots = Vec::with_capacity(diag.len());
    for (i, &a) in diag.iter().enumerate() {
        let p = if i == 0 {
            a
        } else {
            a - off[i - 1] * off[i - 1] / pivots[i - 1]
        };
        if !(p > 0.0) {
            return Err(Error::NotPositiveDefinite { pivot: i, value: p });
        }
        pivots.push(p);
    }
    Ok(pivots)
}

/// Number of eigenvalues of the pencil `(A, B)` strictly below `shift`, for
/// symmetric tridiagonal `A` and symmetric positive definite tridiagonal `B`.
///
/// By Sylvester's law of inertia this is the number of negative pivots of
/// `A - shift * B`.
pub fn pencil_count_below(
    a_diag: &[f64],
    a_off: &[f64],
    b_diag: &[f64],
    b_off: &[f64],
    shift: f64,
) -> usize {
    let n = a_diag.len();
    let mut count = 0;
    let mut prev = 1.0;
    for i in 0..n {
        let d = a_diag[i] - shift * b_diag[i];
        let mut p = if i == 0 {
            d
        } else {
            let o = a_off[i - 1] - shift * b_off[i - 1];
            d - o * o / prev
        };
        if p == 0.0 {
            // Perturb exact zeros below the rounding level of the row.
            p = -f64::EPSILON * (math::abs(d) + f64::MIN_POSITIVE);
        }
        if p < 0.0 {
            count += 1;
        }
        prev = p;
    }
    count
}

/// Solves a symmetric tridiagonal system without pivoting.
pub fn tridiagonal_solve(diag: &[f64], off: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut x = rhs.to_vec();
    let mut denom = diag[0];
    for i in 0..n {
        if i > 0 {
            denom = diag[i] - off[i - 1] * c[i - 1];
            x[i] -= off[i - 1] * x[i - 1];
        }
        if denom == 0.0 {
            denom = f64::EPSILON * (math::abs(diag[i]) + 1.0);
        }
        if i + 1 < n {
            c[i] = off[i] / denom;
        }
        x[i] /= denom;
    }
    for i in (0..n.saturating_sub(1)).rev() {
        x[i] -= c[i] * x[i + 1];
    }
    x
}

/// `y = T x` for a symmetric tridiagonal `T`.
pub fn tridiagonal_apply(diag: &[f64], off: &[f64], x: &[f64]) -> Vec<f64> {
    let n = diag.len();
    (0..n)
        .map(|i| {
            let mut y = diag[i] * x[i];
            if i > 0 {
                y += off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                y += off[i] * x[i + 1];
            }
            y
        })
        .collect()
}

/// Solves `A x = b` for a dense symmetric positive definite `A` stored row-major.
pub fn cholesky_solve(a: &[f64], n: usize, b: &[f64]) -> Result<Vec<f64>> {
    if a.len() != n * n || b.len() != n {
        return Err(Error::InvalidArgument(alloc::format!(
            "cholesky_solve: expected {n}x{n} matrix and length-{n} rhs"
        )));
    }
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if !(s > 0.0) {
                    return Err(Error::NotPositiveDefinite { pivot: i, value: s });
                }
                l[i * n + i] = math::sqrt(s);
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    let mut y = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            y[i] -= l[i * n + k] * y[k];
        }
        y[i] /= l[i * n + i];
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            y[i] -= l[k * n + i] * y[k];
        }
        y[i] /= l[i * n + i];
    }
    Ok(y)
}

fn check_shape(n: usize, off: usize) -> Result<()> {
    if n == 0 || off + 1 != n {
        return Err(Error::InvalidArgument(alloc::format!(
            "tridiagonal shape mismatch: {n} diagonal entries, {off} off-diagonal entries"
        )));
    }
    Ok(())
}
