//! Golub-Kahan SVD: Householder bidiagonalization with real-making complex
//! reflectors, followed by implicit-shift QR sweeps on the real bidiagonal.

use num_complex::Complex64 as C64;

use super::{norm2, CMatrix};
use crate::error::{Error, Result};

/// Sweeps allowed per singular value before giving up.
const SWEEPS_PER_VALUE: usize = 75;

/// Full singular value decomposition `A = U · diag(sigma) · V^H`.
#[derive(Debug, Clone)]
pub struct SvdResult {
    /// Unitary, `rows × rows`.
    pub u: CMatrix,
    /// Nonincreasing, nonnegative, length `min(rows, cols)`.
    pub sigma: Vec<f64>,
    /// Unitary, `cols × cols`.
    pub v: CMatrix,
    pub rows: usize,
    pub cols: usize,
}

impl SvdResult {
    /// Rebuilds `U · diag(sigma) · V^H`.
    pub fn reconstruct(&self) -> CMatrix {
        let mut us = CMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for (j, s) in self.sigma.iter().enumerate() {
                us[(i, j)] = self.u[(i, j)] * *s;
            }
        }
        us.matmul(&self.v.conj_transpose()).expect("shapes agree")
    }
}

/// Computes the full SVD of `a`.
pub fn svd(a: &CMatrix) -> Result<SvdResult> {
    let (rows, cols) = (a.rows(), a.cols());
    if rows == 0 || cols == 0 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: 0,
        });
    }
    if rows >= cols {
        let (u, sigma, v) = decompose(a.clone(), true)?;
        Ok(SvdResult {
            u: u.expect("vectors requested"),
            sigma,
            v: v.expect("vectors requested"),
            rows,
            cols,
        })
    } else {
        // A^H = U' S V'^H  =>  A = V' S U'^H
        let (u, sigma, v) = decompose(a.conj_transpose(), true)?;
        Ok(SvdResult {
            u: v.expect("vectors requested"),
            sigma,
            v: u.expect("vectors requested"),
            rows,
            cols,
        })
    }
}

/// Singular values only, skipping the accumulation of `U` and `V`.
pub fn singular_values(a: &CMatrix) -> Result<Vec<f64>> {
    if a.rows() == 0 || a.cols() == 0 {
        return Ok(Vec::new());
    }
    let a = if a.rows() >= a.cols() {
        a.clone()
    } else {
        a.conj_transpose()
    };
    decompose(a, false).map(|(_, s, _)| s)
}

/// Generates `H = I - tau v v^H` with `v[0] = 1` such that
/// `H^H (alpha, x) = (beta, 0)` and `beta` is real. `x` is overwritten with
/// the tail of `v`.
fn reflector(alpha: C64, x: &mut [C64]) -> (f64, C64) {
    let xnorm = norm2(x);
    if xnorm == 0.0 && alpha.im == 0.0 {
        return (alpha.re, C64::new(0.0, 0.0));
    }
    let beta = -alpha.re.hypot(alpha.im).hypot(xnorm).copysign(alpha.re);
    let tau = C64::new((beta - alpha.re) / beta, -alpha.im / beta);
    let scale = C64::new(1.0, 0.0) / (alpha - beta);
    for xi in x.iter_mut() {
        *xi *= scale;
    }
    (beta, tau)
}

type Decomposition = (Option<CMatrix>, Vec<f64>, Option<CMatrix>);

/// Requires `a.rows() >= a.cols()`.
fn decompose(mut a: CMatrix, vectors: bool) -> Result<Decomposition> {
    let m = a.rows();
    let n = a.cols();
    debug_assert!(m >= n);
    let mut u = vectors.then(|| CMatrix::identity(m));
    let mut v = vectors.then(|| CMatrix::identity(n));

    let mut diag = vec![0.0; n];
    let mut sup = vec![0.0; n];
    let zero = C64::new(0.0, 0.0);
    let mut hv: Vec<C64> = Vec::with_capacity(m);

    for k in 0..n {
        // Left reflector on column k, rows k..m.
        hv.clear();
        hv.push(C64::new(1.0, 0.0));
        hv.extend((k + 1..m).map(|i| a[(i, k)]));
        let (beta, tau) = reflector(a[(k, k)], &mut hv[1..]);
        diag[k] = beta;
        a[(k, k)] = C64::new(beta, 0.0);
        for i in k + 1..m {
            a[(i, k)] = zero;
        }
        if tau != zero {
            let ctau = tau.conj();
            for j in k + 1..n {
                let mut w = zero;
                for (off, vi) in hv.iter().enumerate() {
                    w += vi.conj() * a[(k + off, j)];
                }
                let w = ctau * w;
                for (off, vi) in hv.iter().enumerate() {
                    a[(k + off, j)] -= vi * w;
                }
            }
            if let Some(u) = u.as_mut() {
                for i in 0..m {
                    let mut w = zero;
                    for (off, vi) in hv.iter().enumerate() {
                        w += u[(i, k + off)] * vi;
                    }
                    let w = tau * w;
                    for (off, vi) in hv.iter().enumerate() {
                        u[(i, k + off)] -= w * vi.conj();
                    }
                }
            }
        }

        // Right reflector on row k, columns k+1..n.
        if k + 1 < n {
            hv.clear();
            hv.push(C64::new(1.0, 0.0));
            hv.extend((k + 2..n).map(|j| a[(k, j)].conj()));
            let (beta, tau) = reflector(a[(k, k + 1)].conj(), &mut hv[1..]);
            sup[k + 1] = beta;
            a[(k, k + 1)] = C64::new(beta, 0.0);
            for j in k + 2..n {
                a[(k, j)] = zero;
            }
            if tau != zero {
                for i in k + 1..m {
                    let mut w = zero;
                    for (off, vj) in hv.iter().enumerate() {
                        w += a[(i, k + 1 + off)] * vj;
                    }
                    let w = tau * w;
                    for (off, vj) in hv.iter().enumerate() {
                        a[(i, k + 1 + off)] -= w * vj.conj();
                    }
                }
                if let Some(v) = v.as_mut() {
                    for i in 0..n {
                        let mut w = zero;
                        for (off, vj) in hv.iter().enumerate() {
                            w += v[(i, k + 1 + off)] * vj;
                        }
                        let w = tau * w;
                        for (off, vj) in hv.iter().enumerate() {
                            v[(i, k + 1 + off)] -= w * vj.conj();
                        }
                    }
                }
            }
        }
    }

    diagonalize(&mut diag, &mut sup, u.as_mut(), v.as_mut())?;

    // Sort nonincreasing, permuting vectors alongside.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| diag[j].total_cmp(&diag[i]));
    let sigma: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let u = u.map(|u| permute_columns(&u, &order));
    let v = v.map(|v| permute_columns(&v, &order));
    Ok((u, sigma, v))
}

fn permute_columns(m: &CMatrix, order: &[usize]) -> CMatrix {
    let mut out = m.clone();
    for (dst, &src) in order.iter().enumerate() {
        for i in 0..m.rows() {
            out[(i, dst)] = m[(i, src)];
        }
    }
    out
}

#[inline]
fn rotate_columns(m: &mut CMatrix, p: usize, q: usize, c: f64, s: f64) {
    for r in 0..m.rows() {
        let y = m[(r, p)];
        let z = m[(r, q)];
        m[(r, p)] = y * c + z * s;
        m[(r, q)] = z * c - y * s;
    }
}

/// Implicit-shift QR on the real upper bidiagonal with diagonal `w` and
/// superdiagonal `e` (`e[i]` couples `w[i-1]` and `w[i]`, `e[0] = 0`).
/// Rotations are applied to the first `n` columns of `u` and to `v`.
fn diagonalize(
    w: &mut [f64],
    e: &mut [f64],
    mut u: Option<&mut CMatrix>,
    mut v: Option<&mut CMatrix>,
) -> Result<()> {
    let n = w.len();
    e[0] = 0.0;
    let anorm = w
        .iter()
        .zip(e.iter())
        .fold(0.0_f64, |acc, (a, b)| acc.max(a.abs() + b.abs()));
    let cap = SWEEPS_PER_VALUE * n;
    let mut sweeps = 0;
    let negligible = |x: f64| x.abs() + anorm == anorm;

    for k in (0..n).rev() {
        loop {
            let mut cancel = true;
            let mut l = k;
            loop {
                if negligible(e[l]) {
                    cancel = false;
                    break;
                }
                if negligible(w[l - 1]) {
                    break;
                }
                l -= 1;
            }
            if cancel {
                // w[l-1] is negligible: chase e[l] out with left rotations.
                let nm = l - 1;
                let (mut c, mut s) = (0.0, 1.0);
                for i in l..=k {
                    let f = s * e[i];
                    e[i] *= c;
                    if negligible(f) {
                        break;
                    }
                    let g = w[i];
                    let h = f.hypot(g);
                    w[i] = h;
                    c = g / h;
                    s = -f / h;
                    if let Some(u) = u.as_deref_mut() {
                        rotate_columns(u, nm, i, c, s);
                    }
                }
            }
            let z = w[k];
            if l == k {
                if z < 0.0 {
                    w[k] = -z;
                    if let Some(v) = v.as_deref_mut() {
                        for r in 0..v.rows() {
                            v[(r, k)] = -v[(r, k)];
                        }
                    }
                }
                break;
            }
            sweeps += 1;
            if sweeps > cap {
                return Err(Error::SvdNoConvergence(cap));
            }

            // Wilkinson-style shift from the trailing 2x2 block.
            let nm = k - 1;
            let mut x = w[l];
            let y0 = w[nm];
            let g0 = e[nm];
            let h0 = e[k];
            let mut f = ((y0 - z) * (y0 + z) + (g0 - h0) * (g0 + h0)) / (2.0 * h0 * y0);
            let g1 = f.hypot(1.0);
            f = ((x - z) * (x + z) + h0 * ((y0 / (f + g1.copysign(f))) - h0)) / x;

            let (mut c, mut s) = (1.0, 1.0);
            for j in l..=nm {
                let i = j + 1;
                let mut g = e[i];
                let mut y = w[i];
                let mut h = s * g;
                g *= c;
                let mut zz = f.hypot(h);
                e[j] = zz;
                c = f / zz;
                s = h / zz;
                f = x * c + g * s;
                g = g * c - x * s;
                h = y * s;
                y *= c;
                if let Some(v) = v.as_deref_mut() {
                    rotate_columns(v, j, i, c, s);
                }
                zz = f.hypot(h);
                w[j] = zz;
                if zz != 0.0 {
                    c = f / zz;
                    s = h / zz;
                }
                f = c * g + s * y;
                x = c * y - s * g;
                if let Some(u) = u.as_deref_mut() {
                    rotate_columns(u, j, i, c, s);
                }
            }
            e[l] = 0.0;
            e[k] = f;
            w[k] = x;
        }
    }
    Ok(())
}
