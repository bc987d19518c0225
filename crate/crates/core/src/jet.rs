//! Truncated multilinear jets: elements of `C[e_1..e_m] / (e_i^2)`, stored as
//! `2^m` coefficients indexed by subset bitmask. Used to carry mixed
//! directional derivatives through polynomial evaluation.

use num_complex::Complex64 as C64;

#[inline]
pub(crate) fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

/// `out = a * b`. All three slices share the same width.
#[inline]
pub(crate) fn mul_into(a: &[C64], b: &[C64], out: &mut [C64]) {
    match a.len() {
        1 => out[0] = a[0] * b[0],
        2 => {
            out[0] = a[0] * b[0];
            out[1] = a[0] * b[1] + a[1] * b[0];
        }
        w => {
            for s in 0..w {
                let mut acc = a[s] * b[0];
                // proper submasks t of s, t != s
                let mut t = s;
                while t != 0 {
                    t = (t - 1) & s;
                    acc += a[t] * b[s ^ t];
                }
                out[s] = acc;
            }
        }
    }
}

/// Lifts jets of width `w` into width `2w`: `y + e_new * v`.
pub(crate) fn lift(values: &[C64], direction: &[C64], w: usize) -> Vec<C64> {
    debug_assert_eq!(values.len(), direction.len());
    let count = values.len() / w;
    let mut out = vec![zero(); count * 2 * w];
    for i in 0..count {
        out[i * 2 * w..i * 2 * w + w].copy_from_slice(&values[i * w..(i + 1) * w]);
        out[i * 2 * w + w..(i + 1) * 2 * w].copy_from_slice(&direction[i * w..(i + 1) * w]);
    }
    out
}

/// Splits jets of width `2w` into the parts free of and linear in the newest
/// infinitesimal.
pub(crate) fn split(values: &[C64], w: usize) -> (Vec<C64>, Vec<C64>) {
    let count = values.len() / (2 * w);
    let mut base = Vec::with_capacity(count * w);
    let mut tangent = Vec::with_capacity(count * w);
    for i in 0..count {
        base.extend_from_slice(&values[i * 2 * w..i * 2 * w + w]);
        tangent.extend_from_slice(&values[i * 2 * w + w..(i + 1) * 2 * w]);
    }
    (base, tangent)
}
