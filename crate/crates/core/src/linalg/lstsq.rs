use num_complex::Complex64 as C64;
use serde::Serialize;

use super::{svd, CMatrix, SvdResult};
use crate::error::{check_len, check_tol, Error, Result};

/// Separation required between the last kept and first discarded singular
/// value when both are small.
pub const RANK_GAP: f64 = 10.0;

/// Numerical rank of a matrix together with its inverse condition estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RankInfo {
    pub rank: usize,
    /// Relative tolerance passed in.
    pub tol: f64,
    /// Absolute cutoff actually applied to the singular values.
    pub threshold: f64,
    /// Smallest over largest singular value, with the largest floored at 1.
    pub inverse_condition: f64,
}

impl RankInfo {
    pub fn corank(&self, cols: usize) -> usize {
        cols.saturating_sub(self.rank)
    }
}

/// Counts singular values above `tol * max(sigma_1, 1)`.
///
/// The floor at 1 makes the test absolute for matrices of small norm, so a
/// Jacobian that vanishes uniformly at a root (all singular values shrinking
/// together) is still reported as rank deficient. For `sigma_1 >= 1` this
/// is the ordinary relative test.
///
/// Near a singular root the vanishing singular values shrink together and
/// cross the cutoff one at a time. A kept value that is itself small (below
/// `sqrt(tol)` on the same scale) and less than [`RANK_GAP`] times the first
/// discarded one is counted with the discarded cluster.
pub fn numerical_rank(s: &SvdResult, tol: f64) -> RankInfo {
    rank_of_values(&s.sigma, tol)
}

pub(crate) fn rank_of_values(sigma: &[f64], tol: f64) -> RankInfo {
    let top = sigma.first().copied().unwrap_or(0.0);
    let scale = top.max(1.0);
    let threshold = tol * scale;
    let mut rank = sigma.iter().filter(|&&s| s > threshold).count();
    if rank < sigma.len() {
        let small = tol.sqrt() * scale;
        while rank > 0 && sigma[rank - 1] <= small && sigma[rank - 1] < RANK_GAP * sigma[rank] {
            rank -= 1;
        }
    }
    let inverse_condition = if top == 0.0 {
        0.0
    } else {
        sigma.last().copied().unwrap_or(0.0) / scale
    };
    RankInfo {
        rank,
        tol,
        threshold,
        inverse_condition,
    }
}

/// Minimum-norm least-squares solution of `A x = b` by truncated SVD.
/// Singular values at or below `tol * sigma_1` are discarded.
pub fn least_squares(a: &CMatrix, b: &[C64], tol: f64) -> Result<Vec<C64>> {
    check_len(a.rows(), b.len())?;
    check_tol(tol)?;
    let s = svd(a)?;
    least_squares_with(&s, b, tol)
}

/// Same as [`least_squares`] with a precomputed decomposition.
pub fn least_squares_with(s: &SvdResult, b: &[C64], tol: f64) -> Result<Vec<C64>> {
    check_len(s.rows, b.len())?;
    let top = s.sigma.first().copied().unwrap_or(0.0);
    let cutoff = tol * top;
    let mut x = vec![C64::new(0.0, 0.0); s.cols];
    for (i, &sigma) in s.sigma.iter().enumerate() {
        if sigma <= cutoff || sigma == 0.0 {
            break;
        }
        let mut coef = C64::new(0.0, 0.0);
        for (r, br) in b.iter().enumerate() {
            coef += s.u[(r, i)].conj() * br;
        }
        let coef = coef / sigma;
        for (j, xj) in x.iter_mut().enumerate() {
            *xj += s.v[(j, i)] * coef;
        }
    }
    Ok(x)
}

/// Right singular vector at column `rank` of `V`: the first direction
/// beyond the numerical range.
pub fn kernel_vector(s: &SvdResult, rank: usize) -> Result<Vec<C64>> {
    if rank >= s.cols {
        return Err(Error::FullColumnRank {
            rank,
            cols: s.cols,
        });
    }
    Ok(s.v.column(rank))
}
