//! Independent solves and evaluations over many points. With the `parallel`
//! feature the work is spread over the rayon thread pool; results are in
//! input order either way.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::deflate::{deflate_loop, DeflateOptions, DeflationOutcome};
use crate::error::Result;
use crate::linalg::{CMatrix, C64};
use crate::newton::Evaluator;
use crate::polysys::PolySystem;

/// Options for the `index`-th start point: the seed is offset by the index.
pub fn options_for(opts: &DeflateOptions, index: usize) -> DeflateOptions {
    DeflateOptions {
        seed: opts.seed.wrapping_add(index as u64),
        ..*opts
    }
}

pub fn solve_batch_sequential(
    f: &PolySystem,
    points: &[Vec<C64>],
    opts: &DeflateOptions,
) -> Vec<Result<DeflationOutcome>> {
    points
        .iter()
        .enumerate()
        .map(|(i, p)| deflate_loop(f, p, &options_for(opts, i)))
        .collect()
}

/// Runs the deflation loop from every start point.
pub fn solve_batch(
    f: &PolySystem,
    points: &[Vec<C64>],
    opts: &DeflateOptions,
) -> Vec<Result<DeflationOutcome>> {
    #[cfg(feature = "parallel")]
    {
        points
            .par_iter()
            .enumerate()
            .map(|(i, p)| deflate_loop(f, p, &options_for(opts, i)))
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        solve_batch_sequential(f, points, opts)
    }
}

pub fn evaluate_batch_sequential<E: Evaluator + ?Sized>(
    sys: &E,
    points: &[Vec<C64>],
) -> Result<Vec<(Vec<C64>, CMatrix)>> {
    points.iter().map(|p| sys.values_and_jacobian(p)).collect()
}

/// Values and Jacobians at every point.
pub fn evaluate_batch<E: Evaluator + ?Sized>(
    sys: &E,
    points: &[Vec<C64>],
) -> Result<Vec<(Vec<C64>, CMatrix)>> {
    #[cfg(feature = "parallel")]
    {
        points.par_iter().map(|p| sys.values_and_jacobian(p)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        evaluate_batch_sequential(sys, points)
    }
}
