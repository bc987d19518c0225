//! Gauss-Newton refinement with an SVD pseudoinverse and a rank-based
//! regularity test.

use serde::Serialize;

use crate::error::{check_len, check_tol, Error, Result};
use crate::linalg::{least_squares_with, norm2, svd, vec_sub, CMatrix, RankInfo, C64};
use crate::linalg::lstsq::rank_of_values;
use crate::polysys::PolySystem;

/// Anything that can be evaluated together with its Jacobian at a point.
pub trait Evaluator: Sync {
    fn nvars(&self) -> usize;
    fn neqs(&self) -> usize;
    fn values(&self, x: &[C64]) -> Result<Vec<C64>>;
    fn jacobian_at(&self, x: &[C64]) -> Result<CMatrix>;

    /// Both at once; implementors may share work between the two.
    fn values_and_jacobian(&self, x: &[C64]) -> Result<(Vec<C64>, CMatrix)> {
        Ok((self.values(x)?, self.jacobian_at(x)?))
    }
}

impl Evaluator for PolySystem {
    fn nvars(&self) -> usize {
        PolySystem::nvars(self)
    }

    fn neqs(&self) -> usize {
        PolySystem::neqs(self)
    }

    fn values(&self, x: &[C64]) -> Result<Vec<C64>> {
        self.evaluate(x)
    }

    fn jacobian_at(&self, x: &[C64]) -> Result<CMatrix> {
        self.jacobian().evaluate(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NewtonOptions {
    pub max_iterations: usize,
    pub residual_tol: f64,
    pub step_tol: f64,
    pub rank_tol: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            max_iterations: 50,
            residual_tol: 1e-12,
            step_tol: 1e-14,
            rank_tol: crate::linalg::DEFAULT_RANK_TOL,
        }
    }
}

impl NewtonOptions {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::InvalidOption("max_iterations must be at least 1".into()));
        }
        check_tol(self.residual_tol)?;
        check_tol(self.step_tol)?;
        check_tol(self.rank_tol)
    }
}

/// One iterate: the point, its residual, the correction computed there, and
/// the numerical rank of the Jacobian used for that correction.
#[derive(Debug, Clone, PartialEq)]
pub struct NewtonRecord {
    pub point: Vec<C64>,
    pub residual: f64,
    pub step: f64,
    pub rank: usize,
    pub inverse_condition: f64,
    /// Smallest singular value counted in the rank; infinite at rank 0.
    pub smallest_kept: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct NewtonTrace {
    pub records: Vec<NewtonRecord>,
}

impl NewtonTrace {
    pub fn last(&self) -> Option<&NewtonRecord> {
        self.records.last()
    }

    pub fn steps(&self) -> impl Iterator<Item = f64> + '_ {
        self.records.iter().map(|r| r.step)
    }

    /// Ratios of consecutive step norms, skipping pairs whose steps are at
    /// or below `floor`.
    pub fn step_ratios(&self, floor: f64) -> Vec<f64> {
        self.records
            .windows(2)
            .filter(|w| w[0].step > floor && w[1].step > floor)
            .map(|w| w[1].step / w[0].step)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RefineStatus {
    ConvergedRegular,
    StalledSingular,
    MaxIterations,
}

#[derive(Debug, Clone)]
pub struct Refinement {
    pub point: Vec<C64>,
    pub status: RefineStatus,
    pub trace: NewtonTrace,
}

impl Refinement {
    pub fn final_record(&self) -> &NewtonRecord {
        self.trace.last().expect("refine records at least one iterate")
    }
}

pub fn is_regular(info: &RankInfo, ncols: usize) -> bool {
    info.rank == ncols
}

/// Iterates needed to judge the convergence rate, and the step reduction
/// per iterate below which convergence counts as merely linear.
const STALL_WINDOW: usize = 3;
const STALL_RATIO: f64 = 0.25;

/// Largest shrink of the smallest kept singular value over the window for
/// the rank to count as settled.
const KEPT_DECAY: f64 = 0.5;

/// Largest pending correction, relative to the point, at a converged
/// regular root. Quadratic convergence overshoots this by far; a point that
/// only meets the residual test because the system is flat there does not.
const CONVERGED_STEP: f64 = 1e-8;

/// Steps this small relative to the point are rounding noise.
const NOISE_STEP: f64 = 1e-12;

fn check_system<E: Evaluator + ?Sized>(sys: &E, x: &[C64], f: &[C64], a: &CMatrix) -> Result<()> {
    check_len(sys.nvars(), x.len())?;
    check_len(sys.neqs(), f.len())?;
    check_len(sys.neqs(), a.rows())?;
    check_len(sys.nvars(), a.cols())
}

fn correction<E: Evaluator + ?Sized>(
    sys: &E,
    x: &[C64],
    rank_tol: f64,
) -> Result<(Vec<C64>, f64, RankInfo, f64)> {
    let (f, a) = sys.values_and_jacobian(x)?;
    check_system(sys, x, &f, &a)?;
    let residual = norm2(&f);
    if !residual.is_finite() || !a.is_finite() {
        let info = RankInfo {
            rank: 0,
            tol: rank_tol,
            threshold: f64::NAN,
            inverse_condition: f64::NAN,
        };
        return Ok((vec![C64::new(f64::NAN, 0.0); x.len()], f64::INFINITY, info, f64::NAN));
    }
    let s = svd(&a)?;
    let info = rank_of_values(&s.sigma, rank_tol);
    let dx = least_squares_with(&s, &f, rank_tol)?;
    let kept = match info.rank {
        0 => f64::INFINITY,
        r => s.sigma[r - 1],
    };
    Ok((dx, residual, info, kept))
}

/// One Gauss-Newton step `x - A(x)^+ F(x)`, with the rank of `A(x)`.
pub fn newton_step<E: Evaluator + ?Sized>(
    sys: &E,
    x: &[C64],
    rank_tol: f64,
) -> Result<(Vec<C64>, RankInfo)> {
    check_tol(rank_tol)?;
    let (dx, _, info, _) = correction(sys, x, rank_tol)?;
    Ok((vec_sub(x, &dx), info))
}

/// True when each of the last `STALL_WINDOW` step reductions was weaker
/// than `STALL_RATIO`.
fn linear_regime(records: &[NewtonRecord]) -> bool {
    if records.len() < STALL_WINDOW + 1 {
        return false;
    }
    let tail = &records[records.len() - STALL_WINDOW - 1..];
    tail.windows(2).all(|w| {
        let floor = NOISE_STEP * norm2(&w[1].point).max(1.0);
        w[0].step > floor && w[1].step > floor && w[1].step >= STALL_RATIO * w[0].step
    })
}

/// Same rank over the window while the smallest kept singular value
/// shrinks by more than `KEPT_DECAY`, or faster than the square root of the
/// step reduction: a cluster still collapsing toward the discarded ones.
/// At a settled rank it stays put while the steps shrink.
fn kept_collapsing(records: &[NewtonRecord]) -> bool {
    if records.len() < STALL_WINDOW {
        return false;
    }
    let tail = &records[records.len() - STALL_WINDOW..];
    let (first, last) = (&tail[0], &tail[STALL_WINDOW - 1]);
    if last.rank == 0 || !tail.windows(2).all(|w| w[0].rank == w[1].rank) {
        return false;
    }
    let shrink = last.smallest_kept / first.smallest_kept;
    let steps = last.step / first.step;
    shrink < KEPT_DECAY || (steps < 1.0 && shrink < steps.sqrt())
}

fn rank_settled(records: &[NewtonRecord]) -> bool {
    records.len() >= STALL_WINDOW
        && records[records.len() - STALL_WINDOW..]
            .windows(2)
            .all(|w| w[0].rank == w[1].rank)
        && !kept_collapsing(records)
}

/// Runs Gauss-Newton from `x0`.
///
/// Stops with `ConvergedRegular` once the residual is below tolerance at a
/// point of full column rank, the pending correction is below
/// `CONVERGED_STEP` relative to the point, and neither the steps nor the
/// smallest singular value shrink only linearly. Stops with
/// `StalledSingular` once the Jacobian is rank deficient and the steps
/// either drop to rounding level or shrink linearly at a settled rank.
/// Otherwise runs `max_iterations` steps or stops on a non-finite residual.
pub fn refine<E: Evaluator + ?Sized>(
    sys: &E,
    x0: &[C64],
    opts: &NewtonOptions,
) -> Result<Refinement> {
    opts.validate()?;
    check_len(sys.nvars(), x0.len())?;
    let ncols = sys.nvars();
    let mut x = x0.to_vec();
    let mut trace = NewtonTrace::default();
    let mut status = RefineStatus::MaxIterations;
    for iteration in 0..=opts.max_iterations {
        let (dx, residual, info, smallest_kept) = correction(sys, &x, opts.rank_tol)?;
        let step = norm2(&dx);
        trace.records.push(NewtonRecord {
            point: x.clone(),
            residual,
            step,
            rank: info.rank,
            inverse_condition: info.inverse_condition,
            smallest_kept,
        });
        if !residual.is_finite() || !step.is_finite() {
            break;
        }
        if is_regular(&info, ncols) {
            let pending = CONVERGED_STEP * norm2(&x).max(1.0);
            if residual <= opts.residual_tol
                && step <= pending
                && !linear_regime(&trace.records)
                && !kept_collapsing(&trace.records)
            {
                status = RefineStatus::ConvergedRegular;
                break;
            }
        } else if step <= opts.step_tol.max(NOISE_STEP * norm2(&x).max(1.0))
            || (linear_regime(&trace.records) && rank_settled(&trace.records))
        {
            status = RefineStatus::StalledSingular;
            break;
        }
        if iteration == opts.max_iterations {
            break;
        }
        x = vec_sub(&x, &dx);
    }
    Ok(Refinement {
        point: x,
        status,
        trace,
    })
}

/// Decimal digits of agreement with `x_ref`: relative error when
/// `‖x_ref‖ ≥ 1`, absolute otherwise; clamped to `[0, 16]`.
pub fn correct_digits(x: &[C64], x_ref: &[C64]) -> Result<f64> {
    check_len(x_ref.len(), x.len())?;
    let err = norm2(&vec_sub(x, x_ref)) / norm2(x_ref).max(1.0);
    Ok((-err.max(1e-300).log10()).clamp(0.0, 16.0))
}
