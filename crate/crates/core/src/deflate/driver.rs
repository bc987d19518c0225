use serde::Serialize;

use super::stage::{DeflationRng, DeflationStage};
use super::system::DeflatedSystem;
use crate::error::{check_len, check_tol, Error, Result};
use crate::linalg::{least_squares, numerical_rank, svd, CMatrix, RankInfo, C64};
use crate::newton::{refine, Evaluator, NewtonOptions, Refinement, RefineStatus};
use crate::polysys::PolySystem;

pub const DEFAULT_SEED: u64 = 0x5EED;
pub const DEFAULT_MAX_DEFLATIONS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeflateOptions {
    pub newton: NewtonOptions,
    pub max_deflations: usize,
    pub seed: u64,
}

impl Default for DeflateOptions {
    fn default() -> Self {
        Self {
            newton: NewtonOptions::default(),
            max_deflations: DEFAULT_MAX_DEFLATIONS,
            seed: DEFAULT_SEED,
        }
    }
}

/// Result of a single deflation: the extended system and the lifted point
/// `(x0, lambda0)`.
#[derive(Debug, Clone)]
pub struct Deflation {
    pub system: DeflatedSystem,
    pub point: Vec<C64>,
    pub multipliers: Vec<C64>,
    /// Rank of the Jacobian at `x0` before the new stage.
    pub rank: RankInfo,
}

/// Deflates at `x0` using the numerical rank of the Jacobian there.
pub fn deflate_once(
    sys: &DeflatedSystem,
    x0: &[C64],
    rank_tol: f64,
    rng: &mut DeflationRng,
) -> Result<Deflation> {
    check_tol(rank_tol)?;
    let a = sys.jacobian_at(x0)?;
    let info = numerical_rank(&svd(&a)?, rank_tol);
    if info.rank >= a.cols() {
        return Err(Error::FullColumnRank {
            rank: info.rank,
            cols: a.cols(),
        });
    }
    deflate_with_rank(sys, x0, info, rank_tol, rng)
}

/// Deflates at `x0` with a prescribed rank, which must be below the column
/// count. `lambda0` solves `A(x0) B lambda = 0`, `<h, lambda> = 1` in the
/// least-squares sense.
pub fn deflate_with_rank(
    sys: &DeflatedSystem,
    x0: &[C64],
    rank: RankInfo,
    rank_tol: f64,
    rng: &mut DeflationRng,
) -> Result<Deflation> {
    check_len(sys.nvars(), x0.len())?;
    let (n, big_n) = (sys.nvars(), sys.neqs());
    if rank.rank >= n {
        return Err(Error::FullColumnRank { rank: rank.rank, cols: n });
    }
    let a = sys.jacobian_at(x0)?;
    let stage = DeflationStage::random(rng, rank.rank, n, big_n);
    let m = stage.multipliers();

    let ab = a.matmul(&stage.b)?;
    let mut stacked = CMatrix::zeros(big_n + 1, m);
    for i in 0..big_n {
        for l in 0..m {
            stacked[(i, l)] = ab[(i, l)];
        }
    }
    for (l, &h) in stage.h.iter().enumerate() {
        stacked[(big_n, l)] = h;
    }
    let mut rhs = vec![C64::new(0.0, 0.0); big_n + 1];
    rhs[big_n] = C64::new(1.0, 0.0);
    let multipliers = least_squares(&stacked, &rhs, rank_tol)?;

    let system = sys.with_stage(stage)?;
    let mut point = x0.to_vec();
    point.extend_from_slice(&multipliers);
    Ok(Deflation {
        system,
        point,
        multipliers,
        rank,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeflationReport {
    pub rank: usize,
    pub corank_before: usize,
    pub corank_after: usize,
    pub inverse_condition_before: f64,
    pub inverse_condition_after: f64,
    #[serde(skip)]
    pub multipliers: Vec<C64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LoopStatus {
    ConvergedRegular,
    StageCapReached,
    Diverged,
}

#[derive(Debug, Clone)]
pub struct DeflationOutcome {
    pub system: DeflatedSystem,
    /// Final point in the coordinates of the last stage.
    pub point: Vec<C64>,
    pub status: LoopStatus,
    /// Corank at the end of each refinement, one more entry than stages.
    pub coranks: Vec<usize>,
    pub stages: Vec<DeflationReport>,
    pub refinements: Vec<Refinement>,
}

impl DeflationOutcome {
    pub fn deflations(&self) -> usize {
        self.system.depth()
    }

    /// Final point in the original coordinates.
    pub fn base_point(&self) -> &[C64] {
        &self.point[..self.system.base().nvars()]
    }

    pub fn final_residual(&self) -> f64 {
        self.last_refinement().final_record().residual
    }

    pub fn final_inverse_condition(&self) -> f64 {
        self.last_refinement().final_record().inverse_condition
    }

    pub fn first_refinement(&self) -> &Refinement {
        &self.refinements[0]
    }

    pub fn last_refinement(&self) -> &Refinement {
        self.refinements.last().expect("at least one refinement")
    }
}

/// Alternates Gauss-Newton and deflation until the Jacobian at the limit
/// has full column rank, the stage cap is reached, or the iteration
/// diverges.
pub fn deflate_loop(f: &PolySystem, x0: &[C64], opts: &DeflateOptions) -> Result<DeflationOutcome> {
    opts.newton.validate()?;
    check_len(f.nvars(), x0.len())?;
    let mut rng = DeflationRng::new(opts.seed);
    let mut system = DeflatedSystem::new(f.clone());
    let mut z = x0.to_vec();
    let mut coranks = Vec::new();
    let mut stages: Vec<DeflationReport> = Vec::new();
    let mut refinements = Vec::new();
    let status = loop {
        let run = refine(&system, &z, &opts.newton)?;
        let last = run.final_record().clone();
        let corank = system.nvars() - last.rank;
        coranks.push(corank);
        if let Some(prev) = stages.last_mut() {
            prev.corank_after = corank;
            prev.inverse_condition_after = last.inverse_condition;
        }
        z = run.point.clone();
        let finished = run.status;
        refinements.push(run);
        match finished {
            RefineStatus::ConvergedRegular => break LoopStatus::ConvergedRegular,
            RefineStatus::MaxIterations if corank == 0 || !last.residual.is_finite() => {
                break LoopStatus::Diverged
            }
            _ => {}
        }
        if system.depth() >= opts.max_deflations {
            break LoopStatus::StageCapReached;
        }
        let step = deflate_once(&system, &z, opts.newton.rank_tol, &mut rng)?;
        stages.push(DeflationReport {
            rank: step.rank.rank,
            corank_before: corank,
            corank_after: corank,
            inverse_condition_before: last.inverse_condition,
            inverse_condition_after: last.inverse_condition,
            multipliers: step.multipliers,
        });
        system = step.system;
        z = step.point;
    };
    Ok(DeflationOutcome {
        system,
        point: z,
        status,
        coranks,
        stages,
        refinements,
    })
}
