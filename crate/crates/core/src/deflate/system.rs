use super::stage::DeflationStage;
use crate::error::{check_len, Error, Result};
use crate::jet;
use crate::linalg::{CMatrix, C64};
use crate::newton::Evaluator;
use crate::polysys::PolySystem;

/// A base system with a stack of deflation stages.
///
/// Stage `k` acts on the coordinates `z = (y, lambda)` where `y` are the
/// coordinates of stage `k - 1`. Values and Jacobians are computed from the
/// numeric Jacobian of the previous stage; the expanded polynomials are
/// never formed.
#[derive(Debug, Clone)]
pub struct DeflatedSystem {
    base: PolySystem,
    stages: Vec<DeflationStage>,
}

impl DeflatedSystem {
    pub fn new(base: PolySystem) -> Self {
        Self {
            base,
            stages: Vec::new(),
        }
    }

    pub fn base(&self) -> &PolySystem {
        &self.base
    }

    pub fn stages(&self) -> &[DeflationStage] {
        &self.stages
    }

    pub fn depth(&self) -> usize {
        self.stages.len()
    }

    /// Variable count after the first `k` stages.
    pub fn nvars_at(&self, k: usize) -> usize {
        match k {
            0 => self.base.nvars(),
            _ => self.stages[k - 1].nvars(),
        }
    }

    /// Equation count after the first `k` stages.
    pub fn neqs_at(&self, k: usize) -> usize {
        match k {
            0 => self.base.neqs(),
            _ => self.stages[k - 1].neqs(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars_at(self.depth())
    }

    pub fn neqs(&self) -> usize {
        self.neqs_at(self.depth())
    }

    /// Appends a stage built for the current sizes.
    pub fn with_stage(&self, stage: DeflationStage) -> Result<Self> {
        check_len(self.nvars(), stage.nvars_prev)?;
        check_len(self.neqs(), stage.neqs_prev)?;
        check_len(stage.nvars_prev, stage.b.rows())?;
        check_len(stage.multipliers(), stage.b.cols())?;
        check_len(stage.multipliers(), stage.h.len())?;
        if stage.rank >= stage.nvars_prev {
            return Err(Error::FullColumnRank {
                rank: stage.rank,
                cols: stage.nvars_prev,
            });
        }
        let mut out = self.clone();
        out.stages.push(stage);
        Ok(out)
    }

    /// The system made of the first `k` stages.
    pub fn truncated(&self, k: usize) -> Self {
        Self {
            base: self.base.clone(),
            stages: self.stages[..k].to_vec(),
        }
    }

    /// Multiplier block of each stage within a full point.
    pub fn multipliers<'a>(&self, z: &'a [C64]) -> Vec<&'a [C64]> {
        self.stages
            .iter()
            .map(|s| &z[s.nvars_prev..s.nvars()])
            .collect()
    }

    /// Jacobian of stage `k` at jets of width `w` (`nvars_at(k) * w`
    /// entries), as row-major jets.
    fn jacobian_jet(&self, k: usize, z: &[C64], w: usize) -> Vec<C64> {
        if k == 0 {
            return self.base.jacobian().evaluate_jet(z, w);
        }
        let st = &self.stages[k - 1];
        let (n0, m, n1, rows0) = (st.nvars_prev, st.multipliers(), st.nvars(), st.neqs_prev);
        let (y, lambda) = z.split_at(n0 * w);

        let mut v = vec![jet::zero(); n0 * w];
        for j in 0..n0 {
            for l in 0..m {
                let b = st.b[(j, l)];
                for c in 0..w {
                    v[j * w + c] += b * lambda[l * w + c];
                }
            }
        }
        // Differentiating the previous Jacobian along v gives the block
        // below it; the part free of the new infinitesimal is the block itself.
        let lifted = jet::lift(y, &v, w);
        let (m0, m1) = jet::split(&self.jacobian_jet(k - 1, &lifted, 2 * w), w);

        let mut out = vec![jet::zero(); st.neqs() * n1 * w];
        let at = |i: usize, j: usize| (i * n1 + j) * w;
        for i in 0..rows0 {
            for j in 0..n0 {
                let src = (i * n0 + j) * w;
                out[at(i, j)..at(i, j) + w].copy_from_slice(&m0[src..src + w]);
                out[at(rows0 + i, j)..at(rows0 + i, j) + w].copy_from_slice(&m1[src..src + w]);
            }
            for l in 0..m {
                let dst = at(rows0 + i, n0 + l);
                for j in 0..n0 {
                    let b = st.b[(j, l)];
                    let src = (i * n0 + j) * w;
                    for c in 0..w {
                        out[dst + c] += m0[src + c] * b;
                    }
                }
            }
        }
        for (l, &h) in st.h.iter().enumerate() {
            out[at(2 * rows0, n0 + l)] = h;
        }
        out
    }

    fn jacobian_of(&self, k: usize, z: &[C64]) -> CMatrix {
        let data = self.jacobian_jet(k, z, 1);
        CMatrix::from_vec(self.neqs_at(k), self.nvars_at(k), data).expect("sized by stage")
    }

    /// Values of stage `k >= 1` given the Jacobian of stage `k - 1` at the
    /// prefix of `z`.
    fn values_with(&self, k: usize, z: &[C64], prev_jac: &CMatrix) -> Vec<C64> {
        let st = &self.stages[k - 1];
        let (y, lambda) = z.split_at(st.nvars_prev);
        let mut out = if k == 1 {
            self.base.evaluate(y).expect("prefix sized by stage")
        } else {
            let inner = prev_jac.block(0, 0, self.neqs_at(k - 2), self.nvars_at(k - 2));
            self.values_with(k - 1, y, &inner)
        };
        out.extend(prev_jac.mul_vec(&st.direction(lambda)).expect("sized by stage"));
        out.push(st.normalization(lambda));
        out
    }

    /// `F^(k)(z)`: the previous system, its Jacobian applied to `B lambda`,
    /// and the normalization of `lambda`.
    pub fn evaluate_deflated(&self, z: &[C64]) -> Result<Vec<C64>> {
        check_len(self.nvars(), z.len())?;
        let k = self.depth();
        if k == 0 {
            return self.base.evaluate(z);
        }
        let prev = self.jacobian_of(k - 1, &z[..self.nvars_at(k - 1)]);
        Ok(self.values_with(k, z, &prev))
    }

    /// `A^(k)(z)`, assembled block by block.
    pub fn jacobian_deflated(&self, z: &[C64]) -> Result<CMatrix> {
        check_len(self.nvars(), z.len())?;
        Ok(self.jacobian_of(self.depth(), z))
    }
}

impl Evaluator for DeflatedSystem {
    fn nvars(&self) -> usize {
        DeflatedSystem::nvars(self)
    }

    fn neqs(&self) -> usize {
        DeflatedSystem::neqs(self)
    }

    fn values(&self, x: &[C64]) -> Result<Vec<C64>> {
        self.evaluate_deflated(x)
    }

    fn jacobian_at(&self, x: &[C64]) -> Result<CMatrix> {
        self.jacobian_deflated(x)
    }

    /// The Jacobian's leading block is the previous stage's Jacobian, which
    /// is all the values need.
    fn values_and_jacobian(&self, x: &[C64]) -> Result<(Vec<C64>, CMatrix)> {
        let jac = self.jacobian_deflated(x)?;
        let k = self.depth();
        if k == 0 {
            return Ok((self.base.evaluate(x)?, jac));
        }
        let prev = jac.block(0, 0, self.neqs_at(k - 1), self.nvars_at(k - 1));
        Ok((self.values_with(k, x, &prev), jac))
    }
}
