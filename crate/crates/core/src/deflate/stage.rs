use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{CMatrix, C64};

/// Seeded source of the random multipliers; one per solve.
#[derive(Debug, Clone)]
pub struct DeflationRng(ChaCha8Rng);

impl DeflationRng {
    pub fn new(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    fn unit(&mut self) -> C64 {
        let theta: f64 = self.0.gen::<f64>() * TAU;
        C64::from_polar(1.0, theta)
    }

    pub fn unit_vector(&mut self, len: usize) -> Vec<C64> {
        (0..len).map(|_| self.unit()).collect()
    }
}

/// Matrix of random points `e^{i theta}` on the unit circle, row by row.
pub fn unit_circle_matrix(rng: &mut DeflationRng, rows: usize, cols: usize) -> CMatrix {
    let data = rng.unit_vector(rows * cols);
    CMatrix::from_vec(rows, cols, data).expect("sized to fit")
}

/// One application of the deflation operator: `x` gains `rank + 1`
/// multipliers `lambda`, the system gains `A(x) B lambda = 0` and
/// `<h, lambda> = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeflationStage {
    pub rank: usize,
    pub b: CMatrix,
    pub h: Vec<C64>,
    pub nvars_prev: usize,
    pub neqs_prev: usize,
}

impl DeflationStage {
    /// Draws `B` then `h`.
    pub fn random(rng: &mut DeflationRng, rank: usize, nvars_prev: usize, neqs_prev: usize) -> Self {
        assert!(rank < nvars_prev, "rank must leave a kernel");
        let b = unit_circle_matrix(rng, nvars_prev, rank + 1);
        let h = rng.unit_vector(rank + 1);
        Self {
            rank,
            b,
            h,
            nvars_prev,
            neqs_prev,
        }
    }

    pub fn multipliers(&self) -> usize {
        self.rank + 1
    }

    pub fn nvars(&self) -> usize {
        self.nvars_prev + self.multipliers()
    }

    pub fn neqs(&self) -> usize {
        2 * self.neqs_prev + 1
    }

    /// `B lambda`.
    pub fn direction(&self, lambda: &[C64]) -> Vec<C64> {
        self.b.mul_vec(lambda).expect("multiplier count matches B")
    }

    /// `<h, lambda> - 1`.
    pub fn normalization(&self, lambda: &[C64]) -> C64 {
        self.h
            .iter()
            .zip(lambda)
            .fold(C64::new(-1.0, 0.0), |acc, (h, l)| acc + h * l)
    }
}
