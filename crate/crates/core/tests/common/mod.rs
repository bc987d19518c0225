#![allow(dead_code)]

use deflation::deflate::{deflate_loop, DeflateOptions, DeflationOutcome};
use deflation::fixtures::Fixture;
use deflation::linalg::{svd, CMatrix, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Coordinates uniform in the disk of the given radius, independently.
pub fn random_point(rng: &mut ChaCha8Rng, n: usize, radius: f64) -> Vec<C64> {
    (0..n)
        .map(|_| {
            let r = radius * rng.gen::<f64>().sqrt();
            C64::from_polar(r, rng.gen::<f64>() * std::f64::consts::TAU)
        })
        .collect()
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
    let data = (0..rows * cols)
        .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    CMatrix::from_vec(rows, cols, data).unwrap()
}

pub fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    svd(&random_matrix(rng, n, n)).unwrap().u
}

/// Start point at distance `dist` from the fixture root in a seeded direction.
pub fn start_near(fx: &Fixture, dist: f64, seed: u64) -> Vec<C64> {
    let dir = random_point(&mut rng(seed), fx.root.len(), 1.0);
    let norm = dir.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    fx.root
        .iter()
        .zip(&dir)
        .map(|(r, d)| r + d * (dist / norm))
        .collect()
}

pub fn solve_near(fx: &Fixture, dist: f64, seed: u64) -> DeflationOutcome {
    let opts = DeflateOptions {
        seed,
        ..Default::default()
    };
    deflate_loop(&fx.system, &start_near(fx, dist, seed), &opts).unwrap()
}

pub fn rel_diff(a: &[C64], b: &[C64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum::<f64>().sqrt();
    num / den.max(f64::MIN_POSITIVE)
}
