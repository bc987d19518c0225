//! Test systems with known singular roots, and a synthetic benchmark system.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::C64;
use crate::polysys::{parse_system, Monomial, PolySystem, Polynomial};

/// A system with a known isolated root and its multiplicity.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: &'static str,
    pub system: PolySystem,
    pub root: Vec<C64>,
    pub multiplicity: usize,
}

fn parsed(text: &str) -> PolySystem {
    parse_system(text).expect("fixture text is well formed")
}

/// `x^2` with its double root at 0.
pub fn x_squared() -> PolySystem {
    parsed("1\nx\nx^2;")
}

/// `(x1, x2^4)`: corank 1, multiplicity 4 at the origin.
pub fn x1_x2_fourth() -> PolySystem {
    parsed("2\nx1 x2\nx1;\nx2^4;")
}

/// Three cubics in two variables with a zero Jacobian at the origin,
/// multiplicity 7 there.
pub fn cubic_staircase() -> PolySystem {
    parsed("3\nx1 x2\nx1^3 + x1*x2^2;\nx1*x2^2 + x2^3;\nx1^2*x2 + x1*x2^2;")
}

/// `x_i^3 - x_j x_k`: corank 3, multiplicity 11 at the origin.
pub fn cbms1() -> PolySystem {
    parsed("3\nx1 x2 x3\nx1^3 - x2*x3;\nx2^3 - x1*x3;\nx3^3 - x1*x2;")
}

pub fn singular_fixtures() -> Vec<Fixture> {
    let origin = |n| vec![C64::new(0.0, 0.0); n];
    vec![
        Fixture {
            name: "x_squared",
            system: x_squared(),
            root: origin(1),
            multiplicity: 2,
        },
        Fixture {
            name: "x1_x2_fourth",
            system: x1_x2_fourth(),
            root: origin(2),
            multiplicity: 4,
        },
        Fixture {
            name: "cubic_staircase",
            system: cubic_staircase(),
            root: origin(2),
            multiplicity: 7,
        },
        Fixture {
            name: "cbms1",
            system: cbms1(),
            root: origin(3),
            multiplicity: 11,
        },
    ]
}

/// `n` equations in `n` unknowns vanishing at the origin, where the
/// Jacobian has corank 1: a rank-deficient linear part plus random
/// quadratic and cubic terms.
pub fn synthetic_bench(n: usize, seed: u64) -> PolySystem {
    assert!(n >= 2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unit = |rng: &mut ChaCha8Rng| C64::from_polar(1.0, rng.gen::<f64>() * std::f64::consts::TAU);
    let mut linear: Vec<Vec<C64>> = (0..n - 1)
        .map(|_| (0..n).map(|_| unit(&mut rng)).collect())
        .collect();
    let dependent = (0..n).map(|j| linear[0][j] + linear[1 % (n - 1)][j] * 0.5).collect();
    linear.push(dependent);

    let random_monomial = |rng: &mut ChaCha8Rng, degree: usize| {
        let mut e = vec![0u32; n];
        for _ in 0..degree {
            e[rng.gen_range(0..n)] += 1;
        }
        e
    };
    let equations = linear
        .iter()
        .map(|row| {
            let mut terms: Vec<(Vec<u32>, C64)> = row
                .iter()
                .enumerate()
                .map(|(j, &c)| (Monomial::variable(n, j).exponents().to_vec(), c))
                .collect();
            for degree in [2, 3] {
                for _ in 0..n {
                    let e = random_monomial(&mut rng, degree);
                    terms.push((e, unit(&mut rng)));
                }
            }
            Polynomial::from_terms(n, terms).expect("sized exponents")
        })
        .collect();
    PolySystem::with_default_names(equations).expect("nonempty")
}
