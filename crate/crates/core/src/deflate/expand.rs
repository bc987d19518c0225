use super::system::DeflatedSystem;
use crate::error::Result;
use crate::polysys::{Monomial, PolySystem, Polynomial};
use crate::linalg::C64;

/// Name of the `j`-th multiplier of stage `k`, both counted from 1.
pub fn multiplier_name(k: usize, j: usize) -> String {
    format!("l_{k}_{j}")
}

fn linear_form(nvars: usize, offset: usize, coeffs: &[C64], constant: C64) -> Polynomial {
    let terms = coeffs
        .iter()
        .enumerate()
        .map(|(l, &c)| (Monomial::variable(nvars, offset + l).exponents().to_vec(), c))
        .chain(std::iter::once((vec![0; nvars], constant)));
    Polynomial::from_terms(nvars, terms).expect("exponent vectors sized to nvars")
}

/// Fully expanded polynomial form of a deflated system: `A(x) B lambda` is
/// multiplied out symbolically at every stage.
///
/// The size grows quickly with the stage count; the structured evaluation of
/// [`DeflatedSystem`] is the one meant for computing.
pub fn expand(sys: &DeflatedSystem) -> Result<PolySystem> {
    let base = sys.base();
    let mut names = base.names().to_vec();
    let mut eqs = base.equations().to_vec();
    for (k, st) in sys.stages().iter().enumerate() {
        let (n0, n1, m) = (st.nvars_prev, st.nvars(), st.multipliers());
        names.extend((1..=m).map(|j| multiplier_name(k + 1, j)));
        // (B lambda)_j as a linear form in the new multipliers
        let zero = C64::new(0.0, 0.0);
        let v: Vec<Polynomial> = (0..n0)
            .map(|j| {
                let row: Vec<C64> = (0..m).map(|l| st.b[(j, l)]).collect();
                linear_form(n1, n0, &row, zero)
            })
            .collect();
        let mut next: Vec<Polynomial> = eqs.iter().map(|p| p.extend_vars(n1)).collect();
        for p in &eqs {
            let mut acc = Polynomial::zero(n1);
            for (j, vj) in v.iter().enumerate() {
                acc = acc.add(&p.differentiate(j)?.extend_vars(n1).mul(vj));
            }
            next.push(acc);
        }
        next.push(linear_form(n1, n0, &st.h, C64::new(-1.0, 0.0)));
        eqs = next;
    }
    PolySystem::new(names, eqs)
}
