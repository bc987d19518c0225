use crate::error::{check_tol, Result};
use crate::linalg::{kernel_vector, numerical_rank, svd, C64};
use crate::polysys::{PolySystem, Polynomial};

/// Adds the derivatives of every equation along one kernel direction of the
/// Jacobian at `x0`. No multipliers are introduced: the direction is fixed
/// numerically.
pub fn symbolic_deflation(f: &PolySystem, x0: &[C64], rank_tol: f64) -> Result<PolySystem> {
    check_tol(rank_tol)?;
    let a = f.jacobian().evaluate(x0)?;
    let s = svd(&a)?;
    let info = numerical_rank(&s, rank_tol);
    let lambda = kernel_vector(&s, info.rank)?;
    let n = f.nvars();
    let mut eqs = f.equations().to_vec();
    for p in f.equations() {
        let mut acc = Polynomial::zero(n);
        for (j, &l) in lambda.iter().enumerate() {
            acc = acc.add(&p.differentiate(j)?.scale(l));
        }
        eqs.push(acc);
    }
    PolySystem::new(f.names().to_vec(), eqs)
}
