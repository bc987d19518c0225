//! Multiplicity of an isolated root from the dimension of its local dual
//! space, computed with Macaulay matrices of increasing order.
//!
//! The functional `y^alpha -> [coefficient of y^alpha]` vanishes on the
//! ideal up to degree `d` exactly when it lies in the kernel of the order-`d`
//! matrix whose rows are the expansions of `y^beta f_i(x* + y)`, `|beta| < d`.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{check_len, check_tol, Error, Result};
use crate::linalg::{norm2, singular_values, CMatrix, C64};
use crate::polysys::{PolySystem, Polynomial};

pub const DEFAULT_MAX_ORDER: usize = 12;
pub const DEFAULT_DUAL_TOL: f64 = 1e-6;
pub const COLUMN_CAP: usize = 5000;
/// Largest residual at which a point is still treated as a root.
pub const ROOT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Multiplicity {
    Value(usize),
    ExceedsMaxOrder { max_order: usize, last_nullity: usize },
}

impl Multiplicity {
    pub fn value(self) -> Option<usize> {
        match self {
            Multiplicity::Value(m) => Some(m),
            Multiplicity::ExceedsMaxOrder { .. } => None,
        }
    }
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1usize, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Exponent vectors of total degree at most `d`, lowest degree first.
fn monomials_up_to(n: usize, d: u32) -> Vec<Vec<u32>> {
    fn fill(var: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if var + 1 == cur.len() {
            cur[var] = left;
            out.push(cur.clone());
            return;
        }
        for e in (0..=left).rev() {
            cur[var] = e;
            fill(var + 1, left - e, cur, out);
        }
    }
    let mut out = Vec::new();
    let mut cur = vec![0; n];
    for deg in 0..=d {
        fill(0, deg, &mut cur, &mut out);
    }
    out
}

fn translated(f: &PolySystem, x_star: &[C64]) -> Result<Vec<Polynomial>> {
    check_len(f.nvars(), x_star.len())?;
    let residual = norm2(&f.evaluate(x_star)?);
    if !(residual <= ROOT_TOL) {
        return Err(Error::NotARoot(residual));
    }
    f.equations().iter().map(|p| p.translate(x_star)).collect()
}

fn nullity(polys: &[Polynomial], n: usize, d: usize, tol: f64) -> Result<usize> {
    let cols = binomial(n + d, d);
    if cols > COLUMN_CAP {
        return Err(Error::MatrixTooLarge {
            cols,
            cap: COLUMN_CAP,
        });
    }
    if d == 0 {
        return Ok(1);
    }
    let columns = monomials_up_to(n, d as u32);
    let index: HashMap<&[u32], usize> = columns
        .iter()
        .enumerate()
        .map(|(i, e)| (e.as_slice(), i))
        .collect();
    let shifts = monomials_up_to(n, d as u32 - 1);

    let mut data = Vec::new();
    let mut rows = 0;
    let mut row = vec![C64::new(0.0, 0.0); cols];
    let mut alpha = vec![0u32; n];
    for p in polys {
        // Scale by the whole shifted polynomial, not its truncation, so that
        // tiny low-order terms left by an inexact root stay tiny.
        let full = p.terms().map(|(_, c)| c.norm_sqr()).sum::<f64>().sqrt();
        if full == 0.0 {
            continue;
        }
        for beta in &shifts {
            row.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
            for (mono, &c) in p.terms() {
                for (a, (b, g)) in alpha.iter_mut().zip(beta.iter().zip(mono.exponents())) {
                    *a = b + g;
                }
                if let Some(&j) = index.get(alpha.as_slice()) {
                    row[j] += c;
                }
            }
            if row.iter().any(|v| *v != C64::new(0.0, 0.0)) {
                data.extend(row.iter().map(|v| v / full));
                rows += 1;
            }
        }
    }
    if rows == 0 {
        return Ok(cols);
    }
    let m = CMatrix::from_vec(rows, cols, data)?;
    let sigma = singular_values(&m)?;
    // Full rows have unit norm, so a tiny largest value means the truncated
    // block is numerically zero.
    let cutoff = tol * sigma[0].max(1.0);
    let rank = sigma.iter().filter(|&&s| s > cutoff).count();
    Ok(cols - rank)
}

/// Dimension of the order-`d` truncation of the dual space at `x_star`.
pub fn dual_nullity_at_order(f: &PolySystem, x_star: &[C64], d: usize, tol: f64) -> Result<usize> {
    check_tol(tol)?;
    nullity(&translated(f, x_star)?, f.nvars(), d, tol)
}

/// Multiplicity of `x_star`: the dual-space dimension once two consecutive
/// orders agree.
pub fn multiplicity(f: &PolySystem, x_star: &[C64], max_order: usize, tol: f64) -> Result<Multiplicity> {
    check_tol(tol)?;
    let polys = translated(f, x_star)?;
    let mut prev = nullity(&polys, f.nvars(), 0, tol)?;
    for d in 1..=max_order {
        let cur = nullity(&polys, f.nvars(), d, tol)?;
        if cur == prev {
            return Ok(Multiplicity::Value(cur));
        }
        prev = cur;
    }
    Ok(Multiplicity::ExceedsMaxOrder {
        max_order,
        last_nullity: prev,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polysys::parse_system;

    fn origin(n: usize) -> Vec<C64> {
        vec![C64::new(0.0, 0.0); n]
    }

    fn m_of(text: &str, at: &[f64]) -> Multiplicity {
        let f = parse_system(text).unwrap();
        let x: Vec<C64> = at.iter().map(|&v| C64::new(v, 0.0)).collect();
        multiplicity(&f, &x, DEFAULT_MAX_ORDER, DEFAULT_DUAL_TOL).unwrap()
    }

    #[test]
    fn examples() {
        assert_eq!(m_of("1\nx\nx^2;", &[0.0]), Multiplicity::Value(2));
        assert_eq!(m_of("1\nx\nx^2 - 3*x + 2;", &[1.0]), Multiplicity::Value(1));
        assert_eq!(
            m_of("3\nx1 x2\nx1^3 + x1*x2^2;\nx1*x2^2 + x2^3;\nx1^2*x2 + x1*x2^2;", &[0.0, 0.0]),
            Multiplicity::Value(7)
        );
        assert_eq!(
            m_of(
                "3\nx1 x2 x3\nx1^3 - x2*x3;\nx2^3 - x1*x3;\nx3^3 - x1*x2;",
                &[0.0, 0.0, 0.0]
            ),
            Multiplicity::Value(11)
        );
    }

    #[test]
    fn nullity_by_order() {
        let f = parse_system("1\nx\nx^2;").unwrap();
        let z = origin(1);
        assert_eq!(dual_nullity_at_order(&f, &z, 0, 1e-6).unwrap(), 1);
        assert_eq!(dual_nullity_at_order(&f, &z, 1, 1e-6).unwrap(), 2);
        assert_eq!(dual_nullity_at_order(&f, &z, 3, 1e-6).unwrap(), 2);
    }

    #[test]
    fn order_limit_and_errors() {
        let f = parse_system("1\nx\nx^9;").unwrap();
        let out = multiplicity(&f, &origin(1), 4, 1e-6).unwrap();
        assert_eq!(
            out,
            Multiplicity::ExceedsMaxOrder {
                max_order: 4,
                last_nullity: 5
            }
        );
        assert!(matches!(
            multiplicity(&f, &[C64::new(1.0, 0.0)], 4, 1e-6),
            Err(Error::NotARoot(_))
        ));
        let g = parse_system("1\nx1 x2 x3 x4 x5 x6 x7 x8\nx1;").unwrap();
        assert!(matches!(
            dual_nullity_at_order(&g, &origin(8), 9, 1e-6),
            Err(Error::MatrixTooLarge { .. })
        ));
    }

    #[test]
    fn inexact_root_keeps_its_multiplicity() {
        assert_eq!(m_of("1\nx\nx^2;", &[1e-12]), Multiplicity::Value(2));
        assert_eq!(m_of("2\nx1 x2\nx1;\nx2^4;", &[1e-14, 1e-9]), Multiplicity::Value(4));
    }

    #[test]
    fn column_count_matches_binomial() {
        assert_eq!(monomials_up_to(3, 4).len(), binomial(7, 4));
        assert_eq!(monomials_up_to(1, 5).len(), 6);
    }
}
