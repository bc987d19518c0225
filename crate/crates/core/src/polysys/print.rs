use std::fmt;

use num_complex::Complex64 as C64;

use super::{PolySystem, Polynomial};

/// Integral values print without a fraction; everything else with 17
/// significant digits so that reparsing recovers the same `f64`.
fn format_real(x: f64) -> String {
    if x == x.trunc() && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x:.16e}")
    }
}

/// Coefficient literal accepted by the parser: a bare real, or `(a+bi)`.
pub fn format_coefficient(c: C64) -> String {
    if c.im == 0.0 {
        return format_real(c.re);
    }
    let sign = if c.im.is_sign_negative() { '-' } else { '+' };
    format!("({}{}{}i)", format_real(c.re), sign, format_real(c.im.abs()))
}

fn format_monomial(exponents: &[u32], names: &[String]) -> String {
    let mut parts = Vec::new();
    for (e, name) in exponents.iter().zip(names) {
        match e {
            0 => {}
            1 => parts.push(name.clone()),
            _ => parts.push(format!("{name}^{e}")),
        }
    }
    parts.join("*")
}

/// Renders `p` with the given variable names, terms in descending
/// graded-lexicographic order.
pub fn format_polynomial(p: &Polynomial, names: &[String]) -> String {
    assert_eq!(p.nvars(), names.len(), "one name per variable");
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (k, (mono, &c)) in p.terms().rev().enumerate() {
        let (negative, c) = if c.im == 0.0 && c.re < 0.0 {
            (true, -c)
        } else {
            (false, c)
        };
        if k == 0 {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        if mono.is_constant() {
            out.push_str(&format_coefficient(c));
            continue;
        }
        if c != C64::new(1.0, 0.0) {
            out.push_str(&format_coefficient(c));
            out.push('*');
        }
        out.push_str(&format_monomial(mono.exponents(), names));
    }
    out
}

impl fmt::Display for PolySystem {
    /// The system file format: count, names, one polynomial per line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.neqs())?;
        writeln!(f, "{}", self.names().join(" "))?;
        for p in self.equations() {
            writeln!(f, "{};", format_polynomial(p, self.names()))?;
        }
        Ok(())
    }
}
