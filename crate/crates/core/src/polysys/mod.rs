//! Sparse multivariate polynomials with complex coefficients, polynomial
//! systems, and matrices of polynomials (Jacobians).

mod parse;
mod plan;
mod print;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_complex::Complex64 as C64;

pub use parse::parse_system;
pub(crate) use plan::EvalPlan;
pub use print::format_coefficient;

use crate::error::{check_len, Error, Result};
use crate::linalg::CMatrix;

/// Coefficients below this modulus are dropped (underflow guard).
pub const DROP_TOL: f64 = 1e-300;

/// Exponent vector `alpha` of the monomial `x^alpha`.
///
/// Ordered graded-lexicographically: by total degree, then lexicographically
/// on the exponents.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn variable(nvars: usize, j: usize) -> Self {
        let mut e = vec![0; nvars];
        e[j] = 1;
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_constant(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial in `nvars` variables: finite map from monomial to
/// coefficient, with no stored zero coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Monomial, C64>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: C64) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::one(nvars), c);
        p
    }

    pub fn variable(nvars: usize, j: usize) -> Result<Self> {
        if j >= nvars {
            return Err(Error::IndexOutOfRange { index: j, nvars });
        }
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::variable(nvars, j), C64::new(1.0, 0.0));
        Ok(p)
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, merging
    /// repeated monomials.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, C64)>,
    {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            check_len(nvars, e.len())?;
            p.add_term(Monomial(e), c);
        }
        Ok(p)
    }

    /// Real-coefficient shorthand for tests and fixtures.
    pub fn from_real_terms(nvars: usize, terms: &[(&[u32], f64)]) -> Result<Self> {
        Self::from_terms(
            nvars,
            terms.iter().map(|(e, c)| (e.to_vec(), C64::new(*c, 0.0))),
        )
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Terms in ascending graded-lexicographic order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &C64)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, exponents: &[u32]) -> C64 {
        self.terms
            .get(&Monomial(exponents.to_vec()))
            .copied()
            .unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    fn add_term(&mut self, m: Monomial, c: C64) {
        use std::collections::btree_map::Entry;
        debug_assert_eq!(m.nvars(), self.nvars);
        match self.terms.entry(m) {
            Entry::Vacant(slot) => {
                if c.norm() >= DROP_TOL {
                    slot.insert(c);
                }
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += c;
                if slot.get().norm() < DROP_TOL {
                    slot.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), *c);
        }
        out
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: C64) -> Polynomial {
        let mut out = Polynomial::zero(self.nvars);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c * s);
        }
        out
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
        let mut out = Polynomial::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    /// Exact partial derivative with respect to variable `j`.
    pub fn differentiate(&self, j: usize) -> Result<Polynomial> {
        if j >= self.nvars {
            return Err(Error::IndexOutOfRange {
                index: j,
                nvars: self.nvars,
            });
        }
        let mut out = Polynomial::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[j];
            if e == 0 {
                continue;
            }
            let mut d = m.0.clone();
            d[j] -= 1;
            out.add_term(Monomial(d), c * e as f64);
        }
        Ok(out)
    }

    pub fn evaluate(&self, x: &[C64]) -> Result<C64> {
        check_len(self.nvars, x.len())?;
        Ok(EvalPlan::new(self.nvars, [self]).eval(x)[0])
    }

    /// Same polynomial viewed in `nvars >= self.nvars` variables; the new
    /// variables are appended and do not occur.
    pub fn extend_vars(&self, nvars: usize) -> Polynomial {
        assert!(nvars >= self.nvars);
        let mut out = Polynomial::zero(nvars);
        for (m, c) in &self.terms {
            let mut e = m.0.clone();
            e.resize(nvars, 0);
            out.terms.insert(Monomial(e), *c);
        }
        out
    }

    /// Substitutes `x_v -> subs[v]`; the result lives in the variables of
    /// the substituted polynomials.
    pub fn substitute(&self, subs: &[Polynomial]) -> Result<Polynomial> {
        check_len(self.nvars, subs.len())?;
        let target = subs.first().map_or(0, Polynomial::nvars);
        if subs.iter().any(|s| s.nvars != target) {
            return Err(Error::Variables(
                "substituted polynomials must share a variable count".into(),
            ));
        }
        let mut powers: Vec<Vec<Polynomial>> = subs
            .iter()
            .map(|s| vec![Polynomial::constant(target, C64::new(1.0, 0.0)), s.clone()])
            .collect();
        let mut out = Polynomial::zero(target);
        for (m, c) in &self.terms {
            let mut term = Polynomial::constant(target, *c);
            for (v, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[v].len() <= e as usize {
                    let next = powers[v].last().unwrap().mul(&subs[v]);
                    powers[v].push(next);
                }
                term = term.mul(&powers[v][e as usize]);
            }
            out = out.add(&term);
        }
        Ok(out)
    }

    /// Taylor expansion about `center`: the polynomial `q(y) = p(center + y)`.
    pub fn translate(&self, center: &[C64]) -> Result<Polynomial> {
        check_len(self.nvars, center.len())?;
        let subs: Vec<Polynomial> = (0..self.nvars)
            .map(|v| {
                let mut s = Polynomial::variable(self.nvars, v).expect("in range");
                s.add_term(Monomial::one(self.nvars), center[v]);
                s
            })
            .collect();
        self.substitute(&subs)
    }
}

/// A system of `N` polynomial equations in `n` named variables.
#[derive(Debug, Clone)]
pub struct PolySystem {
    names: Vec<String>,
    equations: Vec<Polynomial>,
    plan: EvalPlan,
    jac: OnceLock<PolyMatrix>,
}

impl PartialEq for PolySystem {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names && self.equations == other.equations
    }
}

impl PolySystem {
    pub fn new(names: Vec<String>, equations: Vec<Polynomial>) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::EmptySystem("no variables declared".into()));
        }
        if equations.is_empty() {
            return Err(Error::EmptySystem("no equations".into()));
        }
        for (i, name) in names.iter().enumerate() {
            if names[..i].contains(name) {
                return Err(Error::Variables(format!("variable '{name}' declared twice")));
            }
        }
        let n = names.len();
        if let Some(bad) = equations.iter().position(|p| p.nvars() != n) {
            return Err(Error::Variables(format!(
                "equation {} has {} variables, expected {n}",
                bad + 1,
                equations[bad].nvars()
            )));
        }
        let plan = EvalPlan::new(n, &equations);
        Ok(Self {
            names,
            equations,
            plan,
            jac: OnceLock::new(),
        })
    }

    /// System with variables named `x1, x2, ...`.
    pub fn with_default_names(equations: Vec<Polynomial>) -> Result<Self> {
        let n = equations.first().map_or(0, Polynomial::nvars);
        let names = (1..=n).map(|i| format!("x{i}")).collect();
        Self::new(names, equations)
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn neqs(&self) -> usize {
        self.equations.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn equations(&self) -> &[Polynomial] {
        &self.equations
    }

    pub fn evaluate(&self, x: &[C64]) -> Result<Vec<C64>> {
        check_len(self.nvars(), x.len())?;
        Ok(self.plan.eval(x))
    }

    /// `N x n` matrix of partial derivatives, built on first use.
    pub fn jacobian(&self) -> &PolyMatrix {
        self.jac.get_or_init(|| {
            let n = self.nvars();
            let entries = self
                .equations
                .iter()
                .flat_map(|f| (0..n).map(move |j| f.differentiate(j).expect("in range")))
                .collect();
            PolyMatrix::new(self.neqs(), n, n, entries).expect("consistent shape")
        })
    }

    /// Equation-wise sum of two systems over the same variables.
    pub fn add(&self, other: &PolySystem) -> Result<PolySystem> {
        check_len(self.nvars(), other.nvars())?;
        check_len(self.neqs(), other.neqs())?;
        let eqs = self
            .equations
            .iter()
            .zip(&other.equations)
            .map(|(a, b)| a.add(b))
            .collect();
        PolySystem::new(self.names.clone(), eqs)
    }

    /// `F(Q x)` for a square matrix `Q`.
    pub fn linear_change(&self, q: &CMatrix) -> Result<PolySystem> {
        let n = self.nvars();
        check_len(n, q.rows())?;
        check_len(n, q.cols())?;
        let subs: Vec<Polynomial> = (0..n)
            .map(|v| {
                Polynomial::from_terms(
                    n,
                    (0..n).map(|j| (Monomial::variable(n, j).0, q[(v, j)])),
                )
                .expect("consistent length")
            })
            .collect();
        let eqs = self
            .equations
            .iter()
            .map(|f| f.substitute(&subs))
            .collect::<Result<Vec<_>>>()?;
        PolySystem::new(self.names.clone(), eqs)
    }
}

/// Grid of polynomials sharing one variable count.
#[derive(Debug, Clone)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    nvars: usize,
    entries: Vec<Polynomial>,
    plan: EvalPlan,
}

impl PolyMatrix {
    pub fn new(rows: usize, cols: usize, nvars: usize, entries: Vec<Polynomial>) -> Result<Self> {
        check_len(rows * cols, entries.len())?;
        if entries.iter().any(|p| p.nvars() != nvars) {
            return Err(Error::Variables("matrix entries disagree on variable count".into()));
        }
        let plan = EvalPlan::new(nvars, &entries);
        Ok(Self {
            rows,
            cols,
            nvars,
            entries,
            plan,
        })
    }

    pub fn zeros(rows: usize, cols: usize, nvars: usize) -> Self {
        Self::new(rows, cols, nvars, vec![Polynomial::zero(nvars); rows * cols])
            .expect("consistent shape")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn get(&self, i: usize, j: usize) -> &Polynomial {
        &self.entries[i * self.cols + j]
    }

    /// Entrywise evaluation.
    pub fn evaluate(&self, x: &[C64]) -> Result<CMatrix> {
        check_len(self.nvars, x.len())?;
        CMatrix::from_vec(self.rows, self.cols, self.plan.eval(x))
    }

    /// Entrywise evaluation at a jet point of width `w`; returns row-major
    /// jets.
    pub(crate) fn evaluate_jet(&self, x: &[C64], w: usize) -> Vec<C64> {
        self.plan.eval_jet(x, w)
    }
}

/// Evaluates a polynomial matrix at a point.
pub fn eval_poly_matrix(m: &PolyMatrix, x: &[C64]) -> Result<CMatrix> {
    m.evaluate(x)
}

/// Symbolic Jacobian of a system.
pub fn jacobian(f: &PolySystem) -> PolyMatrix {
    f.jacobian().clone()
}
