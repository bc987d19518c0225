use num_complex::Complex64 as C64;

use super::Polynomial;
use crate::jet;

/// Flattened term lists for a batch of polynomials sharing one power table
/// per evaluation call.
#[derive(Debug, Clone, Default)]
pub(crate) struct EvalPlan {
    nvars: usize,
    max_exp: Vec<u32>,
    offsets: Vec<usize>,
    table_len: usize,
    poly_terms: Vec<(usize, usize)>,
    coeffs: Vec<C64>,
    term_factors: Vec<(usize, usize)>,
    factors: Vec<(u32, u32)>,
}

impl EvalPlan {
    pub(crate) fn new<'a, I>(nvars: usize, polys: I) -> Self
    where
        I: IntoIterator<Item = &'a Polynomial>,
    {
        let mut plan = EvalPlan {
            nvars,
            max_exp: vec![0; nvars],
            ..Default::default()
        };
        for p in polys {
            let start = plan.coeffs.len();
            for (mono, c) in p.terms() {
                let f0 = plan.factors.len();
                for (v, &e) in mono.exponents().iter().enumerate() {
                    if e > 0 {
                        plan.factors.push((v as u32, e));
                        plan.max_exp[v] = plan.max_exp[v].max(e);
                    }
                }
                plan.term_factors.push((f0, plan.factors.len()));
                plan.coeffs.push(*c);
            }
            plan.poly_terms.push((start, plan.coeffs.len()));
        }
        let mut acc = 0;
        plan.offsets = plan
            .max_exp
            .iter()
            .map(|&m| {
                let o = acc;
                acc += m as usize + 1;
                o
            })
            .collect();
        plan.table_len = acc;
        plan
    }

    pub(crate) fn len(&self) -> usize {
        self.poly_terms.len()
    }

    /// Powers `x_v^e` built by squaring from already cached lower powers.
    fn power_table(&self, x: &[C64]) -> Vec<C64> {
        let one = C64::new(1.0, 0.0);
        let mut table = vec![one; self.table_len];
        for v in 0..self.nvars {
            let o = self.offsets[v];
            let m = self.max_exp[v] as usize;
            if m >= 1 {
                table[o + 1] = x[v];
            }
            for e in 2..=m {
                let half = table[o + e / 2];
                let mut p = half * half;
                if e % 2 == 1 {
                    p *= x[v];
                }
                table[o + e] = p;
            }
        }
        table
    }

    pub(crate) fn eval(&self, x: &[C64]) -> Vec<C64> {
        debug_assert_eq!(x.len(), self.nvars);
        let table = self.power_table(x);
        self.poly_terms
            .iter()
            .map(|&(t0, t1)| {
                let mut sum = C64::new(0.0, 0.0);
                for t in t0..t1 {
                    let (f0, f1) = self.term_factors[t];
                    let c = self.coeffs[t];
                    if f0 == f1 {
                        sum += c;
                        continue;
                    }
                    let (v, e) = self.factors[f0];
                    let mut prod = table[self.offsets[v as usize] + e as usize];
                    for &(v, e) in &self.factors[f0 + 1..f1] {
                        prod *= table[self.offsets[v as usize] + e as usize];
                    }
                    sum += c * prod;
                }
                sum
            })
            .collect()
    }

    fn power_table_jet(&self, x: &[C64], w: usize) -> Vec<C64> {
        let mut table = vec![jet::zero(); self.table_len * w];
        let mut tmp = vec![jet::zero(); w];
        for v in 0..self.nvars {
            let o = self.offsets[v];
            let m = self.max_exp[v] as usize;
            table[o * w] = C64::new(1.0, 0.0);
            if m >= 1 {
                table[(o + 1) * w..(o + 2) * w].copy_from_slice(&x[v * w..(v + 1) * w]);
            }
            for e in 2..=m {
                let h = (o + e / 2) * w;
                let (lo, hi) = table.split_at_mut((o + e) * w);
                let half = &lo[h..h + w];
                let dst = &mut hi[..w];
                jet::mul_into(half, half, dst);
                if e % 2 == 1 {
                    jet::mul_into(dst, &x[v * w..(v + 1) * w], &mut tmp);
                    dst.copy_from_slice(&tmp);
                }
            }
        }
        table
    }

    /// Evaluates every polynomial at a jet-valued point (`nvars * w` entries).
    pub(crate) fn eval_jet(&self, x: &[C64], w: usize) -> Vec<C64> {
        debug_assert_eq!(x.len(), self.nvars * w);
        if w == 1 {
            return self.eval(x);
        }
        let table = self.power_table_jet(x, w);
        let mut out = vec![jet::zero(); self.len() * w];
        let mut prod = vec![jet::zero(); w];
        let mut tmp = vec![jet::zero(); w];
        for (p, &(t0, t1)) in self.poly_terms.iter().enumerate() {
            let sum = &mut out[p * w..(p + 1) * w];
            for t in t0..t1 {
                let (f0, f1) = self.term_factors[t];
                let c = self.coeffs[t];
                if f0 == f1 {
                    sum[0] += c;
                    continue;
                }
                let (v, e) = self.factors[f0];
                let at = (self.offsets[v as usize] + e as usize) * w;
                prod.copy_from_slice(&table[at..at + w]);
                for &(v, e) in &self.factors[f0 + 1..f1] {
                    let at = (self.offsets[v as usize] + e as usize) * w;
                    jet::mul_into(&prod, &table[at..at + w], &mut tmp);
                    std::mem::swap(&mut prod, &mut tmp);
                }
                for (s, q) in sum.iter_mut().zip(&prod) {
                    *s += c * q;
                }
            }
        }
        out
    }
}
