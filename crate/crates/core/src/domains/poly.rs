use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::gseries::{rational_to_f64, write_terms, Rational};

/// A polynomial in `x1..xp` with rational coefficients, in normal form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BasePolynomial {
    vars: usize,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl BasePolynomial {
    pub fn zero(vars: usize) -> Self {
        BasePolynomial { vars, terms: BTreeMap::new() }
    }

    pub fn constant(vars: usize, c: Rational) -> Self {
        let mut p = Self::zero(vars);
        p.add_term(vec![0; vars], c);
        p
    }

    pub fn one(vars: usize) -> Self {
        Self::constant(vars, Rational::one())
    }

    /// The coordinate `x_{i+1}`.
    pub fn var(vars: usize, i: usize) -> Self {
        let mut e = vec![0; vars];
        e[i] = 1;
        let mut p = Self::zero(vars);
        p.add_term(e, Rational::one());
        p
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: Rational) {
        debug_assert_eq!(exps.len(), self.vars);
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(exps).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, Rational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x == 0))
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    /// Highest exponent of each variable.
    pub fn degrees(&self) -> Vec<u32> {
        let mut d = vec![0; self.vars];
        for e in self.terms.keys() {
            for (slot, &x) in d.iter_mut().zip(e) {
                *slot = (*slot).max(x);
            }
        }
        d
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.vars);
        }
        let mut p = self.clone();
        for v in p.terms.values_mut() {
            *v *= c;
        }
        p
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.vars, other.vars, "polynomial arity mismatch");
        let mut p = self.clone();
        for (e, c) in &other.terms {
            p.add_term(e.clone(), c.clone());
        }
        p
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.vars, other.vars, "polynomial arity mismatch");
        let mut p = Self::zero(self.vars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                p.add_term(e, ca * cb);
            }
        }
        p
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.vars);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// `∂/∂x_{i+1}`.
    pub fn derivative(&self, i: usize) -> Self {
        let mut p = Self::zero(self.vars);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[i] -= 1;
            p.add_term(e2, c * Rational::from_integer(BigInt::from(e[i])));
        }
        p
    }

    /// `(1/β!) ∂^β`, the Taylor coefficient of order `β`.
    pub fn taylor_coefficient(&self, beta: &[u32]) -> Self {
        let mut p = Self::zero(self.vars);
        for (e, c) in &self.terms {
            if e.iter().zip(beta).any(|(x, b)| x < b) {
                continue;
            }
            let mut coeff = c.clone();
            for (&x, &b) in e.iter().zip(beta) {
                coeff *= Rational::from_integer(binomial(x, b));
            }
            p.add_term(e.iter().zip(beta).map(|(x, b)| x - b).collect(), coeff);
        }
        p
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.vars, "evaluation point has wrong arity");
        let mut total = Rational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(e) {
                if k > 0 {
                    t *= num_traits::pow(x.clone(), k as usize);
                }
            }
            total += t;
        }
        total
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                rational_to_f64(c) * point.iter().zip(e).map(|(x, &k)| x.powi(k as i32)).product::<f64>()
            })
            .sum()
    }

    /// Substitutes `subs[i]` for `x_{i+1}`.
    pub fn compose(&self, subs: &[BasePolynomial]) -> BasePolynomial {
        assert_eq!(subs.len(), self.vars);
        let out_vars = subs.first().map(|s| s.vars).unwrap_or(0);
        let mut out = BasePolynomial::zero(out_vars);
        for (e, c) in &self.terms {
            let mut t = BasePolynomial::constant(out_vars, c.clone());
            for (s, &k) in subs.iter().zip(e) {
                if k > 0 {
                    t = t.mul(&s.pow(k));
                }
            }
            out = out.add(&t);
        }
        out
    }

    /// The same polynomial viewed in `new_vars` variables, with variable `i`
    /// renamed to `offset + i`.
    pub fn embed(&self, new_vars: usize, offset: usize) -> BasePolynomial {
        let mut out = BasePolynomial::zero(new_vars);
        for (e, c) in &self.terms {
            let mut e2 = vec![0; new_vars];
            e2[offset..offset + self.vars].copy_from_slice(e);
            out.add_term(e2, c.clone());
        }
        out
    }

    /// Drops monomials of total degree above `degree`.
    pub fn truncate_degree(&self, degree: u32) -> BasePolynomial {
        let mut p = self.clone();
        p.terms.retain(|e, _| e.iter().sum::<u32>() <= degree);
        p
    }

    /// Re-expands around `center`: returns `q` with `q(u) = self(center + u)`.
    pub fn shift(&self, center: &[Rational]) -> BasePolynomial {
        let subs: Vec<BasePolynomial> = (0..self.vars)
            .map(|i| BasePolynomial::var(self.vars, i).add(&BasePolynomial::constant(self.vars, center[i].clone())))
            .collect();
        self.compose(&subs)
    }
}

pub(crate) fn binomial(n: u32, k: u32) -> BigInt {
    let mut r = BigInt::one();
    for i in 0..k {
        r = r * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    r
}

impl fmt::Display for BasePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut ordered: Vec<(Vec<u16>, &Rational)> = self
            .terms
            .iter()
            .map(|(e, c)| (e.iter().map(|&x| x as u16).collect(), c))
            .collect();
        ordered.sort_by(|a, b| {
            let da: u32 = a.0.iter().map(|&x| x as u32).sum();
            let db: u32 = b.0.iter().map(|&x| x as u32).sum();
            da.cmp(&db).then_with(|| b.0.cmp(&a.0))
        });
        write_terms(f, 'x', ordered.iter().map(|(e, c)| (e.as_slice(), *c)))
    }
}

impl fmt::Debug for BasePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gseries::{int, rat};

    fn x(vars: usize, i: usize) -> BasePolynomial {
        BasePolynomial::var(vars, i)
    }

    #[test]
    fn arithmetic_and_calculus() {
        let x1 = x(2, 0);
        let x2 = x(2, 1);
        let p = x1.pow(3).add(&x1.mul(&x2).scale(&int(2)));
        assert_eq!(p.to_string(), "2*x1*x2 + x1^3");
        assert_eq!(p.derivative(0).to_string(), "2*x2 + 3*x1^2");
        assert_eq!(p.taylor_coefficient(&[2, 0]).to_string(), "3*x1");
        assert_eq!(p.taylor_coefficient(&[1, 1]).to_string(), "2");
        assert_eq!(p.eval(&[rat(1, 2), int(3)]), rat(25, 8));
        assert!((p.eval_f64(&[0.5, 3.0]) - 3.125).abs() < 1e-12);
        assert_eq!(p.degrees(), vec![3, 1]);
        assert_eq!(p.total_degree(), 3);
    }

    #[test]
    fn composition_and_shift() {
        let y = x(1, 0);
        let g = y.add(&BasePolynomial::one(1));
        let f = y.pow(2);
        assert_eq!(g.compose(std::slice::from_ref(&f)).to_string(), "1 + x1^2");
        let shifted = f.shift(&[int(3)]);
        assert_eq!(shifted.to_string(), "9 + 6*x1 + x1^2");
        assert_eq!(f.embed(3, 1).to_string(), "x2^2");
    }
}
