use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::degrees::Degree;
use crate::gseries::{GeneratorSignature, Monomial, Rational};

use super::poly::BasePolynomial;

/// A function on a domain with polynomial coefficients:
/// `Σ_α f_α(x) ξ^α`, truncated at `|α| ≤ K`.
#[derive(Clone, PartialEq, Eq)]
pub struct SuperFunction {
    sig: Arc<GeneratorSignature>,
    vars: usize,
    truncation: usize,
    terms: BTreeMap<Monomial, BasePolynomial>,
}

impl SuperFunction {
    pub fn zero(sig: Arc<GeneratorSignature>, vars: usize, truncation: usize) -> Self {
        SuperFunction { sig, vars, truncation, terms: BTreeMap::new() }
    }

    pub fn from_poly(sig: Arc<GeneratorSignature>, truncation: usize, poly: BasePolynomial) -> Self {
        let mut f = Self::zero(sig, poly.vars(), truncation);
        let one = Monomial::one(f.sig.num_generators());
        f.add_term(one, poly);
        f
    }

    /// The formal coordinate `ξ^{j+1}`.
    pub fn formal(sig: Arc<GeneratorSignature>, vars: usize, truncation: usize, j: usize) -> Self {
        let mut f = Self::zero(sig, vars, truncation);
        let m = Monomial::generator(f.sig.num_generators(), j);
        f.add_term(m, BasePolynomial::one(vars));
        f
    }

    pub fn add_term(&mut self, m: Monomial, poly: BasePolynomial) {
        debug_assert_eq!(poly.vars(), self.vars);
        if poly.is_zero() || m.total_order() > self.truncation {
            return;
        }
        if m.0.iter().enumerate().any(|(j, &e)| e > 1 && self.sig.is_odd(j)) {
            return;
        }
        let sum = match self.terms.remove(&m) {
            Some(old) => old.add(&poly),
            None => poly,
        };
        if !sum.is_zero() {
            self.terms.insert(m, sum);
        }
    }

    pub fn signature(&self) -> &Arc<GeneratorSignature> {
        &self.sig
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, BasePolynomial> {
        &self.terms
    }

    pub fn coefficient(&self, m: &Monomial) -> BasePolynomial {
        self.terms.get(m).cloned().unwrap_or_else(|| BasePolynomial::zero(self.vars))
    }

    pub fn body(&self) -> BasePolynomial {
        self.coefficient(&Monomial::one(self.sig.num_generators()))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_homogeneous_of(&self, deg: &Degree) -> bool {
        self.terms.keys().all(|m| self.sig.monomial_degree(m) == *deg)
    }

    pub fn with_truncation(&self, truncation: usize) -> Self {
        let mut f = Self::zero(self.sig.clone(), self.vars, truncation);
        for (m, p) in &self.terms {
            f.add_term(m.clone(), p.clone());
        }
        f
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut f = self.clone();
        f.truncation = self.truncation.min(other.truncation);
        f.terms.retain(|m, _| m.total_order() <= f.truncation);
        for (m, p) in &other.terms {
            f.add_term(m.clone(), p.clone());
        }
        f
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Rational::from_integer(1.into())))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut f = Self::zero(self.sig.clone(), self.vars, self.truncation);
        for (m, p) in &self.terms {
            f.add_term(m.clone(), p.scale(c));
        }
        f
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.sig, other.sig, "superfunctions over different coordinates");
        let k = self.truncation.min(other.truncation);
        let mut f = Self::zero(self.sig.clone(), self.vars, k);
        for (ma, pa) in &self.terms {
            for (mb, pb) in &other.terms {
                if ma.total_order() + mb.total_order() > k {
                    continue;
                }
                if let Some((neg, m)) = self.sig.monomial_product(ma, mb) {
                    let prod = pa.mul(pb);
                    f.add_term(m, if neg { prod.scale(&-Rational::from_integer(1.into())) } else { prod });
                }
            }
        }
        f
    }

    pub fn pow(&self, e: u32) -> Self {
        let one = Self::from_poly(self.sig.clone(), self.truncation, BasePolynomial::one(self.vars));
        (0..e).fold(one, |acc, _| acc.mul(self))
    }

    /// `g(args)` for a polynomial `g` whose variables are replaced by even
    /// superfunctions (which commute, so the order of factors is irrelevant).
    pub fn eval_polynomial(g: &BasePolynomial, args: &[SuperFunction], sig: Arc<GeneratorSignature>, vars: usize, truncation: usize) -> Self {
        assert_eq!(g.vars(), args.len());
        let mut cache: Vec<Vec<SuperFunction>> = args.iter().map(|a| vec![a.clone()]).collect();
        let mut out = Self::zero(sig.clone(), vars, truncation);
        for (e, c) in g.terms() {
            let mut t = Self::from_poly(sig.clone(), truncation, BasePolynomial::constant(vars, c.clone()));
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                while cache[i].len() < k as usize {
                    let next = cache[i].last().unwrap().mul(&args[i]);
                    cache[i].push(next);
                }
                t = t.mul(&cache[i][k as usize - 1]);
            }
            out = out.add(&t);
        }
        out
    }
}

impl fmt::Display for SuperFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, p)| {
                let xi: Vec<String> = m
                    .0
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(j, &e)| if e == 1 { format!("xi{}", j + 1) } else { format!("xi{}^{e}", j + 1) })
                    .collect();
                if xi.is_empty() {
                    format!("({p})")
                } else {
                    format!("({p})*{}", xi.join("*"))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for SuperFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
