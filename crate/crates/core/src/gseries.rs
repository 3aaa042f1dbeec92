//! Truncated ℤ₂ⁿ-graded, ℤ₂ⁿ-commutative formal power series with exact
//! rational coefficients.
//!
//! Generators are grouped by degree in lexicographic order. Series are kept
//! in normal form: monomials are exponent vectors over the generators (in
//! generator-index order), odd generators appear at most once, no stored
//! coefficient is zero and no monomial exceeds the truncation order `K`
//! (total exponent count, i.e. the power of the ideal of nilpotent-or-formal
//! elements).

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::degrees::{enumerate_nonzero_degrees, Degree};
use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Generator counts per nonzero degree, and the resulting generator degrees.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GeneratorSignature {
    n: usize,
    q: Vec<usize>,
    degrees: Vec<Degree>,
    groups: Vec<usize>,
}

impl GeneratorSignature {
    pub fn new(n: usize, q: &[usize]) -> Result<Self> {
        let classes = enumerate_nonzero_degrees(n)?;
        if q.len() != classes.len() {
            return Err(Error::Signature(format!(
                "expected {} generator counts for n = {n}, got {}",
                classes.len(),
                q.len()
            )));
        }
        let mut degrees = Vec::new();
        let mut groups = Vec::new();
        for (i, (&count, deg)) in q.iter().zip(&classes).enumerate() {
            for _ in 0..count {
                degrees.push(*deg);
                groups.push(i);
            }
        }
        Ok(GeneratorSignature { n, q: q.to_vec(), degrees, groups })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> &[usize] {
        &self.q
    }

    pub fn num_generators(&self) -> usize {
        self.degrees.len()
    }

    pub fn generator_degrees(&self) -> &[Degree] {
        &self.degrees
    }

    pub fn generator_degree(&self, j: usize) -> Degree {
        self.degrees[j]
    }

    /// Index into the list of nonzero degrees (0-based) of generator `j`.
    pub fn group_of(&self, j: usize) -> usize {
        self.groups[j]
    }

    /// First generator index of degree class `i`.
    pub fn group_start(&self, i: usize) -> usize {
        self.q[..i].iter().sum()
    }

    pub fn is_odd(&self, j: usize) -> bool {
        self.degrees[j].is_odd()
    }

    pub fn zero_degree(&self) -> Degree {
        Degree::from_mask(self.n, 0)
    }

    pub fn monomial_degree(&self, m: &Monomial) -> Degree {
        let mask = m
            .0
            .iter()
            .zip(&self.degrees)
            .filter(|(e, _)| **e % 2 == 1)
            .fold(0u32, |acc, (_, d)| acc ^ d.mask());
        Degree::from_mask(self.n, mask)
    }

    /// Product of two normal-form monomials as `(sign, monomial)`, or `None`
    /// when an odd generator would appear twice.
    pub fn monomial_product(&self, a: &Monomial, b: &Monomial) -> Option<(bool, Monomial)> {
        let len = self.degrees.len();
        debug_assert!(a.0.len() == len && b.0.len() == len);
        // suffix[j] = degree of the part of `a` strictly after generator j
        let mut negative = false;
        let mut suffix = 0u32;
        let mut out = vec![0u16; len];
        for j in (0..len).rev() {
            let (ea, eb) = (a.0[j], b.0[j]);
            if eb > 0 {
                if self.degrees[j].is_odd() && ea + eb > 1 {
                    return None;
                }
                if eb % 2 == 1 && (suffix & self.degrees[j].mask()).count_ones() % 2 == 1 {
                    negative = !negative;
                }
            }
            out[j] = ea + eb;
            if ea % 2 == 1 {
                suffix ^= self.degrees[j].mask();
            }
        }
        Some((negative, Monomial(out)))
    }
}

impl fmt::Debug for GeneratorSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Sig(n={}, q={:?})", self.n, self.q)
    }
}

/// Exponent vector over the generators of a signature.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(pub Vec<u16>);

impl Monomial {
    pub fn one(len: usize) -> Self {
        Monomial(vec![0; len])
    }

    pub fn generator(len: usize, j: usize) -> Self {
        let mut e = vec![0; len];
        e[j] = 1;
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u16] {
        &self.0
    }

    pub fn total_order(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }
}

/// Total order first, then `g1` before `g2` (larger leading exponent first).
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_order()
            .cmp(&other.total_order())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sorts a word of generator indices by adjacent transpositions, picking up
/// `(-1)^⟨deg_i, deg_j⟩` per swap. The sign is `0` when an odd generator
/// repeats.
pub fn normalize_monomial(sig: &GeneratorSignature, word: &[usize]) -> Result<(i8, Monomial)> {
    let len = sig.num_generators();
    if let Some(bad) = word.iter().find(|&&j| j >= len) {
        return Err(Error::Signature(format!(
            "generator index {bad} out of range for {len} generators"
        )));
    }
    let mut w = word.to_vec();
    let mut sign: i8 = 1;
    for i in 1..w.len() {
        let mut k = i;
        while k > 0 && w[k - 1] > w[k] {
            if sig.degrees[w[k - 1]].parity_with(&sig.degrees[w[k]]) == 1 {
                sign = -sign;
            }
            w.swap(k - 1, k);
            k -= 1;
        }
    }
    let mut exps = vec![0u16; len];
    for &j in &w {
        exps[j] += 1;
    }
    let square_zero = exps.iter().enumerate().any(|(j, &e)| e > 1 && sig.is_odd(j));
    Ok((if square_zero { 0 } else { sign }, Monomial(exps)))
}

/// A truncated graded series in normal form.
#[derive(Clone, PartialEq, Eq)]
pub struct GradedSeries {
    sig: Arc<GeneratorSignature>,
    truncation: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl GradedSeries {
    pub fn zero(sig: Arc<GeneratorSignature>, truncation: usize) -> Self {
        GradedSeries { sig, truncation, terms: BTreeMap::new() }
    }

    pub fn constant(sig: Arc<GeneratorSignature>, truncation: usize, c: Rational) -> Self {
        let mut s = Self::zero(sig, truncation);
        let one = Monomial::one(s.sig.num_generators());
        s.add_term(one, c);
        s
    }

    pub fn one(sig: Arc<GeneratorSignature>, truncation: usize) -> Self {
        Self::constant(sig, truncation, Rational::one())
    }

    pub fn generator(sig: Arc<GeneratorSignature>, truncation: usize, j: usize) -> Result<Self> {
        let len = sig.num_generators();
        if j >= len {
            return Err(Error::Signature(format!("generator index {j} out of range for {len}")));
        }
        let mut s = Self::zero(sig, truncation);
        s.add_term(Monomial::generator(len, j), Rational::one());
        Ok(s)
    }

    /// Builds a series from raw terms, normalizing and truncating.
    pub fn from_terms<I>(sig: Arc<GeneratorSignature>, truncation: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Monomial, Rational)>,
    {
        let mut s = Self::zero(sig, truncation);
        for (m, c) in terms {
            if m.0.len() != s.sig.num_generators() {
                return Err(Error::Signature("monomial length does not match signature".into()));
            }
            if m.0.iter().enumerate().any(|(j, &e)| e > 1 && s.sig.is_odd(j)) {
                continue;
            }
            s.add_term(m, c);
        }
        Ok(s)
    }

    /// Adds `c·m`, dropping `m` when it exceeds the truncation order.
    pub(crate) fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() || m.total_order() > self.truncation {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn signature(&self) -> &Arc<GeneratorSignature> {
        &self.sig
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Rational> {
        &self.terms
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Smallest total order of a stored monomial.
    pub fn min_order(&self) -> Option<usize> {
        self.terms.keys().map(Monomial::total_order).min()
    }

    pub fn body(&self) -> Rational {
        self.coefficient(&Monomial::one(self.sig.num_generators()))
    }

    pub fn soul(&self) -> GradedSeries {
        let mut s = self.clone();
        s.terms.retain(|m, _| !m.is_one());
        s
    }

    pub fn body_soul_split(&self) -> (Rational, GradedSeries) {
        (self.body(), self.soul())
    }

    /// Degree if every stored monomial shares one; the zero series is
    /// homogeneous of every degree and reports `None`.
    pub fn homogeneous_degree(&self) -> Option<Degree> {
        let mut degs = self.terms.keys().map(|m| self.sig.monomial_degree(m));
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    pub fn is_homogeneous_of(&self, deg: &Degree) -> bool {
        self.terms.keys().all(|m| self.sig.monomial_degree(m) == *deg)
    }

    pub fn homogeneous_component(&self, deg: &Degree) -> Result<GradedSeries> {
        if deg.n() != self.sig.n() {
            return Err(Error::Signature(format!(
                "degree {deg} does not belong to n = {}",
                self.sig.n()
            )));
        }
        let mut s = self.clone();
        s.terms.retain(|m, _| self.sig.monomial_degree(m) == *deg);
        Ok(s)
    }

    pub fn truncate(&self, order: usize) -> Result<GradedSeries> {
        if order > self.truncation {
            return Err(Error::Truncation(format!(
                "cannot raise truncation from {} to {order}",
                self.truncation
            )));
        }
        let mut s = self.clone();
        s.truncation = order;
        s.terms.retain(|m, _| m.total_order() <= order);
        Ok(s)
    }

    /// Truncates to `min(self.truncation, order)`.
    pub fn truncate_to_at_most(&self, order: usize) -> GradedSeries {
        self.truncate(order.min(self.truncation)).expect("order is within range")
    }

    /// Equality in the quotient by monomials of order above `order`.
    pub fn eq_mod(&self, other: &GradedSeries, order: usize) -> bool {
        if self.sig != other.sig {
            return false;
        }
        let keep = |s: &GradedSeries| -> Vec<(Monomial, Rational)> {
            s.terms
                .iter()
                .filter(|(m, _)| m.total_order() <= order)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect()
        };
        keep(self) == keep(other)
    }

    fn check_compatible(&self, other: &GradedSeries) -> Result<()> {
        if self.sig != other.sig {
            return Err(Error::Signature(format!(
                "signature mismatch: {:?} vs {:?}",
                self.sig, other.sig
            )));
        }
        if self.truncation != other.truncation {
            return Err(Error::Truncation(format!(
                "truncation mismatch: {} vs {}",
                self.truncation, other.truncation
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &GradedSeries) -> Result<GradedSeries> {
        self.check_compatible(other)?;
        let mut s = self.clone();
        for (m, c) in &other.terms {
            s.add_term(m.clone(), c.clone());
        }
        Ok(s)
    }

    pub fn try_sub(&self, other: &GradedSeries) -> Result<GradedSeries> {
        self.check_compatible(other)?;
        let mut s = self.clone();
        for (m, c) in &other.terms {
            s.add_term(m.clone(), -c.clone());
        }
        Ok(s)
    }

    pub fn try_mul(&self, other: &GradedSeries) -> Result<GradedSeries> {
        self.check_compatible(other)?;
        let mut s = Self::zero(self.sig.clone(), self.truncation);
        for (ma, ca) in &self.terms {
            let oa = ma.total_order();
            for (mb, cb) in &other.terms {
                if oa + mb.total_order() > self.truncation {
                    continue;
                }
                if let Some((neg, m)) = self.sig.monomial_product(ma, mb) {
                    let c = ca * cb;
                    s.add_term(m, if neg { -c } else { c });
                }
            }
        }
        Ok(s)
    }

    pub fn scale(&self, c: &Rational) -> GradedSeries {
        if c.is_zero() {
            return Self::zero(self.sig.clone(), self.truncation);
        }
        let mut s = self.clone();
        for v in s.terms.values_mut() {
            *v *= c;
        }
        s
    }

    pub fn pow(&self, e: u32) -> GradedSeries {
        let mut acc = Self::one(self.sig.clone(), self.truncation);
        for _ in 0..e {
            if acc.is_zero() {
                break;
            }
            acc = &acc * self;
        }
        acc
    }

    /// Coefficients as `f64`, for numeric comparisons.
    pub fn to_f64_terms(&self) -> BTreeMap<Monomial, f64> {
        self.terms.iter().map(|(m, c)| (m.clone(), rational_to_f64(c))).collect()
    }
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

impl Add for &GradedSeries {
    type Output = GradedSeries;
    fn add(self, rhs: &GradedSeries) -> GradedSeries {
        self.try_add(rhs).expect("incompatible series in +")
    }
}

impl Sub for &GradedSeries {
    type Output = GradedSeries;
    fn sub(self, rhs: &GradedSeries) -> GradedSeries {
        self.try_sub(rhs).expect("incompatible series in -")
    }
}

impl Mul for &GradedSeries {
    type Output = GradedSeries;
    fn mul(self, rhs: &GradedSeries) -> GradedSeries {
        self.try_mul(rhs).expect("incompatible series in *")
    }
}

impl Neg for &GradedSeries {
    type Output = GradedSeries;
    fn neg(self) -> GradedSeries {
        self.scale(&-Rational::one())
    }
}

/// Writes `c·m` terms in the series literal grammar with variable prefix `var`.
pub(crate) fn write_terms<'a, I>(f: &mut fmt::Formatter<'_>, var: char, terms: I) -> fmt::Result
where
    I: IntoIterator<Item = (&'a [u16], &'a Rational)>,
{
    let mut first = true;
    for (exps, c) in terms {
        let negative = c.is_negative();
        let abs = c.abs();
        if first {
            if negative {
                write!(f, "-")?;
            }
        } else {
            write!(f, " {} ", if negative { '-' } else { '+' })?;
        }
        first = false;
        let factors: Vec<String> = exps
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(j, &e)| if e == 1 { format!("{var}{}", j + 1) } else { format!("{var}{}^{e}", j + 1) })
            .collect();
        let coef = if abs.is_integer() { abs.numer().to_string() } else { format!("{}/{}", abs.numer(), abs.denom()) };
        if factors.is_empty() {
            write!(f, "{coef}")?;
        } else if abs.is_one() {
            write!(f, "{}", factors.join("*"))?;
        } else {
            write!(f, "{coef}*{}", factors.join("*"))?;
        }
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

impl fmt::Display for GradedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, 'g', self.terms.iter().map(|(m, c)| (m.0.as_slice(), c)))
    }
}

impl fmt::Debug for GradedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [K={}]", self, self.truncation)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig111() -> Arc<GeneratorSignature> {
        Arc::new(GeneratorSignature::new(2, &[1, 1, 1]).unwrap())
    }

    fn gen(sig: &Arc<GeneratorSignature>, k: usize, j: usize) -> GradedSeries {
        GradedSeries::generator(sig.clone(), k, j).unwrap()
    }

    #[test]
    fn normalize_examples() {
        let sig = sig111();
        // θ·z·ξ → −ξθz
        let (sign, m) = normalize_monomial(&sig, &[1, 2, 0]).unwrap();
        assert_eq!(sign, -1);
        assert_eq!(m, Monomial(vec![1, 1, 1]));
        let (sign, _) = normalize_monomial(&sig, &[0, 0]).unwrap();
        assert_eq!(sign, 0);
        let (sign, m) = normalize_monomial(&sig, &[2, 2]).unwrap();
        assert_eq!(sign, 1);
        assert_eq!(m, Monomial(vec![0, 0, 2]));
        assert!(normalize_monomial(&sig, &[3]).is_err());
    }

    #[test]
    fn product_matches_bubble_sort() {
        let sig = Arc::new(GeneratorSignature::new(2, &[2, 1, 2]).unwrap());
        let words: Vec<Vec<usize>> = vec![vec![4, 0], vec![3, 1, 2], vec![2, 0, 4, 1], vec![3, 3, 4]];
        for a in &words {
            for b in &words {
                let (sa, ma) = normalize_monomial(&sig, a).unwrap();
                let (sb, mb) = normalize_monomial(&sig, b).unwrap();
                let joined: Vec<usize> = a.iter().chain(b).copied().collect();
                let (sab, mab) = normalize_monomial(&sig, &joined).unwrap();
                if sa == 0 || sb == 0 {
                    continue;
                }
                match sig.monomial_product(&ma, &mb) {
                    None => assert_eq!(sab, 0),
                    Some((neg, m)) => {
                        assert_eq!(m, mab);
                        assert_eq!(sa * sb * if neg { -1 } else { 1 }, sab);
                    }
                }
            }
        }
    }

    #[test]
    fn multiplication_examples() {
        let sig = sig111();
        let (xi, th) = (gen(&sig, 6, 0), gen(&sig, 6, 1));
        let xt = &xi * &th;
        assert!((&xt * &xt).is_zero());

        let s2 = Arc::new(GeneratorSignature::new(1, &[2]).unwrap());
        let t12 = &gen(&s2, 6, 0) * &gen(&s2, 6, 1);
        let a = &GradedSeries::one(s2.clone(), 6) + &t12;
        let expected = &GradedSeries::one(s2.clone(), 6) + &t12.scale(&int(2));
        assert_eq!(&a * &a, expected);
        assert_eq!(&a * &GradedSeries::one(s2, 6), a);
    }

    #[test]
    fn homogeneous_components_and_split() {
        let sig = sig111();
        let (xi, th, z) = (gen(&sig, 6, 0), gen(&sig, 6, 1), gen(&sig, 6, 2));
        let three = GradedSeries::constant(sig.clone(), 6, int(3));
        let xtz = &(&xi * &th) * &z;
        let s = &(&three + &xi) + &xtz.scale(&int(2));
        let d = |b: &[u8]| Degree::from_bits(b).unwrap();
        // ξθz has degree (0,0), so it sits in the degree-zero block
        assert_eq!(s.homogeneous_component(&d(&[0, 0])).unwrap(), &three + &xtz.scale(&int(2)));
        assert_eq!(s.homogeneous_component(&d(&[0, 1])).unwrap(), xi);
        assert!(s.homogeneous_component(&d(&[1, 1])).unwrap().is_zero());
        assert!(s.homogeneous_component(&d(&[1])).is_err());

        let (b, soul) = s.body_soul_split();
        assert_eq!(b, int(3));
        assert_eq!(&soul + &three, s);
        let zz = &z + &(&z * &z);
        assert_eq!(zz.body_soul_split(), (int(0), zz.clone()));
        let zero = GradedSeries::zero(sig, 6);
        assert_eq!(zero.body_soul_split(), (int(0), zero.clone()));
    }

    #[test]
    fn truncation() {
        let sig = sig111();
        let z = gen(&sig, 6, 2);
        let s = &(&(&GradedSeries::one(sig.clone(), 6) + &z) + &z.pow(2)) + &z.pow(3);
        let t = s.truncate(2).unwrap();
        assert_eq!(t.to_string(), "1 + g3 + g3^2");
        assert_eq!(s.truncate(6).unwrap(), s);
        assert!(t.truncate(3).is_err());
        assert!(matches!(s.try_mul(&t), Err(Error::Truncation(_))));
    }

    #[test]
    fn display() {
        let sig = Arc::new(GeneratorSignature::new(2, &[1, 1, 1]).unwrap());
        let s = GradedSeries::from_terms(
            sig,
            6,
            vec![
                (Monomial(vec![0, 0, 0]), int(3)),
                (Monomial(vec![1, 1, 0]), int(2)),
                (Monomial(vec![0, 0, 2]), rat(-1, 2)),
                (Monomial(vec![1, 0, 0]), int(-1)),
            ],
        )
        .unwrap();
        assert_eq!(s.to_string(), "3 - g1 + 2*g1*g2 - 1/2*g3^2");
    }
}
