//! Λ-points of domains and the functor-of-points action.
//!
//! A Λ-point of `𝒰^{p|q}` is identified with its coordinates
//! `(x_||, x̊_Λ, ξ_Λ) ∈ 𝒰^p × Λ̊₀^p × Π Λ_{γ_i}^{q_i}`.

mod derivative;
mod naturality;
mod rotation;

pub use derivative::{
    check_lambda0_linearity, check_psi_linearity, gateaux_derivative, LinearitySample, LinearityWitness,
    PsiLinearityWitness,
};
pub use naturality::{check_naturality_square, naturality_square_with, NaturalityWitness};
pub use rotation::{formal_rotation, PairingAlgebra};

use std::collections::HashMap;

use num_traits::Zero;
use serde::Serialize;

use crate::domains::{BerezinVector, Domain, DomainMorphism};
use crate::error::{Error, Result};
use crate::galgebra::{AlgebraMorphism, GrassmannAlgebra};
use crate::gseries::{GradedSeries, Monomial, Rational};

/// Harness outcome with the bookkeeping every report carries.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HarnessReport<W> {
    #[serde(flatten)]
    pub verdict: crate::verdict::Verdict<W>,
    pub samples_run: usize,
    pub effective_truncation: usize,
}

#[derive(Clone, PartialEq, Debug)]
pub struct LambdaPoint {
    domain: Domain,
    algebra: GrassmannAlgebra,
    base: Vec<Rational>,
    even_souls: Vec<GradedSeries>,
    formal: Vec<GradedSeries>,
}

fn retruncate(alg: &GrassmannAlgebra, s: &GradedSeries) -> Result<GradedSeries> {
    alg.check_series(s)?;
    Ok(if s.truncation() == alg.truncation() {
        s.clone()
    } else if s.truncation() > alg.truncation() {
        s.truncate(alg.truncation())?
    } else {
        return Err(Error::Truncation(format!(
            "component known to order {} only, algebra needs {}",
            s.truncation(),
            alg.truncation()
        )));
    })
}

impl LambdaPoint {
    pub fn new(
        domain: &Domain,
        algebra: &GrassmannAlgebra,
        base: Vec<Rational>,
        even_souls: Vec<GradedSeries>,
        formal: Vec<GradedSeries>,
    ) -> Result<Self> {
        let pt = Self::unchecked_region(domain, algebra, base, even_souls, formal)?;
        if !domain.region().contains(&pt.base) {
            return Err(Error::Range {
                message: "base point lies outside the domain region".into(),
                witness: pt.base.iter().map(|x| x.to_string()).collect(),
            });
        }
        Ok(pt)
    }

    /// Validates degrees but not region membership; used for points of the
    /// ambient space `ℝ^{p|q}(Λ)`.
    pub(crate) fn unchecked_region(
        domain: &Domain,
        algebra: &GrassmannAlgebra,
        base: Vec<Rational>,
        even_souls: Vec<GradedSeries>,
        formal: Vec<GradedSeries>,
    ) -> Result<Self> {
        if domain.n() != algebra.n() {
            return Err(Error::Signature(format!("domain n = {} but algebra n = {}", domain.n(), algebra.n())));
        }
        if base.len() != domain.p() || even_souls.len() != domain.p() || formal.len() != domain.formal_count() {
            return Err(Error::Signature(format!(
                "a point of a {}|{:?} domain needs {} base values, {} souls and {} formal components",
                domain.p(),
                domain.q(),
                domain.p(),
                domain.p(),
                domain.formal_count()
            )));
        }
        let zero = algebra.signature().zero_degree();
        let even_souls = even_souls.iter().map(|s| retruncate(algebra, s)).collect::<Result<Vec<_>>>()?;
        let formal = formal.iter().map(|s| retruncate(algebra, s)).collect::<Result<Vec<_>>>()?;
        for (a, s) in even_souls.iter().enumerate() {
            if !s.body().is_zero() || !s.is_homogeneous_of(&zero) {
                return Err(Error::Grading(format!("even soul {} must be a degree-0 element with no body: {s}", a + 1)));
            }
        }
        for (j, s) in formal.iter().enumerate() {
            let deg = domain.formal_signature().generator_degree(j);
            if !s.is_homogeneous_of(&deg) {
                return Err(Error::Grading(format!("formal component {} must have degree {deg}: {s}", j + 1)));
            }
        }
        Ok(LambdaPoint { domain: domain.clone(), algebra: algebra.clone(), base, even_souls, formal })
    }

    /// The point with the given base and all souls and formal parts zero.
    pub fn from_base(domain: &Domain, algebra: &GrassmannAlgebra, base: Vec<Rational>) -> Result<Self> {
        Self::new(
            domain,
            algebra,
            base,
            vec![algebra.zero(); domain.p()],
            vec![algebra.zero(); domain.formal_count()],
        )
    }

    /// Builds a point from full even coordinates `x^a_Λ ∈ Λ₀` (body = base).
    pub fn from_coordinates(
        domain: &Domain,
        algebra: &GrassmannAlgebra,
        even: Vec<GradedSeries>,
        formal: Vec<GradedSeries>,
    ) -> Result<Self> {
        let base = even.iter().map(GradedSeries::body).collect();
        let souls = even.iter().map(GradedSeries::soul).collect();
        Self::new(domain, algebra, base, souls, formal)
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn algebra(&self) -> &GrassmannAlgebra {
        &self.algebra
    }

    pub fn base(&self) -> &[Rational] {
        &self.base
    }

    pub fn even_souls(&self) -> &[GradedSeries] {
        &self.even_souls
    }

    pub fn formal(&self) -> &[GradedSeries] {
        &self.formal
    }

    /// `x^a_Λ = x^a_|| + x̊^a_Λ`.
    pub fn even_coordinate(&self, a: usize) -> GradedSeries {
        &self.algebra.constant(self.base[a].clone()) + &self.even_souls[a]
    }

    pub fn even_coordinates(&self) -> Vec<GradedSeries> {
        (0..self.domain.p()).map(|a| self.even_coordinate(a)).collect()
    }

    /// The same coordinates viewed in another domain of the same shape.
    pub fn with_domain(&self, domain: &Domain) -> Result<Self> {
        if !self.domain.same_shape(domain) {
            return Err(Error::Endpoint("domains have different coordinates".into()));
        }
        Self::new(domain, &self.algebra, self.base.clone(), self.even_souls.clone(), self.formal.clone())
    }

    pub fn truncate_to(&self, k: usize) -> LambdaPoint {
        let k = k.min(self.algebra.truncation());
        let alg = self.algebra.with_truncation(k);
        LambdaPoint {
            domain: self.domain.clone(),
            algebra: alg,
            base: self.base.clone(),
            even_souls: self.even_souls.iter().map(|s| s.truncate_to_at_most(k)).collect(),
            formal: self.formal.iter().map(|s| s.truncate_to_at_most(k)).collect(),
        }
    }

    /// Equality of coordinates modulo monomials of order above `k`.
    pub fn eq_mod(&self, other: &LambdaPoint, k: usize) -> bool {
        self.domain.same_shape(&other.domain)
            && self.base == other.base
            && self.even_souls.iter().zip(&other.even_souls).all(|(a, b)| a.eq_mod(b, k))
            && self.formal.iter().zip(&other.formal).all(|(a, b)| a.eq_mod(b, k))
    }

    pub fn describe(&self) -> serde_json::Value {
        serde_json::json!({
            "base": self.base.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            "even_souls": self.even_souls.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
            "formal": self.formal.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
            "algebra": self.algebra.spec(),
        })
    }
}

/// A vector of `ℝ^{p|q}(Λ)`: even components in `Λ₀` (their bodies form
/// `v_||`) and formal components of the matching degrees.
#[derive(Clone, PartialEq, Debug)]
pub struct TangentVector {
    algebra: GrassmannAlgebra,
    even: Vec<GradedSeries>,
    formal: Vec<GradedSeries>,
}

impl TangentVector {
    pub fn new(domain: &Domain, algebra: &GrassmannAlgebra, even: Vec<GradedSeries>, formal: Vec<GradedSeries>) -> Result<Self> {
        if even.len() != domain.p() || formal.len() != domain.formal_count() {
            return Err(Error::Signature("tangent vector has the wrong number of components".into()));
        }
        let zero = algebra.signature().zero_degree();
        let even = even.iter().map(|s| retruncate(algebra, s)).collect::<Result<Vec<_>>>()?;
        let formal = formal.iter().map(|s| retruncate(algebra, s)).collect::<Result<Vec<_>>>()?;
        if let Some(s) = even.iter().find(|s| !s.is_homogeneous_of(&zero)) {
            return Err(Error::Grading(format!("even component must have degree 0: {s}")));
        }
        for (j, s) in formal.iter().enumerate() {
            if !s.is_homogeneous_of(&domain.formal_signature().generator_degree(j)) {
                return Err(Error::Grading(format!("formal component {} has the wrong degree: {s}", j + 1)));
            }
        }
        Ok(TangentVector { algebra: algebra.clone(), even, formal })
    }

    pub fn zero(domain: &Domain, algebra: &GrassmannAlgebra) -> Self {
        TangentVector {
            algebra: algebra.clone(),
            even: vec![algebra.zero(); domain.p()],
            formal: vec![algebra.zero(); domain.formal_count()],
        }
    }

    pub fn algebra(&self) -> &GrassmannAlgebra {
        &self.algebra
    }

    pub fn even(&self) -> &[GradedSeries] {
        &self.even
    }

    pub fn formal(&self) -> &[GradedSeries] {
        &self.formal
    }

    pub fn base(&self) -> Vec<Rational> {
        self.even.iter().map(GradedSeries::body).collect()
    }

    /// Componentwise action `a·(v^a, w^A)` of `a ∈ Λ₀`.
    pub fn scale_by(&self, a: &GradedSeries) -> Result<Self> {
        let zero = self.algebra.signature().zero_degree();
        if !a.is_homogeneous_of(&zero) {
            return Err(Error::Grading(format!("scalar {a} is not in the degree-zero part")));
        }
        let a = retruncate(&self.algebra, a)?;
        Ok(TangentVector {
            algebra: self.algebra.clone(),
            even: self.even.iter().map(|v| &a * v).collect(),
            formal: self.formal.iter().map(|v| &a * v).collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Self {
        TangentVector {
            algebra: self.algebra.clone(),
            even: self.even.iter().zip(&other.even).map(|(a, b)| a + b).collect(),
            formal: self.formal.iter().zip(&other.formal).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn truncate_to(&self, k: usize) -> Self {
        let k = k.min(self.algebra.truncation());
        TangentVector {
            algebra: self.algebra.with_truncation(k),
            even: self.even.iter().map(|s| s.truncate_to_at_most(k)).collect(),
            formal: self.formal.iter().map(|s| s.truncate_to_at_most(k)).collect(),
        }
    }

    pub fn eq_mod(&self, other: &Self, k: usize) -> bool {
        self.even.len() == other.even.len()
            && self.formal.len() == other.formal.len()
            && self.even.iter().zip(&other.even).all(|(a, b)| a.eq_mod(b, k))
            && self.formal.iter().zip(&other.formal).all(|(a, b)| a.eq_mod(b, k))
    }

    pub fn components(&self) -> impl Iterator<Item = &GradedSeries> {
        self.even.iter().chain(&self.formal)
    }
}

/// Caches ordered products `ξ_Λ^α` and commutative products `x̊_Λ^β`.
pub(crate) struct PowerCache<'a> {
    formal: &'a [GradedSeries],
    souls: &'a [GradedSeries],
    one: GradedSeries,
    formal_powers: Vec<Vec<GradedSeries>>,
    soul_powers: Vec<Vec<GradedSeries>>,
    formal_products: HashMap<Monomial, GradedSeries>,
    soul_products: HashMap<Vec<u32>, GradedSeries>,
}

impl<'a> PowerCache<'a> {
    pub(crate) fn new(one: GradedSeries, souls: &'a [GradedSeries], formal: &'a [GradedSeries]) -> Self {
        PowerCache {
            formal,
            souls,
            one,
            formal_powers: formal.iter().map(|s| vec![s.clone()]).collect(),
            soul_powers: souls.iter().map(|s| vec![s.clone()]).collect(),
            formal_products: HashMap::new(),
            soul_products: HashMap::new(),
        }
    }

    fn power(powers: &mut [Vec<GradedSeries>], base: &[GradedSeries], i: usize, e: usize) -> GradedSeries {
        while powers[i].len() < e {
            let next = powers[i].last().unwrap() * &base[i];
            powers[i].push(next);
        }
        powers[i][e - 1].clone()
    }

    /// `(ξ^1_Λ)^{α_1} ⋯ (ξ^{|q|}_Λ)^{α_{|q|}}`, in coordinate order.
    pub(crate) fn formal_monomial(&mut self, alpha: &Monomial) -> GradedSeries {
        if let Some(s) = self.formal_products.get(alpha) {
            return s.clone();
        }
        let mut acc = self.one.clone();
        for (j, &e) in alpha.exponents().iter().enumerate() {
            if e > 0 {
                let pw = Self::power(&mut self.formal_powers, self.formal, j, e as usize);
                acc = &acc * &pw;
            }
            if acc.is_zero() {
                break;
            }
        }
        self.formal_products.insert(alpha.clone(), acc.clone());
        acc
    }

    pub(crate) fn soul_monomial(&mut self, beta: &[u32]) -> GradedSeries {
        if let Some(s) = self.soul_products.get(beta) {
            return s.clone();
        }
        let mut acc = self.one.clone();
        for (a, &e) in beta.iter().enumerate() {
            if e > 0 {
                let pw = Self::power(&mut self.soul_powers, self.souls, a, e as usize);
                acc = &acc * &pw;
            }
            if acc.is_zero() {
                break;
            }
        }
        self.soul_products.insert(beta.to_vec(), acc.clone());
        acc
    }
}

/// `y^𝔟_Λ = Σ_{α,β} F^𝔟_{αβ}(x_||) x̊_Λ^β ξ_Λ^α`, exact modulo the effective
/// truncation `min(K_Λ, K_F)`. The target base `F^b_{00}(x_||)` must lie in
/// the target region.
pub fn evaluate(f: &BerezinVector, pt: &LambdaPoint) -> Result<LambdaPoint> {
    let (even, formal, k) = evaluate_components(f, pt)?;
    let alg = pt.algebra.with_truncation(k);
    LambdaPoint::from_coordinates(f.target(), &alg, even, formal)
}

pub(crate) fn evaluate_components(f: &BerezinVector, pt: &LambdaPoint) -> Result<(Vec<GradedSeries>, Vec<GradedSeries>, usize)> {
    if !pt.domain.same_shape(f.source()) {
        return Err(Error::Endpoint(format!(
            "point of a {}|{:?} domain given to a map from {}|{:?}",
            pt.domain.p(),
            pt.domain.q(),
            f.source().p(),
            f.source().q()
        )));
    }
    let k = pt.algebra.truncation().min(f.truncation());
    let pt = pt.truncate_to(k);
    let mut cache = PowerCache::new(pt.algebra.one(), &pt.even_souls, &pt.formal);
    let mut values = Vec::with_capacity(f.target().coordinate_count());
    for family in f.coefficients() {
        let mut acc = pt.algebra.zero();
        for ((alpha, beta), c) in family {
            let beta_order: u32 = beta.iter().sum();
            if alpha.total_order() + 2 * beta_order as usize > k {
                continue;
            }
            let value = c.eval(&pt.base);
            if value.is_zero() {
                continue;
            }
            let xi = cache.formal_monomial(alpha);
            if xi.is_zero() {
                continue;
            }
            let souls = cache.soul_monomial(beta);
            acc = &acc + &(&souls * &xi).scale(&value);
        }
        values.push(acc);
    }
    let formal = values.split_off(f.target().p());
    Ok((values, formal, k))
}

pub fn evaluate_morphism(phi: &DomainMorphism, pt: &LambdaPoint) -> Result<LambdaPoint> {
    evaluate(&phi.to_berezin(), pt)
}

/// Applies `ψ*` to full coordinates `(x^a_Λ, ξ^A_Λ)`.
pub(crate) fn push_components(
    psi: &AlgebraMorphism,
    even: &[GradedSeries],
    formal: &[GradedSeries],
) -> Result<(Vec<GradedSeries>, Vec<GradedSeries>)> {
    let even = even.iter().map(|s| psi.apply(s)).collect::<Result<Vec<_>>>()?;
    let formal = formal.iter().map(|s| psi.apply(s)).collect::<Result<Vec<_>>>()?;
    Ok((even, formal))
}

/// `M(ψ*)`: `m* ↦ ψ* ∘ m*`, applied componentwise. The base is unchanged.
pub fn push_point(psi: &AlgebraMorphism, pt: &LambdaPoint) -> Result<LambdaPoint> {
    if psi.source().signature() != pt.algebra.signature() {
        return Err(Error::Signature(format!(
            "point over {:?} pushed along a morphism from {:?}",
            pt.algebra,
            psi.source()
        )));
    }
    let souls = pt.even_souls.iter().map(|s| psi.apply(s)).collect::<Result<Vec<_>>>()?;
    let formal = pt.formal.iter().map(|s| psi.apply(s)).collect::<Result<Vec<_>>>()?;
    let k = souls.iter().chain(&formal).map(GradedSeries::truncation).min().unwrap_or(psi.effective_truncation().min(pt.algebra.truncation()));
    let alg = psi.target().with_truncation(k);
    LambdaPoint::new(&pt.domain, &alg, pt.base.clone(), souls, formal)
}
