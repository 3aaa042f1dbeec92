use serde::Serialize;

use crate::error::{Error, Result};
use crate::gseries::{Monomial, Rational};
use crate::par;

use super::berezin::BerezinVector;
use super::domain::{point_strings, Domain, Region};
use super::poly::BasePolynomial;
use super::superfn::SuperFunction;

/// How the base condition `φ_0(𝒰) ⊂ 𝒱` was established.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BaseCheck {
    /// Number of grid points tested; `0` when the target region is all space.
    pub samples: usize,
    /// Always "sampled, not proven" when `samples > 0`.
    pub note: &'static str,
}

impl BaseCheck {
    fn unconstrained() -> Self {
        BaseCheck { samples: 0, note: "target is all space" }
    }
}

/// Checks `(f_b)(x) ∈ target` on the sampling grid of `source`.
pub(crate) fn check_base_condition<F>(source: &Domain, target: &Region, degree: u32, base: F) -> Result<BaseCheck>
where
    F: Fn(&[Rational]) -> Vec<Rational> + Sync + Send,
{
    if matches!(target, Region::AllSpace) {
        return Ok(BaseCheck::unconstrained());
    }
    let grid = source.region().sample_grid(source.p(), degree as usize + 2);
    let failure = par::first_failure(&grid, |x| {
        let y = base(x);
        (!target.contains(&y)).then(|| (x.clone(), y))
    });
    match failure {
        Some((_, (x, y))) => Err(Error::Range {
            message: format!("base map sends the sample point to {:?}, outside the target region", point_strings(&y)),
            witness: point_strings(&x),
        }),
        None => Ok(BaseCheck { samples: grid.len(), note: "sampled, not proven" }),
    }
}

/// A ℤ₂ⁿ-morphism between domains, given by the pullbacks of the target
/// coordinates: `r` even coordinates `y^b`, then the formal `η^B`.
#[derive(Clone, PartialEq, Debug)]
pub struct DomainMorphism {
    source: Domain,
    target: Domain,
    truncation: usize,
    pullbacks: Vec<SuperFunction>,
    base_check: BaseCheck,
}

impl DomainMorphism {
    pub fn new(source: &Domain, target: &Domain, pullbacks: Vec<SuperFunction>, truncation: usize) -> Result<Self> {
        if source.n() != target.n() {
            return Err(Error::Signature(format!("source n = {} but target n = {}", source.n(), target.n())));
        }
        if pullbacks.len() != target.coordinate_count() {
            return Err(Error::Signature(format!(
                "expected {} pullbacks, got {}",
                target.coordinate_count(),
                pullbacks.len()
            )));
        }
        for (i, pb) in pullbacks.iter().enumerate() {
            if pb.signature() != source.formal_signature() || pb.vars() != source.p() {
                return Err(Error::Signature(format!(
                    "pullback of {} is not a function on the source domain",
                    target.coordinate_name(i)
                )));
            }
            if let Some(m) = pb.terms().keys().find(|m| m.total_order() > truncation) {
                return Err(Error::Truncation(format!(
                    "pullback of {} has a term of order {} > K = {truncation}",
                    target.coordinate_name(i),
                    m.total_order()
                )));
            }
            let deg = target.coordinate_degree(i);
            if let Some(m) = pb.terms().keys().find(|m| source.formal_signature().monomial_degree(m) != deg) {
                return Err(Error::Grading(format!(
                    "pullback of {} has degree {deg} but contains xi^{:?} of degree {}",
                    target.coordinate_name(i),
                    m.exponents(),
                    source.formal_signature().monomial_degree(m)
                )));
            }
        }
        let pullbacks: Vec<SuperFunction> = pullbacks.into_iter().map(|p| p.with_truncation(truncation)).collect();
        let r = target.p();
        let bodies: Vec<BasePolynomial> = pullbacks[..r].iter().map(SuperFunction::body).collect();
        let degree = bodies.iter().map(BasePolynomial::total_degree).max().unwrap_or(0);
        let base_check = check_base_condition(source, target.region(), degree, |x| bodies.iter().map(|b| b.eval(x)).collect())?;
        Ok(DomainMorphism { source: source.clone(), target: target.clone(), truncation, pullbacks, base_check })
    }

    /// Builds pullbacks from `(α, φ_α)` families, one family per target coordinate.
    pub fn from_families(
        source: &Domain,
        target: &Domain,
        truncation: usize,
        families: Vec<Vec<(Monomial, BasePolynomial)>>,
    ) -> Result<Self> {
        let pullbacks = families
            .into_iter()
            .map(|fam| {
                let mut f = SuperFunction::zero(source.formal_signature().clone(), source.p(), usize::MAX);
                for (m, poly) in fam {
                    if m.exponents().len() != source.formal_count() || poly.vars() != source.p() {
                        return Err(Error::Signature("pullback term does not fit the source domain".into()));
                    }
                    if m.exponents().iter().enumerate().any(|(j, &e)| e > 1 && source.formal_signature().is_odd(j)) {
                        return Err(Error::Grading(format!("odd formal coordinate repeated in {:?}", m.exponents())));
                    }
                    f.add_term(m, poly);
                }
                Ok(f)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(source, target, pullbacks, truncation)
    }

    pub fn identity(domain: &Domain, truncation: usize) -> Self {
        let sig = domain.formal_signature().clone();
        let p = domain.p();
        let mut pullbacks: Vec<SuperFunction> =
            (0..p).map(|a| SuperFunction::from_poly(sig.clone(), truncation, BasePolynomial::var(p, a))).collect();
        pullbacks.extend((0..domain.formal_count()).map(|j| SuperFunction::formal(sig.clone(), p, truncation, j)));
        Self::new(domain, domain, pullbacks, truncation).expect("identity is a valid morphism")
    }

    pub fn source(&self) -> &Domain {
        &self.source
    }

    pub fn target(&self) -> &Domain {
        &self.target
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn pullbacks(&self) -> &[SuperFunction] {
        &self.pullbacks
    }

    pub fn base_check(&self) -> &BaseCheck {
        &self.base_check
    }

    /// `|φ|(x) = (φ^b_0(x))`.
    pub fn base_map(&self, x: &[Rational]) -> Vec<Rational> {
        self.pullbacks[..self.target.p()].iter().map(|pb| pb.body().eval(x)).collect()
    }

    /// The same pullbacks on a smaller source region.
    pub fn restrict(&self, region: &Region) -> Result<Self> {
        if !self.source.region().includes(region) {
            return Err(Error::Range {
                message: "restriction region is not inside the source region".into(),
                witness: vec![],
            });
        }
        let source = self.source.with_region(region.clone())?;
        Self::new(&source, &self.target, self.pullbacks.clone(), self.truncation)
    }

    /// The same pullbacks with a different target region (for transitions
    /// whose image lands in an overlap box).
    pub fn with_target_region(&self, region: &Region) -> Result<Self> {
        let target = self.target.with_region(region.clone())?;
        Self::new(&self.source, &target, self.pullbacks.clone(), self.truncation)
    }

    /// `self ∘ first`, substituting `first`'s pullbacks into `self`'s.
    pub fn compose(&self, first: &DomainMorphism) -> Result<DomainMorphism> {
        compose_domain_morphisms(self, first)
    }

    pub fn to_berezin(&self) -> BerezinVector {
        super::berezin::morphism_to_berezin(self)
    }

    /// `φ × ψ` on the product domains.
    pub fn product(&self, other: &DomainMorphism) -> Result<DomainMorphism> {
        let source = self.source.product(&other.source)?;
        let target = self.target.product(&other.target)?;
        let k = self.truncation.min(other.truncation);
        let p = source.p();
        let sig = source.formal_signature().clone();
        let reindex = |f: &SuperFunction, second: bool| -> SuperFunction {
            let offset = if second { self.source.p() } else { 0 };
            let mut out = SuperFunction::zero(sig.clone(), p, k);
            for (m, poly) in f.terms() {
                let mut e = vec![0u16; sig.num_generators()];
                for (j, &x) in m.exponents().iter().enumerate() {
                    e[self.source.product_formal_index(&other.source, second, j)] = x;
                }
                out.add_term(Monomial(e), poly.embed(p, offset));
            }
            out
        };
        let mut pullbacks = Vec::with_capacity(target.coordinate_count());
        pullbacks.extend(self.pullbacks[..self.target.p()].iter().map(|f| reindex(f, false)));
        pullbacks.extend(other.pullbacks[..other.target.p()].iter().map(|f| reindex(f, true)));
        let mut formal: Vec<Option<SuperFunction>> = vec![None; target.formal_count()];
        for j in 0..self.target.formal_count() {
            let idx = self.target.product_formal_index(&other.target, false, j);
            formal[idx] = Some(reindex(&self.pullbacks[self.target.p() + j], false));
        }
        for j in 0..other.target.formal_count() {
            let idx = self.target.product_formal_index(&other.target, true, j);
            formal[idx] = Some(reindex(&other.pullbacks[other.target.p() + j], true));
        }
        pullbacks.extend(formal.into_iter().map(|f| f.expect("every product coordinate is assigned")));
        DomainMorphism::new(&source, &target, pullbacks, k)
    }
}

pub fn make_domain_morphism(
    source: &Domain,
    target: &Domain,
    truncation: usize,
    families: Vec<Vec<(Monomial, BasePolynomial)>>,
) -> Result<DomainMorphism> {
    DomainMorphism::from_families(source, target, truncation, families)
}

/// `g ∘ f`: `(g∘f)*(w) = Σ_α g_α(f*(y)) · (f*(η))^α`, truncated at
/// `min(K_f, K_g)`.
pub fn compose_domain_morphisms(g: &DomainMorphism, f: &DomainMorphism) -> Result<DomainMorphism> {
    if !f.target.same_shape(&g.source) {
        return Err(Error::Endpoint(format!(
            "target of the first map ({}|{:?}) differs from the source of the second ({}|{:?})",
            f.target.p(),
            f.target.q(),
            g.source.p(),
            g.source.q()
        )));
    }
    let degree = f.pullbacks[..f.target.p()].iter().map(|pb| pb.body().total_degree()).max().unwrap_or(0);
    check_base_condition(&f.source, g.source.region(), degree, |x| f.base_map(x))?;

    let k = f.truncation.min(g.truncation);
    let sig = f.source.formal_signature().clone();
    let p = f.source.p();
    let r = f.target.p();
    let even: Vec<SuperFunction> = f.pullbacks[..r].iter().map(|pb| pb.with_truncation(k)).collect();
    let odd: Vec<SuperFunction> = f.pullbacks[r..].iter().map(|pb| pb.with_truncation(k)).collect();
    let mut powers: Vec<Vec<SuperFunction>> = odd.iter().map(|o| vec![o.clone()]).collect();
    let one = SuperFunction::from_poly(sig.clone(), k, BasePolynomial::one(p));

    let mut pullbacks = Vec::with_capacity(g.pullbacks.len());
    for gpb in &g.pullbacks {
        let mut acc = SuperFunction::zero(sig.clone(), p, k);
        for (alpha, coeff) in gpb.terms() {
            if alpha.total_order() > k {
                continue;
            }
            let mut formal = one.clone();
            for (j, &e) in alpha.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[j].len() < e as usize {
                    let next = powers[j].last().unwrap().mul(&odd[j]);
                    powers[j].push(next);
                }
                formal = formal.mul(&powers[j][e as usize - 1]);
            }
            if formal.is_zero() {
                continue;
            }
            let c = SuperFunction::eval_polynomial(coeff, &even, sig.clone(), p, k);
            acc = acc.add(&c.mul(&formal));
        }
        pullbacks.push(acc);
    }
    DomainMorphism::new(&f.source, &g.target, pullbacks, k)
}
