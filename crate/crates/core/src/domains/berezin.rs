use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gseries::{rational_to_f64, Monomial, Rational};
use crate::verdict::Verdict;

use super::domain::Domain;
use super::morphism::{check_base_condition, BaseCheck, DomainMorphism};
use super::poly::BasePolynomial;
use super::superfn::SuperFunction;

/// Step used for finite differences of opaque coefficients.
pub const OPAQUE_STEP: (i64, i64) = (1, 100_000);
/// Tolerance for finite-difference verdicts on opaque coefficients.
pub const OPAQUE_TOLERANCE: f64 = 1e-9;

type RealFn = dyn Fn(&[Rational]) -> Rational + Send + Sync;

/// A coefficient function known only through evaluation at rational points.
/// Used to exercise the classification criterion on non-polynomial data.
#[derive(Clone)]
pub struct OpaqueFn {
    name: String,
    f: Arc<RealFn>,
}

impl OpaqueFn {
    pub fn new(name: impl Into<String>, f: impl Fn(&[Rational]) -> Rational + Send + Sync + 'static) -> Self {
        OpaqueFn { name: name.into(), f: Arc::new(f) }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, x: &[Rational]) -> Rational {
        (self.f)(x)
    }
}

impl PartialEq for OpaqueFn {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.f, &other.f)
    }
}

impl fmt::Debug for OpaqueFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "opaque:{}", self.name)
    }
}

#[derive(Clone, PartialEq, Debug)]
pub enum Coefficient {
    Poly(BasePolynomial),
    Opaque(OpaqueFn),
}

impl Coefficient {
    pub fn eval(&self, x: &[Rational]) -> Rational {
        match self {
            Coefficient::Poly(p) => p.eval(x),
            Coefficient::Opaque(o) => o.eval(x),
        }
    }

    pub fn as_poly(&self) -> Option<&BasePolynomial> {
        match self {
            Coefficient::Poly(p) => Some(p),
            Coefficient::Opaque(_) => None,
        }
    }

    fn describe(&self) -> String {
        match self {
            Coefficient::Poly(p) => p.to_string(),
            Coefficient::Opaque(o) => format!("opaque:{}", o.name),
        }
    }
}

/// Index `(α, β)` of the coefficient `F_{αβ}` of `X^β Ξ^α`.
pub type BerezinKey = (Monomial, Vec<u32>);

/// A vector of Berezin-algebra elements, one per target coordinate:
/// `F^𝔟 = Σ F^𝔟_{αβ}(x) X^β Ξ^α`. Every natural transformation between the
/// functors of points of two domains is of this form.
#[derive(Clone, PartialEq, Debug)]
pub struct BerezinVector {
    source: Domain,
    target: Domain,
    truncation: usize,
    coefficients: Vec<BTreeMap<BerezinKey, Coefficient>>,
    base_check: BaseCheck,
}

impl BerezinVector {
    pub fn new(
        source: &Domain,
        target: &Domain,
        truncation: usize,
        coefficients: Vec<BTreeMap<BerezinKey, Coefficient>>,
    ) -> Result<Self> {
        if source.n() != target.n() {
            return Err(Error::Signature("source and target have different n".into()));
        }
        if coefficients.len() != target.coordinate_count() {
            return Err(Error::Signature(format!(
                "expected {} coefficient families, got {}",
                target.coordinate_count(),
                coefficients.len()
            )));
        }
        let sig = source.formal_signature();
        let mut cleaned = Vec::with_capacity(coefficients.len());
        for (i, family) in coefficients.into_iter().enumerate() {
            let deg = target.coordinate_degree(i);
            let mut out = BTreeMap::new();
            for ((alpha, beta), c) in family {
                if alpha.exponents().len() != sig.num_generators() || beta.len() != source.p() {
                    return Err(Error::Signature(format!("index shape mismatch in {}", target.coordinate_name(i))));
                }
                if alpha.exponents().iter().enumerate().any(|(j, &e)| e > 1 && sig.is_odd(j)) {
                    return Err(Error::Grading(format!("odd formal coordinate repeated in {:?}", alpha.exponents())));
                }
                if alpha.total_order() > truncation {
                    return Err(Error::Truncation(format!("|alpha| = {} exceeds K = {truncation}", alpha.total_order())));
                }
                if sig.monomial_degree(&alpha) != deg {
                    return Err(Error::Grading(format!(
                        "F of {} has degree {deg} but Xi^{:?} has degree {}",
                        target.coordinate_name(i),
                        alpha.exponents(),
                        sig.monomial_degree(&alpha)
                    )));
                }
                match &c {
                    Coefficient::Poly(p) if p.vars() != source.p() => {
                        return Err(Error::Signature("coefficient polynomial has wrong arity".into()))
                    }
                    Coefficient::Poly(p) if p.is_zero() => continue,
                    _ => {}
                }
                out.insert((alpha, beta), c);
            }
            cleaned.push(out);
        }
        let zero_key = (Monomial::one(sig.num_generators()), vec![0; source.p()]);
        let bodies: Vec<Option<Coefficient>> = cleaned[..target.p()].iter().map(|f| f.get(&zero_key).cloned()).collect();
        let degree = bodies
            .iter()
            .map(|c| match c {
                Some(Coefficient::Poly(p)) => p.total_degree(),
                Some(Coefficient::Opaque(_)) => 2,
                None => 0,
            })
            .max()
            .unwrap_or(0);
        let base_check = check_base_condition(source, target.region(), degree, |x| {
            bodies.iter().map(|c| c.as_ref().map_or_else(Rational::zero, |c| c.eval(x))).collect()
        })?;
        Ok(BerezinVector { source: source.clone(), target: target.clone(), truncation, coefficients: cleaned, base_check })
    }

    pub fn zero(source: &Domain, target: &Domain, truncation: usize) -> Result<Self> {
        Self::new(source, target, truncation, vec![BTreeMap::new(); target.coordinate_count()])
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

    pub fn coefficients(&self) -> &[BTreeMap<BerezinKey, Coefficient>] {
        &self.coefficients
    }

    pub fn base_check(&self) -> &BaseCheck {
        &self.base_check
    }

    pub fn coefficient(&self, coordinate: usize, alpha: &Monomial, beta: &[u32]) -> Option<&Coefficient> {
        self.coefficients[coordinate].get(&(alpha.clone(), beta.to_vec()))
    }

    pub fn is_polynomial(&self) -> bool {
        self.coefficients.iter().flat_map(|f| f.values()).all(|c| c.as_poly().is_some())
    }

    /// A copy with one coefficient replaced (or removed when `None`),
    /// without rerunning validation. Used to build negative controls.
    pub fn with_coefficient(&self, coordinate: usize, key: BerezinKey, value: Option<Coefficient>) -> Self {
        let mut out = self.clone();
        match value {
            Some(c) => out.coefficients[coordinate].insert(key, c),
            None => out.coefficients[coordinate].remove(&key),
        };
        out
    }
}

/// `F_{αβ} = (1/β!) ∂^β φ_α`. Polynomials have finitely many nonzero
/// Taylor coefficients, so the result is finite.
pub fn morphism_to_berezin(phi: &DomainMorphism) -> BerezinVector {
    let coefficients = phi
        .pullbacks()
        .iter()
        .map(|pb| {
            let mut family = BTreeMap::new();
            for (alpha, poly) in pb.terms() {
                for beta in multi_indices_below(&poly.degrees()) {
                    let c = poly.taylor_coefficient(&beta);
                    if !c.is_zero() {
                        family.insert((alpha.clone(), beta), Coefficient::Poly(c));
                    }
                }
            }
            family
        })
        .collect();
    BerezinVector {
        source: phi.source().clone(),
        target: phi.target().clone(),
        truncation: phi.truncation(),
        coefficients,
        base_check: phi.base_check().clone(),
    }
}

/// All `β` with `β ≤ bounds` componentwise, in lexicographic order.
pub(crate) fn multi_indices_below(bounds: &[u32]) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for &b in bounds {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..=b).map(move |k| {
                    let mut v = prefix.clone();
                    v.push(k);
                    v
                })
            })
            .collect();
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropagationWitness {
    pub coordinate: String,
    pub alpha: Vec<u16>,
    pub gamma: Vec<u32>,
    pub direction: String,
    /// `F_{αγ}`.
    pub left: String,
    /// `(1/γ_a) ∂_{x^a} F_{α,γ−e_a}`.
    pub right: String,
    /// Sample point for numeric (opaque) verdicts.
    pub at: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropagationReport {
    #[serde(flatten)]
    pub verdict: Verdict<PropagationWitness>,
    /// True when an opaque coefficient forced a finite-difference comparison.
    pub numeric: bool,
    pub relations_checked: usize,
}

/// Decides whether `F` comes from a morphism: for every stored `(α, γ)` with
/// `γ ≠ 0` and every `a` with `γ_a ≠ 0`,
/// `F_{αγ} = (1/γ_a) ∂_{x^a} F_{α,γ−e_a}`, and every coefficient that the
/// relation produces from a stored one is itself stored. Absent coefficients
/// count as zero. The first failure in lexicographic `(𝔟, α, γ, a)` order
/// is reported.
pub fn berezin_satisfies_propagation(f: &BerezinVector) -> PropagationReport {
    let p = f.source.p();
    let mut numeric = false;
    let mut checked = 0usize;
    let samples = f.source.region().sample_grid(p, 4);
    for (b, family) in f.coefficients.iter().enumerate() {
        let mut candidates: BTreeSet<(Vec<u16>, Vec<u32>, usize)> = BTreeSet::new();
        for (alpha, beta) in family.keys() {
            for a in 0..p {
                if beta[a] > 0 {
                    candidates.insert((alpha.exponents().to_vec(), beta.clone(), a));
                }
                let mut up = beta.clone();
                up[a] += 1;
                candidates.insert((alpha.exponents().to_vec(), up, a));
            }
        }
        for (alpha_e, gamma, a) in candidates {
            checked += 1;
            let alpha = Monomial(alpha_e);
            let mut lower = gamma.clone();
            lower[a] -= 1;
            let left = family.get(&(alpha.clone(), gamma.clone()));
            let below = family.get(&(alpha.clone(), lower));
            let scale = Rational::new(BigInt::from(1), BigInt::from(gamma[a]));
            let witness = |left: String, right: String, at: Option<Vec<String>>| PropagationWitness {
                coordinate: f.target.coordinate_name(b),
                alpha: alpha.exponents().to_vec(),
                gamma: gamma.clone(),
                direction: format!("x{}", a + 1),
                left,
                right,
                at,
            };
            let exact_left = match left {
                None => Some(BasePolynomial::zero(p)),
                Some(Coefficient::Poly(q)) => Some(q.clone()),
                Some(Coefficient::Opaque(_)) => None,
            };
            let exact_right = match below {
                None => Some(BasePolynomial::zero(p)),
                Some(Coefficient::Poly(q)) => Some(q.derivative(a).scale(&scale)),
                Some(Coefficient::Opaque(_)) => None,
            };
            if let (Some(l), Some(r)) = (&exact_left, &exact_right) {
                if l != r {
                    return PropagationReport {
                        verdict: Verdict::Fail(witness(l.to_string(), r.to_string(), None)),
                        numeric,
                        relations_checked: checked,
                    };
                }
                continue;
            }
            numeric = true;
            for x in &samples {
                let lv = left.map_or(0.0, |c| rational_to_f64(&c.eval(x)));
                let rv = match below {
                    None => 0.0,
                    Some(Coefficient::Poly(q)) => rational_to_f64(&q.derivative(a).scale(&scale).eval(x)),
                    Some(Coefficient::Opaque(o)) => rational_to_f64(&scale) * central_difference(o, x, a),
                };
                if (lv - rv).abs() > OPAQUE_TOLERANCE * lv.abs().max(rv.abs()).max(1.0) {
                    let describe = |c: Option<&Coefficient>| c.map_or_else(|| "0".to_string(), Coefficient::describe);
                    return PropagationReport {
                        verdict: Verdict::Fail(witness(
                            format!("{} = {lv}", describe(left)),
                            format!("d/dx{} of {} = {rv}", a + 1, describe(below)),
                            Some(x.iter().map(|v| v.to_string()).collect()),
                        )),
                        numeric,
                        relations_checked: checked,
                    };
                }
            }
        }
    }
    PropagationReport { verdict: Verdict::Pass, numeric, relations_checked: checked }
}

fn central_difference(o: &OpaqueFn, x: &[Rational], a: usize) -> f64 {
    let h = Rational::new(BigInt::from(OPAQUE_STEP.0), BigInt::from(OPAQUE_STEP.1));
    let mut plus = x.to_vec();
    plus[a] += &h;
    let mut minus = x.to_vec();
    minus[a] -= &h;
    rational_to_f64(&((o.eval(&plus) - o.eval(&minus)) / (h * Rational::from_integer(2.into()))))
}

/// Recovers the morphism `φ^𝔟_α = F^𝔟_{α0}` from a vector that passes the
/// propagation criterion.
pub fn berezin_to_morphism(f: &BerezinVector) -> Result<DomainMorphism> {
    if !f.is_polynomial() {
        return Err(Error::Classification("opaque coefficients cannot be turned into pullbacks".into()));
    }
    let report = berezin_satisfies_propagation(f);
    if let Verdict::Fail(w) = report.verdict {
        return Err(Error::Classification(format!(
            "({}, alpha={:?}, gamma={:?}, {}): left {} vs right {}",
            w.coordinate, w.alpha, w.gamma, w.direction, w.left, w.right
        )));
    }
    let p = f.source.p();
    let zero_beta = vec![0u32; p];
    let pullbacks = f
        .coefficients
        .iter()
        .map(|family| {
            let mut sf = SuperFunction::zero(f.source.formal_signature().clone(), p, f.truncation);
            for ((alpha, beta), c) in family {
                if *beta == zero_beta {
                    sf.add_term(alpha.clone(), c.as_poly().expect("checked polynomial").clone());
                }
            }
            sf
        })
        .collect();
    DomainMorphism::new(&f.source, &f.target, pullbacks, f.truncation)
}
