//! Charts, transitions and glued ℤ₂ⁿ-manifolds at the level of Λ-points.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::Serialize;

use crate::domains::{BasePolynomial, Domain, DomainMorphism, Region};
use crate::error::{Error, Result};
use crate::galgebra::base_projection;
use crate::gseries::{Monomial, Rational};
use crate::par;
use crate::points::{evaluate, push_point, HarnessReport, LambdaPoint};
use crate::verdict::Verdict;

#[derive(Clone, Debug, PartialEq)]
pub struct Chart {
    pub index: usize,
    pub domain: Domain,
}

impl Chart {
    pub fn new(index: usize, domain: Domain) -> Result<Self> {
        if !matches!(domain.region(), Region::Box(_)) && domain.p() > 0 {
            return Err(Error::Structure(format!("chart {index} needs a box region")));
        }
        Ok(Chart { index, domain })
    }
}

/// The coordinate change `ψ_{βα}` from chart `from` to chart `to`; its
/// source region is the overlap inside `from`, its target region the
/// overlap inside `to`.
#[derive(Clone, Debug, PartialEq)]
pub struct Transition {
    pub from: usize,
    pub to: usize,
    pub morphism: DomainMorphism,
}

impl Transition {
    pub fn new(from: usize, to: usize, morphism: DomainMorphism) -> Self {
        Transition { from, to, morphism }
    }

    pub fn overlap_source(&self) -> &Region {
        self.morphism.source().region()
    }

    pub fn overlap_target(&self) -> &Region {
        self.morphism.target().region()
    }
}

/// How two pullback families were found to agree.
#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Agreement {
    Exact,
    /// Equal modulo `(x − c)^{K+1}` at the overlap center.
    Jet,
    Differ { coordinate: usize, alpha: Monomial, difference: BasePolynomial },
}

/// Compares pullbacks exactly, then modulo the degree-`k` Taylor jet at the
/// center of the source region.
pub(crate) fn compare_pullbacks(a: &DomainMorphism, b: &DomainMorphism, k: usize) -> Agreement {
    let center = a.source().region().center(a.source().p());
    let mut jet = false;
    for (i, (f, g)) in a.pullbacks().iter().zip(b.pullbacks()).enumerate() {
        let diff = f.with_truncation(k).sub(&g.with_truncation(k));
        for (alpha, poly) in diff.terms() {
            if poly.is_zero() {
                continue;
            }
            if !poly.shift(&center).truncate_degree(k as u32).is_zero() {
                return Agreement::Differ { coordinate: i, alpha: alpha.clone(), difference: poly.clone() };
            }
            jet = true;
        }
    }
    if jet {
        Agreement::Jet
    } else {
        Agreement::Exact
    }
}

/// Degree-`order` Taylor polynomial of `1/g` around `center`.
pub fn taylor_reciprocal(g: &BasePolynomial, center: &[Rational], order: u32) -> Result<BasePolynomial> {
    let vars = g.vars();
    let shifted = g.shift(center);
    let g0 = shifted.eval(&vec![Rational::zero(); vars]);
    if g0.is_zero() {
        return Err(Error::Validation("cannot invert a function vanishing at the center".into()));
    }
    let inv0 = g0.recip();
    // 1/g = (1/g0) Σ_j (−h/g0)^j with h = g − g0 vanishing at the center
    let ratio = shifted.sub(&BasePolynomial::constant(vars, g0)).scale(&-inv0.clone());
    let mut term = BasePolynomial::one(vars);
    let mut sum = BasePolynomial::one(vars);
    for _ in 0..order {
        term = term.mul(&ratio).truncate_degree(order);
        sum = sum.add(&term);
    }
    let back: Vec<Rational> = center.iter().map(|c| -c.clone()).collect();
    Ok(sum.scale(&inv0).shift(&back))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GluingReport {
    pub inverse_pairs_checked: usize,
    pub triples_checked: usize,
    /// Set when some composite matched the identity only modulo the base
    /// jet, i.e. an inverse is a Taylor approximation.
    pub taylor_approximated_inverse: bool,
    pub effective_truncation: usize,
    pub base_condition: &'static str,
}

#[derive(Clone, Debug)]
pub struct GluedManifold {
    charts: Vec<Chart>,
    transitions: BTreeMap<(usize, usize), Transition>,
    report: GluingReport,
}

fn differ_detail(a: &Agreement, target: &Domain) -> String {
    match a {
        Agreement::Differ { coordinate, alpha, difference } => format!(
            "pullbacks of {} differ at xi^{:?} by {difference}",
            target.coordinate_name(*coordinate),
            alpha.exponents()
        ),
        _ => String::new(),
    }
}

/// Validates the atlas and runs the inverse-pair and cocycle checks.
pub fn make_glued_manifold(charts: Vec<Chart>, transitions: Vec<Transition>) -> Result<GluedManifold> {
    let mut charts = charts;
    charts.sort_by_key(|c| c.index);
    if charts.is_empty() {
        return Err(Error::Structure("a manifold needs at least one chart".into()));
    }
    if charts.windows(2).any(|w| w[0].index == w[1].index) {
        return Err(Error::Structure("chart indices must be distinct".into()));
    }
    if charts.iter().any(|c| !c.domain.same_shape(&charts[0].domain)) {
        return Err(Error::Structure("all charts must have the same dimension".into()));
    }
    let chart = |i: usize| charts.iter().find(|c| c.index == i);
    let mut map = BTreeMap::new();
    for t in transitions {
        let (Some(a), Some(b)) = (chart(t.from), chart(t.to)) else {
            return Err(Error::Structure(format!("transition {} -> {} names an unknown chart", t.from, t.to)));
        };
        if t.from == t.to {
            return Err(Error::Structure(format!("transition from chart {} to itself", t.from)));
        }
        if !t.morphism.source().same_shape(&a.domain) || !t.morphism.target().same_shape(&b.domain) {
            return Err(Error::Structure(format!("transition {} -> {} has the wrong dimension", t.from, t.to)));
        }
        if !a.domain.region().includes(t.overlap_source()) || !b.domain.region().includes(t.overlap_target()) {
            return Err(Error::Structure(format!("overlaps of transition {} -> {} leave their charts", t.from, t.to)));
        }
        if map.insert((t.from, t.to), t).is_some() {
            return Err(Error::Structure("duplicate transition".into()));
        }
    }

    let mut taylor = false;
    let mut k = usize::MAX;
    let mut pairs = 0;
    for ((a, b), t) in &map {
        let back = map
            .get(&(*b, *a))
            .ok_or_else(|| Error::Structure(format!("transition {a} -> {b} has no inverse")))?;
        if t.overlap_source() != back.overlap_target() || t.overlap_target() != back.overlap_source() {
            return Err(Error::Structure(format!("transitions {a} -> {b} and {b} -> {a} disagree on the overlap")));
        }
        let composite = back.morphism.compose(&t.morphism)?;
        let kk = composite.truncation();
        k = k.min(kk);
        let id = DomainMorphism::identity(t.morphism.source(), kk);
        match compare_pullbacks(&composite, &id, kk) {
            Agreement::Exact => {}
            Agreement::Jet => taylor = true,
            differ => {
                return Err(Error::Gluing { triple: (*a, *b, *a), detail: differ_detail(&differ, t.morphism.source()) })
            }
        }
        pairs += 1;
    }

    let mut triples = Vec::new();
    for &(a, g) in map.keys() {
        for (&(g2, b), _) in map.range((g, 0)..(g + 1, 0)) {
            debug_assert_eq!(g, g2);
            if b != a && map.contains_key(&(a, b)) {
                triples.push((a, g, b));
            }
        }
    }
    let outcomes = par::map(&triples, |&(a, g, b)| -> Result<Option<(bool, usize)>> {
        let first = &map[&(a, g)];
        let second = &map[&(g, b)];
        let direct = &map[&(a, b)];
        let Some(w) = first.overlap_source().intersect(direct.overlap_source()) else {
            return Ok(None);
        };
        let composite = second.morphism.compose(&first.morphism.restrict(&w)?).map_err(|e| match e {
            Error::Range { message, .. } => Error::Structure(format!(
                "triple ({a}, {g}, {b}): the overlap image leaves the next transition's domain: {message}"
            )),
            other => other,
        })?;
        let kk = composite.truncation().min(direct.morphism.truncation());
        match compare_pullbacks(&composite, &direct.morphism.restrict(&w)?, kk) {
            Agreement::Exact => Ok(Some((false, kk))),
            Agreement::Jet => Ok(Some((true, kk))),
            differ => Err(Error::Gluing { triple: (a, g, b), detail: differ_detail(&differ, direct.morphism.target()) }),
        }
    });
    let mut checked = 0;
    for o in outcomes {
        if let Some((jet, kk)) = o? {
            checked += 1;
            taylor |= jet;
            k = k.min(kk);
        }
    }
    if k == usize::MAX {
        k = 0;
    }
    let report = GluingReport {
        inverse_pairs_checked: pairs / 2,
        triples_checked: checked,
        taylor_approximated_inverse: taylor,
        effective_truncation: k,
        base_condition: "sampled, not proven",
    };
    Ok(GluedManifold { charts, transitions: map, report })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ManifoldPoint {
    pub chart: usize,
    pub local: LambdaPoint,
}

impl GluedManifold {
    pub fn charts(&self) -> &[Chart] {
        &self.charts
    }

    pub fn chart(&self, index: usize) -> Result<&Chart> {
        self.charts
            .iter()
            .find(|c| c.index == index)
            .ok_or_else(|| Error::Structure(format!("no chart {index}")))
    }

    pub fn transition(&self, from: usize, to: usize) -> Option<&Transition> {
        self.transitions.get(&(from, to))
    }

    pub fn transitions(&self) -> impl Iterator<Item = &Transition> {
        self.transitions.values()
    }

    pub fn report(&self) -> &GluingReport {
        &self.report
    }

    /// Moves `pt` into chart `to` through the transition between the charts.
    pub fn transport(&self, pt: &ManifoldPoint, to: usize) -> Result<ManifoldPoint> {
        if pt.chart == to {
            return Ok(pt.clone());
        }
        let t = self
            .transition(pt.chart, to)
            .ok_or_else(|| Error::Structure(format!("charts {} and {to} do not overlap", pt.chart)))?;
        let inside = pt.local.with_domain(t.morphism.source())?;
        let moved = evaluate(&t.morphism.to_berezin(), &inside)?;
        Ok(ManifoldPoint { chart: to, local: moved.with_domain(&self.chart(to)?.domain)? })
    }

    /// `∏` of two glued manifolds; chart `(i, j)` gets index
    /// `position(i)·|N| + position(j)`.
    pub fn product(&self, other: &GluedManifold) -> Result<GluedManifold> {
        let width = other.charts.len();
        let index = |i: usize, j: usize| i * width + j;
        let mut charts = Vec::new();
        for (i, a) in self.charts.iter().enumerate() {
            for (j, b) in other.charts.iter().enumerate() {
                charts.push(Chart::new(index(i, j), a.domain.product(&b.domain)?)?);
            }
        }
        let k = self.report.effective_truncation.max(1).min(other.report.effective_truncation.max(1));
        let k = if self.transitions.is_empty() && other.transitions.is_empty() { 0 } else { k };
        let leg = |m: &GluedManifold, from: usize, to: usize| -> Option<DomainMorphism> {
            if from == to {
                let d = &m.charts[from].domain;
                Some(DomainMorphism::identity(d, k))
            } else {
                m.transition(m.charts[from].index, m.charts[to].index).map(|t| t.morphism.clone())
            }
        };
        let mut transitions = Vec::new();
        let (nm, nn) = (self.charts.len(), other.charts.len());
        for a1 in 0..nm {
            for a2 in 0..nn {
                for b1 in 0..nm {
                    for b2 in 0..nn {
                        if (a1, a2) == (b1, b2) {
                            continue;
                        }
                        if let (Some(f), Some(g)) = (leg(self, a1, b1), leg(other, a2, b2)) {
                            transitions.push(Transition::new(index(a1, a2), index(b1, b2), f.product(&g)?));
                        }
                    }
                }
            }
        }
        make_glued_manifold(charts, transitions)
    }
}

/// Enters a local point through chart `chart` and returns the canonical
/// representative: the smallest chart index reachable by a transition whose
/// overlap contains the base.
pub fn manifold_point(m: &GluedManifold, chart: usize, local: &LambdaPoint) -> Result<ManifoldPoint> {
    let c = m.chart(chart)?;
    let local = local.with_domain(&c.domain)?;
    let entered = ManifoldPoint { chart, local };
    for other in m.charts.iter().take_while(|o| o.index < chart) {
        if let Some(t) = m.transition(chart, other.index) {
            if t.overlap_source().contains(entered.local.base()) {
                return m.transport(&entered, other.index);
            }
        }
    }
    Ok(entered)
}

/// `π = M(p*)`: the chart index and the base point of `pt`.
pub fn fiber_projection(pt: &ManifoldPoint) -> Result<(usize, Vec<Rational>)> {
    let projected = push_point(&base_projection(pt.local.algebra()), &pt.local)?;
    Ok((pt.chart, projected.base().to_vec()))
}

/// `M(Λ) × N(Λ) → (M × N)(Λ)` on chart-local points.
pub fn product_point(a: &LambdaPoint, b: &LambdaPoint) -> Result<LambdaPoint> {
    if a.algebra().signature() != b.algebra().signature() {
        return Err(Error::Signature("product of points over different algebras".into()));
    }
    let k = a.algebra().truncation().min(b.algebra().truncation());
    let (a, b) = (a.truncate_to(k), b.truncate_to(k));
    let domain = a.domain().product(b.domain())?;
    let mut base = a.base().to_vec();
    base.extend_from_slice(b.base());
    let mut souls = a.even_souls().to_vec();
    souls.extend_from_slice(b.even_souls());
    let mut formal = vec![a.algebra().zero(); domain.formal_count()];
    for (j, x) in a.formal().iter().enumerate() {
        formal[a.domain().product_formal_index(b.domain(), false, j)] = x.clone();
    }
    for (j, x) in b.formal().iter().enumerate() {
        formal[a.domain().product_formal_index(b.domain(), true, j)] = x.clone();
    }
    LambdaPoint::new(&domain, a.algebra(), base, souls, formal)
}

/// Inverse of [`product_point`].
pub fn split_point(pt: &LambdaPoint, first: &Domain, second: &Domain) -> Result<(LambdaPoint, LambdaPoint)> {
    if !first.product(second)?.same_shape(pt.domain()) {
        return Err(Error::Endpoint("point does not live on the product of the given domains".into()));
    }
    let p = first.p();
    let take = |d: &Domain, second_factor: bool| -> Result<LambdaPoint> {
        let range = if second_factor { p..p + d.p() } else { 0..p };
        let formal = (0..d.formal_count())
            .map(|j| pt.formal()[first.product_formal_index(second, second_factor, j)].clone())
            .collect();
        LambdaPoint::new(d, pt.algebra(), pt.base()[range.clone()].to_vec(), pt.even_souls()[range].to_vec(), formal)
    };
    Ok((take(first, false)?, take(second, true)?))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroupWitness {
    pub sample: usize,
    pub law: &'static str,
    pub left: serde_json::Value,
    pub right: serde_json::Value,
}

/// Checks the group laws of the operation induced on `G(Λ)` by `μ`, `inv`
/// and the unit `e` (a point over the algebra without generators), on
/// sample triples `(x, y, z)` sharing an algebra.
pub fn check_group_object(
    mu: &DomainMorphism,
    e: &LambdaPoint,
    inv: &DomainMorphism,
    samples: &[(LambdaPoint, LambdaPoint, LambdaPoint)],
) -> Result<HarnessReport<GroupWitness>> {
    let g = inv.source().clone();
    if !inv.target().same_shape(&g) || !mu.target().same_shape(&g) || !mu.source().same_shape(&g.product(&g)?) {
        return Err(Error::Structure("μ must map G×G to G and inv must map G to G".into()));
    }
    if !e.domain().same_shape(&g) || e.algebra().num_generators() != 0 {
        return Err(Error::Structure("the unit must be a point of G over the algebra without generators".into()));
    }
    let mu_b = mu.to_berezin();
    let inv_b = inv.to_berezin();
    let mul = |x: &LambdaPoint, y: &LambdaPoint| -> Result<LambdaPoint> {
        evaluate(&mu_b, &product_point(x, y)?.with_domain(mu.source())?)?.with_domain(&g)
    };
    let first = par::first_failure(samples, |(x, y, z)| {
        let run = || -> Result<Option<GroupWitness>> {
            let k = [x, y, z].iter().map(|p| p.algebra().truncation()).min().unwrap().min(mu.truncation()).min(inv.truncation());
            let (x, y, z) = (x.with_domain(&g)?.truncate_to(k), y.with_domain(&g)?.truncate_to(k), z.with_domain(&g)?.truncate_to(k));
            let unit = LambdaPoint::from_base(&g, x.algebra(), e.base().to_vec())?;
            let ix = evaluate(&inv_b, &x)?.with_domain(&g)?;
            let laws: [(&'static str, LambdaPoint, LambdaPoint); 5] = [
                ("associativity", mul(&mul(&x, &y)?, &z)?, mul(&x, &mul(&y, &z)?)?),
                ("left unit", mul(&unit, &x)?, x.clone()),
                ("right unit", mul(&x, &unit)?, x.clone()),
                ("left inverse", mul(&ix, &x)?, unit.clone()),
                ("right inverse", mul(&x, &ix)?, unit.clone()),
            ];
            Ok(laws.into_iter().find(|(_, l, r)| !l.eq_mod(r, k)).map(|(law, l, r)| GroupWitness {
                sample: 0,
                law,
                left: l.describe(),
                right: r.describe(),
            }))
        };
        match run() {
            Ok(None) => None,
            Ok(Some(w)) => Some(Ok(w)),
            Err(e) => Some(Err(e)),
        }
    });
    let k = samples
        .iter()
        .map(|(x, _, _)| x.algebra().truncation())
        .min()
        .unwrap_or(mu.truncation())
        .min(mu.truncation());
    let verdict = match first {
        None => Verdict::Pass,
        Some((i, Ok(w))) => Verdict::Fail(GroupWitness { sample: i, ..w }),
        Some((_, Err(e))) => return Err(e),
    };
    Ok(HarnessReport { verdict, samples_run: samples.len(), effective_truncation: k })
}
