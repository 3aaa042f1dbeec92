//! JSON spec documents and their conversion into kernel objects.
//!
//! Named entries reference each other by name; domains may be given inline
//! wherever a name is accepted.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::expr::{parse_polynomial, parse_series_expression};
use crate::atlas::{make_glued_manifold, Chart, GluedManifold, Transition};
use crate::domains::{BerezinVector, Coefficient, Domain, DomainMorphism, Region};
use crate::error::{Error, Result};
use crate::galgebra::{default_truncation, AlgebraMorphism, AlgebraSpec, GrassmannAlgebra};
use crate::gseries::{GradedSeries, Monomial, Rational};
use crate::points::LambdaPoint;

/// A rational literal: a JSON integer or a string such as `"-3/4"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RationalLiteral {
    Int(i64),
    Text(String),
}

impl RationalLiteral {
    pub fn value(&self) -> Result<Rational> {
        match self {
            RationalLiteral::Int(v) => Ok(Rational::from_integer((*v).into())),
            RationalLiteral::Text(t) => t.trim().parse::<Rational>().map_err(|_| Error::Spec(format!("not a rational number: '{t}'"))),
        }
    }
}

/// Row-major rational matrix.
pub type Matrix = Vec<Vec<Rational>>;

fn values(v: &[RationalLiteral]) -> Result<Vec<Rational>> {
    v.iter().map(RationalLiteral::value).collect()
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    /// Inferred from `len(q) = 2ⁿ − 1` when omitted.
    #[serde(default)]
    pub n: Option<usize>,
    pub p: usize,
    pub q: Vec<usize>,
    /// `[[l, u], …]`, one pair per even coordinate; omitted means all space.
    #[serde(default, rename = "box")]
    pub bounds: Option<Vec<[RationalLiteral; 2]>>,
}

fn infer_n(q: &[usize]) -> Result<usize> {
    (0..=crate::degrees::MAX_N)
        .find(|&n| (1usize << n) - 1 == q.len())
        .ok_or_else(|| Error::Spec(format!("q has {} entries, which is not 2^n - 1", q.len())))
}

fn region(bounds: &Option<Vec<[RationalLiteral; 2]>>) -> Result<Region> {
    match bounds {
        None => Ok(Region::AllSpace),
        Some(b) => Ok(Region::Box(b.iter().map(|[l, u]| Ok((l.value()?, u.value()?))).collect::<Result<_>>()?)),
    }
}

impl DomainSpec {
    pub fn build(&self) -> Result<Domain> {
        let n = match self.n {
            Some(n) => n,
            None => infer_n(&self.q)?,
        };
        Domain::new(n, self.p, &self.q, region(&self.bounds)?)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DomainRef {
    Name(String),
    Inline(DomainSpec),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlgebraRef {
    Name(String),
    Inline(AlgebraSpec),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraMorphismSpec {
    pub source: AlgebraRef,
    pub target: AlgebraRef,
    pub images: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PullbackTerm {
    pub alpha: Vec<u16>,
    pub poly: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PullbackSpec {
    pub coordinate: String,
    pub terms: Vec<PullbackTerm>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismSpec {
    pub source: DomainRef,
    pub target: DomainRef,
    #[serde(default = "default_truncation")]
    pub truncation: usize,
    pub pullbacks: Vec<PullbackSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BerezinTerm {
    pub alpha: Vec<u16>,
    pub beta: Vec<u32>,
    pub poly: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BerezinCoordinate {
    pub coordinate: String,
    pub terms: Vec<BerezinTerm>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BerezinSpec {
    pub source: DomainRef,
    pub target: DomainRef,
    #[serde(default = "default_truncation")]
    pub truncation: usize,
    pub coefficients: Vec<BerezinCoordinate>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSpec {
    pub domain: DomainRef,
    pub algebra: AlgebraRef,
    pub base: Vec<RationalLiteral>,
    #[serde(default)]
    pub even_souls: Option<Vec<String>>,
    #[serde(default)]
    pub formal: Option<Vec<String>>,
}

/// A chart: `{"index": 0, "p": 1, "q": [0], "box": [[0, 2]]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChartSpec {
    pub index: usize,
    #[serde(flatten)]
    pub domain: DomainSpec,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionSpec {
    pub from: usize,
    pub to: usize,
    /// Overlap inside chart `from`.
    pub overlap: Vec<[RationalLiteral; 2]>,
    /// Overlap inside chart `to`; defaults to `overlap`.
    #[serde(default)]
    pub target_overlap: Option<Vec<[RationalLiteral; 2]>>,
    #[serde(default = "default_truncation")]
    pub truncation: usize,
    pub pullbacks: Vec<PullbackSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifoldSpec {
    pub charts: Vec<ChartSpec>,
    pub transitions: Vec<TransitionSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    pub mu: String,
    pub inv: String,
    pub unit: Vec<RationalLiteral>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairSpec {
    pub phi: String,
    pub psi: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RotationSpec {
    pub algebra: AlgebraRef,
    pub domain: DomainRef,
    pub blocks: Vec<Vec<Vec<RationalLiteral>>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvaluationSpec {
    /// A morphism or Berezin vector name.
    pub map: String,
    pub point: String,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecDocument {
    #[serde(default)]
    pub version: Option<String>,
    #[serde(default)]
    pub algebras: BTreeMap<String, AlgebraSpec>,
    #[serde(default)]
    pub algebra_morphisms: BTreeMap<String, AlgebraMorphismSpec>,
    #[serde(default)]
    pub domains: BTreeMap<String, DomainSpec>,
    #[serde(default)]
    pub morphisms: BTreeMap<String, MorphismSpec>,
    #[serde(default)]
    pub berezin: BTreeMap<String, BerezinSpec>,
    #[serde(default)]
    pub points: BTreeMap<String, PointSpec>,
    #[serde(default)]
    pub evaluations: Vec<EvaluationSpec>,
    #[serde(default)]
    pub manifolds: BTreeMap<String, ManifoldSpec>,
    #[serde(default)]
    pub groups: BTreeMap<String, GroupSpec>,
    #[serde(default)]
    pub pairs: BTreeMap<String, PairSpec>,
    #[serde(default)]
    pub rotations: BTreeMap<String, RotationSpec>,
}

/// A named map: either a genuine morphism or a bare Berezin vector.
#[derive(Clone, Debug)]
pub enum MapEntry {
    Morphism(DomainMorphism),
    Berezin(BerezinVector),
}

impl MapEntry {
    pub fn berezin(&self) -> BerezinVector {
        match self {
            MapEntry::Morphism(m) => m.to_berezin(),
            MapEntry::Berezin(b) => b.clone(),
        }
    }
}

fn missing(kind: &str, name: &str) -> Error {
    Error::Spec(format!("unknown {kind} '{name}'"))
}

impl SpecDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Spec(format!("invalid spec file: {e}")))
    }

    pub fn algebra(&self, r: &AlgebraRef) -> Result<GrassmannAlgebra> {
        match r {
            AlgebraRef::Name(n) => GrassmannAlgebra::from_spec(self.algebras.get(n).ok_or_else(|| missing("algebra", n))?),
            AlgebraRef::Inline(s) => GrassmannAlgebra::from_spec(s),
        }
    }

    pub fn domain(&self, r: &DomainRef) -> Result<Domain> {
        match r {
            DomainRef::Name(n) => self.domains.get(n).ok_or_else(|| missing("domain", n))?.build(),
            DomainRef::Inline(s) => s.build(),
        }
    }

    pub fn algebra_morphism(&self, name: &str) -> Result<AlgebraMorphism> {
        let s = self.algebra_morphisms.get(name).ok_or_else(|| missing("algebra morphism", name))?;
        let source = self.algebra(&s.source)?;
        let target = self.algebra(&s.target)?;
        let images = s.images.iter().map(|t| target.parse(t)).collect::<Result<Vec<_>>>()?;
        AlgebraMorphism::new(&source, &target, images)
    }

    pub fn morphism(&self, name: &str) -> Result<DomainMorphism> {
        let s = self.morphisms.get(name).ok_or_else(|| missing("morphism", name))?;
        build_morphism(&self.domain(&s.source)?, &self.domain(&s.target)?, s.truncation, &s.pullbacks)
    }

    pub fn berezin_vector(&self, name: &str) -> Result<BerezinVector> {
        let s = self.berezin.get(name).ok_or_else(|| missing("Berezin vector", name))?;
        let source = self.domain(&s.source)?;
        let target = self.domain(&s.target)?;
        let mut families = vec![BTreeMap::new(); target.coordinate_count()];
        for c in &s.coefficients {
            let i = target.coordinate_index(&c.coordinate)?;
            for t in &c.terms {
                check_alpha(&t.alpha, &source)?;
                let poly = parse_polynomial(&t.poly, source.p())?;
                families[i].insert((Monomial(t.alpha.clone()), t.beta.clone()), Coefficient::Poly(poly));
            }
        }
        BerezinVector::new(&source, &target, s.truncation, families)
    }

    /// A morphism or Berezin vector by name; morphisms take precedence.
    pub fn map(&self, name: &str) -> Result<MapEntry> {
        if self.morphisms.contains_key(name) {
            Ok(MapEntry::Morphism(self.morphism(name)?))
        } else if self.berezin.contains_key(name) {
            Ok(MapEntry::Berezin(self.berezin_vector(name)?))
        } else {
            Err(missing("map", name))
        }
    }

    pub fn point(&self, name: &str) -> Result<LambdaPoint> {
        let s = self.points.get(name).ok_or_else(|| missing("point", name))?;
        let domain = self.domain(&s.domain)?;
        let alg = self.algebra(&s.algebra)?;
        let series = |items: &Option<Vec<String>>, count: usize| -> Result<Vec<GradedSeries>> {
            match items {
                None => Ok(vec![alg.zero(); count]),
                Some(v) => v.iter().map(|t| parse_series_expression(t, &alg).map(|p| p.series)).collect(),
            }
        };
        let souls = series(&s.even_souls, domain.p())?;
        let formal = series(&s.formal, domain.formal_count())?;
        LambdaPoint::new(&domain, &alg, values(&s.base)?, souls, formal)
    }

    pub fn manifold(&self, name: &str) -> Result<GluedManifold> {
        let s = self.manifolds.get(name).ok_or_else(|| missing("manifold", name))?;
        build_manifold(s)
    }

    pub fn rotation_blocks(&self, name: &str) -> Result<(GrassmannAlgebra, Domain, Vec<Matrix>)> {
        let s = self.rotations.get(name).ok_or_else(|| missing("rotation", name))?;
        let blocks = s
            .blocks
            .iter()
            .map(|b| b.iter().map(|row| values(row)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok((self.algebra(&s.algebra)?, self.domain(&s.domain)?, blocks))
    }

    pub fn group(&self, name: &str) -> Result<(DomainMorphism, DomainMorphism, Vec<Rational>)> {
        let s = self.groups.get(name).ok_or_else(|| missing("group", name))?;
        Ok((self.morphism(&s.mu)?, self.morphism(&s.inv)?, values(&s.unit)?))
    }
}

fn check_alpha(alpha: &[u16], source: &Domain) -> Result<()> {
    if alpha.len() != source.formal_count() {
        return Err(Error::Spec(format!(
            "alpha {alpha:?} has {} entries but the source has {} formal coordinates",
            alpha.len(),
            source.formal_count()
        )));
    }
    Ok(())
}

pub(crate) fn build_morphism(source: &Domain, target: &Domain, truncation: usize, pullbacks: &[PullbackSpec]) -> Result<DomainMorphism> {
    let mut families: Vec<Vec<(Monomial, crate::domains::BasePolynomial)>> = vec![Vec::new(); target.coordinate_count()];
    let mut seen = vec![false; target.coordinate_count()];
    for pb in pullbacks {
        let i = target.coordinate_index(&pb.coordinate)?;
        if std::mem::replace(&mut seen[i], true) {
            return Err(Error::Spec(format!("coordinate {} given twice", pb.coordinate)));
        }
        for t in &pb.terms {
            check_alpha(&t.alpha, source)?;
            families[i].push((Monomial(t.alpha.clone()), parse_polynomial(&t.poly, source.p())?));
        }
    }
    if let Some(i) = seen.iter().position(|s| !s) {
        return Err(Error::Spec(format!("no pullback given for {}", target.coordinate_name(i))));
    }
    DomainMorphism::from_families(source, target, truncation, families)
}

pub(crate) fn build_manifold(s: &ManifoldSpec) -> Result<GluedManifold> {
    let charts = s
        .charts
        .iter()
        .map(|c| Chart::new(c.index, c.domain.build()?))
        .collect::<Result<Vec<_>>>()?;
    let chart = |i: usize| {
        charts.iter().find(|c| c.index == i).ok_or_else(|| Error::Structure(format!("transition names unknown chart {i}")))
    };
    let transitions = s
        .transitions
        .iter()
        .map(|t| {
            let from = chart(t.from)?.domain.with_region(region(&Some(t.overlap.clone()))?)?;
            let to_region = region(&Some(t.target_overlap.clone().unwrap_or_else(|| t.overlap.clone())))?;
            let to = chart(t.to)?.domain.with_region(to_region)?;
            Ok(Transition::new(t.from, t.to, build_morphism(&from, &to, t.truncation, &t.pullbacks)?))
        })
        .collect::<Result<Vec<_>>>()?;
    make_glued_manifold(charts, transitions)
}
