//! One function per subcommand. Each returns the sections of its report.

use serde_json::{json, Value};

use super::spec::{MapEntry, SpecDocument};
use super::Section;
use crate::atlas::{check_group_object, fiber_projection, manifold_point, GluedManifold, ManifoldPoint};
use crate::domains::{berezin_satisfies_propagation, berezin_to_morphism, separating_witness, Domain};
use crate::error::{Error, Result};
use crate::galgebra::{AlgebraMorphism, GrassmannAlgebra};
use crate::gseries::GradedSeries;
use crate::points::{
    check_lambda0_linearity, check_naturality_square, evaluate, formal_rotation, LambdaPoint, PairingAlgebra,
};
use crate::sampling::{Sampler, MAX_CLASS_SIZE};

pub struct Ctx<'a> {
    pub spec: Option<&'a SpecDocument>,
    pub truncation: usize,
    pub samples: Option<usize>,
    pub sampler: Sampler,
}

impl<'a> Ctx<'a> {
    fn samples_or(&self, default: usize) -> usize {
        self.samples.unwrap_or(default)
    }

    fn spec(&self, command: &str) -> Result<&'a SpecDocument> {
        self.spec.ok_or_else(|| Error::Spec(format!("{command} needs --spec")))
    }
}

fn json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

fn verdict_section<W: serde::Serialize>(name: String, report: &crate::points::HarnessReport<W>, details: Value) -> Section {
    Section {
        name,
        pass: report.verdict.is_pass(),
        witnesses: report.verdict.witness().map(json).into_iter().collect(),
        samples_run: report.samples_run,
        effective_truncation: Some(report.effective_truncation),
        details,
    }
}

/// Ring axioms and the sign rule on random elements.
pub fn laws(ctx: &mut Ctx) -> Result<Vec<Section>> {
    let mut algebras: Vec<(String, GrassmannAlgebra)> = Vec::new();
    match ctx.spec {
        Some(spec) if !spec.algebras.is_empty() => {
            for (name, a) in &spec.algebras {
                algebras.push((name.clone(), GrassmannAlgebra::from_spec(a)?));
            }
        }
        _ => {
            for n in 1..=3usize {
                let q = vec![1; (1 << n) - 1];
                algebras.push((format!("n={n}"), GrassmannAlgebra::new(n, &q, ctx.truncation)?));
            }
        }
    }
    let count = ctx.samples_or(500);
    let mut sections = Vec::new();
    for (name, alg) in algebras {
        let witness = ring_law_witness(&alg, &mut ctx.sampler, count);
        sections.push(Section {
            name: format!("algebra {name}"),
            pass: witness.is_none(),
            witnesses: witness.into_iter().collect(),
            samples_run: count,
            effective_truncation: Some(alg.truncation()),
            details: json!({ "algebra": alg.spec() }),
        });
    }
    if let Some(spec) = ctx.spec {
        for name in spec.algebra_morphisms.keys() {
            let m = spec.algebra_morphism(name)?;
            let witness = homomorphism_witness(&m, &mut ctx.sampler, count);
            sections.push(Section {
                name: format!("algebra morphism {name}"),
                pass: witness.is_none(),
                witnesses: witness.into_iter().collect(),
                samples_run: count,
                effective_truncation: Some(m.effective_truncation()),
                details: Value::Null,
            });
        }
    }
    Ok(sections)
}

fn random_element(sampler: &mut Sampler, alg: &GrassmannAlgebra) -> GradedSeries {
    let degrees: Vec<crate::degrees::Degree> = std::iter::once(alg.signature().zero_degree())
        .chain(alg.signature().generator_degrees().iter().copied())
        .collect();
    let mut out = alg.constant(sampler.coefficient());
    for _ in 0..2 {
        let d = degrees[rand::Rng::gen_range(sampler.rng(), 0..degrees.len())];
        out = &out + &sampler.homogeneous(alg, &d, 1, 2);
    }
    out
}

fn random_monomial(sampler: &mut Sampler, alg: &GrassmannAlgebra) -> GradedSeries {
    let sig = alg.signature();
    let degrees: Vec<crate::degrees::Degree> = sig.generator_degrees().to_vec();
    for _ in 0..16 {
        let d = degrees[rand::Rng::gen_range(sampler.rng(), 0..degrees.len())];
        if let Some(m) = sampler.monomial(sig, &d, 1, 3) {
            return alg.from_terms([(m, crate::gseries::int(1))]).expect("valid monomial");
        }
    }
    alg.one()
}

/// First violated law among: the sign rule on monomial pairs,
/// associativity, distributivity and the unit, on `count` samples each.
pub fn ring_law_witness(alg: &GrassmannAlgebra, sampler: &mut Sampler, count: usize) -> Option<Value> {
    if alg.num_generators() == 0 {
        return None;
    }
    let one = alg.one();
    for i in 0..count {
        let (a, b) = (random_monomial(sampler, alg), random_monomial(sampler, alg));
        let (da, db) = (a.homogeneous_degree().unwrap(), b.homogeneous_degree().unwrap());
        let sign = if da.parity_with(&db) == 1 { -crate::gseries::int(1) } else { crate::gseries::int(1) };
        if &a * &b != (&b * &a).scale(&sign) {
            return Some(json!({"law": "sign rule", "sample": i, "a": a.to_string(), "b": b.to_string()}));
        }
        let (x, y, z) = (random_element(sampler, alg), random_element(sampler, alg), random_element(sampler, alg));
        let law = if &(&x * &y) * &z != &x * &(&y * &z) {
            Some("associativity")
        } else if &x * &(&y + &z) != &(&x * &y) + &(&x * &z) {
            Some("distributivity")
        } else if &x * &one != x || &one * &x != x {
            Some("unit")
        } else {
            None
        };
        if let Some(law) = law {
            return Some(json!({"law": law, "sample": i, "x": x.to_string(), "y": y.to_string(), "z": z.to_string()}));
        }
    }
    None
}

fn homomorphism_witness(m: &AlgebraMorphism, sampler: &mut Sampler, count: usize) -> Option<Value> {
    let alg = m.source();
    if m.apply(&alg.one()).ok()? != m.target().one().truncate_to_at_most(m.effective_truncation()) {
        return Some(json!({"law": "unit"}));
    }
    for i in 0..count {
        let (s, t) = (random_element(sampler, alg), random_element(sampler, alg));
        let left = m.apply(&(&s * &t)).ok()?;
        let right = &m.apply(&s).ok()? * &m.apply(&t).ok()?;
        if !left.eq_mod(&right, m.effective_truncation()) {
            return Some(json!({"law": "multiplicativity", "sample": i, "s": s.to_string(), "t": t.to_string()}));
        }
    }
    None
}

fn maps(spec: &SpecDocument) -> Result<Vec<(String, MapEntry)>> {
    let mut names: Vec<&String> = spec.morphisms.keys().chain(spec.berezin.keys()).collect();
    names.sort();
    names.dedup();
    names.into_iter().map(|n| Ok((n.clone(), spec.map(n)?))).collect()
}

pub fn eval(ctx: &mut Ctx) -> Result<Vec<Section>> {
    let spec = ctx.spec("eval")?;
    let mut jobs: Vec<(String, String)> = spec.evaluations.iter().map(|e| (e.map.clone(), e.point.clone())).collect();
    if jobs.is_empty() {
        for (m, entry) in maps(spec)? {
            for p in spec.points.keys() {
                if spec.point(p)?.domain().same_shape(entry.berezin().source()) {
                    jobs.push((m.clone(), p.clone()));
                }
            }
        }
    }
    jobs.into_iter()
        .map(|(m, p)| {
            let f = spec.map(&m)?.berezin();
            let pt = spec.point(&p)?;
            let y = evaluate(&f, &pt)?;
            Ok(Section {
                name: format!("{m}({p})"),
                pass: true,
                witnesses: vec![],
                samples_run: 1,
                effective_truncation: Some(y.algebra().truncation()),
                details: json!({ "value": y.describe() }),
            })
        })
        .collect()
}

pub fn naturality(ctx: &mut Ctx) -> Result<Vec<Section>> {
    let spec = ctx.spec("naturality")?;
    let pairs = ctx.samples_or(50);
    let k = ctx.truncation;
    let mut sections = Vec::new();
    for (name, entry) in maps(spec)? {
        let f = entry.berezin();
        let n = f.source().n();
        for psi_name in spec.algebra_morphisms.keys() {
            let psi = spec.algebra_morphism(psi_name)?;
            let points: Vec<LambdaPoint> = (0..10).map(|_| ctx.sampler.point(f.source(), psi.source())).collect();
            let r = check_naturality_square(&f, &psi, &points)?;
            sections.push(verdict_section(format!("{name} along {psi_name}"), &r, Value::Null));
        }
        let mut points_run = 0;
        let mut first_fail = None;
        let mut kmin = k;
        for i in 0..pairs {
            let src = ctx.sampler.algebra(n, MAX_CLASS_SIZE, k);
            let tgt = ctx.sampler.algebra(n, MAX_CLASS_SIZE, k);
            let psi = ctx.sampler.algebra_morphism(&src, &tgt);
            let points: Vec<LambdaPoint> = (0..10).map(|_| ctx.sampler.point(f.source(), &src)).collect();
            let r = check_naturality_square(&f, &psi, &points)?;
            points_run += r.samples_run;
            kmin = kmin.min(r.effective_truncation);
            if let Some(w) = r.verdict.witness() {
                first_fail = Some(json!({"pair": i, "witness": json(w)}));
                break;
            }
        }
        sections.push(Section {
            name: format!("{name} along sampled morphisms"),
            pass: first_fail.is_none(),
            witnesses: first_fail.into_iter().collect(),
            samples_run: points_run,
            effective_truncation: Some(kmin),
            details: Value::Null,
        });
    }
    Ok(sections)
}

pub fn classify(ctx: &mut Ctx) -> Result<Vec<Section>> {
    let spec = ctx.spec("classify")?;
    let count = ctx.samples_or(20);
    let mut sections = Vec::new();
    for (name, entry) in maps(spec)? {
        let f = entry.berezin();
        let prop = berezin_satisfies_propagation(&f);
        let recovered = if prop.verdict.is_pass() {
            berezin_to_morphism(&f).ok().map(|m| {
                m.pullbacks().iter().enumerate().map(|(i, p)| json!({"coordinate": m.target().coordinate_name(i), "pullback": p.to_string()})).collect::<Vec<_>>()
            })
        } else {
            None
        };
        sections.push(Section {
            name: format!("{name}: propagation"),
            pass: prop.verdict.is_pass(),
            witnesses: prop.verdict.witness().map(json).into_iter().collect(),
            samples_run: prop.relations_checked,
            effective_truncation: Some(f.truncation()),
            details: json!({
                "classification": if prop.verdict.is_pass() { "morphism" } else { "not a morphism" },
                "numeric": prop.numeric,
                "recovered_pullbacks": recovered,
            }),
        });
        let samples: Vec<_> = (0..count)
            .map(|_| {
                let alg = ctx.sampler.algebra(f.source().n(), MAX_CLASS_SIZE, ctx.truncation);
                ctx.sampler.linearity_sample(f.source(), &alg)
            })
            .collect();
        let r = check_lambda0_linearity(&f, &samples)?;
        sections.push(verdict_section(format!("{name}: lambda0-linearity"), &r, Value::Null));
    }
    Ok(sections)
}

pub fn separate(ctx: &mut Ctx) -> Result<Vec<Section>> {
    let spec = ctx.spec("separate")?;
    spec.pairs
        .iter()
        .map(|(name, pair)| {
            let phi = spec.morphism(&pair.phi)?;
            let psi = spec.morphism(&pair.psi)?;
            let (alg, pt) = separating_witness(&phi, &psi)?;
            let a = crate::points::evaluate_morphism(&phi, &pt)?;
            let b = crate::points::evaluate_morphism(&psi, &pt)?;
            Ok(Section {
                name: format!("pair {name}"),
                pass: true,
                witnesses: vec![],
                samples_run: 1,
                effective_truncation: Some(alg.truncation()),
                details: json!({
                    "algebra": alg.spec(),
                    "point": pt.describe(),
                    "images": { pair.phi.clone(): a.describe(), pair.psi.clone(): b.describe() },
                }),
            })
        })
        .collect()
}

fn projection_witness(m: &GluedManifold, sampler: &mut Sampler, count: usize) -> Result<Option<Value>> {
    let transitions: Vec<_> = m.transitions().collect();
    if transitions.is_empty() {
        return Ok(None);
    }
    for i in 0..count {
        let t = transitions[i % transitions.len()];
        let alg = sampler.algebra(t.morphism.source().n(), MAX_CLASS_SIZE, m.report().effective_truncation.max(1));
        let local = sampler.point(t.morphism.source(), &alg);
        let pt = ManifoldPoint { chart: t.from, local: local.with_domain(&m.chart(t.from)?.domain)? };
        let moved = m.transport(&pt, t.to)?;
        let (chart, base) = fiber_projection(&moved)?;
        let expected = t.morphism.base_map(fiber_projection(&pt)?.1.as_slice());
        if chart != t.to || base != expected {
            return Ok(Some(json!({"sample": i, "from": t.from, "to": t.to, "base": pt.local.base().iter().map(|r| r.to_string()).collect::<Vec<_>>()})));
        }
        let canonical = manifold_point(m, t.to, &moved.local)?;
        if fiber_projection(&canonical)?.0 > t.from.min(t.to) {
            return Ok(Some(json!({"sample": i, "reason": "canonical chart is not minimal"})));
        }
    }
    Ok(None)
}

pub fn cocycle(ctx: &mut Ctx) -> Result<Vec<Section>> {
    let spec = ctx.spec("cocycle")?;
    let count = ctx.samples_or(100);
    let mut sections = Vec::new();
    for name in spec.manifolds.keys() {
        match spec.manifold(name) {
            Ok(m) => {
                let w = projection_witness(&m, &mut ctx.sampler, count)?;
                sections.push(Section {
                    name: format!("manifold {name}"),
                    pass: w.is_none(),
                    witnesses: w.into_iter().collect(),
                    samples_run: count,
                    effective_truncation: Some(m.report().effective_truncation),
                    details: json(m.report()),
                });
            }
            Err(Error::Gluing { triple, detail }) => sections.push(Section {
                name: format!("manifold {name}"),
                pass: false,
                witnesses: vec![json!({"triple": [triple.0, triple.1, triple.2], "detail": detail})],
                samples_run: 0,
                effective_truncation: None,
                details: Value::Null,
            }),
            Err(e) => return Err(e),
        }
    }
    Ok(sections)
}

/// Sample triples over five sampled algebras.
pub fn group_samples(g: &Domain, sampler: &mut Sampler, count: usize, truncation: usize) -> Vec<(LambdaPoint, LambdaPoint, LambdaPoint)> {
    let algebras: Vec<GrassmannAlgebra> = (0..5).map(|_| sampler.algebra(g.n(), MAX_CLASS_SIZE, truncation)).collect();
    (0..count)
        .map(|i| {
            let alg = &algebras[i % algebras.len()];
            (sampler.point(g, alg), sampler.point(g, alg), sampler.point(g, alg))
        })
        .collect()
}

pub fn group(ctx: &mut Ctx) -> Result<Vec<Section>> {
    let spec = ctx.spec("group")?;
    let count = ctx.samples_or(100);
    let mut sections = Vec::new();
    for name in spec.groups.keys() {
        let (mu, inv, unit) = spec.group(name)?;
        let g = inv.source().clone();
        let r0 = GrassmannAlgebra::new(g.n(), &vec![0; (1 << g.n()) - 1], ctx.truncation)?;
        let e = LambdaPoint::from_base(&g, &r0, unit)?;
        let samples = group_samples(&g, &mut ctx.sampler, count, ctx.truncation);
        let r = check_group_object(&mu, &e, &inv, &samples)?;
        sections.push(verdict_section(format!("group {name}"), &r, Value::Null));
    }
    Ok(sections)
}

pub fn rotate(ctx: &mut Ctx) -> Result<Vec<Section>> {
    let mut sections = Vec::new();
    if let Some(spec) = ctx.spec {
        for name in spec.rotations.keys() {
            let (alg, domain, blocks) = spec.rotation_blocks(name)?;
            let pa = PairingAlgebra::new(&alg, &domain)?;
            let r = formal_rotation(&pa, &blocks)?;
            sections.push(Section {
                name: format!("rotation {name}"),
                pass: true,
                witnesses: vec![],
                samples_run: 1,
                effective_truncation: Some(r.effective_truncation()),
                details: json!({
                    "pairings": (0..domain.p()).map(|a| pa.pairing(a).to_string()).collect::<Vec<_>>(),
                    "images": r.images().iter().map(|s| s.to_string()).collect::<Vec<_>>(),
                }),
            });
        }
    }
    let count = ctx.samples_or(50);
    let mut failure = None;
    for i in 0..count {
        let n = 1 + i % 2;
        let alg = ctx.sampler.algebra(n, MAX_CLASS_SIZE, ctx.truncation.min(4));
        let domain = ctx.sampler.domain(n, 2, 1, None);
        let pa = PairingAlgebra::new(&alg, &domain)?;
        let blocks = ctx.sampler.orthogonal_blocks(&alg, domain.p());
        if let Err(e) = formal_rotation(&pa, &blocks) {
            failure = Some(json!({"sample": i, "error": e.to_string()}));
            break;
        }
    }
    sections.push(Section {
        name: "sampled orthogonal blocks".into(),
        pass: failure.is_none(),
        witnesses: failure.into_iter().collect(),
        samples_run: count,
        effective_truncation: Some(ctx.truncation.min(4)),
        details: Value::Null,
    });
    Ok(sections)
}
