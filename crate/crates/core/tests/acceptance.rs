//! Acceptance gate. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any fails.

mod common;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};

use common::{agree, central_difference, coordinates, derivative_by_extension, substitute};
use z2graded::atlas::{
    check_group_object, fiber_projection, make_glued_manifold, manifold_point, product_point, split_point,
    taylor_reciprocal, Chart, GluedManifold, ManifoldPoint, Transition,
};
use z2graded::domains::{
    berezin_satisfies_propagation, berezin_to_morphism, morphism_to_berezin, separating_witness, BasePolynomial,
    BerezinVector, Coefficient, Domain, DomainMorphism, Region, SuperFunction,
};
use z2graded::gseries::int;
use z2graded::points::{
    check_lambda0_linearity, check_naturality_square, check_psi_linearity, evaluate_morphism,
    formal_rotation, gateaux_derivative, naturality_square_with, LambdaPoint, LinearitySample, PairingAlgebra,
    TangentVector,
};
use z2graded::sampling::Sampler;
use z2graded::{
    enumerate_nonzero_degrees, rat, scalar_product_parity, Degree, Error, GradedSeries, GrassmannAlgebra, Monomial,
    Rational,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn poly(text: &str, vars: usize) -> BasePolynomial {
    z2graded::cli::expr::parse_polynomial(text, vars).unwrap()
}

fn random_degree(s: &mut Sampler, alg: &GrassmannAlgebra) -> Degree {
    let degs = alg.signature().generator_degrees();
    degs[rand::Rng::gen_range(s.rng(), 0..degs.len())]
}

fn random_element(s: &mut Sampler, alg: &GrassmannAlgebra) -> GradedSeries {
    let mut x = alg.constant(s.coefficient());
    for _ in 0..3 {
        let d = random_degree(s, alg);
        x = &x + &s.homogeneous(alg, &d, 1, 2);
    }
    x
}

fn sign_rule_and_associativity() -> Outcome {
    let mut s = Sampler::new(1);
    for n in 1..=3usize {
        let alg = GrassmannAlgebra::new(n, &vec![2; (1 << n) - 1], 6).unwrap();
        let sig = alg.signature().clone();
        let mut pairs = 0;
        while pairs < 500 {
            let (da, db) = (random_degree(&mut s, &alg), random_degree(&mut s, &alg));
            let (Some(ma), Some(mb)) = (s.monomial(&sig, &da, 1, 3), s.monomial(&sig, &db, 1, 3)) else { continue };
            let a = alg.from_terms([(ma, s.coefficient())]).unwrap();
            let b = alg.from_terms([(mb, s.coefficient())]).unwrap();
            let sign = if scalar_product_parity(&da, &db).unwrap() == 1 { int(-1) } else { int(1) };
            ensure(&a * &b == (&b * &a).scale(&sign), || format!("n = {n}: {a} and {b} break the sign rule"))?;
            pairs += 1;
        }
        for _ in 0..500 {
            let (x, y, z) = (random_element(&mut s, &alg), random_element(&mut s, &alg), random_element(&mut s, &alg));
            ensure(&(&x * &y) * &z == &x * &(&y * &z), || format!("n = {n}: associativity fails on {x}, {y}, {z}"))?;
        }
    }
    Ok("1500 monomial pairs and 1500 triples".into())
}

fn lambda_111_fixture() -> Outcome {
    let alg = GrassmannAlgebra::new(2, &[1, 1, 1], 6).unwrap();
    let g = |t: &str| alg.parse(t).unwrap();
    let (xi, theta, z) = (g("g1"), g("g2"), g("g3"));
    ensure(&xi * &theta == &theta * &xi, || "xi theta != theta xi".into())?;
    ensure((&xi * &xi).is_zero() && (&theta * &theta).is_zero(), || "odd generators must square to zero".into())?;
    ensure(&xi * &z == -&(&z * &xi), || "xi z != -z xi".into())?;
    ensure(&theta * &z == -&(&z * &theta), || "theta z != -z theta".into())?;
    for k in 1..=6 {
        ensure(!z.pow(k).is_zero(), || format!("z^{k} vanished"))?;
    }
    let mut s = Sampler::new(2);
    let blocks = [(0u16, 0u16), (1, 0), (0, 1), (1, 1)];
    for _ in 0..100 {
        let f = random_element(&mut s, &alg);
        // f_ab(z) collects the terms ξ^a θ^b z^k
        let block = |a: u16, b: u16, parity: Option<u16>| {
            alg.from_terms(f.terms().iter().filter_map(|(m, c)| {
                let e = m.exponents();
                (e[0] == a && e[1] == b && parity.is_none_or(|p| e[2] % 2 == p)).then(|| (Monomial(vec![0, 0, e[2]]), c.clone()))
            }))
            .unwrap()
        };
        let prefix = |a: u16, b: u16| match (a, b) {
            (0, 0) => alg.one(),
            (1, 0) => xi.clone(),
            (0, 1) => theta.clone(),
            _ => &xi * &theta,
        };
        let rebuilt = blocks.iter().fold(alg.zero(), |acc, &(a, b)| &acc + &(&prefix(a, b) * &block(a, b, None)));
        ensure(rebuilt == f, || format!("block decomposition does not reproduce {f}"))?;
        let degrees: Vec<Degree> = std::iter::once(Degree::zero(2).unwrap()).chain(enumerate_nonzero_degrees(2).unwrap()).collect();
        for d in degrees {
            let bits = d.bits();
            let expected = blocks.iter().fold(alg.zero(), |acc, &(a, b)| {
                // deg ξ^a θ^b z^k = (b + k, a + k)
                let k_parity = (bits[0] as u16 + b) % 2;
                if (a + k_parity) % 2 != bits[1] as u16 {
                    return acc;
                }
                &acc + &(&prefix(a, b) * &block(a, b, Some(k_parity)))
            });
            let got = f.homogeneous_component(&d).unwrap();
            ensure(got == expected, || format!("component {d} of {f} is {got}, blocks give {expected}"))?;
        }
    }
    Ok("relations, z^k for k <= 6, 100 decompositions".into())
}

fn pullback_formula() -> Outcome {
    let d = Domain::all_space(1, 1, &[0]).unwrap();
    let alg = GrassmannAlgebra::new(1, &[2], 6).unwrap();
    let phi = DomainMorphism::from_families(&d, &d, 6, vec![vec![(Monomial(vec![]), poly("x1^2", 1))]]).unwrap();
    let pt = LambdaPoint::new(&d, &alg, vec![int(1)], vec![alg.parse("g1*g2").unwrap()], vec![]).unwrap();
    let y = evaluate_morphism(&phi, &pt).unwrap().even_coordinate(0);
    ensure(y == alg.parse("1 + 2*g1*g2").unwrap(), || format!("x^2 at 1 + g1*g2 gave {y}"))?;
    let mut s = Sampler::new(3);
    for i in 0..100 {
        let n = 1 + i % 2;
        let (src, tgt) = (s.domain(n, 2, 2, None), s.domain(n, 2, 2, None));
        let phi = s.domain_morphism(&src, &tgt, 3, 6);
        let alg = s.algebra(n, 3, 6);
        let pt = s.point(&src, &alg);
        let got = coordinates(&evaluate_morphism(&phi, &pt).unwrap());
        ensure(agree(&got, &substitute(&phi, &pt), 6), || format!("sample {i}: evaluation disagrees with substitution"))?;
    }
    Ok("fixture exact, 100 random pairs agree with substitution".into())
}

fn classification_roundtrip() -> Outcome {
    let mut s = Sampler::new(4);
    for i in 0..100 {
        let n = 1 + i % 2;
        let (src, tgt) = (s.domain(n, 2, 2, None), s.domain(n, 2, 2, None));
        let phi = s.domain_morphism(&src, &tgt, 3, 6);
        let f = morphism_to_berezin(&phi);
        let r = berezin_satisfies_propagation(&f);
        ensure(r.verdict.is_pass(), || format!("sample {i}: propagation fails: {:?}", r.verdict))?;
        let back = berezin_to_morphism(&f).map_err(|e| format!("sample {i}: {e}"))?;
        ensure(back.pullbacks() == phi.pullbacks(), || format!("sample {i}: roundtrip changed the pullbacks"))?;
        let id = DomainMorphism::identity(&src, 6);
        let id_back = berezin_to_morphism(&morphism_to_berezin(&id)).map_err(|e| e.to_string())?;
        ensure(id_back.pullbacks() == id.pullbacks(), || format!("sample {i}: identity roundtrip failed"))?;
    }
    Ok("100 morphisms and identities recovered exactly".into())
}

fn counterexample_rejection() -> Outcome {
    let d = Domain::all_space(1, 1, &[0]).unwrap();
    let alpha = BerezinVector::new(
        &d,
        &d,
        6,
        vec![BTreeMap::from([((Monomial(vec![]), vec![0]), Coefficient::Poly(poly("x1^2", 1)))])],
    )
    .unwrap();
    let r = berezin_satisfies_propagation(&alpha);
    let w = r.verdict.witness().ok_or("propagation passed")?;
    ensure((w.left.as_str(), w.right.as_str(), w.gamma.as_slice()) == ("0", "2*x1", &[1][..]), || format!("witness {w:?}"))?;
    ensure(matches!(berezin_to_morphism(&alpha), Err(Error::Classification(_))), || "classification accepted it".into())?;
    let alg = GrassmannAlgebra::new(1, &[2], 6).unwrap();
    let sample = LinearitySample {
        point: LambdaPoint::new(&d, &alg, vec![int(1)], vec![alg.parse("g1*g2").unwrap()], vec![]).unwrap(),
        vector: TangentVector::new(&d, &alg, vec![alg.one()], vec![]).unwrap(),
        scalar: alg.parse("g1*g2").unwrap(),
    };
    let r = check_lambda0_linearity(&alpha, &[sample]).map_err(|e| e.to_string())?;
    let w = r.verdict.witness().ok_or("Lambda0-linearity passed")?;
    ensure((w.left.as_str(), w.right.as_str()) == ("0", "2*g1*g2"), || format!("witness {w:?}"))?;
    Ok("propagation witness 0 vs 2*x1, linearity witness 0 vs 2*g1*g2".into())
}

fn naturality() -> Outcome {
    let mut s = Sampler::new(6);
    for i in 0..50 {
        let n = 1 + i % 2;
        let (src, tgt) = (s.domain(n, 2, 2, None), s.domain(n, 2, 2, None));
        let f = s.domain_morphism(&src, &tgt, 3, 6).to_berezin();
        let (a, b) = (s.algebra(n, 3, 6), s.algebra(n, 3, 6));
        let psi = s.algebra_morphism(&a, &b);
        let points: Vec<_> = (0..10).map(|_| s.point(&src, &a)).collect();
        let r = check_naturality_square(&f, &psi, &points).map_err(|e| e.to_string())?;
        ensure(r.verdict.is_pass(), || format!("pair {i}: {:?}", r.verdict))?;
    }
    // pushing only the even souls forward is not the functor-of-points action
    let d = Domain::all_space(1, 1, &[1]).unwrap();
    let phi = DomainMorphism::from_families(
        &d,
        &d,
        6,
        vec![vec![(Monomial(vec![0]), poly("x1^2 + 1", 1))], vec![(Monomial(vec![1]), poly("x1 + 2", 1))]],
    )
    .unwrap();
    let alg = GrassmannAlgebra::new(1, &[3], 6).unwrap();
    let g = |t: &str| alg.parse(t).unwrap();
    let psi = z2graded::AlgebraMorphism::new(&alg, &alg, vec![g("g2"), g("g1"), g("2*g3 + g1*g2*g3")]).unwrap();
    let broken = |x: &LambdaPoint| -> z2graded::Result<LambdaPoint> {
        let souls = x.even_souls().iter().map(|s| psi.apply(s)).collect::<z2graded::Result<Vec<_>>>()?;
        LambdaPoint::new(x.domain(), x.algebra(), x.base().to_vec(), souls, x.formal().to_vec())
    };
    let points: Vec<_> = (0..10).map(|_| s.point(&d, &alg)).collect();
    let r = naturality_square_with(&phi.to_berezin(), &broken, &points).map_err(|e| e.to_string())?;
    ensure(!r.verdict.is_pass(), || "the broken componentwise map commuted".into())?;
    Ok("500 squares commute, broken control fails".into())
}

/// A copy of `phi` with one extra pullback term taken from another sample.
fn perturbed(s: &mut Sampler, phi: &DomainMorphism) -> Option<DomainMorphism> {
    let width = phi.target().coordinate_count();
    if width == 0 {
        return None;
    }
    let donor = s.domain_morphism(phi.source(), phi.target(), 3, phi.truncation());
    let i = rand::Rng::gen_range(s.rng(), 0..width);
    let (m, p) = donor.pullbacks()[i].terms().iter().last()?;
    let mut extra = SuperFunction::zero(phi.source().formal_signature().clone(), phi.source().p(), phi.truncation());
    extra.add_term(m.clone(), p.clone());
    let mut pullbacks = phi.pullbacks().to_vec();
    pullbacks[i] = pullbacks[i].add(&extra);
    DomainMorphism::new(phi.source(), phi.target(), pullbacks, phi.truncation()).ok()
}

fn separation() -> Outcome {
    let mut s = Sampler::new(7);
    let mut done = 0;
    while done < 200 {
        let n = 1 + done % 2;
        let (src, tgt) = (s.domain(n, 2, 2, None), s.domain(n, 2, 2, None));
        let phi = s.domain_morphism(&src, &tgt, 3, 6);
        let psi = if done % 2 == 0 { s.domain_morphism(&src, &tgt, 3, 6) } else {
            match perturbed(&mut s, &phi) {
                Some(p) => p,
                None => continue,
            }
        };
        if psi.pullbacks() == phi.pullbacks() {
            continue;
        }
        let (_, pt) = separating_witness(&phi, &psi).map_err(|e| format!("pair {done}: {e}"))?;
        let (a, b) = (evaluate_morphism(&phi, &pt).unwrap(), evaluate_morphism(&psi, &pt).unwrap());
        ensure(a != b, || format!("pair {done}: images agree"))?;
        done += 1;
    }
    Ok("200 distinct pairs separated".into())
}

fn derivatives() -> Outcome {
    let mut s = Sampler::new(8);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let n = 1 + i % 2;
        let src = s.domain(n, 2, 2, None);
        let tgt = s.domain(n, 2, 2, None);
        let phi = s.domain_morphism(&src, &tgt, 3, 6);
        let f = phi.to_berezin();
        let alg = s.algebra(n, 3, 6);
        let pt = s.point(&src, &alg);
        let dir: Vec<Rational> = (0..src.p()).map(|_| s.base_value()).collect();
        let v = TangentVector::new(&src, &alg, dir.iter().map(|d| alg.constant(d.clone())).collect(), vec![alg.zero(); src.formal_count()]).unwrap();
        let exact = gateaux_derivative(&f, &pt, &v).unwrap();
        let coarse = central_difference(&f, &pt, &dir, &rat(1, 1000));
        let fine = central_difference(&f, &pt, &dir, &rat(1, 10000));
        for (c, ((e, h1), h2)) in exact.components().zip(&coarse).zip(&fine).enumerate() {
            let e = e.to_f64_terms();
            let scale = e.values().fold(0.0f64, |m, x| m.max(x.abs()));
            for m in e.keys().chain(h1.keys()) {
                let ex = e.get(m).copied().unwrap_or(0.0);
                let rich = (100.0 * h2.get(m).copied().unwrap_or(0.0) - h1.get(m).copied().unwrap_or(0.0)) / 99.0;
                let rel = if scale == 0.0 { rich.abs() } else { (rich - ex).abs() / scale };
                worst = worst.max(rel);
                ensure(rel <= 1e-6, || format!("sample {i}, component {c}, {m:?}: {rich} vs {ex}"))?;
            }
        }
        let formal_dir = TangentVector::new(&src, &alg, vec![alg.zero(); src.p()], s.tangent(&src, &alg).formal().to_vec()).unwrap();
        for v in [formal_dir, s.tangent(&src, &alg)] {
            let exact: Vec<_> = gateaux_derivative(&f, &pt, &v).unwrap().components().cloned().collect();
            ensure(agree(&exact, &derivative_by_extension(&phi, &pt, &v), 6), || format!("sample {i}: nilpotent extension disagrees"))?;
        }
    }
    Ok(format!("100 samples, worst relative error {worst:.1e}; formal directions exact"))
}

fn psi_twisted_linearity() -> Outcome {
    let mut s = Sampler::new(9);
    let mut samples_run = 0;
    for i in 0..10 {
        let n = 1 + i % 2;
        let d = s.domain(n, 2, 2, None);
        let (a, b) = (s.algebra(n, 3, 6), s.algebra(n, 3, 6));
        let psi = s.algebra_morphism(&a, &b);
        let samples: Vec<_> = (0..10).map(|_| s.linearity_sample(&d, &a)).collect();
        let r = check_psi_linearity(&psi, &samples).map_err(|e| e.to_string())?;
        ensure(r.verdict.is_pass(), || format!("morphism {i}: {:?}", r.verdict))?;
        samples_run += r.samples_run;
    }
    ensure(samples_run == 100, || format!("ran {samples_run} samples"))?;
    Ok("100 samples".into())
}

fn rotation_invariance() -> Outcome {
    let mut s = Sampler::new(10);
    for i in 0..50 {
        let n = 1 + i % 2;
        let base = s.algebra(n, 3, 4);
        let d = s.domain(n, 2, 1, None);
        let pa = PairingAlgebra::new(&base, &d).map_err(|e| e.to_string())?;
        let blocks = s.orthogonal_blocks(&base, d.p());
        let r = formal_rotation(&pa, &blocks).map_err(|e| format!("sample {i}: {e}"))?;
        for a in 0..d.p() {
            let before = pa.pairing(a);
            ensure(r.apply(&before).unwrap() == before, || format!("sample {i}: pairing {a} moved"))?;
        }
    }
    let base = GrassmannAlgebra::new(1, &[2], 6).unwrap();
    let pa = PairingAlgebra::new(&base, &Domain::all_space(1, 1, &[0]).unwrap()).unwrap();
    let skew = vec![vec![vec![int(1), int(1)], vec![int(0), int(1)]]];
    ensure(matches!(formal_rotation(&pa, &skew), Err(Error::Validation(_))), || "non-orthogonal block accepted".into())?;
    Ok("50 rotations fix the pairing, skew block rejected".into())
}

fn interval(l: Rational, u: Rational) -> Domain {
    Domain::new(1, 1, &[1], Region::Box(vec![(l, u)])).unwrap()
}

fn line_map(src: &Domain, tgt: &Domain, xi: BasePolynomial) -> DomainMorphism {
    DomainMorphism::from_families(src, tgt, 6, vec![vec![(Monomial(vec![0]), poly("x1", 1))], vec![(Monomial(vec![1]), xi)]]).unwrap()
}

fn scaled_triple(direct: i64) -> z2graded::Result<GluedManifold> {
    let d = interval(int(0), int(1));
    let charts = (0..3).map(|i| Chart::new(i, d.clone()).unwrap()).collect();
    let scale = |c: Rational| line_map(&d, &d, BasePolynomial::constant(1, c));
    make_glued_manifold(
        charts,
        vec![
            Transition::new(0, 1, scale(int(2))),
            Transition::new(1, 0, scale(rat(1, 2))),
            Transition::new(1, 2, scale(int(1))),
            Transition::new(2, 1, scale(int(1))),
            Transition::new(0, 2, scale(int(direct))),
            Transition::new(2, 0, scale(rat(1, direct))),
        ],
    )
}

fn atlas() -> Outcome {
    let overlap = interval(int(1), int(2));
    let forward = poly("1 + x1", 1);
    let back = taylor_reciprocal(&forward, &[rat(3, 2)], 6).map_err(|e| e.to_string())?;
    let m = make_glued_manifold(
        vec![Chart::new(0, interval(int(0), int(2))).unwrap(), Chart::new(1, interval(int(1), int(3))).unwrap()],
        vec![
            Transition::new(0, 1, line_map(&overlap, &overlap, forward)),
            Transition::new(1, 0, line_map(&overlap, &overlap, back)),
        ],
    )
    .map_err(|e| format!("Taylor-inverted line rejected: {e}"))?;
    let report = m.report();
    ensure(report.taylor_approximated_inverse && report.effective_truncation == 6 && report.inverse_pairs_checked == 1, || {
        format!("unexpected report {report:?}")
    })?;
    match scaled_triple(3) {
        Err(Error::Gluing { triple: (0, 1, 2), .. }) => {}
        other => return Err(format!("2-vs-3 triple gave {:?}", other.map(|_| ()))),
    }
    ensure(scaled_triple(2).is_ok(), || "consistent scaling rejected".into())?;

    let mut s = Sampler::new(11);
    for i in 0..100 {
        let alg = s.algebra(1, 3, 6);
        let local = s.point(&overlap, &alg).with_domain(&interval(int(0), int(2))).unwrap();
        let pt = ManifoldPoint { chart: 0, local };
        let moved = m.transport(&pt, 1).map_err(|e| format!("point {i}: {e}"))?;
        let (chart, base) = fiber_projection(&moved).unwrap();
        let expected = m.transition(0, 1).unwrap().morphism.base_map(pt.local.base());
        ensure(chart == 1 && base == expected, || format!("point {i}: projection does not commute"))?;
        let canonical = manifold_point(&m, 1, &moved.local).unwrap();
        ensure(fiber_projection(&canonical).unwrap() == fiber_projection(&pt).unwrap(), || format!("point {i}: canonical form differs"))?;
    }
    Ok(format!("{} inverse pair, witness (0, 1, 2), 100 projections commute", report.inverse_pairs_checked))
}

fn products_and_groups() -> Outcome {
    let mut s = Sampler::new(12);
    for i in 0..100 {
        let n = 1 + i % 2;
        let (a, b) = (s.domain(n, 2, 2, None), s.domain(n, 2, 2, None));
        let alg = s.algebra(n, 3, 6);
        let (x, y) = (s.point(&a, &alg), s.point(&b, &alg));
        let xy = product_point(&x, &y).map_err(|e| e.to_string())?;
        let (x2, y2) = split_point(&xy, &a, &b).map_err(|e| e.to_string())?;
        ensure(x2 == x && y2 == y, || format!("point {i}: split(pair) is not the identity"))?;
        let z = s.point(&a.product(&b).unwrap(), &alg);
        let (za, zb) = split_point(&z, &a, &b).unwrap();
        ensure(product_point(&za, &zb).unwrap() == z, || format!("point {i}: pair(split) is not the identity"))?;
    }
    let g = Domain::all_space(1, 0, &[1]).unwrap();
    let gg = g.product(&g).unwrap();
    let mu = DomainMorphism::from_families(
        &gg,
        &g,
        6,
        vec![vec![(Monomial(vec![1, 0]), BasePolynomial::one(0)), (Monomial(vec![0, 1]), BasePolynomial::one(0))]],
    )
    .unwrap();
    let inv = DomainMorphism::from_families(&g, &g, 6, vec![vec![(Monomial(vec![1]), BasePolynomial::constant(0, int(-1)))]]).unwrap();
    let e = LambdaPoint::from_base(&g, &GrassmannAlgebra::new(1, &[0], 6).unwrap(), vec![]).unwrap();
    let algebras: Vec<_> = (0..5).map(|_| s.algebra(1, 3, 6)).collect();
    let samples: Vec<_> = (0..100)
        .map(|i| {
            let alg = &algebras[i % 5];
            (s.point(&g, alg), s.point(&g, alg), s.point(&g, alg))
        })
        .collect();
    let r = check_group_object(&mu, &e, &inv, &samples).map_err(|e| e.to_string())?;
    ensure(r.verdict.is_pass() && r.samples_run == 100, || format!("{:?}", r.verdict))?;
    Ok("100 pair/split roundtrips, group laws on 100 points over 5 algebras".into())
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("sign rule and associativity", sign_rule_and_associativity),
        ("Lambda^(1,1,1) relations and blocks", lambda_111_fixture),
        ("pullback formula", pullback_formula),
        ("classification roundtrip", classification_roundtrip),
        ("counterexample rejection", counterexample_rejection),
        ("naturality", naturality),
        ("separation", separation),
        ("derivatives", derivatives),
        ("twisted linearity", psi_twisted_linearity),
        ("rotation invariance", rotation_invariance),
        ("atlas", atlas),
        ("products and groups", products_and_groups),
    ];
    let start = std::time::Instant::now();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panic".into()))
        });
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed in {:.1?}", criteria.len() - failed, criteria.len(), start.elapsed());
    if failed > 0 {
        std::process::exit(1);
    }
}
