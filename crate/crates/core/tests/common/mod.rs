//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use z2graded::domains::{BasePolynomial, BerezinVector, DomainMorphism};
use z2graded::gseries::{int, rational_to_f64};
use z2graded::points::{evaluate, LambdaPoint, TangentVector};
use z2graded::{GradedSeries, GrassmannAlgebra, Monomial, Rational};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("fixtures").join(name)
}

/// `P(x_Λ)` by direct series substitution, term by term.
fn substitute_poly(p: &BasePolynomial, xs: &[GradedSeries], alg: &GrassmannAlgebra) -> GradedSeries {
    let mut out = alg.zero();
    for (exps, c) in p.terms() {
        let mut t = alg.constant(c.clone());
        for (x, &e) in xs.iter().zip(exps) {
            for _ in 0..e {
                t = &t * x;
            }
        }
        out = &out + &t;
    }
    out
}

/// Coordinates of `φ(s)` computed by substituting the coordinates of `s`
/// into `φ*(Y) = Σ_α ξ^α φ_α(x)`, with no Taylor expansion.
pub fn substitute(phi: &DomainMorphism, pt: &LambdaPoint) -> Vec<GradedSeries> {
    let k = phi.truncation().min(pt.algebra().truncation());
    let alg = pt.algebra().with_truncation(k);
    let cut = |s: &GradedSeries| alg.from_terms(s.truncate_to_at_most(k).terms().iter().map(|(m, c)| (m.clone(), c.clone()))).unwrap();
    let xs: Vec<GradedSeries> = pt.even_coordinates().iter().map(cut).collect();
    let xis: Vec<GradedSeries> = pt.formal().iter().map(cut).collect();
    phi.pullbacks()
        .iter()
        .map(|f| {
            let mut out = alg.zero();
            for (alpha, p) in f.terms() {
                let mut t = alg.one();
                for (xi, &e) in xis.iter().zip(alpha.exponents()) {
                    for _ in 0..e {
                        t = &t * xi;
                    }
                }
                out = &out + &(&t * &substitute_poly(p, &xs, &alg));
            }
            out
        })
        .collect()
}

/// All coordinates of a point, even ones first.
pub fn coordinates(pt: &LambdaPoint) -> Vec<GradedSeries> {
    pt.even_coordinates().into_iter().chain(pt.formal().iter().cloned()).collect()
}

/// Same truncation, same terms up to order `k`.
pub fn agree(a: &[GradedSeries], b: &[GradedSeries], k: usize) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.truncate_to_at_most(k).terms() == y.truncate_to_at_most(k).terms())
}

/// `dφ_s(v)` as the `ε`-coefficient of `φ(s + εv)`, where `ε = χ¹χ²` is
/// built from two fresh generators of the first odd degree. `ε` has degree
/// zero, is central and squares to zero, so the coefficient is exactly the
/// derivative. Substitution runs at truncation `K + 2` so that every order
/// `K` term of the coefficient survives.
pub fn derivative_by_extension(phi: &DomainMorphism, pt: &LambdaPoint, v: &TangentVector) -> Vec<GradedSeries> {
    let alg = pt.algebra();
    let k = alg.truncation().min(phi.truncation());
    let mut q = alg.q().to_vec();
    let split = q[0];
    q[0] += 2;
    let wide = GrassmannAlgebra::new(alg.n(), &q, k + 2).unwrap();
    let shift = |j: usize| if j < split { j } else { j + 2 };
    let up = |s: &GradedSeries| embed_terms(s.terms(), &shift, &wide);
    let eps = &wide.generator(split).unwrap() * &wide.generator(split + 1).unwrap();
    let souls: Vec<GradedSeries> =
        pt.even_souls().iter().zip(v.even()).map(|(s, d)| &up(s) + &(&eps * &up(d))).collect();
    let formal: Vec<GradedSeries> = pt.formal().iter().zip(v.formal()).map(|(s, d)| &up(s) + &(&eps * &up(d))).collect();
    let moved = LambdaPoint::new(pt.domain(), &wide, pt.base().to_vec(), souls, formal).unwrap();
    let phi_wide = DomainMorphism::new(
        phi.source(),
        phi.target(),
        phi.pullbacks().iter().map(|f| f.with_truncation(k + 2)).collect(),
        k + 2,
    )
    .unwrap();
    substitute(&phi_wide, &moved)
        .iter()
        .map(|s| {
            let terms = s.terms().iter().filter_map(|(m, c)| {
                let e = m.exponents();
                (e[split] == 1 && e[split + 1] == 1).then(|| {
                    let rest: Vec<u16> = e.iter().enumerate().filter(|&(j, _)| j != split && j != split + 1).map(|(_, &x)| x).collect();
                    (Monomial(rest), c.clone())
                })
            });
            alg.with_truncation(k).from_terms(terms.filter(|(m, _)| m.total_order() <= k)).unwrap()
        })
        .collect()
}

fn embed_terms<'a, I>(terms: I, shift: &dyn Fn(usize) -> usize, wide: &GrassmannAlgebra) -> GradedSeries
where
    I: IntoIterator<Item = (&'a Monomial, &'a Rational)>,
{
    let width = wide.num_generators();
    wide.from_terms(terms.into_iter().map(|(m, c)| {
        let mut e = vec![0u16; width];
        for (j, &x) in m.exponents().iter().enumerate() {
            e[shift(j)] = x;
        }
        (Monomial(e), c.clone())
    }))
    .unwrap()
}

/// Central difference quotient of `F` at `s` along a base direction, with
/// the base moved by `±h·v_||` and coefficients compared in `f64`.
pub fn central_difference(f: &BerezinVector, pt: &LambdaPoint, dir: &[Rational], h: &Rational) -> Vec<std::collections::BTreeMap<Monomial, f64>> {
    let at = |sign: i64| {
        let base: Vec<Rational> = pt.base().iter().zip(dir).map(|(x, d)| x + d * h * int(sign)).collect();
        let moved = LambdaPoint::new(pt.domain(), pt.algebra(), base, pt.even_souls().to_vec(), pt.formal().to_vec()).unwrap();
        coordinates(&evaluate(f, &moved).unwrap())
    };
    let (plus, minus) = (at(1), at(-1));
    let two_h = 2.0 * rational_to_f64(h);
    plus.iter()
        .zip(&minus)
        .map(|(a, b)| {
            let mut out = a.to_f64_terms();
            for (m, c) in b.to_f64_terms() {
                *out.entry(m).or_insert(0.0) -= c;
            }
            out.values_mut().for_each(|c| *c /= two_h);
            out
        })
        .collect()
}
