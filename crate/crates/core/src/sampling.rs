//! Seeded generators for harness samples.
//!
//! Everything random in the crate flows through [`Sampler`], so a fixed seed
//! reproduces the same algebras, points and morphisms on every run. Samples
//! stay small: at most 3 generators per degree class, truncation at most 6,
//! base coordinates from `{−1, 0, 1/2, 1}` and souls of at most 3 monomials
//! with coefficients `±1, ±1/2`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::degrees::Degree;
use crate::domains::{BasePolynomial, Domain, DomainMorphism, Region};
use crate::galgebra::{AlgebraMorphism, GrassmannAlgebra};
use crate::gseries::{int, rat, GeneratorSignature, GradedSeries, Monomial, Rational};
use crate::points::{LambdaPoint, LinearitySample, TangentVector};

pub const MAX_CLASS_SIZE: usize = 3;
pub const MAX_TRUNCATION: usize = 6;

#[derive(Clone, Debug)]
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// One of `±1, ±1/2`.
    pub fn coefficient(&mut self) -> Rational {
        let mag = if self.rng.gen_bool(0.5) { int(1) } else { rat(1, 2) };
        if self.rng.gen_bool(0.5) {
            -mag
        } else {
            mag
        }
    }

    /// Random class sizes in `0..=max_class`, with at least one generator
    /// whenever `n > 0`.
    pub fn algebra(&mut self, n: usize, max_class: usize, truncation: usize) -> GrassmannAlgebra {
        let classes = (1usize << n) - 1;
        let mut q: Vec<usize> = (0..classes).map(|_| self.rng.gen_range(0..=max_class)).collect();
        if classes > 0 && q.iter().all(|&x| x == 0) {
            let c = self.rng.gen_range(0..classes);
            q[c] = 1;
        }
        GrassmannAlgebra::new(n, &q, truncation).expect("n is small")
    }

    pub fn domain(&mut self, n: usize, max_p: usize, max_class: usize, region: Option<Region>) -> Domain {
        let p = self.rng.gen_range(0..=max_p);
        let classes = (1usize << n) - 1;
        let q: Vec<usize> = (0..classes).map(|_| self.rng.gen_range(0..=max_class)).collect();
        match region {
            Some(Region::Box(b)) => Domain::new(n, p, &q, Region::Box(vec![b[0].clone(); p])).expect("valid box"),
            _ => Domain::all_space(n, p, &q).expect("n is small"),
        }
    }

    /// A monomial of degree `deg` with order in `min_order..=max_order`, or
    /// `None` if none was found after a bounded search.
    pub fn monomial(&mut self, sig: &GeneratorSignature, deg: &Degree, min_order: usize, max_order: usize) -> Option<Monomial> {
        let g = sig.num_generators();
        if g == 0 || max_order < min_order.max(1) {
            return (min_order == 0 && deg.is_zero()).then(|| Monomial::one(g));
        }
        for _ in 0..64 {
            let order = self.rng.gen_range(min_order.max(1)..=max_order);
            let mut e = vec![0u16; g];
            let mut acc = sig.zero_degree();
            for _ in 0..order - 1 {
                let j = self.rng.gen_range(0..g);
                e[j] += 1;
                acc = acc.add(&sig.generator_degree(j)).expect("same n");
            }
            let need = acc.add(deg).expect("same n");
            let last: Vec<usize> = (0..g).filter(|&j| sig.generator_degree(j) == need).collect();
            let Some(&j) = last.choose(&mut self.rng) else { continue };
            e[j] += 1;
            if e.iter().enumerate().all(|(j, &x)| x <= 1 || !sig.is_odd(j)) {
                return Some(Monomial(e));
            }
        }
        None
    }

    /// Homogeneous element of degree `deg` with up to `max_terms` monomials
    /// of order at least `min_order`.
    pub fn homogeneous(&mut self, alg: &GrassmannAlgebra, deg: &Degree, min_order: usize, max_terms: usize) -> GradedSeries {
        let terms = self.rng.gen_range(1..=max_terms.max(1));
        let max_order = alg.truncation().min(4);
        let mut out = alg.zero();
        for _ in 0..terms {
            if let Some(m) = self.monomial(alg.signature(), deg, min_order, max_order) {
                let c = self.coefficient();
                out = &out + &alg.from_terms([(m, c)]).expect("valid monomial");
            }
        }
        out
    }

    /// Element of `Λ̊₀`.
    pub fn soul(&mut self, alg: &GrassmannAlgebra) -> GradedSeries {
        let zero = alg.signature().zero_degree();
        self.homogeneous(alg, &zero, 2, 3)
    }

    /// Element of `Λ₀` with body in `{±1, ±1/2}`.
    pub fn lambda0(&mut self, alg: &GrassmannAlgebra) -> GradedSeries {
        let body = alg.constant(self.coefficient());
        &body + &self.soul(alg)
    }

    pub fn base_value(&mut self) -> Rational {
        [int(-1), int(0), rat(1, 2), int(1)].choose(&mut self.rng).cloned().expect("nonempty")
    }

    /// Base point with coordinates from `{−1, 0, 1/2, 1}` inside `region`,
    /// or the region's center when no such point exists.
    pub fn base_point(&mut self, region: &Region, p: usize) -> Vec<Rational> {
        self.base_point_in(region, p, false)
    }

    /// As [`Sampler::base_point`], but strictly inside a box so that every
    /// base direction can be differentiated.
    pub fn interior_base_point(&mut self, region: &Region, p: usize) -> Vec<Rational> {
        self.base_point_in(region, p, true)
    }

    fn base_point_in(&mut self, region: &Region, p: usize, strict: bool) -> Vec<Rational> {
        let choices = [int(-1), int(0), rat(1, 2), int(1)];
        let axes: Vec<Vec<Rational>> = match region {
            Region::AllSpace => vec![choices.to_vec(); p],
            Region::Box(b) => b
                .iter()
                .map(|(l, u)| {
                    choices.iter().filter(|x| if strict { l < *x && *x < u } else { l <= *x && *x <= u }).cloned().collect()
                })
                .collect(),
        };
        if axes.iter().any(Vec::is_empty) {
            return region.center(p);
        }
        axes.iter().map(|a| a.choose(&mut self.rng).cloned().expect("nonempty")).collect()
    }

    pub fn point(&mut self, domain: &Domain, alg: &GrassmannAlgebra) -> LambdaPoint {
        let base = self.base_point(domain.region(), domain.p());
        let souls = (0..domain.p()).map(|_| self.soul(alg)).collect();
        let formal = (0..domain.formal_count())
            .map(|j| self.homogeneous(alg, &domain.formal_signature().generator_degree(j), 1, 3))
            .collect();
        LambdaPoint::new(domain, alg, base, souls, formal).expect("sampled point is valid")
    }

    pub fn tangent(&mut self, domain: &Domain, alg: &GrassmannAlgebra) -> TangentVector {
        let even = (0..domain.p()).map(|_| self.lambda0(alg)).collect();
        let formal = (0..domain.formal_count())
            .map(|j| self.homogeneous(alg, &domain.formal_signature().generator_degree(j), 1, 3))
            .collect();
        TangentVector::new(domain, alg, even, formal).expect("sampled vector is valid")
    }

    /// A point strictly inside the region, a direction and a scalar in `Λ₀`.
    pub fn linearity_sample(&mut self, domain: &Domain, alg: &GrassmannAlgebra) -> LinearitySample {
        let base = self.interior_base_point(domain.region(), domain.p());
        let souls = (0..domain.p()).map(|_| self.soul(alg)).collect();
        let formal = (0..domain.formal_count())
            .map(|j| self.homogeneous(alg, &domain.formal_signature().generator_degree(j), 1, 3))
            .collect();
        let point = LambdaPoint::new(domain, alg, base, souls, formal).expect("sampled point is valid");
        LinearitySample { point, vector: self.tangent(domain, alg), scalar: self.lambda0(alg) }
    }

    /// Each generator goes to a random homogeneous element of its degree.
    pub fn algebra_morphism(&mut self, source: &GrassmannAlgebra, target: &GrassmannAlgebra) -> AlgebraMorphism {
        let images = (0..source.num_generators())
            .map(|j| {
                let deg = source.signature().generator_degree(j);
                if self.rng.gen_bool(0.15) {
                    target.zero()
                } else {
                    self.homogeneous(target, &deg, 1, 3)
                }
            })
            .collect();
        AlgebraMorphism::new(source, target, images).expect("degrees match")
    }

    pub fn polynomial(&mut self, vars: usize, max_degree: u32, max_terms: usize) -> BasePolynomial {
        let mut out = BasePolynomial::zero(vars);
        for _ in 0..self.rng.gen_range(1..=max_terms.max(1)) {
            let total = self.rng.gen_range(0..=max_degree);
            let mut e = vec![0u32; vars];
            if vars > 0 {
                for _ in 0..total {
                    e[self.rng.gen_range(0..vars)] += 1;
                }
            }
            let c = Rational::from_integer(self.rng.gen_range(-3i64..=3).into()) / Rational::from_integer(self.rng.gen_range(1i64..=2).into());
            out.add_term(e, c);
        }
        out
    }

    /// A polynomial morphism whose target region is all of space. Even
    /// pullbacks get a body plus up to two nilpotent terms; formal pullbacks
    /// up to two terms of the right degree.
    pub fn domain_morphism(&mut self, source: &Domain, target: &Domain, max_degree: u32, truncation: usize) -> DomainMorphism {
        let sig = source.formal_signature().clone();
        let families = (0..target.coordinate_count())
            .map(|i| {
                let deg = target.coordinate_degree(i);
                let mut fam = Vec::new();
                if i < target.p() {
                    fam.push((Monomial::one(sig.num_generators()), self.polynomial(source.p(), max_degree, 3)));
                }
                for _ in 0..self.rng.gen_range(0..=2) {
                    if let Some(m) = self.monomial(&sig, &deg, 1, truncation.min(4)) {
                        fam.push((m, self.polynomial(source.p(), max_degree, 2)));
                    }
                }
                fam
            })
            .collect::<Vec<_>>();
        let families = families
            .into_iter()
            .map(|fam| {
                let mut merged: std::collections::BTreeMap<Monomial, BasePolynomial> = Default::default();
                for (m, p) in fam {
                    let entry = merged.entry(m).or_insert_with(|| BasePolynomial::zero(source.p()));
                    *entry = entry.add(&p);
                }
                merged.into_iter().collect()
            })
            .collect();
        DomainMorphism::from_families(source, target, truncation, families).expect("sampled morphism is valid")
    }

    /// Random rational orthogonal matrices over the generators of `base`,
    /// one per even coordinate, block diagonal by degree class. Each block
    /// is a product of Pythagorean plane rotations, a permutation and sign
    /// flips.
    pub fn orthogonal_blocks(&mut self, base: &GrassmannAlgebra, p: usize) -> Vec<Vec<Vec<Rational>>> {
        const TRIPLES: [(i64, i64, i64); 4] = [(3, 4, 5), (5, 12, 13), (8, 15, 17), (7, 24, 25)];
        let sig = base.signature();
        let m = base.num_generators();
        (0..p)
            .map(|_| {
                let mut o: Vec<Vec<Rational>> =
                    (0..m).map(|i| (0..m).map(|j| if i == j { int(1) } else { int(0) }).collect()).collect();
                for (c, &size) in sig.q().iter().enumerate() {
                    if size == 0 {
                        continue;
                    }
                    let start = sig.group_start(c);
                    let idx: Vec<usize> = (start..start + size).collect();
                    if size >= 2 {
                        for _ in 0..2 {
                            let pair: Vec<usize> = idx.choose_multiple(&mut self.rng, 2).cloned().collect();
                            let (a, b, h) = *TRIPLES.choose(&mut self.rng).expect("nonempty");
                            let (cs, sn) = (rat(a, h), rat(b, h) * if self.rng.gen_bool(0.5) { int(1) } else { int(-1) });
                            let (i, j) = (pair[0], pair[1]);
                            let (ri, rj) = (o[i].clone(), o[j].clone());
                            for (col, (x, y)) in ri.iter().zip(&rj).enumerate() {
                                o[i][col] = &cs * x - &sn * y;
                                o[j][col] = &sn * x + &cs * y;
                            }
                        }
                        let mut perm = idx.clone();
                        perm.shuffle(&mut self.rng);
                        let rows: Vec<Vec<Rational>> = perm.iter().map(|&r| o[r].clone()).collect();
                        for (k, row) in idx.iter().zip(rows) {
                            o[*k] = row;
                        }
                    }
                    for &i in &idx {
                        if self.rng.gen_bool(0.5) {
                            for x in o[i].iter_mut() {
                                *x = -x.clone();
                            }
                        }
                    }
                }
                o
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproducible() {
        let run = |seed| {
            let mut s = Sampler::new(seed);
            let alg = s.algebra(2, 3, 6);
            let d = s.domain(2, 2, 1, None);
            let pt = s.point(&d, &alg);
            let phi = s.domain_morphism(&d, &d, 3, 6);
            (alg, pt, phi)
        };
        assert_eq!(run(7), run(7));
    }

    #[test]
    fn samples_respect_grading() {
        let mut s = Sampler::new(1);
        for _ in 0..50 {
            let alg = s.algebra(2, 3, 6);
            let zero = alg.signature().zero_degree();
            let soul = s.soul(&alg);
            assert!(soul.is_homogeneous_of(&zero) && soul.body() == int(0));
            assert!(soul.len() <= 3);
            let other = s.algebra(2, 3, 6);
            s.algebra_morphism(&alg, &other);
            let d = s.domain(2, 2, 2, Some(Region::Box(vec![(int(0), int(1))])));
            let pt = s.point(&d, &alg);
            assert!(d.region().contains(pt.base()));
        }
    }

    #[test]
    fn blocks_are_orthogonal() {
        let mut s = Sampler::new(3);
        for _ in 0..20 {
            let alg = s.algebra(2, 3, 6);
            for o in s.orthogonal_blocks(&alg, 2) {
                let m = o.len();
                for i in 0..m {
                    for j in 0..m {
                        let dot: Rational = (0..m).map(|k| &o[i][k] * &o[j][k]).sum();
                        assert_eq!(dot, if i == j { int(1) } else { int(0) });
                    }
                }
            }
        }
    }
}
