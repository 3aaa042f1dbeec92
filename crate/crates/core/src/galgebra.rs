//! ℤ₂ⁿ-Grassmann algebras (equivalently ℤ₂ⁿ-points `ℝ^{0|q}`) and their
//! degree-preserving unital morphisms.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gseries::{GeneratorSignature, GradedSeries, Monomial, Rational};

#[derive(Clone, PartialEq, Eq)]
pub struct GrassmannAlgebra {
    sig: Arc<GeneratorSignature>,
    truncation: usize,
}

/// JSON form `{"n":2,"q":[1,1,1],"truncation":6}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraSpec {
    pub n: usize,
    pub q: Vec<usize>,
    #[serde(default = "default_truncation")]
    pub truncation: usize,
}

pub fn default_truncation() -> usize {
    6
}

impl GrassmannAlgebra {
    pub fn new(n: usize, q: &[usize], truncation: usize) -> Result<Self> {
        Ok(GrassmannAlgebra { sig: Arc::new(GeneratorSignature::new(n, q)?), truncation })
    }

    pub fn from_signature(sig: Arc<GeneratorSignature>, truncation: usize) -> Self {
        GrassmannAlgebra { sig, truncation }
    }

    pub fn signature(&self) -> &Arc<GeneratorSignature> {
        &self.sig
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn n(&self) -> usize {
        self.sig.n()
    }

    pub fn q(&self) -> &[usize] {
        self.sig.q()
    }

    pub fn num_generators(&self) -> usize {
        self.sig.num_generators()
    }

    pub fn with_truncation(&self, truncation: usize) -> Self {
        GrassmannAlgebra { sig: self.sig.clone(), truncation }
    }

    pub fn zero(&self) -> GradedSeries {
        GradedSeries::zero(self.sig.clone(), self.truncation)
    }

    pub fn one(&self) -> GradedSeries {
        GradedSeries::one(self.sig.clone(), self.truncation)
    }

    pub fn constant(&self, c: Rational) -> GradedSeries {
        GradedSeries::constant(self.sig.clone(), self.truncation, c)
    }

    /// Generator `j` (0-based).
    pub fn generator(&self, j: usize) -> Result<GradedSeries> {
        GradedSeries::generator(self.sig.clone(), self.truncation, j)
    }

    pub fn from_terms<I>(&self, terms: I) -> Result<GradedSeries>
    where
        I: IntoIterator<Item = (Monomial, Rational)>,
    {
        GradedSeries::from_terms(self.sig.clone(), self.truncation, terms)
    }

    /// Parses a series literal such as `"3 + 2*g1*g2 - 1/2*g3^2"`.
    pub fn parse(&self, text: &str) -> Result<GradedSeries> {
        crate::cli::expr::parse_series_expression(text, self).map(|p| p.series)
    }

    pub fn spec(&self) -> AlgebraSpec {
        AlgebraSpec { n: self.n(), q: self.q().to_vec(), truncation: self.truncation }
    }

    pub fn from_spec(spec: &AlgebraSpec) -> Result<Self> {
        Self::new(spec.n, &spec.q, spec.truncation)
    }

    pub(crate) fn check_series(&self, s: &GradedSeries) -> Result<()> {
        if s.signature() != &self.sig {
            return Err(Error::Signature(format!(
                "series over {:?} used in algebra {:?}",
                s.signature(),
                self.sig
            )));
        }
        Ok(())
    }
}

impl std::fmt::Debug for GrassmannAlgebra {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Λ(n={}, q={:?}, K={})", self.n(), self.q(), self.truncation)
    }
}

pub fn make_algebra(n: usize, q: &[usize], truncation: usize) -> Result<GrassmannAlgebra> {
    GrassmannAlgebra::new(n, q, truncation)
}

/// A morphism of ℤ₂ⁿ-Grassmann algebras, determined by generator images.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AlgebraMorphism {
    source: GrassmannAlgebra,
    target: GrassmannAlgebra,
    images: Vec<GradedSeries>,
}

impl AlgebraMorphism {
    /// Validates one image per source generator, each homogeneous of the
    /// generator's degree and living in the target.
    pub fn new(source: &GrassmannAlgebra, target: &GrassmannAlgebra, images: Vec<GradedSeries>) -> Result<Self> {
        if source.n() != target.n() {
            return Err(Error::Signature(format!(
                "source n = {} but target n = {}",
                source.n(),
                target.n()
            )));
        }
        if images.len() != source.num_generators() {
            return Err(Error::Signature(format!(
                "expected {} generator images, got {}",
                source.num_generators(),
                images.len()
            )));
        }
        let mut fixed = Vec::with_capacity(images.len());
        for (j, img) in images.into_iter().enumerate() {
            target.check_series(&img)?;
            let deg = source.signature().generator_degree(j);
            if !img.is_homogeneous_of(&deg) {
                return Err(Error::Grading(format!(
                    "image of generator g{} is not homogeneous of degree {deg}: {img}",
                    j + 1
                )));
            }
            let img = if img.truncation() == target.truncation() {
                img
            } else {
                GradedSeries::from_terms(
                    target.signature().clone(),
                    target.truncation(),
                    img.terms().iter().map(|(m, c)| (m.clone(), c.clone())),
                )?
            };
            fixed.push(img);
        }
        Ok(AlgebraMorphism { source: source.clone(), target: target.clone(), images: fixed })
    }

    pub fn identity(alg: &GrassmannAlgebra) -> Self {
        let images = (0..alg.num_generators()).map(|j| alg.generator(j).unwrap()).collect();
        AlgebraMorphism { source: alg.clone(), target: alg.clone(), images }
    }

    pub fn source(&self) -> &GrassmannAlgebra {
        &self.source
    }

    pub fn target(&self) -> &GrassmannAlgebra {
        &self.target
    }

    pub fn images(&self) -> &[GradedSeries] {
        &self.images
    }

    /// Order up to which results of `apply` are exact.
    pub fn effective_truncation(&self) -> usize {
        self.source.truncation.min(self.target.truncation)
    }

    /// Substitutes generator images into every monomial. The result carries
    /// truncation `min(K_source, K_target)`.
    pub fn apply(&self, s: &GradedSeries) -> Result<GradedSeries> {
        self.source.check_series(s)?;
        let k = self.effective_truncation().min(s.truncation());
        let images: Vec<GradedSeries> = self.images.iter().map(|i| i.truncate_to_at_most(k)).collect();
        let mut powers: Vec<Vec<GradedSeries>> = images.iter().map(|i| vec![i.clone()]).collect();
        let one = GradedSeries::one(self.target.signature().clone(), k);
        let mut out = GradedSeries::zero(self.target.signature().clone(), k);
        for (m, c) in s.terms() {
            if m.total_order() > k {
                continue;
            }
            let mut acc = one.clone();
            for (j, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let e = e as usize;
                while powers[j].len() < e {
                    let next = &powers[j][powers[j].len() - 1] * &images[j];
                    powers[j].push(next);
                }
                acc = &acc * &powers[j][e - 1];
                if acc.is_zero() {
                    break;
                }
            }
            for (mm, cc) in acc.terms() {
                out.add_term(mm.clone(), cc * c);
            }
        }
        Ok(out)
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn compose(&self, first: &AlgebraMorphism) -> Result<AlgebraMorphism> {
        compose_morphisms(self, first)
    }
}

pub fn make_morphism(
    source: &GrassmannAlgebra,
    target: &GrassmannAlgebra,
    images: Vec<GradedSeries>,
) -> Result<AlgebraMorphism> {
    AlgebraMorphism::new(source, target, images)
}

pub fn apply_morphism(m: &AlgebraMorphism, s: &GradedSeries) -> Result<GradedSeries> {
    m.apply(s)
}

/// `g ∘ f`.
pub fn compose_morphisms(g: &AlgebraMorphism, f: &AlgebraMorphism) -> Result<AlgebraMorphism> {
    if f.target.signature() != g.source.signature() {
        return Err(Error::Endpoint(format!(
            "cannot compose: target {:?} of the first map is not the source {:?} of the second",
            f.target, g.source
        )));
    }
    let images = f.images.iter().map(|i| g.apply(i)).collect::<Result<Vec<_>>>()?;
    let k = images.first().map(|i| i.truncation()).unwrap_or(g.effective_truncation().min(f.effective_truncation()));
    let target = g.target.with_truncation(k.min(g.target.truncation));
    AlgebraMorphism::new(&f.source, &target, images)
}

/// `p*: Λ → ℝ`, the unique morphism to the algebra without generators.
pub fn base_projection(alg: &GrassmannAlgebra) -> AlgebraMorphism {
    let n = alg.n();
    let target = GrassmannAlgebra::new(n, &vec![0; (1 << n) - 1], alg.truncation()).expect("valid n");
    let images = (0..alg.num_generators()).map(|_| target.zero()).collect();
    AlgebraMorphism { source: alg.clone(), target, images }
}

/// Generator inclusion into an algebra whose signature dominates the source's
/// componentwise, placing the source's generators of class `i` at the given
/// offset within that class.
fn inclusion(src: &GrassmannAlgebra, tgt: &GrassmannAlgebra, offsets: &[usize]) -> Result<AlgebraMorphism> {
    let sig = src.signature();
    let images = (0..src.num_generators())
        .map(|j| {
            let class = sig.group_of(j);
            let within = j - sig.group_start(class);
            tgt.generator(tgt.signature().group_start(class) + offsets[class] + within)
        })
        .collect::<Result<Vec<_>>>()?;
    AlgebraMorphism::new(src, tgt, images)
}

/// `ℝ^{0|m} × ℝ^{0|n} ≃ ℝ^{0|m+n}` at the level of algebras: the product
/// algebra and the two generator inclusions. Within each degree class the
/// first factor's generators come first.
pub fn algebra_product(
    a: &GrassmannAlgebra,
    b: &GrassmannAlgebra,
) -> Result<(GrassmannAlgebra, AlgebraMorphism, AlgebraMorphism)> {
    if a.n() != b.n() {
        return Err(Error::Signature(format!("cannot multiply algebras with n = {} and n = {}", a.n(), b.n())));
    }
    let q: Vec<usize> = a.q().iter().zip(b.q()).map(|(x, y)| x + y).collect();
    let k = a.truncation().min(b.truncation());
    let prod = GrassmannAlgebra::new(a.n(), &q, k)?;
    let ia = inclusion(a, &prod, &vec![0; q.len()])?;
    let ib = inclusion(b, &prod, a.q())?;
    Ok((prod, ia, ib))
}

/// Componentwise supremum of two signatures with both inclusions; witnesses
/// that ℤ₂ⁿ-Grassmann algebras over a fixed `n` form a directed set.
pub fn directed_upper_bound(
    a: &GrassmannAlgebra,
    b: &GrassmannAlgebra,
) -> Result<(GrassmannAlgebra, AlgebraMorphism, AlgebraMorphism)> {
    if a.n() != b.n() {
        return Err(Error::Signature("directed bound needs equal n".into()));
    }
    let q: Vec<usize> = a.q().iter().zip(b.q()).map(|(x, y)| *x.max(y)).collect();
    let k = a.truncation().min(b.truncation());
    let sup = GrassmannAlgebra::new(a.n(), &q, k)?;
    let zeros = vec![0; q.len()];
    Ok((sup.clone(), inclusion(a, &sup, &zeros)?, inclusion(b, &sup, &zeros)?))
}
