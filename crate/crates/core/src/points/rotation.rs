//! The auxiliary algebra of formal pairings and orthogonal rotations of it.
//!
//! Given `Λ` with generators `θ^λ` and a domain with `p` even and `|q|`
//! formal coordinates, `Λ′` has generators `η^{aλ}` and `ζ^b_κ` with
//! `deg η^{aλ} = deg θ^λ`, `deg ζ^b_κ = deg θ^κ`, plus `ψ^A` with
//! `deg ψ^A = deg ξ^A`. Every Λ-point factors through the universal point
//! `x′ = (x_||, Σ_λ η^{aλ}ζ^a_λ, ψ^A)` of `Λ′`.

use std::sync::Arc;

use num_traits::{One, Zero};

use super::LambdaPoint;
use crate::domains::Domain;
use crate::error::{Error, Result};
use crate::galgebra::{AlgebraMorphism, GrassmannAlgebra};
use crate::gseries::{GeneratorSignature, GradedSeries, Monomial, Rational};

#[derive(Clone, Debug)]
pub struct PairingAlgebra {
    base: GrassmannAlgebra,
    domain: Domain,
    algebra: GrassmannAlgebra,
    eta: Vec<Vec<usize>>,
    zeta: Vec<Vec<usize>>,
    psi: Vec<usize>,
}

impl PairingAlgebra {
    /// Within each degree class the generators are `η` (coordinate-major),
    /// then `ζ`, then `ψ`.
    pub fn new(base: &GrassmannAlgebra, domain: &Domain) -> Result<Self> {
        if base.n() != domain.n() {
            return Err(Error::Signature("algebra and domain have different n".into()));
        }
        let p = domain.p();
        let bsig = base.signature();
        let fsig = domain.formal_signature();
        let classes = bsig.q().len();
        let q: Vec<usize> = (0..classes).map(|c| 2 * p * bsig.q()[c] + fsig.q()[c]).collect();
        let algebra = GrassmannAlgebra::new(base.n(), &q, base.truncation())?;
        let sig: Arc<GeneratorSignature> = algebra.signature().clone();
        let m = base.num_generators();
        let mut eta = vec![vec![0; m]; p];
        let mut zeta = vec![vec![0; m]; p];
        let mut psi = vec![0; domain.formal_count()];
        for c in 0..classes {
            let start = sig.group_start(c);
            let mc = bsig.q()[c];
            let bs = bsig.group_start(c);
            for a in 0..p {
                for i in 0..mc {
                    eta[a][bs + i] = start + a * mc + i;
                    zeta[a][bs + i] = start + (p + a) * mc + i;
                }
            }
            let fs = fsig.group_start(c);
            for i in 0..fsig.q()[c] {
                psi[fs + i] = start + 2 * p * mc + i;
            }
        }
        Ok(PairingAlgebra { base: base.clone(), domain: domain.clone(), algebra, eta, zeta, psi })
    }

    pub fn base(&self) -> &GrassmannAlgebra {
        &self.base
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn algebra(&self) -> &GrassmannAlgebra {
        &self.algebra
    }

    pub fn eta(&self, a: usize, lambda: usize) -> GradedSeries {
        self.algebra.generator(self.eta[a][lambda]).expect("index in range")
    }

    pub fn zeta(&self, b: usize, kappa: usize) -> GradedSeries {
        self.algebra.generator(self.zeta[b][kappa]).expect("index in range")
    }

    pub fn psi(&self, j: usize) -> GradedSeries {
        self.algebra.generator(self.psi[j]).expect("index in range")
    }

    /// `Σ_λ η^{aλ} ζ^a_λ`.
    pub fn pairing(&self, a: usize) -> GradedSeries {
        let mut acc = self.algebra.zero();
        for l in 0..self.base.num_generators() {
            acc = &acc + &(&self.eta(a, l) * &self.zeta(a, l));
        }
        acc
    }

    /// The universal point `x′` with base `base` together with the morphism
    /// `φ*: Λ′ → Λ` carrying it to `pt`.
    ///
    /// Each soul is decomposed as `x̊^a = Σ_λ θ^λ Z^a_λ` by splitting every
    /// monomial at its smallest generator.
    pub fn lift_point(&self, pt: &LambdaPoint) -> Result<(LambdaPoint, AlgebraMorphism)> {
        if pt.algebra().signature() != self.base.signature() || !pt.domain().same_shape(&self.domain) {
            return Err(Error::Signature("point does not match the pairing algebra".into()));
        }
        let k = pt.algebra().truncation().min(self.algebra.truncation());
        let alg = self.algebra.with_truncation(k);
        let m = self.base.num_generators();
        let p = self.domain.p();
        let sig = self.base.signature().clone();
        let mut images = vec![GradedSeries::zero(sig.clone(), k); alg.num_generators()];
        for a in 0..p {
            for l in 0..m {
                images[self.eta[a][l]] = GradedSeries::generator(sig.clone(), k, l)?;
            }
            let mut z = vec![GradedSeries::zero(sig.clone(), k); m];
            for (mono, c) in pt.even_souls()[a].terms() {
                let l = mono.exponents().iter().position(|&e| e > 0).expect("souls have no constant term");
                let mut rest = mono.exponents().to_vec();
                rest[l] -= 1;
                z[l].add_term(Monomial(rest), c.clone());
            }
            for (l, zl) in z.into_iter().enumerate() {
                images[self.zeta[a][l]] = zl;
            }
        }
        for (j, x) in pt.formal().iter().enumerate() {
            images[self.psi[j]] = x.truncate_to_at_most(k);
        }
        let target = pt.algebra().with_truncation(k);
        let phi = AlgebraMorphism::new(&alg, &target, images)?;
        let souls = (0..p).map(|a| self.pairing(a).truncate_to_at_most(k)).collect();
        let formal = (0..self.domain.formal_count()).map(|j| self.psi(j).truncate_to_at_most(k)).collect();
        let lifted = LambdaPoint::new(&self.domain, &alg, pt.base().to_vec(), souls, formal)?;
        Ok((lifted, phi))
    }
}

/// `R*` on `Λ′` with `R*(η^{aλ}) = Σ_κ η^{aκ} O^a_{κλ}`,
/// `R*(ζ^b_κ) = Σ_λ O^b_{λκ} ζ^b_λ` and `R*(ψ^A) = ψ^A`.
///
/// Each `O^a` is an `m × m` rational matrix over the generators of `Λ`. It
/// must not mix degree classes and must satisfy `O·Oᵀ = I`.
pub fn formal_rotation(pairing: &PairingAlgebra, blocks: &[Vec<Vec<Rational>>]) -> Result<AlgebraMorphism> {
    let p = pairing.domain.p();
    let m = pairing.base.num_generators();
    if blocks.len() != p {
        return Err(Error::Validation(format!("expected {p} blocks, got {}", blocks.len())));
    }
    let bsig = pairing.base.signature();
    for (a, o) in blocks.iter().enumerate() {
        if o.len() != m || o.iter().any(|row| row.len() != m) {
            return Err(Error::Validation(format!("block {} must be {m}×{m}", a + 1)));
        }
        for (i, row) in o.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                if !x.is_zero() && bsig.generator_degree(i) != bsig.generator_degree(j) {
                    return Err(Error::Grading(format!(
                        "block {} entry ({}, {}) mixes degrees {} and {}",
                        a + 1,
                        i + 1,
                        j + 1,
                        bsig.generator_degree(i),
                        bsig.generator_degree(j)
                    )));
                }
            }
        }
        for i in 0..m {
            for j in 0..m {
                let dot: Rational = (0..m).map(|l| &o[i][l] * &o[j][l]).sum();
                let expected = if i == j { Rational::one() } else { Rational::zero() };
                if dot != expected {
                    return Err(Error::Validation(format!(
                        "block {} is not orthogonal: (O·Oᵀ)[{}][{}] = {dot}",
                        a + 1,
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
    }
    let alg = &pairing.algebra;
    let mut images: Vec<GradedSeries> = (0..alg.num_generators()).map(|j| alg.generator(j)).collect::<Result<_>>()?;
    for (a, o) in blocks.iter().enumerate() {
        for l in 0..m {
            let mut eta = alg.zero();
            let mut zeta = alg.zero();
            for (k, row) in o.iter().enumerate() {
                if !row[l].is_zero() {
                    eta = &eta + &pairing.eta(a, k).scale(&row[l]);
                    zeta = &zeta + &pairing.zeta(a, k).scale(&row[l]);
                }
            }
            images[pairing.eta[a][l]] = eta;
            images[pairing.zeta[a][l]] = zeta;
        }
    }
    let r = AlgebraMorphism::new(alg, alg, images)?;
    for a in 0..p {
        let before = pairing.pairing(a);
        if !r.apply(&before)?.eq_mod(&before, alg.truncation()) {
            return Err(Error::Validation(format!("pairing {} is not invariant", a + 1)));
        }
    }
    Ok(r)
}
