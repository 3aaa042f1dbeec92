//! Exact Gâteaux derivatives of the induced maps on Λ-points and the
//! linearity harnesses built on them.

use num_traits::Zero;
use serde::Serialize;

use super::{push_components, retruncate, HarnessReport, LambdaPoint, PowerCache, TangentVector};
use crate::domains::{BerezinVector, Coefficient, Region};
use crate::error::{Error, Result};
use crate::galgebra::AlgebraMorphism;
use crate::gseries::{GradedSeries, Monomial};
use crate::par;
use crate::verdict::Verdict;

/// `d_pt β_Λ(v)`, the derivative of the induced map `y_Λ = β_Λ(x_Λ)`.
///
/// Term by term: base directions differentiate `F_{αβ}` at `x_||`, soul
/// directions contribute `β_a x̊^{β−e_a} v̊^a`, and formal directions
/// replace one factor of the ordered product `ξ^α_Λ`.
pub fn gateaux_derivative(f: &BerezinVector, pt: &LambdaPoint, v: &TangentVector) -> Result<TangentVector> {
    if !pt.domain.same_shape(f.source()) {
        return Err(Error::Endpoint("point does not lie in the source of the map".into()));
    }
    if v.even.len() != pt.domain.p() || v.formal.len() != pt.domain.formal_count() {
        return Err(Error::Signature("direction has the wrong number of components".into()));
    }
    if v.algebra.signature() != pt.algebra.signature() {
        return Err(Error::Signature("direction and point live over different algebras".into()));
    }
    let k = pt.algebra.truncation().min(v.algebra.truncation()).min(f.truncation());
    let pt = pt.truncate_to(k);
    let v = v.truncate_to(k);
    let v_base = v.base();
    let v_souls: Vec<GradedSeries> = v.even.iter().map(GradedSeries::soul).collect();
    let moving: Vec<usize> = (0..v_base.len()).filter(|&a| !v_base[a].is_zero()).collect();

    if !moving.is_empty() {
        if let Region::Box(bounds) = pt.domain.region() {
            for &a in &moving {
                let (l, u) = &bounds[a];
                if &pt.base[a] == l || &pt.base[a] == u {
                    return Err(Error::Range {
                        message: format!("base direction x{} points across the region boundary", a + 1),
                        witness: pt.base.iter().map(|x| x.to_string()).collect(),
                    });
                }
            }
        }
        if !f.is_polynomial() {
            return Err(Error::Validation(
                "exact base-direction derivatives need polynomial coefficients".into(),
            ));
        }
    }

    let p = pt.domain.p();
    let nf = pt.domain.formal_count();
    let mut cache = PowerCache::new(pt.algebra.one(), &pt.even_souls, &pt.formal);
    let mut out = Vec::with_capacity(f.target().coordinate_count());
    for family in f.coefficients() {
        let mut acc = pt.algebra.zero();
        for ((alpha, beta), c) in family {
            let beta_order: u32 = beta.iter().sum();
            if alpha.total_order() + 2 * beta_order as usize > k {
                continue;
            }
            let value = c.eval(&pt.base);
            let xi = cache.formal_monomial(alpha);

            // base directions
            if let Coefficient::Poly(poly) = c {
                let mut dv = num_traits::zero::<crate::gseries::Rational>();
                for &a in &moving {
                    dv += &v_base[a] * poly.derivative(a).eval(&pt.base);
                }
                if !dv.is_zero() && !xi.is_zero() {
                    let souls = cache.soul_monomial(beta);
                    acc = &acc + &(&souls * &xi).scale(&dv);
                }
            }
            if value.is_zero() {
                continue;
            }

            // even soul directions
            if !xi.is_zero() {
                for a in 0..p {
                    if beta[a] == 0 || v_souls[a].is_zero() {
                        continue;
                    }
                    let mut lower = beta.clone();
                    lower[a] -= 1;
                    let term = &cache.soul_monomial(&lower) * &v_souls[a];
                    let coeff = &value * crate::gseries::int(beta[a] as i64);
                    acc = &acc + &(&term * &xi).scale(&coeff);
                }
            }

            // formal directions
            let souls = cache.soul_monomial(beta);
            if souls.is_zero() {
                continue;
            }
            for j in 0..nf {
                let e = alpha.exponents()[j];
                if e == 0 || v.formal[j].is_zero() {
                    continue;
                }
                let mut prefix = vec![0u16; nf];
                prefix[..j].copy_from_slice(&alpha.exponents()[..j]);
                let mut middle = vec![0u16; nf];
                middle[j] = e - 1;
                let mut suffix = vec![0u16; nf];
                suffix[j + 1..].copy_from_slice(&alpha.exponents()[j + 1..]);
                let mid = &cache.formal_monomial(&Monomial(middle)) * &v.formal[j];
                let prod = &(&cache.formal_monomial(&Monomial(prefix)) * &mid) * &cache.formal_monomial(&Monomial(suffix));
                let coeff = &value * crate::gseries::int(e as i64);
                acc = &acc + &(&souls * &prod).scale(&coeff);
            }
        }
        out.push(acc);
    }
    let formal = out.split_off(f.target().p());
    TangentVector::new(f.target(), &pt.algebra, out, formal)
}

/// One sample of a linearity harness: a point, a direction and a scalar
/// `a ∈ Λ₀`, all over the same algebra.
#[derive(Clone, Debug)]
pub struct LinearitySample {
    pub point: LambdaPoint,
    pub vector: TangentVector,
    pub scalar: GradedSeries,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinearityWitness {
    pub sample: usize,
    pub component: usize,
    /// `d(a·v)`
    pub left: String,
    /// `a·d(v)`
    pub right: String,
}

pub(super) enum Outcome<W> {
    Failed(W),
    Errored(Error),
}

pub(super) fn merge<W>(first: Option<(usize, Outcome<W>)>, samples: usize, k: usize) -> Result<HarnessReport<W>> {
    let verdict = match first {
        None => Verdict::Pass,
        Some((_, Outcome::Failed(w))) => Verdict::Fail(w),
        Some((_, Outcome::Errored(e))) => return Err(e),
    };
    Ok(HarnessReport { verdict, samples_run: samples, effective_truncation: k })
}

fn first_difference(left: &TangentVector, right: &TangentVector, k: usize) -> Option<(usize, String, String)> {
    left.components()
        .zip(right.components())
        .enumerate()
        .find(|(_, (l, r))| !l.eq_mod(r, k))
        .map(|(i, (l, r))| (i, l.to_string(), r.to_string()))
}

fn sample_truncation(samples: &[LinearitySample], cap: usize) -> usize {
    samples
        .iter()
        .map(|s| s.point.algebra.truncation().min(s.vector.algebra.truncation()))
        .min()
        .unwrap_or(cap)
        .min(cap)
}

/// Checks `d(a·v) = a·d(v)` on every sample, exactly modulo truncation.
pub fn check_lambda0_linearity(f: &BerezinVector, samples: &[LinearitySample]) -> Result<HarnessReport<LinearityWitness>> {
    let first = par::first_failure(samples, |s| {
        let run = || -> Result<Option<LinearityWitness>> {
            let av = s.vector.scale_by(&s.scalar)?;
            let left = gateaux_derivative(f, &s.point, &av)?;
            let dv = gateaux_derivative(f, &s.point, &s.vector)?;
            let a = retruncate(dv.algebra(), &s.scalar.truncate_to_at_most(dv.algebra().truncation()))?;
            let right = dv.scale_by(&a)?;
            let k = left.algebra().truncation().min(right.algebra().truncation());
            Ok(first_difference(&left, &right, k).map(|(component, left, right)| LinearityWitness {
                sample: 0,
                component,
                left,
                right,
            }))
        };
        match run() {
            Ok(None) => None,
            Ok(Some(w)) => Some(Outcome::Failed(w)),
            Err(e) => Some(Outcome::Errored(e)),
        }
    });
    let first = first.map(|(i, o)| match o {
        Outcome::Failed(w) => (i, Outcome::Failed(LinearityWitness { sample: i, ..w })),
        other => (i, other),
    });
    merge(first, samples.len(), sample_truncation(samples, f.truncation()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PsiLinearityWitness {
    pub sample: usize,
    /// `derivative` when `dΨ(v)` differs from `ψ*(v)`, `twisted` when
    /// `dΨ(a·v)` differs from `ψ*(a)·dΨ(v)`.
    pub law: &'static str,
    pub component: usize,
    pub left: String,
    pub right: String,
}

/// `d_xΨ(v)` for the induced map `Ψ = M(ψ*)`, computed from its definition.
/// `Ψ` is the restriction of a linear map of the ambient coordinates, so the
/// difference quotient `Ψ(x + v) − Ψ(x)` is already exact.
fn psi_difference(psi: &AlgebraMorphism, pt: &LambdaPoint, v: &TangentVector) -> Result<Vec<GradedSeries>> {
    let x_even = pt.even_coordinates();
    let moved_even: Vec<GradedSeries> = x_even.iter().zip(&v.even).map(|(a, b)| a + b).collect();
    let moved_formal: Vec<GradedSeries> = pt.formal.iter().zip(&v.formal).map(|(a, b)| a + b).collect();
    let (e1, f1) = push_components(psi, &moved_even, &moved_formal)?;
    let (e0, f0) = push_components(psi, &x_even, &pt.formal)?;
    Ok(e1.iter().chain(&f1).zip(e0.iter().chain(&f0)).map(|(a, b)| a - b).collect())
}

/// Checks that the derivative of `M(ψ*)` is componentwise `ψ*` and obeys
/// `dΨ(a·v) = ψ*(a)·dΨ(v)`.
pub fn check_psi_linearity(psi: &AlgebraMorphism, samples: &[LinearitySample]) -> Result<HarnessReport<PsiLinearityWitness>> {
    let first = par::first_failure(samples, |s| {
        let run = || -> Result<Option<PsiLinearityWitness>> {
            let pt = s.point.truncate_to(s.vector.algebra.truncation());
            let v = s.vector.truncate_to(pt.algebra.truncation());
            let d = psi_difference(psi, &pt, &v)?;
            let k = d.first().map(GradedSeries::truncation).unwrap_or(psi.effective_truncation());
            let direct: Vec<GradedSeries> = v.components().map(|c| psi.apply(c)).collect::<Result<_>>()?;
            for (i, (l, r)) in d.iter().zip(&direct).enumerate() {
                if !l.eq_mod(r, k) {
                    return Ok(Some(PsiLinearityWitness {
                        sample: 0,
                        law: "derivative",
                        component: i,
                        left: l.to_string(),
                        right: r.to_string(),
                    }));
                }
            }
            let av = v.scale_by(&s.scalar.truncate_to_at_most(v.algebra.truncation()))?;
            let left = psi_difference(psi, &pt, &av)?;
            let pa = psi.apply(&s.scalar)?.truncate_to_at_most(k);
            for (i, (l, dv)) in left.iter().zip(&d).enumerate() {
                let r = &pa * &dv.truncate_to_at_most(pa.truncation());
                if !l.eq_mod(&r, k) {
                    return Ok(Some(PsiLinearityWitness {
                        sample: 0,
                        law: "twisted",
                        component: i,
                        left: l.to_string(),
                        right: r.to_string(),
                    }));
                }
            }
            Ok(None)
        };
        match run() {
            Ok(None) => None,
            Ok(Some(w)) => Some(Outcome::Failed(w)),
            Err(e) => Some(Outcome::Errored(e)),
        }
    });
    let first = first.map(|(i, o)| match o {
        Outcome::Failed(w) => (i, Outcome::Failed(PsiLinearityWitness { sample: i, ..w })),
        other => (i, other),
    });
    merge(first, samples.len(), sample_truncation(samples, psi.effective_truncation()))
}
