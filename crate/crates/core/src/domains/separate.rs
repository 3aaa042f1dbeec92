use num_traits::Zero;

use crate::error::{Error, Result};
use crate::galgebra::GrassmannAlgebra;
use crate::gseries::Monomial;
use crate::points::{evaluate_morphism, LambdaPoint};

use super::morphism::DomainMorphism;
use super::poly::BasePolynomial;

/// First `(coordinate, α)` at which the pullback data differ, with the
/// difference `φ_α − ψ_α`.
fn first_difference(phi: &DomainMorphism, psi: &DomainMorphism) -> Option<(usize, Monomial, BasePolynomial)> {
    for (i, (f, g)) in phi.pullbacks().iter().zip(psi.pullbacks()).enumerate() {
        let mut keys: Vec<&Monomial> = f.terms().keys().chain(g.terms().keys()).collect();
        keys.sort();
        keys.dedup();
        for alpha in keys {
            let d = f.coefficient(alpha).sub(&g.coefficient(alpha));
            if !d.is_zero() {
                return Some((i, alpha.clone(), d));
            }
        }
    }
    None
}

/// A Λ-point on which `φ` and `ψ` take different values.
///
/// With `Λ = Λ^q` for the source's formal tuple, the point `x_Λ = 𝔵`,
/// `ξ^A_Λ = χ^A` sees every coefficient `φ_α(𝔵)` as the coefficient of the
/// monomial `χ^α`, so a base point where the first differing coefficient
/// does not vanish separates the two maps.
pub fn separating_witness(phi: &DomainMorphism, psi: &DomainMorphism) -> Result<(GrassmannAlgebra, LambdaPoint)> {
    if !phi.source().same_shape(psi.source()) || !phi.target().same_shape(psi.target()) {
        return Err(Error::Endpoint("the two morphisms have different endpoints".into()));
    }
    let (_, _, diff) = first_difference(phi, psi).ok_or(Error::NoWitness)?;
    let source = phi.source();
    let side = diff.total_degree() as usize + 1;
    let base = source
        .region()
        .interior_grid(source.p(), side)
        .into_iter()
        .find(|x| !diff.eval(x).is_zero())
        .expect("a nonzero polynomial of degree d does not vanish on a (d+1)-point product grid");
    let k = phi.truncation().min(psi.truncation());
    let alg = GrassmannAlgebra::from_signature(source.formal_signature().clone(), k);
    let formal = (0..source.formal_count()).map(|j| alg.generator(j)).collect::<Result<Vec<_>>>()?;
    let souls = vec![alg.zero(); source.p()];
    let pt = LambdaPoint::new(source, &alg, base, souls, formal)?;
    let a = evaluate_morphism(phi, &pt)?;
    let b = evaluate_morphism(psi, &pt)?;
    if a.eq_mod(&b, k) {
        return Err(Error::Validation("constructed point does not separate the morphisms".into()));
    }
    Ok((alg, pt))
}
