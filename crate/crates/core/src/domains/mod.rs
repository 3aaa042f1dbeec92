//! ℤ₂ⁿ-domains, their morphisms and Berezin vectors.

mod berezin;
mod domain;
mod morphism;
mod poly;
mod separate;
mod superfn;

pub use berezin::{
    berezin_satisfies_propagation, berezin_to_morphism, morphism_to_berezin, BerezinKey, BerezinVector, Coefficient,
    OpaqueFn, PropagationReport, PropagationWitness, OPAQUE_STEP, OPAQUE_TOLERANCE,
};
pub use domain::{Domain, Region};
pub use morphism::{compose_domain_morphisms, make_domain_morphism, BaseCheck, DomainMorphism};
pub use poly::BasePolynomial;
pub use separate::separating_witness;
pub use superfn::SuperFunction;
