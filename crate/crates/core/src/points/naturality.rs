use serde::Serialize;

use super::derivative::{merge, Outcome};
use super::{evaluate, push_point, HarnessReport, LambdaPoint};
use crate::domains::BerezinVector;
use crate::error::Result;
use crate::galgebra::AlgebraMorphism;
use crate::par;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NaturalityWitness {
    pub sample: usize,
    pub point: serde_json::Value,
    /// `β_{Λ′}(M(ψ*)(pt))`
    pub pushed_then_mapped: serde_json::Value,
    /// `N(ψ*)(β_Λ(pt))`
    pub mapped_then_pushed: serde_json::Value,
}

/// Checks `β_{Λ′} ∘ M(ψ*) = N(ψ*) ∘ β_Λ` on each sample point.
pub fn check_naturality_square(
    f: &BerezinVector,
    psi: &AlgebraMorphism,
    points: &[LambdaPoint],
) -> Result<HarnessReport<NaturalityWitness>> {
    naturality_square_with(f, &|pt: &LambdaPoint| push_point(psi, pt), points)
}

/// The naturality square with an arbitrary pointwise map standing in for the
/// pushforward on both sides.
pub fn naturality_square_with<P>(f: &BerezinVector, push: &P, points: &[LambdaPoint]) -> Result<HarnessReport<NaturalityWitness>>
where
    P: Fn(&LambdaPoint) -> Result<LambdaPoint> + Sync,
{
    let first = par::first_failure(points, |pt| {
        let run = || -> Result<Option<NaturalityWitness>> {
            let left = evaluate(f, &push(pt)?)?;
            let right = push(&evaluate(f, pt)?)?;
            let k = left.algebra().truncation().min(right.algebra().truncation());
            if left.algebra().signature() == right.algebra().signature() && left.eq_mod(&right, k) {
                return Ok(None);
            }
            Ok(Some(NaturalityWitness {
                sample: 0,
                point: pt.describe(),
                pushed_then_mapped: left.describe(),
                mapped_then_pushed: right.describe(),
            }))
        };
        match run() {
            Ok(None) => None,
            Ok(Some(w)) => Some(Outcome::Failed(w)),
            Err(e) => Some(Outcome::Errored(e)),
        }
    });
    let first = first.map(|(i, o)| match o {
        Outcome::Failed(w) => (i, Outcome::Failed(NaturalityWitness { sample: i, ..w })),
        other => (i, other),
    });
    let k = points.iter().map(|p| p.algebra().truncation()).min().unwrap_or(f.truncation()).min(f.truncation());
    merge(first, points.len(), k)
}
