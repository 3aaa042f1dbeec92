//! Exact kernel for ℤ₂ⁿ-graded Grassmann algebras, ℤ₂ⁿ-domains and their
//! functors of points.
//!
//! Series are truncated formal power series with rational coefficients;
//! every identity checked by the library is exact modulo the stated
//! truncation order.

pub mod atlas;
pub mod cli;
pub mod degrees;
pub mod domains;
pub mod error;
pub mod galgebra;
pub mod gseries;
pub mod par;
pub mod points;
pub mod sampling;
pub mod verdict;

pub use degrees::{degree_add, enumerate_nonzero_degrees, scalar_product_parity, Degree};
pub use error::{Error, Result};
pub use galgebra::{
    algebra_product, apply_morphism, base_projection, compose_morphisms, directed_upper_bound, make_algebra,
    make_morphism, AlgebraMorphism, GrassmannAlgebra,
};
pub use gseries::{normalize_monomial, rat, GeneratorSignature, GradedSeries, Monomial, Rational};
pub use verdict::Verdict;
