use thiserror::Error;

/// Errors raised by the kernel. Verdict-returning harnesses never use these
/// for a failed law; they report `Verdict::Fail` instead.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("signature error: {0}")]
    Signature(String),

    #[error("grading error: {0}")]
    Grading(String),

    #[error("truncation error: {0}")]
    Truncation(String),

    #[error("range error: {message} (witness point {witness:?})")]
    Range { message: String, witness: Vec<String> },

    #[error("classification error: propagation relation fails at {0}")]
    Classification(String),

    #[error("no witness: the two morphisms have identical pullback data")]
    NoWitness,

    #[error("endpoint mismatch: {0}")]
    Endpoint(String),

    #[error("gluing error: cocycle fails on charts {triple:?}: {detail}")]
    Gluing { triple: (usize, usize, usize), detail: String },

    #[error("structure error: {0}")]
    Structure(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("spec error: {0}")]
    Spec(String),
}

pub type Result<T> = std::result::Result<T, Error>;
