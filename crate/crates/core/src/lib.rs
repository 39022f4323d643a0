//! Exact sequence tables, triangular-sum identity verifiers, Dirichlet
//! character machinery, and an explicit bound family for character-sum
//! maxima.
//!
//! Everything identity-shaped runs in exact arithmetic — big integers,
//! Gaussian rationals, integer combinations of roots of unity — and a
//! verifier returning `true` means the two sides agreed bit for bit.
//! Floating point appears only at comparison edges (magnitudes, bound
//! values), at documented precision and with documented guards.

pub mod arith;
pub mod bounds;
pub mod cyclotomic;
pub mod dirichlet;
pub mod fuzz;
pub mod gauss;
pub mod hp;
pub mod periodic;
pub mod seq;
pub mod trisum;

/// Crate-wide error type.
///
/// `Usage` marks violated preconditions (bad arguments), `Construction`
/// marks malformed data handed to a constructor, and `SizeCap` marks a
/// request refused because it exceeds a configured work limit. Internal
/// invariant violations panic instead of surfacing here.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("usage: {0}")]
    Usage(String),
    #[error("construction: {0}")]
    Construction(String),
    #[error("size cap exceeded: {0}")]
    SizeCap(String),
    #[error("parse: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
