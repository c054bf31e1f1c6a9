//! Finite-web quantitative models of linear logic: relational and weighted
//! relational models, coherence spaces and probabilistic coherence spaces,
//! with a graded exponential, a summability monad and Taylor expansion.

pub mod analytic;
pub mod error;
pub mod exponential;
pub mod lang;
pub mod laws;
pub mod model;
pub mod multiset;
pub mod semiring;
pub mod summability;
pub mod taylor;

pub use error::{Error, Result};
pub use model::{Arrow, Bounds, ModelKind, Morphism, Obj};
pub use multiset::{Multiset, Point};
pub use semiring::{Bool, NatInf, RatPos, Scalar, Semiring, SemiringId};

/// Boolean relations.
pub type RelMor = Morphism<Bool>;
/// Matrices over the naturals with infinity.
pub type NatMor = Morphism<NatInf>;
/// Matrices over the nonnegative rationals with infinity.
pub type RatMor = Morphism<RatPos>;
