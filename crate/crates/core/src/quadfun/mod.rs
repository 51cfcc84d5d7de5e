//! Quadratic functions on finite abelian groups and isomorphism search.

mod function;
mod group;
mod search;

pub use function::{
    bilinear_of, defect_of, gauss_sum, invariant_fingerprint, Fingerprint, GroupIso, QuadraticFunction, RadicalClass,
    DEFAULT_ORDER_CAP,
};
pub use group::FiniteAbelianGroup;
pub use search::{
    compare_quadratic, is_isomorphic, isomorphisms, search_isomorphism, FormData, Mismatch, SearchOutcome, ValueRule,
};
