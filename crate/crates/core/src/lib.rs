//! Degree-0 Spin^c invariants of closed oriented 3-manifolds presented by
//! surgery on framed links, at the level of linking matrices.

pub mod classify;
pub mod error;
pub mod exact;
pub mod lattice;
pub mod presentation;
pub mod quadfun;
pub mod spaces;
pub mod zlinalg;

pub use error::{Error, Result};
