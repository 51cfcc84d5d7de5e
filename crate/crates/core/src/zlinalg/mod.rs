//! Exact integer linear algebra.

mod matrix;
mod smith;
mod solve;

pub use matrix::{big_vec, IntMatrix};
pub use smith::{smith_normal_form, SmithDecomposition};
pub use solve::{ext_gcd, kernel_basis, solve_integer, solve_mod2, ImageLattice, Mod2Solutions};
pub(crate) use solve::{kernel_from_smith, solve_with_smith};
