//! Exact arithmetic: rationals, ℚ/ℤ, and sums of roots of unity.

mod cyclotomic;
mod qmodz;

pub use cyclotomic::{
    cyclo_abs_squared, cyclo_equals, cyclo_from_angles, cyclotomic_polynomial, CyclotomicSum, IntPolynomial,
};
pub use qmodz::{parse_rational, qmodz_reduce, rational, rational_string, QmodZ, Rational};
