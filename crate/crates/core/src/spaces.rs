//! Linking matrices of the standard examples.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Signed;

use crate::error::{Error, Result};
use crate::presentation::DecoratedPresentation;
use crate::zlinalg::IntMatrix;

/// `S³` as `+1`-surgery on the unknot.
pub fn s3() -> IntMatrix {
    IntMatrix::from_rows(&[[1]])
}

/// `S³` as `−1`-surgery on the unknot.
pub fn s3_negative() -> IntMatrix {
    IntMatrix::from_rows(&[[-1]])
}

pub fn rp3() -> IntMatrix {
    IntMatrix::from_rows(&[[2]])
}

pub fn s2xs1() -> IntMatrix {
    IntMatrix::from_rows(&[[0]])
}

/// 0-framed Borromean rings: all linking numbers vanish.
pub fn t3() -> IntMatrix {
    IntMatrix::zeros(3, 3)
}

/// Cartan matrix of `E8`; the trivalent vertex has arms of length 1, 2 and 4.
pub fn e8() -> IntMatrix {
    let mut m = IntMatrix::zeros(8, 8);
    let edges = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (2, 7)];
    for i in 0..8 {
        m.set(i, i, BigInt::from(2));
    }
    for (i, j) in edges {
        m.set(i, j, BigInt::from(-1));
        m.set(j, i, BigInt::from(-1));
    }
    m
}

/// Coefficients `a_i ≥ 2` of `p/q = a₁ − 1/(a₂ − 1/(…))`.
pub fn negative_continued_fraction(p: i64, q: i64) -> Result<Vec<i64>> {
    if p < 2 || q <= 0 || q >= p || p.gcd(&q) != 1 {
        return Err(Error::InvalidLens { p, q });
    }
    let (mut num, mut den) = (p, q);
    let mut out = Vec::new();
    while den != 0 {
        let a = (num + den - 1) / den;
        out.push(a);
        (num, den) = (den, a * den - num);
    }
    Ok(out)
}

/// Chain-link presentation of `L(p, q)`: tridiagonal, diagonal `a_i`, off-diagonal `−1`.
pub fn lens(p: i64, q: i64) -> Result<IntMatrix> {
    let a = negative_continued_fraction(p, q)?;
    let n = a.len();
    let mut m = IntMatrix::zeros(n, n);
    for (i, &ai) in a.iter().enumerate() {
        m.set(i, i, BigInt::from(ai));
        if i + 1 < n {
            m.set(i, i + 1, BigInt::from(-1));
            m.set(i + 1, i, BigInt::from(-1));
        }
    }
    assert_eq!(m.determinant().abs(), BigInt::from(p));
    Ok(m)
}

/// Block-diagonal sum with concatenated Chern vectors.
pub fn connected_sum(a: &DecoratedPresentation, b: &DecoratedPresentation) -> Result<DecoratedPresentation> {
    let s = a.chern().iter().chain(b.chern()).cloned().collect();
    DecoratedPresentation::new(a.matrix().direct_sum(b.matrix()), s)
}
