use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

/// Exact rational number in lowest terms with positive denominator.
pub type Rational = num_rational::BigRational;

/// Builds `num/den` as a [`Rational`]. Panics if `den == 0`.
pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Element of ℚ/ℤ, stored as its representative in `[0, 1)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QmodZ(Rational);

/// Reduces a rational number to its class in ℚ/ℤ.
pub fn qmodz_reduce(r: &Rational) -> QmodZ {
    QmodZ(r - r.floor())
}

impl QmodZ {
    pub fn zero() -> Self {
        QmodZ(Rational::zero())
    }

    pub fn new(num: i64, den: i64) -> Self {
        qmodz_reduce(&rational(num, den))
    }

    pub fn from_rational(r: &Rational) -> Self {
        qmodz_reduce(r)
    }

    /// The representative in `[0, 1)`.
    pub fn value(&self) -> &Rational {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    /// Additive order of the element.
    pub fn order(&self) -> BigInt {
        self.0.denom().clone()
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        qmodz_reduce(&(&self.0 * Rational::from_integer(k.clone())))
    }

    pub fn scale_i64(&self, k: i64) -> Self {
        self.scale(&BigInt::from(k))
    }

    /// Numerator of the class written over `modulus`, in `[0, modulus)`.
    /// Returns `None` if the denominator does not divide `modulus`.
    pub fn numerator_over(&self, modulus: u64) -> Option<u64> {
        let m = BigInt::from(modulus);
        let (q, r) = m.div_rem(self.0.denom());
        if !r.is_zero() {
            return None;
        }
        (self.0.numer() * q).to_u64()
    }

    pub fn from_numerator(num: u64, modulus: u64) -> Self {
        QmodZ::from_rational(&Rational::new(BigInt::from(num), BigInt::from(modulus)))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(0.0)
    }
}

impl Default for QmodZ {
    fn default() -> Self {
        Self::zero()
    }
}

impl Add for &QmodZ {
    type Output = QmodZ;
    fn add(self, rhs: &QmodZ) -> QmodZ {
        let s = &self.0 + &rhs.0;
        if s >= Rational::one() {
            QmodZ(s - Rational::one())
        } else {
            QmodZ(s)
        }
    }
}

impl Add for QmodZ {
    type Output = QmodZ;
    fn add(self, rhs: QmodZ) -> QmodZ {
        &self + &rhs
    }
}

impl AddAssign<&QmodZ> for QmodZ {
    fn add_assign(&mut self, rhs: &QmodZ) {
        *self = &*self + rhs;
    }
}

impl Neg for &QmodZ {
    type Output = QmodZ;
    fn neg(self) -> QmodZ {
        if self.0.is_zero() {
            QmodZ::zero()
        } else {
            QmodZ(Rational::one() - &self.0)
        }
    }
}

impl Neg for QmodZ {
    type Output = QmodZ;
    fn neg(self) -> QmodZ {
        -&self
    }
}

impl Sub for &QmodZ {
    type Output = QmodZ;
    fn sub(self, rhs: &QmodZ) -> QmodZ {
        self + &(-rhs)
    }
}

impl Sub for QmodZ {
    type Output = QmodZ;
    fn sub(self, rhs: QmodZ) -> QmodZ {
        &self - &rhs
    }
}

impl fmt::Display for QmodZ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Debug for QmodZ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{} mod 1", self.0.numer(), self.0.denom())
    }
}

/// Renders a rational as `num/den` (denominator always written).
pub fn rational_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `num/den` or a bare integer.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rational::new(n, d))
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}
