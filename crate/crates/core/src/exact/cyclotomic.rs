use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_integer::Integer;
use num_traits::ToPrimitive;

use super::qmodz::{QmodZ, Rational};
use crate::error::{Error, Result};

/// Integer polynomial, coefficients lowest degree first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntPolynomial {
    coeffs: Vec<i64>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<i64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn zero() -> Self {
        IntPolynomial { coeffs: Vec::new() }
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn mul(&self, other: &IntPolynomial) -> IntPolynomial {
        if self.is_zero() || other.is_zero() {
            return IntPolynomial::zero();
        }
        let mut out = vec![0i64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == 0 {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPolynomial::new(out)
    }

    /// Remainder of `self` modulo a monic polynomial.
    pub fn rem_monic(&self, modulus: &IntPolynomial) -> IntPolynomial {
        let mut r = self.coeffs.clone();
        reduce_monic_in_place(&mut r, modulus.coeffs());
        IntPolynomial::new(r)
    }
}

fn reduce_monic_in_place(r: &mut Vec<i64>, m: &[i64]) {
    let dm = m.len() - 1;
    debug_assert_eq!(m[dm], 1);
    while r.len() > dm {
        let top = r.len() - 1;
        let lead = r[top];
        if lead != 0 {
            let shift = top - dm;
            for (k, mk) in m.iter().enumerate() {
                r[shift + k] -= lead * mk;
            }
        }
        r.pop();
    }
}

fn mobius_divisors(n: u64) -> Vec<(u64, i8)> {
    // divisors d of n with mu(n / d) != 0
    let mut primes = Vec::new();
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            primes.push(p);
            while m.is_multiple_of(p) {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        primes.push(m);
    }
    let mut out = Vec::with_capacity(1 << primes.len());
    for mask in 0u32..(1 << primes.len()) {
        let mut sq = 1;
        for (i, p) in primes.iter().enumerate() {
            if mask & (1 << i) != 0 {
                sq *= p;
            }
        }
        let mu = if mask.count_ones() % 2 == 0 { 1 } else { -1 };
        out.push((n / sq, mu));
    }
    out
}

fn compute_cyclotomic(n: u64) -> IntPolynomial {
    // Phi_n = prod_{d | n} (x^d - 1)^{mu(n/d)}: all multiplications first, so that
    // every subsequent division by x^d - 1 is exact.
    let factors = mobius_divisors(n);
    let up_degree: u64 = factors.iter().filter(|(_, mu)| *mu > 0).map(|(d, _)| d).sum();
    let mut poly = vec![0i64; up_degree as usize + 1];
    poly[0] = 1;
    let mut len = 1usize;
    for (d, _) in factors.iter().filter(|(_, mu)| *mu > 0) {
        let d = *d as usize;
        for k in (0..len + d).rev() {
            let hi = if k >= d { poly[k - d] } else { 0 };
            let lo = if k < len { poly[k] } else { 0 };
            poly[k] = hi - lo;
        }
        len += d;
    }
    for (d, _) in factors.iter().filter(|(_, mu)| *mu < 0) {
        let d = *d as usize;
        // p = q·(x^d - 1)  =>  q_k = q_{k-d} - p_k
        let new_len = len - d;
        for k in 0..new_len {
            let prev = if k >= d { poly[k - d] } else { 0 };
            poly[k] = prev - poly[k];
        }
        for c in poly.iter_mut().take(len).skip(new_len) {
            *c = 0;
        }
        len = new_len;
    }
    poly.truncate(len);
    IntPolynomial::new(poly)
}

fn cyclotomic_cache() -> &'static Mutex<HashMap<u64, Arc<IntPolynomial>>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<IntPolynomial>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn cyclotomic_shared(n: u64) -> Arc<IntPolynomial> {
    if let Some(p) = cyclotomic_cache().lock().unwrap().get(&n) {
        return p.clone();
    }
    let p = Arc::new(compute_cyclotomic(n));
    cyclotomic_cache().lock().unwrap().insert(n, p.clone());
    p
}

/// The `n`-th cyclotomic polynomial. Panics if `n == 0`.
pub fn cyclotomic_polynomial(n: u64) -> IntPolynomial {
    assert!(n >= 1, "cyclotomic polynomial index must be positive");
    (*cyclotomic_shared(n)).clone()
}

/// Integer combination of `N`-th roots of unity: `Σ coeffs[a]·exp(2πi·a/N)`.
#[derive(Clone, Debug)]
pub struct CyclotomicSum {
    modulus: u64,
    coeffs: Vec<i64>,
}

impl CyclotomicSum {
    pub fn zero() -> Self {
        CyclotomicSum { modulus: 1, coeffs: vec![0] }
    }

    pub fn one() -> Self {
        CyclotomicSum { modulus: 1, coeffs: vec![1] }
    }

    pub fn new(modulus: u64, coeffs: Vec<i64>) -> Self {
        assert!(modulus >= 1);
        assert_eq!(coeffs.len() as u64, modulus, "dense coefficient vector must have length N");
        CyclotomicSum { modulus, coeffs }
    }

    /// Single root of unity `exp(2πi·a/N)`.
    pub fn root(a: u64, modulus: u64) -> Self {
        let mut coeffs = vec![0; modulus as usize];
        coeffs[(a % modulus) as usize] = 1;
        CyclotomicSum { modulus, coeffs }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    /// Same value written over the multiple `m` of the current modulus.
    pub fn rescale(&self, m: u64) -> CyclotomicSum {
        assert!(m.is_multiple_of(self.modulus), "rescale target must be a multiple of the modulus");
        let step = (m / self.modulus) as usize;
        let mut coeffs = vec![0; m as usize];
        for (a, c) in self.coeffs.iter().enumerate() {
            coeffs[a * step] = *c;
        }
        CyclotomicSum { modulus: m, coeffs }
    }

    pub fn add(&self, other: &CyclotomicSum) -> CyclotomicSum {
        let m = self.modulus.lcm(&other.modulus);
        let mut a = self.rescale(m);
        let b = other.rescale(m);
        for (x, y) in a.coeffs.iter_mut().zip(&b.coeffs) {
            *x += y;
        }
        a
    }

    pub fn neg(&self) -> CyclotomicSum {
        CyclotomicSum { modulus: self.modulus, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn mul(&self, other: &CyclotomicSum) -> CyclotomicSum {
        let m = self.modulus.lcm(&other.modulus);
        let a = self.rescale(m);
        let b = other.rescale(m);
        let n = m as usize;
        let mut out = vec![0i64; n];
        let bnz: Vec<(usize, i64)> =
            b.coeffs.iter().enumerate().filter(|(_, c)| **c != 0).map(|(i, c)| (i, *c)).collect();
        for (i, x) in a.coeffs.iter().enumerate() {
            if *x == 0 {
                continue;
            }
            for (j, y) in &bnz {
                out[(i + j) % n] += x * y;
            }
        }
        CyclotomicSum { modulus: m, coeffs: out }
    }

    /// Complex conjugate: coefficient of `a` moves to `N - a`.
    pub fn conjugate(&self) -> CyclotomicSum {
        let n = self.modulus as usize;
        let mut out = vec![0i64; n];
        for (a, c) in self.coeffs.iter().enumerate() {
            out[(n - a) % n] = *c;
        }
        CyclotomicSum { modulus: self.modulus, coeffs: out }
    }

    /// Remainder of the coefficient polynomial modulo `Φ_N`.
    pub fn reduced_polynomial(&self) -> IntPolynomial {
        let phi = cyclotomic_shared(self.modulus);
        let mut r = self.coeffs.clone();
        reduce_monic_in_place(&mut r, phi.coeffs());
        IntPolynomial::new(r)
    }

    /// Canonical form at the current modulus (reduced modulo `Φ_N`).
    pub fn canonical(&self) -> CyclotomicSum {
        let r = self.reduced_polynomial();
        let mut coeffs = vec![0; self.modulus as usize];
        coeffs[..r.coeffs().len()].copy_from_slice(r.coeffs());
        CyclotomicSum { modulus: self.modulus, coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.reduced_polynomial().is_zero()
    }

    /// Squared modulus as an exact rational.
    pub fn abs_squared(&self) -> Result<Rational> {
        let r = self.mul(&self.conjugate()).reduced_polynomial();
        match r.coeffs() {
            [] => Ok(Rational::from_integer(0.into())),
            [c] => Ok(Rational::from_integer((*c).into())),
            _ => Err(Error::NonRationalNorm),
        }
    }

    /// Double-precision value `(re, im)`; for display only.
    pub fn to_complex(&self) -> (f64, f64) {
        let n = self.modulus as f64;
        let mut re = 0.0;
        let mut im = 0.0;
        for (a, c) in self.coeffs.iter().enumerate() {
            if *c != 0 {
                let t = std::f64::consts::TAU * a as f64 / n;
                re += *c as f64 * t.cos();
                im += *c as f64 * t.sin();
            }
        }
        (re, im)
    }
}

/// Tallies a multiset of angles into a sum of roots of unity.
pub fn cyclo_from_angles<'a, I>(angles: I) -> CyclotomicSum
where
    I: IntoIterator<Item = &'a QmodZ>,
{
    let angles: Vec<&QmodZ> = angles.into_iter().collect();
    let modulus = angles
        .iter()
        .map(|a| a.denom().to_u64().expect("angle denominator too large"))
        .fold(1u64, |acc, d| acc.lcm(&d));
    let mut coeffs = vec![0i64; modulus as usize];
    for a in angles {
        let k = a.numerator_over(modulus).expect("denominator divides lcm");
        coeffs[k as usize] += 1;
    }
    CyclotomicSum { modulus, coeffs }
}

/// Exact equality of the represented complex numbers.
pub fn cyclo_equals(a: &CyclotomicSum, b: &CyclotomicSum) -> bool {
    a.add(&b.neg()).is_zero()
}

/// `|a|²` as an exact rational.
pub fn cyclo_abs_squared(a: &CyclotomicSum) -> Result<Rational> {
    a.abs_squared()
}

impl PartialEq for CyclotomicSum {
    fn eq(&self, other: &Self) -> bool {
        cyclo_equals(self, other)
    }
}

impl Eq for CyclotomicSum {}

const SUBSCRIPTS: [char; 10] = ['₀', '₁', '₂', '₃', '₄', '₅', '₆', '₇', '₈', '₉'];
const SUPERSCRIPTS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];

fn script(n: u64, table: &[char; 10]) -> String {
    n.to_string().bytes().map(|b| table[(b - b'0') as usize]).collect()
}

/// Renders the canonical form, e.g. `1+ζ₄` or `-1-2ζ₃`.
impl fmt::Display for CyclotomicSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = self.reduced_polynomial();
        if r.is_zero() {
            return write!(f, "0");
        }
        let zeta = format!("ζ{}", script(self.modulus, &SUBSCRIPTS));
        let mut first = true;
        for (k, c) in r.coeffs().iter().enumerate() {
            if *c == 0 {
                continue;
            }
            let sign = if *c < 0 {
                "-"
            } else if first {
                ""
            } else {
                "+"
            };
            let mag = c.unsigned_abs();
            let body = match (k, mag) {
                (0, m) => m.to_string(),
                (1, 1) => zeta.clone(),
                (1, m) => format!("{m}{zeta}"),
                (k, 1) => format!("{zeta}{}", script(k as u64, &SUPERSCRIPTS)),
                (k, m) => format!("{m}{zeta}{}", script(k as u64, &SUPERSCRIPTS)),
            };
            write!(f, "{sign}{body}")?;
            first = false;
        }
        Ok(())
    }
}
