use num_integer::Integer;

use crate::error::{Error, Result};

/// `ℤ/d₁ ⊕ … ⊕ ℤ/d_k` with `2 ≤ d₁ | d₂ | … | d_k`.
///
/// Elements are tuples `(a₁, …, a_k)` with `0 ≤ a_i < d_i`, indexed in
/// lexicographic order (last coordinate fastest).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteAbelianGroup {
    factors: Vec<u64>,
    strides: Vec<u64>,
    order: u64,
}

impl FiniteAbelianGroup {
    pub fn new(factors: Vec<u64>) -> Result<Self> {
        for (i, &d) in factors.iter().enumerate() {
            if d < 2 {
                return Err(Error::InvalidGroup(format!("factor {d} at position {i} is smaller than 2")));
            }
            if i > 0 && d % factors[i - 1] != 0 {
                return Err(Error::InvalidGroup(format!("factor {} does not divide {d}", factors[i - 1])));
            }
        }
        let order128: u128 = factors.iter().map(|&d| d as u128).product();
        let order = u64::try_from(order128).map_err(|_| Error::Overflow(order128.to_string()))?;
        let mut strides = vec![1u64; factors.len()];
        for i in (0..factors.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * factors[i + 1];
        }
        Ok(FiniteAbelianGroup { factors, strides, order })
    }

    pub fn trivial() -> Self {
        FiniteAbelianGroup { factors: Vec::new(), strides: Vec::new(), order: 1 }
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// Largest element order.
    pub fn exponent(&self) -> u64 {
        self.factors.last().copied().unwrap_or(1)
    }

    pub fn index_of(&self, x: &[u64]) -> Result<usize> {
        if x.len() != self.rank() || x.iter().zip(&self.factors).any(|(a, d)| a >= d) {
            return Err(Error::ElementOutOfRange);
        }
        Ok(x.iter().zip(&self.strides).map(|(a, s)| a * s).sum::<u64>() as usize)
    }

    pub fn element(&self, idx: usize) -> Vec<u64> {
        let idx = idx as u64;
        self.factors.iter().zip(&self.strides).map(|(d, s)| (idx / s) % d).collect()
    }

    pub fn generator(&self, i: usize) -> usize {
        self.strides[i] as usize
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        let (a, b) = (a as u64, b as u64);
        let mut out = 0;
        for (d, s) in self.factors.iter().zip(&self.strides) {
            out += (((a / s) % d + (b / s) % d) % d) * s;
        }
        out as usize
    }

    pub fn neg(&self, a: usize) -> usize {
        let a = a as u64;
        let mut out = 0;
        for (d, s) in self.factors.iter().zip(&self.strides) {
            out += ((d - (a / s) % d) % d) * s;
        }
        out as usize
    }

    pub fn scale(&self, a: usize, k: u64) -> usize {
        let a = a as u64;
        let mut out = 0;
        for (d, s) in self.factors.iter().zip(&self.strides) {
            out += ((((a / s) % d) as u128 * k as u128 % *d as u128) as u64) * s;
        }
        out as usize
    }

    /// Additive order of the element at `idx`.
    pub fn element_order(&self, idx: usize) -> u64 {
        self.element(idx).iter().zip(&self.factors).fold(1u64, |acc, (a, d)| acc.lcm(&(d / a.gcd(d))))
    }
}
