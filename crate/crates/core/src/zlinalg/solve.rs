use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::matrix::IntMatrix;
use super::smith::{smith_normal_form, SmithDecomposition};
use crate::error::{Error, Result};

fn check_rows(m: &IntMatrix, v: &[BigInt]) -> Result<()> {
    if v.len() != m.rows() {
        return Err(Error::DimensionMismatch { expected: m.rows(), found: v.len() });
    }
    Ok(())
}

/// Some integer `x` with `M·x = v`, or `None` if there is none.
pub fn solve_integer(m: &IntMatrix, v: &[BigInt]) -> Result<Option<Vec<BigInt>>> {
    check_rows(m, v)?;
    Ok(solve_with_smith(&smith_normal_form(m), v))
}

pub(crate) fn solve_with_smith(s: &SmithDecomposition, v: &[BigInt]) -> Option<Vec<BigInt>> {
    // D·y = U·v, x = V·y
    let uv = s.u.mul_vec(v);
    let d = s.invariants();
    let mut y = vec![BigInt::zero(); s.v.rows()];
    for (i, w) in uv.iter().enumerate() {
        match d.get(i) {
            Some(di) if !di.is_zero() => {
                let (q, r) = w.div_rem(di);
                if !r.is_zero() {
                    return None;
                }
                y[i] = q;
            }
            _ => {
                if !w.is_zero() {
                    return None;
                }
            }
        }
    }
    Some(s.v.mul_vec(&y))
}

/// Basis of the integer kernel `{x : M·x = 0}`.
pub fn kernel_basis(m: &IntMatrix) -> Vec<Vec<BigInt>> {
    kernel_from_smith(&smith_normal_form(m))
}

pub(crate) fn kernel_from_smith(s: &SmithDecomposition) -> Vec<Vec<BigInt>> {
    let rank = s.rank();
    (rank..s.v.cols()).map(|j| s.v.column(j)).collect()
}

/// Affine solution set of `M·x ≡ v (mod 2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Mod2Solutions {
    Empty,
    Affine { particular: Vec<u8>, kernel: Vec<Vec<u8>> },
}

impl Mod2Solutions {
    /// Number of solutions, `0` or `2^dim(kernel)`.
    pub fn count(&self) -> u128 {
        match self {
            Mod2Solutions::Empty => 0,
            Mod2Solutions::Affine { kernel, .. } => 1u128 << kernel.len(),
        }
    }

    /// All solutions, in the order of the binary counter over the kernel basis.
    pub fn enumerate(&self) -> Vec<Vec<u8>> {
        match self {
            Mod2Solutions::Empty => Vec::new(),
            Mod2Solutions::Affine { particular, kernel } => {
                assert!(kernel.len() < 24, "mod-2 solution set too large to enumerate");
                (0u32..(1 << kernel.len()))
                    .map(|mask| {
                        let mut x = particular.clone();
                        for (k, b) in kernel.iter().enumerate() {
                            if mask & (1 << k) != 0 {
                                for (xi, bi) in x.iter_mut().zip(b) {
                                    *xi ^= bi;
                                }
                            }
                        }
                        x
                    })
                    .collect()
            }
        }
    }
}

fn bit(x: &BigInt) -> u8 {
    if x.is_odd() {
        1
    } else {
        0
    }
}

/// Solves `M·x ≡ v (mod 2)` by Gaussian elimination over 𝔽₂.
pub fn solve_mod2(m: &IntMatrix, v: &[BigInt]) -> Result<Mod2Solutions> {
    check_rows(m, v)?;
    let (r, c) = (m.rows(), m.cols());
    let mut a: Vec<Vec<u8>> = (0..r)
        .map(|i| {
            let mut row: Vec<u8> = m.row(i).iter().map(bit).collect();
            row.push(bit(&v[i]));
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..c {
        let Some(p) = (row..r).find(|&i| a[i][col] == 1) else { continue };
        a.swap(row, p);
        for i in 0..r {
            if i != row && a[i][col] == 1 {
                let src = a[row].clone();
                for (x, y) in a[i].iter_mut().zip(&src) {
                    *x ^= y;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == r {
            break;
        }
    }
    if a[row..].iter().any(|rw| rw[c] == 1) {
        return Ok(Mod2Solutions::Empty);
    }
    let mut particular = vec![0u8; c];
    for (i, &pc) in pivots.iter().enumerate() {
        particular[pc] = a[i][c];
    }
    let free: Vec<usize> = (0..c).filter(|j| !pivots.contains(j)).collect();
    let kernel = free
        .iter()
        .map(|&f| {
            let mut x = vec![0u8; c];
            x[f] = 1;
            for (i, &pc) in pivots.iter().enumerate() {
                x[pc] = a[i][f];
            }
            x
        })
        .collect();
    Ok(Mod2Solutions::Affine { particular, kernel })
}

/// Echelon basis of the column span `Im M ⊂ ℤʳ`, used to reduce vectors to a
/// canonical representative of their coset modulo `Im M`.
#[derive(Clone, Debug)]
pub struct ImageLattice {
    dim: usize,
    // (pivot row, basis vector); vector vanishes above its pivot, pivot entry > 0
    basis: Vec<(usize, Vec<BigInt>)>,
}

impl ImageLattice {
    pub fn new(m: &IntMatrix) -> Self {
        let dim = m.rows();
        let mut pool: Vec<Vec<BigInt>> =
            (0..m.cols()).map(|j| m.column(j)).filter(|c| c.iter().any(|x| !x.is_zero())).collect();
        let mut basis = Vec::new();
        for row in 0..dim {
            let mut pivot: Option<Vec<BigInt>> = None;
            let mut rest = Vec::with_capacity(pool.len());
            for vec in pool.drain(..) {
                if vec[row].is_zero() {
                    rest.push(vec);
                    continue;
                }
                pivot = Some(match pivot {
                    None => vec,
                    Some(p) => {
                        let (g, s, t) = ext_gcd(&p[row], &vec[row]);
                        let a = &p[row] / &g;
                        let b = &vec[row] / &g;
                        let combined: Vec<BigInt> = p.iter().zip(&vec).map(|(x, y)| &s * x + &t * y).collect();
                        let other: Vec<BigInt> = p.iter().zip(&vec).map(|(x, y)| &b * x - &a * y).collect();
                        if other.iter().any(|x| !x.is_zero()) {
                            rest.push(other);
                        }
                        combined
                    }
                });
            }
            pool = rest;
            if let Some(mut p) = pivot {
                if p[row].is_negative() {
                    p.iter_mut().for_each(|x| *x = -&*x);
                }
                basis.push((row, p));
            }
        }
        ImageLattice { dim, basis }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn pivots(&self) -> Vec<(usize, BigInt)> {
        self.basis.iter().map(|(r, v)| (*r, v[*r].clone())).collect()
    }

    /// Canonical coset representative: each pivot coordinate in `[0, pivot)`.
    pub fn reduce(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.dim);
        let mut out = v.to_vec();
        for (row, b) in &self.basis {
            let q = out[*row].div_floor(&b[*row]);
            if !q.is_zero() {
                for (x, y) in out.iter_mut().zip(b) {
                    *x -= &q * y;
                }
            }
        }
        out
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        self.reduce(v).iter().all(Zero::is_zero)
    }
}

/// `(g, s, t)` with `g = gcd(a, b) > 0` and `s·a + t·b = g`.
pub fn ext_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    if e.gcd.is_negative() {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}
