//! Bilinear lattices `(ℤⁿ, B)` with characteristic forms, and the
//! discriminant construction `(B, c) ↦ (G_f, λ_f, φ_{f,c})`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{qmodz_reduce, QmodZ, Rational};
use crate::zlinalg::{
    kernel_from_smith, smith_normal_form, solve_mod2, solve_with_smith, ImageLattice, IntMatrix, Mod2Solutions,
    SmithDecomposition,
};

/// Symmetric integer matrix `B`, the pairing on `H = ℤⁿ` in its standard basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BilinearLattice {
    b: IntMatrix,
}

impl BilinearLattice {
    pub fn new(b: IntMatrix) -> Result<Self> {
        if !b.is_square() {
            return Err(Error::DimensionMismatch { expected: b.rows(), found: b.cols() });
        }
        if let Some((row, col)) = b.first_asymmetry() {
            return Err(Error::NotSymmetric { row, col });
        }
        Ok(BilinearLattice { b })
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.b
    }

    pub fn dim(&self) -> usize {
        self.b.rows()
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: len });
        }
        Ok(())
    }
}

/// Integer covector `c` with `c_i ≡ B_ii (mod 2)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CharacteristicForm {
    c: Vec<BigInt>,
}

impl CharacteristicForm {
    pub fn new(lattice: &BilinearLattice, c: Vec<BigInt>) -> Result<Self> {
        lattice.check_len(c.len())?;
        if let Some(index) = first_parity_violation(lattice.matrix(), &c) {
            return Err(Error::ParityViolation { index });
        }
        Ok(CharacteristicForm { c })
    }

    pub fn as_slice(&self) -> &[BigInt] {
        &self.c
    }

    pub fn into_vec(self) -> Vec<BigInt> {
        self.c
    }
}

pub(crate) fn first_parity_violation(b: &IntMatrix, c: &[BigInt]) -> Option<usize> {
    (0..c.len()).find(|&i| (&c[i] - b.get(i, i)).is_odd())
}

/// True iff `c_i ≡ B_ii (mod 2)` for every `i`.
pub fn is_characteristic(lattice: &BilinearLattice, c: &[BigInt]) -> Result<bool> {
    lattice.check_len(c.len())?;
    Ok(first_parity_violation(lattice.matrix(), c).is_none())
}

/// Solution of `B·w ≡ diag(B) (mod 2)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WuClass {
    bits: Vec<u8>,
}

impl WuClass {
    pub fn new(lattice: &BilinearLattice, bits: Vec<u8>) -> Result<Self> {
        lattice.check_len(bits.len())?;
        let bits: Vec<u8> = bits.into_iter().map(|b| b & 1).collect();
        let w = WuClass { bits };
        let bw = lattice.matrix().mul_vec(&w.lift());
        if bw.iter().enumerate().any(|(i, x)| (x - lattice.matrix().get(i, i)).is_odd()) {
            return Err(Error::NotCharacteristicSolution);
        }
        Ok(w)
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    /// The lift with entries in `{0, 1}`.
    pub fn lift(&self) -> Vec<BigInt> {
        self.bits.iter().map(|&b| BigInt::from(b)).collect()
    }
}

/// Every Wu class of the lattice; never empty.
pub fn wu_classes(lattice: &BilinearLattice) -> Vec<WuClass> {
    let b = lattice.matrix();
    let diag = b.diagonal();
    match solve_mod2(b, &diag).expect("square matrix") {
        Mod2Solutions::Empty => unreachable!("the diagonal of a symmetric matrix lies in its mod-2 image"),
        s => s.enumerate().into_iter().map(|bits| WuClass { bits }).collect(),
    }
}

/// Rational vector `x` with `B·x` integral.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DualVector {
    x: Vec<Rational>,
}

impl DualVector {
    pub fn new(lattice: &BilinearLattice, x: Vec<Rational>) -> Result<Self> {
        lattice.check_len(x.len())?;
        let b = lattice.matrix();
        for i in 0..b.rows() {
            let s: Rational = b.row(i).iter().zip(&x).map(|(a, y)| Rational::from_integer(a.clone()) * y).sum();
            if !s.is_integer() {
                return Err(Error::NotInDualLattice { index: i });
            }
        }
        Ok(DualVector { x })
    }

    pub fn from_integers(v: &[BigInt]) -> Self {
        DualVector { x: v.iter().map(|a| Rational::from_integer(a.clone())).collect() }
    }

    pub fn zero(n: usize) -> Self {
        DualVector { x: vec![Rational::zero(); n] }
    }

    pub fn as_slice(&self) -> &[Rational] {
        &self.x
    }

    pub fn add(&self, other: &DualVector) -> DualVector {
        DualVector { x: self.x.iter().zip(&other.x).map(|(a, b)| a + b).collect() }
    }

    pub fn neg(&self) -> DualVector {
        DualVector { x: self.x.iter().map(|a| -a).collect() }
    }

    pub fn scale(&self, k: &Rational) -> DualVector {
        DualVector { x: self.x.iter().map(|a| a * k).collect() }
    }
}

/// Smith-form description of `G_f = H^♯/H` with a fixed section of
/// `0 → Ker B ⊗ ℚ/ℤ → G_f → Tors Coker B → 0`.
///
/// With `U·B·V = D`, torsion lifts are `g_i = V·e_i / d_i` for `d_i > 1`
/// and the kernel basis is `V·e_i` for `d_i = 0`.
#[derive(Clone, Debug)]
pub struct DiscriminantData {
    lattice: BilinearLattice,
    smith: SmithDecomposition,
    v_inverse: IntMatrix,
    torsion_index: Vec<usize>,
    free_index: Vec<usize>,
    torsion_factors: Vec<BigInt>,
    torsion_lifts: Vec<Vec<Rational>>,
    kernel_basis: Vec<Vec<BigInt>>,
}

/// Builds the discriminant data of a lattice.
pub fn discriminant(lattice: &BilinearLattice) -> DiscriminantData {
    let n = lattice.dim();
    let mut smith = smith_normal_form(lattice.matrix());
    let d = smith.invariants();
    let rank = smith.rank();
    // kernel vectors with positive leading entry
    for j in rank..n {
        let col = smith.v.column(j);
        if col.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
            smith.v.negate_col(j);
        }
    }
    let torsion_index: Vec<usize> = (0..rank).filter(|&i| d[i] > BigInt::one()).collect();
    let free_index: Vec<usize> = (rank..n).collect();
    let torsion_factors: Vec<BigInt> = torsion_index.iter().map(|&i| d[i].clone()).collect();
    let torsion_lifts = torsion_index
        .iter()
        .map(|&i| smith.v.column(i).into_iter().map(|x| Rational::new(x, d[i].clone())).collect())
        .collect();
    let kernel_basis = kernel_from_smith(&smith);
    let v_inverse = unimodular_inverse(&smith.v);
    DiscriminantData {
        lattice: lattice.clone(),
        smith,
        v_inverse,
        torsion_index,
        free_index,
        torsion_factors,
        torsion_lifts,
        kernel_basis,
    }
}

pub(crate) fn unimodular_inverse(v: &IntMatrix) -> IntMatrix {
    let n = v.rows();
    let s = smith_normal_form(v);
    let cols: Vec<Vec<BigInt>> = (0..n)
        .map(|j| {
            let mut e = vec![BigInt::zero(); n];
            e[j] = BigInt::one();
            solve_with_smith(&s, &e).expect("unimodular matrix is invertible over ℤ")
        })
        .collect();
    IntMatrix::from_big_rows(cols).expect("square").transpose()
}

impl DiscriminantData {
    pub fn lattice(&self) -> &BilinearLattice {
        &self.lattice
    }

    pub fn smith(&self) -> &SmithDecomposition {
        &self.smith
    }

    /// `b = dim Ker B`.
    pub fn free_rank(&self) -> usize {
        self.free_index.len()
    }

    pub fn kernel_basis(&self) -> &[Vec<BigInt>] {
        &self.kernel_basis
    }

    /// Invariant factors `d_i > 1` of `Tors Coker B`, each dividing the next.
    pub fn torsion_factors(&self) -> &[BigInt] {
        &self.torsion_factors
    }

    pub fn torsion_lifts(&self) -> &[Vec<Rational>] {
        &self.torsion_lifts
    }

    pub fn torsion_lift(&self, i: usize) -> DualVector {
        DualVector { x: self.torsion_lifts[i].clone() }
    }

    /// `|Tors Coker B|`.
    pub fn torsion_order(&self) -> BigInt {
        self.torsion_factors.iter().product()
    }

    /// Dual vector `Σ a_i g_i` of the torsion section.
    pub fn torsion_element(&self, a: &[BigInt]) -> DualVector {
        let n = self.lattice.dim();
        let mut x = vec![Rational::zero(); n];
        for (ai, g) in a.iter().zip(&self.torsion_lifts) {
            if ai.is_zero() {
                continue;
            }
            let k = Rational::from_integer(ai.clone());
            for (xj, gj) in x.iter_mut().zip(g) {
                *xj += &k * gj;
            }
        }
        DualVector { x }
    }

    /// Dual vector `Σ r_j k_j` on the radical.
    pub fn radical_element(&self, r: &[Rational]) -> DualVector {
        let n = self.lattice.dim();
        let mut x = vec![Rational::zero(); n];
        for (rj, k) in r.iter().zip(&self.kernel_basis) {
            for (xi, ki) in x.iter_mut().zip(k) {
                *xi += rj * Rational::from_integer(ki.clone());
            }
        }
        DualVector { x }
    }

    /// Coordinates of the class `[x] ∈ G_f` in the stored splitting: torsion
    /// coordinates in `[0, d_i)` and radical coordinates in `[0, 1)`.
    pub fn class_coordinates(&self, x: &DualVector) -> Result<(Vec<BigInt>, Vec<Rational>)> {
        self.lattice.check_len(x.x.len())?;
        let y: Vec<Rational> = (0..self.lattice.dim())
            .map(|i| self.v_inverse.row(i).iter().zip(&x.x).map(|(a, b)| Rational::from_integer(a.clone()) * b).sum())
            .collect();
        let mut torsion = Vec::with_capacity(self.torsion_index.len());
        for (&i, d) in self.torsion_index.iter().zip(&self.torsion_factors) {
            let t = &y[i] * Rational::from_integer(d.clone());
            if !t.is_integer() {
                return Err(Error::NotInDualLattice { index: i });
            }
            torsion.push(t.to_integer().mod_floor(d));
        }
        let radical = self.free_index.iter().map(|&i| qmodz_reduce(&y[i]).value().clone()).collect();
        Ok((torsion, radical))
    }

    /// Coordinates of `[α] ∈ Coker B`: torsion part mod `d_i`, free part in ℤ.
    pub fn coker_coordinates(&self, alpha: &[BigInt]) -> Result<(Vec<BigInt>, Vec<BigInt>)> {
        self.lattice.check_len(alpha.len())?;
        let ua = self.smith.u.mul_vec(alpha);
        let torsion = self.torsion_index.iter().zip(&self.torsion_factors).map(|(&i, d)| ua[i].mod_floor(d)).collect();
        let free = self.free_index.iter().map(|&i| ua[i].clone()).collect();
        Ok((torsion, free))
    }

    fn check(&self, x: &DualVector) -> Result<()> {
        self.lattice.check_len(x.x.len())
    }

    fn form(&self, x: &[Rational], y: &[Rational]) -> Rational {
        let b = self.lattice.matrix();
        let mut s = Rational::zero();
        for (i, xi) in x.iter().enumerate().take(b.rows()) {
            if xi.is_zero() {
                continue;
            }
            let row: Rational = b.row(i).iter().zip(y).map(|(a, v)| Rational::from_integer(a.clone()) * v).sum();
            s += xi * row;
        }
        s
    }
}

fn covector_eval(c: &[BigInt], x: &[Rational]) -> Rational {
    c.iter().zip(x).map(|(a, v)| Rational::from_integer(a.clone()) * v).sum()
}

/// `λ_f([x],[y]) = xᵀBy mod 1`.
pub fn linking_pairing(d: &DiscriminantData, x: &DualVector, y: &DualVector) -> Result<QmodZ> {
    d.check(x)?;
    d.check(y)?;
    Ok(qmodz_reduce(&d.form(&x.x, &y.x)))
}

/// `φ_{f,c}([x]) = ½(xᵀBx − cᵀx) mod 1`.
pub fn phi_eval(d: &DiscriminantData, c: &CharacteristicForm, x: &DualVector) -> Result<QmodZ> {
    d.check(x)?;
    d.lattice.check_len(c.c.len())?;
    let v = (d.form(&x.x, &x.x) - covector_eval(&c.c, &x.x)) / Rational::from_integer(2.into());
    Ok(qmodz_reduce(&v))
}

/// `⟨[α], [x]⟩ = αᵀx mod 1` for `α ∈ H^*` and `x ∈ H^♯`.
pub fn evaluation_pairing(d: &DiscriminantData, alpha: &[BigInt], x: &DualVector) -> Result<QmodZ> {
    d.check(x)?;
    d.lattice.check_len(alpha.len())?;
    Ok(qmodz_reduce(&covector_eval(alpha, &x.x)))
}

/// `c(k_j)/2` for each kernel-basis vector `k_j`.
///
/// On the radical, `φ_{f,c}(k_j ⊗ r) = −(c(k_j)/2)·r mod 1`.
pub fn radical_slope(d: &DiscriminantData, c: &CharacteristicForm) -> Vec<Rational> {
    d.kernel_basis
        .iter()
        .map(|k| {
            let ck: BigInt = k.iter().zip(&c.c).map(|(a, b)| a * b).sum();
            Rational::new(ck, 2.into())
        })
        .collect()
}

/// Canonical representatives of `Char(f) / 2·Im B`.
///
/// A characteristic `c` is written `diag(B) + 2α` and `α` is reduced against an
/// echelon basis of `Im B`.
#[derive(Clone, Debug)]
pub struct ChernClasses {
    diag: Vec<BigInt>,
    image: ImageLattice,
}

impl ChernClasses {
    pub fn new(lattice: &BilinearLattice) -> Self {
        ChernClasses { diag: lattice.matrix().diagonal(), image: ImageLattice::new(lattice.matrix()) }
    }

    fn offset(&self, c: &[BigInt]) -> Result<Vec<BigInt>> {
        if c.len() != self.diag.len() {
            return Err(Error::DimensionMismatch { expected: self.diag.len(), found: c.len() });
        }
        c.iter()
            .zip(&self.diag)
            .enumerate()
            .map(|(i, (a, b))| {
                let (q, r) = (a - b).div_rem(&BigInt::from(2));
                if r.is_zero() {
                    Ok(q)
                } else {
                    Err(Error::ParityViolation { index: i })
                }
            })
            .collect()
    }

    fn chern_of_offset(&self, alpha: &[BigInt]) -> Vec<BigInt> {
        self.diag.iter().zip(alpha).map(|(d, a)| d + BigInt::from(2) * a).collect()
    }

    /// The canonical representative of `[c]`.
    pub fn canonical(&self, c: &[BigInt]) -> Result<Vec<BigInt>> {
        let alpha = self.offset(c)?;
        Ok(self.chern_of_offset(&self.image.reduce(&alpha)))
    }

    /// `c − c' ∈ 2·Im B`.
    pub fn same_class(&self, c: &[BigInt], c2: &[BigInt]) -> Result<bool> {
        Ok(self.canonical(c)? == self.canonical(c2)?)
    }

    /// Number of classes, `|det B|`, or `None` when `B` is degenerate.
    pub fn count(&self) -> Option<BigInt> {
        if self.image.rank() < self.diag.len() {
            return None;
        }
        Some(self.image.pivots().into_iter().map(|(_, h)| h).product())
    }

    /// All canonical representatives in lexicographic order of their offsets;
    /// `None` when `B` is degenerate.
    pub fn enumerate(&self) -> Option<Vec<Vec<BigInt>>> {
        self.count()?;
        let bounds: Vec<BigInt> = self.image.pivots().into_iter().map(|(_, h)| h).collect();
        let n = bounds.len();
        let mut out = Vec::new();
        let mut alpha = vec![BigInt::zero(); n];
        loop {
            out.push(self.chern_of_offset(&alpha));
            let mut k = n;
            loop {
                if k == 0 {
                    return Some(out);
                }
                k -= 1;
                alpha[k] += 1;
                if alpha[k] < bounds[k] {
                    break;
                }
                alpha[k] = BigInt::zero();
            }
        }
    }
}

/// Canonical representative of `[c] ∈ Char(f) / 2·Im B`.
pub fn canonical_chern(lattice: &BilinearLattice, c: &[BigInt]) -> Result<Vec<BigInt>> {
    ChernClasses::new(lattice).canonical(c)
}

/// `gcd` of a list of integers (0 for an empty or all-zero list).
pub fn gcd_all<'a, I: IntoIterator<Item = &'a BigInt>>(xs: I) -> BigInt {
    xs.into_iter().fold(BigInt::zero(), |g, x| g.gcd(x)).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational;
    use crate::zlinalg::big_vec;
    use proptest::prelude::*;

    fn lat(rows: &[&[i64]]) -> BilinearLattice {
        BilinearLattice::new(IntMatrix::from_rows(rows)).unwrap()
    }

    fn cf(l: &BilinearLattice, c: &[i64]) -> CharacteristicForm {
        CharacteristicForm::new(l, big_vec(c)).unwrap()
    }

    fn dv(l: &BilinearLattice, x: &[(i64, i64)]) -> DualVector {
        DualVector::new(l, x.iter().map(|&(a, b)| rational(a, b)).collect()).unwrap()
    }

    #[test]
    fn characteristic_examples() {
        let l = lat(&[&[2]]);
        assert!(is_characteristic(&l, &big_vec(&[0])).unwrap());
        assert!(!is_characteristic(&l, &big_vec(&[1])).unwrap());
        assert!(is_characteristic(&lat(&[&[0, 1], &[1, 0]]), &big_vec(&[0, 0])).unwrap());
        assert_eq!(CharacteristicForm::new(&l, big_vec(&[1])), Err(Error::ParityViolation { index: 0 }));
        assert!(BilinearLattice::new(IntMatrix::from_rows(&[[0, 1], [2, 0]])).is_err());
    }

    #[test]
    fn wu_examples() {
        let bits = |l: &BilinearLattice| wu_classes(l).into_iter().map(|w| w.bits().to_vec()).collect::<Vec<_>>();
        assert_eq!(bits(&lat(&[&[2]])), vec![vec![0], vec![1]]);
        assert_eq!(bits(&lat(&[&[1]])), vec![vec![1]]);
        assert_eq!(bits(&lat(&[&[0]])), vec![vec![0], vec![1]]);
        assert!(WuClass::new(&lat(&[&[1]]), vec![0]).is_err());
    }

    #[test]
    fn discriminant_examples() {
        let d = discriminant(&lat(&[&[2]]));
        assert_eq!(d.free_rank(), 0);
        assert_eq!(d.torsion_factors(), &[BigInt::from(2)]);
        assert_eq!(d.torsion_lifts(), &[vec![rational(1, 2)]]);

        let d = discriminant(&lat(&[&[0]]));
        assert_eq!(d.free_rank(), 1);
        assert!(d.torsion_factors().is_empty());
        assert_eq!(d.kernel_basis(), &[big_vec(&[1])]);

        let d = discriminant(&lat(&[&[1, 0], &[0, -1]]));
        assert_eq!(d.free_rank(), 0);
        assert!(d.torsion_factors().is_empty());
    }

    #[test]
    fn pairing_examples() {
        let l = lat(&[&[2]]);
        let d = discriminant(&l);
        let half = dv(&l, &[(1, 2)]);
        assert_eq!(linking_pairing(&d, &half, &half).unwrap(), QmodZ::new(1, 2));
        assert!(linking_pairing(&d, &DualVector::zero(1), &half).unwrap().is_zero());
        assert_eq!(phi_eval(&d, &cf(&l, &[0]), &half).unwrap(), QmodZ::new(1, 4));
        assert_eq!(phi_eval(&d, &cf(&l, &[2]), &half).unwrap(), QmodZ::new(3, 4));
        assert!(phi_eval(&d, &cf(&l, &[2]), &DualVector::zero(1)).unwrap().is_zero());
        assert_eq!(evaluation_pairing(&d, &big_vec(&[1]), &half).unwrap(), QmodZ::new(1, 2));
        assert!(evaluation_pairing(&d, &big_vec(&[0]), &half).unwrap().is_zero());

        let l9 = lat(&[&[9]]);
        let d9 = discriminant(&l9);
        let ninth = dv(&l9, &[(1, 9)]);
        assert_eq!(linking_pairing(&d9, &ninth, &ninth).unwrap(), QmodZ::new(1, 9));
        assert_eq!(evaluation_pairing(&d9, &big_vec(&[1]), &dv(&l9, &[(2, 9)])).unwrap(), QmodZ::new(2, 9));
        assert!(DualVector::new(&l9, vec![rational(1, 3)]).is_ok());
        assert_eq!(DualVector::new(&l9, vec![rational(1, 27)]), Err(Error::NotInDualLattice { index: 0 }));
    }

    #[test]
    fn slope_examples() {
        let l = lat(&[&[0]]);
        let d = discriminant(&l);
        assert_eq!(radical_slope(&d, &cf(&l, &[0])), vec![rational(0, 1)]);
        assert_eq!(radical_slope(&d, &cf(&l, &[2])), vec![rational(1, 1)]);
        let l = lat(&[&[0, 0], &[0, 2]]);
        let d = discriminant(&l);
        assert_eq!(d.kernel_basis().len(), 1);
        let k = &d.kernel_basis()[0];
        assert_eq!(k, &big_vec(&[1, 0]));
        let slope = radical_slope(&d, &cf(&l, &[4, 0]));
        assert_eq!(slope, vec![rational(2, 1)]);
        // φ on the radical is −slope·r
        let x = d.radical_element(&[rational(1, 3)]);
        let c = cf(&l, &[4, 0]);
        let expected = qmodz_reduce(&(-&slope[0] * rational(1, 3)));
        assert_eq!(phi_eval(&d, &c, &x).unwrap(), expected);
    }

    #[test]
    fn chern_canonical_forms() {
        let l = lat(&[&[2]]);
        let cc = ChernClasses::new(&l);
        assert_eq!(cc.enumerate().unwrap(), vec![big_vec(&[2]), big_vec(&[4])]);
        assert!(cc.same_class(&big_vec(&[0]), &big_vec(&[4])).unwrap());
        assert!(!cc.same_class(&big_vec(&[0]), &big_vec(&[2])).unwrap());
        let l = lat(&[&[9]]);
        assert_eq!(ChernClasses::new(&l).enumerate().unwrap().len(), 9);
        assert_eq!(canonical_chern(&l, &big_vec(&[-1])).unwrap(), big_vec(&[17]));
        let l = lat(&[&[0]]);
        let cc = ChernClasses::new(&l);
        assert!(cc.enumerate().is_none());
        assert_eq!(cc.canonical(&big_vec(&[-4])).unwrap(), big_vec(&[-4]));
        assert_eq!(cc.canonical(&big_vec(&[1])), Err(Error::ParityViolation { index: 0 }));
    }

    #[test]
    fn coordinates_round_trip() {
        let l = lat(&[&[0, 0, 0], &[0, 4, 2], &[0, 2, 6]]);
        let d = discriminant(&l);
        assert_eq!(d.free_rank(), 1);
        assert_eq!(d.torsion_order(), BigInt::from(20));
        let x = d.torsion_element(&big_vec(&[1, 3])).add(&d.radical_element(&[rational(2, 5)]));
        let (t, r) = d.class_coordinates(&x).unwrap();
        let expect: Vec<BigInt> =
            big_vec(&[1, 3]).iter().zip(d.torsion_factors()).map(|(a, f)| a.mod_floor(f)).collect();
        assert_eq!(t, expect);
        assert_eq!(r, vec![rational(2, 5)]);
    }

    // --- properties -------------------------------------------------------

    fn arb_symmetric(max_n: usize) -> impl Strategy<Value = IntMatrix> {
        (1..=max_n).prop_flat_map(|n| {
            proptest::collection::vec(-5i64..=5, n * (n + 1) / 2).prop_map(move |v| {
                let mut m = IntMatrix::zeros(n, n);
                let mut k = 0;
                for i in 0..n {
                    for j in i..n {
                        m.set(i, j, BigInt::from(v[k]));
                        m.set(j, i, BigInt::from(v[k]));
                        k += 1;
                    }
                }
                m
            })
        })
    }

    #[derive(Debug, Clone)]
    struct Sample {
        b: IntMatrix,
        c: Vec<i64>,
        shifts: Vec<i64>,
        tors: Vec<i64>,
        tors2: Vec<i64>,
        rad: Vec<(i64, i64)>,
        rad2: Vec<(i64, i64)>,
        alpha: Vec<i64>,
    }

    fn arb_sample() -> impl Strategy<Value = Sample> {
        arb_symmetric(4).prop_flat_map(|b| {
            let n = b.rows();
            let v = |lo: i64, hi: i64| proptest::collection::vec(lo..=hi, n);
            let r = || proptest::collection::vec((-7i64..=7, 1i64..=6), n);
            (Just(b), v(-4, 4), v(-3, 3), v(-20, 20), v(-20, 20), r(), r(), v(-4, 4)).prop_map(
                |(b, c0, shifts, tors, tors2, rad, rad2, alpha)| {
                    let c = c0.iter().enumerate().map(|(i, x)| 2 * x + i64::from(b.get(i, i).is_odd())).collect();
                    Sample { b, c, shifts, tors, tors2, rad, rad2, alpha }
                },
            )
        })
    }

    struct Built {
        l: BilinearLattice,
        d: DiscriminantData,
        c: CharacteristicForm,
        x: DualVector,
        y: DualVector,
    }

    fn build(s: &Sample) -> Built {
        let l = BilinearLattice::new(s.b.clone()).unwrap();
        let d = discriminant(&l);
        let c = CharacteristicForm::new(&l, big_vec(&s.c)).unwrap();
        let k = d.torsion_factors().len();
        let b = d.free_rank();
        let mk = |t: &[i64], r: &[(i64, i64)]| {
            let rr: Vec<Rational> = r[..b].iter().map(|&(p, q)| rational(p, q)).collect();
            let v = d.torsion_element(&big_vec(&t[..k])).add(&d.radical_element(&rr));
            DualVector::new(&l, v.as_slice().to_vec()).expect("constructed elements are dual")
        };
        let x = mk(&s.tors, &s.rad).add(&DualVector::from_integers(&big_vec(&s.shifts)));
        let y = mk(&s.tors2, &s.rad2);
        Built { l, d, c, x, y }
    }

    proptest! {
        #[test]
        fn quadratic_relation(s in arb_sample()) {
            let t = build(&s);
            let lhs = &(&phi_eval(&t.d, &t.c, &t.x.add(&t.y)).unwrap() - &phi_eval(&t.d, &t.c, &t.x).unwrap())
                - &phi_eval(&t.d, &t.c, &t.y).unwrap();
            prop_assert_eq!(lhs, linking_pairing(&t.d, &t.x, &t.y).unwrap());
        }

        #[test]
        fn homogeneity_defect(s in arb_sample()) {
            let t = build(&s);
            let defect = &phi_eval(&t.d, &t.c, &t.x).unwrap() - &phi_eval(&t.d, &t.c, &t.x.neg()).unwrap();
            prop_assert_eq!(defect, -evaluation_pairing(&t.d, t.c.as_slice(), &t.x).unwrap());
        }

        #[test]
        fn affine_action(s in arb_sample()) {
            let t = build(&s);
            let alpha = big_vec(&s.alpha);
            let shifted: Vec<BigInt> = t.c.as_slice().iter().zip(&alpha).map(|(c, a)| c + BigInt::from(2) * a).collect();
            let c2 = CharacteristicForm::new(&t.l, shifted).unwrap();
            let lhs = phi_eval(&t.d, &c2, &t.x).unwrap();
            let rhs = &phi_eval(&t.d, &t.c, &t.x).unwrap() - &evaluation_pairing(&t.d, &alpha, &t.x).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn lift_change_is_invisible(s in arb_sample()) {
            let t = build(&s);
            let bh = t.l.matrix().mul_vec(&big_vec(&s.alpha));
            let shifted: Vec<BigInt> = t.c.as_slice().iter().zip(&bh).map(|(c, a)| c + BigInt::from(2) * a).collect();
            let c2 = CharacteristicForm::new(&t.l, shifted.clone()).unwrap();
            prop_assert_eq!(phi_eval(&t.d, &c2, &t.x).unwrap(), phi_eval(&t.d, &t.c, &t.x).unwrap());
            prop_assert_eq!(phi_eval(&t.d, &c2, &t.y).unwrap(), phi_eval(&t.d, &t.c, &t.y).unwrap());
            prop_assert!(ChernClasses::new(&t.l).same_class(t.c.as_slice(), &shifted).unwrap());
        }

        #[test]
        fn wu_classes_give_homogeneous_functions(s in arb_sample()) {
            let t = build(&s);
            for w in wu_classes(&t.l) {
                let c = CharacteristicForm::new(&t.l, t.l.matrix().mul_vec(&w.lift())).unwrap();
                prop_assert_eq!(phi_eval(&t.d, &c, &t.x).unwrap(), phi_eval(&t.d, &c, &t.x.neg()).unwrap());
            }
        }

        #[test]
        fn class_coordinates_ignore_lattice_shifts(s in arb_sample()) {
            let t = build(&s);
            let moved = t.x.add(&DualVector::from_integers(&big_vec(&s.alpha)));
            prop_assert_eq!(t.d.class_coordinates(&t.x).unwrap(), t.d.class_coordinates(&moved).unwrap());
        }

        #[test]
        fn linking_pairing_is_nondegenerate(b in arb_symmetric(4)) {
            let l = BilinearLattice::new(b).unwrap();
            let d = discriminant(&l);
            let order = d.torsion_order();
            prop_assume!(order <= BigInt::from(200));
            let factors: Vec<i64> = d.torsion_factors().iter().map(|f| f.try_into().unwrap()).collect();
            for a in all_tuples(&factors) {
                if a.iter().all(|x| *x == 0) {
                    continue;
                }
                let x = d.torsion_element(&big_vec(&a));
                let witnessed = (0..factors.len())
                    .any(|j| !linking_pairing(&d, &x, &d.torsion_lift(j)).unwrap().is_zero());
                prop_assert!(witnessed, "radical element {:?}", a);
            }
        }

        #[test]
        fn chern_classes_embed(b in arb_symmetric(3)) {
            let l = BilinearLattice::new(b).unwrap();
            let d = discriminant(&l);
            let cc = ChernClasses::new(&l);
            let Some(count) = cc.count() else { return Ok(()) };
            prop_assume!(count <= BigInt::from(20));
            let reps = cc.enumerate().unwrap();
            prop_assert_eq!(BigInt::from(reps.len()), l.matrix().determinant().abs());
            let factors: Vec<i64> = d.torsion_factors().iter().map(|f| f.try_into().unwrap()).collect();
            let points: Vec<DualVector> = all_tuples(&factors).iter().map(|a| d.torsion_element(&big_vec(a))).collect();
            let tables: Vec<Vec<QmodZ>> = reps
                .iter()
                .map(|c| {
                    let c = CharacteristicForm::new(&l, c.clone()).unwrap();
                    points.iter().map(|x| phi_eval(&d, &c, x).unwrap()).collect()
                })
                .collect();
            for i in 0..tables.len() {
                for j in i + 1..tables.len() {
                    prop_assert_ne!(&tables[i], &tables[j]);
                }
            }
        }
    }

    fn all_tuples(factors: &[i64]) -> Vec<Vec<i64>> {
        let mut out = vec![vec![]];
        for &f in factors {
            out = out.into_iter().flat_map(|t| (0..f).map(move |a| [t.clone(), vec![a]].concat())).collect();
        }
        out
    }

    #[test]
    fn degenerate_embedding_separates_by_slope() {
        // S²×S¹ ♯ ℝP³: classes differing only on the radical are told apart by the slope
        let l = lat(&[&[0, 0], &[0, 2]]);
        let d = discriminant(&l);
        let s0 = radical_slope(&d, &cf(&l, &[0, 0]));
        let s2 = radical_slope(&d, &cf(&l, &[2, 0]));
        assert_ne!(s0, s2);
        assert!(!canonical_chern(&l, &big_vec(&[0, 0])).unwrap().eq(&canonical_chern(&l, &big_vec(&[2, 0])).unwrap()));
    }
}
