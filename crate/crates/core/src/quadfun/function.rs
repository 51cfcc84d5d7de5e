use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use super::group::FiniteAbelianGroup;
use crate::error::{Error, Result};
use crate::exact::{CyclotomicSum, QmodZ, Rational};
use crate::lattice::{linking_pairing, phi_eval, radical_slope, CharacteristicForm, DiscriminantData};

/// Default bound on group orders handled by tables and searches.
pub const DEFAULT_ORDER_CAP: u64 = 10_000;

/// A quadratic function `q: G → ℚ/ℤ` on a finite abelian group, together with
/// the slopes describing its restriction to a `(ℚ/ℤ)^b` radical.
///
/// Values are stored densely as numerators over a common modulus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticFunction {
    group: FiniteAbelianGroup,
    modulus: u64,
    table: Vec<u64>,
    radical_slopes: Vec<Rational>,
}

/// Image of each source generator in the target group.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupIso {
    pub images: Vec<Vec<u64>>,
}

impl GroupIso {
    pub fn identity(g: &FiniteAbelianGroup) -> Self {
        GroupIso { images: (0..g.rank()).map(|i| g.element(g.generator(i))).collect() }
    }

    /// Image of the element at `idx` of `source`, as an index of `target`.
    pub fn map_index(&self, source: &FiniteAbelianGroup, target: &FiniteAbelianGroup, idx: usize) -> usize {
        let x = source.element(idx);
        let mut out = 0;
        for (a, img) in x.iter().zip(&self.images) {
            let y = target.index_of(img).expect("image lies in the target group");
            out = target.add(out, target.scale(y, *a));
        }
        out
    }

    pub fn apply(&self, source: &FiniteAbelianGroup, target: &FiniteAbelianGroup, x: &[u64]) -> Result<Vec<u64>> {
        let idx = source.index_of(x)?;
        Ok(target.element(self.map_index(source, target, idx)))
    }

    /// True iff the images define a bijective homomorphism.
    pub fn is_bijective_hom(&self, source: &FiniteAbelianGroup, target: &FiniteAbelianGroup) -> bool {
        if self.images.len() != source.rank() || source.order() != target.order() {
            return false;
        }
        for (img, d) in self.images.iter().zip(source.factors()) {
            match target.index_of(img) {
                Ok(y) if d % target.element_order(y) == 0 => {}
                _ => return false,
            }
        }
        let mut seen = vec![false; target.order() as usize];
        for x in 0..source.order() as usize {
            let y = self.map_index(source, target, x);
            if seen[y] {
                return false;
            }
            seen[y] = true;
        }
        true
    }
}

fn lcm_of_denominators<'a, I: IntoIterator<Item = &'a QmodZ>>(xs: I) -> Result<u64> {
    xs.into_iter().try_fold(1u64, |acc, x| {
        let d = x.denom().to_u64().ok_or_else(|| Error::Overflow(x.denom().to_string()))?;
        Ok(acc.lcm(&d))
    })
}

fn check_slopes(slopes: &[Rational]) -> Result<()> {
    for s in slopes {
        if !(s * Rational::from_integer(2.into())).is_integer() {
            return Err(Error::NotQuadratic(format!("radical slope {s} is not a half-integer")));
        }
    }
    Ok(())
}

impl QuadraticFunction {
    /// Builds a function from its full value table (indexed as in
    /// [`FiniteAbelianGroup::element`]) and checks that `b_q` is bilinear.
    pub fn new(group: FiniteAbelianGroup, values: Vec<QmodZ>, radical_slopes: Vec<Rational>) -> Result<Self> {
        if values.len() as u64 != group.order() {
            return Err(Error::DimensionMismatch { expected: group.order() as usize, found: values.len() });
        }
        check_slopes(&radical_slopes)?;
        let modulus = lcm_of_denominators(&values)?;
        let table = values.iter().map(|v| v.numerator_over(modulus).expect("modulus is a common multiple")).collect();
        let q = QuadraticFunction { group, modulus, table, radical_slopes }.normalized();
        q.check_bilinear()?;
        Ok(q)
    }

    /// Builds `q(Σ a_i e_i) = Σ a_i q(e_i) + Σ C(a_i,2) b_ii + Σ_{i<j} a_i a_j b_ij`
    /// from generator values `q(e_i)` and a symmetric generator matrix `b_ij`.
    pub fn from_generators(
        group: FiniteAbelianGroup,
        gen_values: &[QmodZ],
        gen_pairing: &[Vec<QmodZ>],
        radical_slopes: Vec<Rational>,
    ) -> Result<Self> {
        let k = group.rank();
        if gen_values.len() != k || gen_pairing.len() != k || gen_pairing.iter().any(|r| r.len() != k) {
            return Err(Error::DimensionMismatch { expected: k, found: gen_values.len() });
        }
        check_slopes(&radical_slopes)?;
        let modulus = lcm_of_denominators(gen_values.iter().chain(gen_pairing.iter().flatten()))?;
        let m = modulus as u128;
        let num = |x: &QmodZ| x.numerator_over(modulus).expect("modulus is a common multiple") as u128;
        let qv: Vec<u128> = gen_values.iter().map(num).collect();
        let bv: Vec<Vec<u128>> = gen_pairing.iter().map(|r| r.iter().map(num).collect()).collect();
        let n = group.order() as usize;
        let mut table = Vec::with_capacity(n);
        for idx in 0..n {
            let a: Vec<u128> = group.element(idx).into_iter().map(u128::from).collect();
            let mut s: u128 = 0;
            for i in 0..k {
                let ai = a[i] % m;
                s = (s + ai * qv[i]) % m;
                let pairs = (a[i] * a[i].saturating_sub(1) / 2) % m;
                s = (s + pairs * bv[i][i]) % m;
                for j in i + 1..k {
                    s = (s + (ai * (a[j] % m)) % m * bv[i][j]) % m;
                }
            }
            table.push(s as u64);
        }
        let q = QuadraticFunction { group, modulus, table, radical_slopes }.normalized();
        q.check_bilinear()?;
        Ok(q)
    }

    /// The function `φ_{f,c}` on the torsion part of `G_f` in the stored
    /// section, with radical slopes `c(k_j)/2`.
    pub fn from_discriminant(d: &DiscriminantData, c: &CharacteristicForm, cap: u64) -> Result<Self> {
        let order = d.torsion_order();
        if order > BigInt::from(cap) {
            return Err(Error::OrderCapExceeded { order: order.to_u128().unwrap_or(u128::MAX), cap });
        }
        let factors: Vec<u64> = d.torsion_factors().iter().map(|x| x.to_u64().expect("below the cap")).collect();
        let group = FiniteAbelianGroup::new(factors)?;
        let k = group.rank();
        let lifts: Vec<_> = (0..k).map(|i| d.torsion_lift(i)).collect();
        let gen_values: Vec<QmodZ> = lifts.iter().map(|g| phi_eval(d, c, g)).collect::<Result<_>>()?;
        let gen_pairing: Vec<Vec<QmodZ>> = lifts
            .iter()
            .map(|gi| lifts.iter().map(|gj| linking_pairing(d, gi, gj)).collect::<Result<_>>())
            .collect::<Result<_>>()?;
        Self::from_generators(group, &gen_values, &gen_pairing, radical_slope(d, c))
    }

    // smallest modulus over which all values are written
    fn normalized(mut self) -> Self {
        let g = self.table.iter().fold(self.modulus, |g, v| g.gcd(v));
        if g > 1 {
            self.modulus /= g;
            self.table.iter_mut().for_each(|v| *v /= g);
        }
        self
    }

    fn check_bilinear(&self) -> Result<()> {
        // b(·, e_i) is additive for every generator; symmetry is automatic
        let g = &self.group;
        let n = g.order() as usize;
        for i in 0..g.rank() {
            let ei = g.generator(i);
            let f = |x: usize| self.b_num(x, ei);
            for j in 0..g.rank() {
                let ej = g.generator(j);
                let fej = f(ej);
                for x in 0..n {
                    if f(g.add(x, ej)) != (f(x) + fej) % self.modulus {
                        return Err(Error::NotQuadratic(format!(
                            "b(x + e{j}, e{i}) != b(x, e{i}) + b(e{j}, e{i}) at x = {:?}",
                            g.element(x)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn radical_slopes(&self) -> &[Rational] {
        &self.radical_slopes
    }

    /// Common denominator of the stored values.
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Numerators over [`Self::modulus`], in element-index order.
    pub fn numerators(&self) -> &[u64] {
        &self.table
    }

    pub fn value_at(&self, idx: usize) -> QmodZ {
        QmodZ::from_numerator(self.table[idx], self.modulus)
    }

    pub fn value(&self, x: &[u64]) -> Result<QmodZ> {
        Ok(self.value_at(self.group.index_of(x)?))
    }

    pub(crate) fn b_num(&self, x: usize, y: usize) -> u64 {
        let m = self.modulus;
        let s = self.table[self.group.add(x, y)] + 2 * m - self.table[x] - self.table[y];
        s % m
    }

    pub fn bilinear_at(&self, x: usize, y: usize) -> QmodZ {
        QmodZ::from_numerator(self.b_num(x, y), self.modulus)
    }

    pub fn defect_at(&self, x: usize) -> QmodZ {
        let m = self.modulus;
        QmodZ::from_numerator((self.table[x] + m - self.table[self.group.neg(x)]) % m, m)
    }

    /// True iff `b_q` has trivial radical on the finite group.
    pub fn is_nondegenerate(&self) -> bool {
        let g = &self.group;
        let gens: Vec<usize> = (0..g.rank()).map(|i| g.generator(i)).collect();
        (1..g.order() as usize).all(|x| gens.iter().any(|&e| self.b_num(x, e) != 0))
    }

    /// `x ↦ q(Ψ x)` on the source group of `iso`.
    pub fn pullback(&self, iso: &GroupIso, source: &FiniteAbelianGroup) -> QuadraticFunction {
        let table = (0..source.order() as usize).map(|x| self.table[iso.map_index(source, &self.group, x)]).collect();
        QuadraticFunction {
            group: source.clone(),
            modulus: self.modulus,
            table,
            radical_slopes: self.radical_slopes.clone(),
        }
    }

    /// Same function written over the multiple `m` of its modulus.
    pub(crate) fn numerators_over(&self, m: u64) -> Vec<u64> {
        let k = m / self.modulus;
        self.table.iter().map(|v| v * k).collect()
    }

    /// Values of `q` in sorted order.
    pub fn value_multiset(&self) -> Vec<QmodZ> {
        let mut v: Vec<u64> = self.table.clone();
        v.sort_unstable();
        v.into_iter().map(|x| QmodZ::from_numerator(x, self.modulus)).collect()
    }

    /// Values of `d_q` in sorted order.
    pub fn defect_multiset(&self) -> Vec<QmodZ> {
        let mut v: Vec<QmodZ> = (0..self.group.order() as usize).map(|x| self.defect_at(x)).collect();
        v.sort();
        v
    }
}

/// `b_q(x, y) = q(x+y) − q(x) − q(y)`.
pub fn bilinear_of(q: &QuadraticFunction, x: &[u64], y: &[u64]) -> Result<QmodZ> {
    let (x, y) = (q.group.index_of(x)?, q.group.index_of(y)?);
    Ok(q.bilinear_at(x, y))
}

/// `d_q(x) = q(x) − q(−x)`.
pub fn defect_of(q: &QuadraticFunction, x: &[u64]) -> Result<QmodZ> {
    Ok(q.defect_at(q.group.index_of(x)?))
}

/// `γ(q) = Σ_x exp(2πi·q(x))`, exactly.
pub fn gauss_sum(q: &QuadraticFunction) -> CyclotomicSum {
    let mut counts = vec![0i64; q.modulus as usize];
    for &v in &q.table {
        counts[v as usize] += 1;
    }
    CyclotomicSum::new(q.modulus, counts)
}

/// `GL(b, ℤ)`-invariant of a slope vector: its length and the gcd of `2·slopes`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RadicalClass {
    pub rank: usize,
    pub twice_gcd: BigInt,
}

impl RadicalClass {
    pub fn of(slopes: &[Rational]) -> Self {
        let twice_gcd = slopes
            .iter()
            .map(|s| (s * Rational::from_integer(2.into())).to_integer())
            .fold(BigInt::zero(), |g, x| g.gcd(&x));
        RadicalClass { rank: slopes.len(), twice_gcd }
    }
}

/// Isomorphism-invariant summary of a quadratic function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fingerprint {
    pub factors: Vec<u64>,
    pub values: Vec<QmodZ>,
    pub defects: Vec<QmodZ>,
    pub gauss: CyclotomicSum,
    pub radical: RadicalClass,
}

pub fn invariant_fingerprint(q: &QuadraticFunction) -> Fingerprint {
    Fingerprint {
        factors: q.group.factors().to_vec(),
        values: q.value_multiset(),
        defects: q.defect_multiset(),
        gauss: gauss_sum(q).canonical(),
        radical: RadicalClass::of(&q.radical_slopes),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{cyclo_abs_squared, cyclo_equals};
    use crate::lattice::{discriminant, BilinearLattice};
    use crate::zlinalg::{big_vec, IntMatrix};

    pub(crate) fn z2(v: (i64, i64)) -> QuadraticFunction {
        let g = FiniteAbelianGroup::new(vec![2]).unwrap();
        QuadraticFunction::new(g, vec![QmodZ::zero(), QmodZ::new(v.0, v.1)], vec![]).unwrap()
    }

    fn lens(p: i64, s: i64) -> QuadraticFunction {
        let l = BilinearLattice::new(IntMatrix::from_rows(&[[p]])).unwrap();
        let d = discriminant(&l);
        let c = CharacteristicForm::new(&l, big_vec(&[s])).unwrap();
        QuadraticFunction::from_discriminant(&d, &c, DEFAULT_ORDER_CAP).unwrap()
    }

    #[test]
    fn bilinear_examples() {
        let q = z2((1, 4));
        assert_eq!(bilinear_of(&q, &[1], &[1]).unwrap(), QmodZ::new(1, 2));
        assert!(bilinear_of(&q, &[0], &[1]).unwrap().is_zero());
        let q9 = lens(9, 9);
        assert_eq!(q9.value(&[1]).unwrap(), QmodZ::new(5, 9));
        assert_eq!(q9.value(&[2]).unwrap(), QmodZ::new(2, 9));
        assert_eq!(bilinear_of(&q9, &[1], &[1]).unwrap(), QmodZ::new(1, 9));
        assert_eq!(bilinear_of(&q9, &[9], &[1]), Err(Error::ElementOutOfRange));
    }

    #[test]
    fn defect_examples() {
        let q = z2((1, 4));
        assert!(defect_of(&q, &[1]).unwrap().is_zero());
        assert_eq!(defect_of(&lens(9, 1), &[1]).unwrap(), QmodZ::new(8, 9));
        // c = B·w for the Wu class w = 1, so q is homogeneous
        let homogeneous = lens(9, 9);
        for x in 0..9 {
            assert!(defect_of(&homogeneous, &[x]).unwrap().is_zero());
        }
    }

    #[test]
    fn gauss_examples() {
        let trivial = QuadraticFunction::new(FiniteAbelianGroup::trivial(), vec![QmodZ::zero()], vec![]).unwrap();
        assert!(cyclo_equals(&gauss_sum(&trivial), &CyclotomicSum::one()));
        assert_eq!(gauss_sum(&z2((1, 4))).to_string(), "1+ζ₄");
        assert_eq!(gauss_sum(&z2((3, 4))).coeffs(), &[1, 0, 0, 1]);
        assert!(!cyclo_equals(&gauss_sum(&z2((1, 4))), &gauss_sum(&z2((3, 4)))));
    }

    #[test]
    fn rejects_non_quadratic_tables() {
        let g = FiniteAbelianGroup::new(vec![3]).unwrap();
        let bad = vec![QmodZ::zero(), QmodZ::new(1, 3), QmodZ::new(1, 2)];
        assert!(matches!(QuadraticFunction::new(g.clone(), bad, vec![]), Err(Error::NotQuadratic(_))));
        let ok = vec![QmodZ::zero(), QmodZ::new(1, 3), QmodZ::new(1, 3)];
        assert!(QuadraticFunction::new(g.clone(), ok.clone(), vec![]).is_ok());
        assert!(matches!(
            QuadraticFunction::new(g, ok, vec![crate::exact::rational(1, 3)]),
            Err(Error::NotQuadratic(_))
        ));
    }

    #[test]
    fn generator_formula_matches_direct_evaluation() {
        let rows = [[4i64, 2, 0], [2, 6, 2], [0, 2, 8]];
        let l = BilinearLattice::new(IntMatrix::from_rows(&rows)).unwrap();
        let d = discriminant(&l);
        let c = CharacteristicForm::new(&l, big_vec(&[2, 0, -2])).unwrap();
        let q = QuadraticFunction::from_discriminant(&d, &c, DEFAULT_ORDER_CAP).unwrap();
        for idx in 0..q.group().order() as usize {
            let a: Vec<BigInt> = q.group().element(idx).into_iter().map(BigInt::from).collect();
            let direct = phi_eval(&d, &c, &d.torsion_element(&a)).unwrap();
            assert_eq!(q.value_at(idx), direct);
        }
        assert!(q.is_nondegenerate());
        assert_eq!(cyclo_abs_squared(&gauss_sum(&q)).unwrap(), Rational::from_integer(q.group().order().into()));
    }

    #[test]
    fn order_cap() {
        let l = BilinearLattice::new(IntMatrix::from_rows(&[[20001]])).unwrap();
        let d = discriminant(&l);
        let c = CharacteristicForm::new(&l, big_vec(&[1])).unwrap();
        assert_eq!(
            QuadraticFunction::from_discriminant(&d, &c, DEFAULT_ORDER_CAP),
            Err(Error::OrderCapExceeded { order: 20001, cap: DEFAULT_ORDER_CAP })
        );
        assert!(QuadraticFunction::from_discriminant(&d, &c, 30000).is_ok());
    }

    #[test]
    fn fingerprint_examples() {
        assert_ne!(invariant_fingerprint(&z2((1, 4))), invariant_fingerprint(&z2((3, 4))));
        let g = FiniteAbelianGroup::new(vec![3]).unwrap();
        let mk = |k: i64| {
            let v = (0..3).map(|x| QmodZ::new(k * x * x, 3)).collect();
            QuadraticFunction::new(g.clone(), v, vec![]).unwrap()
        };
        let (a, b) = (mk(1), mk(2));
        assert_ne!(invariant_fingerprint(&a), invariant_fingerprint(&b));
        assert!(cyclo_equals(&gauss_sum(&a).conjugate(), &gauss_sum(&b)));
    }
}
