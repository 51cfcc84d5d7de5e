use num_integer::Integer;

use super::function::{gauss_sum, GroupIso, QuadraticFunction, RadicalClass};
use super::group::FiniteAbelianGroup;
use crate::error::{Error, Result};
use crate::exact::cyclo_equals;

/// Result of a bounded isomorphism search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(GroupIso),
    NotFound,
    Exhausted,
}

/// A finite group with a symmetric bilinear form (given on generators) and an
/// optional quadratic refinement table, all written over one modulus.
#[derive(Clone, Debug)]
pub struct FormData {
    group: FiniteAbelianGroup,
    modulus: u64,
    gen_pairing: Vec<Vec<u64>>,
    values: Option<Vec<u64>>,
}

impl FormData {
    /// Bilinear form only, from numerators `b(e_i, e_j)` over `modulus`.
    pub fn bilinear(group: FiniteAbelianGroup, modulus: u64, gen_pairing: Vec<Vec<u64>>) -> Self {
        FormData { group, modulus, gen_pairing, values: None }
    }

    pub fn of_quadratic(q: &QuadraticFunction) -> Self {
        let g = q.group();
        let gens: Vec<usize> = (0..g.rank()).map(|i| g.generator(i)).collect();
        let gen_pairing = gens.iter().map(|&a| gens.iter().map(|&b| q.b_num(a, b)).collect()).collect();
        FormData { group: g.clone(), modulus: q.modulus(), gen_pairing, values: Some(q.numerators().to_vec()) }
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    fn rescaled(&self, m: u64) -> FormData {
        let k = m / self.modulus;
        FormData {
            group: self.group.clone(),
            modulus: m,
            gen_pairing: self.gen_pairing.iter().map(|r| r.iter().map(|v| v * k).collect()).collect(),
            values: self.values.as_ref().map(|t| t.iter().map(|v| v * k).collect()),
        }
    }

    // b(x, y) from generator coordinates
    fn pair(&self, x: usize, y: usize) -> u64 {
        let m = self.modulus as u128;
        let (a, b) = (self.group.element(x), self.group.element(y));
        let mut s: u128 = 0;
        for (i, ai) in a.iter().enumerate() {
            if *ai == 0 {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                if *bj != 0 {
                    s = (s + (*ai as u128 * *bj as u128) % m * self.gen_pairing[i][j] as u128) % m;
                }
            }
        }
        s as u64
    }
}

/// How generator values must match: with `Coset(g)`, `q(e_i) − q'(Ψe_i)` must
/// lie in the subgroup `gcd(g, d_i)/d_i · ℤ` of `ℚ/ℤ`; `Coset(0)` is exact
/// equality. `Ignore` matches bilinear forms only.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ValueRule {
    Ignore,
    Coset(u64),
}

struct Engine<'a> {
    src: FormData,
    tgt: FormData,
    order: Vec<usize>,
    candidates: Vec<Vec<usize>>,
    budget: Option<u64>,
    nodes: u64,
    accept: &'a mut dyn FnMut(&GroupIso) -> bool,
}

enum Step {
    Continue,
    Stop(SearchOutcome),
}

impl Engine<'_> {
    fn dfs(
        &mut self,
        depth: usize,
        images: &mut Vec<Option<usize>>,
        members: &[usize],
        inside: &mut Vec<bool>,
    ) -> Step {
        if depth == self.order.len() {
            let iso =
                GroupIso { images: images.iter().map(|y| self.tgt.group.element(y.expect("all assigned"))).collect() };
            return if (self.accept)(&iso) { Step::Stop(SearchOutcome::Found(iso)) } else { Step::Continue };
        }
        let i = self.order[depth];
        let d = self.src.group.factors()[i];
        let ei = self.src.group.generator(i);
        let cands = self.candidates[i].clone();
        for y in cands {
            self.nodes += 1;
            if self.budget.is_some_and(|b| self.nodes > b) {
                return Step::Stop(SearchOutcome::Exhausted);
            }
            let compatible = self.order[..depth].iter().all(|&j| {
                let yj = images[j].expect("assigned");
                self.tgt.pair(y, yj) == self.src.pair(ei, self.src.group.generator(j))
            });
            if !compatible {
                continue;
            }
            // <y> ∩ H = 0
            let mut multiple = y;
            let mut independent = true;
            for _ in 1..d {
                if inside[multiple] {
                    independent = false;
                    break;
                }
                multiple = self.tgt.group.add(multiple, y);
            }
            if !independent {
                continue;
            }
            let mut grown = Vec::with_capacity(members.len() * d as usize);
            let mut step = 0;
            for _ in 0..d {
                for &h in members {
                    grown.push(self.tgt.group.add(h, step));
                }
                step = self.tgt.group.add(step, y);
            }
            for &z in &grown {
                inside[z] = true;
            }
            images[i] = Some(y);
            let r = self.dfs(depth + 1, images, &grown, inside);
            images[i] = None;
            for &z in &grown {
                inside[z] = false;
            }
            for &z in members {
                inside[z] = true;
            }
            if let Step::Stop(o) = r {
                return Step::Stop(o);
            }
        }
        Step::Continue
    }
}

/// Searches for a group isomorphism `Ψ: G → G'` preserving the bilinear forms
/// and satisfying `rule` on generator values, such that `accept(Ψ)` holds.
///
/// Generators are assigned largest order first; candidate images are tried in
/// increasing index order.
pub fn search_isomorphism(
    src: &FormData,
    tgt: &FormData,
    rule: ValueRule,
    budget: Option<u64>,
    accept: &mut dyn FnMut(&GroupIso) -> bool,
) -> SearchOutcome {
    if src.group.factors() != tgt.group.factors() {
        return SearchOutcome::NotFound;
    }
    let m = src.modulus.lcm(&tgt.modulus);
    let (src, tgt) = (src.rescaled(m), tgt.rescaled(m));
    let g = &src.group;
    let k = g.rank();
    let n = tgt.group.order() as usize;
    let mut candidates = Vec::with_capacity(k);
    for i in 0..k {
        let d = g.factors()[i];
        let ei = g.generator(i);
        let bii = src.pair(ei, ei);
        let list: Vec<usize> = (0..n)
            .filter(|&y| {
                if tgt.group.element_order(y) != d || tgt.pair(y, y) != bii {
                    return false;
                }
                match (rule, &src.values, &tgt.values) {
                    (ValueRule::Ignore, _, _) => true,
                    (ValueRule::Coset(c), Some(qs), Some(qt)) => {
                        let diff = (qs[ei] as u128 + m as u128 - qt[y] as u128) % m as u128;
                        let h = c.gcd(&d) as u128;
                        (diff * d as u128).is_multiple_of(h * m as u128)
                    }
                    _ => panic!("value rule requires quadratic tables on both sides"),
                }
            })
            .collect();
        if list.is_empty() {
            return SearchOutcome::NotFound;
        }
        candidates.push(list);
    }
    let mut engine = Engine { src, tgt, order: (0..k).rev().collect(), candidates, budget, nodes: 0, accept };
    let mut inside = vec![false; n];
    inside[0] = true;
    let mut images = vec![None; k];
    match engine.dfs(0, &mut images, &[0], &mut inside) {
        Step::Stop(o) => o,
        Step::Continue => SearchOutcome::NotFound,
    }
}

/// Every isomorphism `Ψ: G → G'` with `q' ∘ Ψ = q`, in search order.
pub fn isomorphisms(q: &QuadraticFunction, q2: &QuadraticFunction) -> Vec<GroupIso> {
    let mut out = Vec::new();
    search_isomorphism(
        &FormData::of_quadratic(q),
        &FormData::of_quadratic(q2),
        ValueRule::Coset(0),
        None,
        &mut |iso| {
            out.push(iso.clone());
            false
        },
    );
    out
}

fn check_cap(g: &FiniteAbelianGroup, cap: u64) -> Result<()> {
    if g.order() > cap {
        return Err(Error::OrderCapExceeded { order: g.order() as u128, cap });
    }
    Ok(())
}

/// Why two quadratic functions were found non-isomorphic.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mismatch {
    RadicalRank,
    RadicalSlopes,
    Torsion,
    GaussSum,
    ValueMultiset,
    DefectMultiset,
    Isomorphism,
}

impl Mismatch {
    pub fn name(self) -> &'static str {
        match self {
            Mismatch::RadicalRank => "free_rank",
            Mismatch::RadicalSlopes => "radical_slopes",
            Mismatch::Torsion => "torsion",
            Mismatch::GaussSum => "gauss_sum",
            Mismatch::ValueMultiset => "value_multiset",
            Mismatch::DefectMultiset => "defect_multiset",
            Mismatch::Isomorphism => "phi_isomorphism",
        }
    }
}

/// Decides whether `q' = q ∘ Ψ⁻¹` for some isomorphism `Ψ`, reporting the
/// first failing screen otherwise.
pub fn compare_quadratic(
    q: &QuadraticFunction,
    q2: &QuadraticFunction,
    cap: u64,
) -> Result<std::result::Result<GroupIso, Mismatch>> {
    check_cap(q.group(), cap)?;
    check_cap(q2.group(), cap)?;
    let (r1, r2) = (RadicalClass::of(q.radical_slopes()), RadicalClass::of(q2.radical_slopes()));
    if r1.rank != r2.rank {
        return Ok(Err(Mismatch::RadicalRank));
    }
    if r1 != r2 {
        return Ok(Err(Mismatch::RadicalSlopes));
    }
    if q.group().factors() != q2.group().factors() {
        return Ok(Err(Mismatch::Torsion));
    }
    if !cyclo_equals(&gauss_sum(q), &gauss_sum(q2)) {
        return Ok(Err(Mismatch::GaussSum));
    }
    if q.value_multiset() != q2.value_multiset() {
        return Ok(Err(Mismatch::ValueMultiset));
    }
    if q.defect_multiset() != q2.defect_multiset() {
        return Ok(Err(Mismatch::DefectMultiset));
    }
    let outcome = search_isomorphism(
        &FormData::of_quadratic(q),
        &FormData::of_quadratic(q2),
        ValueRule::Coset(0),
        None,
        &mut |_| true,
    );
    Ok(match outcome {
        SearchOutcome::Found(iso) => Ok(iso),
        _ => Err(Mismatch::Isomorphism),
    })
}

/// An isomorphism `Ψ` with `q' = q ∘ Ψ⁻¹` pointwise, if one exists.
pub fn is_isomorphic(q: &QuadraticFunction, q2: &QuadraticFunction, cap: u64) -> Result<Option<GroupIso>> {
    Ok(compare_quadratic(q, q2, cap)?.ok())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::QmodZ;
    use crate::lattice::{discriminant, BilinearLattice, CharacteristicForm, ChernClasses};
    use crate::quadfun::function::{invariant_fingerprint, DEFAULT_ORDER_CAP};
    use crate::zlinalg::{big_vec, IntMatrix};
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn from_lattice(rows: &IntMatrix, c: Vec<BigInt>) -> QuadraticFunction {
        let l = BilinearLattice::new(rows.clone()).unwrap();
        let d = discriminant(&l);
        let c = CharacteristicForm::new(&l, c).unwrap();
        QuadraticFunction::from_discriminant(&d, &c, DEFAULT_ORDER_CAP).unwrap()
    }

    fn z2(num: i64) -> QuadraticFunction {
        let g = FiniteAbelianGroup::new(vec![2]).unwrap();
        QuadraticFunction::new(g, vec![QmodZ::zero(), QmodZ::new(num, 4)], vec![]).unwrap()
    }

    fn recheck(q: &QuadraticFunction, q2: &QuadraticFunction, iso: &GroupIso) {
        assert!(iso.is_bijective_hom(q.group(), q2.group()));
        for x in 0..q.group().order() as usize {
            assert_eq!(q2.value_at(iso.map_index(q.group(), q2.group(), x)), q.value_at(x));
        }
    }

    // every bijective homomorphism, without pruning
    fn oracle_isomorphisms(q: &QuadraticFunction, q2: &QuadraticFunction) -> Vec<GroupIso> {
        let (g, h) = (q.group(), q2.group());
        if g.order() != h.order() {
            return vec![];
        }
        let n = h.order() as usize;
        let mut out = vec![];
        let mut tuple = vec![0usize; g.rank()];
        loop {
            let iso = GroupIso { images: tuple.iter().map(|&y| h.element(y)).collect() };
            if iso.is_bijective_hom(g, h)
                && (0..g.order() as usize).all(|x| q2.value_at(iso.map_index(g, h, x)) == q.value_at(x))
            {
                out.push(iso);
            }
            let mut k = 0;
            while k < tuple.len() {
                tuple[k] += 1;
                if tuple[k] < n {
                    break;
                }
                tuple[k] = 0;
                k += 1;
            }
            if k == tuple.len() {
                return out;
            }
        }
    }

    #[test]
    fn identity_is_found() {
        let q = from_lattice(&IntMatrix::from_rows(&[[2, 1], [1, 4]]), big_vec(&[0, 0]));
        let iso = is_isomorphic(&q, &q, DEFAULT_ORDER_CAP).unwrap().unwrap();
        recheck(&q, &q, &iso);
    }

    #[test]
    fn rp3_functions_are_not_isomorphic() {
        assert_eq!(compare_quadratic(&z2(1), &z2(3), DEFAULT_ORDER_CAP).unwrap(), Err(Mismatch::GaussSum));
        assert_eq!(is_isomorphic(&z2(1), &z2(3), DEFAULT_ORDER_CAP).unwrap(), None);
    }

    #[test]
    fn lens_nine_negation() {
        let b = IntMatrix::from_rows(&[[9]]);
        let q1 = from_lattice(&b, big_vec(&[1]));
        let q17 = from_lattice(&b, big_vec(&[17]));
        let iso = is_isomorphic(&q1, &q17, DEFAULT_ORDER_CAP).unwrap().unwrap();
        assert_eq!(iso.images, vec![vec![8]]);
        recheck(&q1, &q17, &iso);
        assert_eq!(oracle_isomorphisms(&q1, &q17), vec![iso]);
    }

    #[test]
    fn automorphism_count_of_trivial_form() {
        // every automorphism of ℤ₂ ⊕ ℤ₄ preserves the zero function: |Aut| = 8
        let g = FiniteAbelianGroup::new(vec![2, 4]).unwrap();
        let zero = QuadraticFunction::new(g.clone(), vec![QmodZ::zero(); 8], vec![]).unwrap();
        assert_eq!(isomorphisms(&zero, &zero).len(), 8);
        assert_eq!(oracle_isomorphisms(&zero, &zero).len(), 8);
    }

    #[test]
    fn cap_is_enforced() {
        let q = from_lattice(&IntMatrix::from_rows(&[[50]]), big_vec(&[0]));
        assert_eq!(is_isomorphic(&q, &q, 10), Err(Error::OrderCapExceeded { order: 50, cap: 10 }));
    }

    #[test]
    fn coset_rule_relaxes_values() {
        // on ℤ₂ the coset g·T^* with g = 1 is everything, so q ≃ q' once b agrees
        let (a, b) = (FormData::of_quadratic(&z2(1)), FormData::of_quadratic(&z2(3)));
        assert!(matches!(
            search_isomorphism(&a, &b, ValueRule::Coset(1), None, &mut |_| true),
            SearchOutcome::Found(_)
        ));
        assert_eq!(search_isomorphism(&a, &b, ValueRule::Coset(2), None, &mut |_| true), SearchOutcome::NotFound);
        assert_eq!(search_isomorphism(&a, &b, ValueRule::Coset(0), None, &mut |_| true), SearchOutcome::NotFound);
    }

    #[test]
    fn budget_exhaustion() {
        let g = FiniteAbelianGroup::new(vec![2, 2, 2]).unwrap();
        let zero = QuadraticFunction::new(g, vec![QmodZ::zero(); 8], vec![]).unwrap();
        let f = FormData::of_quadratic(&zero);
        let out = search_isomorphism(&f, &f, ValueRule::Coset(0), Some(3), &mut |_| false);
        assert_eq!(out, SearchOutcome::Exhausted);
    }

    fn arb_small_lattice() -> impl Strategy<Value = (IntMatrix, Vec<i64>, Vec<i64>)> {
        (1usize..=3).prop_flat_map(|n| {
            (
                proptest::collection::vec(-6i64..=6, n * (n + 1) / 2),
                proptest::collection::vec(-6i64..=6, n),
                proptest::collection::vec(-6i64..=6, n),
            )
                .prop_map(move |(v, c1, c2)| {
                    let mut m = IntMatrix::zeros(n, n);
                    let mut k = 0;
                    for i in 0..n {
                        for j in i..n {
                            m.set(i, j, BigInt::from(v[k]));
                            m.set(j, i, BigInt::from(v[k]));
                            k += 1;
                        }
                    }
                    let par = |c: Vec<i64>, m: &IntMatrix| -> Vec<i64> {
                        c.iter().enumerate().map(|(i, x)| 2 * x + i64::from(m.get(i, i).is_odd())).collect()
                    };
                    let (a, b) = (par(c1, &m), par(c2, &m));
                    (m, a, b)
                })
        })
    }

    fn torsion_ok(m: &IntMatrix, bound: u64) -> bool {
        let l = BilinearLattice::new(m.clone()).unwrap();
        let d = discriminant(&l);
        d.free_rank() == 0 && d.torsion_order() <= BigInt::from(bound) && d.torsion_factors().len() <= 3
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(96))]

        #[test]
        fn search_agrees_with_unpruned_oracle((m, c1, c2) in arb_small_lattice()) {
            prop_assume!(torsion_ok(&m, 64));
            let q1 = from_lattice(&m, big_vec(&c1));
            let q2 = from_lattice(&m, big_vec(&c2));
            let found = is_isomorphic(&q1, &q2, DEFAULT_ORDER_CAP).unwrap();
            let oracle = oracle_isomorphisms(&q1, &q2);
            match found {
                Some(iso) => {
                    recheck(&q1, &q2, &iso);
                    prop_assert!(oracle.contains(&iso));
                }
                None => prop_assert!(oracle.is_empty()),
            }
            prop_assert_eq!(isomorphisms(&q1, &q2).len(), oracle.len());
        }

        #[test]
        fn gauss_sum_norm_and_invariance((m, c1, _c2) in arb_small_lattice()) {
            prop_assume!(torsion_ok(&m, 200));
            let q = from_lattice(&m, big_vec(&c1));
            prop_assert!(q.is_nondegenerate());
            let norm = crate::exact::cyclo_abs_squared(&gauss_sum(&q)).unwrap();
            prop_assert_eq!(norm, crate::exact::Rational::from_integer(q.group().order().into()));
            for x in 0..q.group().order() as usize {
                for y in 0..q.group().order() as usize {
                    let g = q.group();
                    prop_assert_eq!(q.defect_at(g.add(x, y)), &q.defect_at(x) + &q.defect_at(y));
                }
            }
            let fp = invariant_fingerprint(&q);
            let automorphisms = isomorphisms(&q, &q);
            prop_assert!(!automorphisms.is_empty());
            for psi in automorphisms.iter().take(8) {
                let pulled = q.pullback(psi, q.group());
                prop_assert!(cyclo_equals(&gauss_sum(&pulled), &gauss_sum(&q)));
                prop_assert_eq!(&invariant_fingerprint(&pulled), &fp);
            }
        }

        #[test]
        fn distinct_classes_give_distinct_functions((m, _c1, _c2) in arb_small_lattice()) {
            prop_assume!(torsion_ok(&m, 30));
            let l = BilinearLattice::new(m.clone()).unwrap();
            let reps = ChernClasses::new(&l).enumerate().unwrap();
            let tables: Vec<Vec<u64>> = reps.iter().map(|c| {
                let q = from_lattice(&m, c.clone());
                q.numerators_over(q.group().exponent() * 2)
            }).collect();
            for i in 0..tables.len() {
                for j in i + 1..tables.len() {
                    prop_assert_ne!(&tables[i], &tables[j]);
                }
            }
        }
    }
}
