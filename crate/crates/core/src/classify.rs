//! Degree-0 classification: invariant reports, `Y^c`-equivalence, censuses.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::{cyclo_equals, CyclotomicSum, QmodZ, Rational};
use crate::lattice::{
    discriminant, gcd_all, linking_pairing, unimodular_inverse, CharacteristicForm, ChernClasses, DiscriminantData,
};
use crate::presentation::DecoratedPresentation;
use crate::quadfun::{
    compare_quadratic, gauss_sum, search_isomorphism, FiniteAbelianGroup, FormData, GroupIso, QuadraticFunction,
    SearchOutcome, ValueRule, DEFAULT_ORDER_CAP,
};
use crate::zlinalg::{ext_gcd, IntMatrix};

/// Limits for classification searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClassifyOptions {
    /// Largest torsion order handled.
    pub order_cap: u64,
    /// Node budget of the isomorphism search in the mixed regime.
    pub node_budget: u64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions { order_cap: DEFAULT_ORDER_CAP, node_budget: 2_000_000 }
    }
}

/// Discriminant data, the finite-part quadratic function in the stored
/// section, and the Chern class in `Coker B` coordinates.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub disc: DiscriminantData,
    pub q: QuadraticFunction,
    pub chern_torsion: Vec<BigInt>,
    pub chern_free: Vec<BigInt>,
}

impl Analysis {
    pub fn new(p: &DecoratedPresentation, cap: u64) -> Result<Self> {
        let lattice = p.lattice();
        let disc = discriminant(&lattice);
        let c = CharacteristicForm::new(&lattice, p.chern().to_vec())?;
        let q = QuadraticFunction::from_discriminant(&disc, &c, cap)?;
        let (chern_torsion, chern_free) = disc.coker_coordinates(p.chern())?;
        Ok(Analysis { disc, q, chern_torsion, chern_free })
    }

    pub fn free_rank(&self) -> usize {
        self.disc.free_rank()
    }

    /// `gcd` of the free coordinates of `[c]`; equals `gcd_j c(k_j)`.
    pub fn chern_free_gcd(&self) -> BigInt {
        gcd_all(&self.chern_free)
    }

    /// `gcd_j c(k_j)/2`, the gcd of the radical slopes.
    pub fn slope_gcd(&self) -> BigInt {
        self.chern_free_gcd() / 2
    }

    // the coset step that matters on T: gcd(slope gcd, exponent), 0 when all slopes vanish
    fn coset_step(&self) -> u64 {
        let g = self.slope_gcd();
        if g.is_zero() {
            0
        } else {
            g.gcd(&BigInt::from(self.q.group().exponent())).to_u64().expect("bounded by the exponent")
        }
    }
}

/// Section-independent part of the finite data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FinitePart {
    /// All slopes vanish: the finite function itself is well defined up to isomorphism.
    Exact { values: Vec<QmodZ>, defects: Vec<QmodZ>, gauss: CyclotomicSum },
    /// The finite function is only defined up to adding characters in `g·T^*`;
    /// records the set of value multisets over that coset.
    Coset { step: u64, value_multisets: Vec<Vec<QmodZ>> },
}

/// Invariants that do not depend on the stored section.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassFingerprint {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
    pub chern_free_gcd: BigInt,
    pub finite: FinitePart,
}

/// Characters `χ ∈ g·T^*`, as numerators of `χ(e_i)` over `d_i`.
fn coset_characters(factors: &[u64], step: u64) -> Vec<Vec<u64>> {
    let mut out = vec![vec![]];
    for &d in factors {
        let h = step.gcd(&d);
        out = out.into_iter().flat_map(|v| (0..d / h).map(move |k| [v.clone(), vec![k * h]].concat())).collect();
    }
    out
}

fn shifted_multiset(q: &QuadraticFunction, chi: &[u64]) -> Vec<QmodZ> {
    let g = q.group();
    let m = q.modulus().lcm(&g.exponent());
    let nums = q.numerators_over(m);
    let mut vals: Vec<u64> = (0..g.order() as usize)
        .map(|x| {
            let a = g.element(x);
            let mut v = nums[x];
            for ((ai, ci), d) in a.iter().zip(chi).zip(g.factors()) {
                v += ai * ci * (m / d) % m;
            }
            v % m
        })
        .collect();
    vals.sort_unstable();
    vals.into_iter().map(|v| QmodZ::from_numerator(v, m)).collect()
}

pub fn class_fingerprint(a: &Analysis) -> ClassFingerprint {
    let step = a.coset_step();
    let finite = if step == 0 {
        FinitePart::Exact {
            values: a.q.value_multiset(),
            defects: a.q.defect_multiset(),
            gauss: gauss_sum(&a.q).canonical(),
        }
    } else {
        let set: BTreeSet<Vec<QmodZ>> =
            coset_characters(a.q.group().factors(), step).iter().map(|chi| shifted_multiset(&a.q, chi)).collect();
        FinitePart::Coset { step, value_multisets: set.into_iter().collect() }
    };
    ClassFingerprint {
        free_rank: a.free_rank(),
        torsion: a.disc.torsion_factors().to_vec(),
        chern_free_gcd: a.chern_free_gcd(),
        finite,
    }
}

/// Degree-0 invariants of a decorated presentation.
///
/// `gauss`, `value_multiset`, `defect_multiset` and the Chern coordinates
/// refer to the stored section and Smith basis; when `section_dependent` is
/// set they are not invariants by themselves. `fingerprint` always is.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantReport {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
    pub chern_free_gcd: BigInt,
    pub chern_free: Vec<BigInt>,
    pub chern_torsion: Vec<BigInt>,
    pub gauss: CyclotomicSum,
    pub value_multiset: Vec<QmodZ>,
    pub defect_multiset: Vec<QmodZ>,
    pub radical_slopes: Vec<Rational>,
    pub section_dependent: bool,
    pub fingerprint: ClassFingerprint,
}

pub fn invariants_report(p: &DecoratedPresentation, cap: u64) -> Result<InvariantReport> {
    let a = Analysis::new(p, cap)?;
    Ok(InvariantReport {
        free_rank: a.free_rank(),
        torsion: a.disc.torsion_factors().to_vec(),
        chern_free_gcd: a.chern_free_gcd(),
        chern_free: a.chern_free.clone(),
        chern_torsion: a.chern_torsion.clone(),
        gauss: gauss_sum(&a.q),
        value_multiset: a.q.value_multiset(),
        defect_multiset: a.q.defect_multiset(),
        radical_slopes: a.q.radical_slopes().to_vec(),
        section_dependent: a.free_rank() > 0 && a.q.group().order() > 1,
        fingerprint: class_fingerprint(&a),
    })
}

/// Witness `ψ = (Ψ, A, δ)`: `Ψ` on torsion generators, `A` unimodular on the
/// free coordinates of `Coker B` with `A·c_free = c'_free`, and the coupling
/// values `δ(e_i) = q(e_i) − q'(Ψe_i)` absorbed by the radical.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub torsion: GroupIso,
    pub free: IntMatrix,
    pub coupling: Vec<QmodZ>,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let imgs: Vec<String> = self
            .torsion
            .images
            .iter()
            .enumerate()
            .map(|(i, y)| {
                let y: Vec<String> = y.iter().map(u64::to_string).collect();
                format!("e{i} -> ({})", y.join(", "))
            })
            .collect();
        write!(f, "torsion: [{}]; free: {}", imgs.join(", "), self.free)?;
        if self.coupling.iter().any(|c| !c.is_zero()) {
            let c: Vec<String> = self.coupling.iter().map(QmodZ::to_string).collect();
            write!(f, "; coupling: [{}]", c.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Equivalent(Witness),
    /// Name of the first invariant found to differ.
    Inequivalent(&'static str),
    /// The search budget ran out after this many nodes.
    Unknown {
        nodes: u64,
    },
}

impl Verdict {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Verdict::Equivalent(_))
    }

    pub fn is_definite(&self) -> bool {
        !matches!(self, Verdict::Unknown { .. })
    }
}

/// Unimodular `P` and `g ≥ 0` with `P·v = g·e₀`.
fn gcd_normal_form(v: &[BigInt]) -> (IntMatrix, BigInt) {
    let n = v.len();
    let mut p = IntMatrix::identity(n);
    let mut w = v.to_vec();
    for k in 1..n {
        if w[k].is_zero() {
            continue;
        }
        let (g, s, t) = ext_gcd(&w[0], &w[k]);
        let (a, b) = (&w[0] / &g, &w[k] / &g);
        let mut next = IntMatrix::identity(n);
        next.set(0, 0, s);
        next.set(0, k, t);
        next.set(k, 0, -b);
        next.set(k, k, a);
        p = next.mul(&p);
        w = p.mul_vec(v);
    }
    if n > 0 && w[0].is_negative() {
        let mut flip = IntMatrix::identity(n);
        flip.set(0, 0, -BigInt::one());
        p = flip.mul(&p);
        w = p.mul_vec(v);
    }
    let g = if n > 0 { w[0].clone() } else { BigInt::zero() };
    (p, g)
}

fn free_part_map(v: &[BigInt], v2: &[BigInt]) -> IntMatrix {
    let (p, _) = gcd_normal_form(v);
    let (p2, _) = gcd_normal_form(v2);
    unimodular_inverse(&p2).mul(&p)
}

fn coupling(q: &QuadraticFunction, q2: &QuadraticFunction, iso: &GroupIso) -> Vec<QmodZ> {
    let g = q.group();
    (0..g.rank())
        .map(|i| {
            let e = g.generator(i);
            &q.value_at(e) - &q2.value_at(iso.map_index(g, q2.group(), e))
        })
        .collect()
}

/// Decides `Y^c`-equivalence of two decorated presentations.
pub fn yc_equivalent(p: &DecoratedPresentation, p2: &DecoratedPresentation, opts: &ClassifyOptions) -> Result<Verdict> {
    let a = Analysis::new(p, opts.order_cap)?;
    let b = Analysis::new(p2, opts.order_cap)?;
    compare_analyses(&a, &b, opts)
}

pub fn compare_analyses(a: &Analysis, b: &Analysis, opts: &ClassifyOptions) -> Result<Verdict> {
    if a.free_rank() != b.free_rank() {
        return Ok(Verdict::Inequivalent("free_rank"));
    }
    if a.disc.torsion_factors() != b.disc.torsion_factors() {
        return Ok(Verdict::Inequivalent("torsion"));
    }
    if a.chern_free_gcd() != b.chern_free_gcd() {
        return Ok(Verdict::Inequivalent("chern_free_gcd"));
    }
    let free = free_part_map(&a.chern_free, &b.chern_free);
    let step = a.coset_step();
    if step == 0 {
        // covers rational homology spheres, free H₁, and mixed cases with vanishing slopes
        return Ok(match compare_quadratic(&a.q, &b.q, opts.order_cap)? {
            Ok(iso) => {
                let coupling = coupling(&a.q, &b.q, &iso);
                Verdict::Equivalent(Witness { torsion: iso, free, coupling })
            }
            Err(m) => Verdict::Inequivalent(m.name()),
        });
    }
    if class_fingerprint(a).finite != class_fingerprint(b).finite {
        return Ok(Verdict::Inequivalent("coset_value_multisets"));
    }
    let outcome = search_isomorphism(
        &FormData::of_quadratic(&a.q),
        &FormData::of_quadratic(&b.q),
        ValueRule::Coset(step),
        Some(opts.node_budget),
        &mut |_| true,
    );
    Ok(match outcome {
        SearchOutcome::Found(iso) => {
            let coupling = coupling(&a.q, &b.q, &iso);
            Verdict::Equivalent(Witness { torsion: iso, free, coupling })
        }
        SearchOutcome::NotFound => Verdict::Inequivalent("phi_isomorphism"),
        SearchOutcome::Exhausted => Verdict::Unknown { nodes: opts.node_budget },
    })
}

/// Independently rechecks an `Equivalent` witness.
pub fn verify_witness(p: &DecoratedPresentation, p2: &DecoratedPresentation, w: &Witness, cap: u64) -> Result<bool> {
    let a = Analysis::new(p, cap)?;
    let b = Analysis::new(p2, cap)?;
    let (g, h) = (a.q.group(), b.q.group());
    if !w.torsion.is_bijective_hom(g, h) {
        return Ok(false);
    }
    let gens: Vec<usize> = (0..g.rank()).map(|i| g.generator(i)).collect();
    for &x in &gens {
        for &y in &gens {
            let (px, py) = (w.torsion.map_index(g, h, x), w.torsion.map_index(g, h, y));
            if a.q.bilinear_at(x, y) != b.q.bilinear_at(px, py) {
                return Ok(false);
            }
        }
    }
    let step = a.coset_step();
    for (i, &e) in gens.iter().enumerate() {
        let delta = &a.q.value_at(e) - &b.q.value_at(w.torsion.map_index(g, h, e));
        if delta != w.coupling[i] {
            return Ok(false);
        }
        let d = BigInt::from(g.factors()[i]);
        let allowed = BigInt::from(step).gcd(&d);
        // δ(e_i) ∈ gcd(g, d_i)/d_i · ℤ
        let scaled = Rational::from_integer(d) / Rational::from_integer(allowed);
        if !(delta.value() * scaled).is_integer() {
            return Ok(false);
        }
    }
    let unimodular = w.free.is_square() && w.free.rows() == a.chern_free.len() && w.free.determinant().abs().is_one();
    Ok(unimodular && w.free.mul_vec(&a.chern_free) == b.chern_free && a.chern_free_gcd() == b.chern_free_gcd())
}

/// Condition-(3) decision for rational homology spheres: an isometry of linking
/// pairings carrying the Chern class to the Chern class, plus equal Gauss sums.
pub fn yc_equivalent_by_linking(p: &DecoratedPresentation, p2: &DecoratedPresentation, cap: u64) -> Result<bool> {
    let a = Analysis::new(p, cap)?;
    let b = Analysis::new(p2, cap)?;
    if a.free_rank() != 0 || b.free_rank() != 0 {
        return Err(Error::DegenerateMatrix);
    }
    if a.disc.torsion_factors() != b.disc.torsion_factors() {
        return Ok(false);
    }
    if !cyclo_equals(&gauss_sum(&a.q), &gauss_sum(&b.q)) {
        return Ok(false);
    }
    let fa = linking_form(&a.disc, a.q.group().clone())?;
    let fb = linking_form(&b.disc, b.q.group().clone())?;
    let group = a.q.group().clone();
    let target = b.q.group().clone();
    let to_u64 = |v: &[BigInt]| -> Vec<u64> { v.iter().map(|x| x.to_u64().expect("reduced mod d_i")).collect() };
    let (ca, cb) = (to_u64(&a.chern_torsion), to_u64(&b.chern_torsion));
    let ca_idx = group.index_of(&ca)?;
    let cb_idx = target.index_of(&cb)?;
    let outcome = search_isomorphism(&fa, &fb, ValueRule::Ignore, None, &mut |iso| {
        iso.map_index(&group, &target, ca_idx) == cb_idx
    });
    Ok(matches!(outcome, SearchOutcome::Found(_)))
}

fn linking_form(d: &DiscriminantData, group: FiniteAbelianGroup) -> Result<FormData> {
    let k = group.rank();
    let lifts: Vec<_> = (0..k).map(|i| d.torsion_lift(i)).collect();
    let values: Vec<Vec<QmodZ>> = lifts
        .iter()
        .map(|x| lifts.iter().map(|y| linking_pairing(d, x, y)).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    let m = values.iter().flatten().fold(1u64, |m, v| m.lcm(&v.denom().to_u64().expect("small")));
    let nums =
        values.iter().map(|r| r.iter().map(|v| v.numerator_over(m).expect("common multiple")).collect()).collect();
    Ok(FormData::bilinear(group, m, nums))
}

fn partition(reps: Vec<Vec<BigInt>>, b: &IntMatrix, opts: &ClassifyOptions) -> Result<Vec<Vec<Vec<BigInt>>>> {
    let analyses: Vec<Analysis> = reps
        .iter()
        .map(|s| DecoratedPresentation::new(b.clone(), s.clone()).and_then(|p| Analysis::new(&p, opts.order_cap)))
        .collect::<Result<_>>()?;
    let prints: Vec<ClassFingerprint> = analyses.iter().map(class_fingerprint).collect();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for i in 0..reps.len() {
        let mut placed = false;
        for class in classes.iter_mut() {
            let j = class[0];
            if prints[i] != prints[j] {
                continue;
            }
            if compare_analyses(&analyses[j], &analyses[i], opts)?.is_equivalent() {
                class.push(i);
                placed = true;
                break;
            }
        }
        if !placed {
            classes.push(vec![i]);
        }
    }
    Ok(classes.into_iter().map(|c| c.into_iter().map(|i| reps[i].clone()).collect()).collect())
}

/// Partition of all canonical Chern vectors of a nondegenerate `B` into
/// `Y^c`-classes, in enumeration order.
pub fn yc_classes(b: &IntMatrix, opts: &ClassifyOptions) -> Result<Vec<Vec<Vec<BigInt>>>> {
    let lattice = crate::lattice::BilinearLattice::new(b.clone())?;
    let cc = ChernClasses::new(&lattice);
    let count = cc.count().ok_or(Error::DegenerateMatrix)?;
    if count > BigInt::from(opts.order_cap) {
        return Err(Error::OrderCapExceeded { order: count.to_u128().unwrap_or(u128::MAX), cap: opts.order_cap });
    }
    partition(cc.enumerate().expect("nondegenerate"), b, opts)
}

/// Partition of the given Chern vectors (each validated against `B`) into
/// `Y^c`-classes. Works for degenerate `B`.
pub fn yc_partition(b: &IntMatrix, chern: &[Vec<BigInt>], opts: &ClassifyOptions) -> Result<Vec<Vec<Vec<BigInt>>>> {
    partition(chern.to_vec(), b, opts)
}

/// Partition of the distinct Chern classes having a representative with
/// entries in `[−radius, radius]`, listed by canonical representative.
pub fn yc_classes_in_box(b: &IntMatrix, radius: u32, opts: &ClassifyOptions) -> Result<Vec<Vec<Vec<BigInt>>>> {
    let lattice = crate::lattice::BilinearLattice::new(b.clone())?;
    let cc = ChernClasses::new(&lattice);
    let n = b.rows();
    let r = radius as i64;
    let width = (2 * r + 1) as u128;
    if width.checked_pow(n as u32).is_none_or(|t| t > 1_000_000) {
        return Err(Error::OrderCapExceeded { order: width.saturating_pow(n as u32), cap: 1_000_000 });
    }
    let mut seen = BTreeSet::new();
    let mut reps = Vec::new();
    let mut s = vec![-r; n];
    loop {
        let v: Vec<BigInt> = s.iter().map(|&x| BigInt::from(x)).collect();
        if let Ok(c) = cc.canonical(&v) {
            if seen.insert(c.clone()) {
                reps.push(c);
            }
        }
        let mut k = n;
        loop {
            if k == 0 {
                reps.sort_by_key(|c| (c.iter().map(|x| x.abs()).collect::<Vec<_>>(), c.clone()));
                return partition(reps, b, opts);
            }
            k -= 1;
            s[k] += 1;
            if s[k] <= r {
                break;
            }
            s[k] = -r;
        }
    }
}

/// Number of orbits of `ℤ_p` under multiplication by the square roots of unity
/// mod `p`; only defined for odd `p ≥ 3`.
pub fn lens_yc_count(p: u64) -> Result<u64> {
    if p.is_multiple_of(2) {
        return Err(Error::EvenModulus(p));
    }
    if p < 3 {
        return Err(Error::InvalidLens { p: p as i64, q: 1 });
    }
    let roots: Vec<u64> = (1..p).filter(|r| (r * r) % p == 1).collect();
    let mut seen = vec![false; p as usize];
    let mut orbits = 0;
    for i in 0..p {
        if seen[i as usize] {
            continue;
        }
        orbits += 1;
        for r in &roots {
            seen[((r * i) % p) as usize] = true;
        }
    }
    Ok(orbits)
}

fn inverse_mod(a: i64, p: u64) -> Result<u64> {
    let pm = p as i64;
    let e = a.rem_euclid(pm).extended_gcd(&pm);
    if e.gcd != 1 {
        return Err(Error::NotInvertible { value: a, modulus: p });
    }
    Ok(e.x.rem_euclid(pm) as u64)
}

/// Number of `Spin^c` structures of `L(p; q₁, q₂)` up to diffeomorphism.
pub fn lens_diffeo_count(p: u64, q1: i64, q2: i64) -> Result<u64> {
    if p < 2 {
        return Err(Error::InvalidLens { p: p as i64, q: q1 });
    }
    let pm = p as i64;
    let inv1 = inverse_mod(q1, p)?;
    inverse_mod(q2, p)?;
    let (a, b) = (q1.rem_euclid(pm) as u64, q2.rem_euclid(pm) as u64);
    let squares_differ = (a * a) % p != (b * b) % p;
    if squares_differ || a == b || (a + b) % p == 0 {
        return Ok(p / 2 + 1);
    }
    let ratio = (b * inv1) % p;
    let (mut bcount, mut ccount) = (0u64, 0u64);
    for i in 0..p {
        let j = (a + b + p - i) % p;
        let k = (ratio * i) % p;
        if i != j && j != k && i != k {
            bcount += 1;
        }
        if i == j && j == k {
            ccount += 1;
        }
    }
    let total = 2 * p + 2 * ccount;
    assert!(total >= bcount && (total - bcount).is_multiple_of(4), "orbit count formula is integral");
    Ok((total - bcount) / 4)
}
