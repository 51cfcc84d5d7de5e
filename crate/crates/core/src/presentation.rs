//! Decorated surgery presentations `(B, s)` and their moves.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::{first_parity_violation, wu_classes, BilinearLattice, ChernClasses, WuClass};
use crate::zlinalg::{solve_integer, IntMatrix};

/// Linking matrix `B` of a framed link together with a Chern vector `s`
/// (`s_i ≡ B_ii mod 2`), describing a closed Spin^c 3-manifold.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DecoratedPresentation {
    b: IntMatrix,
    s: Vec<BigInt>,
}

/// Checks symmetry of `B`, length of `s`, and the parity condition.
pub fn validate(b: &IntMatrix, s: &[BigInt]) -> Result<()> {
    if !b.is_square() {
        return Err(Error::DimensionMismatch { expected: b.rows(), found: b.cols() });
    }
    if let Some((row, col)) = b.first_asymmetry() {
        return Err(Error::NotSymmetric { row, col });
    }
    if s.len() != b.rows() {
        return Err(Error::DimensionMismatch { expected: b.rows(), found: s.len() });
    }
    if let Some(index) = first_parity_violation(b, s) {
        return Err(Error::ParityViolation { index });
    }
    Ok(())
}

impl DecoratedPresentation {
    pub fn new(b: IntMatrix, s: Vec<BigInt>) -> Result<Self> {
        validate(&b, &s)?;
        Ok(DecoratedPresentation { b, s })
    }

    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R], s: &[i64]) -> Result<Self> {
        Self::new(IntMatrix::from_rows(rows), s.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.b
    }

    pub fn chern(&self) -> &[BigInt] {
        &self.s
    }

    pub fn dim(&self) -> usize {
        self.b.rows()
    }

    pub fn lattice(&self) -> BilinearLattice {
        BilinearLattice::new(self.b.clone()).expect("validated on construction")
    }

    /// Same matrix, canonical representative of the Chern class.
    pub fn canonical(&self) -> DecoratedPresentation {
        let s = ChernClasses::new(&self.lattice()).canonical(&self.s).expect("validated on construction");
        DecoratedPresentation { b: self.b.clone(), s }
    }
}

/// True iff `(s − s')/2 ∈ Im B`.
pub fn chern_equal(p: &DecoratedPresentation, s2: &[BigInt]) -> Result<bool> {
    validate(&p.b, s2)?;
    let half: Vec<BigInt> = p.s.iter().zip(s2).map(|(a, b)| (a - b) / 2).collect();
    Ok(solve_integer(&p.b, &half)?.is_some())
}

/// Characteristic solutions of `B` (spin structures).
pub fn spin_structures(p: &DecoratedPresentation) -> Vec<WuClass> {
    wu_classes(&p.lattice())
}

/// `β([r]) = [B·r]`.
pub fn beta(p: &DecoratedPresentation, r: &WuClass) -> Result<DecoratedPresentation> {
    let r = WuClass::new(&p.lattice(), r.bits().to_vec())?;
    DecoratedPresentation::new(p.b.clone(), p.b.mul_vec(&r.lift()))
}

/// A move on decorated presentations.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Move {
    /// Basis change `e_i ↦ e_i + sign·e_j`.
    HandleSlide {
        i: usize,
        j: usize,
        sign: i8,
    },
    ReverseOrientation(usize),
    /// Adds a `±1`-framed unknot.
    Stabilize(i8),
    /// Removes a `±1`-framed unlinked unknot.
    Destabilize(usize),
    /// Removes component `j` (0-framed, linking only component `i`, once) together with `i`.
    SlamDunk {
        i: usize,
        j: usize,
    },
    /// Appends the bordered block `[[B, x⃗, 0], [x⃗ᵀ, x, 1], [0, 1, 0]]` with Chern entries `(x, 0)`.
    YMove {
        column: Vec<BigInt>,
        framing: BigInt,
    },
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::HandleSlide { i, j, sign } => write!(f, "slide({i}, {j}, {sign:+})"),
            Move::ReverseOrientation(i) => write!(f, "reverse({i})"),
            Move::Stabilize(sign) => write!(f, "stabilize({sign:+})"),
            Move::Destabilize(i) => write!(f, "destabilize({i})"),
            Move::SlamDunk { i, j } => write!(f, "slam_dunk({i}, {j})"),
            Move::YMove { column, framing } => {
                let col: Vec<String> = column.iter().map(|x| x.to_string()).collect();
                write!(f, "y_move([{}], {framing})", col.join(", "))
            }
        }
    }
}

fn check_index(i: usize, n: usize, what: &str) -> Result<()> {
    if i >= n {
        return Err(Error::InvalidMove(format!("{what}: index {i} out of range for {n} components")));
    }
    Ok(())
}

fn is_unit_row(b: &IntMatrix, i: usize) -> bool {
    b.get(i, i).abs().is_one() && (0..b.cols()).all(|k| k == i || b.get(i, k).is_zero())
}

fn is_meridian(b: &IntMatrix, i: usize, j: usize) -> bool {
    i != j && b.get(j, j).is_zero() && b.get(i, j).is_one() && (0..b.cols()).all(|k| k == i || b.get(j, k).is_zero())
}

/// Applies a move, returning the new presentation.
pub fn apply_move(p: &DecoratedPresentation, m: &Move) -> Result<DecoratedPresentation> {
    let n = p.dim();
    let mut b = p.b.clone();
    let mut s = p.s.clone();
    match m {
        Move::HandleSlide { i, j, sign } => {
            check_index(*i, n, "handle slide")?;
            check_index(*j, n, "handle slide")?;
            if i == j || sign.abs() != 1 {
                return Err(Error::InvalidMove("handle slide needs i != j and sign ±1".into()));
            }
            let e = BigInt::from(*sign);
            b.add_col_multiple(*i, *j, &e);
            b.add_row_multiple(*i, *j, &e);
            let sj = &s[*j] * &e;
            s[*i] += sj;
        }
        Move::ReverseOrientation(i) => {
            check_index(*i, n, "orientation reversal")?;
            b.negate_row(*i);
            b.negate_col(*i);
            s[*i] = -&s[*i];
        }
        Move::Stabilize(sign) => {
            if sign.abs() != 1 {
                return Err(Error::InvalidMove("stabilization sign must be ±1".into()));
            }
            let e = BigInt::from(*sign);
            b = b.direct_sum(&IntMatrix::diagonal_matrix(std::slice::from_ref(&e)));
            s.push(e);
        }
        Move::Destabilize(i) => {
            check_index(*i, n, "destabilization")?;
            if !is_unit_row(&b, *i) {
                return Err(Error::InvalidMove(format!("component {i} is not a ±1-framed unlinked unknot")));
            }
            b = b.delete_indices(&[*i]);
            s.remove(*i);
        }
        Move::SlamDunk { i, j } => {
            check_index(*i, n, "slam dunk")?;
            check_index(*j, n, "slam dunk")?;
            if !is_meridian(&b, *i, *j) {
                return Err(Error::InvalidMove(format!(
                    "component {j} is not a 0-framed meridian linking only component {i}"
                )));
            }
            // make s_j = 0 using s ~ s + 2·B·h with h = t·e_i
            let t: BigInt = &s[*j] / 2;
            if !t.is_zero() {
                for (k, sk) in s.iter_mut().enumerate() {
                    *sk -= b.get(k, *i) * &t * 2;
                }
            }
            b = b.delete_indices(&[*i, *j]);
            s = s.into_iter().enumerate().filter(|(k, _)| k != i && k != j).map(|(_, x)| x).collect();
        }
        Move::YMove { column, framing } => {
            if column.len() != n {
                return Err(Error::InvalidMove(format!("Y-move column has length {}, expected {n}", column.len())));
            }
            let mut nb = IntMatrix::zeros(n + 2, n + 2);
            for (r, x) in column.iter().enumerate() {
                for c in 0..n {
                    nb.set(r, c, b.get(r, c).clone());
                }
                nb.set(r, n, x.clone());
                nb.set(n, r, x.clone());
            }
            nb.set(n, n, framing.clone());
            nb.set(n, n + 1, BigInt::one());
            nb.set(n + 1, n, BigInt::one());
            b = nb;
            s.push(framing.clone());
            s.push(BigInt::zero());
        }
    }
    DecoratedPresentation::new(b, s)
}

/// 64-bit linear congruential generator `x ← a·x + c (mod 2⁶⁴)` with
/// `a = 6364136223846793005`, `c = 1442695040888963407`; outputs are the high
/// 32 bits of the state.
#[derive(Clone, Debug)]
pub struct Lcg {
    state: u64,
}

impl Lcg {
    pub const MULTIPLIER: u64 = 6364136223846793005;
    pub const INCREMENT: u64 = 1442695040888963407;

    pub fn new(seed: u64) -> Self {
        let mut g = Lcg { state: seed };
        g.next_u32();
        g
    }

    pub fn next_u32(&mut self) -> u32 {
        self.state = self.state.wrapping_mul(Self::MULTIPLIER).wrapping_add(Self::INCREMENT);
        (self.state >> 32) as u32
    }

    /// Uniform in `0..n` (multiply-shift reduction); `n` must be positive.
    pub fn below(&mut self, n: usize) -> usize {
        assert!(n > 0);
        ((self.next_u32() as u64 * n as u64) >> 32) as usize
    }
}

/// Extra components a random walk may add by stabilization.
pub const WALK_GROWTH_LIMIT: usize = 3;

/// All moves of each kind valid on `p`, excluding Y-moves.
pub fn valid_moves(p: &DecoratedPresentation, allow_stabilize: bool) -> Vec<Vec<Move>> {
    let n = p.dim();
    let b = &p.b;
    let mut kinds = Vec::new();
    let slides: Vec<Move> = (0..n)
        .flat_map(|i| {
            (0..n).filter(move |&j| j != i).flat_map(move |j| [1i8, -1].map(|sign| Move::HandleSlide { i, j, sign }))
        })
        .collect();
    kinds.push(slides);
    kinds.push((0..n).map(Move::ReverseOrientation).collect());
    if allow_stabilize {
        kinds.push(vec![Move::Stabilize(1), Move::Stabilize(-1)]);
    }
    if n >= 2 {
        kinds.push((0..n).filter(|&i| is_unit_row(b, i)).map(Move::Destabilize).collect());
    }
    if n >= 3 {
        kinds.push(
            (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .filter(|&(i, j)| is_meridian(b, i, j))
                .map(|(i, j)| Move::SlamDunk { i, j })
                .collect(),
        );
    }
    kinds.retain(|k| !k.is_empty());
    kinds
}

/// Applies `steps` random Kirby moves chosen by [`Lcg`] from `seed`: a move
/// kind uniformly among the kinds currently valid, then a payload uniformly.
/// Stabilization is offered only while the walk has added fewer than
/// [`WALK_GROWTH_LIMIT`] components.
pub fn random_walk(p: &DecoratedPresentation, steps: usize, seed: u64) -> DecoratedPresentation {
    random_walk_with_log(p, steps, seed).0
}

/// [`random_walk`] together with the moves applied.
pub fn random_walk_with_log(p: &DecoratedPresentation, steps: usize, seed: u64) -> (DecoratedPresentation, Vec<Move>) {
    let mut rng = Lcg::new(seed);
    let start = p.dim();
    let mut cur = p.clone();
    let mut log = Vec::with_capacity(steps);
    for _ in 0..steps {
        let kinds = valid_moves(&cur, cur.dim() < start + WALK_GROWTH_LIMIT);
        let kind = &kinds[rng.below(kinds.len())];
        let m = kind[rng.below(kind.len())].clone();
        cur = apply_move(&cur, &m).expect("valid moves apply");
        log.push(m);
    }
    (cur, log)
}
