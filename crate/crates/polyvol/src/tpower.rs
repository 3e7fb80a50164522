//! Point evaluation of the multivariate truncated power T(x|M) and of its
//! exponentially weighted relative, by two independent routes: an explicit
//! sum over invertible column subsets, and a column-removal recurrence.
//!
//! T(x|M), for an s×n direction matrix M of rank s whose columns span a
//! pointed cone, is the (normalized) volume of the fiber {u ≥ 0 : Mu = x}:
//! a piecewise polynomial of degree n−s supported on cone(M).

use std::collections::{HashMap, HashSet};

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exact::{
    det, dot, factorial, invert, kernel_basis, rank, rat, rat_pow, rat_to_f64, solve, Rat,
    RatMatrix,
};

/// Hard cap on direction-matrix columns; keeps subset enumeration at desk scale.
pub const COLUMN_CAP: usize = 24;

const MAX_SAMPLING_ATTEMPTS: u64 = 64;
// Internal seeds for the deterministic samplers used where the result is
// provably independent of the sampled helper vector.
const PERTURBATION_SEED: u64 = 0x0bad_5eed_0001;
const LEAF_C_SEED: u64 = 0x0bad_5eed_0002;

/// An s×n rational matrix read as a multiset of column directions, together
/// with a strict pointedness witness: a vector w with w·m_j > 0 for every
/// column m_j. The witness certifies that every fiber {u ≥ 0 : Mu = x} is
/// bounded, which is what makes T(x|M) finite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectionMatrix {
    m: RatMatrix,
    witness: Vec<Rat>,
}

impl DirectionMatrix {
    /// Validates the matrix and searches for a pointedness witness.
    pub fn new(m: RatMatrix) -> Result<Self> {
        Self::validate_shape(&m)?;
        let witness = find_witness(&m)?;
        Ok(DirectionMatrix { m, witness })
    }

    /// Uses a caller-supplied witness after verifying it strictly.
    pub fn with_witness(m: RatMatrix, witness: Vec<Rat>) -> Result<Self> {
        Self::validate_shape(&m)?;
        if witness.len() != m.rows() {
            return Err(Error::Dimension(format!(
                "witness length {} for {} rows",
                witness.len(),
                m.rows()
            )));
        }
        for j in 0..m.cols() {
            if !dot(&witness, &m.col(j)).is_positive() {
                return Err(Error::Domain(format!(
                    "witness is not strictly positive against column {j}"
                )));
            }
        }
        Ok(DirectionMatrix { m, witness })
    }

    fn validate_shape(m: &RatMatrix) -> Result<()> {
        if m.cols() > COLUMN_CAP {
            return Err(Error::Size(format!(
                "{} columns exceed the cap of {COLUMN_CAP}",
                m.cols()
            )));
        }
        for j in 0..m.cols() {
            if m.col(j).iter().all(|e| e.is_zero()) {
                return Err(Error::Domain(format!("column {j} is zero")));
            }
        }
        if rank(m) != m.rows() {
            return Err(Error::Rank(format!(
                "direction matrix must have full row rank {}",
                m.rows()
            )));
        }
        Ok(())
    }

    pub fn matrix(&self) -> &RatMatrix {
        &self.m
    }

    pub fn witness(&self) -> &[Rat] {
        &self.witness
    }

    /// Ambient dimension s.
    pub fn dim(&self) -> usize {
        self.m.rows()
    }

    /// Number of direction columns n.
    pub fn ncols(&self) -> usize {
        self.m.cols()
    }

    /// Sub-multiset of columns, keeping the witness (any witness for M is a
    /// witness for a subset). Caller must ensure the subset still has rank s.
    pub(crate) fn subset(&self, cols: &[usize]) -> DirectionMatrix {
        let m = self.m.column_submatrix(cols);
        debug_assert_eq!(rank(&m), m.rows());
        DirectionMatrix {
            m,
            witness: self.witness.clone(),
        }
    }
}

/// Finds w with w·m_j > 0 for all columns, or reports that none exists.
///
/// The set of valid w is the interior of the dual cone {w : w·m_j ≥ 0 ∀j}.
/// Since rank(M) = s that dual cone is pointed, so it is spanned by extreme
/// rays, each determined by s−1 linearly independent active constraints.
/// Summing all extreme rays lands in the interior whenever it is nonempty.
fn find_witness(m: &RatMatrix) -> Result<Vec<Rat>> {
    let s = m.rows();
    let n = m.cols();
    let not_pointed =
        || Error::Domain("columns do not span a pointed cone (no strict witness exists)".into());
    if s == 1 {
        let positive = (0..n).all(|j| m.at(0, j).is_positive());
        let negative = (0..n).all(|j| m.at(0, j).is_negative());
        return if positive {
            Ok(vec![rat(1)])
        } else if negative {
            Ok(vec![rat(-1)])
        } else {
            Err(not_pointed())
        };
    }
    let cols: Vec<Vec<Rat>> = (0..n).map(|j| m.col(j)).collect();
    let mut w = vec![Rat::zero(); s];
    for sub in (0..n).combinations(s - 1) {
        // Kernel of the rows {m_j : j in sub}; one-dimensional exactly when
        // those columns are linearly independent.
        let rows = RatMatrix::from_rows(sub.iter().map(|&j| cols[j].clone()).collect())?;
        let kernel = kernel_basis(&rows);
        if kernel.len() != 1 {
            continue;
        }
        let g = &kernel[0];
        let keep_pos = cols.iter().all(|c| !dot(g, c).is_negative());
        let keep_neg = cols.iter().all(|c| !dot(g, c).is_positive());
        if keep_pos {
            for (wi, gi) in w.iter_mut().zip(g) {
                *wi += gi;
            }
        } else if keep_neg {
            for (wi, gi) in w.iter_mut().zip(g) {
                *wi -= gi;
            }
        }
    }
    if cols.iter().all(|c| dot(&w, c).is_positive()) {
        Ok(w)
    } else {
        Err(not_pointed())
    }
}

/// A rational vector c, one entry per column of a fixed direction matrix,
/// certified so that θ_Y·y − c_y ≠ 0 for every invertible column subset Y
/// and every column y outside it (θ_Y = Y^{−T}·c_Y). Those differences are
/// the denominators of the explicit evaluation formulas.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenericVector {
    c: Vec<Rat>,
}

impl GenericVector {
    /// Certifies a caller-supplied c against M by exhaustive enumeration.
    pub fn certified(m: &DirectionMatrix, c: Vec<Rat>) -> Result<GenericVector> {
        if c.len() != m.ncols() {
            return Err(Error::Dimension(format!(
                "c has {} entries for {} columns",
                c.len(),
                m.ncols()
            )));
        }
        certify_denominators(m.matrix(), &c)?;
        Ok(GenericVector { c })
    }

    pub fn entries(&self) -> &[Rat] {
        &self.c
    }
}

fn certify_denominators(m: &RatMatrix, c: &[Rat]) -> Result<()> {
    let s = m.rows();
    let n = m.cols();
    for sub in (0..n).combinations(s) {
        let y = m.column_submatrix(&sub);
        let yt = y.transpose();
        let c_sub: Vec<Rat> = sub.iter().map(|&j| c[j].clone()).collect();
        let theta = match solve(&yt, &c_sub) {
            Ok(t) => t,
            Err(Error::Singular(_)) => continue,
            Err(e) => return Err(e),
        };
        for j in 0..n {
            if sub.contains(&j) {
                continue;
            }
            if dot(&theta, &m.col(j)) == c[j] {
                return Err(Error::Certificate(format!(
                    "denominator vanishes for columns {sub:?} against column {j}"
                )));
            }
        }
    }
    Ok(())
}

fn sample_distinct_integers(rng: &mut ChaCha8Rng, count: usize, hi: u64) -> Vec<Rat> {
    debug_assert!(hi >= count as u64);
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let v = rng.gen_range(1..=hi);
        if seen.insert(v) {
            out.push(rat(v as i64));
        }
    }
    out
}

/// Samples a certified generic vector for M; deterministic for a fixed seed.
/// Entries are distinct positive integers drawn from ranges that grow with
/// each failed attempt, so repeated columns always receive distinct values.
pub fn sample_generic_c(m: &DirectionMatrix, seed: u64) -> Result<GenericVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = m.ncols();
    for attempt in 1..=MAX_SAMPLING_ATTEMPTS {
        let hi = (8 * attempt).max(n as u64);
        let c = sample_distinct_integers(&mut rng, n, hi);
        if certify_denominators(m.matrix(), &c).is_ok() {
            return Ok(GenericVector { c });
        }
    }
    // Valid c form the complement of finitely many hyperplanes, so running
    // out of attempts over growing ranges indicates a bug, not bad luck.
    Err(Error::Certificate(
        "exhausted attempts sampling a generic vector".into(),
    ))
}

/// Samples a direction g such that Y^{−1}g has no zero component for any
/// invertible column subset Y. Evaluations at points on chamber walls are
/// resolved as limits from the g side; the limit value is independent of
/// which valid g was drawn.
fn sample_perturbation(m: &RatMatrix, seed: u64) -> Result<Vec<Rat>> {
    let s = m.rows();
    let n = m.cols();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    'attempt: for attempt in 1..=MAX_SAMPLING_ATTEMPTS {
        let hi = (8 * attempt).max(s as u64);
        let g = sample_distinct_integers(&mut rng, s, hi);
        for sub in (0..n).combinations(s) {
            let y = m.column_submatrix(&sub);
            let v = match solve(&y, &g) {
                Ok(v) => v,
                Err(Error::Singular(_)) => continue,
                Err(e) => return Err(e),
            };
            if v.iter().any(|t| t.is_zero()) {
                continue 'attempt;
            }
        }
        return Ok(g);
    }
    Err(Error::Certificate(
        "exhausted attempts sampling a perturbation direction".into(),
    ))
}

/// Where a point sits relative to cone(M) and its chamber walls.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointClassification {
    /// In the cone and strictly inside every invertible sub-cone containing it.
    Interior,
    /// In the cone but on a facet hyperplane of some containing sub-cone
    /// (an outer facet or an interior chamber wall).
    Boundary,
    /// Not in cone(M).
    Outside,
}

/// Exact classification by sign tests of Y^{−1}x over all invertible Y.
pub fn classify_point(m: &DirectionMatrix, x: &[Rat]) -> Result<PointClassification> {
    let s = m.dim();
    if x.len() != s {
        return Err(Error::Dimension(format!(
            "point has {} coordinates, cone lives in dimension {s}",
            x.len()
        )));
    }
    let mut member = false;
    for sub in (0..m.ncols()).combinations(s) {
        let y = m.matrix().column_submatrix(&sub);
        let u = match solve(&y, x) {
            Ok(u) => u,
            Err(Error::Singular(_)) => continue,
            Err(e) => return Err(e),
        };
        if u.iter().any(|t| t.is_negative()) {
            continue;
        }
        member = true;
        if u.iter().any(|t| t.is_zero()) {
            return Ok(PointClassification::Boundary);
        }
    }
    Ok(if member {
        PointClassification::Interior
    } else {
        PointClassification::Outside
    })
}

/// Finite sum Σ coefficient·e^{−exponent} with distinct exponents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpSum {
    terms: Vec<(Rat, Rat)>,
}

impl ExpSum {
    /// Merges equal exponents, drops zero coefficients, sorts by exponent.
    pub fn new(raw: Vec<(Rat, Rat)>) -> ExpSum {
        let mut merged: Vec<(Rat, Rat)> = Vec::new();
        let mut sorted = raw;
        sorted.sort_by(|a, b| a.1.cmp(&b.1));
        for (coeff, exp) in sorted {
            match merged.last_mut() {
                Some(last) if last.1 == exp => last.0 += coeff,
                _ => merged.push((coeff, exp)),
            }
        }
        merged.retain(|(c, _)| !c.is_zero());
        ExpSum { terms: merged }
    }

    /// (coefficient, exponent) pairs, ascending in exponent.
    pub fn terms(&self) -> &[(Rat, Rat)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval_f64(&self) -> f64 {
        self.eval_scaled_f64(1.0)
    }

    /// Σ coefficient·e^{−exponent·t}.
    pub fn eval_scaled_f64(&self, t: f64) -> f64 {
        self.terms
            .iter()
            .map(|(c, e)| rat_to_f64(c) * (-rat_to_f64(e) * t).exp())
            .sum()
    }

    /// d/dt of `eval_scaled_f64`.
    pub fn derivative_scaled_f64(&self, t: f64) -> f64 {
        self.terms
            .iter()
            .map(|(c, e)| {
                let ef = rat_to_f64(e);
                -ef * rat_to_f64(c) * (-ef * t).exp()
            })
            .sum()
    }
}

struct SubsetTerm {
    y_inv: RatMatrix,
    /// Y^{−1}·g for the shared perturbation direction; every entry nonzero.
    v: Vec<Rat>,
    theta: Vec<Rat>,
    /// α_Y / |det Y| with α_Y = Π_{y∉Y} (θ_Y·y − c_y)^{−1}.
    alpha_over_det: Rat,
}

/// Precomputed per-subset data for repeated evaluation at many points with
/// one fixed (M, c) pair; shared by the box-spline alternating sum.
pub(crate) struct Evaluator {
    s: usize,
    n: usize,
    inv_deg_factorial: Rat,
    terms: Vec<SubsetTerm>,
}

impl Evaluator {
    /// Enumerates invertible column subsets and freezes their coefficients.
    /// Fails with a certificate error if any formula denominator vanishes,
    /// so a successful build re-proves the genericity of c.
    ///
    /// `perturbation`: shared wall-resolution direction; pass `None` to let
    /// the evaluator sample its own (only consulted when n > s).
    pub(crate) fn build(
        m: &DirectionMatrix,
        c: &[Rat],
        perturbation: Option<Vec<Rat>>,
    ) -> Result<Evaluator> {
        let s = m.dim();
        let n = m.ncols();
        if c.len() != n {
            return Err(Error::Dimension(format!(
                "c has {} entries for {n} columns",
                c.len()
            )));
        }
        let g = if n == s {
            // Single closed cone; no wall resolution needed.
            None
        } else {
            Some(match perturbation {
                Some(g) => g,
                None => sample_perturbation(m.matrix(), PERTURBATION_SEED)?,
            })
        };
        let mat = m.matrix();
        let mut terms = Vec::new();
        for sub in (0..n).combinations(s) {
            let y = mat.column_submatrix(&sub);
            let d = det(&y)?;
            if d.is_zero() {
                continue;
            }
            let y_inv = invert(&y)?;
            let c_sub: Vec<Rat> = sub.iter().map(|&j| c[j].clone()).collect();
            let theta = solve(&y.transpose(), &c_sub)?;
            let mut alpha = Rat::one();
            for j in 0..n {
                if sub.contains(&j) {
                    continue;
                }
                let denom = dot(&theta, &mat.col(j)) - &c[j];
                if denom.is_zero() {
                    return Err(Error::Certificate(format!(
                        "denominator vanishes for columns {sub:?} against column {j}"
                    )));
                }
                alpha /= denom;
            }
            let v = match &g {
                Some(g) => {
                    let v = y_inv.mul_vec(g)?;
                    if v.iter().any(|t| t.is_zero()) {
                        return Err(Error::Certificate(
                            "supplied perturbation direction lies on a wall".into(),
                        ));
                    }
                    v
                }
                None => Vec::new(),
            };
            let abs_d = if d.is_negative() { -d } else { d };
            terms.push(SubsetTerm {
                y_inv,
                v,
                theta,
                alpha_over_det: alpha / abs_d,
            });
        }
        Ok(Evaluator {
            s,
            n,
            inv_deg_factorial: Rat::from_integer(BigInt::one())
                / Rat::from_integer(factorial(n - s)),
            terms,
        })
    }

    /// Membership of x in the closed cone of one subset, with zeros broken
    /// toward the perturbation direction when n > s.
    fn member(&self, term: &SubsetTerm, u: &[Rat]) -> bool {
        if self.n == self.s {
            return u.iter().all(|t| !t.is_negative());
        }
        u.iter().zip(&term.v).all(|(ui, vi)| {
            if ui.is_positive() {
                true
            } else if ui.is_zero() {
                vi.is_positive()
            } else {
                false
            }
        })
    }

    pub(crate) fn eval_t(&self, x: &[Rat]) -> Result<Rat> {
        if x.len() != self.s {
            return Err(Error::Dimension(format!(
                "point has {} coordinates, expected {}",
                x.len(),
                self.s
            )));
        }
        let deg = self.n - self.s;
        let mut acc = Rat::zero();
        for term in &self.terms {
            let u = term.y_inv.mul_vec(x)?;
            if !self.member(term, &u) {
                continue;
            }
            acc += &term.alpha_over_det * rat_pow(&dot(&term.theta, x), deg);
        }
        Ok(acc * &self.inv_deg_factorial)
    }

    pub(crate) fn eval_e(&self, x: &[Rat]) -> Result<ExpSum> {
        if x.len() != self.s {
            return Err(Error::Dimension(format!(
                "point has {} coordinates, expected {}",
                x.len(),
                self.s
            )));
        }
        // The exponential weight flips each of the n−s denominator factors:
        // Π(c_y − θ_Y·y)^{−1} = (−1)^{n−s}·Π(θ_Y·y − c_y)^{−1}.
        let sign = if (self.n - self.s) % 2 == 1 {
            -Rat::one()
        } else {
            Rat::one()
        };
        let mut raw = Vec::new();
        for term in &self.terms {
            let u = term.y_inv.mul_vec(x)?;
            if !self.member(term, &u) {
                continue;
            }
            raw.push((&sign * &term.alpha_over_det, dot(&term.theta, x)));
        }
        Ok(ExpSum::new(raw))
    }
}

/// T(x|M) by the explicit formula
///
///   T(x|M) = (1/(n−s)!) Σ_Y α_Y·|det Y|^{−1}·(θ_Y·x)^{n−s}·χ_{cone(Y)}(x)
///
/// summed over invertible s-column subsets Y, with θ_Y = Y^{−T}c_Y and
/// α_Y = Π_{y∉Y} (θ_Y·y − c_y)^{−1}. The positive power (θ_Y·x)^{n−s} pins
/// the overall sign so that T(x|(1,1)) = x₊ under the defining fiber-volume
/// semantics; the hand-checked instances live in the sign-audit tests.
///
/// The result does not depend on which certified c is supplied. Points on
/// chamber walls are evaluated as one-sided limits along a fixed sampled
/// direction; where T is continuous (every wall with at least two columns
/// off its hyperplane, e.g. all systems built from half-space input) this
/// is the plain value of T.
#[allow(non_snake_case)]
pub fn eval_T_explicit(m: &DirectionMatrix, x: &[Rat], c: &GenericVector) -> Result<Rat> {
    let ev = Evaluator::build(m, c.entries(), None)?;
    ev.eval_t(x)
}

/// The exponentially weighted analog: Σ_Y α′_Y·|det Y|^{−1}·e^{−θ_Y·x} over
/// the subsets whose cone contains x, with α′_Y = Π_{y∉Y} (c_y − θ_Y·y)^{−1},
/// returned as an exact exponential sum. For x outside the cone the sum is
/// empty. Same wall convention as `eval_T_explicit`.
#[allow(non_snake_case)]
pub fn eval_E(m: &DirectionMatrix, x: &[Rat], c: &GenericVector) -> Result<ExpSum> {
    let ev = Evaluator::build(m, c.entries(), None)?;
    ev.eval_e(x)
}

/// Particular solution of `cols·λ = x` from left-to-right column-pivoted
/// elimination, non-pivot coordinates fixed to 0. Deterministic, so equal
/// column subsets always branch identically (maximizing memoization hits).
fn particular_solution(cols: &RatMatrix, x: &[Rat]) -> Option<Vec<Rat>> {
    let s = cols.rows();
    let k = cols.cols();
    let mut a: Vec<Vec<Rat>> = (0..s)
        .map(|i| {
            let mut row = cols.row(i).to_vec();
            row.push(x[i].clone());
            row
        })
        .collect();
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for col in 0..k {
        if r == s {
            break;
        }
        let Some(piv) = (r..s).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(r, piv);
        let p = a[r][col].clone();
        for v in a[r].iter_mut() {
            *v /= &p;
        }
        for i in 0..s {
            if i != r && !a[i][col].is_zero() {
                let f = a[i][col].clone();
                for j in 0..=k {
                    let t = &a[r][j] * &f;
                    a[i][j] -= t;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    for row in a.iter().take(s).skip(r) {
        if !row[k].is_zero() {
            return None; // x outside the column span
        }
    }
    let mut lambda = vec![Rat::zero(); k];
    for (i, &col) in pivots.iter().enumerate() {
        lambda[col] = a[i][k].clone();
    }
    Some(lambda)
}

/// T(x|M) by the column-removal recurrence
///
///   T(x|M) = (1/(n−s)) Σ_j λ_j · T(x|M∖m_j)   for any λ with Mλ = x,
///
/// memoized on column subsets. Base cases: n = s evaluates the simplicial
/// cone |det M|^{−1}·χ; n = s+1 delegates to the explicit formula with a
/// freshly sampled generic c. Sub-multisets that lose rank s have their
/// truncated power supported on a lower-dimensional set and contribute 0.
///
/// Fully deterministic (internal fixed seeds). Exactly equals
/// `eval_T_explicit` at interior points; on chamber walls both produce
/// one-sided limits, which agree wherever T is continuous.
#[allow(non_snake_case)]
pub fn eval_T_recurrence(m: &DirectionMatrix, x: &[Rat]) -> Result<Rat> {
    let s = m.dim();
    let n = m.ncols();
    if x.len() != s {
        return Err(Error::Dimension(format!(
            "point has {} coordinates, cone lives in dimension {s}",
            x.len()
        )));
    }
    let g = sample_perturbation(m.matrix(), PERTURBATION_SEED)?;
    let full: u64 = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut memo: HashMap<u64, Rat> = HashMap::new();
    recurrence_step(m, x, &g, full, &mut memo)
}

fn recurrence_step(
    m: &DirectionMatrix,
    x: &[Rat],
    g: &[Rat],
    mask: u64,
    memo: &mut HashMap<u64, Rat>,
) -> Result<Rat> {
    if let Some(v) = memo.get(&mask) {
        return Ok(v.clone());
    }
    let s = m.dim();
    let cols: Vec<usize> = (0..m.ncols()).filter(|j| mask >> j & 1 == 1).collect();
    let k = cols.len();
    let sub = m.matrix().column_submatrix(&cols);
    let value = if rank(&sub) < s {
        Rat::zero()
    } else if k == s {
        let u = solve(&sub, x)?;
        let member = if u.iter().any(|t| t.is_negative()) {
            false
        } else if u.iter().all(|t| t.is_positive()) {
            true
        } else {
            let v = solve(&sub, g)?;
            u.iter()
                .zip(&v)
                .all(|(ui, vi)| ui.is_positive() || vi.is_positive())
        };
        if member {
            let d = det(&sub)?;
            Rat::one() / if d.is_negative() { -d } else { d }
        } else {
            Rat::zero()
        }
    } else if k == s + 1 {
        let leaf = m.subset(&cols);
        let c = sample_generic_c(&leaf, LEAF_C_SEED ^ mask)?;
        let ev = Evaluator::build(&leaf, c.entries(), Some(g.to_vec()))?;
        ev.eval_t(x)?
    } else {
        let lambda = particular_solution(&sub, x)
            .expect("rank-checked column span must contain x's projection");
        let mut acc = Rat::zero();
        for (pos, &j) in cols.iter().enumerate() {
            if lambda[pos].is_zero() {
                continue;
            }
            let child = recurrence_step(m, x, g, mask & !(1u64 << j), memo)?;
            acc += &lambda[pos] * child;
        }
        acc / rat((k - s) as i64)
    };
    memo.insert(mask, value.clone());
    Ok(value)
}
