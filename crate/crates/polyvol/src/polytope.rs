//! Polytopes from linear inequalities, and four independent exact volume
//! algorithms for them:
//!
//!  * evaluation of the truncated power at the right-hand side, by the
//!    explicit formula or by the column recurrence (needs x ≥ 0 form),
//!  * exact variable elimination driven by the divergence theorem,
//!  * a vertex-cone sum over an enumerated vertex representation.
//!
//! All four produce identical rationals on their common domain, which is the
//! backbone of the crate's cross-validation story.

use std::collections::HashSet;

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exact::{
    det, dot, factorial, gram_det, invert, kernel_basis, maximal_minor_gcd, radical_normalize,
    rank, rat, solve, RadicalValue, Rat, RatMatrix,
};
use crate::tpower::{
    classify_point, eval_T_explicit, eval_T_recurrence, sample_generic_c, DirectionMatrix,
    PointClassification,
};

const MAX_SAMPLING_ATTEMPTS: u64 = 64;
const FIBER_C_SEED: u64 = 0x0bad_5eed_0003;

/// The region {x ∈ ℝ^d : Ax ≤ b}, intersected with the nonnegative orthant
/// when `nonneg` is set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HPolytope {
    a: RatMatrix,
    b: Vec<Rat>,
    nonneg: bool,
}

impl HPolytope {
    pub fn new(a: RatMatrix, b: Vec<Rat>, nonneg: bool) -> Result<Self> {
        if a.rows() != b.len() {
            return Err(Error::Dimension(format!(
                "{} constraint rows but {} right-hand sides",
                a.rows(),
                b.len()
            )));
        }
        if a.rows() == 0 || a.cols() == 0 {
            return Err(Error::Dimension("need at least one row and one column".into()));
        }
        for i in 0..a.rows() {
            if a.row(i).iter().all(|e| e.is_zero()) {
                return Err(Error::Domain(format!("constraint row {i} is zero")));
            }
        }
        Ok(HPolytope { a, b, nonneg })
    }

    pub fn dim(&self) -> usize {
        self.a.cols()
    }

    pub fn a(&self) -> &RatMatrix {
        &self.a
    }

    pub fn b(&self) -> &[Rat] {
        &self.b
    }

    pub fn nonneg(&self) -> bool {
        self.nonneg
    }

    /// The full inequality list with the orthant constraints written out:
    /// rows of A with their right-hand sides, then −x_j ≤ 0 when `nonneg`.
    pub fn materialized_rows(&self) -> (Vec<Vec<Rat>>, Vec<Rat>) {
        let d = self.dim();
        let mut rows: Vec<Vec<Rat>> = (0..self.a.rows()).map(|i| self.a.row(i).to_vec()).collect();
        let mut rhs = self.b.clone();
        if self.nonneg {
            for j in 0..d {
                let mut r = vec![Rat::zero(); d];
                r[j] = rat(-1);
                rows.push(r);
                rhs.push(Rat::zero());
            }
        }
        (rows, rhs)
    }
}

/// Scales a nonzero rational vector to a primitive integer vector pointing
/// the same way, returning the positive scale factor applied.
fn primitive_integer(v: &[Rat]) -> Result<(Vec<BigInt>, Rat)> {
    let mut l = BigInt::one();
    for r in v {
        l = l.lcm(r.denom());
    }
    let ints: Vec<BigInt> = v.iter().map(|r| r.numer() * (&l / r.denom())).collect();
    let mut g = BigInt::zero();
    for i in &ints {
        g = g.gcd(i);
    }
    if g.is_zero() {
        return Err(Error::Domain("cannot primitivize the zero vector".into()));
    }
    let scale = Rat::new(l, g.clone());
    Ok((ints.iter().map(|i| i / &g).collect(), scale))
}

/// Primitivizes every row (scaling its right-hand side along) and drops
/// exact duplicates, preserving first-seen order. Zero rows must have been
/// handled by the caller.
fn canonical_rows(rows: &[Vec<Rat>], rhs: &[Rat]) -> Result<Vec<(Vec<Rat>, Rat)>> {
    let mut seen: HashSet<(Vec<BigInt>, Rat)> = HashSet::new();
    let mut out = Vec::new();
    for (row, b) in rows.iter().zip(rhs) {
        let (ints, scale) = primitive_integer(row)?;
        let nb = b * &scale;
        if seen.insert((ints.clone(), nb.clone())) {
            out.push((
                ints.into_iter().map(Rat::from_integer).collect::<Vec<Rat>>(),
                nb,
            ));
        }
    }
    Ok(out)
}

/// Proves that {x : Ax ≤ b, maybe x ≥ 0} has empty recession cone, i.e. is
/// bounded whatever b is. The recession cone {y : A'y ≤ 0} (A' = all
/// materialized rows) is nontrivial iff it contains a line (a kernel vector
/// of A') or an extreme ray, and every extreme ray direction is the kernel
/// generator of d−1 linearly independent tight rows. Both families are
/// enumerated exhaustively.
pub fn certify_bounded(h: &HPolytope) -> Result<()> {
    let d = h.dim();
    let (rows, _) = h.materialized_rows();
    let a = RatMatrix::from_rows(rows.clone())?;
    if rank(&a) < d {
        return Err(Error::Unbounded(
            "constraint normals do not span the space; the recession cone contains a line".into(),
        ));
    }
    if d == 1 {
        let pos = rows.iter().any(|r| r[0].is_positive());
        let neg = rows.iter().any(|r| r[0].is_negative());
        if pos && neg {
            return Ok(());
        }
        return Err(Error::Unbounded("no two-sided bound in dimension 1".into()));
    }
    for sub in (0..rows.len()).combinations(d - 1) {
        let m = RatMatrix::from_rows(sub.iter().map(|&i| rows[i].clone()).collect())?;
        let kernel = kernel_basis(&m);
        if kernel.len() != 1 {
            continue;
        }
        let g = &kernel[0];
        for dir in [1i64, -1] {
            let ray: Vec<Rat> = g.iter().map(|t| t * rat(dir)).collect();
            if rows.iter().all(|r| !dot(r, &ray).is_positive()) {
                return Err(Error::Unbounded(format!(
                    "recession direction found: {:?}",
                    ray.iter().map(crate::exact::format_rat).collect::<Vec<_>>()
                )));
            }
        }
    }
    Ok(())
}

/// A vertex of a simple polytope: its location plus the primitive integer
/// generators of its tangent cone (one per tight facet, each generator
/// leaving exactly one of the d tight constraints).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexData {
    pub point: Vec<Rat>,
    pub generators: Vec<Vec<BigInt>>,
}

/// Vertex representation of a simple full-dimensional polytope.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VPolytope {
    dim: usize,
    vertices: Vec<VertexData>,
}

impl VPolytope {
    pub fn new(dim: usize, vertices: Vec<VertexData>) -> Result<Self> {
        if dim == 0 || vertices.is_empty() {
            return Err(Error::Dimension("need a positive dimension and at least one vertex".into()));
        }
        for (i, v) in vertices.iter().enumerate() {
            if v.point.len() != dim || v.generators.len() != dim {
                return Err(Error::Dimension(format!(
                    "vertex {i} does not have {dim} coordinates and {dim} generators"
                )));
            }
            let g = RatMatrix::new(
                dim,
                dim,
                (0..dim)
                    .flat_map(|r| v.generators.iter().map(move |col| Rat::from_integer(col[r].clone())))
                    .collect(),
            )?;
            if det(&g)?.is_zero() {
                return Err(Error::Degenerate(format!(
                    "tangent cone generators at vertex {i} are linearly dependent"
                )));
            }
        }
        Ok(VPolytope { dim, vertices })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[VertexData] {
        &self.vertices
    }
}

/// Enumerates the vertices of a bounded simple full-dimensional polytope by
/// solving every d-subset of the (deduplicated) constraint rows, keeping the
/// feasible solutions. A feasible point with more than d tight constraints
/// is reported as a degeneracy, since the vertex-cone volume formula assumes
/// simple cones.
pub fn enumerate_vertices(h: &HPolytope) -> Result<VPolytope> {
    let d = h.dim();
    certify_bounded(h)?;
    let (raw_rows, raw_rhs) = h.materialized_rows();
    let canon = canonical_rows(&raw_rows, &raw_rhs)?;
    let rows: Vec<Vec<Rat>> = canon.iter().map(|(r, _)| r.clone()).collect();
    let rhs: Vec<Rat> = canon.iter().map(|(_, b)| b.clone()).collect();
    let mut vertices = Vec::new();
    for sub in (0..rows.len()).combinations(d) {
        let mat = RatMatrix::from_rows(sub.iter().map(|&i| rows[i].clone()).collect())?;
        let b_sub: Vec<Rat> = sub.iter().map(|&i| rhs[i].clone()).collect();
        let point = match solve(&mat, &b_sub) {
            Ok(p) => p,
            Err(Error::Singular(_)) => continue,
            Err(e) => return Err(e),
        };
        let mut tight = 0usize;
        let mut feasible = true;
        for (row, b) in rows.iter().zip(&rhs) {
            let lhs = dot(row, &point);
            if lhs == *b {
                tight += 1;
            } else if lhs > *b {
                feasible = false;
                break;
            }
        }
        if !feasible {
            continue;
        }
        if tight != d {
            return Err(Error::Degenerate(format!(
                "vertex ({}) lies on {tight} facets, expected {d}; the polytope is not simple",
                point
                    .iter()
                    .map(crate::exact::format_rat)
                    .collect::<Vec<_>>()
                    .join(", ")
            )));
        }
        // A simple vertex arises from exactly one subset (its tight set),
        // so no dedup across subsets is needed.
        let w_inv = invert(&mat)?;
        let mut generators = Vec::with_capacity(d);
        for k in 0..d {
            let col: Vec<Rat> = w_inv.col(k).iter().map(|t| -t).collect();
            let (g, _) = primitive_integer(&col)?;
            generators.push(g);
        }
        vertices.push(VertexData { point, generators });
    }
    if vertices.is_empty() {
        return Err(Error::Degenerate(
            "no vertices found; the polytope is empty or not full-dimensional".into(),
        ));
    }
    // Affine span check: a full-dimensional polytope has vertices spanning d.
    if vertices.len() < d + 1 {
        return Err(Error::Degenerate("not full-dimensional".into()));
    }
    let base = vertices[0].point.clone();
    let diffs: Vec<Vec<Rat>> = vertices[1..]
        .iter()
        .map(|v| v.point.iter().zip(&base).map(|(p, q)| p - q).collect())
        .collect();
    if rank(&RatMatrix::from_rows(diffs)?) < d {
        return Err(Error::Degenerate("not full-dimensional".into()));
    }
    VPolytope::new(d, vertices)
}

/// Volume by the vertex-cone sum
///
///   vol = ((−1)^d / d!) Σ_v (v·c)^d · |det G_v| / Π_k (g_{v,k}·c)
///
/// over the vertices, where G_v collects the tangent-cone generators of v.
/// Any c with g·c ≠ 0 for every generator gives the same value; c is sampled
/// deterministically from `seed` and resampled until that condition holds.
pub fn brion_volume(p: &VPolytope, seed: u64) -> Result<Rat> {
    let d = p.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    'attempt: for attempt in 1..=MAX_SAMPLING_ATTEMPTS {
        let hi = (8 * attempt).max(d as u64);
        let mut seen = HashSet::new();
        let mut c: Vec<Rat> = Vec::with_capacity(d);
        while c.len() < d {
            let v = rng.gen_range(1..=hi);
            if seen.insert(v) {
                c.push(rat(v as i64));
            }
        }
        for v in p.vertices() {
            for g in &v.generators {
                let gr: Vec<Rat> = g.iter().cloned().map(Rat::from_integer).collect();
                if dot(&gr, &c).is_zero() {
                    continue 'attempt;
                }
            }
        }
        let mut acc = Rat::zero();
        for v in p.vertices() {
            let gmat = RatMatrix::new(
                d,
                d,
                (0..d)
                    .flat_map(|r| v.generators.iter().map(move |col| Rat::from_integer(col[r].clone())))
                    .collect(),
            )?;
            let gdet = det(&gmat)?;
            let mut den = Rat::one();
            for g in &v.generators {
                let gr: Vec<Rat> = g.iter().cloned().map(Rat::from_integer).collect();
                den *= dot(&gr, &c);
            }
            let vc = dot(&v.point, &c);
            acc += crate::exact::rat_pow(&vc, d) * Rat::from_integer(gdet.numer().abs()) / den;
        }
        let sign = if d % 2 == 1 { -Rat::one() } else { Rat::one() };
        return Ok(acc * sign / Rat::from_integer(factorial(d)));
    }
    Err(Error::Certificate(
        "exhausted attempts sampling a direction for the vertex-cone sum".into(),
    ))
}

/// Which end of a constraint row to eliminate first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PivotRule {
    FirstNonzero,
    LastNonzero,
}

/// Volume by exact recursive variable elimination: the divergence theorem
/// gives d·vol(D) = Σ_i b_i·vol_{d−1}(F_i)/‖a_i‖ over facets F_i, and each
/// facet volume is computed by eliminating one variable with the tight
/// constraint, which cancels the ‖a_i‖ against the projection Jacobian,
/// leaving the all-rational factor b_i/|a_{i,j}|.
pub fn lasserre_volume(h: &HPolytope) -> Result<Rat> {
    lasserre_volume_with_pivot(h, PivotRule::FirstNonzero)
}

/// Same recursion with a configurable pivot choice; the result is provably
/// independent of the rule, which the tests exercise.
pub fn lasserre_volume_with_pivot(h: &HPolytope, rule: PivotRule) -> Result<Rat> {
    certify_bounded(h)?;
    let (rows, rhs) = h.materialized_rows();
    let system: Vec<(Vec<Rat>, Rat)> = rows.into_iter().zip(rhs).collect();
    elimination_step(system, h.dim(), rule)
}

fn elimination_step(system: Vec<(Vec<Rat>, Rat)>, d: usize, rule: PivotRule) -> Result<Rat> {
    // Split off zero rows: 0·x ≤ b is vacuous for b ≥ 0 and infeasible else.
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for (a, b) in system {
        if a.iter().all(|t| t.is_zero()) {
            if b.is_negative() {
                return Ok(Rat::zero());
            }
            continue;
        }
        rows.push(a);
        rhs.push(b);
    }
    if rows.is_empty() {
        return Err(Error::Unbounded(
            "no constraints left during elimination".into(),
        ));
    }
    let canon = canonical_rows(&rows, &rhs)?;
    if d == 1 {
        let mut ub: Option<Rat> = None;
        let mut lb: Option<Rat> = None;
        for (a, b) in &canon {
            let bound = b / &a[0];
            if a[0].is_positive() {
                ub = Some(match ub {
                    Some(u) if u <= bound => u,
                    _ => bound,
                });
            } else {
                lb = Some(match lb {
                    Some(l) if l >= bound => l,
                    _ => bound,
                });
            }
        }
        return match (lb, ub) {
            (Some(l), Some(u)) => Ok(if u > l { u - l } else { Rat::zero() }),
            _ => Err(Error::Unbounded("missing a one-dimensional bound".into())),
        };
    }
    let mut total = Rat::zero();
    for (i, (a_i, b_i)) in canon.iter().enumerate() {
        if b_i.is_zero() {
            continue; // weighted by b_i, so the term vanishes
        }
        let j = match rule {
            PivotRule::FirstNonzero => a_i.iter().position(|t| !t.is_zero()).unwrap(),
            PivotRule::LastNonzero => a_i.iter().rposition(|t| !t.is_zero()).unwrap(),
        };
        let piv = a_i[j].clone();
        // Substitute x_j = (b_i − Σ_{l≠j} a_i[l]·x_l) / a_i[j] into the rest.
        let mut sub_system = Vec::with_capacity(canon.len() - 1);
        for (k, (a_k, b_k)) in canon.iter().enumerate() {
            if k == i {
                continue;
            }
            let f = &a_k[j] / &piv;
            let new_row: Vec<Rat> = (0..a_k.len())
                .filter(|&l| l != j)
                .map(|l| &a_k[l] - &f * &a_i[l])
                .collect();
            let new_b = b_k - &f * b_i;
            sub_system.push((new_row, new_b));
        }
        let face = elimination_step(sub_system, d - 1, rule)?;
        if !face.is_zero() {
            let abs_piv = if piv.is_negative() { -piv } else { piv };
            total += b_i / abs_piv * face;
        }
    }
    Ok(total / rat(d as i64))
}

/// Builds the direction system of an x ≥ 0 polytope: rows of A are scaled to
/// integers (clearing denominators only; common factors are kept so caller
/// supplied generic vectors certify against the stated rows), the identity
/// block for the slack variables is appended, and b is scaled along. The
/// polytope volume is the truncated power of that system at the returned
/// right-hand side.
pub fn hrep_direction_system(h: &HPolytope) -> Result<(DirectionMatrix, Vec<Rat>)> {
    if !h.nonneg() {
        return Err(Error::Domain(
            "the truncated-power route needs the x >= 0 form".into(),
        ));
    }
    let m = h.a().rows();
    let d = h.dim();
    let mut rows: Vec<Vec<Rat>> = Vec::with_capacity(m);
    let mut rhs: Vec<Rat> = Vec::with_capacity(m);
    for i in 0..m {
        let row = h.a().row(i);
        let mut l = BigInt::one();
        for r in row {
            l = l.lcm(r.denom());
        }
        let scale = Rat::from_integer(l);
        rows.push(row.iter().map(|r| r * &scale).collect());
        rhs.push(&h.b()[i] * &scale);
    }
    let mut entries = Vec::with_capacity(m * (d + m));
    for (i, row) in rows.iter().enumerate() {
        entries.extend(row.iter().cloned());
        for k in 0..m {
            entries.push(if k == i { Rat::one() } else { Rat::zero() });
        }
    }
    let mat = RatMatrix::new(m, d + m, entries)?;
    // The slack identity block gives full row rank for free; pointedness of
    // the column cone is exactly boundedness of the polytope family.
    let dm = DirectionMatrix::new(mat).map_err(|e| match e {
        Error::Domain(_) => Error::Unbounded(
            "the polytope is unbounded (its direction cone is not pointed)".into(),
        ),
        other => other,
    })?;
    Ok((dm, rhs))
}

/// Volume of an x ≥ 0 polytope as the truncated power of its direction
/// system evaluated at the right-hand side, with a seeded generic vector.
#[allow(non_snake_case)]
pub fn volume_via_T(h: &HPolytope, seed: u64) -> Result<Rat> {
    let (m, b) = hrep_direction_system(h)?;
    let c = sample_generic_c(&m, seed)?;
    eval_T_explicit(&m, &b, &c)
}

/// Volume of the fiber {u ≥ 0 : Mu = x} normalized to the lattice of the
/// affine slice: Euclidean volume divided by the covolume of ℤ^n ∩ ker M.
/// For integer M that covolume is √det(MMᵀ) divided by the gcd of the
/// maximal minors, so the result is the exact rational T(x|M)·gcd.
pub fn relative_volume(m: &DirectionMatrix, x: &[Rat]) -> Result<Rat> {
    let g = maximal_minor_gcd(m.matrix())?;
    let c = sample_generic_c(m, FIBER_C_SEED)?;
    Ok(eval_T_explicit(m, x, &c)? * Rat::from_integer(g))
}

/// Euclidean volume of the fiber {u ≥ 0 : Mu = x}: the truncated power
/// carries a 1/√det(MMᵀ) normalization, so the Euclidean value is
/// T(x|M)·√det(MMᵀ), returned with the radical part kept exact.
pub fn euclidean_fiber_volume(m: &DirectionMatrix, x: &[Rat]) -> Result<RadicalValue> {
    let gram = gram_det(m.matrix())?;
    let c = sample_generic_c(m, FIBER_C_SEED)?;
    let t = eval_T_explicit(m, x, &c)?;
    radical_normalize(&t, &gram)
}

/// The four exact volume algorithms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VolumeMethod {
    /// Truncated power at b by the explicit subset formula (x ≥ 0 form only).
    Explicit,
    /// Truncated power at b by the column recurrence (x ≥ 0 form only).
    Recurrence,
    /// Recursive exact variable elimination.
    Lasserre,
    /// Vertex-cone sum over the enumerated vertices.
    Brion,
}

impl VolumeMethod {
    pub fn name(&self) -> &'static str {
        match self {
            VolumeMethod::Explicit => "explicit",
            VolumeMethod::Recurrence => "recurrence",
            VolumeMethod::Lasserre => "lasserre",
            VolumeMethod::Brion => "brion",
        }
    }
}

/// A computed volume with its provenance and any evaluation caveats.
#[derive(Debug, Clone)]
pub struct VolumeReport {
    pub method: &'static str,
    pub value: RadicalValue,
    pub diagnostics: Vec<String>,
}

/// Runs one volume method and wraps the result. For the truncated-power
/// methods a diagnostic is attached when b sits on a chamber wall of the
/// direction system (the value is then the continuous extension, which for
/// these systems equals the volume).
pub fn volume_report(h: &HPolytope, method: VolumeMethod, seed: u64) -> Result<VolumeReport> {
    let mut diagnostics = Vec::new();
    let value = match method {
        VolumeMethod::Explicit | VolumeMethod::Recurrence => {
            let (m, b) = hrep_direction_system(h)?;
            if classify_point(&m, &b)? == PointClassification::Boundary {
                diagnostics.push(
                    "right-hand side lies on a chamber wall of the direction system; \
                     the value is the continuous extension"
                        .into(),
                );
            }
            match method {
                VolumeMethod::Explicit => {
                    let c = sample_generic_c(&m, seed)?;
                    eval_T_explicit(&m, &b, &c)?
                }
                _ => eval_T_recurrence(&m, &b)?,
            }
        }
        VolumeMethod::Lasserre => lasserre_volume(h)?,
        VolumeMethod::Brion => {
            let v = enumerate_vertices(h)?;
            brion_volume(&v, seed)?
        }
    };
    Ok(VolumeReport {
        method: method.name(),
        value: RadicalValue::rational(value),
        diagnostics,
    })
}
