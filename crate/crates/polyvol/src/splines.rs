//! Box splines and hypercube slices.
//!
//! The box spline B(x|M) is the density of M·u for u uniform in the unit
//! cube; it equals the alternating sum of truncated powers over the 2^n
//! shifts of x by column sums,
//!
//!   B(x|M) = Σ_{ε ∈ {0,1}^n} (−1)^{|ε|} T(x − Mε | M),
//!
//! which is how it is evaluated here, sharing one precomputed evaluator
//! across all shifts. Volumes of affine slices of the unit cube are box
//! spline values up to the √det(AAᵀ) normalization, which yields exact
//! statements (and checks) for the classical facts about central sections.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{radical_normalize, rat, rat_to_f64, ratio, RadicalValue, Rat, RatMatrix};
use crate::tpower::{sample_generic_c, DirectionMatrix, Evaluator};

const SPLINE_C_SEED: u64 = 0x0bad_5eed_0005;

/// Cap on the number of columns in the alternating sum (2^n shift terms).
pub const SPLINE_COLUMN_CAP: usize = 20;

/// B(x|M) as an exact rational. Values at knot hyperplanes follow the same
/// one-sided limit convention as the truncated power, taken with a single
/// shared direction for all 2^n terms; in particular for n = s the result
/// is the half-open box indicator scaled by 1/|det M|, and shifted copies
/// tile space with no double counting.
pub fn eval_box_spline(m: &DirectionMatrix, x: &[Rat]) -> Result<Rat> {
    let n = m.ncols();
    if n > SPLINE_COLUMN_CAP {
        return Err(Error::Size(format!(
            "{n} columns exceed the box-spline cap of {SPLINE_COLUMN_CAP}"
        )));
    }
    let c = sample_generic_c(m, SPLINE_C_SEED)?;
    let ev = Evaluator::build(m, c.entries(), None)?;
    box_spline_with(&ev, m, x)
}

/// The alternating sum against a prebuilt evaluator (shared by callers that
/// evaluate at many points).
fn box_spline_with(ev: &Evaluator, m: &DirectionMatrix, x: &[Rat]) -> Result<Rat> {
    let s = m.dim();
    let n = m.ncols();
    if x.len() != s {
        return Err(Error::Dimension(format!(
            "point has {} coordinates, expected {s}",
            x.len()
        )));
    }
    let cols: Vec<Vec<Rat>> = (0..n).map(|j| m.matrix().col(j)).collect();
    let mut acc = Rat::zero();
    for bits in 0u32..(1u32 << n) {
        let mut point = x.to_vec();
        for (j, col) in cols.iter().enumerate() {
            if bits >> j & 1 == 1 {
                for (p, e) in point.iter_mut().zip(col) {
                    *p -= e;
                }
            }
        }
        let t = ev.eval_t(&point)?;
        if bits.count_ones() % 2 == 0 {
            acc += t;
        } else {
            acc -= t;
        }
    }
    Ok(acc)
}

/// An affine slice {x ∈ [0,1]^n : Ax = t} of the unit cube, prepared for
/// volume evaluation at arbitrary right-hand sides t.
///
/// Zero columns of A are dropped (the slice is a prism over those
/// coordinates with unit-length factors, so the volume is unchanged), and
/// for hyperplane slices the remaining signs are normalized to positive by
/// the reflection symmetry of the cube, shifting t accordingly.
#[derive(Debug, Clone)]
pub struct SliceSpec {
    dm: DirectionMatrix,
    shift: Vec<Rat>,
    gram: Rat,
    dropped: usize,
}

impl SliceSpec {
    pub fn new(directions: RatMatrix) -> Result<Self> {
        let s = directions.rows();
        let n = directions.cols();
        if s == 0 || n == 0 {
            return Err(Error::Dimension("empty direction matrix".into()));
        }
        let gram = crate::exact::gram_det(&directions)?;
        let kept: Vec<usize> = (0..n)
            .filter(|&j| !directions.col(j).iter().all(|e| e.is_zero()))
            .collect();
        let dropped = n - kept.len();
        let mut cols: Vec<Vec<Rat>> = kept.iter().map(|&j| directions.col(j)).collect();
        let mut shift = vec![Rat::zero(); s];
        if s == 1 {
            // Flipping x_j -> 1 - x_j negates column j and moves t by it:
            // use it to make every entry positive, so the column cone is
            // pointed regardless of the input signs.
            for col in cols.iter_mut() {
                if col[0].is_negative() {
                    col[0] = -col[0].clone();
                    shift[0] += &col[0];
                }
            }
        }
        let mat = RatMatrix::new(
            s,
            cols.len(),
            (0..s).flat_map(|r| cols.iter().map(move |c| c[r].clone())).collect(),
        )?;
        let dm = DirectionMatrix::new(mat)?;
        Ok(SliceSpec {
            dm,
            shift,
            gram,
            dropped,
        })
    }

    /// Codimension of the slice (number of direction rows).
    pub fn codim(&self) -> usize {
        self.dm.dim()
    }

    /// Number of zero columns that were dropped.
    pub fn dropped_columns(&self) -> usize {
        self.dropped
    }

    /// Euclidean (n−s)-volume of the slice at right-hand side t, as an
    /// exact rational multiple of √det(AAᵀ).
    pub fn volume_at(&self, t: &[Rat]) -> Result<RadicalValue> {
        if t.len() != self.dm.dim() {
            return Err(Error::Dimension(format!(
                "{} right-hand sides for codimension {}",
                t.len(),
                self.dm.dim()
            )));
        }
        let point: Vec<Rat> = t.iter().zip(&self.shift).map(|(a, b)| a + b).collect();
        let b = eval_box_spline(&self.dm, &point)?;
        radical_normalize(&b, &self.gram)
    }
}

/// Volume of the cube slice {x ∈ [0,1]^n : Ax = t}.
pub fn slice_volume(spec: &SliceSpec, t: &[Rat]) -> Result<RadicalValue> {
    spec.volume_at(t)
}

/// Volume of the central hyperplane section
/// {x ∈ [0,1]^n : Σ a_j x_j = Σ a_j / 2} with positive weights a (padded by
/// zero weights up to the ambient dimension n, which does not change the
/// value).
pub fn central_section_volume(a: &[Rat], n: usize) -> Result<RadicalValue> {
    if a.is_empty() {
        return Err(Error::Dimension("need at least one weight".into()));
    }
    if a.len() > n {
        return Err(Error::Dimension(format!(
            "{} weights exceed the ambient dimension {n}",
            a.len()
        )));
    }
    if a.iter().any(|w| !w.is_positive()) {
        return Err(Error::Domain("weights must be positive".into()));
    }
    let spec = SliceSpec::new(RatMatrix::new(1, a.len(), a.to_vec())?)?;
    let center: Rat = a.iter().sum::<Rat>() / rat(2);
    spec.volume_at(&[center])
}

/// The exact outcome of the central-section lower bound check for one
/// weight vector.
#[derive(Debug, Clone)]
pub struct GoodReport {
    pub weights: Vec<Rat>,
    /// Box-spline value at the center, B(Σa/2 | a).
    pub center_value: Rat,
    /// √(Σa²) · center_value, the section volume itself.
    pub section_volume: RadicalValue,
    /// Whether the section volume is ≥ 1, decided exactly by comparing
    /// center_value² · Σa² against 1.
    pub holds: bool,
    /// Whether equality holds exactly (the single-weight case).
    pub equality: bool,
}

/// Checks the central-section lower bound vol ≥ 1 for positive weights,
/// entirely in rational arithmetic (the radical is eliminated by squaring).
pub fn good_check(a: &[Rat]) -> Result<GoodReport> {
    if a.is_empty() {
        return Err(Error::Dimension("need at least one weight".into()));
    }
    if a.iter().any(|w| !w.is_positive()) {
        return Err(Error::Domain("weights must be positive".into()));
    }
    let spec = SliceSpec::new(RatMatrix::new(1, a.len(), a.to_vec())?)?;
    let center: Rat = a.iter().sum::<Rat>() / rat(2);
    let section_volume = spec.volume_at(&[center.clone()])?;
    let center_value = eval_box_spline(
        &DirectionMatrix::new(RatMatrix::new(1, a.len(), a.to_vec())?)?,
        &[center],
    )?;
    let sum_sq: Rat = a.iter().map(|w| w * w).sum();
    let squared = &center_value * &center_value * &sum_sq;
    Ok(GoodReport {
        weights: a.to_vec(),
        center_value,
        section_volume,
        holds: squared >= Rat::one(),
        equality: squared == Rat::one(),
    })
}

/// Numerical integrals of the section profile, with exact point evaluations
/// summed by the midpoint rule. C(t) = B(t + Σa/2 | a) is the profile
/// centered at the mean.
#[derive(Debug, Clone)]
pub struct MomentReport {
    pub grid: usize,
    /// Midpoint sum for ∫ C(t) dt; target 1.
    pub mass: Rat,
    /// Midpoint sum for ∫_{t>0} C(t) dt; target 1/2.
    pub half_mass: Rat,
    /// Midpoint sum for ∫_{t>0} t² C(t) dt; target Σa²/24.
    pub second_moment: Rat,
    pub second_moment_target: Rat,
    /// Largest |sum − target| / target across the three integrals.
    pub max_relative_deviation: f64,
}

/// Integrates the section profile of a positive weight vector by the
/// composite midpoint rule on a uniform rational grid of `grid` cells over
/// the support [0, Σa]. Point values and partial sums are exact; only the
/// final deviations are reported in floating point. The three targets
/// (total mass 1, positive-half mass 1/2, positive-half second moment
/// Σa²/24) pin down normalization, central symmetry, and spread.
pub fn box_moment_check(a: &[Rat], grid: usize) -> Result<MomentReport> {
    if a.is_empty() {
        return Err(Error::Dimension("need at least one weight".into()));
    }
    if a.iter().any(|w| !w.is_positive()) {
        return Err(Error::Domain("weights must be positive".into()));
    }
    if grid < 1000 {
        return Err(Error::Domain(
            "grid too coarse for the stated tolerances; use at least 1000 cells".into(),
        ));
    }
    let n = a.len();
    if n > SPLINE_COLUMN_CAP {
        return Err(Error::Size(format!(
            "{n} weights exceed the box-spline cap of {SPLINE_COLUMN_CAP}"
        )));
    }
    let m = DirectionMatrix::new(RatMatrix::new(1, a.len(), a.to_vec())?)?;
    let c = sample_generic_c(&m, SPLINE_C_SEED)?;
    let ev = Evaluator::build(&m, c.entries(), None)?;
    // Precompute the 2^n alternating-sum offsets:
    // B(x) = Σ_ε sign(ε) T(x − Σ_{j∈ε} a_j).
    let mut offsets = Vec::with_capacity(1 << n);
    for bits in 0u32..(1u32 << n) {
        let mut off = Rat::zero();
        for (j, w) in a.iter().enumerate() {
            if bits >> j & 1 == 1 {
                off -= w;
            }
        }
        offsets.push((off, bits.count_ones() % 2 == 0));
    }
    let support: Rat = a.iter().sum();
    let center = &support / rat(2);
    let delta = &support / rat(grid as i64);
    let mut mass = Rat::zero();
    let mut half_mass = Rat::zero();
    let mut second = Rat::zero();
    for i in 0..grid {
        let x = ratio(2 * i as i64 + 1, 2) * &delta;
        let mut value = Rat::zero();
        for (off, positive) in &offsets {
            let arg = &x + off;
            let v = ev.eval_t(std::slice::from_ref(&arg))?;
            if *positive {
                value += v;
            } else {
                value -= v;
            }
        }
        if value.is_zero() {
            continue;
        }
        mass += &value;
        let t = &x - &center;
        if t.is_positive() {
            half_mass += &value;
            second += &t * &t * &value;
        }
    }
    mass *= &delta;
    half_mass *= &delta;
    second *= &delta;
    let sum_sq: Rat = a.iter().map(|w| w * w).sum();
    let second_target = &sum_sq / rat(24);
    let rel = |value: &Rat, target: &Rat| -> f64 {
        rat_to_f64(&((value - target) / target)).abs()
    };
    let max_relative_deviation = rel(&mass, &Rat::one())
        .max(rel(&half_mass, &ratio(1, 2)))
        .max(rel(&second, &second_target));
    Ok(MomentReport {
        grid,
        mass,
        half_mass,
        second_moment: second,
        second_moment_target: second_target,
        max_relative_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dm(rows: &[&[i64]]) -> DirectionMatrix {
        DirectionMatrix::new(RatMatrix::from_i64_rows(rows)).unwrap()
    }

    #[test]
    fn box_spline_known_values() {
        // Hat function of (1,1): peak value 1 at x = 1.
        let m = dm(&[&[1, 1]]);
        assert_eq!(eval_box_spline(&m, &[rat(1)]).unwrap(), rat(1));
        assert_eq!(eval_box_spline(&m, &[ratio(1, 2)]).unwrap(), ratio(1, 2));
        assert_eq!(eval_box_spline(&m, &[rat(3)]).unwrap(), rat(0));
        // Quadratic spline of (1,1,1) at its center 3/2.
        let m = dm(&[&[1, 1, 1]]);
        assert_eq!(eval_box_spline(&m, &[ratio(3, 2)]).unwrap(), ratio(3, 4));
        // n = s: half-open unit square indicator.
        let i2 = dm(&[&[1, 0], &[0, 1]]);
        assert_eq!(eval_box_spline(&i2, &[ratio(1, 2), ratio(1, 2)]).unwrap(), rat(1));
        assert_eq!(eval_box_spline(&i2, &[rat(0), rat(0)]).unwrap(), rat(1));
        assert_eq!(eval_box_spline(&i2, &[rat(1), ratio(1, 2)]).unwrap(), rat(0));
    }

    #[test]
    fn integer_shifts_partition_unity() {
        // Σ_k B(x − k) = 1 for both a smooth case and the half-open box,
        // including evaluation right on the knots.
        let hat = dm(&[&[1, 1]]);
        for x in [ratio(3, 7), rat(1), ratio(29, 11), rat(0)] {
            let mut total = Rat::zero();
            for k in -1..=3 {
                total += eval_box_spline(&hat, &[&x - rat(k)]).unwrap();
            }
            assert_eq!(total, rat(1), "x = {x}");
        }
        let i2 = dm(&[&[1, 0], &[0, 1]]);
        for (x, y) in [(ratio(3, 7), ratio(1, 2)), (rat(1), ratio(1, 2)), (rat(0), rat(0))] {
            let mut total = Rat::zero();
            for kx in -1..=1 {
                for ky in -1..=1 {
                    total +=
                        eval_box_spline(&i2, &[&x - rat(kx), &y - rat(ky)]).unwrap();
                }
            }
            assert_eq!(total, rat(1));
        }
    }

    #[test]
    fn box_spline_is_centrally_symmetric() {
        // B(center + t) = B(center − t) away from the knots.
        let m = dm(&[&[1, 2, 3]]);
        let center = rat(3);
        for num in [1i64, 2, 5, 9, 13] {
            let t = ratio(num, 7);
            let plus = eval_box_spline(&m, &[&center + &t]).unwrap();
            let minus = eval_box_spline(&m, &[&center - &t]).unwrap();
            assert_eq!(plus, minus, "t = {t}");
        }
    }

    #[test]
    fn slice_volumes_of_the_cube() {
        // Diagonal slice of the unit square at its center: length √2.
        let spec = SliceSpec::new(RatMatrix::from_i64_rows(&[&[1, 1]])).unwrap();
        let v = spec.volume_at(&[rat(1)]).unwrap();
        assert_eq!(v.coeff, rat(1));
        assert_eq!(v.radicand, BigInt::from(2));

        // Central diagonal slice of the cube: area (3/4)√3.
        let spec = SliceSpec::new(RatMatrix::from_i64_rows(&[&[1, 1, 1]])).unwrap();
        let v = spec.volume_at(&[ratio(3, 2)]).unwrap();
        assert_eq!(v.coeff, ratio(3, 4));
        assert_eq!(v.radicand, BigInt::from(3));
        assert!((v.to_f64() - 1.299038105676658).abs() < 1e-12);

        // Axis-aligned slice: a unit square of area 1; the zero columns are
        // dropped and contribute unit factors.
        let spec = SliceSpec::new(RatMatrix::from_i64_rows(&[&[1, 0, 0]])).unwrap();
        assert_eq!(spec.dropped_columns(), 2);
        let v = spec.volume_at(&[ratio(1, 2)]).unwrap();
        assert_eq!(v.coeff, rat(1));
        assert!(v.is_rational());
    }

    #[test]
    fn mixed_sign_hyperplane_slices_use_cube_symmetry() {
        // {x ∈ [0,1]² : x₁ − x₂ = 0} is the main diagonal, length √2; the
        // negative entry is handled by reflecting that coordinate.
        let spec = SliceSpec::new(RatMatrix::from_i64_rows(&[&[1, -1]])).unwrap();
        let v = spec.volume_at(&[rat(0)]).unwrap();
        assert_eq!(v.coeff, rat(1));
        assert_eq!(v.radicand, BigInt::from(2));
        // And a shifted one: {x₁ − x₂ = 1/2} has length √2/2.
        let v = spec.volume_at(&[ratio(1, 2)]).unwrap();
        assert_eq!(v.coeff, ratio(1, 2));
        assert_eq!(v.radicand, BigInt::from(2));
    }

    #[test]
    fn central_sections_match_slices() {
        let a = vec![rat(1), rat(2), rat(3)];
        let central = central_section_volume(&a, 3).unwrap();
        let spec = SliceSpec::new(RatMatrix::new(1, 3, a.clone()).unwrap()).unwrap();
        let sliced = spec.volume_at(&[rat(3)]).unwrap();
        assert_eq!(central.coeff, sliced.coeff);
        assert_eq!(central.radicand, sliced.radicand);
        // Padding with ambient zeros changes nothing.
        let padded = central_section_volume(&a, 6).unwrap();
        assert_eq!(padded.coeff, central.coeff);
        assert_eq!(padded.radicand, central.radicand);
        assert!(central_section_volume(&a, 2).is_err());
        assert!(central_section_volume(&[rat(-1)], 1).is_err());
    }

    #[test]
    fn center_bound_examples() {
        // Single weight: the section is a unit cube face, volume exactly 1.
        let r = good_check(&[ratio(5, 2)]).unwrap();
        assert!(r.holds && r.equality);
        // The diagonal of the square: √2 · (1/√2... ) gives volume > 1.
        let r = good_check(&[rat(1), rat(1)]).unwrap();
        assert!(r.holds && !r.equality);
        assert_eq!(r.center_value, rat(1));
        // A lopsided example.
        let r = good_check(&[rat(1), rat(2), rat(3)]).unwrap();
        assert!(r.holds && !r.equality);
    }

    #[test]
    fn center_is_the_maximum_among_probes() {
        let a = vec![rat(1), rat(2), rat(3)];
        let m = DirectionMatrix::new(RatMatrix::new(1, 3, a.clone()).unwrap()).unwrap();
        let center = rat(3);
        let peak = eval_box_spline(&m, &[center.clone()]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..60 {
            let t = ratio(rng.gen_range(0..=60), 10);
            let v = eval_box_spline(&m, &[t]).unwrap();
            assert!(v <= peak);
        }
    }

    #[test]
    fn moment_sums_hit_their_targets() {
        // Single weight: the profile is a box; midpoint sums are exact for
        // both masses and very accurate for the second moment.
        let r = box_moment_check(&[rat(1)], 2000).unwrap();
        assert_eq!(r.mass, rat(1));
        assert_eq!(r.half_mass, ratio(1, 2));
        assert_eq!(r.second_moment_target, ratio(1, 24));
        assert!(r.max_relative_deviation < 1e-6, "{}", r.max_relative_deviation);

        let r = box_moment_check(&[rat(1), rat(2)], 2000).unwrap();
        assert_eq!(r.second_moment_target, ratio(5, 24));
        assert!(r.max_relative_deviation < 1e-5, "{}", r.max_relative_deviation);

        assert!(box_moment_check(&[rat(1)], 10).is_err());
    }
}
