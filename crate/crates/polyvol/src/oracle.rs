//! Monte Carlo reference estimates. Everything here is deliberately
//! floating-point and statistically noisy; the exact algorithms are checked
//! against these estimates within a few standard errors, never the other
//! way around.

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exact::{factorial, rat_to_f64, solve, Rat, RatMatrix};
use crate::integrate::{ExponentVector, Polynomial};
use crate::polytope::{certify_bounded, HPolytope};

/// One rejection-sampling run: the estimate, its standard error, and the
/// inputs needed to reproduce it bit for bit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
}

/// All basic feasible points (solutions of d tight constraints that satisfy
/// the rest). Their coordinate-wise min and max bound the polytope, with no
/// simplicity requirement.
fn basic_feasible_points(h: &HPolytope) -> Result<Vec<Vec<Rat>>> {
    let d = h.dim();
    let (rows, rhs) = h.materialized_rows();
    let mut points = Vec::new();
    for sub in (0..rows.len()).combinations(d) {
        let mat = RatMatrix::from_rows(sub.iter().map(|&i| rows[i].clone()).collect())?;
        let b_sub: Vec<Rat> = sub.iter().map(|&i| rhs[i].clone()).collect();
        let point = match solve(&mat, &b_sub) {
            Ok(p) => p,
            Err(Error::Singular(_)) => continue,
            Err(e) => return Err(e),
        };
        if rows.iter().zip(&rhs).all(|(a, b)| {
            a.iter()
                .zip(&point)
                .map(|(ai, xi)| ai * xi)
                .sum::<Rat>()
                <= *b
        }) {
            points.push(point);
        }
    }
    Ok(points)
}

struct SampleBox {
    lo: Vec<f64>,
    hi: Vec<f64>,
    volume: f64,
    rows: Vec<(Vec<f64>, f64)>,
}

fn sampling_box(h: &HPolytope) -> Result<Option<SampleBox>> {
    certify_bounded(h)?;
    let points = basic_feasible_points(h)?;
    if points.is_empty() {
        return Ok(None);
    }
    let d = h.dim();
    let mut lo_r = points[0].clone();
    let mut hi_r = points[0].clone();
    for p in &points[1..] {
        for j in 0..d {
            if p[j] < lo_r[j] {
                lo_r[j] = p[j].clone();
            }
            if p[j] > hi_r[j] {
                hi_r[j] = p[j].clone();
            }
        }
    }
    let lo: Vec<f64> = lo_r.iter().map(rat_to_f64).collect();
    let hi: Vec<f64> = hi_r.iter().map(rat_to_f64).collect();
    let volume: f64 = lo.iter().zip(&hi).map(|(l, u)| u - l).product();
    let (rows, rhs) = h.materialized_rows();
    let rows = rows
        .iter()
        .zip(&rhs)
        .map(|(a, b)| (a.iter().map(rat_to_f64).collect(), rat_to_f64(b)))
        .collect();
    Ok(Some(SampleBox {
        lo,
        hi,
        volume,
        rows,
    }))
}

fn inside(rows: &[(Vec<f64>, f64)], x: &[f64]) -> bool {
    rows.iter().all(|(a, b)| {
        a.iter().zip(x).map(|(ai, xi)| ai * xi).sum::<f64>() <= *b
    })
}

/// Volume estimate by uniform rejection sampling in the exact bounding box
/// of the polytope. The standard error is the binomial one for the hit
/// count, scaled by the box volume.
pub fn mc_volume(h: &HPolytope, samples: u64, seed: u64) -> Result<McEstimate> {
    if samples == 0 {
        return Err(Error::Domain("need at least one sample".into()));
    }
    let Some(sbox) = sampling_box(h)? else {
        return Ok(McEstimate {
            mean: 0.0,
            std_error: 0.0,
            samples,
            seed,
        });
    };
    if sbox.volume == 0.0 {
        return Ok(McEstimate {
            mean: 0.0,
            std_error: 0.0,
            samples,
            seed,
        });
    }
    let d = h.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits: u64 = 0;
    let mut x = vec![0.0f64; d];
    for _ in 0..samples {
        for j in 0..d {
            x[j] = sbox.lo[j] + rng.gen::<f64>() * (sbox.hi[j] - sbox.lo[j]);
        }
        if inside(&sbox.rows, &x) {
            hits += 1;
        }
    }
    let p = hits as f64 / samples as f64;
    Ok(McEstimate {
        mean: sbox.volume * p,
        std_error: sbox.volume * (p * (1.0 - p) / samples as f64).sqrt(),
        samples,
        seed,
    })
}

/// Estimate of ∫ p over the polytope: the sample mean of p·χ over the
/// bounding box, with the usual sample-variance standard error.
pub fn mc_integrate(h: &HPolytope, p: &Polynomial, samples: u64, seed: u64) -> Result<McEstimate> {
    if samples == 0 {
        return Err(Error::Domain("need at least one sample".into()));
    }
    if p.nvars() != h.dim() {
        return Err(Error::Dimension(format!(
            "{}-variable polynomial over a {}-dimensional polytope",
            p.nvars(),
            h.dim()
        )));
    }
    let Some(sbox) = sampling_box(h)? else {
        return Ok(McEstimate {
            mean: 0.0,
            std_error: 0.0,
            samples,
            seed,
        });
    };
    if sbox.volume == 0.0 {
        return Ok(McEstimate {
            mean: 0.0,
            std_error: 0.0,
            samples,
            seed,
        });
    }
    let d = h.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sum = 0.0f64;
    let mut sum_sq = 0.0f64;
    let mut x = vec![0.0f64; d];
    for _ in 0..samples {
        for j in 0..d {
            x[j] = sbox.lo[j] + rng.gen::<f64>() * (sbox.hi[j] - sbox.lo[j]);
        }
        let v = if inside(&sbox.rows, &x) {
            p.eval_f64(&x)
        } else {
            0.0
        };
        sum += v;
        sum_sq += v * v;
    }
    let n = samples as f64;
    let mean = sum / n;
    let variance = ((sum_sq / n - mean * mean) * n / (n - 1.0).max(1.0)).max(0.0);
    Ok(McEstimate {
        mean: sbox.volume * mean,
        std_error: sbox.volume * (variance / n).sqrt(),
        samples,
        seed,
    })
}

/// The classical closed form ∫_{Ω_d} x^k dx = Π k_j! / (Σ k_j + d)! over
/// the standard simplex, used as an independent target for the lifting
/// route.
pub fn simplex_exact(k: &ExponentVector) -> Rat {
    let d = k.len();
    Rat::from_integer(k.factorial_product())
        / Rat::from_integer(factorial(k.total() as usize + d))
}
