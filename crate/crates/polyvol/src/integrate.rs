//! Exact integrals of monomials and polynomials over polytopes.
//!
//! The route is exponent lifting: repeating column m_j of a direction matrix
//! k_j additional times turns the fiber integral of the monomial Πu_j^{k_j}
//! into a plain truncated-power evaluation of the lifted system,
//!
//!   ∫_{fiber} Π u_j^{k_j} du = (Π k_j!) · √det(MMᵀ) · T(x | M^(k)),
//!
//! and for a polytope {Ax ≤ b, x ≥ 0} the same lift applied to the variable
//! columns of its direction system (slack columns kept single) yields
//!
//!   ∫_D x^k dx = (Π k_j!) · T(b̃ | (Ã, E)^(k, 0)).

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact::{factorial, gram_det, radical_normalize, rat_to_f64, RadicalValue, Rat};
use crate::polytope::{hrep_direction_system, HPolytope};
use crate::tpower::{eval_T_explicit, sample_generic_c, DirectionMatrix, COLUMN_CAP};

const INTEGRATE_C_SEED: u64 = 0x0bad_5eed_0004;

/// A monomial exponent tuple (k_1, ..., k_d).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ExponentVector {
    k: Vec<u32>,
}

impl ExponentVector {
    pub fn new(k: Vec<u32>) -> Self {
        ExponentVector { k }
    }

    pub fn exponents(&self) -> &[u32] {
        &self.k
    }

    pub fn len(&self) -> usize {
        self.k.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k.is_empty()
    }

    /// Total degree Σ k_j.
    pub fn total(&self) -> u32 {
        self.k.iter().sum()
    }

    /// Π k_j! as an exact integer.
    pub fn factorial_product(&self) -> BigInt {
        self.k
            .iter()
            .map(|&e| factorial(e as usize))
            .product()
    }
}

/// A polynomial as a sum of rational-coefficient monomials in d variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    nvars: usize,
    terms: Vec<(Rat, ExponentVector)>,
}

impl Polynomial {
    /// Merges duplicate exponent tuples and drops zero coefficients; the
    /// zero polynomial is represented by an empty term list.
    pub fn new(nvars: usize, terms: Vec<(Rat, ExponentVector)>) -> Result<Self> {
        for (_, k) in &terms {
            if k.len() != nvars {
                return Err(Error::Dimension(format!(
                    "term has {} exponents in a {nvars}-variable polynomial",
                    k.len()
                )));
            }
        }
        let mut sorted = terms;
        sorted.sort_by(|a, b| a.1.cmp(&b.1));
        let mut merged: Vec<(Rat, ExponentVector)> = Vec::new();
        for (coeff, k) in sorted {
            match merged.last_mut() {
                Some(last) if last.1 == k => last.0 += coeff,
                _ => merged.push((coeff, k)),
            }
        }
        merged.retain(|(c, _)| !c.is_zero());
        Ok(Polynomial {
            nvars,
            terms: merged,
        })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[(Rat, ExponentVector)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Floating-point evaluation, for the Monte Carlo cross-checks.
    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(c, k)| {
                let mono: f64 = k
                    .exponents()
                    .iter()
                    .zip(x)
                    .map(|(&e, &xi)| xi.powi(e as i32))
                    .product();
                rat_to_f64(c) * mono
            })
            .sum()
    }
}

/// Repeats column j of the direction system k_j extra times (so it appears
/// k_j + 1 times in total). The pointedness witness carries over verbatim;
/// the total column count is capped to keep subset enumeration feasible.
pub fn lift_exponents(m: &DirectionMatrix, k: &[u32]) -> Result<DirectionMatrix> {
    if k.len() != m.ncols() {
        return Err(Error::Dimension(format!(
            "{} exponents for {} columns",
            k.len(),
            m.ncols()
        )));
    }
    let total = m.ncols() + k.iter().map(|&e| e as usize).sum::<usize>();
    if total > COLUMN_CAP {
        return Err(Error::Size(format!(
            "lifted system would have {total} columns, exceeding the cap of {COLUMN_CAP}"
        )));
    }
    let mat = m.matrix();
    let rows: Vec<Vec<Rat>> = (0..mat.rows())
        .map(|r| {
            let row = mat.row(r);
            let mut out = Vec::with_capacity(total);
            for (j, &e) in k.iter().enumerate() {
                for _ in 0..=e {
                    out.push(row[j].clone());
                }
            }
            out
        })
        .collect();
    DirectionMatrix::with_witness(
        crate::exact::RatMatrix::from_rows(rows)?,
        m.witness().to_vec(),
    )
}

/// Euclidean integral of the monomial Π u_j^{k_j} over the fiber
/// {u ≥ 0 : Mu = x}, with the √det(MMᵀ) of the original system kept as an
/// exact radical factor.
pub fn integrate_monomial_fiber(
    m: &DirectionMatrix,
    x: &[Rat],
    k: &ExponentVector,
) -> Result<RadicalValue> {
    let lifted = lift_exponents(m, k.exponents())?;
    let c = sample_generic_c(&lifted, INTEGRATE_C_SEED)?;
    let t = eval_T_explicit(&lifted, x, &c)?;
    let value = t * Rat::from_integer(k.factorial_product());
    let gram = gram_det(m.matrix())?;
    radical_normalize(&value, &gram)
}

/// Exact Lebesgue integral ∫_D x^k dx over the polytope {Ax ≤ b, x ≥ 0}:
/// the variable columns of the direction system are lifted by k, the slack
/// columns stay single, and no radical factor appears.
pub fn integrate_monomial_hrep(h: &HPolytope, k: &ExponentVector) -> Result<Rat> {
    if k.len() != h.dim() {
        return Err(Error::Dimension(format!(
            "{} exponents for a {}-dimensional polytope",
            k.len(),
            h.dim()
        )));
    }
    let (dm, b) = hrep_direction_system(h)?;
    let mut full_k: Vec<u32> = k.exponents().to_vec();
    full_k.resize(dm.ncols(), 0);
    let lifted = lift_exponents(&dm, &full_k)?;
    let c = sample_generic_c(&lifted, INTEGRATE_C_SEED)?;
    let t = eval_T_explicit(&lifted, &b, &c)?;
    Ok(t * Rat::from_integer(k.factorial_product()))
}

/// Exact integral of a polynomial over {Ax ≤ b, x ≥ 0}, term by term.
pub fn integrate_polynomial_hrep(h: &HPolytope, p: &Polynomial) -> Result<Rat> {
    if p.nvars() != h.dim() {
        return Err(Error::Dimension(format!(
            "{}-variable polynomial over a {}-dimensional polytope",
            p.nvars(),
            h.dim()
        )));
    }
    let mut acc = Rat::zero();
    for (coeff, k) in p.terms() {
        acc += coeff * integrate_monomial_hrep(h, k)?;
    }
    Ok(acc)
}
