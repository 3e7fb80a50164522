//! Exact rational scalars, matrices, and the determinant/minor/radical
//! machinery the geometric modules are built on. No floating point anywhere.

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational number, always in lowest terms with a
/// positive denominator (the backing type canonicalizes on construction).
pub type Rat = BigRational;

/// Integer as a `Rat`. Convenience for tests and construction sites.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// `n/d` as a `Rat`. Panics if `d == 0`; only for literals in code and tests.
pub fn ratio(n: i64, d: i64) -> Rat {
    assert!(d != 0, "ratio literal with zero denominator");
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p"` or `"p/q"`. Unlike the `FromStr` of the backing type this
/// rejects a zero denominator with an error instead of panicking.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (s, None),
    };
    let n: BigInt = num
        .parse()
        .map_err(|_| Error::Parse(format!("invalid integer {num:?}")))?;
    let d: BigInt = match den {
        Some(d) => d
            .parse()
            .map_err(|_| Error::Parse(format!("invalid integer {d:?}")))?,
        None => BigInt::one(),
    };
    if d.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Rat::new(n, d))
}

/// Formats as `"p"` for integers, `"p/q"` otherwise.
pub fn format_rat(r: &Rat) -> String {
    r.to_string()
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    // Good to ~f64 precision for desk-scale values; display/estimation only.
    let n = r.numer();
    let d = r.denom();
    let nf = n.to_string().parse::<f64>().unwrap_or(f64::NAN);
    let df = d.to_string().parse::<f64>().unwrap_or(f64::NAN);
    nf / df
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    assert_eq!(a.len(), b.len(), "dot of unequal lengths");
    let mut acc = Rat::zero();
    for (x, y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

/// `r^k` for nonnegative k by repeated squaring.
pub fn rat_pow(r: &Rat, k: usize) -> Rat {
    let mut base = r.clone();
    let mut k = k;
    let mut acc = Rat::one();
    while k > 0 {
        if k & 1 == 1 {
            acc *= &base;
        }
        k >>= 1;
        if k > 0 {
            base = &base * &base;
        }
    }
    acc
}

pub fn factorial(n: usize) -> BigInt {
    let mut acc = BigInt::one();
    for i in 2..=n {
        acc *= BigInt::from(i);
    }
    acc
}

/// Dense row-major matrix of exact rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rat>,
}

impl RatMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Rat>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension("matrix dimensions must be positive".into()));
        }
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{}x{} matrix needs {} entries, got {}",
                rows,
                cols,
                rows * cols,
                entries.len()
            )));
        }
        Ok(RatMatrix { rows, cols, entries })
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Dimension("matrix needs at least one row".into()));
        }
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Self::new(rows.len(), cols, rows.into_iter().flatten().collect())
    }

    /// Integer-entried matrix from `i64` rows; test and fixture convenience.
    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| rat(v)).collect())
                .collect(),
        )
        .expect("literal matrix")
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RatMatrix {
            rows: n,
            cols: n,
            entries: vec![Rat::zero(); n * n],
        };
        for i in 0..n {
            m.entries[i * n + i] = Rat::one();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &Rat {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rat) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<Rat> {
        (0..self.rows).map(|i| self.at(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> RatMatrix {
        let mut entries = Vec::with_capacity(self.rows * self.cols);
        for j in 0..self.cols {
            for i in 0..self.rows {
                entries.push(self.at(i, j).clone());
            }
        }
        RatMatrix {
            rows: self.cols,
            cols: self.rows,
            entries,
        }
    }

    pub fn matmul(&self, other: &RatMatrix) -> Result<RatMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut entries = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = Rat::zero();
                for k in 0..self.cols {
                    acc += self.at(i, k) * other.at(k, j);
                }
                entries.push(acc);
            }
        }
        Ok(RatMatrix {
            rows: self.rows,
            cols: other.cols,
            entries,
        })
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Result<Vec<Rat>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!(
                "matrix has {} columns, vector has {} entries",
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), v)).collect())
    }

    /// Submatrix keeping the given columns, in the given order.
    pub fn column_submatrix(&self, idx: &[usize]) -> RatMatrix {
        let mut entries = Vec::with_capacity(self.rows * idx.len());
        for i in 0..self.rows {
            for &j in idx {
                entries.push(self.at(i, j).clone());
            }
        }
        RatMatrix {
            rows: self.rows,
            cols: idx.len(),
            entries,
        }
    }

    /// Submatrix keeping the given rows, in the given order.
    pub fn row_submatrix(&self, idx: &[usize]) -> RatMatrix {
        RatMatrix {
            rows: idx.len(),
            cols: self.cols,
            entries: idx.iter().flat_map(|&i| self.row(i).to_vec()).collect(),
        }
    }

    pub fn is_integer(&self) -> bool {
        self.entries.iter().all(|e| e.is_integer())
    }
}

/// Row-wise clearing of denominators: returns the integer matrix obtained by
/// multiplying each row with the lcm of its denominators, plus the scalings.
fn integerize_rows(m: &RatMatrix) -> (Vec<Vec<BigInt>>, Vec<BigInt>) {
    let mut int_rows = Vec::with_capacity(m.rows());
    let mut scales = Vec::with_capacity(m.rows());
    for i in 0..m.rows() {
        let mut l = BigInt::one();
        for e in m.row(i) {
            l = l.lcm(e.denom());
        }
        let row: Vec<BigInt> = m
            .row(i)
            .iter()
            .map(|e| e.numer() * (&l / e.denom()))
            .collect();
        int_rows.push(row);
        scales.push(l);
    }
    (int_rows, scales)
}

/// Fraction-free (Bareiss) determinant of an integer matrix. All intermediate
/// divisions are exact, keeping entry growth polynomial.
fn bareiss_det(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = 1i32;
    let mut prev = BigInt::one();
    for k in 0..n.saturating_sub(1) {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(p) => {
                    a.swap(k, p);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = t / &prev;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if sign < 0 {
        -d
    } else {
        d
    }
}

/// Exact determinant of a square rational matrix.
pub fn det(y: &RatMatrix) -> Result<Rat> {
    if y.rows() != y.cols() {
        return Err(Error::Dimension(format!(
            "determinant of {}x{} matrix",
            y.rows(),
            y.cols()
        )));
    }
    let (int_rows, scales) = integerize_rows(y);
    let d = bareiss_det(int_rows);
    let mut denom = BigInt::one();
    for s in scales {
        denom *= s;
    }
    Ok(Rat::new(d, denom))
}

/// Exact solution of `Y u = x` for invertible square `Y`.
pub fn solve(y: &RatMatrix, x: &[Rat]) -> Result<Vec<Rat>> {
    if y.rows() != y.cols() {
        return Err(Error::Dimension(format!(
            "solve with {}x{} matrix",
            y.rows(),
            y.cols()
        )));
    }
    if x.len() != y.rows() {
        return Err(Error::Dimension(format!(
            "solve: matrix is {}x{} but right-hand side has {} entries",
            y.rows(),
            y.cols(),
            x.len()
        )));
    }
    let n = y.rows();
    // Gauss-Jordan on [Y | x]; first nonzero pivot is fine in exact arithmetic.
    let mut a: Vec<Vec<Rat>> = (0..n)
        .map(|i| {
            let mut row = y.row(i).to_vec();
            row.push(x[i].clone());
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero());
        let piv = piv.ok_or_else(|| Error::Singular(format!("no pivot in column {col}")))?;
        a.swap(col, piv);
        let p = a[col][col].clone();
        for v in a[col].iter_mut() {
            *v /= &p;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in col..=n {
                    let t = &a[col][j] * &f;
                    a[r][j] -= t;
                }
            }
        }
    }
    Ok(a.into_iter().map(|mut row| row.pop().unwrap()).collect())
}

/// Exact inverse of a square rational matrix.
pub fn invert(y: &RatMatrix) -> Result<RatMatrix> {
    if y.rows() != y.cols() {
        return Err(Error::Dimension(format!(
            "inverse of {}x{} matrix",
            y.rows(),
            y.cols()
        )));
    }
    let n = y.rows();
    let mut a: Vec<Vec<Rat>> = (0..n)
        .map(|i| {
            let mut row = y.row(i).to_vec();
            row.extend((0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }));
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .ok_or_else(|| Error::Singular(format!("no pivot in column {col}")))?;
        a.swap(col, piv);
        let p = a[col][col].clone();
        for v in a[col].iter_mut() {
            *v /= &p;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in 0..2 * n {
                    let t = &a[col][j] * &f;
                    a[r][j] -= t;
                }
            }
        }
    }
    let entries = a.into_iter().flat_map(|row| row[n..].to_vec()).collect();
    RatMatrix::new(n, n, entries)
}

pub fn rank(m: &RatMatrix) -> usize {
    let mut a: Vec<Vec<Rat>> = (0..m.rows()).map(|i| m.row(i).to_vec()).collect();
    let mut r = 0;
    for col in 0..m.cols() {
        if r == m.rows() {
            break;
        }
        let Some(piv) = (r..m.rows()).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(r, piv);
        for i in r + 1..m.rows() {
            if !a[i][col].is_zero() {
                let f = &a[i][col] / &a[r][col];
                for j in col..m.cols() {
                    let t = &a[r][j] * &f;
                    a[i][j] -= t;
                }
            }
        }
        r += 1;
    }
    r
}

/// Basis of the null space `{v : Mv = 0}`.
pub fn kernel_basis(m: &RatMatrix) -> Vec<Vec<Rat>> {
    let rows = m.rows();
    let cols = m.cols();
    let mut a: Vec<Vec<Rat>> = (0..rows).map(|i| m.row(i).to_vec()).collect();
    // Reduced row echelon form, tracking pivot columns.
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for col in 0..cols {
        if r == rows {
            break;
        }
        let Some(piv) = (r..rows).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(r, piv);
        let p = a[r][col].clone();
        for v in a[r].iter_mut() {
            *v /= &p;
        }
        for i in 0..rows {
            if i != r && !a[i][col].is_zero() {
                let f = a[i][col].clone();
                for j in 0..cols {
                    let t = &a[r][j] * &f;
                    a[i][j] -= t;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    let mut basis = Vec::new();
    for free in 0..cols {
        if pivots.contains(&free) {
            continue;
        }
        let mut v = vec![Rat::zero(); cols];
        v[free] = Rat::one();
        for (row_idx, &pcol) in pivots.iter().enumerate() {
            v[pcol] = -a[row_idx][free].clone();
        }
        basis.push(v);
    }
    basis
}

/// `det(M Mᵀ)` for an s×n matrix of full row rank; always positive.
pub fn gram_det(m: &RatMatrix) -> Result<Rat> {
    if rank(m) != m.rows() {
        return Err(Error::Rank(format!(
            "gram determinant needs full row rank {}, got {}",
            m.rows(),
            rank(m)
        )));
    }
    let g = m.matmul(&m.transpose())?;
    det(&g)
}

/// Gcd of all maximal (s×s) minors of an integer s×n matrix of rank s.
///
/// This is the index in ℤ^s of the lattice generated by the columns, i.e.
/// the number of integer points in a half-open fundamental cell of that
/// lattice (verified against direct point counting in the test suite).
pub fn maximal_minor_gcd(m: &RatMatrix) -> Result<BigInt> {
    if !m.is_integer() {
        return Err(Error::Domain("minor gcd needs integer entries".into()));
    }
    let s = m.rows();
    if m.cols() < s {
        return Err(Error::Rank(format!("{}x{} matrix cannot have rank {}", s, m.cols(), s)));
    }
    let mut g = BigInt::zero();
    for sub in (0..m.cols()).combinations(s) {
        let y = m.column_submatrix(&sub);
        let (int_rows, _) = integerize_rows(&y);
        let d = bareiss_det(int_rows);
        g = g.gcd(&d);
        if g.is_one() {
            return Ok(g);
        }
    }
    if g.is_zero() {
        return Err(Error::Rank("all maximal minors vanish".into()));
    }
    Ok(g)
}

/// Exact number of the form `coeff·√radicand`.
///
/// `radicand` is a positive integer, squarefree whenever `canonical` is true;
/// values with equal mathematical value then compare equal structurally.
/// `canonical` is false only when trial division up to the internal bound
/// could not certify squarefreeness (radicand beyond ~10¹⁰).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RadicalValue {
    pub coeff: Rat,
    pub radicand: BigInt,
    pub canonical: bool,
}

impl RadicalValue {
    pub fn rational(q: Rat) -> Self {
        RadicalValue {
            coeff: q,
            radicand: BigInt::one(),
            canonical: true,
        }
    }

    pub fn is_rational(&self) -> bool {
        self.radicand.is_one()
    }

    pub fn scale(&self, q: &Rat) -> Self {
        let mut v = self.clone();
        v.coeff *= q;
        if v.coeff.is_zero() {
            v.radicand = BigInt::one();
        }
        v
    }

    pub fn to_f64(&self) -> f64 {
        let r = self.radicand.to_string().parse::<f64>().unwrap_or(f64::NAN);
        rat_to_f64(&self.coeff) * r.sqrt()
    }

    /// The square, which is always rational: `coeff²·radicand`.
    pub fn square(&self) -> Rat {
        &self.coeff * &self.coeff * Rat::from_integer(self.radicand.clone())
    }
}

const SQUAREFREE_TRIAL_BOUND: u64 = 100_000;

/// Canonicalizes `q·√r` into a `RadicalValue` with squarefree radicand.
pub fn radical_normalize(q: &Rat, r: &Rat) -> Result<RadicalValue> {
    if *r <= Rat::zero() {
        return Err(Error::Domain("radicand must be positive".into()));
    }
    if q.is_zero() {
        return Ok(RadicalValue::rational(Rat::zero()));
    }
    // √(p/q) = √(p·q)/q, so the integer radicand is numer·denom.
    let mut rem: BigInt = r.numer() * r.denom();
    let mut coeff = q / Rat::from_integer(r.denom().clone());
    let mut fully_checked = false;
    let mut p: u64 = 2;
    while p <= SQUAREFREE_TRIAL_BOUND {
        let pb = BigInt::from(p);
        let sq = &pb * &pb;
        if &sq > &rem {
            fully_checked = true;
            break;
        }
        while (&rem % &sq).is_zero() {
            rem /= &sq;
            coeff *= Rat::from_integer(pb.clone());
        }
        p = if p == 2 { 3 } else { p + 2 };
    }
    if !fully_checked {
        // A square factor may survive with a prime above the bound; the
        // perfect-square case is still caught exactly by an integer sqrt.
        let root = rem.sqrt();
        if &root * &root == rem {
            coeff *= Rat::from_integer(root);
            rem = BigInt::one();
            fully_checked = true;
        } else {
            let b = BigInt::from(SQUAREFREE_TRIAL_BOUND);
            fully_checked = rem <= &b * &b;
        }
    }
    if rem.is_one() {
        return Ok(RadicalValue {
            coeff,
            radicand: BigInt::one(),
            canonical: true,
        });
    }
    Ok(RadicalValue {
        coeff,
        radicand: rem,
        canonical: fully_checked,
    })
}
