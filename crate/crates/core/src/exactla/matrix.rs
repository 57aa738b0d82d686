//! Dense matrices and exact elimination.
//!
//! Ranks are computed two ways: modulo a prime (fast, a lower bound for the
//! rational rank) and over the rationals with fraction-free elimination on
//! integer-scaled rows. Nullspaces and determinants use the rational route.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::field::{denominator_lcm, reduce_bigint, Field, Fp, Modulus, Rational, Rationals};
use crate::error::{Error, Result};

/// Dense row-major matrix over one coefficient domain.
#[derive(Clone, PartialEq)]
pub struct ExactMatrix<F: Field> {
    rows: usize,
    cols: usize,
    domain: F::Domain,
    data: Vec<F>,
}

pub type RatMatrix = ExactMatrix<Rational>;

impl<F: Field> ExactMatrix<F> {
    pub fn zeros(domain: &F::Domain, rows: usize, cols: usize) -> Self {
        ExactMatrix {
            rows,
            cols,
            domain: domain.clone(),
            data: vec![F::zero_in(domain); rows * cols],
        }
    }

    pub fn new(domain: &F::Domain, rows: usize, cols: usize, data: Vec<F>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|x| x.domain() != *domain) {
            return Err(Error::DomainMismatch(format!(
                "entry {bad} outside {domain:?}"
            )));
        }
        Ok(ExactMatrix {
            rows,
            cols,
            domain: domain.clone(),
            data,
        })
    }

    /// Builds from row vectors, which must all have length `cols`.
    pub fn from_rows(domain: &F::Domain, cols: usize, rows: Vec<Vec<F>>) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != cols {
                return Err(Error::Shape(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            data.extend(row);
        }
        Self::new(domain, n, cols, data)
    }

    pub fn identity(domain: &F::Domain, n: usize) -> Self {
        let mut m = Self::zeros(domain, n, n);
        for i in 0..n {
            m.data[i * n + i] = F::one_in(domain);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn domain(&self) -> &F::Domain {
        &self.domain
    }

    pub fn get(&self, r: usize, c: usize) -> &F {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: F) {
        assert_eq!(v.domain(), self.domain, "matrix entry domain mismatch");
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[F] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[F]> {
        self.data.chunks(self.cols.max(1)).take(self.rows)
    }

    pub fn entries(&self) -> &[F] {
        &self.data
    }

    /// Vertical concatenation.
    pub fn vstack(&self, below: &Self) -> Result<Self> {
        if self.cols != below.cols {
            return Err(Error::Shape(format!(
                "cannot stack {} columns on {}",
                below.cols, self.cols
            )));
        }
        if self.domain != below.domain {
            return Err(Error::DomainMismatch(format!(
                "{:?} vs {:?}",
                self.domain, below.domain
            )));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&below.data);
        Ok(ExactMatrix {
            rows: self.rows + below.rows,
            cols: self.cols,
            domain: self.domain.clone(),
            data,
        })
    }

    pub fn select_rows(&self, which: &[usize]) -> Self {
        let mut data = Vec::with_capacity(which.len() * self.cols);
        for &r in which {
            data.extend_from_slice(self.row(r));
        }
        ExactMatrix {
            rows: which.len(),
            cols: self.cols,
            domain: self.domain.clone(),
            data,
        }
    }

    pub fn select_cols(&self, which: &[usize]) -> Self {
        let mut data = Vec::with_capacity(which.len() * self.rows);
        for r in 0..self.rows {
            data.extend(which.iter().map(|&c| self.get(r, c).clone()));
        }
        ExactMatrix {
            rows: self.rows,
            cols: which.len(),
            domain: self.domain.clone(),
            data,
        }
    }

    pub fn scale_row(&mut self, r: usize, by: &F) {
        for x in &mut self.data[r * self.cols..(r + 1) * self.cols] {
            *x = x.times(by);
        }
    }

    pub fn mul_vec(&self, v: &[F]) -> Result<Vec<F>> {
        if v.len() != self.cols {
            return Err(Error::Shape(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok(self
            .row_iter()
            .map(|row| {
                row.iter()
                    .zip(v)
                    .fold(F::zero_in(&self.domain), |acc, (a, b)| {
                        acc.plus(&a.times(b))
                    })
            })
            .collect())
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for c in 0..self.cols {
            data.extend((0..self.rows).map(|r| self.data[r * self.cols + c].clone()));
        }
        ExactMatrix {
            rows: self.cols,
            cols: self.rows,
            domain: self.domain.clone(),
            data,
        }
    }

    /// Rank by plain Gaussian elimination over the coefficient field.
    pub fn rank(&self) -> usize {
        let mut m = self.data.clone();
        let (rows, cols) = (self.rows, self.cols);
        let mut rank = 0;
        for c in 0..cols {
            let Some(p) = (rank..rows).find(|&r| !m[r * cols + c].vanishes()) else {
                continue;
            };
            swap_rows(&mut m, cols, p, rank);
            let inv = m[rank * cols + c].inverse().expect("nonzero pivot");
            for r in rank + 1..rows {
                let f = m[r * cols + c].times(&inv);
                if f.vanishes() {
                    continue;
                }
                for j in c..cols {
                    let sub = f.times(&m[rank * cols + j]);
                    m[r * cols + j] = m[r * cols + j].minus(&sub);
                }
            }
            rank += 1;
        }
        rank
    }
}

impl<F: Field> fmt::Debug for ExactMatrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "ExactMatrix {}x{} over {:?}",
            self.rows, self.cols, self.domain
        )?;
        for row in self.row_iter() {
            let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

fn swap_rows<T>(m: &mut [T], cols: usize, a: usize, b: usize) {
    if a == b {
        return;
    }
    let (lo, hi) = (a.min(b), a.max(b));
    let (head, tail) = m.split_at_mut(hi * cols);
    head[lo * cols..(lo + 1) * cols].swap_with_slice(&mut tail[..cols]);
}

/// Reduces every entry modulo `p`.
pub fn reduce_mod_p(m: &RatMatrix, p: u64) -> Result<ExactMatrix<Fp>> {
    let modulus = Modulus::new(p)?;
    let mut data = Vec::with_capacity(m.rows * m.cols);
    for (idx, x) in m.data.iter().enumerate() {
        let v = Fp::from_rational(x, modulus).ok_or(Error::BadPrime {
            prime: p,
            row: idx / m.cols,
            col: idx % m.cols,
        })?;
        data.push(v);
    }
    Ok(ExactMatrix {
        rows: m.rows,
        cols: m.cols,
        domain: modulus,
        data,
    })
}

/// Rank of the reduction of `m` modulo the prime `p`.
///
/// A lower bound for [`rank_exact`]; fails with [`Error::BadPrime`] when some
/// denominator is divisible by `p`.
pub fn rank_mod_p(m: &RatMatrix, p: u64) -> Result<usize> {
    Ok(pivot_columns_mod_p(m, p)?.len())
}

/// Pivot columns of the row echelon form of `m` modulo `p`.
pub fn pivot_columns_mod_p(m: &RatMatrix, p: u64) -> Result<Vec<usize>> {
    Modulus::new(p)?;
    let (rows, cols) = (m.rows, m.cols);
    let mut a = Vec::with_capacity(rows * cols);
    for (idx, x) in m.data.iter().enumerate() {
        let den = reduce_bigint(x.denom(), p);
        if den == 0 {
            return Err(Error::BadPrime {
                prime: p,
                row: idx / cols,
                col: idx % cols,
            });
        }
        let num = reduce_bigint(x.numer(), p);
        a.push(num * super::field::inv_mod(den, p) % p);
    }
    Ok(pivots_u64(&mut a, rows, cols, p))
}

fn pivots_u64(a: &mut [u64], rows: usize, cols: usize, p: u64) -> Vec<usize> {
    let mut pivots = Vec::new();
    for c in 0..cols {
        let rank = pivots.len();
        let Some(piv) = (rank..rows).find(|&r| a[r * cols + c] != 0) else {
            continue;
        };
        swap_rows(a, cols, piv, rank);
        let inv = super::field::inv_mod(a[rank * cols + c], p);
        for j in c..cols {
            a[rank * cols + j] = a[rank * cols + j] * inv % p;
        }
        let (head, tail) = a.split_at_mut((rank + 1) * cols);
        let pivot_row = &head[rank * cols..];
        for row in tail.chunks_mut(cols) {
            let f = row[c];
            if f == 0 {
                continue;
            }
            for j in c..cols {
                row[j] = (row[j] + (p - f) * pivot_row[j]) % p;
            }
        }
        pivots.push(c);
    }
    pivots
}

/// Scales each row by the lcm of its denominators and divides out the content,
/// giving a primitive integer row spanning the same line.
fn integer_rows(m: &RatMatrix) -> Vec<Vec<BigInt>> {
    m.row_iter()
        .map(|row| {
            let l = denominator_lcm(row);
            let ints: Vec<BigInt> = row.iter().map(|x| x.numer() * (&l / x.denom())).collect();
            let content = ints.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
            if content.is_zero() || content.is_one() {
                ints
            } else {
                ints.into_iter().map(|x| x / &content).collect()
            }
        })
        .collect()
}

/// Forward Bareiss elimination in place; returns pivot columns and the number
/// of row swaps.
fn bareiss_forward(a: &mut [Vec<BigInt>], cols: usize) -> (Vec<usize>, usize) {
    let rows = a.len();
    let mut prev = BigInt::one();
    let mut pivots = Vec::new();
    let mut swaps = 0;
    for c in 0..cols {
        let r = pivots.len();
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        if p != r {
            a.swap(p, r);
            swaps += 1;
        }
        let (head, tail) = a.split_at_mut(r + 1);
        let pivot_row = &head[r];
        let pv = &pivot_row[c];
        for row in tail.iter_mut() {
            let f = std::mem::take(&mut row[c]);
            for j in c + 1..cols {
                let num = pv * &row[j] - &f * &pivot_row[j];
                row[j] = num / &prev;
            }
        }
        prev = head[r][c].clone();
        pivots.push(c);
    }
    (pivots, swaps)
}

/// Rank over the rationals by fraction-free elimination.
pub fn rank_exact(m: &RatMatrix) -> usize {
    let mut a = integer_rows(m);
    bareiss_forward(&mut a, m.cols).0.len()
}

/// Exact determinant of a square rational matrix.
pub fn det_exact(m: &RatMatrix) -> Result<Rational> {
    if m.rows != m.cols {
        return Err(Error::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let n = m.rows;
    if n == 0 {
        return Ok(<Rational as One>::one());
    }
    // Scale rows to integers, remembering the factors to undo at the end.
    let mut scale = <Rational as One>::one();
    let mut a: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for row in m.row_iter() {
        let l = denominator_lcm(row);
        a.push(row.iter().map(|x| x.numer() * (&l / x.denom())).collect());
        scale *= Rational::from_integer(l);
    }
    let (pivots, swaps) = bareiss_forward(&mut a, n);
    if pivots.len() < n {
        return Ok(<Rational as Zero>::zero());
    }
    let mut det = Rational::from_integer(a[n - 1][n - 1].clone()) / scale;
    if swaps % 2 == 1 {
        det = -det;
    }
    Ok(det)
}

/// Basis of the right kernel `{v : m v = 0}` over the rationals.
///
/// Uses fraction-free Gauss-Jordan elimination, after which every pivot equals
/// the same integer `d`; the basis vector of a free column `f` is then `e_f`
/// minus `a[i][f] / d` on each pivot column.
pub fn nullspace(m: &RatMatrix) -> Vec<Vec<Rational>> {
    let cols = m.cols;
    let mut a = integer_rows(m);
    let rows = a.len();
    let mut prev = BigInt::one();
    let mut pivots: Vec<usize> = Vec::new();
    for c in 0..cols {
        let r = pivots.len();
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(p, r);
        let pivot_row = a[r].clone();
        let pv = &pivot_row[c];
        for (i, row) in a.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = std::mem::take(&mut row[c]);
            for j in 0..cols {
                if j == c {
                    continue;
                }
                let mut num = pv * &row[j];
                if !f.is_zero() {
                    num -= &f * &pivot_row[j];
                }
                row[j] = num / &prev;
            }
        }
        prev = pv.clone();
        pivots.push(c);
    }
    let d = Rational::from_integer(prev);
    let mut is_pivot = vec![false; cols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    (0..cols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut v = vec![<Rational as Zero>::zero(); cols];
            v[f] = <Rational as One>::one();
            for (i, &c) in pivots.iter().enumerate() {
                v[c] = -Rational::from_integer(a[i][f].clone()) / &d;
            }
            v
        })
        .collect()
}

/// Exact rank from one prime, without eliminating the whole matrix over `Q`.
///
/// The rank `r` modulo `p` is a lower bound. On the `r` pivot columns the
/// submatrix has rank exactly `r`, so its left kernel has dimension
/// `rows - r`; if that basis also kills every other column, the left kernel
/// of `m` has the same dimension and the rank is `r`. Returns `None` when the
/// check fails, which happens only when `p` divides some `r`-minor that is
/// nonzero over `Q` (the rank mod `p` was then too small).
pub fn rank_by_left_kernel(m: &RatMatrix, p: u64) -> Result<Option<usize>> {
    let pivots = pivot_columns_mod_p(m, p)?;
    let r = pivots.len();
    if r == m.rows || r == m.cols {
        return Ok(Some(r));
    }
    let kernel = nullspace(&m.select_cols(&pivots).transpose());
    if kernel.len() != m.rows - r {
        return Ok(None);
    }
    let rows = scaled_integer_rows(m);
    Ok(kernel
        .iter()
        .all(|y| left_combination_vanishes(&rows, y))
        .then_some(r))
}

/// Rows `l_i m_i` with `l_i` the lcm of the row's denominators.
fn scaled_integer_rows(m: &RatMatrix) -> Vec<(BigInt, Vec<BigInt>)> {
    m.row_iter()
        .map(|row| {
            let l = denominator_lcm(row);
            let ints = row.iter().map(|x| x.numer() * (&l / x.denom())).collect();
            (l, ints)
        })
        .collect()
}

/// `sum_i y_i m_i = 0`, checked in integers: with `w_i = y_i / l_i` cleared
/// to integers, `sum_i w_i (l_i m_i)` must vanish column by column.
fn left_combination_vanishes(rows: &[(BigInt, Vec<BigInt>)], y: &[Rational]) -> bool {
    let w: Vec<Rational> = y
        .iter()
        .zip(rows)
        .map(|(yi, (l, _))| yi / Rational::from_integer(l.clone()))
        .collect();
    let d = denominator_lcm(&w);
    let terms: Vec<(BigInt, &[BigInt])> = w
        .iter()
        .zip(rows)
        .filter(|(wi, _)| !wi.is_zero())
        .map(|(wi, (_, ints))| (wi.numer() * (&d / wi.denom()), ints.as_slice()))
        .collect();
    let cols = rows.first().map_or(0, |(_, ints)| ints.len());
    (0..cols).all(|j| {
        terms
            .iter()
            .fold(BigInt::zero(), |acc, (c, ints)| acc + c * &ints[j])
            .is_zero()
    })
}

/// Exact rank: [`rank_by_left_kernel`] at the first good prime from `p` on,
/// falling back to [`rank_exact`].
pub fn rank_certified(m: &RatMatrix, p: u64) -> Result<usize> {
    let mut p = p;
    loop {
        match rank_by_left_kernel(m, p) {
            Ok(Some(r)) => return Ok(r),
            Ok(None) => return Ok(rank_exact(m)),
            Err(Error::BadPrime { .. }) => p = super::field::next_prime(p),
            Err(e) => return Err(e),
        }
    }
}

/// Checks `m v = 0` exactly.
pub fn annihilates(m: &RatMatrix, v: &[Rational]) -> bool {
    m.mul_vec(v)
        .map(|w| w.iter().all(Zero::is_zero))
        .unwrap_or(false)
}

impl RatMatrix {
    /// Multiplies every row by the lcm of its denominators and divides by the
    /// content of the result, the analogue of a primitive-part normalization.
    pub fn primitive_rows(&self) -> RatMatrix {
        let data = integer_rows(self)
            .into_iter()
            .flatten()
            .map(Rational::from_integer)
            .collect();
        ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            domain: Rationals,
            data,
        }
    }

    pub fn max_entry_bits(&self) -> u64 {
        self.data
            .iter()
            .map(|x| x.numer().abs().bits().max(x.denom().bits()))
            .max()
            .unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::field::{rat, ratio};

    fn m(rows: &[&[i64]]) -> RatMatrix {
        let cols = rows.first().map_or(0, |r| r.len());
        RatMatrix::from_rows(
            &Rationals,
            cols,
            rows.iter()
                .map(|r| r.iter().map(|&x| rat(x)).collect())
                .collect(),
        )
        .unwrap()
    }

    fn vandermonde(nodes: &[i64]) -> RatMatrix {
        let n = nodes.len();
        let rows = nodes
            .iter()
            .map(|&x| (0..n).map(|e| rat(x.pow(e as u32))).collect())
            .collect();
        RatMatrix::from_rows(&Rationals, n, rows).unwrap()
    }

    #[test]
    fn identity_ranks() {
        let id = RatMatrix::identity(&Rationals, 5);
        for p in [2, 3, 131, 137] {
            assert_eq!(rank_mod_p(&id, p).unwrap(), 5);
        }
        assert_eq!(rank_exact(&RatMatrix::identity(&Rationals, 4)), 4);
    }

    #[test]
    fn proportional_rows() {
        let a = m(&[&[1, 2], &[2, 4]]);
        for p in [3, 5, 131] {
            assert_eq!(rank_mod_p(&a, p).unwrap(), 1);
        }
        assert_eq!(rank_exact(&a), 1);
    }

    #[test]
    fn bad_prime_is_reported() {
        let a = RatMatrix::from_rows(
            &Rationals,
            2,
            vec![vec![rat(1), ratio(1, 131)], vec![rat(0), rat(1)]],
        )
        .unwrap();
        assert_eq!(
            rank_mod_p(&a, 131),
            Err(Error::BadPrime {
                prime: 131,
                row: 0,
                col: 1
            })
        );
        assert_eq!(rank_mod_p(&a, 137).unwrap(), 2);
        assert_eq!(rank_mod_p(&a, 8), Err(Error::NotPrime(8)));
    }

    #[test]
    fn modular_rank_can_drop_below_rational_rank() {
        // det = 7
        let a = m(&[&[1, 2], &[3, 13]]);
        assert_eq!(rank_exact(&a), 2);
        assert_eq!(rank_mod_p(&a, 7).unwrap(), 1);
        assert_eq!(rank_mod_p(&a, 11).unwrap(), 2);
    }

    #[test]
    fn vandermonde_rank_and_det() {
        assert_eq!(rank_exact(&vandermonde(&[1, 2, 3, 4])), 4);
        assert_eq!(det_exact(&vandermonde(&[2, 3, 5])).unwrap(), rat(6));
    }

    #[test]
    fn small_determinants() {
        assert_eq!(
            det_exact(&RatMatrix::identity(&Rationals, 3)).unwrap(),
            rat(1)
        );
        assert_eq!(det_exact(&m(&[&[1, 2], &[3, 4]])).unwrap(), rat(-2));
        assert_eq!(det_exact(&m(&[&[0, 1], &[1, 0]])).unwrap(), rat(-1));
        assert_eq!(det_exact(&m(&[&[1, 2], &[2, 4]])).unwrap(), rat(0));
        let frac = RatMatrix::from_rows(
            &Rationals,
            2,
            vec![vec![ratio(1, 2), rat(1)], vec![rat(0), ratio(2, 3)]],
        )
        .unwrap();
        assert_eq!(det_exact(&frac).unwrap(), ratio(1, 3));
        assert!(matches!(
            det_exact(&m(&[&[1, 2, 3]])),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn nullspace_examples() {
        let z = RatMatrix::zeros(&Rationals, 2, 3);
        assert_eq!(nullspace(&z).len(), 3);
        let ns = nullspace(&m(&[&[1, 1]]));
        assert_eq!(ns, vec![vec![rat(-1), rat(1)]]);
        let a = m(&[&[1, 2, 3, 4], &[2, 4, 6, 8], &[0, 1, 1, 1]]);
        let ns = nullspace(&a);
        assert_eq!(ns.len(), 4 - rank_exact(&a));
        assert!(ns.iter().all(|v| annihilates(&a, v)));
    }

    #[test]
    fn stacking_and_selection() {
        let a = m(&[&[1, 2], &[3, 4]]);
        let s = a.vstack(&a).unwrap();
        assert_eq!((s.rows(), s.cols()), (4, 2));
        assert_eq!(s.select_rows(&[3]).row(0), &[rat(3), rat(4)]);
        assert_eq!(a.select_cols(&[1]).entries(), &[rat(2), rat(4)]);
        assert!(a.vstack(&m(&[&[1, 2, 3]])).is_err());
    }

    #[test]
    fn generic_rank_over_prime_field() {
        let a = m(&[&[1, 2], &[3, 13]]);
        assert_eq!(reduce_mod_p(&a, 7).unwrap().rank(), 1);
        assert_eq!(reduce_mod_p(&a, 13).unwrap().rank(), 2);
        assert_eq!(a.rank(), 2);
    }

    #[test]
    fn left_kernel_rank() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(rank_by_left_kernel(&a, 131).unwrap(), Some(2));
        // det = 7: rank 1 modulo 7 is not confirmed.
        assert_eq!(
            rank_by_left_kernel(&m(&[&[1, 2], &[3, 13]]), 7).unwrap(),
            None
        );
        assert_eq!(a.transpose().transpose(), a);
    }
}
