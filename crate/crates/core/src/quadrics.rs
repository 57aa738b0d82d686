//! Quadrics through the embedded binary curve.
//!
//! A quadric `sum_{i<j} s_ij x_i x_j` contains component `k` iff the degree
//! `g - 1` polynomial `P_k(t) = sum s_ij f_{i,k}(t) f_{j,k}(t) / M_k(t)`
//! vanishes. Its coefficients, rewritten in the basis of power sums
//! `q_h(a_i, a_j)`, give the rows of the matrix `Z` whose kernel is `I_2(C)`.
//!
//! Columns are the unknowns `s_ij`, `i < j`, in lexicographic order.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exactla::{
    annihilates, det_exact, nullspace, rank_exact, to_fraction_string, RatMatrix, RatPoly,
    Rational, Rationals, UniPoly,
};
use crate::prymcurve::{Component, PrymCurveParams};

/// Bijection between pairs `i < j < n` and column positions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColumnIndex {
    n: usize,
    pairs: Vec<(usize, usize)>,
}

impl ColumnIndex {
    pub fn new(n: usize) -> Self {
        let pairs = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        ColumnIndex { n, pairs }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn pair(&self, col: usize) -> (usize, usize) {
        self.pairs[col]
    }

    /// Column of the unordered pair `{i, j}`, `i != j`.
    pub fn column(&self, i: usize, j: usize) -> Option<usize> {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        (i != j && j < self.n).then(|| i * (2 * self.n - i - 1) / 2 + (j - i - 1))
    }
}

/// `sum_{m=0}^{h} x^m y^(h-m)`, and 0 for negative `h`.
pub fn q_power_sum(h: i64, x: &Rational, y: &Rational) -> Rational {
    if h < 0 {
        return Rational::zero();
    }
    let mut total = Rational::zero();
    let mut xm = Rational::one();
    for m in 0..=h {
        total += &xm * pow(y, (h - m) as u32);
        xm *= x;
    }
    total
}

fn pow(x: &Rational, e: u32) -> Rational {
    (0..e).fold(Rational::one(), |acc, _| acc * x)
}

/// `q_r delta_i delta_j - q_{r-1} (delta_i c_j + c_i delta_j) + q_{r-2} c_i c_j`
/// with `q_h = q_h(a_i, a_j)` on component `k`.
pub fn tilde_q(
    r: usize,
    k: Component,
    i: usize,
    j: usize,
    params: &PrymCurveParams,
) -> Result<Rational> {
    let n = params.n();
    if r >= params.g() || i >= j || j >= n {
        return Err(Error::IndexOutOfRange(format!(
            "r = {r}, (i, j) = ({i}, {j}) with g = {}",
            params.g()
        )));
    }
    let (a, c, d) = (params.a(k), params.c(k), params.delta());
    let q = |h: i64| q_power_sum(h, &a[i], &a[j]);
    let r = r as i64;
    Ok(
        q(r) * &d[i] * &d[j] - q(r - 1) * (&d[i] * &c[j] + &c[i] * &d[j])
            + q(r - 2) * &c[i] * &c[j],
    )
}

/// Column of `Z` for one pair: `tilde_q` for `r = 0..g-1`.
///
/// With `x = xn/xd`, `y = yn/yd` and `D = xd yd`, the recurrence
/// `q_h = x q_{h-1} + y^h` becomes `N_h = xn yd N_{h-1} + (yn xd)^h` for the
/// integer numerators of `q_h = N_h / D^h`. Everything stays integral until
/// each entry is formed.
fn tilde_q_column(
    g: usize,
    x: &Rational,
    y: &Rational,
    di: &Rational,
    dj: &Rational,
    ci: &Rational,
    cj: &Rational,
) -> Vec<Rational> {
    let step = x.numer() * y.denom();
    let base = y.numer() * x.denom();
    let d = x.denom() * y.denom();
    let mut n = Vec::with_capacity(g);
    let mut power = BigInt::one();
    let mut prev = BigInt::zero();
    for _ in 0..g {
        prev = &prev * &step + &power;
        n.push(prev.clone());
        power *= &base;
    }
    // dd, mixed and cc over one denominator e.
    let dd = di * dj;
    let mixed = di * cj + ci * dj;
    let cc = ci * cj;
    let e = dd.denom().lcm(mixed.denom()).lcm(cc.denom());
    let scaled = |v: &Rational| v.numer() * (&e / v.denom());
    let (a, b, c) = (scaled(&dd), scaled(&mixed) * &d, scaled(&cc) * &d * &d);
    let mut denom = e;
    (0..g)
        .map(|r| {
            let mut v = &n[r] * &a;
            if r >= 1 {
                v -= &n[r - 1] * &b;
            }
            if r >= 2 {
                v += &n[r - 2] * &c;
            }
            let entry = Rational::new(v, denom.clone());
            denom *= &d;
            entry
        })
        .collect()
}

fn component_block(
    params: &PrymCurveParams,
    k: Component,
    cols: &ColumnIndex,
) -> Vec<Vec<Rational>> {
    let g = params.g();
    let (a, c, d) = (params.a(k), params.c(k), params.delta());
    let by_col: Vec<Vec<Rational>> = cols
        .pairs()
        .iter()
        .map(|&(i, j)| tilde_q_column(g, &a[i], &a[j], &d[i], &d[j], &c[i], &c[j]))
        .collect();
    (0..g)
        .map(|h| by_col.iter().map(|col| col[h].clone()).collect())
        .collect()
}

/// The system `Z`: rows `h = 0..g-1` of component 1, then of component 2.
#[derive(Clone, Debug)]
pub struct QuadricSystem {
    pub params: PrymCurveParams,
    pub z: RatMatrix,
    pub columns: ColumnIndex,
}

impl QuadricSystem {
    pub fn row_index(&self, k: Component, h: usize) -> usize {
        k.index() * self.params.g() + h
    }

    /// The `g` rows of one component.
    pub fn component_rows(&self, k: Component) -> RatMatrix {
        let g = self.params.g();
        let idx: Vec<usize> = (0..g).map(|h| self.row_index(k, h)).collect();
        self.z.select_rows(&idx)
    }

    /// The `2g - 2` rows used in the maximal-rank argument: all of component 1
    /// and `h = 1..g-2` of component 2.
    pub fn reduced_rows(&self) -> RatMatrix {
        let g = self.params.g();
        let mut idx: Vec<usize> = (0..g).map(|h| self.row_index(Component::One, h)).collect();
        idx.extend((1..g - 1).map(|h| self.row_index(Component::Two, h)));
        self.z.select_rows(&idx)
    }

    /// Rank the system has for general parameters.
    pub fn expected_rank(&self) -> usize {
        2 * self.params.g() - 2
    }
}

pub fn build_z(params: &PrymCurveParams) -> QuadricSystem {
    let columns = ColumnIndex::new(params.n());
    let mut rows = component_block(params, Component::One, &columns);
    rows.extend(component_block(params, Component::Two, &columns));
    let z = RatMatrix::from_rows(&Rationals, columns.len(), rows)
        .expect("rows have one entry per pair");
    QuadricSystem {
        params: params.clone(),
        z,
        columns,
    }
}

/// Coefficients of `t^0..t^{g-1}` in `P_k(t)` as linear forms in the `s_ij`,
/// computed by expanding `(delta_i t - c_i)(delta_j t - c_j) prod_{r != i,j} (t - a_r)`.
pub fn expand_p(params: &PrymCurveParams, k: Component) -> RatMatrix {
    let g = params.g();
    let cols = ColumnIndex::new(params.n());
    let (a, c, d) = (params.a(k), params.c(k), params.delta());
    let lins: Vec<RatPoly> = (0..params.n())
        .map(|i| UniPoly::linear(&d[i], &-&c[i]))
        .collect();
    let polys: Vec<RatPoly> = cols
        .pairs()
        .iter()
        .map(|&(i, j)| {
            let rest = RatPoly::from_roots(
                a.iter()
                    .enumerate()
                    .filter(|&(r, _)| r != i && r != j)
                    .map(|(_, x)| x),
            );
            &(&lins[i] * &lins[j]) * &rest
        })
        .collect();
    let rows = (0..g)
        .map(|n| polys.iter().map(|p| p.coeff(n)).collect())
        .collect();
    RatMatrix::from_rows(&Rationals, cols.len(), rows).expect("rows have one entry per pair")
}

/// A basis of `I_2(C)` as vectors of `s_ij`.
#[derive(Clone, Debug)]
pub struct QuadricBasis {
    pub columns: ColumnIndex,
    pub vectors: Vec<Vec<Rational>>,
}

impl QuadricBasis {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// `{"pairs": [[i, j], ...], "vectors": [["n/d", ...], ...]}` with 1-based
    /// node labels; entry `m` of a vector is the coefficient of `pairs[m]`.
    pub fn to_json(&self) -> Value {
        let pairs: Vec<[usize; 2]> = self
            .columns
            .pairs()
            .iter()
            .map(|&(i, j)| [i + 1, j + 1])
            .collect();
        let vectors: Vec<Vec<String>> = self
            .vectors
            .iter()
            .map(|v| v.iter().map(to_fraction_string).collect())
            .collect();
        json!({ "pairs": pairs, "vectors": vectors })
    }
}

/// Kernel of `Z`, checked against the expanded polynomials of both components.
pub fn i2_basis(params: &PrymCurveParams) -> Result<QuadricBasis> {
    let sys = build_z(params);
    let rank = rank_exact(&sys.z);
    if rank != sys.expected_rank() {
        return Err(Error::Degenerate(format!(
            "rank of Z is {rank}, expected {}",
            sys.expected_rank()
        )));
    }
    let vectors = nullspace(&sys.z);
    for k in Component::BOTH {
        let p = expand_p(params, k);
        if let Some(pos) = vectors.iter().position(|v| !annihilates(&p, v)) {
            return Err(Error::Internal(format!(
                "basis vector {pos} does not kill P_{k}(t)"
            )));
        }
    }
    Ok(QuadricBasis {
        columns: sys.columns,
        vectors,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DetCheck {
    /// Determinant of the rescaled minor.
    pub lhs: Rational,
    /// Closed-form product.
    pub rhs: Rational,
    /// `|lhs| == |rhs|`.
    pub matches: bool,
}

/// Columns of the `g x g` minor, with their scaling factors.
fn mtilde_columns(params: &PrymCurveParams, k: Component) -> Vec<((usize, usize), Rational)> {
    let g = params.g();
    let half = params.half();
    let (mu, c) = (params.mu(), params.c(k));
    let mut cols: Vec<((usize, usize), Rational)> = (1..g - 1)
        .map(|j| {
            let s = if j < half { mu * mu } else { -(mu * &c[j]) };
            ((0, j), s)
        })
        .collect();
    cols.push(((1, half), -(mu * &c[half])));
    cols.push(((g - 3, g - 2), &c[g - 3] * &c[g - 2]));
    cols
}

/// Closed form for the determinant of the rescaled minor (1-based `a_r`):
/// `V(a_3..a_{g-1}) * prod_{r != 2, h+1} (a_r - a_2) * prod_{s=3}^{h} a_s * prod_{j=1}^{g-3} a_j`
/// with `h = floor(g/2)` and `V` the Vandermonde product.
pub fn det1_formula(params: &PrymCurveParams, k: Component) -> Rational {
    let g = params.g();
    let half = params.half();
    let a = |r: usize| &params.a(k)[r - 1];
    let mut v = Rational::one();
    for i in 3..g {
        for j in i + 1..g {
            v *= a(j) - a(i);
        }
    }
    for r in (1..g).filter(|&r| r != 2 && r != half + 1) {
        v *= a(r) - a(2);
    }
    for s in 3..=half {
        v *= a(s);
    }
    for j in 1..=g - 3 {
        v *= a(j);
    }
    v
}

/// Determinant of the component-`k` minor on the columns
/// `(1,2..g-1), (2, h+1), (g-2, g-1)` (1-based) after dividing each column by
/// its scaling factor, compared up to sign with [`det1_formula`].
pub fn mtilde_det_check(params: &PrymCurveParams, k: Component) -> Result<DetCheck> {
    let cols = mtilde_columns(params, k);
    if let Some(((i, j), _)) = cols.iter().find(|(_, s)| s.is_zero()) {
        return Err(Error::ZeroScaling(format!(
            "for column ({}, {})",
            i + 1,
            j + 1
        )));
    }
    let sys = build_z(params);
    let block = sys.component_rows(k);
    let idx: Vec<usize> = cols
        .iter()
        .map(|&((i, j), _)| sys.columns.column(i, j).expect("valid pair"))
        .collect();
    let mut minor = block.select_cols(&idx);
    for (c, (_, s)) in cols.iter().enumerate() {
        let inv = s.recip();
        for r in 0..minor.rows() {
            let v = minor.get(r, c) * &inv;
            minor.set(r, c, v);
        }
    }
    let lhs = det_exact(&minor)?;
    let rhs = det1_formula(params, k);
    let matches = lhs.abs() == rhs.abs();
    Ok(DetCheck { lhs, rhs, matches })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::{rank_mod_p, rat};
    use crate::fixtures::appendix_a_params;
    use crate::prymcurve::{build_params, build_params_unchecked, random_params};

    fn ints(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| rat(x)).collect()
    }

    #[test]
    fn power_sums() {
        assert_eq!(q_power_sum(0, &rat(5), &rat(7)), rat(1));
        assert_eq!(q_power_sum(1, &rat(2), &rat(3)), rat(5));
        assert_eq!(q_power_sum(3, &rat(2), &rat(2)), rat(32));
        assert_eq!(q_power_sum(-1, &rat(2), &rat(2)), rat(0));
    }

    #[test]
    fn column_index_is_lexicographic() {
        let c = ColumnIndex::new(5);
        assert_eq!(c.len(), 10);
        for (col, &(i, j)) in c.pairs().iter().enumerate() {
            assert_eq!(c.column(i, j), Some(col));
            assert_eq!(c.column(j, i), Some(col));
        }
        assert_eq!(c.pair(0), (0, 1));
        assert_eq!(c.pair(4), (1, 2));
        assert_eq!(c.column(2, 2), None);
        assert_eq!(c.column(1, 5), None);
    }

    #[test]
    fn recurrence_matches_direct_definition() {
        let p = random_params(9, 3, 0).unwrap();
        let sys = build_z(&p);
        for k in Component::BOTH {
            for (col, &(i, j)) in sys.columns.pairs().iter().enumerate() {
                for h in 0..p.g() {
                    assert_eq!(
                        sys.z.get(sys.row_index(k, h), col),
                        &tilde_q(h, k, i, j, &p).unwrap()
                    );
                }
            }
        }
        assert!(tilde_q(9, Component::One, 0, 1, &p).is_err());
        assert!(tilde_q(0, Component::One, 2, 1, &p).is_err());
    }

    #[test]
    fn first_row_is_delta_product() {
        let p = random_params(8, 1, 0).unwrap();
        let half = p.half();
        for k in Component::BOTH {
            assert_eq!(tilde_q(0, k, 0, 1, &p).unwrap(), p.mu() * p.mu());
            assert!(tilde_q(0, k, half, half + 1, &p).unwrap().is_zero());
        }
    }

    #[test]
    fn genus_six_ranks() {
        let p = random_params(6, 11, 0).unwrap();
        let sys = build_z(&p);
        assert_eq!(rank_exact(&sys.z), 10);
        assert_eq!(rank_exact(&sys.component_rows(Component::One)), 6);
        assert_eq!(rank_exact(&sys.reduced_rows()), 10);
        assert!(i2_basis(&p).unwrap().is_empty());
    }

    #[test]
    fn identical_components_are_degenerate() {
        // c flips sign between the components, so the blocks differ; the
        // rank still drops, to 11 (independent rational oracle).
        let row = ints(&[3, 5, 7, 11, 13, 17, 19]);
        let p = build_params(8, [row.clone(), row]).unwrap();
        assert_eq!(rank_exact(&build_z(&p).z), 11);
        assert!(matches!(i2_basis(&p), Err(Error::Degenerate(_))));
    }

    #[test]
    fn expansion_spans_the_same_rows() {
        let p = random_params(10, 5, 0).unwrap();
        let sys = build_z(&p);
        let e = expand_p(&p, Component::One)
            .vstack(&expand_p(&p, Component::Two))
            .unwrap();
        let r = rank_exact(&sys.z);
        assert_eq!(rank_exact(&e), r);
        assert_eq!(rank_exact(&e.vstack(&sys.z).unwrap()), r);
    }

    #[test]
    fn basis_of_quadrics_genus_ten() {
        let p = random_params(10, 2, 0).unwrap();
        let b = i2_basis(&p).unwrap();
        assert_eq!(b.len(), 36 - 18);
        let js = b.to_json();
        assert_eq!(js["pairs"][0], json!([1, 2]));
        assert_eq!(js["vectors"].as_array().unwrap().len(), 18);
    }

    #[test]
    fn appendix_z_rank() {
        let sys = build_z(&appendix_a_params());
        assert_eq!(rank_mod_p(&sys.z, 131).unwrap(), 38);
    }

    #[test]
    fn determinant_formula_small_genera() {
        for g in 6..=9 {
            let p = random_params(g, 17, 0).unwrap();
            for k in Component::BOTH {
                let d = mtilde_det_check(&p, k).unwrap();
                assert!(d.matches, "g = {g}, k = {k}: {} vs {}", d.lhs, d.rhs);
                assert!(!d.rhs.is_zero());
            }
        }
    }

    #[test]
    fn determinant_formula_vanishes_on_collision() {
        let p = build_params_unchecked(7, [ints(&[2, 3, 5, 7, 7, 11]), ints(&[1, 4, 6, 8, 9, 10])])
            .unwrap();
        let d = mtilde_det_check(&p, Component::One).unwrap();
        assert!(d.lhs.is_zero() && d.rhs.is_zero() && d.matches);
    }
}
