//! Rank certificate for the second Gaussian map.
//!
//! `mu_A` sends `I_2(C)` to the non-torsion part (two polynomials `R_1`, `R_2`
//! of degree `2g - 6`) plus three torsion values at each of the `g + 1` nodes.
//! Stacking these linear conditions under `Z` gives the ranks
//! `r0 = rank Z`, `r1 = rank(Z + nu)`, `r2 = rank(Z + nu + tau)`, and
//! `rank mu_A = r2 - r0`.

use std::time::Instant;

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactla::{
    certify_rank, RankCertificate, RatMatrix, RatPoly, Rational, Rationals, UniPoly,
};
use crate::prymcurve::{component_polys, Component, PrymCurveParams};
use crate::quadrics::{build_z, ColumnIndex};

pub const DEFAULT_PRIMES: [u64; 2] = [131, 137];

/// `binom(g - 1, 2)`, the number of unknowns `s_ij`.
pub fn unknowns(g: usize) -> usize {
    (g - 1) * (g - 2) / 2
}

/// `dim I_2 = binom(g-1, 2) - (2g - 2)` for general parameters.
pub fn expected_dim_i2(g: usize) -> usize {
    unknowns(g).saturating_sub(2 * g - 2)
}

/// Dimension of the target: `2(2g - 5)` non-torsion plus `3(g + 1)` torsion.
pub fn target_dim(g: usize) -> usize {
    7 * g - 7
}

/// `R^k_ij(t) = (c_i - a_i delta_i)(c_j - a_j delta_j) prod_{r != i,j} (t - a_r)^2`,
/// cross-checked against `M_k^2 (d/dt)(f_i/M_k) (d/dt)(f_j/M_k)` computed with
/// the quotient rule.
pub fn nu_poly(params: &PrymCurveParams, k: Component, i: usize, j: usize) -> Result<RatPoly> {
    let m = params.m_poly(k);
    nu_poly_with(params, k, i, j, &(&m * &m))
}

fn nu_poly_with(
    params: &PrymCurveParams,
    k: Component,
    i: usize,
    j: usize,
    m_sq: &RatPoly,
) -> Result<RatPoly> {
    let n = params.n();
    if i >= j || j >= n {
        return Err(Error::IndexOutOfRange(format!(
            "pair ({i}, {j}) with g = {}",
            params.g()
        )));
    }
    let closed = nu_closed_form(params, k, i, j);
    let quotient = quotient_rule_numerator(params, k, i)
        .checked_mul(&quotient_rule_numerator(params, k, j))?;
    let denom = UniPoly::linear_root(&params.a(k)[i])
        .pow(2)
        .checked_mul(&UniPoly::linear_root(&params.a(k)[j]).pow(2))?;
    let via_derivatives = m_sq.div_exact(&denom)?.checked_mul(&quotient)?;
    if via_derivatives != closed {
        return Err(Error::Internal(format!(
            "nu polynomial mismatch at component {k}, pair ({i}, {j})"
        )));
    }
    Ok(closed)
}

fn nu_closed_form(params: &PrymCurveParams, k: Component, i: usize, j: usize) -> RatPoly {
    let (a, c, d) = (params.a(k), params.c(k), params.delta());
    let lead = (&c[i] - &a[i] * &d[i]) * (&c[j] - &a[j] * &d[j]);
    let others = RatPoly::from_roots(
        a.iter()
            .enumerate()
            .filter(|&(r, _)| r != i && r != j)
            .map(|(_, x)| x),
    );
    (&others * &others).scale(&lead)
}

/// `N' D - N D'` for `N = delta_i t - c_i`, `D = t - a_i`.
fn quotient_rule_numerator(params: &PrymCurveParams, k: Component, i: usize) -> RatPoly {
    let num = UniPoly::linear(&params.delta()[i], &-&params.c(k)[i]);
    let den = UniPoly::linear_root(&params.a(k)[i]);
    &(&num.derivative() * &den) - &(&num * &den.derivative())
}

/// `2(2g - 5)` rows: coefficients of `t^0..t^{2g-6}` of `R_1`, then of `R_2`.
pub fn build_nu_rows(params: &PrymCurveParams) -> Result<RatMatrix> {
    let cols = ColumnIndex::new(params.n());
    let deg = 2 * params.g() - 6;
    let mut rows = Vec::with_capacity(2 * (deg + 1));
    for k in Component::BOTH {
        let m = params.m_poly(k);
        let m_sq = &m * &m;
        let polys: Vec<RatPoly> = cols
            .pairs()
            .iter()
            .map(|&(i, j)| nu_poly_with(params, k, i, j, &m_sq))
            .collect::<Result<_>>()?;
        rows.extend((0..=deg).map(|n| polys.iter().map(|p| p.coeff(n)).collect()));
    }
    RatMatrix::from_rows(&Rationals, cols.len(), rows)
}

/// Rows in the form of the original elimination script: coefficients of
/// `t^0..t^{2g-6}` in `sum s_ij f'_i f'_j`. Only the row space is comparable
/// with [`build_nu_rows`] once stacked under `Z`.
pub fn script_nu_rows(params: &PrymCurveParams) -> Result<RatMatrix> {
    let cols = ColumnIndex::new(params.n());
    let deg = 2 * params.g() - 6;
    let mut rows = Vec::with_capacity(2 * (deg + 1));
    for k in Component::BOTH {
        let df: Vec<RatPoly> = component_polys(params, k)?
            .iter()
            .map(RatPoly::derivative)
            .collect();
        let prods: Vec<RatPoly> = cols.pairs().iter().map(|&(i, j)| &df[i] * &df[j]).collect();
        rows.extend((0..=deg).map(|n| prods.iter().map(|p| p.coeff(n)).collect()));
    }
    RatMatrix::from_rows(&Rationals, cols.len(), rows)
}

/// First and second derivatives of the coordinate functions of both components.
pub struct Derivatives {
    first: [Vec<RatPoly>; 2],
    second: [Vec<RatPoly>; 2],
}

impl Derivatives {
    pub fn new(params: &PrymCurveParams) -> Result<Self> {
        let mut first: [Vec<RatPoly>; 2] = [Vec::new(), Vec::new()];
        let mut second: [Vec<RatPoly>; 2] = [Vec::new(), Vec::new()];
        for k in Component::BOTH {
            first[k.index()] = component_polys(params, k)?
                .iter()
                .map(RatPoly::derivative)
                .collect();
            second[k.index()] = first[k.index()].iter().map(RatPoly::derivative).collect();
        }
        Ok(Derivatives { first, second })
    }

    fn eval(polys: &[RatPoly], t: &Rational) -> Vec<Rational> {
        polys.iter().map(|p| p.eval(t)).collect()
    }
}

/// Position of a node in the torsion part.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Node {
    /// Coordinate node, 0-based (`t = a[k][i]` on both components).
    Coordinate(usize),
    /// `P_g`, the image of `t = 0`.
    Origin,
    /// `P_{g+1}`, the image of `t = infinity`.
    Infinity,
}

impl Node {
    pub fn all(g: usize) -> impl Iterator<Item = Node> {
        (0..g - 1)
            .map(Node::Coordinate)
            .chain([Node::Origin, Node::Infinity])
    }
}

fn symmetrize(cols: &ColumnIndex, u: &[Rational], v: &[Rational]) -> Vec<Rational> {
    cols.pairs()
        .iter()
        .map(|&(i, j)| &u[i] * &v[j] + &u[j] * &v[i])
        .collect()
}

/// The three torsion rows at `node`. At finite nodes the slots are
/// `f'_1 f'_2`, `f''_1 f'_2`, `f'_1 f''_2`, each symmetrized over `i, j`; at
/// infinity they use the leading data `X_i = delta_i a_{i,1} - c_{i,1}`,
/// `Y_i = delta_i a_{i,2} - c_{i,2}`.
pub fn torsion_rows_at(
    params: &PrymCurveParams,
    der: &Derivatives,
    node: Node,
) -> [Vec<Rational>; 3] {
    let cols = ColumnIndex::new(params.n());
    let (t1, t2) = match node {
        Node::Coordinate(h) => (
            params.a(Component::One)[h].clone(),
            params.a(Component::Two)[h].clone(),
        ),
        Node::Origin => (Rational::zero(), Rational::zero()),
        Node::Infinity => return torsion_rows_at_infinity(params, &cols),
    };
    let d1 = Derivatives::eval(&der.first[0], &t1);
    let dd1 = Derivatives::eval(&der.second[0], &t1);
    let d2 = Derivatives::eval(&der.first[1], &t2);
    let dd2 = Derivatives::eval(&der.second[1], &t2);
    [
        symmetrize(&cols, &d1, &d2),
        symmetrize(&cols, &dd1, &d2),
        symmetrize(&cols, &d1, &dd2),
    ]
}

fn torsion_rows_at_infinity(params: &PrymCurveParams, cols: &ColumnIndex) -> [Vec<Rational>; 3] {
    let (a1, a2) = (params.a(Component::One), params.a(Component::Two));
    let (c1, c2) = (params.c(Component::One), params.c(Component::Two));
    let d = params.delta();
    let x: Vec<Rational> = (0..params.n()).map(|i| &d[i] * &a1[i] - &c1[i]).collect();
    let y: Vec<Rational> = (0..params.n()).map(|i| &d[i] * &a2[i] - &c2[i]).collect();
    let pairs = cols.pairs();
    let slot1 = pairs
        .iter()
        .map(|&(i, j)| &x[i] * &y[j] + &x[j] * &y[i])
        .collect();
    let slot2 = pairs
        .iter()
        .map(|&(i, j)| &a1[i] * &x[i] * &y[j] + &a1[j] * &x[j] * &y[i])
        .collect();
    let slot3 = pairs
        .iter()
        .map(|&(i, j)| &a2[j] * &x[i] * &y[j] + &a2[i] * &x[j] * &y[i])
        .collect();
    [slot1, slot2, slot3]
}

/// `3(g + 1)` rows: nodes `P_1..P_{g-1}`, then `P_g`, then `P_{g+1}`.
pub fn build_torsion_rows(params: &PrymCurveParams) -> Result<RatMatrix> {
    let der = Derivatives::new(params)?;
    let rows: Vec<Vec<Rational>> = Node::all(params.g())
        .flat_map(|node| torsion_rows_at(params, &der, node))
        .collect();
    RatMatrix::from_rows(&Rationals, unknowns(params.g()), rows)
}

/// The three stacked systems `Z`, `Z + nu`, `Z + nu + tau`.
pub struct GaussSystems {
    pub z: RatMatrix,
    pub z_nu: RatMatrix,
    pub full: RatMatrix,
}

pub fn build_systems(params: &PrymCurveParams) -> Result<GaussSystems> {
    let z = build_z(params).z;
    let z_nu = z.vstack(&build_nu_rows(params)?)?;
    let full = z_nu.vstack(&build_torsion_rows(params)?)?;
    Ok(GaussSystems { z, z_nu, full })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// `I_2 = 0`: nothing to map.
    Trivial,
    Isomorphism,
    Surjective,
    Injective,
    Neither,
}

#[derive(Clone, Debug, Serialize)]
pub struct SurjectivityReport {
    pub g: usize,
    pub r0: usize,
    pub r1: usize,
    pub r2: usize,
    pub unknowns: usize,
    pub dim_i2: usize,
    pub target_dim: usize,
    /// `r2 - r0`.
    pub rank_mu: usize,
    /// `rank_mu == target_dim`.
    pub surjective: bool,
    /// `r2 == unknowns`, i.e. the stacked system has trivial kernel.
    pub injective: bool,
    pub verdict: Verdict,
    /// Some prime disagreed with the others; all values are in `certificates`.
    pub inconclusive: bool,
    pub primes: Vec<u64>,
    pub certificates: [RankCertificate; 3],
    pub params_digest: String,
    pub elapsed_ms: u64,
}

/// Ranks of the three stacked systems, each certified against its proven upper
/// bound (`2g - 2`, then `+ 2(2g - 5)`, then `+ 3(g + 1)` capped at the number
/// of unknowns).
pub fn surjectivity_report(params: &PrymCurveParams, primes: &[u64]) -> Result<SurjectivityReport> {
    let start = Instant::now();
    let g = params.g();
    let n_unknowns = unknowns(g);
    let sys = build_systems(params)?;
    let c0 = certify_rank(&sys.z, primes, (2 * g - 2).min(n_unknowns))?;
    let c1 = certify_rank(
        &sys.z_nu,
        primes,
        (c0.rank + 2 * (2 * g - 5)).min(n_unknowns),
    )?;
    let c2 = certify_rank(&sys.full, primes, (c1.rank + 3 * (g + 1)).min(n_unknowns))?;
    let (r0, r1, r2) = (c0.rank, c1.rank, c2.rank);
    let dim_i2 = n_unknowns - r0;
    let rank_mu = r2 - r0;
    let surjective = rank_mu == target_dim(g);
    let injective = r2 == n_unknowns;
    let verdict = match (dim_i2 == 0, surjective, injective) {
        (true, _, _) => Verdict::Trivial,
        (false, true, true) => Verdict::Isomorphism,
        (false, true, false) => Verdict::Surjective,
        (false, false, true) => Verdict::Injective,
        (false, false, false) => Verdict::Neither,
    };
    let mut used: Vec<u64> = [&c0, &c1, &c2]
        .iter()
        .flat_map(|c| c.per_prime.iter().map(|p| p.prime))
        .collect();
    used.sort_unstable();
    used.dedup();
    Ok(SurjectivityReport {
        g,
        r0,
        r1,
        r2,
        unknowns: n_unknowns,
        dim_i2,
        target_dim: target_dim(g),
        rank_mu,
        surjective,
        injective,
        verdict,
        inconclusive: c0.inconclusive || c1.inconclusive || c2.inconclusive,
        primes: used,
        certificates: [c0, c1, c2],
        params_digest: params.digest(),
        elapsed_ms: start.elapsed().as_millis() as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::{rank_exact, rank_mod_p};
    use crate::fixtures::{appendix_a_params, APPENDIX_A_RANKS};
    use crate::prymcurve::random_params;

    #[test]
    fn dimension_bookkeeping() {
        assert_eq!(unknowns(20), 171);
        assert_eq!(expected_dim_i2(20), 133);
        assert_eq!(target_dim(20), 133);
        assert_eq!(expected_dim_i2(6), 0);
        for g in (6..40).filter(|&g| g != 20) {
            assert_ne!(expected_dim_i2(g), target_dim(g));
        }
    }

    #[test]
    fn nu_degree_and_support() {
        let p = random_params(9, 4, 0).unwrap();
        for k in Component::BOTH {
            let r = nu_poly(&p, k, 0, 1).unwrap();
            assert_eq!(r.degree(), Some(2 * 9 - 6));
            for x in &p.a(k)[2..] {
                assert!(r.eval(x).is_zero());
            }
        }
        assert!(nu_poly(&p, Component::One, 3, 3).is_err());
    }

    #[test]
    fn row_counts() {
        let p = random_params(8, 4, 0).unwrap();
        assert_eq!(build_nu_rows(&p).unwrap().rows(), 2 * (2 * 8 - 5));
        assert_eq!(build_torsion_rows(&p).unwrap().rows(), 3 * 9);
    }

    #[test]
    fn script_rows_span_the_same_space_modulo_z() {
        let p = random_params(11, 9, 0).unwrap();
        let z = build_z(&p).z;
        let a = z.vstack(&build_nu_rows(&p).unwrap()).unwrap();
        let b = z.vstack(&script_nu_rows(&p).unwrap()).unwrap();
        assert_eq!(rank_exact(&a), rank_exact(&b));
        assert_eq!(rank_exact(&a.vstack(&b).unwrap()), rank_exact(&a));
    }

    #[test]
    fn zero_quadric_maps_to_zero() {
        let p = random_params(8, 2, 0).unwrap();
        let zero = vec![Rational::zero(); unknowns(8)];
        let sys = build_systems(&p).unwrap();
        assert!(sys.full.mul_vec(&zero).unwrap().iter().all(Zero::is_zero));
    }

    #[test]
    fn appendix_certificate() {
        let r = surjectivity_report(&appendix_a_params(), &[131]).unwrap();
        assert_eq!((r.r0, r.r1, r.r2), APPENDIX_A_RANKS);
        assert_eq!(r.verdict, Verdict::Isomorphism);
        assert!(!r.inconclusive);
    }

    #[test]
    fn script_rows_reproduce_r1_at_genus_twenty() {
        let p = appendix_a_params();
        let z = build_z(&p).z;
        let m = z.vstack(&script_nu_rows(&p).unwrap()).unwrap();
        assert_eq!(rank_mod_p(&m, 131).unwrap(), 108);
    }

    #[test]
    fn genus_six_is_trivial() {
        let r = surjectivity_report(&random_params(6, 1, 0).unwrap(), &DEFAULT_PRIMES).unwrap();
        assert_eq!(r.dim_i2, 0);
        assert_eq!(r.verdict, Verdict::Trivial);
        assert!(r.injective);
    }
}
