//! Induction step from genus `g` to `g + 1`.
//!
//! Projecting from the node `P` (`P_k` for `g = 2k`, `P_{k+1}` for
//! `g = 2k + 1`) leaves four conditions from `nu` (values and derivatives of
//! `R_1`, `R_2` at `P`) and three torsion conditions at `P`. The step goes
//! through when `Y = Z' + chi` has rank `2g + 2` and `X = Y + tau_P` has rank
//! `2g + 5`, where `Z'` is the `2g - 2` row subset of `Z`.

pub mod appendix_b;

use std::time::Instant;

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactla::{certify_rank, RankCertificate, RatMatrix, Rational, Rationals};
use crate::gaussmap::{nu_poly, torsion_rows_at, unknowns, Derivatives, Node};
use crate::prymcurve::{node_discriminant, Component, PrymCurveParams};
use crate::quadrics::{build_z, ColumnIndex};

pub const MIN_INDUCTION_GENUS: usize = 20;

/// 0-based index of the projected node.
pub fn projection_node(g: usize) -> usize {
    let half = g / 2;
    if g.is_multiple_of(2) {
        half - 1
    } else {
        half
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChiRows {
    /// 0-based index of `P`.
    pub node: usize,
    /// `R_1(a_{P,1})`, `R_1'(a_{P,1})`, `R_2(a_{P,2})`, `R_2'(a_{P,2})`.
    pub rows: [Vec<Rational>; 4],
}

impl ChiRows {
    pub fn matrix(&self) -> RatMatrix {
        RatMatrix::from_rows(&Rationals, self.rows[0].len(), self.rows.to_vec())
            .expect("equal row lengths")
    }
}

/// Closed-form value and derivative of `R^l_{i,P}` at `a_{P,l}`.
fn chi_closed_form(
    params: &PrymCurveParams,
    l: Component,
    p: usize,
    other: usize,
) -> (Rational, Rational) {
    let g = params.g();
    let (a, c, mu) = (params.a(l), params.c(l), params.mu());
    let gap = &a[p] - &a[other];
    let d = node_discriminant(params, l, p) / (&gap * &gap);
    let coeff = match (g.is_multiple_of(2), other < p) {
        (true, true) => mu * mu * &a[other] * &a[p],
        (true, false) => -(mu * &c[other] * &a[p]),
        (false, true) => -(mu * &a[other] * &c[p]),
        (false, false) => &c[other] * &c[p],
    };
    let value = coeff * d;
    let log_derivative: Rational = (0..params.n())
        .filter(|&r| r != other && r != p)
        .map(|r| (&a[p] - &a[r]).recip())
        .sum();
    let derivative = &value * Rational::from_integer(2.into()) * log_derivative;
    (value, derivative)
}

/// The four `chi` rows, computed from the closed forms and checked entrywise
/// against evaluation of the `nu` polynomials and their derivatives.
pub fn chi_rows(params: &PrymCurveParams) -> Result<ChiRows> {
    let g = params.g();
    if g < 6 {
        return Err(Error::InvalidParams(format!(
            "genus {g} too small for the induction step"
        )));
    }
    let p = projection_node(g);
    let cols = ColumnIndex::new(params.n());
    let mut rows: [Vec<Rational>; 4] = Default::default();
    for l in Component::BOTH {
        let x = &params.a(l)[p];
        let mut values = Vec::with_capacity(cols.len());
        let mut derivs = Vec::with_capacity(cols.len());
        for &(i, j) in cols.pairs() {
            let r = nu_poly(params, l, i, j)?;
            let (ev, ed) = (r.eval(x), r.derivative().eval(x));
            let (cv, cd) = if i == p || j == p {
                chi_closed_form(params, l, p, if i == p { j } else { i })
            } else {
                (Rational::zero(), Rational::zero())
            };
            if ev != cv || ed != cd {
                return Err(Error::Internal(format!(
                    "chi closed form disagrees with evaluation at component {l}, pair ({}, {})",
                    i + 1,
                    j + 1
                )));
            }
            values.push(cv);
            derivs.push(cd);
        }
        rows[2 * l.index()] = values;
        rows[2 * l.index() + 1] = derivs;
    }
    Ok(ChiRows { node: p, rows })
}

/// The torsion rows `T_1, T_2, T_3` at the projected node.
pub fn tau_p_rows(params: &PrymCurveParams) -> Result<RatMatrix> {
    let der = Derivatives::new(params)?;
    let rows = torsion_rows_at(params, &der, Node::Coordinate(projection_node(params.g())));
    RatMatrix::from_rows(&Rationals, unknowns(params.g()), rows.to_vec())
}

#[derive(Clone, Debug, Serialize)]
pub struct InductionReport {
    pub g: usize,
    /// 1-based label of the projected node.
    pub node: usize,
    pub rank_z: usize,
    pub rank_y: usize,
    pub rank_x: usize,
    pub target_y: usize,
    pub target_x: usize,
    pub pass: bool,
    pub certificates: [RankCertificate; 3],
    pub params_digest: String,
    pub elapsed_ms: u64,
}

/// Stacked matrices of the induction step: `(Z', Y, X)`.
pub fn induction_matrices(params: &PrymCurveParams) -> Result<(RatMatrix, RatMatrix, RatMatrix)> {
    let z = build_z(params).reduced_rows();
    let y = z.vstack(&chi_rows(params)?.matrix())?;
    let x = y.vstack(&tau_p_rows(params)?)?;
    Ok((z, y, x))
}

pub fn check_induction(params: &PrymCurveParams, primes: &[u64]) -> Result<InductionReport> {
    let start = Instant::now();
    let g = params.g();
    if g < MIN_INDUCTION_GENUS {
        return Err(Error::InvalidParams(format!(
            "induction step needs g >= {MIN_INDUCTION_GENUS}, got {g}"
        )));
    }
    let (z, y, x) = induction_matrices(params)?;
    let cz = certify_rank(&z, primes, 2 * g - 2)?;
    if !cz.is_maximal() {
        return Err(Error::Degenerate(format!(
            "rank of Z is {}, expected {}",
            cz.rank,
            2 * g - 2
        )));
    }
    let (target_y, target_x) = (2 * g + 2, 2 * g + 5);
    let cy = certify_rank(&y, primes, target_y)?;
    let cx = certify_rank(&x, primes, target_x)?;
    Ok(InductionReport {
        g,
        node: projection_node(g) + 1,
        rank_z: cz.rank,
        rank_y: cy.rank,
        rank_x: cx.rank,
        target_y,
        target_x,
        pass: cy.rank == target_y && cx.rank == target_x,
        certificates: [cz, cy, cx],
        params_digest: params.digest(),
        elapsed_ms: start.elapsed().as_millis() as u64,
    })
}

/// `true` when `v` vanishes off the pairs containing `node`.
pub fn supported_on_node(cols: &ColumnIndex, v: &[Rational], node: usize) -> bool {
    cols.pairs()
        .iter()
        .zip(v)
        .all(|(&(i, j), x)| i == node || j == node || x.is_zero())
}
