//! Dense univariate polynomials over an exact field.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::field::{Field, Rational, Rationals};
use crate::error::{Error, Result};

/// Dense polynomial in `t`; `coeffs[n]` is the coefficient of `t^n`.
///
/// Always canonical: no trailing zero coefficient, so the zero polynomial has
/// an empty coefficient list and [`UniPoly::degree`] returns `None` for it.
#[derive(Clone, Debug, PartialEq)]
pub struct UniPoly<F: Field> {
    domain: F::Domain,
    coeffs: Vec<F>,
}

pub type RatPoly = UniPoly<Rational>;

impl<F: Field> UniPoly<F> {
    pub fn zero(domain: &F::Domain) -> Self {
        UniPoly {
            domain: domain.clone(),
            coeffs: Vec::new(),
        }
    }

    pub fn constant(c: F) -> Self {
        let domain = c.domain();
        Self::from_coeffs(&domain, vec![c])
    }

    pub fn from_coeffs(domain: &F::Domain, coeffs: Vec<F>) -> Self {
        let mut p = UniPoly {
            domain: domain.clone(),
            coeffs,
        };
        p.trim();
        p
    }

    /// The monic linear polynomial `t - root`.
    pub fn linear_root(root: &F) -> Self {
        let d = root.domain();
        Self::from_coeffs(&d, vec![root.negate(), F::one_in(&d)])
    }

    /// `lead * t + constant`.
    pub fn linear(lead: &F, constant: &F) -> Self {
        Self::from_coeffs(&lead.domain(), vec![constant.clone(), lead.clone()])
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(Field::vanishes) {
            self.coeffs.pop();
        }
    }

    pub fn domain(&self) -> &F::Domain {
        &self.domain
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    /// Coefficient of `t^n` (zero beyond the degree).
    pub fn coeff(&self, n: usize) -> F {
        self.coeffs
            .get(n)
            .cloned()
            .unwrap_or_else(|| F::zero_in(&self.domain))
    }

    /// `None` encodes the degree of the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading_coeff(&self) -> F {
        self.coeffs
            .last()
            .cloned()
            .unwrap_or_else(|| F::zero_in(&self.domain))
    }

    pub fn eval(&self, x: &F) -> F {
        self.coeffs
            .iter()
            .rev()
            .fold(F::zero_in(&self.domain), |acc, c| acc.times(x).plus(c))
    }

    pub fn scale(&self, c: &F) -> Self {
        Self::from_coeffs(
            &self.domain,
            self.coeffs.iter().map(|x| x.times(c)).collect(),
        )
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(n, c)| c.times(&F::from_i64(&self.domain, n as i64)))
            .collect();
        Self::from_coeffs(&self.domain, coeffs)
    }

    /// `self * (t - root)` in linear time.
    pub fn mul_linear_root(&self, root: &F) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let n = self.coeffs.len();
        let mut out = Vec::with_capacity(n + 1);
        out.push(self.coeffs[0].times(root).negate());
        for i in 1..n {
            out.push(self.coeffs[i - 1].minus(&self.coeffs[i].times(root)));
        }
        out.push(self.coeffs[n - 1].clone());
        Self::from_coeffs(&self.domain, out)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = UniPoly::constant(F::one_in(&self.domain));
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self> {
        if self.domain != rhs.domain {
            return Err(Error::DomainMismatch(format!(
                "{:?} vs {:?}",
                self.domain, rhs.domain
            )));
        }
        Ok(self.mul_unchecked(rhs))
    }

    fn mul_unchecked(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero(&self.domain);
        }
        let mut out = vec![F::zero_in(&self.domain); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.vanishes() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].plus(&a.times(b));
            }
        }
        Self::from_coeffs(&self.domain, out)
    }

    fn zip_with(&self, rhs: &Self, op: impl Fn(&F, &F) -> F) -> Self {
        assert_eq!(self.domain, rhs.domain, "polynomial domain mismatch");
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|i| op(&self.coeff(i), &rhs.coeff(i))).collect();
        Self::from_coeffs(&self.domain, coeffs)
    }

    /// Euclidean division: `self = q * divisor + r` with `deg r < deg divisor`.
    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self)> {
        if divisor.domain != self.domain {
            return Err(Error::DomainMismatch(format!(
                "{:?} vs {:?}",
                self.domain, divisor.domain
            )));
        }
        let dd = divisor
            .degree()
            .ok_or_else(|| Error::DivisionByZero("polynomial division by zero".into()))?;
        let lead_inv = divisor
            .leading_coeff()
            .inverse()
            .expect("nonzero leading coefficient");
        let mut rem = self.coeffs.clone();
        let Some(nd) = self.degree() else {
            return Ok((Self::zero(&self.domain), Self::zero(&self.domain)));
        };
        if nd < dd {
            return Ok((Self::zero(&self.domain), self.clone()));
        }
        let mut quot = vec![F::zero_in(&self.domain); nd - dd + 1];
        for shift in (0..=nd - dd).rev() {
            let c = rem[shift + dd].times(&lead_inv);
            if c.vanishes() {
                continue;
            }
            for (j, b) in divisor.coeffs.iter().enumerate() {
                rem[shift + j] = rem[shift + j].minus(&c.times(b));
            }
            quot[shift] = c;
        }
        rem.truncate(dd);
        Ok((
            Self::from_coeffs(&self.domain, quot),
            Self::from_coeffs(&self.domain, rem),
        ))
    }

    /// Division that must leave no remainder; a remainder is reported as an
    /// internal consistency failure.
    pub fn div_exact(&self, divisor: &Self) -> Result<Self> {
        let (q, r) = self.div_rem(divisor)?;
        if !r.is_zero() {
            return Err(Error::Internal(format!(
                "inexact polynomial division, remainder of degree {:?}",
                r.degree()
            )));
        }
        Ok(q)
    }
}

impl RatPoly {
    /// Product of the linear factors `t - r` over `roots`.
    pub fn from_roots<'a>(roots: impl IntoIterator<Item = &'a Rational>) -> Self {
        roots
            .into_iter()
            .fold(UniPoly::constant(Rational::one_in(&Rationals)), |acc, r| {
                acc.mul_linear_root(r)
            })
    }
}

/// Product of two polynomials over the same coefficient domain.
pub fn poly_mul<F: Field>(p: &UniPoly<F>, q: &UniPoly<F>) -> Result<UniPoly<F>> {
    p.checked_mul(q)
}

pub fn poly_derivative<F: Field>(p: &UniPoly<F>) -> UniPoly<F> {
    p.derivative()
}

impl<F: Field> Add for &UniPoly<F> {
    type Output = UniPoly<F>;
    fn add(self, rhs: Self) -> UniPoly<F> {
        self.zip_with(rhs, F::plus)
    }
}

impl<F: Field> Sub for &UniPoly<F> {
    type Output = UniPoly<F>;
    fn sub(self, rhs: Self) -> UniPoly<F> {
        self.zip_with(rhs, F::minus)
    }
}

/// Panics on mismatched domains; use [`poly_mul`] to get an error instead.
impl<F: Field> Mul for &UniPoly<F> {
    type Output = UniPoly<F>;
    fn mul(self, rhs: Self) -> UniPoly<F> {
        assert_eq!(self.domain, rhs.domain, "polynomial domain mismatch");
        self.mul_unchecked(rhs)
    }
}

impl<F: Field> Neg for &UniPoly<F> {
    type Output = UniPoly<F>;
    fn neg(self) -> UniPoly<F> {
        UniPoly::from_coeffs(&self.domain, self.coeffs.iter().map(F::negate).collect())
    }
}

impl<F: Field> fmt::Display for UniPoly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (n, c) in self.coeffs.iter().enumerate().rev() {
            if c.vanishes() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match n {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})*t")?,
                _ => write!(f, "({c})*t^{n}")?,
            }
        }
        Ok(())
    }
}
