//! Coefficient domains: arbitrary-precision rationals and prime fields.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number, always kept in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// An exact coefficient field.
///
/// Elements carry their domain (the prime modulus for [`Fp`], nothing for
/// [`Rational`]) so that containers can refuse to mix domains.
pub trait Field: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static {
    type Domain: Clone + PartialEq + fmt::Debug + Send + Sync;

    fn domain(&self) -> Self::Domain;
    fn zero_in(domain: &Self::Domain) -> Self;
    fn one_in(domain: &Self::Domain) -> Self;
    fn from_i64(domain: &Self::Domain, v: i64) -> Self;
    fn vanishes(&self) -> bool;
    fn plus(&self, rhs: &Self) -> Self;
    fn minus(&self, rhs: &Self) -> Self;
    fn times(&self, rhs: &Self) -> Self;
    fn negate(&self) -> Self;
    fn inverse(&self) -> Option<Self>;
}

/// Marker domain of the rational numbers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Rationals;

impl Field for Rational {
    type Domain = Rationals;

    fn domain(&self) -> Rationals {
        Rationals
    }
    fn zero_in(_: &Rationals) -> Self {
        Rational::zero()
    }
    fn one_in(_: &Rationals) -> Self {
        Rational::one()
    }
    fn from_i64(_: &Rationals, v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }
    fn vanishes(&self) -> bool {
        Zero::is_zero(self)
    }
    // Integer operands skip the gcd normalization, which dominates the cost of
    // polynomial arithmetic with integer node parameters.
    fn plus(&self, rhs: &Self) -> Self {
        if self.denom().is_one() && rhs.denom().is_one() {
            return Rational::from_integer(self.numer() + rhs.numer());
        }
        self + rhs
    }
    fn minus(&self, rhs: &Self) -> Self {
        if self.denom().is_one() && rhs.denom().is_one() {
            return Rational::from_integer(self.numer() - rhs.numer());
        }
        self - rhs
    }
    fn times(&self, rhs: &Self) -> Self {
        if self.denom().is_one() && rhs.denom().is_one() {
            return Rational::from_integer(self.numer() * rhs.numer());
        }
        self * rhs
    }
    fn negate(&self) -> Self {
        -self
    }
    fn inverse(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(BigRational::recip(self))
        }
    }
}

/// Modulus of a prime field. Kept below 2^32 so products fit in a `u64`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Modulus(u64);

impl Modulus {
    pub fn new(p: u64) -> Result<Self> {
        if p >= (1 << 32) || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Modulus(p))
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

/// Element of GF(p).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fp {
    value: u64,
    modulus: u64,
}

impl Fp {
    pub fn new(value: u64, modulus: Modulus) -> Self {
        Fp {
            value: value % modulus.0,
            modulus: modulus.0,
        }
    }

    pub fn value(self) -> u64 {
        self.value
    }

    pub fn modulus(self) -> Modulus {
        Modulus(self.modulus)
    }

    /// Reduces a rational number; fails when the denominator vanishes mod p.
    pub fn from_rational(x: &Rational, modulus: Modulus) -> Option<Self> {
        let p = modulus.0;
        let den = reduce_bigint(x.denom(), p);
        if den == 0 {
            return None;
        }
        let num = reduce_bigint(x.numer(), p);
        Some(Fp {
            value: num * inv_mod(den, p) % p,
            modulus: p,
        })
    }

    fn check(self, rhs: Fp) {
        assert_eq!(self.modulus, rhs.modulus, "mixed prime-field moduli");
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus)
    }
}

impl Field for Fp {
    type Domain = Modulus;

    fn domain(&self) -> Modulus {
        Modulus(self.modulus)
    }
    fn zero_in(m: &Modulus) -> Self {
        Fp {
            value: 0,
            modulus: m.0,
        }
    }
    fn one_in(m: &Modulus) -> Self {
        Fp {
            value: 1 % m.0,
            modulus: m.0,
        }
    }
    fn from_i64(m: &Modulus, v: i64) -> Self {
        Fp {
            value: v.rem_euclid(m.0 as i64) as u64,
            modulus: m.0,
        }
    }
    fn vanishes(&self) -> bool {
        self.value == 0
    }
    fn plus(&self, rhs: &Self) -> Self {
        self.check(*rhs);
        Fp {
            value: (self.value + rhs.value) % self.modulus,
            modulus: self.modulus,
        }
    }
    fn minus(&self, rhs: &Self) -> Self {
        self.check(*rhs);
        Fp {
            value: (self.value + self.modulus - rhs.value) % self.modulus,
            modulus: self.modulus,
        }
    }
    fn times(&self, rhs: &Self) -> Self {
        self.check(*rhs);
        Fp {
            value: self.value * rhs.value % self.modulus,
            modulus: self.modulus,
        }
    }
    fn negate(&self) -> Self {
        Fp {
            value: (self.modulus - self.value) % self.modulus,
            modulus: self.modulus,
        }
    }
    fn inverse(&self) -> Option<Self> {
        (self.value != 0).then(|| Fp {
            value: inv_mod(self.value, self.modulus),
            modulus: self.modulus,
        })
    }
}

/// Non-negative residue of `x` modulo `p`.
pub fn reduce_bigint(x: &BigInt, p: u64) -> u64 {
    let r = x.mod_floor(&BigInt::from(p));
    r.to_u64().expect("residue fits in u64")
}

/// Inverse of a nonzero residue modulo a prime `p < 2^32`.
pub fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

pub fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Smallest prime strictly greater than `n`.
pub fn next_prime(n: u64) -> u64 {
    let mut m = n + 1;
    while !is_prime(m) {
        m += 1;
    }
    m
}

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Formats as `num/den`, the exchange format used by matrix dumps and reports.
pub fn to_fraction_string(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parses `n`, `-n` or `n/d` (d nonzero).
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let parse_int = |t: &str| -> Result<BigInt> {
        t.trim()
            .parse::<BigInt>()
            .map_err(|_| Error::Parse(format!("not an integer: `{t}`")))
    };
    match s.split_once('/') {
        None => Ok(Rational::from_integer(parse_int(s)?)),
        Some((n, d)) => {
            let den = parse_int(d)?;
            if den.is_zero() {
                return Err(Error::Parse(format!("zero denominator in `{s}`")));
            }
            Ok(Rational::new(parse_int(n)?, den))
        }
    }
}

/// Least common multiple of the denominators of `xs` (1 for an empty slice).
pub fn denominator_lcm<'a>(xs: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    xs.into_iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

pub fn abs(x: &Rational) -> Rational {
    Signed::abs(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_arithmetic() {
        let m = Modulus::new(131).unwrap();
        let a = Fp::new(100, m);
        let b = Fp::new(50, m);
        assert_eq!(a.plus(&b).value(), 19);
        assert_eq!(b.minus(&a).value(), 81);
        assert_eq!(a.times(&a.inverse().unwrap()).value(), 1);
        assert!(Fp::zero_in(&m).inverse().is_none());
        assert_eq!(Fp::from_i64(&m, -1).value(), 130);
    }

    #[test]
    fn rational_reduction_mod_p() {
        let m = Modulus::new(7).unwrap();
        // 3/2 = 3 * 4 = 12 = 5 (mod 7)
        assert_eq!(Fp::from_rational(&ratio(3, 2), m).unwrap().value(), 5);
        assert_eq!(Fp::from_rational(&ratio(-1, 3), m).unwrap().value(), 2);
        assert!(Fp::from_rational(&ratio(1, 14), m).is_none());
    }

    #[test]
    fn modulus_rejects_composites() {
        assert_eq!(Modulus::new(133), Err(Error::NotPrime(133)));
        assert!(Modulus::new(131).is_ok());
        assert_eq!(next_prime(131), 137);
        assert_eq!(next_prime(137), 139);
    }

    #[test]
    fn fraction_strings() {
        assert_eq!(to_fraction_string(&ratio(-6, 4)), "-3/2");
        assert_eq!(to_fraction_string(&rat(0)), "0/1");
        assert_eq!(parse_rational(" 12 ").unwrap(), rat(12));
        assert_eq!(parse_rational("-3/2").unwrap(), ratio(-3, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }
}
