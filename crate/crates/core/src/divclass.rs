//! Divisor classes on the partial compactification of the Prym moduli space.
//!
//! Classes are written in the basis `lambda, delta'_0, delta''_0, delta_0^ram`.
//! Classes on the universal curve are truncated at degree 2 in `c_1(omega_f)`,
//! `c_1(P)` and the codimension-two class `[Z]` of the nodes.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::exactla::{rat, ratio, to_fraction_string, Rational};
use crate::gaussmap::expected_dim_i2;

/// Genus of the degeneracy divisor.
pub const DIVISOR_GENUS: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct DivClass {
    pub lambda: Rational,
    pub delta_prime: Rational,
    pub delta_second: Rational,
    pub delta_ram: Rational,
    /// Other boundary classes appear with coefficients that are not computed.
    pub unknown_remainder: bool,
}

impl DivClass {
    pub fn new(
        lambda: Rational,
        delta_prime: Rational,
        delta_second: Rational,
        delta_ram: Rational,
    ) -> Self {
        DivClass {
            lambda,
            delta_prime,
            delta_second,
            delta_ram,
            unknown_remainder: false,
        }
    }

    pub fn from_ints(lambda: i64, delta_prime: i64, delta_second: i64, delta_ram: i64) -> Self {
        DivClass::new(
            rat(lambda),
            rat(delta_prime),
            rat(delta_second),
            rat(delta_ram),
        )
    }

    pub fn lambda() -> Self {
        DivClass::from_ints(1, 0, 0, 0)
    }

    /// `delta'_0 + delta''_0 + 2 delta_0^ram`, the pushforward of `[Z]`.
    pub fn nodes() -> Self {
        DivClass::from_ints(0, 1, 1, 2)
    }

    pub fn coefficients(&self) -> [&Rational; 4] {
        [
            &self.lambda,
            &self.delta_prime,
            &self.delta_second,
            &self.delta_ram,
        ]
    }

    pub fn scale(&self, s: &Rational) -> Self {
        DivClass {
            lambda: &self.lambda * s,
            delta_prime: &self.delta_prime * s,
            delta_second: &self.delta_second * s,
            delta_ram: &self.delta_ram * s,
            unknown_remainder: self.unknown_remainder,
        }
    }

    /// Restriction to the interior: all boundary classes dropped.
    pub fn interior(&self) -> Self {
        DivClass {
            lambda: self.lambda.clone(),
            ..DivClass::default()
        }
    }

    pub fn with_unknown_remainder(mut self) -> Self {
        self.unknown_remainder = true;
        self
    }

    /// Equality of the four tracked coefficients, ignoring the remainder flag.
    pub fn same_coefficients(&self, other: &DivClass) -> bool {
        self.coefficients() == other.coefficients()
    }
}

impl Add for &DivClass {
    type Output = DivClass;
    fn add(self, rhs: &DivClass) -> DivClass {
        DivClass {
            lambda: &self.lambda + &rhs.lambda,
            delta_prime: &self.delta_prime + &rhs.delta_prime,
            delta_second: &self.delta_second + &rhs.delta_second,
            delta_ram: &self.delta_ram + &rhs.delta_ram,
            unknown_remainder: self.unknown_remainder || rhs.unknown_remainder,
        }
    }
}

impl Sub for &DivClass {
    type Output = DivClass;
    fn sub(self, rhs: &DivClass) -> DivClass {
        self + &(-rhs)
    }
}

impl Neg for &DivClass {
    type Output = DivClass;
    fn neg(self) -> DivClass {
        self.scale(&-Rational::one())
    }
}

impl Mul<&DivClass> for &Rational {
    type Output = DivClass;
    fn mul(self, rhs: &DivClass) -> DivClass {
        rhs.scale(self)
    }
}

fn write_term(
    f: &mut fmt::Formatter<'_>,
    first: &mut bool,
    c: &Rational,
    name: &str,
) -> fmt::Result {
    if c.is_zero() {
        return Ok(());
    }
    let mag = if c < &Rational::zero() { -c } else { c.clone() };
    let sign = if c < &Rational::zero() { "-" } else { "+" };
    if *first {
        if sign == "-" {
            write!(f, "-")?;
        }
    } else {
        write!(f, " {sign} ")?;
    }
    *first = false;
    if mag.is_one() {
        write!(f, "{name}")
    } else {
        write!(f, "{mag} {name}")
    }
}

impl fmt::Display for DivClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (c, name) in
            self.coefficients()
                .into_iter()
                .zip(["lambda", "delta'_0", "delta''_0", "delta_0^ram"])
        {
            write_term(f, &mut first, c, name)?;
        }
        if first {
            write!(f, "0")?;
        }
        if self.unknown_remainder {
            write!(f, " + ...")?;
        }
        Ok(())
    }
}

impl Serialize for DivClass {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("DivClass", 5)?;
        st.serialize_field("lambda", &to_fraction_string(&self.lambda))?;
        st.serialize_field("delta_prime", &to_fraction_string(&self.delta_prime))?;
        st.serialize_field("delta_second", &to_fraction_string(&self.delta_second))?;
        st.serialize_field("delta_ram", &to_fraction_string(&self.delta_ram))?;
        st.serialize_field("unknown_remainder", &self.unknown_remainder)?;
        st.end()
    }
}

/// Degree-2 class on the universal curve.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct UpstairsClass {
    pub omega_sq: Rational,
    pub omega_p: Rational,
    pub p_sq: Rational,
    pub z: Rational,
}

impl UpstairsClass {
    pub fn new(omega_sq: Rational, omega_p: Rational, p_sq: Rational, z: Rational) -> Self {
        UpstairsClass {
            omega_sq,
            omega_p,
            p_sq,
            z,
        }
    }

    pub fn scale(&self, s: &Rational) -> Self {
        UpstairsClass::new(
            &self.omega_sq * s,
            &self.omega_p * s,
            &self.p_sq * s,
            &self.z * s,
        )
    }
}

impl Add for &UpstairsClass {
    type Output = UpstairsClass;
    fn add(self, rhs: &UpstairsClass) -> UpstairsClass {
        UpstairsClass::new(
            &self.omega_sq + &rhs.omega_sq,
            &self.omega_p + &rhs.omega_p,
            &self.p_sq + &rhs.p_sq,
            &self.z + &rhs.z,
        )
    }
}

impl Serialize for UpstairsClass {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("UpstairsClass", 4)?;
        st.serialize_field("omega_sq", &to_fraction_string(&self.omega_sq))?;
        st.serialize_field("omega_p", &to_fraction_string(&self.omega_p))?;
        st.serialize_field("p_sq", &to_fraction_string(&self.p_sq))?;
        st.serialize_field("z", &to_fraction_string(&self.z))?;
        st.end()
    }
}

/// Sign in Mumford's relation `f_*(omega^2) = 12 lambda -/+ f_*[Z]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OmegaSquaredRule {
    #[default]
    Minus,
    /// The `+` sign; gives a different degeneracy class.
    Plus,
}

/// `c_1(F_i) = i(i-1)/2 (12 lambda - delta'_0 - delta''_0 - 2 delta_0^ram) + lambda - i^2/4 delta_0^ram`.
pub fn c1_f(i: u32) -> DivClass {
    let i = i64::from(i);
    let kappa = &DivClass::lambda().scale(&rat(12)) - &DivClass::nodes();
    let ram = DivClass::from_ints(0, 0, 0, 1);
    &(&kappa.scale(&rat(i * (i - 1) / 2)) + &DivClass::lambda()) - &ram.scale(&ratio(i * i, 4))
}

/// `c_1(S^2 F_1)`: `F_1` has rank `g - 1`, so the symmetric square contributes `g c_1(F_1)`.
pub fn c1_sym2_f1(g: usize) -> DivClass {
    c1_f(1).scale(&rat(g as i64))
}

/// `c_1(I_2) = c_1(S^2 F_1) - c_1(F_2)`.
pub fn c1_i2(g: usize) -> DivClass {
    &c1_sym2_f1(g) - &c1_f(2)
}

pub fn pushforward(u: &UpstairsClass, rule: OmegaSquaredRule) -> DivClass {
    let kappa = match rule {
        OmegaSquaredRule::Minus => &DivClass::lambda().scale(&rat(12)) - &DivClass::nodes(),
        OmegaSquaredRule::Plus => &DivClass::lambda().scale(&rat(12)) + &DivClass::nodes(),
    };
    let p_sq = DivClass::new(
        Rational::zero(),
        Rational::zero(),
        Rational::zero(),
        ratio(-1, 2),
    );
    let parts = [
        kappa.scale(&u.omega_sq),
        p_sq.scale(&u.p_sq),
        DivClass::nodes().scale(&u.z),
    ];
    parts.iter().fold(DivClass::default(), |acc, c| &acc + c)
}

/// Element of the Chow ring of the universal curve truncated above degree 2.
/// `[Z]` has degree 2, so it only appears in the top part.
#[derive(Clone, Debug, Default)]
struct Truncated {
    c0: Rational,
    omega: Rational,
    p: Rational,
    top: UpstairsClass,
}

impl Truncated {
    fn times(&self, rhs: &Truncated) -> Truncated {
        let top = UpstairsClass::new(
            &self.omega * &rhs.omega,
            &self.omega * &rhs.p + &self.p * &rhs.omega,
            &self.p * &rhs.p,
            Rational::zero(),
        );
        let top = &(&top + &rhs.top.scale(&self.c0)) + &self.top.scale(&rhs.c0);
        Truncated {
            c0: &self.c0 * &rhs.c0,
            omega: &self.c0 * &rhs.omega + &self.omega * &rhs.c0,
            p: &self.c0 * &rhs.p + &self.p * &rhs.c0,
            top,
        }
    }
}

/// Degree-2 part of `(1 + L + L^2/2 - 2[Z]) (1 - omega/2 + (omega^2 + [Z])/12)`
/// with `L = c_1(omega^4 (x) P^2) = 4 omega + 2 P`.
pub fn grr_degree2() -> UpstairsClass {
    let l = Truncated {
        omega: rat(4),
        p: rat(2),
        ..Truncated::default()
    };
    let l_sq = l.times(&l).top;
    let ch = Truncated {
        c0: Rational::one(),
        omega: l.omega.clone(),
        p: l.p.clone(),
        top: &l_sq.scale(&ratio(1, 2)) + &UpstairsClass::new(rat(0), rat(0), rat(0), rat(-2)),
    };
    let td = Truncated {
        c0: Rational::one(),
        omega: ratio(-1, 2),
        p: Rational::zero(),
        top: UpstairsClass::new(ratio(1, 12), rat(0), rat(0), ratio(1, 12)),
    };
    ch.times(&td).top
}

/// `c_1(f_*(omega^4 (x) P^2 (x) I_Z^2))`.
pub fn c1_target(rule: OmegaSquaredRule) -> DivClass {
    pushforward(&grr_degree2(), rule)
}

/// `c_1(D~) = rk(I_2) c_1(target) - rk(target) c_1(I_2)` at genus 20, both ranks 133.
pub fn degeneracy_class(rule: OmegaSquaredRule) -> DivClass {
    let rank = rat(degeneracy_rank() as i64);
    &c1_target(rule).scale(&rank) - &c1_i2(DIVISOR_GENUS).scale(&rank)
}

/// Common rank of `I_2` and of the target bundle at genus 20.
pub fn degeneracy_rank() -> usize {
    expected_dim_i2(DIVISOR_GENUS)
}

/// Class of the closure in the full compactification: only the four tracked
/// coefficients are known.
pub fn closure_class(rule: OmegaSquaredRule) -> DivClass {
    degeneracy_class(rule).with_unknown_remainder()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlopeBound {
    /// `lambda` coefficient of the pushforward to `M_20`, divided by 133.
    pub lambda: BigInt,
    /// Minus the `delta_0` coefficient, divided by 133.
    pub delta0: BigInt,
    pub slope: Rational,
    pub excess_over_eight: Rational,
}

/// Slope `66 (2^40 - 1) / (33 * 2^38 - 9)` of the pushforward to `M_20`.
pub fn slope_bound() -> SlopeBound {
    let lambda: BigInt = BigInt::from(66) * ((BigInt::one() << 40u32) - 1);
    let delta0: BigInt = BigInt::from(33) * (BigInt::one() << 38u32) - 9;
    let slope = Rational::new(lambda.clone(), delta0.clone());
    let excess_over_eight = &slope - rat(8);
    SlopeBound {
        lambda,
        delta0,
        slope,
        excess_over_eight,
    }
}

impl Serialize for SlopeBound {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("SlopeBound", 4)?;
        st.serialize_field("lambda", &self.lambda.to_string())?;
        st.serialize_field("delta0", &self.delta0.to_string())?;
        st.serialize_field("slope", &to_fraction_string(&self.slope))?;
        st.serialize_field(
            "excess_over_eight",
            &to_fraction_string(&self.excess_over_eight),
        )?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hodge_bundle_classes() {
        assert_eq!(c1_f(1), DivClass::new(rat(1), rat(0), rat(0), ratio(-1, 4)));
        assert_eq!(c1_f(2), DivClass::from_ints(13, -1, -1, -3));
        assert_eq!(c1_f(4), DivClass::from_ints(73, -6, -6, -16));
    }

    #[test]
    fn quadric_bundle() {
        assert_eq!(c1_sym2_f1(20), DivClass::from_ints(20, 0, 0, -5));
        assert_eq!(c1_i2(20), DivClass::from_ints(7, 1, 1, -2));
        assert_eq!(
            c1_i2(2),
            DivClass::new(rat(-11), rat(1), rat(1), ratio(5, 2))
        );
    }

    #[test]
    fn grr_expansion() {
        let u = grr_degree2();
        assert_eq!(
            u,
            UpstairsClass::new(ratio(73, 12), rat(7), rat(2), ratio(-23, 12))
        );
        assert_eq!(
            c1_target(OmegaSquaredRule::Minus),
            DivClass::from_ints(73, -8, -8, -17)
        );
        assert_ne!(
            c1_target(OmegaSquaredRule::Plus),
            DivClass::from_ints(73, -8, -8, -17)
        );
    }

    #[test]
    fn degeneracy_divisor() {
        assert_eq!(degeneracy_rank(), 133);
        let d = degeneracy_class(OmegaSquaredRule::Minus);
        assert_eq!(d, DivClass::from_ints(66, -9, -9, -15).scale(&rat(133)));
        assert_eq!(d.interior(), DivClass::from_ints(8778, 0, 0, 0));
        assert!(closure_class(OmegaSquaredRule::Minus)
            .to_string()
            .ends_with("+ ..."));
    }

    #[test]
    fn slope() {
        let s = slope_bound();
        assert_eq!(s.lambda, BigInt::from(72567767433150i64));
        assert_eq!(s.delta0, BigInt::from(9070970929143i64));
        assert_eq!(s.excess_over_eight, ratio(2, 3023656976381));
    }

    #[test]
    fn display() {
        assert_eq!(
            c1_i2(20).to_string(),
            "7 lambda + delta'_0 + delta''_0 - 2 delta_0^ram"
        );
        assert_eq!(c1_f(1).to_string(), "lambda - 1/4 delta_0^ram");
        assert_eq!(DivClass::default().to_string(), "0");
    }
}
