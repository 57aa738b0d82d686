//! Closed-form determinants of the reduced blocks in the induction step, as
//! functions of `k` (`g = 2k` or `g = 2k + 1`), and a scan for integer zeros.
//!
//! Expressions are small trees so that they can be evaluated in two
//! independent ways and split into numerator and denominator factors.

use std::collections::BTreeMap;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactla::{ratio, Field, Rational};

pub const MIN_K: i64 = 10;

/// Default value of the free constant in the odd-genus formulas.
pub fn default_a() -> Rational {
    ratio(1, 7)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(Rational),
    K,
    /// The free nonzero constant `a`.
    FreeA,
    /// Integer polynomial in `k` as `(coefficient, exponent)` terms.
    Poly(Vec<(i64, u32)>),
    /// `(scale * k + offset)!`
    Factorial {
        scale: i64,
        offset: i64,
    },
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Pow(Box<Expr>, u32),
    Quotient(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
}

fn poly(terms: &[(i64, u32)]) -> Expr {
    Expr::Poly(terms.to_vec())
}

/// `k - r`
fn lin(r: i64) -> Expr {
    poly(&[(1, 1), (-r, 0)])
}

fn pow(e: Expr, n: u32) -> Expr {
    Expr::Pow(Box::new(e), n)
}

fn fact(scale: i64, offset: i64) -> Expr {
    Expr::Factorial { scale, offset }
}

fn quot(n: Expr, d: Expr) -> Expr {
    Expr::Quotient(Box::new(n), Box::new(d))
}

fn konst(n: i64, d: i64) -> Expr {
    Expr::Const(ratio(n, d))
}

/// Factorials reused across nearby arguments.
#[derive(Default)]
pub struct FactorialCache {
    known: BTreeMap<u64, BigInt>,
}

impl FactorialCache {
    pub fn get(&mut self, n: u64) -> BigInt {
        if let Some(v) = self.known.get(&n) {
            return v.clone();
        }
        let (mut m, mut acc) = match self.known.range(..n).next_back() {
            Some((&m, v)) => (m, v.clone()),
            None => (0, BigInt::one()),
        };
        while m < n {
            m += 1;
            acc *= m;
        }
        self.known.insert(n, acc.clone());
        // Scans move upward; drop what can no longer be the nearest base.
        let floor = n.saturating_sub(8);
        self.known = self.known.split_off(&floor);
        acc
    }
}

fn factorial_descending(n: u64) -> BigInt {
    (1..=n).rev().fold(BigInt::one(), |acc, m| acc * m)
}

fn factorial_arg(scale: i64, offset: i64, k: i64) -> Result<u64> {
    let n = scale * k + offset;
    u64::try_from(n)
        .map_err(|_| Error::DivisionByZero(format!("factorial of negative integer {n}")))
}

impl Expr {
    /// Horner evaluation with cached factorials.
    pub fn eval(&self, k: i64, a: &Rational, cache: &mut FactorialCache) -> Result<Rational> {
        Ok(match self {
            Expr::Const(c) => c.clone(),
            Expr::K => Rational::from_integer(k.into()),
            Expr::FreeA => a.clone(),
            Expr::Poly(terms) => {
                let deg = terms.iter().map(|&(_, e)| e).max().unwrap_or(0);
                let mut coeffs = vec![0i64; deg as usize + 1];
                for &(c, e) in terms {
                    coeffs[e as usize] += c;
                }
                let kk = BigInt::from(k);
                let v = coeffs
                    .iter()
                    .rev()
                    .fold(BigInt::zero(), |acc, &c| acc * &kk + c);
                Rational::from_integer(v)
            }
            Expr::Factorial { scale, offset } => {
                Rational::from_integer(cache.get(factorial_arg(*scale, *offset, k)?))
            }
            Expr::Sum(xs) => {
                let mut s = Rational::zero();
                for x in xs {
                    s = s.plus(&x.eval(k, a, cache)?);
                }
                s
            }
            Expr::Product(xs) => {
                let mut p = Rational::one();
                for x in xs {
                    p = p.times(&x.eval(k, a, cache)?);
                }
                p
            }
            Expr::Pow(b, n) => {
                let base = b.eval(k, a, cache)?;
                (0..*n).fold(Rational::one(), |acc, _| acc.times(&base))
            }
            Expr::Quotient(n, d) => {
                let den = d.eval(k, a, cache)?;
                if den.is_zero() {
                    return Err(Error::DivisionByZero(format!(
                        "denominator vanishes at k = {k}"
                    )));
                }
                n.eval(k, a, cache)? / den
            }
            Expr::Neg(x) => -x.eval(k, a, cache)?,
        })
    }

    /// Second evaluation path: explicit powers term by term, operands folded
    /// in reverse order, factorials recomputed from scratch.
    pub fn eval_reverse(&self, k: i64, a: &Rational) -> Result<Rational> {
        Ok(match self {
            Expr::Const(c) => c.clone(),
            Expr::K => Rational::from_integer(k.into()),
            Expr::FreeA => a.clone(),
            Expr::Poly(terms) => {
                let kk = BigInt::from(k);
                let v = terms.iter().rev().fold(BigInt::zero(), |acc, &(c, e)| {
                    let mut power = BigInt::one();
                    for _ in 0..e {
                        power *= &kk;
                    }
                    acc + power * c
                });
                Rational::from_integer(v)
            }
            Expr::Factorial { scale, offset } => {
                Rational::from_integer(factorial_descending(factorial_arg(*scale, *offset, k)?))
            }
            Expr::Sum(xs) => xs.iter().rev().try_fold(Rational::zero(), |acc, x| {
                Ok::<_, Error>(x.eval_reverse(k, a)? + acc)
            })?,
            Expr::Product(xs) => xs.iter().rev().try_fold(Rational::one(), |acc, x| {
                Ok::<_, Error>(x.eval_reverse(k, a)? * acc)
            })?,
            Expr::Pow(b, n) => {
                let base = b.eval_reverse(k, a)?;
                (0..*n).fold(Rational::one(), |acc, _| acc * &base)
            }
            Expr::Quotient(n, d) => {
                let num = n.eval_reverse(k, a)?;
                let den = d.eval_reverse(k, a)?;
                if den.is_zero() {
                    return Err(Error::DivisionByZero(format!(
                        "denominator vanishes at k = {k}"
                    )));
                }
                num / den
            }
            Expr::Neg(x) => -x.eval_reverse(k, a)?,
        })
    }

    /// Splits into irreducible factors of the numerator and the denominator.
    /// Sums, polynomials and factorials are leaves; powers contribute their base.
    pub fn factors(&self) -> (Vec<&Expr>, Vec<&Expr>) {
        let mut num = Vec::new();
        let mut den = Vec::new();
        self.collect_factors(false, &mut num, &mut den);
        (num, den)
    }

    fn collect_factors<'a>(
        &'a self,
        inverted: bool,
        num: &mut Vec<&'a Expr>,
        den: &mut Vec<&'a Expr>,
    ) {
        match self {
            Expr::Product(xs) => xs
                .iter()
                .for_each(|x| x.collect_factors(inverted, num, den)),
            Expr::Quotient(n, d) => {
                n.collect_factors(inverted, num, den);
                d.collect_factors(!inverted, num, den);
            }
            Expr::Pow(b, e) if *e > 0 => b.collect_factors(inverted, num, den),
            Expr::Pow(_, _) => {}
            Expr::Neg(x) => x.collect_factors(inverted, num, den),
            leaf => {
                if inverted {
                    den.push(leaf)
                } else {
                    num.push(leaf)
                }
            }
        }
    }
}

pub const NAMES: [&str; 14] = [
    "p1",
    "p2",
    "p3",
    "p4",
    "p5",
    "p6",
    "p7",
    "p8",
    "q1",
    "q2",
    "detA_even",
    "detB_even",
    "detA_odd",
    "detB_odd",
];

fn p1() -> Expr {
    Expr::Product(vec![
        pow(Expr::K, 2),
        pow(lin(4), 3),
        lin(-1),
        poly(&[(2, 1), (-1, 0)]),
        pow(lin(1), 3),
        poly(&[(1, 2), (-4, 0)]),
        poly(&[(2, 3), (-9, 2), (12, 1), (-4, 0)]),
        pow(lin(3), 2),
        pow(fact(2, -1), 4),
    ])
}

fn p2() -> Expr {
    poly(&[
        (16, 9),
        (-14, 8),
        (-87, 7),
        (121, 6),
        (75, 5),
        (-138, 4),
        (-52, 3),
        (54, 2),
        (18, 1),
        (-12, 0),
    ])
}

fn p3() -> Expr {
    poly(&[(6, 5), (-1, 4), (-12, 3), (-4, 2), (12, 1), (-4, 0)])
}

fn p4() -> Expr {
    Expr::Product(vec![
        pow(lin(2), 4),
        poly(&[(2, 1), (-1, 0)]),
        pow(Expr::K, 2),
        pow(lin(3), 3),
        pow(lin(1), 6),
        lin(-2),
        lin(-1),
        pow(fact(2, 2), 2),
    ])
}

fn p5() -> Expr {
    poly(&[
        (1168, 14),
        (2216, 13),
        (-22360, 12),
        (-41218, 11),
        (17145, 10),
        (47730, 9),
        (46525, 8),
        (38736, 7),
        (-70488, 6),
        (-58080, 5),
        (35288, 4),
        (14726, 3),
        (-6093, 2),
        (66, 1),
        (-465, 0),
    ])
}

fn p6() -> Expr {
    poly(&[
        (270336, 0),
        (1257472, 1),
        (25884500, 4),
        (-5217504, 2),
        (-15573704, 3),
        (-6492143, 17),
        (68438542, 5),
        (-28031103, 6),
        (-108784825, 7),
        (-49730235, 8),
        (-30298961, 9),
        (50987804, 10),
        (197670424, 11),
        (60883960, 12),
        (-162484142, 13),
        (-9462204, 18),
        (-79976, 19),
        (945456, 20),
        (45632, 21),
        (-44288, 22),
        (-1216, 23),
        (768, 24),
        (-92612465, 14),
        (54292657, 15),
        (44402735, 16),
    ])
}

fn p7() -> Expr {
    Expr::Sum(vec![
        poly(&[(2, 0), (4, 1), (-1, 2)]),
        Expr::Product(vec![
            fact(2, 1),
            lin(-1),
            poly(&[(1, 4), (-2, 3), (-1, 2), (12, 1), (4, 0)]),
        ]),
    ])
}

fn p8() -> Expr {
    Expr::Product(vec![
        Expr::FreeA,
        pow(Expr::K, 6),
        pow(lin(4), 5),
        lin(1),
        pow(poly(&[(1, 3), (-4, 2), (5, 1), (-2, 0)]), 3),
        poly(&[(2, 2), (-7, 1), (3, 0)]),
        pow(poly(&[(1, 2), (-3, 1), (2, 0)]), 3),
        pow(lin(-1), 3),
        pow(lin(3), 5),
        lin(-2),
        poly(&[(2, 1), (-3, 0)]),
        poly(&[(4, 2), (-1, 0)]),
        pow(fact(2, 1), 7),
    ])
}

fn q1() -> Expr {
    Expr::Product(vec![
        pow(Expr::K, 3),
        pow(lin(3), 3),
        poly(&[(1, 2), (-4, 1), (4, 0)]),
        poly(&[(-3, 1), (1, 2), (2, 0)]),
        poly(&[(2, 1), (-1, 0)]),
        pow(lin(1), 8),
        Expr::FreeA,
        pow(lin(4), 7),
        poly(&[(2, 3), (-9, 2), (12, 1), (-4, 0)]),
    ])
}

fn q2() -> Expr {
    Expr::Product(vec![
        poly(&[(1, 2), (-4, 0)]),
        poly(&[(2, 2), (-7, 1), (6, 0)]),
        pow(fact(2, 0), 8),
    ])
}

/// Quintic in the numerator of `det A` for even genus.
pub fn det_a_even_quintic() -> Expr {
    poly(&[(4, 5), (14, 4), (15, 3), (1, 2), (-7, 1), (1, 0)])
}

pub fn named_expr(name: &str) -> Result<Expr> {
    Ok(match name {
        "p1" => p1(),
        "p2" => p2(),
        "p3" => p3(),
        "p4" => p4(),
        "p5" => p5(),
        "p6" => p6(),
        "p7" => p7(),
        "p8" => p8(),
        "q1" => q1(),
        "q2" => q2(),
        "detA_even" => quot(
            Expr::Product(vec![konst(-4, 1), det_a_even_quintic()]),
            p1(),
        ),
        "detB_even" => quot(
            Expr::Product(vec![
                konst(147456, 5),
                lin(5),
                poly(&[(1, 4), (-9, 3), (16, 2), (3, 1), (-8, 0)]),
                p2(),
                p3(),
            ]),
            Expr::Product(vec![q1(), q2()]),
        ),
        "detA_odd" => Expr::Product(vec![
            quot(konst(-16, 1), Expr::Product(vec![konst(15, 1), p4()])),
            lin(4),
            p5(),
        ]),
        "detB_odd" => quot(
            Expr::Product(vec![konst(-3072, 25), lin(5), p6(), p7()]),
            p8(),
        ),
        other => return Err(Error::UnknownExpression(other.to_string())),
    })
}

fn check_k(k: i64) -> Result<()> {
    if k < MIN_K {
        Err(Error::KOutOfRange(k))
    } else {
        Ok(())
    }
}

fn check_a(a: &Rational) -> Result<()> {
    if a.is_zero() {
        Err(Error::InvalidParams(
            "the free constant a must be nonzero".into(),
        ))
    } else {
        Ok(())
    }
}

/// Exact value of a named expression at `k >= 10`.
pub fn appendix_b_eval(name: &str, k: i64, a: &Rational) -> Result<Rational> {
    check_k(k)?;
    check_a(a)?;
    named_expr(name)?.eval(k, a, &mut FactorialCache::default())
}

/// Both evaluation paths; an [`Error::Internal`] if they differ.
pub fn appendix_b_eval_checked(name: &str, k: i64, a: &Rational) -> Result<Rational> {
    let forward = appendix_b_eval(name, k, a)?;
    let reverse = named_expr(name)?.eval_reverse(k, a)?;
    if forward != reverse {
        return Err(Error::Internal(format!(
            "{name} evaluates inconsistently at k = {k}"
        )));
    }
    Ok(forward)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScanReport {
    pub name: String,
    pub k_lo: i64,
    pub k_hi: i64,
    /// Integers where some numerator factor vanishes.
    pub zeros: Vec<i64>,
    /// Integers where some denominator factor vanishes.
    pub poles: Vec<i64>,
    pub numerator_factors: usize,
    pub denominator_factors: usize,
    pub elapsed_ms: u64,
}

impl ScanReport {
    pub fn is_zero_free(&self) -> bool {
        self.zeros.is_empty() && self.poles.is_empty()
    }
}

/// Smallest number of consecutive `k` handed to one worker. Factorials are
/// extended incrementally within a chunk, so fewer, longer chunks are cheaper.
const MIN_SCAN_CHUNK: i64 = 256;

/// Whether the factor `f` vanishes at `k`. A factorial of a nonnegative
/// integer is never zero, so only its argument is checked.
fn factor_vanishes(f: &Expr, k: i64, a: &Rational, cache: &mut FactorialCache) -> Result<bool> {
    match f {
        Expr::Factorial { scale, offset } => factorial_arg(*scale, *offset, k).map(|_| false),
        _ => Ok(f.eval(k, a, cache)?.is_zero()),
    }
}

/// Checks every factor of `expr` at every integer `k` in `[k_lo, k_hi]`.
pub fn scan_expr(
    name: &str,
    expr: &Expr,
    k_lo: i64,
    k_hi: i64,
    a: &Rational,
) -> Result<ScanReport> {
    let start = Instant::now();
    if k_lo > k_hi {
        return Err(Error::Parse(format!("empty range [{k_lo}, {k_hi}]")));
    }
    let (num, den) = expr.factors();
    let threads = rayon::current_num_threads().max(1) as i64;
    let chunk = ((k_hi - k_lo + 1 + threads - 1) / threads).max(MIN_SCAN_CHUNK);
    let chunks: Vec<(i64, i64)> = (k_lo..=k_hi)
        .step_by(chunk as usize)
        .map(|lo| (lo, (lo + chunk - 1).min(k_hi)))
        .collect();
    let hits: Vec<(Vec<i64>, Vec<i64>)> = chunks
        .par_iter()
        .map(|&(lo, hi)| {
            let mut cache = FactorialCache::default();
            let mut zeros = Vec::new();
            let mut poles = Vec::new();
            for k in lo..=hi {
                let vanishes = |fs: &[&Expr], cache: &mut FactorialCache| -> Result<bool> {
                    for f in fs {
                        if factor_vanishes(f, k, a, cache)? {
                            return Ok(true);
                        }
                    }
                    Ok(false)
                };
                if vanishes(&num, &mut cache)? {
                    zeros.push(k);
                }
                if vanishes(&den, &mut cache)? {
                    poles.push(k);
                }
            }
            Ok((zeros, poles))
        })
        .collect::<Result<_>>()?;
    let (zeros, poles) =
        hits.into_iter()
            .fold((Vec::new(), Vec::new()), |(mut z, mut p), (hz, hp)| {
                z.extend(hz);
                p.extend(hp);
                (z, p)
            });
    Ok(ScanReport {
        name: name.to_string(),
        k_lo,
        k_hi,
        zeros,
        poles,
        numerator_factors: num.len(),
        denominator_factors: den.len(),
        elapsed_ms: start.elapsed().as_millis() as u64,
    })
}

/// Scan of a named expression over `[k_lo, k_hi]`, `k_lo >= 10`.
pub fn scan_integer_zeros(name: &str, k_lo: i64, k_hi: i64, a: &Rational) -> Result<ScanReport> {
    check_k(k_lo)?;
    check_a(a)?;
    scan_expr(name, &named_expr(name)?, k_lo, k_hi, a)
}

/// Parses ascending integer coefficients `c0,c1,...` into a polynomial in `k`.
pub fn parse_poly_coeffs(s: &str) -> Result<Expr> {
    let terms = s
        .split(',')
        .enumerate()
        .map(|(e, c)| {
            c.trim()
                .parse::<i64>()
                .map(|c| (c, e as u32))
                .map_err(|_| Error::Parse(format!("bad coefficient `{c}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Expr::Poly(terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::rat;

    #[test]
    fn quintic_and_sextic_values_at_ten() {
        let a = default_a();
        let mut cache = FactorialCache::default();
        assert_eq!(
            det_a_even_quintic().eval(10, &a, &mut cache).unwrap(),
            rat(555031)
        );
        assert_eq!(p3().eval(10, &a, &mut cache).unwrap(), rat(577716));
    }

    #[test]
    fn factorial_cache_matches_direct_product() {
        let mut cache = FactorialCache::default();
        for n in [5u64, 19, 20, 21, 3, 40] {
            assert_eq!(cache.get(n), factorial_descending(n));
        }
        assert_eq!(cache.get(0), BigInt::one());
    }

    #[test]
    fn both_paths_agree() {
        let a = default_a();
        for name in NAMES {
            for k in 10..=14 {
                appendix_b_eval_checked(name, k, &a).unwrap();
            }
        }
    }

    #[test]
    fn k_below_ten_rejected() {
        assert_eq!(
            appendix_b_eval("p1", 9, &default_a()),
            Err(Error::KOutOfRange(9))
        );
        assert!(matches!(
            appendix_b_eval("p9", 10, &default_a()),
            Err(Error::UnknownExpression(_))
        ));
        assert!(appendix_b_eval("q1", 10, &rat(0)).is_err());
    }

    #[test]
    fn factor_split() {
        let e = named_expr("detA_even").unwrap();
        let (num, den) = e.factors();
        assert_eq!(num.len(), 2);
        assert_eq!(den.len(), 9);
    }

    #[test]
    fn synthetic_zero_is_found() {
        let e = parse_poly_coeffs("-15,1").unwrap();
        let r = scan_expr("k-15", &e, 10, 20, &default_a()).unwrap();
        assert_eq!(r.zeros, vec![15]);
        let e = quot(Expr::Const(rat(1)), lin(12));
        let r = scan_expr("1/(k-12)", &e, 10, 600, &default_a()).unwrap();
        assert_eq!((r.zeros.clone(), r.poles.clone()), (vec![], vec![12]));
        assert!(!r.is_zero_free());
    }

    #[test]
    fn short_scan_is_clean() {
        for name in NAMES {
            assert!(
                scan_integer_zeros(name, 10, 300, &default_a())
                    .unwrap()
                    .is_zero_free(),
                "{name}"
            );
        }
    }
}
