//! Parsing of command-line values: parameter sources, ranges and prime lists.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Context};
use prym_core::exactla::{parse_rational, rank_mod_p, Rational};
use prym_core::fixtures::appendix_a_params;
use prym_core::prymcurve::{draw_params, scelta_params, PrymCurveParams};
use prym_core::quadrics::build_z;

#[derive(Clone, Debug, PartialEq)]
pub enum ParamSource {
    AppendixA,
    Scelta(Rational),
    Random,
    File(PathBuf),
}

impl FromStr for ParamSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.split_once(':') {
            None if s == "appendix-a" => Ok(ParamSource::AppendixA),
            None if s == "random" => Ok(ParamSource::Random),
            None if s == "scelta" => Ok(ParamSource::Scelta(
                prym_core::induction::appendix_b::default_a(),
            )),
            Some(("scelta", a)) => parse_rational(a)
                .map(ParamSource::Scelta)
                .map_err(|e| e.to_string()),
            Some(("file", path)) => Ok(ParamSource::File(PathBuf::from(path))),
            _ => Err(format!(
                "unknown parameter source `{s}` (appendix-a | scelta[:a] | random | file:PATH)"
            )),
        }
    }
}

impl fmt::Display for ParamSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamSource::AppendixA => write!(f, "appendix-a"),
            ParamSource::Scelta(a) => write!(f, "scelta:{a}"),
            ParamSource::Random => write!(f, "random"),
            ParamSource::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

/// Parameters for genus `g`, plus the redraw attempt used for random draws.
pub fn load_params(
    source: &ParamSource,
    g: usize,
    seed: u64,
    primes: &[u64],
) -> anyhow::Result<(PrymCurveParams, u32)> {
    match source {
        ParamSource::AppendixA => {
            if g != 20 {
                bail!("the appendix-a parameters exist only for g = 20, not g = {g}");
            }
            Ok((appendix_a_params(), 0))
        }
        ParamSource::Scelta(a) => Ok((scelta_params(g, a)?, 0)),
        ParamSource::File(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            let p = PrymCurveParams::from_json_str(&text)?;
            if p.g() != g {
                bail!(
                    "{} holds parameters for g = {}, requested g = {g}",
                    path.display(),
                    p.g()
                );
            }
            Ok((p, 0))
        }
        ParamSource::Random => {
            // A draw is usable when Z has its generic rank modulo the first prime.
            let prime = primes.first().copied().unwrap_or(131);
            let ok = |p: &PrymCurveParams| {
                rank_mod_p(&build_z(p).z, prime).is_ok_and(|r| r == 2 * g - 2)
            };
            Ok(draw_params(g, seed, ok)?)
        }
    }
}

/// Inclusive range `A..B` (or a single value `A`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Range {
    pub lo: i64,
    pub hi: i64,
}

impl FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let num = |x: &str| {
            x.trim()
                .parse::<i64>()
                .map_err(|_| format!("bad range bound `{x}`"))
        };
        let (lo, hi) = match s.split_once("..") {
            Some((a, b)) => (num(a)?, num(b.trim_start_matches('='))?),
            None => (num(s)?, num(s)?),
        };
        if lo > hi {
            return Err(format!("empty range {s}"));
        }
        Ok(Range { lo, hi })
    }
}

impl Range {
    pub fn genera(&self, min: usize, max: usize) -> anyhow::Result<Vec<usize>> {
        if self.lo < min as i64 || self.hi > max as i64 {
            bail!(
                "genus range {}..{} must lie within [{min}, {max}]",
                self.lo,
                self.hi
            );
        }
        Ok((self.lo as usize..=self.hi as usize).collect())
    }
}

/// Comma-separated prime list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Primes(pub Vec<u64>);

impl FromStr for Primes {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        parse_primes(s).map(Primes)
    }
}

pub fn parse_primes(s: &str) -> Result<Vec<u64>, String> {
    let primes: Vec<u64> = s
        .split(',')
        .filter(|x| !x.trim().is_empty())
        .map(|x| {
            x.trim()
                .parse::<u64>()
                .map_err(|_| format!("bad prime `{x}`"))
        })
        .collect::<Result<_, _>>()?;
    if primes.is_empty() {
        return Err("empty prime list".into());
    }
    Ok(primes)
}
