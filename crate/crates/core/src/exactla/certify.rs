//! Rank certificates combining modular and exact elimination.

use rayon::prelude::*;
use serde::Serialize;

use super::field::next_prime;
use super::matrix::{rank_by_left_kernel, rank_exact, rank_mod_p, RatMatrix};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrimeRank {
    pub prime: u64,
    pub rank: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RankMethod {
    /// Some prime reached the known upper bound.
    Modular,
    /// Modular ranks fell short of the bound; an exact left-kernel basis of
    /// the matching dimension showed the largest modular rank is the rank.
    LeftKernel,
    /// Modular ranks fell short of the bound; the rational rank decided.
    Exact,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankCertificate {
    pub rank: usize,
    pub upper_bound: usize,
    pub method: RankMethod,
    pub per_prime: Vec<PrimeRank>,
    /// Primes skipped because some denominator vanished modulo them.
    pub bad_primes: Vec<u64>,
    /// Set when two good primes reported different ranks.
    pub inconclusive: bool,
}

impl RankCertificate {
    pub fn is_maximal(&self) -> bool {
        self.rank == self.upper_bound
    }

    pub fn modular_ranks(&self) -> Vec<usize> {
        self.per_prime.iter().map(|p| p.rank).collect()
    }
}

/// The further primes are taken above this, where reductions of the curve data
/// are very unlikely to collide.
pub const FURTHER_PRIMES_FROM: u64 = 1 << 31;

/// Picks the modular rank for `prime`, walking to the next primes on a bad
/// reduction. Returns the prime actually used and any primes skipped.
fn rank_at_good_prime(m: &RatMatrix, prime: u64, avoid: &[u64]) -> Result<(PrimeRank, Vec<u64>)> {
    let mut p = prime;
    let mut bad = Vec::new();
    loop {
        if avoid.contains(&p) && p != prime {
            p = next_prime(p);
            continue;
        }
        match rank_mod_p(m, p) {
            Ok(rank) => return Ok((PrimeRank { prime: p, rank }, bad)),
            Err(Error::BadPrime { .. }) => {
                bad.push(p);
                p = next_prime(p);
            }
            Err(e) => return Err(e),
        }
    }
}

fn modular_ranks(m: &RatMatrix, primes: &[u64]) -> Result<(Vec<PrimeRank>, Vec<u64>)> {
    let results: Vec<_> = primes
        .par_iter()
        .map(|&p| rank_at_good_prime(m, p, primes))
        .collect();
    let mut ranks = Vec::with_capacity(primes.len());
    let mut bad = Vec::new();
    for r in results {
        let (pr, b) = r?;
        ranks.push(pr);
        bad.extend(b);
    }
    Ok((ranks, bad))
}

/// Certifies the rank of `m` given a proven upper bound.
///
/// Each listed prime gives a lower bound. If all of them reach `upper_bound`
/// the rank is settled. Otherwise two further primes above
/// [`FURTHER_PRIMES_FROM`] are tried. If one of
/// them reaches the bound the rank is again settled, otherwise the largest
/// modular rank is confirmed by [`rank_by_left_kernel`] or, failing that,
/// replaced by the rational rank. Disagreement is flagged either way.
pub fn certify_rank(m: &RatMatrix, primes: &[u64], upper_bound: usize) -> Result<RankCertificate> {
    if primes.is_empty() {
        return Err(Error::Parse("at least one prime is required".into()));
    }
    let (mut per_prime, mut bad_primes) = modular_ranks(m, primes)?;
    let all_max = per_prime.iter().all(|p| p.rank == upper_bound);
    if all_max {
        return Ok(RankCertificate {
            rank: upper_bound,
            upper_bound,
            method: RankMethod::Modular,
            per_prime,
            bad_primes,
            inconclusive: false,
        });
    }
    let mut used: Vec<u64> = per_prime
        .iter()
        .map(|p| p.prime)
        .chain(bad_primes.iter().copied())
        .collect();
    let mut extra = Vec::new();
    let mut p = (*used.iter().max().expect("nonempty")).max(FURTHER_PRIMES_FROM);
    while extra.len() < 2 {
        p = next_prime(p);
        if !used.contains(&p) {
            extra.push(p);
            used.push(p);
        }
    }
    let (more, more_bad) = modular_ranks(m, &extra)?;
    per_prime.extend(more);
    bad_primes.extend(more_bad);
    let first = per_prime[0].rank;
    let inconclusive = per_prime.iter().any(|p| p.rank != first);
    let best = per_prime
        .iter()
        .max_by_key(|p| p.rank)
        .expect("nonempty")
        .prime;
    let best_rank = per_prime.iter().map(|p| p.rank).max().expect("nonempty");
    let (rank, method) = if best_rank == upper_bound {
        (upper_bound, RankMethod::Modular)
    } else {
        match rank_by_left_kernel(m, best)? {
            Some(r) => (r, RankMethod::LeftKernel),
            None => (rank_exact(m), RankMethod::Exact),
        }
    };
    Ok(RankCertificate {
        rank,
        upper_bound,
        method,
        per_prime,
        bad_primes,
        inconclusive,
    })
}
