//! Exact arithmetic: rationals, prime fields, polynomials and dense matrices.

pub mod certify;
mod csv;
pub mod field;
pub mod matrix;
pub mod poly;

pub use self::csv::{matrix_to_csv_string, read_matrix_csv, write_matrix_csv};
pub use certify::{certify_rank, PrimeRank, RankCertificate, RankMethod, FURTHER_PRIMES_FROM};
pub use field::{
    denominator_lcm, next_prime, parse_rational, rat, ratio, to_fraction_string, Field, Fp,
    Modulus, Rational, Rationals,
};
pub use matrix::{
    annihilates, det_exact, nullspace, pivot_columns_mod_p, rank_by_left_kernel, rank_certified,
    rank_exact, rank_mod_p, reduce_mod_p, ExactMatrix, RatMatrix,
};
pub use poly::{poly_derivative, poly_mul, RatPoly, UniPoly};
