//! Reference parameter sets.

use crate::exactla::rat;
use crate::prymcurve::{build_params, PrymCurveParams};

/// Node parameters of the genus-20 certificate, component 1.
pub const APPENDIX_A_ROW1: [i64; 19] = [
    25, 35, 54, 47, 67, 97, 73, 81, 22, 33, 76, 27, 38, 44, 58, 69, 63, 80, 99,
];
/// Node parameters of the genus-20 certificate, component 2.
pub const APPENDIX_A_ROW2: [i64; 19] = [
    1, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20,
];

/// Ranks `(r0, r1, r2)` of the genus-20 certificate.
pub const APPENDIX_A_RANKS: (usize, usize, usize) = (38, 108, 171);

pub fn appendix_a_params() -> PrymCurveParams {
    let row = |xs: &[i64]| xs.iter().map(|&x| rat(x)).collect();
    build_params(20, [row(&APPENDIX_A_ROW1), row(&APPENDIX_A_ROW2)])
        .expect("reference parameters are valid")
}
