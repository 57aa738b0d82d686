//! Exact rank certificates for the second Gaussian map of Prym-canonical
//! binary curves, together with the supporting linear algebra, the
//! determinant-polynomial scans of the induction step and the divisor-class
//! arithmetic on the moduli space.

pub mod error;
pub mod exactla;

pub use error::{Error, Result};
pub mod divclass;
pub mod fixtures;
pub mod gaussmap;
pub mod induction;
pub mod prymcurve;
pub mod quadrics;
