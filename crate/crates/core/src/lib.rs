//! Exact solving of linear Mahler equations
//! `ℓ_r(x) y(x^(b^r)) + ⋯ + ℓ_0(x) y(x) = 0` over ℚ.
//!
//! Polynomial, rational, truncated power-series and truncated Puiseux-series
//! solutions are computed with exact rational arithmetic. Operators with a
//! zero trailing coefficient are normalized by sections and interreduction,
//! which also yields greatest common right divisors of operator families.

pub mod error;
pub mod exec;
pub mod poly;
pub mod linalg;
pub mod newton;
pub mod operator;
pub mod rmatrix;
pub mod json;
pub mod normalize;
pub mod solver;
pub mod rational_solver;

pub use error::{Error, Result};
pub use exec::Exec;
pub use operator::{MahlerOperator, PhiTransform};
pub use poly::{Poly, Rational};
