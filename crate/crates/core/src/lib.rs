//! Exact arithmetic for the Jacobians of the curves
//! `y^r = x^(r-1)(x+1)(x+t)` over `F_q(t^(1/d))`.
//!
//! Every quantity is computed with exact integers, rationals or cyclotomic
//! integers, and most of them by two independent routes.

pub mod bsdinv;
pub mod charsums;
pub mod cyclotomic;
mod error;
pub mod ffield;
pub mod groupring;
pub mod heights;
pub mod lfunction;
pub mod linalg;
pub mod monodromy;
pub mod numth;
pub mod points_descent;

pub use error::{Error, Result};
