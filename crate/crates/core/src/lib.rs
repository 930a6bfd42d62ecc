//! Numerical tools for Pestov-type identities on sphere bundles, pinching
//! thresholds for frame-flow ergodicity, and a sharpness experiment for the
//! curvature coupling constant.
//!
//! Identity checks run in exact rational arithmetic; searches and Monte-Carlo
//! estimates run in `f64`. Code that supports both is generic over
//! [`scalar::Scalar`].

pub mod classify;
pub mod error;
pub mod harmonics;
pub mod linalg;
pub mod multilinear;
pub mod pestov;
pub mod scalar;
pub mod sharpness;
pub mod thresholds;

pub use error::{Error, Result};
pub use scalar::{Rational, Scalar};
