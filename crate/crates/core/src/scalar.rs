//! Number types shared by the exact and floating-point code paths.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational number.
pub type Rational = BigRational;

/// Field operations plus the handful of conversions the library needs.
///
/// Implemented for [`Rational`] (exact) and `f64` (approximate). Every
/// algorithm that compares values goes through [`Scalar::is_negligible`], which
/// is an exact zero test for rationals and a scaled tolerance for floats.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const EXACT: bool;

    fn from_i64(v: i64) -> Self;
    fn from_ratio(num: i128, den: i128) -> Self;
    fn from_rational(q: &Rational) -> Self;
    /// Converts a random real draw. Rationals round to the nearest 1/16 so
    /// that exact samples keep small denominators.
    fn from_sample(x: f64) -> Self;
    fn to_f64(&self) -> f64;
    /// Integer value when the number is an integer that fits in an `i128`.
    fn as_i128(&self) -> Option<i128>;
    /// Zero test; `scale` is the magnitude of the quantities being compared.
    fn is_negligible(&self, scale: f64) -> bool;

    fn magnitude(&self) -> f64 {
        self.to_f64().abs()
    }

    fn approx_eq(&self, other: &Self, scale: f64) -> bool {
        (self.clone() - other.clone()).is_negligible(scale)
    }
}

/// Relative tolerance used by the floating-point path.
pub const F64_TOL: f64 = 1e-9;

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn from_ratio(num: i128, den: i128) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }

    fn from_sample(x: f64) -> Self {
        Rational::new(BigInt::from((x * 16.0).round() as i64), BigInt::from(16))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn as_i128(&self) -> Option<i128> {
        if self.is_integer() {
            self.numer().to_i128()
        } else {
            None
        }
    }

    fn is_negligible(&self, _scale: f64) -> bool {
        self.is_zero()
    }

    fn magnitude(&self) -> f64 {
        Scalar::to_f64(&self.abs())
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_ratio(num: i128, den: i128) -> Self {
        num as f64 / den as f64
    }

    fn from_rational(q: &Rational) -> Self {
        Scalar::to_f64(q)
    }

    fn from_sample(x: f64) -> Self {
        x
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn as_i128(&self) -> Option<i128> {
        None
    }

    fn is_negligible(&self, scale: f64) -> bool {
        self.abs() <= F64_TOL * scale.max(1.0)
    }
}

/// Builds a rational from a pair of machine integers.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_rounding_uses_sixteenths() {
        assert_eq!(<Rational as Scalar>::from_sample(0.49), rat(1, 2));
        assert_eq!(<Rational as Scalar>::from_sample(-1.03), rat(-1, 1));
    }

    #[test]
    fn integer_detection() {
        assert_eq!(rat(6, 3).as_i128(), Some(2));
        assert_eq!(rat(1, 3).as_i128(), None);
        assert_eq!(2.0f64.as_i128(), None);
    }

    #[test]
    fn float_tolerance_scales() {
        assert!(1e-8f64.is_negligible(100.0));
        assert!(!1e-6f64.is_negligible(1.0));
    }
}
