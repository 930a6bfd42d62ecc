//! Exact integration of polynomials over the unit sphere `S^{n−1}`.
//!
//! Integrals are carried as a rational multiple of `vol(S^{n−1})`: the mean of
//! `x^α` over the sphere is `Πᵢ(αᵢ−1)!! / Π_{j<|α|/2}(n+2j)` when every `αᵢ` is
//! even, and zero otherwise.

use serde::Serialize;

use super::polynomial::{parity, Exponents, HomogeneousPolynomial};
use crate::error::{domain, Result};
use crate::scalar::{Rational, Scalar};

/// `vol(S^{n−1}) = 2π^{n/2} / Γ(n/2)`.
pub fn sphere_volume(n: usize) -> f64 {
    // vol(S^0) = 2, vol(S^1) = 2π, vol(S^{m+1}) = 2π/m · vol(S^{m−1}).
    let mut v = if n % 2 == 0 { 2.0 * std::f64::consts::PI } else { 2.0 };
    let mut d = if n % 2 == 0 { 2 } else { 1 };
    while d < n {
        v *= 2.0 * std::f64::consts::PI / d as f64;
        d += 2;
    }
    v
}

/// `(m−1)!!` for even `m`, as used in Gaussian moments.
fn odd_double_factorial(m: u8) -> u128 {
    (1..m as u128).step_by(2).product()
}

/// Numerator of the sphere mean of `x^α` (before dividing by the degree-only
/// denominator); `None` for odd exponents.
fn moment_numerator(e: &Exponents) -> Option<u128> {
    let mut acc = 1u128;
    for &k in e {
        if k % 2 == 1 {
            return None;
        }
        acc = acc.checked_mul(odd_double_factorial(k))?;
    }
    Some(acc)
}

/// `Π_{j<d/2}(n+2j)`.
fn moment_denominator(n: usize, d: usize) -> u128 {
    (0..d / 2).map(|j| (n + 2 * j) as u128).product()
}

/// A sphere integral expressed as `ratio · vol(S^{n−1})`.
#[derive(Clone, Debug, PartialEq)]
pub struct SphereIntegral {
    pub n: usize,
    pub ratio: Rational,
}

impl SphereIntegral {
    pub fn value(&self) -> f64 {
        Scalar::to_f64(&self.ratio) * sphere_volume(self.n)
    }
}

pub fn monomial_sphere_integral(n: usize, alpha: &[u8]) -> Result<SphereIntegral> {
    if n < 2 || alpha.len() != n {
        return domain(format!("need n >= 2 and an exponent vector of length n (n = {n})"));
    }
    let e: Exponents = alpha.iter().copied().collect();
    let d: usize = alpha.iter().map(|&k| k as usize).sum();
    let ratio = match moment_numerator(&e) {
        None => Rational::from_i64(0),
        Some(num) => Rational::new(num.into(), moment_denominator(n, d).into()),
    };
    Ok(SphereIntegral { n, ratio })
}

/// How a quadrature value was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadratureMethod {
    ExactMonomial,
    MonteCarlo,
}

/// An integral over the sphere with respect to the unnormalized measure.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub value: f64,
    /// Zero for exact results, one standard error for Monte-Carlo.
    pub error_estimate: f64,
    pub method: QuadratureMethod,
}

impl From<&SphereIntegral> for QuadratureResult {
    fn from(s: &SphereIntegral) -> Self {
        Self { value: s.value(), error_estimate: 0.0, method: QuadratureMethod::ExactMonomial }
    }
}

/// Sphere mean of `p·q`, i.e. `∫ p q dσ / vol(S^{n−1})`.
pub fn pairing<T: Scalar>(p: &HomogeneousPolynomial<T>, q: &HomogeneousPolynomial<T>) -> T {
    let d = p.degree() + q.degree();
    if d % 2 == 1 || p.is_empty() || q.is_empty() {
        return T::zero();
    }
    let n = p.n();
    let den = moment_denominator(n, d);
    let qp: Vec<(u64, &Exponents, &T)> = q.terms().map(|(e, c)| (parity(e), e, c)).collect();
    if let Some(num) = integer_pairing(p, &qp) {
        return T::from_ratio(num, den as i128);
    }
    let mut acc = T::zero();
    for (a, x) in p.terms() {
        let pa = parity(a);
        for (pb, b, y) in &qp {
            if pa != *pb {
                continue;
            }
            let e: Exponents = a.iter().zip(b.iter()).map(|(i, j)| i + j).collect();
            let m = moment_numerator(&e).expect("matching parities give even exponents");
            acc = acc + x.clone() * (*y).clone() * T::from_ratio(m as i128, 1);
        }
    }
    acc / T::from_ratio(den as i128, 1)
}

/// Fast path for integer coefficients; `None` on non-integers or overflow.
fn integer_pairing<T: Scalar>(p: &HomogeneousPolynomial<T>, q: &[(u64, &Exponents, &T)]) -> Option<i128> {
    if !T::EXACT {
        return None;
    }
    let qi: Vec<(u64, &Exponents, i128)> =
        q.iter().map(|(pb, e, c)| c.as_i128().map(|v| (*pb, *e, v))).collect::<Option<_>>()?;
    let mut acc: i128 = 0;
    for (a, x) in p.terms() {
        let x = x.as_i128()?;
        let pa = parity(a);
        for (pb, b, y) in &qi {
            if pa != *pb {
                continue;
            }
            let e: Exponents = a.iter().zip(b.iter()).map(|(i, j)| i + j).collect();
            let m = i128::try_from(moment_numerator(&e)?).ok()?;
            acc = acc.checked_add(x.checked_mul(*y)?.checked_mul(m)?)?;
        }
    }
    Some(acc)
}

/// Sphere mean of `p`.
pub fn mean<T: Scalar>(p: &HomogeneousPolynomial<T>) -> T {
    pairing(p, &HomogeneousPolynomial::constant(p.n(), T::one()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use std::f64::consts::PI;

    #[test]
    fn volumes() {
        assert!((sphere_volume(2) - 2.0 * PI).abs() < 1e-12);
        assert!((sphere_volume(3) - 4.0 * PI).abs() < 1e-12);
        assert!((sphere_volume(4) - 2.0 * PI * PI).abs() < 1e-12);
    }

    #[test]
    fn basic_integrals() {
        let a = monomial_sphere_integral(2, &[2, 0]).unwrap();
        assert!((a.value() - PI).abs() < 1e-12);
        let b = monomial_sphere_integral(3, &[2, 0, 0]).unwrap();
        assert!((b.value() - 4.0 * PI / 3.0).abs() < 1e-12);
        assert_eq!(monomial_sphere_integral(4, &[1, 2, 0, 0]).unwrap().ratio, rat(0, 1));
        assert_eq!(monomial_sphere_integral(4, &[2, 2, 0, 0]).unwrap().ratio, rat(1, 24));
    }

    #[test]
    fn fast_and_slow_paths_agree() {
        let x = HomogeneousPolynomial::<Rational>::variable(3, 0);
        let p = x.mul(&x).add(&HomogeneousPolynomial::norm_squared(3));
        let half = p.scale(&rat(1, 2));
        assert_eq!(pairing(&p, &p), pairing(&half, &p) * rat(2, 1));
    }
}
