//! Sparse homogeneous polynomials in `n` variables.

use std::collections::BTreeMap;

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Exponent vector of a monomial.
pub type Exponents = SmallVec<[u8; 8]>;

/// Bitmask of the odd exponents. Multiplication by `|x|²` and the Laplacian
/// preserve it, and monomials with different masks are orthogonal on the
/// sphere.
pub fn parity(e: &Exponents) -> u64 {
    e.iter().enumerate().filter(|(_, &x)| x % 2 == 1).fold(0, |m, (i, _)| m | (1 << i))
}

/// All exponent vectors of total degree `d` in `n` variables.
pub fn monomials(n: usize, d: usize) -> Vec<Exponents> {
    fn rec(i: usize, left: usize, cur: &mut Exponents, out: &mut Vec<Exponents>) {
        if i + 1 == cur.len() {
            cur[i] = left as u8;
            out.push(cur.clone());
            return;
        }
        for e in (0..=left).rev() {
            cur[i] = e as u8;
            rec(i + 1, left - e, cur, out);
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    let mut cur: Exponents = SmallVec::from_elem(0, n);
    rec(0, d, &mut cur, &mut out);
    out
}

/// Homogeneous polynomial; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct HomogeneousPolynomial<T> {
    n: usize,
    degree: usize,
    terms: BTreeMap<Exponents, T>,
}

impl<T: Scalar> HomogeneousPolynomial<T> {
    pub fn zero(n: usize, degree: usize) -> Self {
        Self { n, degree, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: T) -> Self {
        let mut p = Self::zero(n, 0);
        p.add_term(SmallVec::from_elem(0, n), c);
        p
    }

    pub fn variable(n: usize, i: usize) -> Self {
        let mut e: Exponents = SmallVec::from_elem(0, n);
        e[i] = 1;
        let mut p = Self::zero(n, 1);
        p.add_term(e, T::one());
        p
    }

    /// `|x|² = Σ xᵢ²`.
    pub fn norm_squared(n: usize) -> Self {
        let mut p = Self::zero(n, 2);
        for i in 0..n {
            let mut e: Exponents = SmallVec::from_elem(0, n);
            e[i] = 2;
            p.add_term(e, T::one());
        }
        p
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs; all
    /// exponent vectors must have length `n` and total degree `degree`.
    pub fn from_terms(
        n: usize,
        degree: usize,
        terms: impl IntoIterator<Item = (Vec<u8>, T)>,
    ) -> Result<Self> {
        let mut p = Self::zero(n, degree);
        for (e, c) in terms {
            if e.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: e.len() });
            }
            let d: usize = e.iter().map(|&x| x as usize).sum();
            if d != degree {
                return Err(Error::DegreeMismatch { expected: degree, found: d });
            }
            p.add_term(SmallVec::from_vec(e), c);
        }
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &T)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: &Exponents) -> Option<&T> {
        self.terms.get(e)
    }

    /// Zero test: exact for rationals, relative to the largest coefficient
    /// (or `scale`, if larger) for floats.
    pub fn is_zero_rel(&self, scale: f64) -> bool {
        let s = self.terms.values().map(Scalar::magnitude).fold(scale, f64::max);
        self.terms.values().all(|c| c.is_negligible(s))
    }

    pub fn is_zero(&self) -> bool {
        self.is_zero_rel(0.0)
    }

    pub(crate) fn add_term(&mut self, e: Exponents, c: T) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(v) => {
                let s = v.clone() + c;
                if s.is_zero() {
                    self.terms.remove(&e);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    /// `self += c·other`.
    ///
    /// # Panics
    /// If the dimensions or degrees differ.
    pub fn add_scaled(&mut self, other: &Self, c: &T) {
        assert_eq!(self.n, other.n, "dimension mismatch");
        assert_eq!(self.degree, other.degree, "degree mismatch");
        if c.is_zero() {
            return;
        }
        for (e, v) in &other.terms {
            self.add_term(e.clone(), v.clone() * c.clone());
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, &T::one());
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, &-T::one());
        out
    }

    pub fn scale(&self, c: &T) -> Self {
        let mut out = Self::zero(self.n, self.degree);
        if !c.is_zero() {
            for (e, v) in &self.terms {
                out.add_term(e.clone(), v.clone() * c.clone());
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let mut out = Self::zero(self.n, self.degree + other.degree);
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                let e: Exponents = a.iter().zip(b).map(|(i, j)| i + j).collect();
                out.add_term(e, x.clone() * y.clone());
            }
        }
        out
    }

    /// `xᵢ · self`.
    pub fn mul_var(&self, i: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut e = e.clone();
                e[i] += 1;
                (e, c.clone())
            })
            .collect();
        Self { n: self.n, degree: self.degree + 1, terms }
    }

    /// `|x|² · self`.
    pub fn mul_norm2(&self) -> Self {
        let mut out = Self::zero(self.n, self.degree + 2);
        for i in 0..self.n {
            for (e, c) in &self.terms {
                let mut e = e.clone();
                e[i] += 2;
                out.add_term(e, c.clone());
            }
        }
        out
    }

    /// `∂ᵢ self`; the degree of a constant's derivative stays 0.
    pub fn partial(&self, i: usize) -> Self {
        let mut out = Self::zero(self.n, self.degree.saturating_sub(1));
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut f = e.clone();
            f[i] -= 1;
            out.add_term(f, c.clone() * T::from_i64(e[i] as i64));
        }
        out
    }

    pub fn laplacian(&self) -> Self {
        let mut out = Self::zero(self.n, self.degree.saturating_sub(2));
        for (e, c) in &self.terms {
            for i in 0..self.n {
                if e[i] >= 2 {
                    let mut f = e.clone();
                    f[i] -= 2;
                    out.add_term(f, c.clone() * T::from_i64((e[i] as i64) * (e[i] as i64 - 1)));
                }
            }
        }
        out
    }

    pub fn is_harmonic(&self) -> bool {
        let scale = self.terms.values().map(Scalar::magnitude).fold(0.0, f64::max);
        self.laplacian().is_zero_rel(scale)
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| c.to_f64() * e.iter().zip(x).map(|(&k, &xi)| xi.powi(k as i32)).product::<f64>())
            .sum()
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> HomogeneousPolynomial<U> {
        let mut out = HomogeneousPolynomial::zero(self.n, self.degree);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), f(c));
        }
        out
    }
}

impl<T: Scalar> std::fmt::Display for HomogeneousPolynomial<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (e, c)) in self.terms.iter().enumerate() {
            if idx > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c:?})")?;
            for (i, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => write!(f, "*x{}", i + 1)?,
                    _ => write!(f, "*x{}^{}", i + 1, k)?,
                }
            }
        }
        Ok(())
    }
}
