//! Orthogonal bases of degree-`k` spherical harmonics and harmonic
//! decomposition of homogeneous polynomials.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::polynomial::{monomials, parity, Exponents, HomogeneousPolynomial};
use super::sphere::pairing;
use crate::linalg::Matrix;
use crate::scalar::{Rational, Scalar};

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// `C(n+k−1, k) − C(n+k−3, k−2)`.
pub fn dim_harmonics(n: usize, k: usize) -> u64 {
    let (n, k) = (n as u64, k as u64);
    let all = binomial(n + k - 1, k);
    if k < 2 {
        all
    } else {
        all - binomial(n + k - 3, k - 2)
    }
}

/// Sphere-orthogonal basis of `Ω_k` on `R^n`.
///
/// Each element is a primitive integer polynomial whose monomials share one
/// odd-exponent pattern (its parity class).
#[derive(Debug)]
pub struct HarmonicBasis {
    n: usize,
    k: usize,
    elements: Vec<HomogeneousPolynomial<Rational>>,
    classes: Vec<u64>,
    norms: Vec<Rational>,
    by_class: BTreeMap<u64, Vec<usize>>,
}

impl HarmonicBasis {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[HomogeneousPolynomial<Rational>] {
        &self.elements
    }

    pub fn element(&self, a: usize) -> &HomogeneousPolynomial<Rational> {
        &self.elements[a]
    }

    /// Parity class of element `a`.
    pub fn class(&self, a: usize) -> u64 {
        self.classes[a]
    }

    /// Sphere mean of `h_a²`.
    pub fn norm(&self, a: usize) -> &Rational {
        &self.norms[a]
    }

    /// Indices of the elements in a parity class.
    pub fn in_class(&self, class: u64) -> &[usize] {
        self.by_class.get(&class).map_or(&[], Vec::as_slice)
    }

    fn build(n: usize, k: usize) -> Self {
        let mut classes: BTreeMap<u64, Vec<Exponents>> = BTreeMap::new();
        for e in monomials(n, k) {
            classes.entry(parity(&e)).or_default().push(e);
        }
        let lower: HashMap<Exponents, usize> =
            if k >= 2 { monomials(n, k - 2).into_iter().enumerate().map(|(i, e)| (e, i)).collect() } else { HashMap::new() };
        let mut out = Self { n, k, elements: Vec::new(), classes: Vec::new(), norms: Vec::new(), by_class: BTreeMap::new() };
        for (class, monos) in classes {
            let kernel = laplacian_kernel(n, k, &monos, &lower);
            let mut ortho: Vec<(HomogeneousPolynomial<Rational>, Rational)> = Vec::new();
            for mut p in kernel {
                for (h, nh) in &ortho {
                    let c = pairing(&p, h) / nh.clone();
                    p.add_scaled(h, &-c);
                }
                let p = primitive(&p);
                let norm = pairing(&p, &p);
                ortho.push((p, norm));
            }
            for (p, norm) in ortho {
                out.by_class.entry(class).or_default().push(out.elements.len());
                out.elements.push(p);
                out.classes.push(class);
                out.norms.push(norm);
            }
        }
        out
    }
}

/// Kernel of the Laplacian restricted to the span of `monos`.
fn laplacian_kernel(
    n: usize,
    k: usize,
    monos: &[Exponents],
    lower: &HashMap<Exponents, usize>,
) -> Vec<HomogeneousPolynomial<Rational>> {
    let polys: Vec<HomogeneousPolynomial<Rational>> = monos
        .iter()
        .map(|e| {
            let mut p = HomogeneousPolynomial::zero(n, k);
            p.add_term(e.clone(), Rational::one());
            p
        })
        .collect();
    if k < 2 {
        return polys;
    }
    let images: Vec<HomogeneousPolynomial<Rational>> = polys.iter().map(|p| p.laplacian()).collect();
    let mut rows: BTreeMap<usize, usize> = BTreeMap::new();
    for img in &images {
        for (e, _) in img.terms() {
            let next = rows.len();
            rows.entry(lower[e]).or_insert(next);
        }
    }
    let mut m = Matrix::zeros(rows.len(), monos.len());
    for (col, img) in images.iter().enumerate() {
        for (e, c) in img.terms() {
            m[(rows[&lower[e]], col)] = c.clone();
        }
    }
    m.nullspace()
        .into_iter()
        .map(|v| {
            let mut p = HomogeneousPolynomial::zero(n, k);
            for (e, c) in monos.iter().zip(v) {
                p.add_term(e.clone(), c);
            }
            p
        })
        .collect()
}

/// Scales to integer coefficients with gcd 1 and a positive leading term.
fn primitive(p: &HomogeneousPolynomial<Rational>) -> HomogeneousPolynomial<Rational> {
    let mut lcm = BigInt::one();
    let mut gcd = BigInt::zero();
    for (_, c) in p.terms() {
        lcm = lcm.lcm(c.denom());
    }
    for (_, c) in p.terms() {
        gcd = gcd.gcd(&(c.numer() * &lcm / c.denom()));
    }
    if gcd.is_zero() {
        return p.clone();
    }
    let lead_negative = p.terms().next().is_some_and(|(_, c)| c.is_negative());
    let sign = if lead_negative { -BigInt::one() } else { BigInt::one() };
    p.scale(&Rational::new(lcm * sign, gcd))
}

static CACHE: OnceLock<RwLock<HashMap<(usize, usize), Arc<HarmonicBasis>>>> = OnceLock::new();

/// The (memoized) basis of `Ω_k`. Concurrent first calls may both build it;
/// the first insertion wins.
pub fn harmonic_basis(n: usize, k: usize) -> Arc<HarmonicBasis> {
    let cache = CACHE.get_or_init(Default::default);
    if let Some(b) = cache.read().expect("basis cache poisoned").get(&(n, k)) {
        return Arc::clone(b);
    }
    let built = Arc::new(HarmonicBasis::build(n, k));
    let mut w = cache.write().expect("basis cache poisoned");
    Arc::clone(w.entry((n, k)).or_insert(built))
}

/// Harmonic components `(h_k, h_{k−2}, …)` with `u = Σⱼ |x|^{2j} h_{k−2j}`.
pub fn harmonic_decompose<T: Scalar>(u: &HomogeneousPolynomial<T>) -> Vec<HomogeneousPolynomial<T>> {
    let (n, k) = (u.n(), u.degree());
    let mut by_class: BTreeMap<u64, HomogeneousPolynomial<T>> = BTreeMap::new();
    for (e, c) in u.terms() {
        by_class
            .entry(parity(e))
            .or_insert_with(|| HomogeneousPolynomial::zero(n, k))
            .add_term(e.clone(), c.clone());
    }
    (0..=k / 2)
        .map(|j| {
            let d = k - 2 * j;
            let basis = harmonic_basis(n, d);
            let mut h = HomogeneousPolynomial::zero(n, d);
            for (&class, part) in &by_class {
                for &a in basis.in_class(class) {
                    let ha: HomogeneousPolynomial<T> = basis.element(a).map(T::from_rational);
                    let c = pairing(part, &ha) / T::from_rational(basis.norm(a));
                    h.add_scaled(&ha, &c);
                }
            }
            h
        })
        .collect()
}

/// `Σⱼ |x|^{2j} parts[j]`, the inverse of [`harmonic_decompose`].
pub fn reassemble<T: Scalar>(parts: &[HomogeneousPolynomial<T>]) -> Option<HomogeneousPolynomial<T>> {
    let mut out: Option<HomogeneousPolynomial<T>> = None;
    for (j, h) in parts.iter().enumerate() {
        let mut lifted = h.clone();
        for _ in 0..j {
            lifted = lifted.mul_norm2();
        }
        out = Some(match out {
            None => lifted,
            Some(acc) => acc.add(&lifted),
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn dimensions() {
        assert_eq!(dim_harmonics(4, 3), 16);
        assert_eq!(dim_harmonics(6, 3), 50);
        assert_eq!(dim_harmonics(8, 3), 112);
        assert_eq!(dim_harmonics(5, 0), 1);
        assert_eq!(dim_harmonics(5, 1), 5);
    }

    #[test]
    fn linear_harmonics() {
        let b = harmonic_basis(3, 1);
        assert_eq!(b.len(), 3);
        for h in b.elements() {
            assert_eq!(h.len(), 1);
        }
    }

    #[test]
    fn quadratic_basis_is_orthogonal() {
        let b = harmonic_basis(3, 2);
        assert_eq!(b.len(), 5);
        for (i, h) in b.elements().iter().enumerate() {
            assert!(h.laplacian().is_zero());
            for g in &b.elements()[..i] {
                assert_eq!(pairing(h, g), rat(0, 1));
            }
        }
    }

    #[test]
    fn decompose_square() {
        let x = HomogeneousPolynomial::<Rational>::variable(3, 0);
        let parts = harmonic_decompose(&x.mul(&x));
        let third = HomogeneousPolynomial::constant(3, rat(1, 3));
        assert_eq!(parts[1], third);
        let expected = x.mul(&x).sub(&HomogeneousPolynomial::norm_squared(3).scale(&rat(1, 3)));
        assert_eq!(parts[0], expected);
    }

    #[test]
    fn decompose_norm() {
        let parts = harmonic_decompose(&HomogeneousPolynomial::<Rational>::norm_squared(3));
        assert!(parts[0].is_zero());
        assert_eq!(parts[1], HomogeneousPolynomial::constant(3, rat(1, 1)));
    }
}
