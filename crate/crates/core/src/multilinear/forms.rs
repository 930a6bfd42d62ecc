//! Exterior powers of `R^n` with basis wedges indexed by bitmasks.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// All `p`-subsets of `{0, …, n−1}` as bitmasks, in lexicographic order of
/// their sorted index lists.
pub fn basis_masks(n: usize, p: usize) -> Vec<u64> {
    fn rec(start: usize, n: usize, left: usize, acc: u64, out: &mut Vec<u64>) {
        if left == 0 {
            out.push(acc);
            return;
        }
        for i in start..=n - left {
            rec(i + 1, n, left - 1, acc | (1 << i), out);
        }
    }
    let mut out = Vec::new();
    if p <= n {
        rec(0, n, p, 0, &mut out);
    }
    out
}

/// Sorted indices of a mask.
pub fn mask_indices(mask: u64) -> Vec<usize> {
    (0..64).filter(|i| mask & (1 << i) != 0).collect()
}

/// Sign of `e_S ∧ e_T` relative to `e_{S∪T}`, or `None` when `S ∩ T ≠ ∅`.
pub fn wedge_sign(s: u64, t: u64) -> Option<i64> {
    if s & t != 0 {
        return None;
    }
    let mut inversions = 0u32;
    for j in mask_indices(t) {
        inversions += (s >> (j + 1)).count_ones();
    }
    Some(if inversions % 2 == 0 { 1 } else { -1 })
}

/// `ι_{e_i} e_S = sign · e_{S∖i}`; `None` when `i ∉ S`.
pub fn interior_sign(i: usize, s: u64) -> Option<i64> {
    if s & (1 << i) == 0 {
        return None;
    }
    let before = (s & ((1u64 << i) - 1)).count_ones();
    Some(if before % 2 == 0 { 1 } else { -1 })
}

/// A `p`-form on `R^n` in the orthonormal basis of increasing wedges.
#[derive(Clone, Debug, PartialEq)]
pub struct PForm<T> {
    n: usize,
    p: usize,
    coeffs: BTreeMap<u64, T>,
}

impl<T: Scalar> PForm<T> {
    pub fn zero(n: usize, p: usize) -> Self {
        Self { n, p, coeffs: BTreeMap::new() }
    }

    /// `e_{i₁} ∧ … ∧ e_{i_p}` for arbitrary (0-based) indices, sorted with sign.
    pub fn basis(n: usize, indices: &[usize]) -> Result<Self> {
        let mut form = Self { n, p: 0, coeffs: BTreeMap::from([(0u64, T::one())]) };
        for &i in indices {
            if i >= n {
                return Err(Error::DimensionMismatch { expected: n, found: i + 1 });
            }
            form = form.wedge(&Self::basis_vector(n, i))?;
        }
        Ok(form)
    }

    fn basis_vector(n: usize, i: usize) -> Self {
        Self { n, p: 1, coeffs: BTreeMap::from([(1u64 << i, T::one())]) }
    }

    pub fn from_vector(v: &[T]) -> Self {
        let n = v.len();
        let coeffs = v
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (1u64 << i, c.clone()))
            .collect();
        Self { n, p: 1, coeffs }
    }

    /// Pure wedge `v₁ ∧ … ∧ v_p`.
    pub fn from_vectors(vs: &[Vec<T>]) -> Result<Self> {
        let n = vs.first().map_or(0, Vec::len);
        let mut form = Self { n, p: 0, coeffs: BTreeMap::from([(0u64, T::one())]) };
        for v in vs {
            form = form.wedge(&Self::from_vector(v))?;
        }
        Ok(form)
    }

    pub fn from_coeffs(n: usize, p: usize, coeffs: impl IntoIterator<Item = (u64, T)>) -> Result<Self> {
        let mut out = Self::zero(n, p);
        for (m, c) in coeffs {
            if m.count_ones() as usize != p || (n < 64 && m >> n != 0) {
                return Err(Error::DimensionMismatch { expected: p, found: m.count_ones() as usize });
            }
            out.add_term(m, c);
        }
        Ok(out)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.p
    }

    pub fn coeff(&self, mask: u64) -> T {
        self.coeffs.get(&mask).cloned().unwrap_or_else(T::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&u64, &T)> {
        self.coeffs.iter()
    }

    fn add_term(&mut self, mask: u64, c: T) {
        if c.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(mask).or_insert_with(T::zero);
        *entry = entry.clone() + c;
        if entry.is_zero() {
            self.coeffs.remove(&mask);
        }
    }

    pub fn wedge(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: other.n });
        }
        let mut out = Self::zero(self.n, self.p + other.p);
        for (&s, a) in &self.coeffs {
            for (&t, b) in &other.coeffs {
                if let Some(sign) = wedge_sign(s, t) {
                    out.add_term(s | t, T::from_i64(sign) * a.clone() * b.clone());
                }
            }
        }
        Ok(out)
    }

    /// Interior product `ι_v ω`.
    pub fn interior(&self, v: &[T]) -> Result<Self> {
        if v.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: v.len() });
        }
        let mut out = Self::zero(self.n, self.p.saturating_sub(1));
        for (&s, a) in &self.coeffs {
            for (i, vi) in v.iter().enumerate() {
                if vi.is_zero() {
                    continue;
                }
                if let Some(sign) = interior_sign(i, s) {
                    out.add_term(s & !(1 << i), T::from_i64(sign) * vi.clone() * a.clone());
                }
            }
        }
        Ok(out)
    }

    /// Inner product for which increasing basis wedges are orthonormal; on
    /// pure wedges it is the Gram determinant.
    pub fn inner(&self, other: &Self) -> T {
        self.coeffs
            .iter()
            .filter_map(|(m, a)| other.coeffs.get(m).map(|b| a.clone() * b.clone()))
            .fold(T::zero(), |acc, x| acc + x)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&m, c) in &other.coeffs {
            out.add_term(m, c.clone());
        }
        out
    }

    pub fn scale(&self, c: &T) -> Self {
        let mut out = Self::zero(self.n, self.p);
        for (&m, a) in &self.coeffs {
            out.add_term(m, a.clone() * c.clone());
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        let scale = self.coeffs.values().map(Scalar::magnitude).fold(0.0, f64::max);
        self.coeffs.values().all(|c| c.is_negligible(scale))
    }
}

/// Linear operator on `Λᵖ R^n`, stored as a matrix on [`basis_masks`].
#[derive(Clone, Debug)]
pub struct FormOperator<T> {
    n: usize,
    p: usize,
    masks: Vec<u64>,
    matrix: Matrix<T>,
}

impl<T: Scalar> FormOperator<T> {
    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    pub fn masks(&self) -> &[u64] {
        &self.masks
    }

    pub fn apply(&self, form: &PForm<T>) -> Result<PForm<T>> {
        if form.n != self.n || form.p != self.p {
            return Err(Error::DimensionMismatch { expected: self.p, found: form.p });
        }
        let x: Vec<T> = self.masks.iter().map(|&m| form.coeff(m)).collect();
        let y = self.matrix.apply(&x);
        PForm::from_coeffs(self.n, self.p, self.masks.iter().copied().zip(y))
    }
}

pub(crate) fn check_skew<T: Scalar>(a: &Matrix<T>) -> Result<()> {
    if a.rows() != a.cols() {
        return Err(Error::DimensionMismatch { expected: a.rows(), found: a.cols() });
    }
    let scale = (0..a.rows())
        .flat_map(|i| (0..a.cols()).map(move |j| (i, j)))
        .map(|(i, j)| a[(i, j)].magnitude())
        .fold(0.0, f64::max);
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let s = a[(i, j)].clone() + a[(j, i)].clone();
            let ok = if T::EXACT { s.is_zero() } else { s.magnitude() <= 1e-12 * scale.max(1.0) };
            if !ok {
                return Err(Error::Domain(format!("operator is not antisymmetric at ({i},{j})")));
            }
        }
    }
    Ok(())
}

/// Derivation extension of a skew operator to `Λᵖ`:
/// `A(e_{i₁}∧…∧e_{i_p}) = Σ_j e_{i₁}∧…∧A e_{i_j}∧…∧e_{i_p}`.
pub fn extend_to_forms<T: Scalar>(a: &Matrix<T>, p: usize) -> Result<FormOperator<T>> {
    check_skew(a)?;
    let n = a.rows();
    if p > n {
        return Err(Error::Domain(format!("form degree {p} exceeds dimension {n}")));
    }
    let masks = basis_masks(n, p);
    let index: BTreeMap<u64, usize> = masks.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let mut matrix: Matrix<T> = Matrix::zeros(masks.len(), masks.len());
    for (col, &alpha) in masks.iter().enumerate() {
        // A e_α = Σ_{j∈α} Σ_i A_ij e_i ∧ ι_{e_j} e_α
        for j in mask_indices(alpha) {
            let s1 = interior_sign(j, alpha).expect("j in alpha");
            let rest = alpha & !(1 << j);
            for i in 0..n {
                let aij = &a[(i, j)];
                if aij.is_zero() {
                    continue;
                }
                if let Some(s2) = wedge_sign(1 << i, rest) {
                    let row = index[&(rest | (1 << i))];
                    matrix[(row, col)] =
                        matrix[(row, col)].clone() + T::from_i64(s1 * s2) * aij.clone();
                }
            }
        }
    }
    Ok(FormOperator { n, p, masks, matrix })
}

/// Checks `Σᵢ eᵢ ∧ ι_{eᵢ} ω = p·ω` on every basis wedge of `Λᵖ R^n`, exactly.
pub fn wedge_contract_identity_check(p: usize, n: usize) -> bool {
    use crate::scalar::Rational;
    if p == 0 || p > n {
        return false;
    }
    basis_masks(n, p).into_iter().all(|alpha| {
        let omega = PForm::<Rational>::from_coeffs(n, p, [(alpha, Rational::from_i64(1))])
            .expect("valid basis mask");
        let mut total = PForm::zero(n, p);
        for i in 0..n {
            let mut ei = vec![Rational::from_i64(0); n];
            ei[i] = Rational::from_i64(1);
            let contracted = omega.interior(&ei).expect("dimensions agree");
            let back = PForm::from_vector(&ei).wedge(&contracted).expect("dimensions agree");
            total = total.add(&back);
        }
        total == omega.scale(&Rational::from_i64(p as i64))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};

    fn rotation12(n: usize) -> Matrix<Rational> {
        // A e₁ = e₂, A e₂ = −e₁ (0-based: e0 ↦ e1).
        let mut a = Matrix::zeros(n, n);
        a[(1, 0)] = rat(1, 1);
        a[(0, 1)] = rat(-1, 1);
        a
    }

    #[test]
    fn rotation_generator_examples() {
        let a = extend_to_forms(&rotation12(3), 2).unwrap();
        let e13 = PForm::<Rational>::basis(3, &[0, 2]).unwrap();
        let e23 = PForm::<Rational>::basis(3, &[1, 2]).unwrap();
        assert_eq!(a.apply(&e13).unwrap(), e23);
        let e12 = PForm::<Rational>::basis(3, &[0, 1]).unwrap();
        assert!(a.apply(&e12).unwrap().is_zero());
    }

    #[test]
    fn basis_sorting_sign() {
        let e21 = PForm::<Rational>::basis(3, &[1, 0]).unwrap();
        assert_eq!(e21.coeff(0b11), rat(-1, 1));
        assert!(PForm::<Rational>::basis(3, &[1, 1]).unwrap().is_zero());
    }

    #[test]
    fn wedge_contract_identity() {
        assert!(wedge_contract_identity_check(1, 3));
        assert!(wedge_contract_identity_check(2, 4));
        assert!(wedge_contract_identity_check(3, 7));
    }

    #[test]
    fn rejects_non_skew() {
        let mut a = rotation12(3);
        a[(2, 2)] = rat(1, 1);
        assert!(extend_to_forms(&a, 1).is_err());
    }

    #[test]
    fn mask_enumeration_counts() {
        assert_eq!(basis_masks(5, 2).len(), 10);
        assert_eq!(basis_masks(7, 3).len(), 35);
        assert_eq!(basis_masks(4, 0), vec![0]);
    }
}
