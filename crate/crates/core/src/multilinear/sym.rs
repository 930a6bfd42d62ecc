//! Symmetric matrices with the trace pairing and the commutator action.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

use super::forms::check_skew;

/// Symmetric `n×n` matrix; `⟨A, B⟩ = tr(AB)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix<T> {
    entries: Matrix<T>,
}

impl<T: Scalar> SymMatrix<T> {
    pub fn new(entries: Matrix<T>) -> Result<Self> {
        if entries.rows() != entries.cols() {
            return Err(Error::DimensionMismatch { expected: entries.rows(), found: entries.cols() });
        }
        let n = entries.rows();
        for i in 0..n {
            for j in 0..i {
                if !entries[(i, j)].approx_eq(&entries[(j, i)], entries[(i, j)].magnitude()) {
                    return Err(Error::Domain(format!("matrix not symmetric at ({i},{j})")));
                }
            }
        }
        Ok(Self { entries })
    }

    pub fn identity(n: usize) -> Self {
        Self { entries: Matrix::identity(n) }
    }

    /// `S_pq = E_pq + E_qp` for `p ≠ q`, `E_pp` on the diagonal.
    pub fn basis(n: usize, p: usize, q: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        m[(p, q)] = T::one();
        m[(q, p)] = T::one();
        Self { entries: m }
    }

    /// Rank-one matrix `a aᵀ`.
    pub fn outer(a: &[T]) -> Self {
        let n = a.len();
        Self { entries: Matrix::from_fn(n, n, |i, j| a[i].clone() * a[j].clone()) }
    }

    pub fn n(&self) -> usize {
        self.entries.rows()
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.entries[(i, j)]
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.entries
    }

    pub fn inner(&self, other: &Self) -> T {
        let n = self.n();
        let mut acc = T::zero();
        for i in 0..n {
            for j in 0..n {
                let (a, b) = (&self.entries[(i, j)], &other.entries[(j, i)]);
                if !a.is_zero() && !b.is_zero() {
                    acc = acc + a.clone() * b.clone();
                }
            }
        }
        acc
    }

    pub fn apply(&self, v: &[T]) -> Vec<T> {
        self.entries.apply(v)
    }
}

/// The commutator action `C ↦ AC − CA` of a skew operator on `Sym²`.
#[derive(Clone, Debug)]
pub struct Sym2Operator<T> {
    a: Matrix<T>,
}

impl<T: Scalar> Sym2Operator<T> {
    pub fn apply(&self, c: &SymMatrix<T>) -> Result<SymMatrix<T>> {
        let ac = self.a.mul(c.matrix())?;
        let ca = c.matrix().mul(&self.a)?;
        let n = ac.rows();
        let entries = Matrix::from_fn(n, n, |i, j| ac[(i, j)].clone() - ca[(i, j)].clone());
        Ok(SymMatrix { entries })
    }
}

pub fn extend_to_sym2<T: Scalar>(a: &Matrix<T>) -> Result<Sym2Operator<T>> {
    check_skew(a)?;
    Ok(Sym2Operator { a: a.clone() })
}
