//! Small dense matrices over any [`Scalar`], row reduction and power iteration.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch { expected: c, found: row.len() });
            }
            data.extend(row);
        }
        Ok(Self { rows: r, cols: c, data })
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let data = (0..rows * cols).map(|x| f(x / cols, x % cols)).collect();
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, found: other.rows });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = &self[(i, l)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(l, j)];
                    if !b.is_zero() {
                        out[(i, j)] = out[(i, j)].clone() + a.clone() * b.clone();
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &[T]) -> Vec<T> {
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect()
    }

    /// `xᵀ M y`.
    pub fn bilinear(&self, x: &[T], y: &[T]) -> T {
        let my = self.apply(y);
        dot(x, &my)
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn is_zero(&self) -> bool {
        let scale = self.data.iter().map(Scalar::magnitude).fold(0.0, f64::max);
        self.data.iter().all(|x| x.is_negligible(scale))
    }

    pub fn is_skew(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        let scale = self.data.iter().map(Scalar::magnitude).fold(0.0, f64::max);
        (0..self.rows).all(|i| {
            (0..self.cols)
                .all(|j| (self[(i, j)].clone() + self[(j, i)].clone()).is_negligible(scale))
        })
    }

    /// Basis of the right nullspace `{x : M x = 0}`.
    pub fn nullspace(&self) -> Vec<Vec<T>> {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        let mut basis = Vec::new();
        let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
        for free in (0..self.cols).filter(|c| !pivot_cols.contains(c)) {
            let mut v = vec![T::zero(); self.cols];
            v[free] = T::one();
            for &(r, c) in &pivots {
                v[c] = -m[(r, free)].clone();
            }
            basis.push(v);
        }
        basis
    }

    pub fn rank(&self) -> usize {
        self.clone().rref_in_place().len()
    }

    /// Reduced row echelon form; returns the `(row, column)` pivot positions.
    pub fn rref_in_place(&mut self) -> Vec<(usize, usize)> {
        let scale = self.data.iter().map(Scalar::magnitude).fold(0.0, f64::max);
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let best = (r..self.rows)
                .filter(|&i| !self[(i, c)].is_negligible(scale))
                .max_by(|&a, &b| {
                    self[(a, c)].magnitude().total_cmp(&self[(b, c)].magnitude())
                });
            let Some(p) = best else { continue };
            self.swap_rows(r, p);
            let inv = T::one() / self[(r, c)].clone();
            for j in c..self.cols {
                self[(r, j)] = self[(r, j)].clone() * inv.clone();
            }
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let f = self[(i, c)].clone();
                if f.is_zero() {
                    continue;
                }
                for j in c..self.cols {
                    let t = self[(r, j)].clone();
                    if !t.is_zero() {
                        self[(i, j)] = self[(i, j)].clone() - f.clone() * t;
                    }
                }
                self[(i, c)] = T::zero();
            }
            pivots.push((r, c));
            r += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot<T: Scalar>(x: &[T], y: &[T]) -> T {
    x.iter()
        .zip(y)
        .filter(|(a, b)| !a.is_zero() && !b.is_zero())
        .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
}

impl Matrix<f64> {
    /// Largest singular value by power iteration on `MᵀM`.
    ///
    /// Stops when successive estimates agree to `1e-10` relative; gives up
    /// after `10⁴` iterations.
    pub fn operator_norm(&self) -> Result<f64> {
        const MAX_ITERS: usize = 10_000;
        if self.data.iter().all(|x| *x == 0.0) {
            return Ok(0.0);
        }
        let mtm = self.transpose().mul(self)?;
        let n = self.cols;
        // Deterministic start that is generically not orthogonal to the top
        // singular vector.
        let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * (i as f64 + 1.0).sqrt()).collect();
        let mut prev = 0.0;
        for _ in 0..MAX_ITERS {
            let y = mtm.apply(&x);
            let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm == 0.0 {
                return Ok(0.0);
            }
            x = y.iter().map(|v| v / norm).collect();
            if (norm - prev).abs() <= 1e-10 * norm {
                return Ok(norm.sqrt());
            }
            prev = norm;
        }
        Err(Error::NotConverged { iterations: MAX_ITERS })
    }

    /// Determinant by partial-pivot elimination.
    pub fn det(&self) -> f64 {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let mut m = self.clone();
        let n = self.rows;
        let mut det = 1.0;
        for c in 0..n {
            let p = (c..n).max_by(|&a, &b| m[(a, c)].abs().total_cmp(&m[(b, c)].abs())).unwrap();
            if m[(p, c)] == 0.0 {
                return 0.0;
            }
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            det *= m[(c, c)];
            for i in c + 1..n {
                let f = m[(i, c)] / m[(c, c)];
                for j in c..n {
                    m[(i, j)] -= f * m[(c, j)];
                }
            }
        }
        det
    }
}

/// Orthonormal `m`-frame in `R^n` from Gram–Schmidt on Gaussian vectors.
///
/// A draw whose Gram–Schmidt pivot falls below `1e-8` is discarded and redrawn.
pub fn random_frame<R: Rng + ?Sized>(rng: &mut R, n: usize, m: usize) -> Result<Vec<Vec<f64>>> {
    if m > n {
        return Err(Error::DimensionMismatch { expected: n, found: m });
    }
    let mut frame: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut rejected = 0usize;
    while frame.len() < m {
        let mut v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        for e in &frame {
            let d: f64 = v.iter().zip(e).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(e).for_each(|(a, b)| *a -= d * b);
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-8 {
            rejected += 1;
            if rejected > 1000 {
                return Err(Error::Degenerate("repeated degenerate Gaussian frames".into()));
            }
            continue;
        }
        frame.push(v.into_iter().map(|x| x / norm).collect());
    }
    Ok(frame)
}

/// Uniform random unit vector in `R^n`.
pub fn random_unit<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm >= 1e-8 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn exact_nullspace() {
        let m: Matrix<Rational> = Matrix::from_rows(vec![
            vec![rat(1, 1), rat(2, 1), rat(3, 1)],
            vec![rat(2, 1), rat(4, 1), rat(6, 1)],
        ])
        .unwrap();
        let ns = m.nullspace();
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(m.apply(v).iter().all(|x| *x == rat(0, 1)));
        }
    }

    #[test]
    fn operator_norm_of_diagonal() {
        let m = Matrix::from_fn(3, 3, |i, j| if i == j { [1.0, -4.0, 2.0][i] } else { 0.0 });
        assert!((m.operator_norm().unwrap() - 4.0).abs() < 1e-8);
    }

    #[test]
    fn frames_are_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = random_frame(&mut rng, 5, 4).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let d: f64 = f[i].iter().zip(&f[j]).map(|(a, b)| a * b).sum();
                assert!((d - if i == j { 1.0 } else { 0.0 }).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn determinant() {
        let m = Matrix::from_rows(vec![vec![2.0, 1.0], vec![1.0, 3.0]]).unwrap();
        assert!((m.det() - 5.0).abs() < 1e-12);
    }
}
