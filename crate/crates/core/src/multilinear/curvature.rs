//! Algebraic curvature tensors, the constant-curvature tensor `G` and the
//! complex-hyperbolic model.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{dot, random_frame, random_unit};
use crate::scalar::Scalar;

/// `G(a,b)c = ⟨a,c⟩b − ⟨b,c⟩a`.
pub fn g_tensor<T: Scalar>(a: &[T], b: &[T], c: &[T]) -> Result<Vec<T>> {
    let n = a.len();
    for v in [b, c] {
        if v.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: v.len() });
        }
    }
    let ac = dot(a, c);
    let bc = dot(b, c);
    Ok(a.iter().zip(b).map(|(ai, bi)| ac.clone() * bi.clone() - bc.clone() * ai.clone()).collect())
}

/// `G(a,b,c,d) = ⟨a,c⟩⟨b,d⟩ − ⟨b,c⟩⟨a,d⟩`.
pub fn g_value<T: Scalar>(a: &[T], b: &[T], c: &[T], d: &[T]) -> T {
    dot(a, c) * dot(b, d) - dot(b, c) * dot(a, d)
}

/// A 4-index tensor `R(e_i, e_j, e_k, e_l)` with the pinching constant of the
/// model it came from.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureTensor<T> {
    n: usize,
    values: Vec<T>,
    delta: T,
}

impl<T: Scalar> CurvatureTensor<T> {
    pub fn from_fn(n: usize, delta: T, f: impl Fn(usize, usize, usize, usize) -> T) -> Self {
        let mut values = Vec::with_capacity(n.pow(4));
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        values.push(f(i, j, k, l));
                    }
                }
            }
        }
        Self { n, values, delta }
    }

    /// `G` itself: constant curvature −1, so `delta = 1`.
    pub fn constant_curvature(n: usize) -> Self {
        let kd = |i: usize, j: usize| if i == j { T::one() } else { T::zero() };
        Self::from_fn(n, T::one(), |i, j, k, l| kd(i, k) * kd(j, l) - kd(j, k) * kd(i, l))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn delta(&self) -> &T {
        &self.delta
    }

    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> &T {
        let n = self.n;
        &self.values[((i * n + j) * n + k) * n + l]
    }

    pub fn eval(&self, a: &[T], b: &[T], c: &[T], d: &[T]) -> T {
        let n = self.n;
        let mut total = T::zero();
        for i in 0..n {
            if a[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if b[j].is_zero() {
                    continue;
                }
                let mut inner = T::zero();
                for k in 0..n {
                    if c[k].is_zero() {
                        continue;
                    }
                    for l in 0..n {
                        let r = self.get(i, j, k, l);
                        if !r.is_zero() && !d[l].is_zero() {
                            inner = inner + r.clone() * c[k].clone() * d[l].clone();
                        }
                    }
                }
                total = total + a[i].clone() * b[j].clone() * inner;
            }
        }
        total
    }

    /// Sectional curvature `R(a,b,b,a) / (|a|²|b|² − ⟨a,b⟩²)`.
    pub fn sectional(&self, a: &[T], b: &[T]) -> Result<T> {
        let area = dot(a, a) * dot(b, b) - dot(a, b) * dot(a, b);
        if area.is_negligible(1.0) {
            return Err(Error::Degenerate("sectional curvature of a degenerate plane".into()));
        }
        Ok(self.eval(a, b, b, a) / area)
    }

    fn max_magnitude(&self) -> f64 {
        self.values.iter().map(Scalar::magnitude).fold(0.0, f64::max)
    }

    /// Antisymmetry in each pair and pair symmetry.
    pub fn has_symmetries(&self) -> bool {
        let n = self.n;
        let scale = self.max_magnitude();
        let close = |x: &T, y: &T| {
            if T::EXACT { x == y } else { (x.to_f64() - y.to_f64()).abs() <= 1e-12 * scale.max(1.0) }
        };
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let r = self.get(i, j, k, l);
                        if !close(r, &-self.get(j, i, k, l).clone())
                            || !close(r, &-self.get(i, j, l, k).clone())
                            || !close(r, self.get(k, l, i, j))
                        {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    pub fn satisfies_bianchi(&self) -> bool {
        let n = self.n;
        let scale = self.max_magnitude();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let s = self.get(i, j, k, l).clone()
                            + self.get(j, k, i, l).clone()
                            + self.get(k, i, j, l).clone();
                        let ok = if T::EXACT { s.is_zero() } else { s.magnitude() <= 1e-12 * scale.max(1.0) };
                        if !ok {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// `R₀ = R − (1+δ)/2 · G`. The result keeps the source's `delta`.
    pub fn r0_split(&self) -> Self {
        let g = Self::constant_curvature(self.n);
        let half = (T::one() + self.delta.clone()) / T::from_i64(2);
        let values = self
            .values
            .iter()
            .zip(&g.values)
            .map(|(r, gv)| r.clone() - half.clone() * gv.clone())
            .collect();
        Self { n: self.n, values, delta: self.delta.clone() }
    }

    pub fn to_f64(&self) -> CurvatureTensor<f64> {
        CurvatureTensor {
            n: self.n,
            values: self.values.iter().map(Scalar::to_f64).collect(),
            delta: self.delta.to_f64(),
        }
    }
}

/// Block complex structure on `R^{2m}`: `J e_{2i} = e_{2i+1}`, `J e_{2i+1} = −e_{2i}`.
pub fn complex_structure<T: Scalar>(v: &[T]) -> Vec<T> {
    let mut out = vec![T::zero(); v.len()];
    for i in (0..v.len()).step_by(2) {
        out[i + 1] = v[i].clone();
        out[i] = -v[i + 1].clone();
    }
    out
}

/// Complex hyperbolic curvature on `R^{2m}`, sectional curvature in `[−1, −1/4]`:
///
/// `R(a,b,c,d) = ¼[G(a,b,c,d) + ⟨Ja,c⟩⟨Jb,d⟩ − ⟨Jb,c⟩⟨Ja,d⟩ + 2⟨Ja,b⟩⟨Jc,d⟩]`.
pub fn ch_model<T: Scalar>(m: usize) -> Result<CurvatureTensor<T>> {
    if m < 2 {
        return Err(Error::Domain(format!("complex hyperbolic model needs m >= 2, got {m}")));
    }
    let n = 2 * m;
    let e = |i: usize| {
        let mut v = vec![T::zero(); n];
        v[i] = T::one();
        v
    };
    let basis: Vec<Vec<T>> = (0..n).map(e).collect();
    let jb: Vec<Vec<T>> = basis.iter().map(|v| complex_structure(v)).collect();
    let quarter = T::from_ratio(1, 4);
    Ok(CurvatureTensor::from_fn(n, quarter.clone(), |i, j, k, l| {
        let (a, b, c, d) = (&basis[i], &basis[j], &basis[k], &basis[l]);
        let terms = g_value(a, b, c, d) + dot(&jb[i], c) * dot(&jb[j], d)
            - dot(&jb[j], c) * dot(&jb[i], d)
            + T::from_i64(2) * dot(&jb[i], b) * dot(&jb[k], d);
        quarter.clone() * terms
    }))
}

/// Outcome of a search for `sup |R₀(a,b,c,d)|`.
#[derive(Clone, Debug, serde::Serialize)]
pub struct R0SearchReport {
    pub max_abs: f64,
    /// Largest value seen among the random draws alone, before local ascent.
    pub max_sampled: f64,
    pub frame: Vec<Vec<f64>>,
    pub samples: usize,
    /// The bound `2(1−δ)/3`.
    pub bound: f64,
    /// Number of evaluated tuples (samples and ascent steps) above the bound.
    pub violations: usize,
}

/// Random search over orthonormal 4-frames followed by a local ascent from the
/// best draw. Every evaluated tuple is checked against `2(1−δ)/3`.
pub fn r0_frame_search(r: &CurvatureTensor<f64>, frames: usize, seed: u64) -> Result<R0SearchReport> {
    let n = r.n();
    if n < 4 {
        return Err(Error::Domain("frame search needs n >= 4".into()));
    }
    let r0 = r.r0_split();
    let bound = 2.0 * (1.0 - r.delta()) / 3.0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let value = |f: &[Vec<f64>]| r0.eval(&f[0], &f[1], &f[2], &f[3]).abs();
    let mut violations = 0;
    let mut best = (f64::NEG_INFINITY, Vec::new());
    for _ in 0..frames {
        let f = random_frame(&mut rng, n, 4)?;
        let v = value(&f);
        if v > bound + 1e-12 {
            violations += 1;
        }
        if v > best.0 {
            best = (v, f);
        }
    }
    let max_sampled = best.0;
    let mut step = 0.1;
    let mut failures = 0;
    while step > 1e-9 {
        let cand: Vec<Vec<f64>> = best
            .1
            .iter()
            .map(|v| v.iter().map(|x| x + step * { let g: f64 = StandardNormal.sample(&mut rng); g }).collect())
            .collect();
        let Some(cand) = orthonormalize(cand) else { continue };
        let v = value(&cand);
        if v > bound + 1e-12 {
            violations += 1;
        }
        if v > best.0 {
            best = (v, cand);
            failures = 0;
        } else {
            failures += 1;
            if failures >= 40 {
                step *= 0.5;
                failures = 0;
            }
        }
    }
    Ok(R0SearchReport { max_abs: best.0, max_sampled, frame: best.1, samples: frames, bound, violations })
}

/// Largest `|R₀(a,b,c,d)|` over random unit (not necessarily orthogonal) tuples.
pub fn r0_unit_tuple_max(r: &CurvatureTensor<f64>, tuples: usize, seed: u64) -> f64 {
    let r0 = r.r0_split();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = r.n();
    (0..tuples)
        .map(|_| {
            let v: Vec<Vec<f64>> = (0..4).map(|_| random_unit(&mut rng, n)).collect();
            r0.eval(&v[0], &v[1], &v[2], &v[3]).abs()
        })
        .fold(0.0, f64::max)
}

/// Range of sectional curvatures over random planes.
pub fn sectional_range(r: &CurvatureTensor<f64>, planes: usize, seed: u64) -> Result<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for _ in 0..planes {
        let f = random_frame(&mut rng, r.n(), 2)?;
        let k = r.sectional(&f[0], &f[1])?;
        lo = lo.min(k);
        hi = hi.max(k);
    }
    Ok((lo, hi))
}

fn orthonormalize(vs: Vec<Vec<f64>>) -> Option<Vec<Vec<f64>>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(vs.len());
    for mut v in vs {
        for e in &out {
            let d = dot(&v, e);
            v.iter_mut().zip(e).for_each(|(a, b)| *a -= d * b);
        }
        let norm = dot(&v, &v).sqrt();
        if norm < 1e-8 {
            return None;
        }
        out.push(v.into_iter().map(|x| x / norm).collect());
    }
    Some(out)
}
