//! Random-search estimate of the Cauchy–Schwarz constant.
//!
//! For a vector-valued field `u = Σᵢ uᵢ eᵢ` with `uᵢ ∈ Ω_k`,
//!
//! `F(u) = Σᵢ ∫ |u − uᵢeᵢ| · |∇_V uᵢ| · ωᵢ dσ`,
//!
//! and `C(n) = sup F(u)/‖u‖²`. The search maximizes `F` over unit coefficient
//! vectors in an orthonormal harmonic basis. Each ascent step draws its own
//! batch of sphere points; restarts are ranked on a shared validation sample
//! and the winner is re-evaluated on fresh samples.

use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harmonics::{
    harmonic_basis, monomials, sphere_points, Bundle, BundleIndex, Exponents, FieldSpace,
    HarmonicField, HomogeneousPolynomial,
};
use crate::scalar::Scalar;
use crate::thresholds::{delta1_with, delta2_with};

/// Constant weight `ωᵢ`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Weights {
    #[default]
    One,
    Half,
}

impl Weights {
    pub fn value(self) -> f64 {
        match self {
            Weights::One => 1.0,
            Weights::Half => 0.5,
        }
    }
}

impl std::str::FromStr for Weights {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "one" => Ok(Weights::One),
            "half" => Ok(Weights::Half),
            other => Err(Error::Domain(format!("unknown weights '{other}' (expected one|half)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub n: usize,
    pub k: usize,
    pub restarts: usize,
    pub iterations: usize,
    /// Fresh samples for the final evaluation.
    pub mc_samples: usize,
    /// Fresh sphere points drawn at every ascent step.
    pub training_samples: usize,
    /// Points of the common sample that ranks restarts.
    pub validation_samples: usize,
    /// Extra steps spent refining the best restart.
    pub polish_iterations: usize,
    /// Points per refinement step.
    pub polish_samples: usize,
    pub seed: u64,
    pub weights: Weights,
    /// Restrict to fields whose contraction `⟨u, v⟩` drops two degrees.
    pub constrained: bool,
    /// Smoothing of `|x|` as `√(x² + ε²)` during ascent.
    pub epsilon: f64,
}

impl SearchConfig {
    /// Defaults: 500/50/5 restarts for `n = 4/6/8`, with longer ascents and
    /// larger batches as the coefficient space grows.
    pub fn for_dimension(n: usize) -> Self {
        let (restarts, iterations, training_samples, polish_iterations) = match n {
            0..=4 => (500, 60, 2048, 1500),
            5..=6 => (50, 150, 4096, 2000),
            _ => (5, 300, 8192, 3000),
        };
        Self {
            n,
            k: 3,
            restarts,
            iterations,
            mc_samples: 200_000,
            training_samples,
            validation_samples: 16_384,
            polish_iterations,
            polish_samples: 8192,
            seed: 1,
            weights: Weights::One,
            constrained: false,
            epsilon: 1e-8,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 || self.n > 16 {
            return Err(Error::Domain(format!("n must lie in [2, 16], got {}", self.n)));
        }
        if self.k < 1 {
            return Err(Error::Domain("k must be >= 1".into()));
        }
        if self.restarts == 0
            || self.iterations == 0
            || self.mc_samples < 2
            || self.training_samples < 2
            || self.validation_samples < 2
            || self.polish_samples < 2
        {
            return Err(Error::Domain("restarts and iterations must be >= 1, sample counts >= 2".into()));
        }
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return Err(Error::Domain(format!("epsilon must be > 0, got {}", self.epsilon)));
        }
        Ok(())
    }
}

/// Outcome of one restart.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RestartTrace {
    pub restart: usize,
    pub seed: u64,
    /// Objective on the common validation sample after the ascent.
    pub value: f64,
    /// Maximum of `value` over restarts `0..=restart`.
    pub best_so_far: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchResult {
    pub n: usize,
    pub k: usize,
    /// `F(u)/‖u‖²` of the best field on fresh samples.
    pub c_estimate: f64,
    pub stderr: f64,
    /// Coefficients of the best field, ordered by component `i` then basis
    /// index `a`, on the orthonormalized harmonic basis.
    pub best_coefficients: Vec<f64>,
    pub best_restart: usize,
    /// Value of the best field on the validation sample used for ranking.
    pub validation_value: f64,
    /// `c_estimate / √((n−1)k(n+k−2))`.
    pub quotient: f64,
    /// Recomputed vector-field threshold (only for `k = 3`).
    pub delta_new: Option<f64>,
    pub trace: Vec<RestartTrace>,
    pub seed: u64,
}

/// `√((n−1)k(n+k−2))`; equals `√(3(n²−1))` for `k = 3`.
pub fn cauchy_schwarz_constant(n: usize, k: usize) -> f64 {
    (((n - 1) * k * (n + k - 2)) as f64).sqrt()
}

/// Values of all degree-`d` monomials at each point (rows).
fn monomial_table(points: ArrayView2<f64>, monos: &[Exponents], d: usize) -> Array2<f64> {
    let (rows, n) = points.dim();
    let mut out = Array2::zeros((rows, monos.len()));
    let mut pow = vec![0.0; n * (d + 1)];
    for (s, mut row) in out.axis_iter_mut(Axis(0)).enumerate() {
        for j in 0..n {
            let x = points[(s, j)];
            let mut v = 1.0;
            for e in 0..=d {
                pow[j * (d + 1) + e] = v;
                v *= x;
            }
        }
        for (m, e) in monos.iter().enumerate() {
            row[m] = e.iter().enumerate().map(|(j, &ej)| pow[j * (d + 1) + ej as usize]).product();
        }
    }
    out
}

/// Orthonormal basis of `Ω_k` as coefficient matrices: values over degree-`k`
/// monomials and first partials over degree-`(k−1)` monomials.
struct Basis {
    n: usize,
    k: usize,
    dim: usize,
    monos: Vec<Exponents>,
    monos_down: Vec<Exponents>,
    /// `monomials(k) × dim`.
    values: Array2<f64>,
    /// For each direction `j`: `monomials(k−1) × dim`.
    partials: Vec<Array2<f64>>,
}

impl Basis {
    fn new(n: usize, k: usize) -> Self {
        let basis = harmonic_basis(n, k);
        let monos = monomials(n, k);
        let monos_down = monomials(n, k - 1);
        let index = |list: &[Exponents]| -> std::collections::HashMap<Exponents, usize> {
            list.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect()
        };
        let (mi, di) = (index(&monos), index(&monos_down));
        let dim = basis.len();
        let mut values = Array2::zeros((monos.len(), dim));
        let mut partials = vec![Array2::zeros((monos_down.len(), dim)); n];
        for a in 0..dim {
            let scale = basis.norm(a).to_f64().sqrt().recip();
            let h: HomogeneousPolynomial<f64> = basis.element(a).map(|c| c.to_f64() * scale);
            for (e, c) in h.terms() {
                values[(mi[e], a)] = *c;
            }
            for (j, pj) in partials.iter_mut().enumerate() {
                for (e, c) in h.partial(j).terms() {
                    pj[(di[e], a)] = *c;
                }
            }
        }
        Self { n, k, dim, monos, monos_down, values, partials }
    }

    fn sample(&self, points: Array2<f64>) -> Sample {
        let mk = monomial_table(points.view(), &self.monos, self.k);
        let md = monomial_table(points.view(), &self.monos_down, self.k - 1);
        Sample { x: points, mk, md }
    }

    fn random_sample(&self, count: usize, seed: u64) -> Sample {
        let pts = Array2::from_shape_vec((count, self.n), sphere_points(self.n, count, seed)).expect("shape");
        self.sample(pts)
    }

    /// Per-point integrand of `F` for coefficients `c` (`n × dim`), with
    /// `|·|` smoothed by `eps` (exact when `eps = 0`).
    fn forward(&self, s: &Sample, c: &Array2<f64>, eps: f64) -> Forward {
        let ct = c.t();
        let u = s.mk.dot(&self.values.dot(&ct));
        let kf = self.k as f64;
        let g: Vec<Array2<f64>> = (0..self.n)
            .map(|j| {
                let mut p = s.md.dot(&self.partials[j].dot(&ct));
                for ((mut row, urow), &x) in p.axis_iter_mut(Axis(0)).zip(u.axis_iter(Axis(0))).zip(s.x.column(j)) {
                    row.scaled_add(-kf * x, &urow);
                }
                p
            })
            .collect();
        let (points, n) = u.dim();
        let e2 = eps * eps;
        let mut a = Array2::zeros((points, n));
        let mut b = Array2::zeros((points, n));
        let mut vals = Array1::zeros(points);
        for p in 0..points {
            let total: f64 = u.row(p).iter().map(|x| x * x).sum();
            let mut v = 0.0;
            for i in 0..n {
                let ai = ((total - u[(p, i)] * u[(p, i)]).max(0.0) + e2).sqrt();
                let bi = (g.iter().map(|gj| gj[(p, i)] * gj[(p, i)]).sum::<f64>() + e2).sqrt();
                a[(p, i)] = ai;
                b[(p, i)] = bi;
                v += ai * bi;
            }
            vals[p] = v;
        }
        Forward { u, g, a, b, vals }
    }

    fn value(&self, s: &Sample, c: &Array2<f64>, eps: f64) -> f64 {
        self.forward(s, c, eps).vals.mean().unwrap_or(0.0)
    }

    /// Mean of the smoothed integrand and its gradient in `c`.
    fn value_and_gradient(&self, s: &Sample, c: &Array2<f64>, eps: f64) -> (f64, Array2<f64>) {
        let f = self.forward(s, c, eps);
        let (points, n) = f.u.dim();
        let kf = self.k as f64;
        let mut du = Array2::zeros((points, n));
        let mut dg: Vec<Array2<f64>> = vec![Array2::zeros((points, n)); n];
        for p in 0..points {
            let ratio: f64 = (0..n).map(|i| f.b[(p, i)] / f.a[(p, i)]).sum();
            for i in 0..n {
                let w = f.a[(p, i)] / f.b[(p, i)];
                let mut d = f.u[(p, i)] * (ratio - f.b[(p, i)] / f.a[(p, i)]);
                for (j, dgj) in dg.iter_mut().enumerate() {
                    let t = w * f.g[j][(p, i)];
                    dgj[(p, i)] = t;
                    d -= kf * s.x[(p, j)] * t;
                }
                du[(p, i)] = d;
            }
        }
        let mut grad = du.t().dot(&s.mk).dot(&self.values);
        for (dgj, pj) in dg.iter().zip(&self.partials) {
            grad += &dgj.t().dot(&s.md).dot(pj);
        }
        let m = points as f64;
        grad /= m;
        (f.vals.sum() / m, grad)
    }
}

/// Sphere points with their monomial tables.
struct Sample {
    x: Array2<f64>,
    mk: Array2<f64>,
    md: Array2<f64>,
}

struct Forward {
    u: Array2<f64>,
    g: Vec<Array2<f64>>,
    a: Array2<f64>,
    b: Array2<f64>,
    vals: Array1<f64>,
}

fn mix(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Fresh Monte-Carlo mean of the exact integrand, in batches with their own
/// seeds. Returns `(mean, stderr)`.
fn fresh_mean(basis: &Basis, c: &Array2<f64>, samples: usize, seed: u64) -> (f64, f64) {
    const CHUNK: usize = 8192;
    let batches = samples.div_ceil(CHUNK);
    let sums: Vec<(f64, f64)> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let len = CHUNK.min(samples - b * CHUNK);
            let vals = basis.forward(&basis.random_sample(len, mix(seed, b as u64)), c, 0.0).vals;
            (vals.sum(), vals.mapv(|v| v * v).sum())
        })
        .collect();
    let (s, s2) = sums.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let m = samples as f64;
    let mean = s / m;
    let var = ((s2 - m * mean * mean) / (m - 1.0)).max(0.0);
    (mean, (var / m).sqrt())
}

/// Monte-Carlo estimate of `F(u)` and its standard error, with the exact
/// absolute value. Integrals are sphere means.
pub fn f_functional(u: &HarmonicField<f64>, weights: Weights, mc_samples: usize, seed: u64) -> Result<(f64, f64)> {
    if u.bundle() != Bundle::Form(1) {
        return Err(Error::Domain(format!("F(u) needs a vector-valued field, got {}", u.bundle())));
    }
    if mc_samples < 2 {
        return Err(Error::Degenerate("Monte-Carlo estimate needs at least two samples".into()));
    }
    let n = u.n();
    let k = u.k();
    if k == 0 {
        return Ok((0.0, 0.0));
    }
    let basis = Basis::new(n, k);
    let space = FieldSpace::<f64>::get(n, k, Bundle::Form(1))?;
    let c = to_orthonormal(&space, &space.coordinates(u)?);
    let (mean, stderr) = fresh_mean(&basis, &c, mc_samples, seed);
    let w = weights.value();
    Ok((w * mean, w * stderr))
}

/// `n × dim` orthonormal-basis coefficients from space coordinates.
fn to_orthonormal(space: &FieldSpace<f64>, coords: &[f64]) -> Array2<f64> {
    let basis = space.basis();
    let mut c = Array2::zeros((space.n(), basis.len()));
    for ((idx, a), x) in space.coordinate_labels().into_iter().zip(coords) {
        if let BundleIndex::Form(m) = idx {
            c[(m.trailing_zeros() as usize, a)] = x * basis.norm(a).to_f64().sqrt();
        }
    }
    c
}

/// Orthonormal basis (columns, flattened `n·dim`) of the constrained
/// subspace, in orthonormal-basis coefficients.
fn constrained_frame(n: usize, k: usize) -> Result<Array2<f64>> {
    let space = FieldSpace::<f64>::get(n, k, Bundle::Form(1))?;
    let mut cols: Vec<Array1<f64>> = Vec::new();
    for v in space.normal_basis() {
        let mut x = Array1::from_iter(to_orthonormal(&space, &v).iter().copied());
        for q in &cols {
            let d = q.dot(&x);
            x.scaled_add(-d, q);
        }
        for q in &cols {
            let d = q.dot(&x);
            x.scaled_add(-d, q);
        }
        let norm = x.dot(&x).sqrt();
        if norm > 1e-10 {
            cols.push(x / norm);
        }
    }
    if cols.is_empty() {
        return Err(Error::ZeroSubspace { n, k, bundle: Bundle::Form(1).to_string() });
    }
    let dim = cols[0].len();
    let mut frame = Array2::zeros((dim, cols.len()));
    for (j, q) in cols.iter().enumerate() {
        frame.column_mut(j).assign(q);
    }
    Ok(frame)
}

struct Ascent {
    z: Array1<f64>,
    iterations: usize,
    converged: bool,
}

/// Stochastic ascent on the unit sphere of `z`, with `c = frame·z` reshaped
/// to `n × dim`. Every iteration draws a fresh batch of sphere points, so the
/// ascent cannot overfit a fixed sample. A step is accepted only if it
/// improves the objective on its batch: first the power step, then a tangent
/// step whose length grows on success and halves on failure.
fn ascend(
    basis: &Basis,
    frame: Option<&Array2<f64>>,
    z0: Array1<f64>,
    (max_iterations, batch_size): (usize, usize),
    eps: f64,
    seed: u64,
) -> Ascent {
    let shape = (basis.n, basis.dim);
    let to_c = |z: &Array1<f64>| -> Array2<f64> {
        let flat = match frame {
            Some(f) => f.dot(z),
            None => z.clone(),
        };
        flat.into_shape_with_order(shape).expect("shape")
    };
    let mut z = &z0 / z0.dot(&z0).sqrt();
    let mut step = 0.2;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iterations {
        let batch = basis.random_sample(batch_size, mix(seed, iterations as u64));
        iterations += 1;
        let (value, g) = basis.value_and_gradient(&batch, &to_c(&z), eps);
        let g = Array1::from_iter(g.iter().copied());
        let g = match frame {
            Some(f) => f.t().dot(&g),
            None => g,
        };
        let tangent = &g - &(&z * g.dot(&z));
        let tnorm = tangent.dot(&tangent).sqrt();
        if tnorm < 1e-9 * value.abs().max(1.0) {
            converged = true;
            break;
        }
        // Power step: for a 2-homogeneous objective the maximizer on the
        // sphere is a fixed point of z ↦ ∇F/|∇F|.
        let cand = &g / g.dot(&g).sqrt();
        if basis.value(&batch, &to_c(&cand), eps) > value {
            z = cand;
            continue;
        }
        while step > 1e-6 {
            let mut cand = &z + &(&tangent * (step / tnorm));
            cand /= cand.dot(&cand).sqrt();
            if basis.value(&batch, &to_c(&cand), eps) > value {
                z = cand;
                step *= 1.5;
                break;
            }
            step *= 0.5;
        }
        if step <= 1e-6 {
            converged = true;
            break;
        }
    }
    Ascent { z, iterations, converged }
}

/// Multi-restart maximization of `F(u)/‖u‖²`.
///
/// Restart `r` starts from a Gaussian draw seeded with `seed ⊕ r` and runs
/// `iterations` steps. Restarts are ranked on a common validation sample
/// (ties go to the lowest index). The winner is refined for
/// `polish_iterations` more steps and then re-evaluated on `mc_samples`
/// fresh points.
pub fn sharpness_search(cfg: &SearchConfig) -> Result<SearchResult> {
    cfg.validate()?;
    let (n, k) = (cfg.n, cfg.k);
    let basis = Basis::new(n, k);
    let frame = if cfg.constrained { Some(constrained_frame(n, k)?) } else { None };
    let free_dim = frame.as_ref().map_or(n * basis.dim, |f| f.ncols());
    let validation = basis.random_sample(cfg.validation_samples, mix(cfg.seed, 0x7661_6C69));
    let to_c = |z: &Array1<f64>| -> Array2<f64> {
        let flat = match &frame {
            Some(f) => f.dot(z),
            None => z.clone(),
        };
        flat.into_shape_with_order((n, basis.dim)).expect("shape")
    };

    let runs: Vec<(Ascent, f64)> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| {
            let seed = cfg.seed ^ r as u64;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let z0 = Array1::from_iter((0..free_dim).map(|_| StandardNormal.sample(&mut rng)));
            let run = ascend(&basis, frame.as_ref(), z0, (cfg.iterations, cfg.training_samples), cfg.epsilon, seed);
            let value = basis.value(&validation, &to_c(&run.z), 0.0);
            (run, value)
        })
        .collect();

    let w = cfg.weights.value();
    let mut trace = Vec::with_capacity(runs.len());
    let mut best = 0usize;
    let mut best_so_far = f64::NEG_INFINITY;
    for (r, (run, value)) in runs.iter().enumerate() {
        if *value > runs[best].1 {
            best = r;
        }
        best_so_far = best_so_far.max(w * value);
        trace.push(RestartTrace {
            restart: r,
            seed: cfg.seed ^ r as u64,
            value: w * value,
            best_so_far,
            iterations: run.iterations,
            converged: run.converged,
        });
    }
    let mut z = runs[best].0.z.clone();
    let mut polished_value = runs[best].1;
    if cfg.polish_iterations > 0 {
        let run = ascend(
            &basis,
            frame.as_ref(),
            z.clone(),
            (cfg.polish_iterations, cfg.polish_samples),
            cfg.epsilon,
            mix(cfg.seed, 0x706F_6C69),
        );
        let value = basis.value(&validation, &to_c(&run.z), 0.0);
        // Keep the restart winner if refinement did not help on validation.
        if value > polished_value {
            z = run.z;
            polished_value = value;
        }
    }
    let c = to_c(&z);
    let (mean, stderr) = fresh_mean(&basis, &c, cfg.mc_samples, mix(cfg.seed, 0x6672_6573));
    let c_estimate = w * mean;
    let delta_new = if k == 3 { delta_from_constant(n, c_estimate).ok() } else { None };
    Ok(SearchResult {
        n,
        k,
        c_estimate,
        stderr: w * stderr,
        best_coefficients: c.iter().copied().collect(),
        best_restart: best,
        validation_value: w * polished_value,
        quotient: c_estimate / cauchy_schwarz_constant(n, k),
        delta_new,
        trace,
        seed: cfg.seed,
    })
}

/// `max(δ₁, δ₂)` at `(k, p) = (3, 1)` with `√(3(n²−1))` replaced by a
/// measured constant, i.e. `r_{n,1,3} ↦ (2/3)·C/(3(n+1))`.
pub fn delta_from_constant(n: usize, c_measured: f64) -> Result<f64> {
    if n < 3 {
        return Err(Error::Domain(format!("dimension n must be >= 3, got {n}")));
    }
    let cap = cauchy_schwarz_constant(n, 3);
    if !(c_measured > 0.0 && c_measured <= cap * (1.0 + 1e-12)) {
        return Err(Error::Domain(format!("measured constant must lie in (0, {cap}], got {c_measured}")));
    }
    let r = 2.0 / 3.0 * c_measured / (3.0 * (n as f64 + 1.0));
    Ok(delta1_with(n, 3, 1, r).max(delta2_with(n, 3, 1, 0.0, r)))
}

/// Field with the given orthonormal-basis coefficients (as returned in
/// [`SearchResult::best_coefficients`]).
pub fn field_from_coefficients(n: usize, k: usize, coefficients: &[f64]) -> Result<HarmonicField<f64>> {
    let basis = harmonic_basis(n, k);
    if coefficients.len() != n * basis.len() {
        return Err(Error::DimensionMismatch { expected: n * basis.len(), found: coefficients.len() });
    }
    let comps = (0..n).map(|i| {
        let mut p = HomogeneousPolynomial::<f64>::zero(n, k);
        for a in 0..basis.len() {
            let c = coefficients[i * basis.len() + a] / basis.norm(a).to_f64().sqrt();
            p.add_scaled(&basis.element(a).map(Scalar::to_f64), &c);
        }
        (BundleIndex::Form(1 << i), p)
    });
    Ok(HarmonicField::new_unchecked(n, k, Bundle::Form(1), comps.filter(|(_, p)| !p.is_empty()).collect()))
}
