//! Fiberwise identities behind the twisted Pestov inequality.
//!
//! All integrals are sphere means (normalized by `vol(S^{n−1})`). Every
//! identity here is homogeneous, so the normalization cancels.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::harmonics::{
    contract_field, contract_tautological, degree_report, harmonic_decompose, mc_mean, norm_squared, pairing,
    poly_inner_product, scalar_vertical_gradient, vertical_gradient, Bundle, BundleIndex, FieldSpace, HarmonicField,
    HomogeneousPolynomial, PolyField,
};
use crate::linalg::{random_frame, Matrix};
use crate::scalar::{Rational, Scalar};

/// Both sides of an identity and whether they agree (exactly for rationals).
#[derive(Clone, Debug, PartialEq)]
pub struct GTermReport<T> {
    pub lhs: T,
    pub rhs: T,
    pub matched: bool,
}

impl<T: Scalar> GTermReport<T> {
    fn new(lhs: T, rhs: T) -> Self {
        let scale = lhs.magnitude().max(rhs.magnitude());
        let matched = lhs.approx_eq(&rhs, scale);
        Self { lhs, rhs, matched }
    }
}

/// Coefficients `(a, b)` of the closed form `a‖ι_v u‖² + b‖u‖²`.
fn closed_form_coefficients(n: usize, k: usize, bundle: Bundle) -> Result<(i64, i64)> {
    let c = n as i64 + 2 * k as i64 - 4;
    match bundle {
        Bundle::Form(p) if p >= 1 => Ok((c, p as i64)),
        Bundle::Sym2 => Ok((2 * c, 2)),
        other => Err(Error::Domain(format!("curvature term is not defined for bundle {other}"))),
    }
}

/// Both sides of the curvature-term identity, without checking the
/// degree-drop constraint. Generic fields fail to match; this is the
/// negative control.
pub fn g_term_evaluate<T: Scalar>(u: &HarmonicField<T>) -> Result<GTermReport<T>> {
    let (a, b) = closed_form_coefficients(u.n(), u.k(), u.bundle())?;
    let space = FieldSpace::<T>::get(u.n(), u.k(), u.bundle())?;
    let c = space.coordinates(u)?;
    let lhs = space.g_term(&c);
    let rhs = T::from_i64(a) * space.contraction_norm_squared(&c) + T::from_i64(b) * space.norm_squared(&c);
    Ok(GTermReport::new(lhs, rhs))
}

fn check_constraint<T: Scalar>(u: &HarmonicField<T>) -> Result<()> {
    let space = FieldSpace::<T>::get(u.n(), u.k(), u.bundle())?;
    if space.is_normal(&space.coordinates(u)?) {
        return Ok(());
    }
    let (iv, report) = contract_tautological(u)?;
    if let Some(d) = report.top.filter(|&d| d + 1 > u.k()) {
        return Err(Error::ConstraintViolated { what: "ι_v u".into(), degree: d });
    }
    let ivv = contract_field(&iv)?;
    let top = degree_report(&ivv).top.unwrap_or(0);
    Err(Error::ConstraintViolated { what: "ι_vι_v u".into(), degree: top })
}

/// `Σᵢ ∫⟨G^{Λᵖ}(v, eᵢ)u, ∇ⁱu⟩` against `(n+2k−4)‖ι_v u‖² + p‖u‖²`, for a
/// form-valued field whose contraction drops two degrees.
pub fn g_term_forms<T: Scalar>(u: &HarmonicField<T>) -> Result<GTermReport<T>> {
    if !matches!(u.bundle(), Bundle::Form(p) if p >= 1) {
        return Err(Error::Domain(format!("expected a p-form field with p >= 1, got {}", u.bundle())));
    }
    check_constraint(u)?;
    g_term_evaluate(u)
}

/// Sym² version: `2(n+2k−4)‖ι_v u‖² + 2‖u‖²`, with the trace metric.
pub fn g_term_sym2<T: Scalar>(u: &HarmonicField<T>) -> Result<GTermReport<T>> {
    if u.bundle() != Bundle::Sym2 {
        return Err(Error::Domain(format!("expected a Sym2 field, got {}", u.bundle())));
    }
    check_constraint(u)?;
    g_term_evaluate(u)
}

/// The same two sides computed from explicit polynomial integrands. Slow;
/// used to cross-check the coordinate model.
pub fn g_term_direct<T: Scalar>(u: &HarmonicField<T>) -> Result<GTermReport<T>> {
    let n = u.n();
    let (a, b) = closed_form_coefficients(n, u.k(), u.bundle())?;
    let grad = vertical_gradient(u);
    let indices = u.bundle().indices(n);
    let mut lhs = T::zero();
    for j in 0..n {
        for i in 0..n {
            if i == j {
                continue;
            }
            let mut g = Matrix::<T>::zeros(n, n);
            g[(i, j)] = T::one();
            g[(j, i)] = -T::one();
            let kappa = u.bundle().action_pairing(&g)?;
            for (al, ia) in indices.iter().enumerate() {
                let Some(ua) = u.components().get(ia) else { continue };
                let xu = ua.mul_var(j);
                for (be, ib) in indices.iter().enumerate() {
                    let kv = &kappa[(al, be)];
                    if kv.is_negligible(1.0) {
                        continue;
                    }
                    if let Some(gb) = grad.components.get(ib) {
                        lhs = lhs + kv.clone() * pairing(&xu, &gb[i]);
                    }
                }
            }
        }
    }
    let iv = contract_field(&u.as_poly_field())?;
    let rhs = T::from_i64(a) * poly_inner_product(&iv, &iv)? + T::from_i64(b) * norm_squared(u);
    Ok(GTermReport::new(lhs, rhs))
}

/// `∫ Σ_{α,i} (∂ᵢu_α − k vᵢ u_α)²` against `k(n+k−2)‖u‖²`, integrating the
/// un-homogenized mixed-degree gradient.
pub fn gradient_norm_report<T: Scalar>(u: &HarmonicField<T>) -> GTermReport<T> {
    let k = u.k();
    let kk = T::from_i64(k as i64);
    let mut lhs = T::zero();
    for (idx, p) in u.components() {
        let w = T::from_i64(u.bundle().weight(idx));
        for i in 0..u.n() {
            let xp = p.mul_var(i);
            let mut s = kk.clone() * kk.clone() * pairing(&xp, &xp);
            if k > 0 {
                let d = p.partial(i);
                s = s + pairing(&d, &d) - T::from_i64(2) * kk.clone() * pairing(&d, &xp);
            }
            lhs = lhs + w.clone() * s;
        }
    }
    let rhs = T::from_i64((k * (u.n() + k - 2)) as i64) * norm_squared(u);
    GTermReport::new(lhs, rhs)
}

pub fn gradient_norm_identity<T: Scalar>(u: &HarmonicField<T>) -> bool {
    gradient_norm_report(u).matched
}

/// Monte-Carlo side of the Cauchy–Schwarz step and its closed-form bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChainReport {
    pub lhs: f64,
    pub stderr: f64,
    pub bound: f64,
    pub norm_squared: f64,
}

impl ChainReport {
    /// `lhs ≤ bound·(1 + 3·relative stderr)`.
    pub fn holds(&self) -> bool {
        let rel = if self.lhs > 0.0 { self.stderr / self.lhs } else { 0.0 };
        self.lhs <= self.bound * (1.0 + 3.0 * rel) + 1e-12 * self.bound.max(1.0)
    }

    pub fn ratio(&self) -> f64 {
        if self.bound > 0.0 {
            self.lhs / self.bound
        } else {
            0.0
        }
    }
}

/// `Σᵢ ∫ |eᵢ − vᵢv|·|u|·|Σ_α ∇ⁱu_α e_α|` by Monte Carlo, against
/// `√((n−1)k(n+k−2))‖u‖²`. Fails when the relative standard error exceeds
/// `rel_tol`.
pub fn cauchy_schwarz_chain<T: Scalar>(
    u: &HarmonicField<T>,
    samples: usize,
    seed: u64,
    rel_tol: f64,
) -> Result<ChainReport> {
    if !matches!(u.bundle(), Bundle::Form(_)) {
        return Err(Error::Domain(format!("expected a form-valued field, got {}", u.bundle())));
    }
    let n = u.n();
    let k = u.k();
    let norm2 = norm_squared(u).to_f64();
    let bound = (((n - 1) * k * (n + k - 2)) as f64).sqrt() * norm2;
    if u.is_zero() {
        return Ok(ChainReport { lhs: 0.0, stderr: 0.0, bound, norm_squared: norm2 });
    }
    let comps: Vec<(HomogeneousPolynomial<f64>, Vec<HomogeneousPolynomial<f64>>)> = u
        .components()
        .values()
        .map(|p| {
            let pf = p.map(Scalar::to_f64);
            let g = scalar_vertical_gradient(&pf, k);
            (pf, g)
        })
        .collect();
    let est = mc_mean(n, samples, seed, |x| {
        let un = comps.iter().map(|(p, _)| p.eval_f64(x).powi(2)).sum::<f64>().sqrt();
        if un == 0.0 {
            return 0.0;
        }
        (0..n)
            .map(|i| {
                let gi = comps.iter().map(|(_, g)| g[i].eval_f64(x).powi(2)).sum::<f64>().sqrt();
                (1.0 - x[i] * x[i]).max(0.0).sqrt() * gi
            })
            .sum::<f64>()
            * un
    });
    if est.stderr > rel_tol * est.mean.abs() {
        return Err(Error::MonteCarlo { stderr: est.stderr, tolerance: rel_tol * est.mean.abs(), samples });
    }
    Ok(ChainReport { lhs: est.mean, stderr: est.stderr, bound, norm_squared: norm2 })
}

/// A tensor in `Symᵏ ⊗ Sym²`, stored as the symmetric matrix `P(v)` of
/// degree-`k` polynomials with `K(v,…,v; a, b) = P(v)_{ab}`. Entries are
/// listed for `a ≤ b`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectorTensor<T> {
    pub n: usize,
    pub k: usize,
    pub entries: Vec<HomogeneousPolynomial<T>>,
}

impl<T: Scalar> ProjectorTensor<T> {
    pub fn zero(n: usize, k: usize) -> Self {
        Self { n, k, entries: vec![HomogeneousPolynomial::zero(n, k); n * (n + 1) / 2] }
    }

    fn entry(&self, a: usize, b: usize) -> &HomogeneousPolynomial<T> {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        &self.entries[pair_index(self.n, a, b)]
    }
}

fn pair_index(n: usize, a: usize, b: usize) -> usize {
    a * n - a * (a + 1) / 2 + b
}

/// Basis of the tensors with `K(v,…,v,v,·) = 0` identically in `v`.
pub fn projector_constraint_basis(n: usize, k: usize) -> Vec<ProjectorTensor<Rational>> {
    use std::collections::HashMap;
    let monos = crate::harmonics::monomials(n, k);
    let up: HashMap<_, usize> =
        crate::harmonics::monomials(n, k + 1).into_iter().enumerate().map(|(i, e)| (e, i)).collect();
    let pairs = n * (n + 1) / 2;
    let rows = n * up.len();
    let mut m = Matrix::<Rational>::zeros(rows, pairs * monos.len());
    for a in 0..n {
        for b in a..n {
            let q = pair_index(n, a, b);
            for (mi, e) in monos.iter().enumerate() {
                let col = q * monos.len() + mi;
                // Row a gets P_ab v_b; row b gets P_ba v_a.
                let mut push = |row_vec: usize, var: usize| {
                    let mut f = e.clone();
                    f[var] += 1;
                    m[(row_vec * up.len() + up[&f], col)] += Rational::from_i64(1);
                };
                push(a, b);
                if a != b {
                    push(b, a);
                }
            }
        }
    }
    m.nullspace()
        .into_iter()
        .map(|v| {
            let entries = (0..pairs)
                .map(|q| {
                    let mut p = HomogeneousPolynomial::zero(n, k);
                    for (mi, e) in monos.iter().enumerate() {
                        let c = &v[q * monos.len() + mi];
                        if !c.is_negligible(1.0) {
                            p.add_term(e.clone(), c.clone());
                        }
                    }
                    p
                })
                .collect();
            ProjectorTensor { n, k, entries }
        })
        .collect()
}

/// Checks `K(v,…,v,w,w) = k(k−1)/2 · K(w,w,v,…,v)` at `trials` random unit
/// pairs `w ⊥ v`.
pub fn projector_relation_holds(t: &ProjectorTensor<f64>, trials: usize, seed: u64) -> Result<bool> {
    let n = t.n;
    let k = t.k;
    if k < 2 {
        return Err(Error::Domain(format!("relation needs k >= 2, got {k}")));
    }
    let hess: Vec<Vec<Vec<HomogeneousPolynomial<f64>>>> = t
        .entries
        .iter()
        .map(|p| (0..n).map(|c| (0..n).map(|d| p.partial(c).partial(d)).collect()).collect())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let factor = (k * (k - 1)) as f64 / 2.0;
    let norm_k = ((k * (k - 1)) as f64).recip();
    let mut ok = true;
    for _ in 0..trials {
        let frame = random_frame(&mut rng, n, 2)?;
        let (v, w) = (&frame[0], &frame[1]);
        let mut lhs = 0.0;
        let mut rhs = 0.0;
        let mut scale: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                let pab = t.entry(a, b);
                let l = w[a] * w[b] * pab.eval_f64(v);
                lhs += l;
                scale = scale.max(l.abs());
                let h = &hess[pair_index(n, a.min(b), a.max(b))];
                for c in 0..n {
                    for d in 0..n {
                        let r = v[a] * v[b] * w[c] * w[d] * h[c][d].eval_f64(v);
                        rhs += r;
                        scale = scale.max(r.abs());
                    }
                }
            }
        }
        rhs *= factor * norm_k;
        ok &= (lhs - rhs).abs() <= 1e-9 * scale.max(1e-300) * (n * n) as f64;
    }
    Ok(ok)
}

/// Draws a Gaussian element of the constrained tensors and checks the
/// relation at 100 random pairs.
pub fn projector_relation_check(n: usize, k: usize, seed: u64) -> Result<bool> {
    if k < 2 || k % 2 == 1 {
        return Err(Error::Domain(format!("relation check needs even k >= 2, got {k}")));
    }
    let basis = projector_constraint_basis(n, k);
    if basis.is_empty() {
        return Err(Error::ZeroSubspace { n, k, bundle: "sym^k ⊗ sym2".into() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = ProjectorTensor::<f64>::zero(n, k);
    for b in &basis {
        let g: f64 = rand_distr::Distribution::sample(&rand_distr::StandardNormal, &mut rng);
        for (dst, src) in t.entries.iter_mut().zip(&b.entries) {
            dst.add_scaled(&src.map(Scalar::to_f64), &g);
        }
    }
    projector_relation_holds(&t, 100, seed.wrapping_add(1))
}

/// The rank-one projector field `f(v) = (Jv)(Jv)ᵀ` on `R^{2m}`, with `J` the
/// block complex structure, as degree-2 components.
pub fn rank1_projector(m: usize) -> Result<PolyField<Rational>> {
    if m < 2 {
        return Err(Error::Domain(format!("rank-one fixture needs m >= 2, got {m}")));
    }
    let n = 2 * m;
    let jv: Vec<HomogeneousPolynomial<Rational>> = (0..n)
        .map(|a| {
            if a % 2 == 1 {
                HomogeneousPolynomial::variable(n, a - 1)
            } else {
                HomogeneousPolynomial::variable(n, a + 1).scale(&Rational::from_i64(-1))
            }
        })
        .collect();
    let mut components = std::collections::BTreeMap::new();
    for a in 0..n {
        for b in a..n {
            components.insert(BundleIndex::Sym(a, b), jv[a].mul(&jv[b]));
        }
    }
    Ok(PolyField { n, degree: 2, bundle: Bundle::Sym2, components })
}

/// Degree-2 harmonic part `f₂` of [`rank1_projector`] and the ratio
/// `‖ι_v f₂‖² / ‖f₂‖²`.
pub fn rank1_fixture(m: usize) -> Result<(HarmonicField<Rational>, Rational)> {
    let f = rank1_projector(m)?;
    let parts = f.components.iter().map(|(idx, p)| (*idx, harmonic_decompose(p).swap_remove(0)));
    let f2 = HarmonicField::new(f.n, 2, Bundle::Sym2, parts)?;
    let iv = contract_field(&f2.as_poly_field())?;
    let ratio = poly_inner_product(&iv, &iv)? / norm_squared(&f2);
    Ok((f2, ratio))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonics::{normal_subspace_sample, random_field};
    use crate::scalar::rat;

    fn x(n: usize, i: usize) -> HomogeneousPolynomial<Rational> {
        HomogeneousPolynomial::variable(n, i)
    }

    fn cross_field() -> HarmonicField<Rational> {
        HarmonicField::new(
            3,
            1,
            Bundle::Form(1),
            [(BundleIndex::Form(0b001), x(3, 1)), (BundleIndex::Form(0b010), x(3, 0).scale(&rat(-1, 1)))],
        )
        .unwrap()
    }

    #[test]
    fn cross_product_g_term() {
        let u = cross_field();
        let r = g_term_forms(&u).unwrap();
        assert!(r.matched);
        assert_eq!(r.lhs, norm_squared(&u));
        assert_eq!(g_term_direct(&u).unwrap(), r);
    }

    #[test]
    fn zero_field() {
        let u = HarmonicField::<Rational>::zero(4, 2, Bundle::Sym2);
        let r = g_term_sym2(&u).unwrap();
        assert_eq!((r.lhs, r.rhs, r.matched), (rat(0, 1), rat(0, 1), true));
    }

    #[test]
    fn coordinate_and_direct_routes_agree() {
        for bundle in [Bundle::Form(1), Bundle::Form(2), Bundle::Sym2] {
            let u = random_field::<Rational>(4, 2, bundle, 3).unwrap();
            assert_eq!(g_term_evaluate(&u).unwrap(), g_term_direct(&u).unwrap(), "{bundle}");
        }
    }

    #[test]
    fn constrained_samples_match() {
        for bundle in [Bundle::Form(1), Bundle::Form(2), Bundle::Sym2] {
            let u = normal_subspace_sample::<Rational>(4, 2, bundle, 11).unwrap();
            assert!(g_term_evaluate(&u).unwrap().matched, "{bundle}");
        }
    }

    #[test]
    fn unconstrained_sample_is_rejected() {
        let u = random_field::<Rational>(4, 2, Bundle::Form(1), 1).unwrap();
        assert!(matches!(g_term_forms(&u), Err(Error::ConstraintViolated { degree: 3, .. })));
        assert!(!g_term_evaluate(&u).unwrap().matched);
    }

    #[test]
    fn gradient_identity() {
        let u = HarmonicField::new(4, 2, Bundle::Scalar, [(BundleIndex::Scalar, x(4, 0).mul(&x(4, 1)))]).unwrap();
        let r = gradient_norm_report(&u);
        assert_eq!(r.lhs / norm_squared(&u), rat(8, 1));
        assert!(r.matched);
    }

    #[test]
    fn chain_is_sharp_for_complex_structure() {
        // u(v) = Jv has constant |u| and the Cauchy–Schwarz step is an equality.
        let u = HarmonicField::new(
            4,
            1,
            Bundle::Form(1),
            [
                (BundleIndex::Form(0b0001), x(4, 1).scale(&rat(-1, 1))),
                (BundleIndex::Form(0b0010), x(4, 0)),
                (BundleIndex::Form(0b0100), x(4, 3).scale(&rat(-1, 1))),
                (BundleIndex::Form(0b1000), x(4, 2)),
            ],
        )
        .unwrap();
        let r = cauchy_schwarz_chain(&u, 20_000, 1, 0.01).unwrap();
        assert!(r.ratio() >= 0.999 && r.holds(), "{r:?}");
    }

    #[test]
    fn projector_relation_small() {
        assert!(projector_relation_check(3, 2, 4).unwrap());
        assert!(projector_relation_holds(&ProjectorTensor::zero(3, 2), 10, 0).unwrap());
    }

    #[test]
    fn rank1_ratio() {
        let (f2, ratio) = rank1_fixture(2).unwrap();
        assert_eq!(ratio, rat(1, 12));
        assert!(g_term_sym2(&f2).unwrap().matched);
    }
}
