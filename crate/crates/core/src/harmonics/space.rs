//! Coordinates on `Ω_k ⊗ E` with respect to the orthogonal harmonic basis.
//!
//! A coordinate is a pair (fiber index `α`, basis harmonic `h_a`). The
//! pairing `(α, a) ↦ grading(α) ⊕ parity(h_a)` is preserved by `ι_v` and by the
//! curvature term, so every quadratic form and every constraint used here is
//! block diagonal in it. Blocks are small, which keeps exact arithmetic cheap.
//!
//! All sphere integrals below are normalized by `vol(S^{n−1})`.

use std::any::Any;
use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, OnceLock, RwLock};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::basis::{harmonic_basis, HarmonicBasis};
use super::field::{Bundle, BundleIndex, HarmonicField};
use super::polynomial::{parity, Exponents, HomogeneousPolynomial};
use super::sphere::pairing;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use num_traits::Zero;

use crate::scalar::{Rational, Scalar};

type Key4 = (u32, u32, u8, u8);

/// Integrals of basis harmonics against low-degree monomials, for one `(n, k)`.
struct Pairings {
    /// `(a, b, i, j) ↦ ∫ xᵢ xⱼ h_a h_b`.
    x: HashMap<Key4, Rational>,
    /// `(a, b, j, i) ↦ ∫ xⱼ h_a ∇ⁱ h_b` with `∇ⁱ h = ∂ᵢh − k xᵢ h` on the sphere.
    grad: HashMap<Key4, Rational>,
    /// `(a, i, c) ↦ ∫ xᵢ h_a g_c` with `g_c` in the degree-`k+1` basis.
    up: HashMap<(u32, u8, u32), Rational>,
}

impl Pairings {
    fn build(n: usize, k: usize, basis: &HarmonicBasis, up_basis: &HarmonicBasis) -> Self {
        let len = basis.len();
        let xh: Vec<Vec<HomogeneousPolynomial<Rational>>> =
            (0..len).map(|a| (0..n).map(|i| basis.element(a).mul_var(i)).collect()).collect();
        let dh: Vec<Vec<HomogeneousPolynomial<Rational>>> =
            (0..len).map(|a| (0..n).map(|i| basis.element(a).partial(i)).collect()).collect();
        let kk = Rational::from_i64(k as i64);
        let mut x = HashMap::new();
        let mut grad = HashMap::new();
        let mut up = HashMap::new();
        for a in 0..len {
            let pa = basis.class(a);
            for j in 0..n {
                for i in 0..n {
                    let class = pa ^ (1 << i) ^ (1 << j);
                    for &b in basis.in_class(class) {
                        let xv = pairing(&xh[a][j], &xh[b][i]);
                        let dv = if k == 0 { Rational::from_i64(0) } else { pairing(&xh[a][j], &dh[b][i]) };
                        let key = (a as u32, b as u32, j as u8, i as u8);
                        grad.insert(key, dv - kk.clone() * xv.clone());
                        x.insert(key, xv);
                    }
                }
                for &c in up_basis.in_class(pa ^ (1 << j)) {
                    up.insert((a as u32, j as u8, c as u32), pairing(&xh[a][j], up_basis.element(c)));
                }
            }
        }
        Self { x, grad, up }
    }

    fn x(&self, a: usize, b: usize, i: usize, j: usize) -> Option<&Rational> {
        self.x.get(&(a as u32, b as u32, i as u8, j as u8))
    }
}

/// One diagonal block of the coordinate space.
#[derive(Clone, Debug)]
pub struct Block<T> {
    pub grading: u64,
    pub start: usize,
    pub len: usize,
    norm: Vec<T>,
    contraction: Matrix<T>,
    g_term: Matrix<T>,
    constraints: Matrix<T>,
    normal: Vec<Vec<T>>,
}

impl<T: Scalar> Block<T> {
    fn map<U: Scalar>(&self, f: impl Fn(&T) -> U + Copy) -> Block<U> {
        Block {
            grading: self.grading,
            start: self.start,
            len: self.len,
            norm: self.norm.iter().map(f).collect(),
            contraction: self.contraction.map(f),
            g_term: self.g_term.map(f),
            constraints: self.constraints.map(f),
            normal: self.normal.iter().map(|v| v.iter().map(f).collect()).collect(),
        }
    }

    pub fn normal_dim(&self) -> usize {
        self.normal.len()
    }
}

/// Coordinate model of `Ω_k ⊗ E`.
pub struct FieldSpace<T> {
    n: usize,
    k: usize,
    bundle: Bundle,
    indices: Vec<BundleIndex>,
    basis: Arc<HarmonicBasis>,
    elements: Vec<HomogeneousPolynomial<T>>,
    /// `c_a(u) = Σ_s u_s · duals[a][s]` projects onto `h_a`.
    duals: Vec<Vec<(Exponents, T)>>,
    coords: Vec<(usize, usize)>,
    blocks: Vec<Block<T>>,
}

impl<T: Scalar> std::fmt::Debug for FieldSpace<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FieldSpace")
            .field("n", &self.n)
            .field("k", &self.k)
            .field("bundle", &self.bundle)
            .field("dim", &self.coords.len())
            .field("blocks", &self.blocks.len())
            .finish()
    }
}

static SPACES: OnceLock<RwLock<HashMap<(usize, usize, Bundle), Arc<FieldSpace<Rational>>>>> = OnceLock::new();

fn exact_space(n: usize, k: usize, bundle: Bundle) -> Result<Arc<FieldSpace<Rational>>> {
    let cache = SPACES.get_or_init(Default::default);
    if let Some(s) = cache.read().expect("space cache poisoned").get(&(n, k, bundle)) {
        return Ok(Arc::clone(s));
    }
    let built = Arc::new(FieldSpace::build(n, k, bundle)?);
    let mut w = cache.write().expect("space cache poisoned");
    Ok(Arc::clone(w.entry((n, k, bundle)).or_insert(built)))
}

impl<T: Scalar> FieldSpace<T> {
    /// The (memoized) coordinate model. Built exactly, then converted when
    /// `T` is not [`Rational`].
    pub fn get(n: usize, k: usize, bundle: Bundle) -> Result<Arc<Self>> {
        let exact = exact_space(n, k, bundle)?;
        let any: Arc<dyn Any + Send + Sync> = exact.clone();
        Ok(match any.downcast::<Self>() {
            Ok(s) => s,
            Err(_) => Arc::new(exact.map(T::from_rational)),
        })
    }

    fn map<U: Scalar>(&self, f: impl Fn(&T) -> U + Copy) -> FieldSpace<U> {
        FieldSpace {
            n: self.n,
            k: self.k,
            bundle: self.bundle,
            indices: self.indices.clone(),
            basis: Arc::clone(&self.basis),
            elements: self.elements.iter().map(|p| p.map(f)).collect(),
            duals: self.duals.iter().map(|d| d.iter().map(|(e, c)| (e.clone(), f(c))).collect()).collect(),
            coords: self.coords.clone(),
            blocks: self.blocks.iter().map(|b| b.map(f)).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn bundle(&self) -> Bundle {
        self.bundle
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn blocks(&self) -> &[Block<T>] {
        &self.blocks
    }

    pub fn basis(&self) -> &HarmonicBasis {
        &self.basis
    }

    /// `(fiber index, basis harmonic index)` of each coordinate.
    pub fn coordinate_labels(&self) -> Vec<(BundleIndex, usize)> {
        self.coords.iter().map(|&(al, a)| (self.indices[al], a)).collect()
    }

    /// Dimension of the subspace where `ι_v` (and for Sym², `ι_vι_v`) drops
    /// two degrees.
    pub fn normal_dim(&self) -> usize {
        self.blocks.iter().map(Block::normal_dim).sum()
    }

    pub fn field(&self, c: &[T]) -> HarmonicField<T> {
        let mut comps: BTreeMap<BundleIndex, HomogeneousPolynomial<T>> = BTreeMap::new();
        for (&(al, a), x) in self.coords.iter().zip(c) {
            if x.is_zero() {
                continue;
            }
            comps
                .entry(self.indices[al])
                .or_insert_with(|| HomogeneousPolynomial::zero(self.n, self.k))
                .add_scaled(&self.elements[a], x);
        }
        comps.retain(|_, p| !p.is_empty());
        HarmonicField::new_unchecked(self.n, self.k, self.bundle, comps)
    }

    /// Orthogonal projection coefficients of `u` on the basis.
    pub fn coordinates(&self, u: &HarmonicField<T>) -> Result<Vec<T>> {
        if u.n() != self.n || u.k() != self.k || u.bundle() != self.bundle {
            return Err(Error::Domain(format!(
                "field (n={}, k={}, {}) does not belong to this space (n={}, k={}, {})",
                u.n(),
                u.k(),
                u.bundle(),
                self.n,
                self.k,
                self.bundle
            )));
        }
        Ok(self
            .coords
            .iter()
            .map(|&(al, a)| match u.components().get(&self.indices[al]) {
                None => T::zero(),
                Some(p) => self.duals[a]
                    .iter()
                    .filter_map(|(e, d)| p.coeff(e).map(|c| c.clone() * d.clone()))
                    .fold(T::zero(), |acc, x| acc + x),
            })
            .collect())
    }

    fn block_sum(&self, c: &[T], f: impl Fn(&Block<T>, &[T]) -> T) -> T {
        self.blocks.iter().fold(T::zero(), |acc, b| {
            let cb = &c[b.start..b.start + b.len];
            if cb.iter().all(|x| x.is_zero()) {
                acc
            } else {
                acc + f(b, cb)
            }
        })
    }

    /// `‖u‖²`.
    pub fn norm_squared(&self, c: &[T]) -> T {
        self.block_sum(c, |b, cb| {
            cb.iter().zip(&b.norm).fold(T::zero(), |acc, (x, w)| acc + x.clone() * x.clone() * w.clone())
        })
    }

    /// `‖ι_v u‖²`.
    pub fn contraction_norm_squared(&self, c: &[T]) -> T {
        self.block_sum(c, |b, cb| b.contraction.bilinear(cb, cb))
    }

    /// `Σᵢ ∫ ⟨G^E(v, eᵢ) u, ∇ⁱ u⟩`.
    pub fn g_term(&self, c: &[T]) -> T {
        self.block_sum(c, |b, cb| b.g_term.bilinear(cb, cb))
    }

    /// True when `c` satisfies the degree-drop constraints.
    pub fn is_normal(&self, c: &[T]) -> bool {
        self.blocks.iter().all(|b| {
            let cb = &c[b.start..b.start + b.len];
            let scale = cb.iter().map(Scalar::magnitude).fold(0.0, f64::max);
            b.constraints.apply(cb).iter().all(|r| r.is_negligible(scale))
        })
    }

    /// Basis of the constrained subspace as full coordinate vectors.
    pub fn normal_basis(&self) -> Vec<Vec<T>> {
        let mut out = Vec::new();
        for b in &self.blocks {
            for v in &b.normal {
                let mut full = vec![T::zero(); self.dim()];
                full[b.start..b.start + b.len].clone_from_slice(v);
                out.push(full);
            }
        }
        out
    }

    /// Gaussian combination of the constrained basis.
    pub fn sample_normal(&self, seed: u64) -> Result<Vec<T>> {
        if self.normal_dim() == 0 {
            return Err(Error::ZeroSubspace { n: self.n, k: self.k, bundle: self.bundle.to_string() });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut c = vec![T::zero(); self.dim()];
        for b in &self.blocks {
            for v in &b.normal {
                let g = T::from_sample(StandardNormal.sample(&mut rng));
                if g.is_zero() {
                    continue;
                }
                for (x, y) in c[b.start..b.start + b.len].iter_mut().zip(v) {
                    if !y.is_zero() {
                        *x = x.clone() + g.clone() * y.clone();
                    }
                }
            }
        }
        Ok(c)
    }

    /// Gaussian coordinates without constraints.
    pub fn sample_unconstrained(&self, seed: u64) -> Vec<T> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..self.dim()).map(|_| T::from_sample(StandardNormal.sample(&mut rng))).collect()
    }
}

impl FieldSpace<Rational> {
    fn build(n: usize, k: usize, bundle: Bundle) -> Result<Self> {
        if !(2..=64).contains(&n) {
            return Err(Error::Domain(format!("dimension n must lie in [2, 64], got {n}")));
        }
        if let Bundle::Form(p) = bundle {
            if p > n {
                return Err(Error::Domain(format!("form degree {p} exceeds dimension {n}")));
            }
        }
        let basis = harmonic_basis(n, k);
        let up_basis = harmonic_basis(n, k + 1);
        let pairings = Pairings::build(n, k, &basis, &up_basis);
        let indices = bundle.indices(n);
        let position: HashMap<BundleIndex, usize> = indices.iter().enumerate().map(|(i, x)| (*x, i)).collect();

        let duals = basis_duals(&basis);
        let elements = basis.elements().to_vec();

        // Coordinates grouped by block grading.
        let mut groups: BTreeMap<u64, Vec<(usize, usize)>> = BTreeMap::new();
        for (al, idx) in indices.iter().enumerate() {
            for a in 0..basis.len() {
                groups.entry(Bundle::grading(idx) ^ basis.class(a)).or_default().push((al, a));
            }
        }

        let contracted = bundle.contracted().ok();
        let contractions: Vec<Vec<(usize, BundleIndex, i64)>> = indices
            .iter()
            .map(|idx| {
                (0..n).flat_map(|i| bundle.contract_basis(i, idx).into_iter().map(move |(t, s)| (i, t, s))).collect()
            })
            .collect();
        let kappa = structure_constants(n, bundle, &indices)?;

        let mut coords = Vec::new();
        let mut blocks = Vec::new();
        for (grading, members) in groups {
            let start = coords.len();
            let len = members.len();
            let norm = members
                .iter()
                .map(|&(al, a)| Rational::from_i64(bundle.weight(&indices[al])) * basis.norm(a).clone())
                .collect();
            let mut g_term = Matrix::zeros(len, len);
            let mut contraction = Matrix::zeros(len, len);
            for (r, &(al, a)) in members.iter().enumerate() {
                for (s, &(be, b)) in members.iter().enumerate() {
                    if let Some(list) = kappa.get(&(al, be)) {
                        let mut acc = Rational::from_i64(0);
                        for (j, i, kv) in list {
                            if let Some(t) = pairings.grad.get(&(a as u32, b as u32, *j as u8, *i as u8)) {
                                acc += kv * t;
                            }
                        }
                        g_term[(r, s)] = acc;
                    }
                    if let Some(target) = contracted {
                        let mut acc = Rational::from_i64(0);
                        for (i, g1, s1) in &contractions[al] {
                            for (j, g2, s2) in &contractions[be] {
                                if g1 != g2 {
                                    continue;
                                }
                                if let Some(xv) = pairings.x(a, b, *i, *j) {
                                    acc += Rational::from_i64(target.weight(g1) * s1 * s2) * xv;
                                }
                            }
                        }
                        contraction[(r, s)] = acc;
                    }
                }
            }
            let constraints = if contracted.is_some() {
                constraint_rows(n, bundle, &basis, &up_basis, &pairings, &members, &contractions)
            } else {
                Matrix::zeros(0, len)
            };
            let normal = if contracted.is_some() { constraints.nullspace() } else { Vec::new() };
            coords.extend(members);
            blocks.push(Block { grading, start, len, norm, contraction, g_term, constraints, normal });
        }
        let _ = position;
        Ok(Self { n, k, bundle, indices, basis, elements, duals, coords, blocks })
    }
}

/// For each basis harmonic, the linear functional on monomial coefficients
/// that returns its projection coefficient.
fn basis_duals(basis: &HarmonicBasis) -> Vec<Vec<(Exponents, Rational)>> {
    let n = basis.n();
    let k = basis.k();
    let mut monos_by_class: BTreeMap<u64, Vec<Exponents>> = BTreeMap::new();
    for e in super::polynomial::monomials(n, k) {
        monos_by_class.entry(parity(&e)).or_default().push(e);
    }
    (0..basis.len())
        .map(|a| {
            let h = basis.element(a);
            monos_by_class
                .get(&basis.class(a))
                .map(|monos| {
                    monos
                        .iter()
                        .map(|e| {
                            let mut m = HomogeneousPolynomial::zero(n, k);
                            m.add_term(e.clone(), Rational::from_i64(1));
                            (e.clone(), pairing(&m, h) / basis.norm(a).clone())
                        })
                        .filter(|(_, d)| !d.is_zero())
                        .collect()
                })
                .unwrap_or_default()
        })
        .collect()
}

/// `κ^{ji}_{αβ} = ⟨G^E(eⱼ, eᵢ) e_α, e_β⟩`, keyed by `(α, β)`.
fn structure_constants(
    n: usize,
    bundle: Bundle,
    indices: &[BundleIndex],
) -> Result<HashMap<(usize, usize), Vec<(usize, usize, Rational)>>> {
    let mut out: HashMap<(usize, usize), Vec<(usize, usize, Rational)>> = HashMap::new();
    if bundle == Bundle::Scalar {
        return Ok(out);
    }
    for j in 0..n {
        for i in 0..n {
            if i == j {
                continue;
            }
            // G(a, b) = b aᵀ − a bᵀ with a = eⱼ, b = eᵢ.
            let mut g = Matrix::<Rational>::zeros(n, n);
            g[(i, j)] = Rational::from_i64(1);
            g[(j, i)] = Rational::from_i64(-1);
            let kappa = bundle.action_pairing(&g)?;
            for al in 0..indices.len() {
                for be in 0..indices.len() {
                    let v = &kappa[(al, be)];
                    if !v.is_zero() {
                        out.entry((al, be)).or_default().push((j, i, v.clone()));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Rows expressing "the degree-`(k+1)` part of `ι_v u` vanishes" and, for
/// Sym², "the degree-`k` part of `ι_vι_v u` vanishes", restricted to a block.
fn constraint_rows(
    n: usize,
    bundle: Bundle,
    basis: &HarmonicBasis,
    up_basis: &HarmonicBasis,
    pairings: &Pairings,
    members: &[(usize, usize)],
    contractions: &[Vec<(usize, BundleIndex, i64)>],
) -> Matrix<Rational> {
    let mut rows: BTreeMap<(u8, BundleIndex, usize), BTreeMap<usize, Rational>> = BTreeMap::new();
    let target = bundle.contracted().expect("contractible bundle");
    for (col, &(al, a)) in members.iter().enumerate() {
        for (i, gamma, s) in &contractions[al] {
            for &c in up_basis.in_class(basis.class(a) ^ (1 << i)) {
                if let Some(z) = pairings.up.get(&(a as u32, *i as u8, c as u32)) {
                    let e = rows.entry((0, *gamma, c)).or_default().entry(col).or_insert_with(|| Rational::from_i64(0));
                    *e += Rational::from_i64(*s) * z;
                }
            }
            if bundle == Bundle::Sym2 {
                for j in 0..n {
                    for (scalar, s2) in target.contract_basis(j, gamma) {
                        for &b in basis.in_class(basis.class(a) ^ (1 << i) ^ (1 << j)) {
                            if let Some(xv) = pairings.x(a, b, *i, j) {
                                let e = rows.entry((1, scalar, b)).or_default().entry(col).or_insert_with(|| Rational::from_i64(0));
                                *e += Rational::from_i64(s * s2) * xv;
                            }
                        }
                    }
                }
            }
        }
    }
    rows.retain(|_, r| r.values().any(|v| !v.is_zero()));
    let mut m = Matrix::zeros(rows.len(), members.len());
    for (r, entries) in rows.values().enumerate() {
        for (&c, v) in entries {
            m[(r, c)] = v.clone();
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coordinates_round_trip() {
        let space = FieldSpace::<Rational>::get(4, 2, Bundle::Form(2)).unwrap();
        let c = space.sample_unconstrained(5);
        let u = space.field(&c);
        assert_eq!(space.coordinates(&u).unwrap(), c);
    }

    #[test]
    fn cross_product_family() {
        // n = 3, k = 1, 1-forms: u(v) = Av with A skew (v ↦ v × a) or A = λ·id.
        let space = FieldSpace::<Rational>::get(3, 1, Bundle::Form(1)).unwrap();
        assert_eq!(space.normal_dim(), 4);
        let x = |i| HomogeneousPolynomial::<Rational>::variable(3, i);
        let u = HarmonicField::new(
            3,
            1,
            Bundle::Form(1),
            [(BundleIndex::Form(0b001), x(1)), (BundleIndex::Form(0b010), x(0).scale(&Rational::from_i64(-1)))],
        )
        .unwrap();
        assert!(space.is_normal(&space.coordinates(&u).unwrap()));
    }

    #[test]
    fn float_space_matches_exact() {
        let exact = FieldSpace::<Rational>::get(4, 2, Bundle::Sym2).unwrap();
        let float = FieldSpace::<f64>::get(4, 2, Bundle::Sym2).unwrap();
        let c = exact.sample_unconstrained(9);
        let cf: Vec<f64> = c.iter().map(Scalar::to_f64).collect();
        let a = exact.g_term(&c).to_f64();
        let b = float.g_term(&cf);
        assert!((a - b).abs() < 1e-9 * a.abs().max(1.0));
    }
}
