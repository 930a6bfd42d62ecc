//! Bundle-valued harmonic fields on the sphere: `Ω_k ⊗ E` for
//! `E ∈ {scalar, Λᵖ, Sym²}`.

use std::collections::BTreeMap;

use serde::Serialize;

use super::basis::harmonic_decompose;
use super::polynomial::HomogeneousPolynomial;
use super::sphere::pairing;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::multilinear::forms::{basis_masks, extend_to_forms, interior_sign, mask_indices};
use crate::multilinear::sym::{extend_to_sym2, SymMatrix};
use crate::scalar::Scalar;

/// Fiber of the coefficient bundle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Bundle {
    Scalar,
    Form(usize),
    Sym2,
}

impl std::fmt::Display for Bundle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Bundle::Scalar => write!(f, "scalar"),
            Bundle::Form(p) => write!(f, "form({p})"),
            Bundle::Sym2 => write!(f, "sym2"),
        }
    }
}

/// Basis element of a fiber: the empty index, a `p`-subset (bitmask), or a
/// symmetric pair `i ≤ j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum BundleIndex {
    Scalar,
    Form(u64),
    Sym(usize, usize),
}

impl std::fmt::Display for BundleIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BundleIndex::Scalar => write!(f, "()"),
            BundleIndex::Form(m) => write!(f, "{:?}", mask_indices(*m)),
            BundleIndex::Sym(i, j) => write!(f, "({i},{j})"),
        }
    }
}

impl Bundle {
    pub fn indices(&self, n: usize) -> Vec<BundleIndex> {
        match *self {
            Bundle::Scalar => vec![BundleIndex::Scalar],
            Bundle::Form(p) => basis_masks(n, p).into_iter().map(BundleIndex::Form).collect(),
            Bundle::Sym2 => (0..n).flat_map(|i| (i..n).map(move |j| BundleIndex::Sym(i, j))).collect(),
        }
    }

    pub fn dim(&self, n: usize) -> usize {
        self.indices(n).len()
    }

    pub fn contains(&self, n: usize, idx: &BundleIndex) -> bool {
        match (*self, *idx) {
            (Bundle::Scalar, BundleIndex::Scalar) => true,
            (Bundle::Form(p), BundleIndex::Form(m)) => {
                m.count_ones() as usize == p && (n >= 64 || m >> n == 0)
            }
            (Bundle::Sym2, BundleIndex::Sym(i, j)) => i <= j && j < n,
            _ => false,
        }
    }

    /// Weight of a component in the fiber metric: 2 for off-diagonal
    /// symmetric entries (trace pairing), 1 otherwise.
    pub fn weight(&self, idx: &BundleIndex) -> i64 {
        match idx {
            BundleIndex::Sym(i, j) if i != j => 2,
            _ => 1,
        }
    }

    /// Parity pattern of a fiber index, combined with the monomial parity to
    /// split coordinate spaces into blocks that every operator here preserves.
    pub fn grading(idx: &BundleIndex) -> u64 {
        match *idx {
            BundleIndex::Scalar => 0,
            BundleIndex::Form(m) => m,
            BundleIndex::Sym(i, j) => (1u64 << i) ^ (1u64 << j),
        }
    }

    /// Bundle of `ι_v u`.
    pub fn contracted(&self) -> Result<Bundle> {
        match *self {
            Bundle::Scalar | Bundle::Form(0) => {
                Err(Error::Domain("contraction of a scalar-valued field".into()))
            }
            Bundle::Form(p) => Ok(Bundle::Form(p - 1)),
            Bundle::Sym2 => Ok(Bundle::Form(1)),
        }
    }

    /// `ι_{eᵢ}` applied to a basis element: a list of `(index, sign)`.
    pub fn contract_basis(&self, i: usize, idx: &BundleIndex) -> Vec<(BundleIndex, i64)> {
        match *idx {
            BundleIndex::Scalar => vec![],
            BundleIndex::Form(m) => interior_sign(i, m)
                .map(|s| vec![(BundleIndex::Form(m & !(1 << i)), s)])
                .unwrap_or_default(),
            BundleIndex::Sym(p, q) => {
                let mut out = Vec::new();
                if i == q {
                    out.push((BundleIndex::Form(1 << p), 1));
                }
                if i == p && p != q {
                    out.push((BundleIndex::Form(1 << q), 1));
                }
                out
            }
        }
    }

    /// `κ[(α, β)] = ⟨A·e_α, e_β⟩` in the fiber metric, for the natural action
    /// of a skew matrix `A` (derivation on forms, commutator on Sym²).
    pub fn action_pairing<T: Scalar>(&self, a: &Matrix<T>) -> Result<Matrix<T>> {
        let n = a.rows();
        let idx = self.indices(n);
        match *self {
            Bundle::Scalar => Ok(Matrix::zeros(1, 1)),
            Bundle::Form(p) => {
                let op = extend_to_forms(a, p)?;
                // Orthonormal basis: ⟨A e_α, e_β⟩ = matrix[β][α].
                Ok(op.matrix().transpose())
            }
            Bundle::Sym2 => {
                let op = extend_to_sym2(a)?;
                let sym = |ix: &BundleIndex| match *ix {
                    BundleIndex::Sym(i, j) => SymMatrix::basis(n, i, j),
                    _ => unreachable!("Sym2 indices"),
                };
                let images: Vec<SymMatrix<T>> =
                    idx.iter().map(|ix| op.apply(&sym(ix))).collect::<Result<_>>()?;
                let bases: Vec<SymMatrix<T>> = idx.iter().map(sym).collect();
                Ok(Matrix::from_fn(idx.len(), idx.len(), |al, be| images[al].inner(&bases[be])))
            }
        }
    }
}

/// A polynomial-valued section of a bundle, with all components of one
/// degree but no harmonicity requirement.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyField<T> {
    pub n: usize,
    pub degree: usize,
    pub bundle: Bundle,
    pub components: BTreeMap<BundleIndex, HomogeneousPolynomial<T>>,
}

/// An element of `Ω_k ⊗ E`: one degree-`k` harmonic polynomial per fiber
/// basis index. Symmetric fields store only `i ≤ j`; the entry `(i,j)` is the
/// matrix entry, so `(j,i)` is implied.
#[derive(Clone, Debug, PartialEq)]
pub struct HarmonicField<T> {
    n: usize,
    k: usize,
    bundle: Bundle,
    components: BTreeMap<BundleIndex, HomogeneousPolynomial<T>>,
}

impl<T: Scalar> HarmonicField<T> {
    /// Validates indices, degrees and harmonicity. Missing indices are zero.
    pub fn new(
        n: usize,
        k: usize,
        bundle: Bundle,
        components: impl IntoIterator<Item = (BundleIndex, HomogeneousPolynomial<T>)>,
    ) -> Result<Self> {
        let mut out = Self::zero(n, k, bundle);
        for (idx, p) in components {
            if !bundle.contains(n, &idx) {
                return Err(Error::Domain(format!("index {idx} does not belong to bundle {bundle}")));
            }
            if p.n() != n {
                return Err(Error::DimensionMismatch { expected: n, found: p.n() });
            }
            if p.degree() != k && !p.is_empty() {
                return Err(Error::DegreeMismatch { expected: k, found: p.degree() });
            }
            if !p.is_harmonic() {
                return Err(Error::NotHarmonic { component: idx.to_string() });
            }
            if !p.is_empty() {
                out.components.insert(idx, p);
            }
        }
        Ok(out)
    }

    pub(crate) fn new_unchecked(
        n: usize,
        k: usize,
        bundle: Bundle,
        components: BTreeMap<BundleIndex, HomogeneousPolynomial<T>>,
    ) -> Self {
        Self { n, k, bundle, components }
    }

    pub fn zero(n: usize, k: usize, bundle: Bundle) -> Self {
        Self { n, k, bundle, components: BTreeMap::new() }
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

    pub fn components(&self) -> &BTreeMap<BundleIndex, HomogeneousPolynomial<T>> {
        &self.components
    }

    pub fn component(&self, idx: &BundleIndex) -> HomogeneousPolynomial<T> {
        self.components.get(idx).cloned().unwrap_or_else(|| HomogeneousPolynomial::zero(self.n, self.k))
    }

    pub fn is_zero(&self) -> bool {
        self.components.values().all(HomogeneousPolynomial::is_zero)
    }

    pub fn scale(&self, c: &T) -> Self {
        let components = self
            .components
            .iter()
            .map(|(i, p)| (*i, p.scale(c)))
            .filter(|(_, p)| !p.is_empty())
            .collect();
        Self { components, ..self.clone() }
    }

    pub fn as_poly_field(&self) -> PolyField<T> {
        PolyField { n: self.n, degree: self.k, bundle: self.bundle, components: self.components.clone() }
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U + Copy) -> HarmonicField<U> {
        HarmonicField {
            n: self.n,
            k: self.k,
            bundle: self.bundle,
            components: self.components.iter().map(|(i, p)| (*i, p.map(f))).collect(),
        }
    }
}

/// `∫⟨u, w⟩ dσ / vol(S^{n−1})` with the fiber metric. Fields of different
/// degrees are allowed.
pub fn inner_product<T: Scalar>(u: &HarmonicField<T>, w: &HarmonicField<T>) -> Result<T> {
    poly_inner_product(&u.as_poly_field(), &w.as_poly_field())
}

pub fn poly_inner_product<T: Scalar>(u: &PolyField<T>, w: &PolyField<T>) -> Result<T> {
    if u.n != w.n || u.bundle != w.bundle {
        return Err(Error::Domain(format!(
            "inner product of fields on different bundles ({} vs {})",
            u.bundle, w.bundle
        )));
    }
    let mut acc = T::zero();
    for (idx, p) in &u.components {
        if let Some(q) = w.components.get(idx) {
            acc = acc + T::from_i64(u.bundle.weight(idx)) * pairing(p, q);
        }
    }
    Ok(acc)
}

pub fn norm_squared<T: Scalar>(u: &HarmonicField<T>) -> T {
    inner_product(u, u).expect("same bundle")
}

/// Per component, the `n` entries of the vertical gradient, homogenized to
/// degree `k+1`: `|x|²∂ᵢu − k xᵢ u`. On the unit sphere this is the
/// tangential gradient, and `Σᵢ xᵢ·(entry i) = 0` identically.
#[derive(Clone, Debug, PartialEq)]
pub struct GradientField<T> {
    pub n: usize,
    pub degree: usize,
    pub bundle: Bundle,
    pub components: BTreeMap<BundleIndex, Vec<HomogeneousPolynomial<T>>>,
}

pub fn scalar_vertical_gradient<T: Scalar>(u: &HomogeneousPolynomial<T>, k: usize) -> Vec<HomogeneousPolynomial<T>> {
    let n = u.n();
    (0..n)
        .map(|i| {
            let mut g = if k == 0 {
                HomogeneousPolynomial::zero(n, 1)
            } else {
                u.partial(i).mul_norm2()
            };
            g.add_scaled(&u.mul_var(i), &-T::from_i64(k as i64));
            g
        })
        .collect()
}

pub fn vertical_gradient<T: Scalar>(u: &HarmonicField<T>) -> GradientField<T> {
    GradientField {
        n: u.n,
        degree: u.k + 1,
        bundle: u.bundle,
        components: u.components.iter().map(|(i, p)| (*i, scalar_vertical_gradient(p, u.k))).collect(),
    }
}

/// `Σ_α w_α Σᵢ ∫ (∇ᵢ u_α)² dσ / vol`, the vertical Dirichlet energy.
pub fn vertical_energy<T: Scalar>(u: &HarmonicField<T>) -> T {
    let g = vertical_gradient(u);
    let mut acc = T::zero();
    for (idx, comps) in &g.components {
        let w = T::from_i64(u.bundle.weight(idx));
        for c in comps {
            acc = acc + w.clone() * pairing(c, c);
        }
    }
    acc
}

/// Checks `∫ Σ_α |∇_V u_α|² = k(n+k−2)‖u‖²`.
pub fn vertical_laplacian_eigencheck<T: Scalar>(u: &HarmonicField<T>) -> bool {
    let lhs = vertical_energy(u);
    let rhs = T::from_i64((u.k * (u.n + u.k - 2)) as i64) * norm_squared(u);
    lhs.approx_eq(&rhs, rhs.magnitude())
}

/// `ι_v` of a polynomial field: `Σ_α Σᵢ xᵢ u_α ι_{eᵢ}e_α`, degree one higher.
pub fn contract_field<T: Scalar>(u: &PolyField<T>) -> Result<PolyField<T>> {
    let target = u.bundle.contracted()?;
    let mut components: BTreeMap<BundleIndex, HomogeneousPolynomial<T>> = BTreeMap::new();
    for (idx, p) in &u.components {
        for i in 0..u.n {
            for (t, sign) in u.bundle.contract_basis(i, idx) {
                components
                    .entry(t)
                    .or_insert_with(|| HomogeneousPolynomial::zero(u.n, u.degree + 1))
                    .add_scaled(&p.mul_var(i), &T::from_i64(sign));
            }
        }
    }
    components.retain(|_, p| !p.is_zero());
    Ok(PolyField { n: u.n, degree: u.degree + 1, bundle: target, components })
}

/// Harmonic degrees present in each component after decomposition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeReport {
    pub degrees: BTreeMap<String, Vec<usize>>,
    /// Highest degree present in any component; `None` when the field
    /// vanishes on the sphere.
    pub top: Option<usize>,
}

pub fn degree_report<T: Scalar>(u: &PolyField<T>) -> DegreeReport {
    let mut degrees = BTreeMap::new();
    let mut top = None;
    for (idx, p) in &u.components {
        let present: Vec<usize> = harmonic_decompose(p)
            .iter()
            .enumerate()
            .filter(|(_, h)| !h.is_zero())
            .map(|(j, _)| u.degree - 2 * j)
            .collect();
        if let Some(&d) = present.first() {
            top = top.max(Some(d));
            degrees.insert(idx.to_string(), present);
        }
    }
    DegreeReport { degrees, top }
}

/// `ι_v u` and its harmonic degree report.
pub fn contract_tautological<T: Scalar>(u: &HarmonicField<T>) -> Result<(PolyField<T>, DegreeReport)> {
    let c = contract_field(&u.as_poly_field())?;
    let report = degree_report(&c);
    Ok((c, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};

    type P = HomogeneousPolynomial<Rational>;

    fn x(n: usize, i: usize) -> P {
        P::variable(n, i)
    }

    #[test]
    fn gradient_of_linear() {
        let u = HarmonicField::new(3, 1, Bundle::Scalar, [(BundleIndex::Scalar, x(3, 0))]).unwrap();
        let g = vertical_gradient(&u);
        let comps = &g.components[&BundleIndex::Scalar];
        let at = |v: [f64; 3]| comps.iter().map(|c| c.eval_f64(&v)).collect::<Vec<_>>();
        assert_eq!(at([1.0, 0.0, 0.0]), vec![0.0, 0.0, 0.0]);
        assert_eq!(at([0.0, 1.0, 0.0]), vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn gradient_is_tangent() {
        let p = x(4, 0).mul(&x(4, 1)).mul(&x(4, 2));
        let grad = scalar_vertical_gradient(&p, 3);
        let mut radial = P::zero(4, 5);
        for (i, g) in grad.iter().enumerate() {
            radial.add_scaled(&g.mul_var(i), &rat(1, 1));
        }
        assert!(radial.is_zero());
    }

    #[test]
    fn eigen_ratios() {
        let u = HarmonicField::new(3, 1, Bundle::Scalar, [(BundleIndex::Scalar, x(3, 0))]).unwrap();
        assert_eq!(vertical_energy(&u) / norm_squared(&u), rat(2, 1));
        let u = HarmonicField::new(3, 2, Bundle::Scalar, [(BundleIndex::Scalar, x(3, 0).mul(&x(3, 1)))]).unwrap();
        assert_eq!(vertical_energy(&u) / norm_squared(&u), rat(6, 1));
        assert!(vertical_laplacian_eigencheck(&u));
    }

    #[test]
    fn rejects_non_harmonic() {
        let p = x(3, 0).mul(&x(3, 0));
        let err = HarmonicField::new(3, 2, Bundle::Scalar, [(BundleIndex::Scalar, p)]);
        assert!(matches!(err, Err(Error::NotHarmonic { .. })));
    }

    #[test]
    fn cross_product_field_contracts_to_zero() {
        // u(v) = v × e₃ = (v₂, −v₁, 0) as a 1-form.
        let u = HarmonicField::new(
            3,
            1,
            Bundle::Form(1),
            [(BundleIndex::Form(0b001), x(3, 1)), (BundleIndex::Form(0b010), x(3, 0).scale(&rat(-1, 1)))],
        )
        .unwrap();
        let (c, report) = contract_tautological(&u).unwrap();
        assert!(c.components.is_empty());
        assert_eq!(report.top, None);
    }

    #[test]
    fn scalar_contraction_is_an_error() {
        let u = HarmonicField::<Rational>::zero(3, 1, Bundle::Scalar);
        assert!(contract_tautological(&u).is_err());
    }
}
