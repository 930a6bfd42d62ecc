//! Spherical harmonics on `S^{n−1}` and bundle-valued harmonic fields.

pub mod basis;
pub mod field;
pub mod montecarlo;
pub mod polynomial;
pub mod space;
pub mod sphere;

pub use basis::{dim_harmonics, harmonic_basis, harmonic_decompose, reassemble, HarmonicBasis};
pub use field::{
    contract_field, contract_tautological, degree_report, inner_product, norm_squared, poly_inner_product,
    scalar_vertical_gradient, vertical_energy, vertical_gradient, vertical_laplacian_eigencheck, Bundle, BundleIndex,
    DegreeReport, GradientField, HarmonicField, PolyField,
};
pub use montecarlo::{mc_integrate, mc_mean, sphere_points, MeanEstimate};
pub use polynomial::{monomials, parity, Exponents, HomogeneousPolynomial};
pub use space::FieldSpace;
pub use sphere::{mean, monomial_sphere_integral, pairing, sphere_volume, QuadratureMethod, QuadratureResult, SphereIntegral};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Random element of the subspace where `ι_v u` (and for Sym² also
/// `ι_vι_v u`) loses its top harmonic degree. Gaussian coefficients on a
/// basis of that subspace; deterministic in `seed`.
pub fn normal_subspace_sample<T: Scalar>(n: usize, k: usize, bundle: Bundle, seed: u64) -> Result<HarmonicField<T>> {
    if k == 0 {
        return Err(Error::Domain("the degree-drop constraint needs k ≥ 1".into()));
    }
    bundle.contracted()?;
    let space = FieldSpace::<T>::get(n, k, bundle)?;
    let c = space.sample_normal(seed)?;
    Ok(space.field(&c))
}

/// Random element of `Ω_k ⊗ E` with Gaussian coefficients on the orthogonal
/// basis, no constraint.
pub fn random_field<T: Scalar>(n: usize, k: usize, bundle: Bundle, seed: u64) -> Result<HarmonicField<T>> {
    let space = FieldSpace::<T>::get(n, k, bundle)?;
    Ok(space.field(&space.sample_unconstrained(seed)))
}
