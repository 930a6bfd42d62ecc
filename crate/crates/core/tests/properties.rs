use proptest::prelude::*;

use pinchlab_core::classify::{radon_hurwitz, structure_menu, verdict};
use pinchlab_core::harmonics::{
    harmonic_decompose, inner_product, normal_subspace_sample, norm_squared, random_field, reassemble, Bundle,
    FieldSpace, HomogeneousPolynomial,
};
use pinchlab_core::linalg::Matrix;
use pinchlab_core::multilinear::{extend_to_forms, CurvatureTensor, PForm};
use pinchlab_core::pestov::{cauchy_schwarz_chain, g_term_forms, g_term_sym2, gradient_norm_identity};
use pinchlab_core::sharpness::{cauchy_schwarz_constant, delta_from_constant};
use pinchlab_core::thresholds::{
    b_forms, c_forms, c_forms_expanded, c_sym2, d_const, delta1, delta2, delta2_sym, delta_master,
};
use pinchlab_core::{Rational, Scalar};

fn small_rational() -> impl Strategy<Value = Rational> {
    (-8i128..=8, 1i128..=4).prop_map(|(a, b)| Rational::from_ratio(a, b))
}

fn skew(n: usize, entries: &[f64]) -> Matrix<f64> {
    let mut a = Matrix::zeros(n, n);
    let mut it = entries.iter();
    for i in 0..n {
        for j in i + 1..n {
            let x = *it.next().unwrap();
            a[(i, j)] = x;
            a[(j, i)] = -x;
        }
    }
    a
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// Kulkarni–Nomizu products `S ⊙ id` are algebraic curvature tensors.
    #[test]
    fn kulkarni_nomizu_tensors_are_curvature_tensors(
        n in 3usize..=5,
        s in proptest::collection::vec(small_rational(), 15),
    ) {
        let sym = |i: usize, j: usize| {
            let (a, b) = (i.min(j), i.max(j));
            s[a * 5 + b - a * (a + 1) / 2].clone()
        };
        let kd = |i: usize, j: usize| if i == j { Rational::from_i64(1) } else { Rational::from_i64(0) };
        let r = CurvatureTensor::from_fn(n, Rational::from_i64(1), |i, j, k, l| {
            sym(i, k) * kd(j, l) + sym(j, l) * kd(i, k) - sym(j, k) * kd(i, l) - sym(i, l) * kd(j, k)
        });
        prop_assert!(r.has_symmetries());
        prop_assert!(r.satisfies_bianchi());
    }

    #[test]
    fn extension_to_forms_is_a_derivation(
        n in 3usize..=5,
        a in proptest::collection::vec(-2.0f64..2.0, 10),
        vs in proptest::collection::vec(proptest::collection::vec(-1.0f64..1.0, 5), 3),
        j in 1usize..=2,
    ) {
        let a = skew(n, &a);
        let vs: Vec<Vec<f64>> = vs.iter().map(|v| v[..n].to_vec()).collect();
        let omega = PForm::from_vectors(&vs[..j]).unwrap();
        let tau = PForm::from_vectors(&vs[j..3]).unwrap();
        let lhs = extend_to_forms(&a, 3).unwrap().apply(&omega.wedge(&tau).unwrap()).unwrap();
        let left = extend_to_forms(&a, j).unwrap().apply(&omega).unwrap().wedge(&tau).unwrap();
        let right = omega.wedge(&extend_to_forms(&a, 3 - j).unwrap().apply(&tau).unwrap()).unwrap();
        let diff = lhs.add(&left.add(&right).scale(&-1.0));
        prop_assert!(diff.inner(&diff).sqrt() < 1e-10);
    }

    /// `|⟨A^{Λᵖ}ω, τ⟩| ≤ p·‖A‖·‖ω‖·‖τ‖`.
    #[test]
    fn form_extension_bound(
        a in proptest::collection::vec(-2.0f64..2.0, 10),
        w in proptest::collection::vec(-1.0f64..1.0, 10),
        t in proptest::collection::vec(-1.0f64..1.0, 10),
        p in 1usize..=3,
    ) {
        let n = 5;
        let a = skew(n, &a);
        let kappa = a.operator_norm().unwrap();
        let op = extend_to_forms(&a, p).unwrap();
        let masks = op.masks().to_vec();
        let omega = PForm::from_coeffs(n, p, masks.iter().copied().zip(w.iter().copied())).unwrap();
        let tau = PForm::from_coeffs(n, p, masks.iter().copied().zip(t.iter().copied())).unwrap();
        let lhs = op.apply(&omega).unwrap().inner(&tau).abs();
        let rhs = p as f64 * kappa * omega.inner(&omega).sqrt() * tau.inner(&tau).sqrt();
        prop_assert!(lhs <= rhs * (1.0 + 1e-9) + 1e-12);
    }

    /// Norms computed from coordinates equal the sphere integral (Parseval).
    #[test]
    fn parseval(n in 3usize..=5, k in 1usize..=3, seed in any::<u64>(), which in 0usize..3) {
        let bundle = [Bundle::Scalar, Bundle::Form(1), Bundle::Sym2][which];
        let space = FieldSpace::<Rational>::get(n, k, bundle).unwrap();
        let c = space.sample_unconstrained(seed);
        let u = space.field(&c);
        prop_assert_eq!(norm_squared(&u), space.norm_squared(&c));
        prop_assert_eq!(space.coordinates(&u).unwrap(), c);
    }

    #[test]
    fn harmonic_decomposition_round_trip(
        n in 2usize..=4,
        coeffs in proptest::collection::vec(-5i64..=5, 35),
    ) {
        let monos = pinchlab_core::harmonics::monomials(n, 4);
        let u = HomogeneousPolynomial::from_terms(
            n,
            4,
            monos.into_iter().map(|e| e.to_vec()).zip(coeffs.iter().map(|&c| Rational::from_i64(c))),
        )
        .unwrap();
        let parts = harmonic_decompose(&u);
        prop_assert_eq!(parts.len(), 3);
        for (j, h) in parts.iter().enumerate() {
            prop_assert!(h.is_harmonic());
            prop_assert_eq!(h.degree(), 4 - 2 * j);
        }
        prop_assert_eq!(reassemble(&parts).unwrap(), u);
    }

    /// Fields of odd and even degree are orthogonal.
    #[test]
    fn parity_orthogonality(n in 3usize..=5, k in 1usize..=3, seed in any::<u64>()) {
        let odd = random_field::<Rational>(n, 2 * k - 1, Bundle::Form(1), seed).unwrap();
        let even = random_field::<Rational>(n, 2 * k, Bundle::Form(1), seed ^ 1).unwrap();
        let odd_poly = odd.as_poly_field();
        let even_poly = even.as_poly_field();
        let mixed = pinchlab_core::harmonics::poly_inner_product(&odd_poly, &even_poly).unwrap();
        prop_assert_eq!(mixed, Rational::from_i64(0));
        prop_assert!(inner_product(&odd, &odd).unwrap() > Rational::from_i64(0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn curvature_term_identity_on_constrained_fields(
        n in 3usize..=5,
        k in 1usize..=3,
        seed in any::<u64>(),
        which in 0usize..3,
    ) {
        let bundle = [Bundle::Form(1), Bundle::Form(2), Bundle::Sym2][which];
        match normal_subspace_sample::<Rational>(n, k, bundle, seed) {
            Ok(u) => {
                let rep = if bundle == Bundle::Sym2 { g_term_sym2(&u) } else { g_term_forms(&u) }.unwrap();
                prop_assert!(rep.matched, "{:?}", rep);
            }
            Err(pinchlab_core::Error::ZeroSubspace { .. }) => {}
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
    }

    #[test]
    fn gradient_identity_without_constraints(
        n in 3usize..=5,
        k in 0usize..=3,
        seed in any::<u64>(),
        which in 0usize..4,
    ) {
        let bundle = [Bundle::Scalar, Bundle::Form(1), Bundle::Form(2), Bundle::Sym2][which];
        let u = random_field::<Rational>(n, k, bundle, seed).unwrap();
        prop_assert!(gradient_norm_identity(&u));
    }

    #[test]
    fn cauchy_schwarz_chain_respects_bound(n in 3usize..=5, k in 1usize..=3, seed in any::<u64>()) {
        let u = random_field::<f64>(n, k, Bundle::Form(1), seed).unwrap();
        let rep = cauchy_schwarz_chain(&u, 20_000, seed, 0.05).unwrap();
        prop_assert!(rep.holds(), "{:?}", rep);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn forms_sign_equivalence(
        n in 3usize..=300,
        k in 2usize..=60,
        p in 1usize..=6,
        delta in 0.0001f64..1.0,
    ) {
        let p = p.min(n - 1);
        let b = b_forms(n, k, p, delta);
        let bc = b + c_forms(n, k, p, delta);
        let threshold = delta1(n, k, p).unwrap().max(delta2(n, k, p).unwrap());
        prop_assume!((delta - threshold).abs() > 1e-12 && b.abs() > 1e-12 && bc.abs() > 1e-12);
        prop_assert_eq!(b > 0.0 && bc > 0.0, delta > threshold);
    }

    /// With `‖ι_vι_vu‖² ≤ ‖ι_vu‖²`, positivity of `B` and `B + C − D` for
    /// Sym² is governed by `max(δ₁(p=2), δ′₂)`.
    #[test]
    fn sym2_sign_equivalence(n in 3usize..=300, k2 in 2usize..=30, delta in 0.0001f64..1.0) {
        let k = 2 * k2;
        let b = b_forms(n, k, 2, delta);
        let bcd = b + c_sym2(n, k, delta) - d_const(n, k, delta);
        let threshold = delta1(n, k, 2).unwrap().max(delta2_sym(n, k).unwrap());
        prop_assume!((delta - threshold).abs() > 1e-12 && b.abs() > 1e-12 && bcd.abs() > 1e-12);
        prop_assert_eq!(b > 0.0 && bcd > 0.0, delta > threshold);
    }

    /// `C` is built from `B` one step down in both `k` and `p`.
    #[test]
    fn c_recurrence(n in 3usize..=300, k in 2usize..=60, p in 1usize..=6, delta in 0.0001f64..1.0) {
        let a = c_forms(n, k, p, delta);
        let b = c_forms_expanded(n, k, p, delta);
        prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0), "{a} vs {b}");
    }

    #[test]
    fn thresholds_in_unit_interval(n in 3usize..=500, k in 2usize..=80, p in 1usize..=6) {
        let p = p.min(n - 1);
        for d in [delta1(n, k, p).unwrap(), delta2(n, k, p).unwrap(), delta_master(n).unwrap().value] {
            prop_assert!((0.0..1.0).contains(&d));
        }
        if k % 2 == 0 && k >= 4 {
            let d = delta2_sym(n, k).unwrap();
            prop_assert!(d > 0.0 && d < 1.0);
        }
    }

    #[test]
    fn verdict_monotone_in_delta(n in 3usize..=300, a in 0.001f64..1.0, b in 0.001f64..1.0) {
        let (lo, hi) = (a.min(b), a.max(b));
        if verdict(n, lo).unwrap().is_ergodic() {
            prop_assert!(verdict(n, hi).unwrap().is_ergodic());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn delta_from_constant_increasing(n in 3usize..=40, a in 0.01f64..1.0, b in 0.01f64..1.0) {
        prop_assume!((a - b).abs() > 1e-6);
        let cap = cauchy_schwarz_constant(n, 3);
        let (lo, hi) = (a.min(b) * cap, a.max(b) * cap);
        prop_assert!(delta_from_constant(n, lo).unwrap() < delta_from_constant(n, hi).unwrap());
    }
}

#[test]
fn menu_maximum_is_master_threshold() {
    for n in 3..=500 {
        let menu_max = structure_menu(n).unwrap().iter().map(|c| c.threshold).fold(0.0, f64::max);
        assert_eq!(menu_max, delta_master(n).unwrap().value, "n = {n}");
    }
}

#[test]
fn radon_hurwitz_bounds() {
    for n in 1..=512u64 {
        let rho = radon_hurwitz(n);
        assert!(rho <= n);
        assert_eq!(rho == n, [1, 2, 4, 8].contains(&n), "n = {n}");
    }
}
