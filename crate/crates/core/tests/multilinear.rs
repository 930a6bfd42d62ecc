use pinchlab_core::linalg::{random_frame, random_unit, Matrix};
use pinchlab_core::multilinear::{
    ch_model, extend_to_sym2, g_tensor, g_value, r0_frame_search, r0_unit_tuple_max, sectional_range,
    wedge_contract_identity_check, CurvatureTensor, PForm, SymMatrix,
};
use pinchlab_core::{Rational, Scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn e(n: usize, i: usize) -> Vec<Rational> {
    (0..n).map(|j| Rational::from_i64((i == j) as i64)).collect()
}

#[test]
fn g_tensor_examples() {
    let n = 3;
    assert_eq!(g_tensor(&e(n, 0), &e(n, 1), &e(n, 0)).unwrap(), e(n, 1));
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..100 {
        let a: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
        let b: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
        let c: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
        assert!(g_tensor(&a, &a, &c).unwrap().iter().all(|x| x.abs() < 1e-15));
        let dot = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| p * q).sum::<f64>();
        let area = dot(&a, &a) * dot(&b, &b) - dot(&a, &b).powi(2);
        assert!((g_value(&a, &b, &b, &a).abs() - area).abs() < 1e-12);
    }
}

#[test]
fn pure_wedge_inner_product_is_gram_determinant() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..20 {
        let vs: Vec<Vec<f64>> = (0..2).map(|_| (0..4).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        let ws: Vec<Vec<f64>> = (0..2).map(|_| (0..4).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        let dot = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| p * q).sum::<f64>();
        let gram = dot(&vs[0], &ws[0]) * dot(&vs[1], &ws[1]) - dot(&vs[0], &ws[1]) * dot(&vs[1], &ws[0]);
        let lhs = PForm::from_vectors(&vs).unwrap().inner(&PForm::from_vectors(&ws).unwrap());
        assert!((lhs - gram).abs() < 1e-12);
    }
}

#[test]
fn wedge_contract_identity_cases() {
    assert!(wedge_contract_identity_check(1, 3));
    assert!(wedge_contract_identity_check(2, 4));
    assert!(wedge_contract_identity_check(3, 7));
}

#[test]
fn constant_curvature_is_a_curvature_tensor() {
    for n in 2..=5 {
        let g = CurvatureTensor::<Rational>::constant_curvature(n);
        assert!(g.has_symmetries() && g.satisfies_bianchi());
    }
}

#[test]
fn complex_hyperbolic_model() {
    for m in 2..=3 {
        let ch = ch_model::<Rational>(m).unwrap();
        assert!(ch.has_symmetries() && ch.satisfies_bianchi());
        let (lo, hi) = sectional_range(&ch.to_f64(), 100_000, m as u64).unwrap();
        assert!(lo >= -1.0 - 1e-12 && hi <= -0.25 + 1e-12, "[{lo}, {hi}]");
        assert!(lo < -0.99 && hi > -0.26);
    }
}

/// `|R₀(a,b,b,a)| ≤ (1−δ)/2` for orthonormal `a, b`.
#[test]
fn centered_remainder_on_planes() {
    let ch = ch_model::<f64>(2).unwrap();
    let r0 = ch.r0_split();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10_000 {
        let f = random_frame(&mut rng, 4, 2).unwrap();
        let v = r0.eval(&f[0], &f[1], &f[1], &f[0]).abs();
        assert!(v <= 0.375 + 1e-12);
    }
}

#[test]
fn centered_remainder_sharpness() {
    let ch = ch_model::<f64>(2).unwrap();
    let rep = r0_frame_search(&ch, 100_000, 11).unwrap();
    assert_eq!(rep.violations, 0);
    assert!((rep.max_abs - 0.5).abs() < 1e-3);
    // Unit tuples that are not orthonormal stay below the bound too.
    assert!(r0_unit_tuple_max(&ch, 20_000, 5) <= 0.5 + 1e-12);
}

/// `C ↦ [A, C]` has operator norm at most `2‖A‖`.
#[test]
fn commutator_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let n = 4;
    for _ in 0..200 {
        let mut a = Matrix::<f64>::zeros(n, n);
        for i in 0..n {
            for j in i + 1..n {
                let x = rng.random_range(-1.0..1.0);
                a[(i, j)] = x;
                a[(j, i)] = -x;
            }
        }
        let kappa = a.operator_norm().unwrap();
        let op = extend_to_sym2(&a).unwrap();
        let v = random_unit(&mut rng, n);
        let w = random_unit(&mut rng, n);
        let c = SymMatrix::outer(&v);
        let d = SymMatrix::outer(&w);
        let lhs = op.apply(&c).unwrap().inner(&d).abs();
        assert!(lhs <= 2.0 * kappa * c.inner(&c).sqrt() * d.inner(&d).sqrt() + 1e-12);
    }
}
