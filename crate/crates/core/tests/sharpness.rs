use pinchlab_core::harmonics::{norm_squared, random_field, Bundle, BundleIndex, HarmonicField};
use pinchlab_core::sharpness::{
    cauchy_schwarz_constant, delta_from_constant, f_functional, field_from_coefficients, sharpness_search,
    SearchConfig, Weights,
};
use pinchlab_core::thresholds::delta_lambda1;
use pinchlab_core::Scalar;

fn small(n: usize, seed: u64) -> SearchConfig {
    SearchConfig {
        restarts: 3,
        iterations: 8,
        mc_samples: 4096,
        training_samples: 512,
        validation_samples: 1024,
        polish_iterations: 10,
        polish_samples: 512,
        seed,
        ..SearchConfig::for_dimension(n)
    }
}

#[test]
fn single_component_field_has_zero_functional() {
    let u = random_field::<f64>(4, 3, Bundle::Form(1), 3).unwrap();
    let only = u.component(&BundleIndex::Form(1));
    let u1 = HarmonicField::new(4, 3, Bundle::Form(1), [(BundleIndex::Form(1), only)]).unwrap();
    let (value, stderr) = f_functional(&u1, Weights::One, 10_000, 1).unwrap();
    assert_eq!((value, stderr), (0.0, 0.0));
}

#[test]
fn functional_is_quadratic() {
    let u = random_field::<f64>(4, 3, Bundle::Form(1), 4).unwrap();
    let (a, sa) = f_functional(&u, Weights::One, 50_000, 2).unwrap();
    let (b, sb) = f_functional(&u.scale(&2.0), Weights::One, 50_000, 2).unwrap();
    assert!((b - 4.0 * a).abs() <= 3.0 * (sb + 4.0 * sa) + 1e-12);
}

#[test]
fn half_weights_halve_the_functional() {
    let u = random_field::<f64>(5, 3, Bundle::Form(1), 5).unwrap();
    let (one, s1) = f_functional(&u, Weights::One, 20_000, 7).unwrap();
    let (half, s2) = f_functional(&u, Weights::Half, 20_000, 7).unwrap();
    assert!((half - one / 2.0).abs() <= 3.0 * (s1 / 2.0 + s2) + 1e-12);
}

#[test]
fn random_fields_respect_the_bound() {
    let bound = cauchy_schwarz_constant(4, 3);
    assert!((bound - 6.7082).abs() < 1e-4);
    for seed in 0..100 {
        let u = random_field::<f64>(4, 3, Bundle::Form(1), seed).unwrap();
        let norm = norm_squared(&u);
        let (f, s) = f_functional(&u, Weights::One, 4096, seed).unwrap();
        assert!(f / norm <= bound + 3.0 * s / norm, "seed {seed}: {}", f / norm);
    }
}

#[test]
fn functional_domain() {
    let scalar = random_field::<f64>(4, 3, Bundle::Scalar, 1).unwrap();
    assert!(f_functional(&scalar, Weights::One, 100, 1).is_err());
    let u = random_field::<f64>(4, 3, Bundle::Form(1), 1).unwrap();
    assert!(f_functional(&u, Weights::One, 1, 1).is_err());
    let constant = random_field::<f64>(4, 0, Bundle::Form(1), 1).unwrap();
    assert_eq!(f_functional(&constant, Weights::One, 100, 1).unwrap(), (0.0, 0.0));
}

#[test]
fn search_invariants() {
    let cfg = small(4, 9);
    let a = sharpness_search(&cfg).unwrap();
    let b = sharpness_search(&cfg).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.trace.len(), 3);
    assert!(a.trace.windows(2).all(|w| w[1].best_so_far >= w[0].best_so_far));
    assert_eq!(a.trace.iter().map(|t| t.seed).collect::<Vec<_>>(), vec![9, 8, 11]);
    assert!(a.quotient > 0.0 && a.quotient <= 1.0);
    let cap = cauchy_schwarz_constant(4, 3);
    assert!(a.c_estimate >= 0.0 && a.c_estimate <= cap * (1.0 + 3.0 * a.stderr));
    assert_eq!(a.best_coefficients.len(), 4 * 16);
    let u = field_from_coefficients(4, 3, &a.best_coefficients).unwrap();
    assert!((norm_squared(&u) - 1.0).abs() < 1e-9);
    assert!((a.delta_new.unwrap() - delta_from_constant(4, a.c_estimate).unwrap()).abs() < 1e-15);
}

#[test]
fn constrained_search_runs() {
    let cfg = SearchConfig { constrained: true, ..small(4, 2) };
    let r = sharpness_search(&cfg).unwrap();
    assert!(r.c_estimate > 0.0 && r.quotient <= 1.0);
}

#[test]
fn config_validation() {
    let ok = small(4, 1);
    assert!(ok.validate().is_ok());
    assert!(SearchConfig { restarts: 0, ..ok.clone() }.validate().is_err());
    assert!(SearchConfig { iterations: 0, ..ok.clone() }.validate().is_err());
    assert!(SearchConfig { mc_samples: 1, ..ok.clone() }.validate().is_err());
    assert!(SearchConfig { epsilon: 0.0, ..ok.clone() }.validate().is_err());
    assert!("half".parse::<Weights>().unwrap() == Weights::Half);
    assert!("double".parse::<Weights>().is_err());
}

#[test]
fn thresholds_from_constants() {
    let trunc3 = |x: f64| (x * 1e3).floor() as i64;
    assert_eq!(trunc3(delta_from_constant(4, 5.294).unwrap()), 267);
    assert_eq!(trunc3(delta_from_constant(6, 8.614).unwrap()), 262);
    assert_eq!(trunc3(delta_from_constant(8, 12.193).unwrap()), 261);
    for n in [4, 6, 8, 10] {
        let d = delta_from_constant(n, cauchy_schwarz_constant(n, 3)).unwrap();
        assert!((d - delta_lambda1(n).unwrap()).abs() < 1e-12);
    }
    assert!(delta_from_constant(4, 0.0).is_err());
    assert!(delta_from_constant(4, 7.0).is_err());
    assert!(delta_from_constant(2, 1.0).is_err());
}
