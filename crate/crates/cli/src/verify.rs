//! Verification suites behind `pinchlab verify`.

use pinchlab_core::harmonics::{
    dim_harmonics, harmonic_basis, normal_subspace_sample, random_field, vertical_laplacian_eigencheck, Bundle,
    BundleIndex, HarmonicField,
};
use pinchlab_core::multilinear::curvature::{ch_model, r0_frame_search, sectional_range, CurvatureTensor};
use pinchlab_core::pestov::{
    cauchy_schwarz_chain, g_term_evaluate, g_term_forms, g_term_sym2, gradient_norm_identity,
    projector_relation_check, rank1_fixture,
};
use pinchlab_core::thresholds::{delta_lambda1, delta_sym2, monotonicity_scan, ScanRanges};
use pinchlab_core::{Error, Rational, Scalar};
use serde::Serialize;
use serde_json::{json, Value};

use crate::{CliError, Mode, Suite};

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: Value,
}

fn check(name: impl Into<String>, passed: bool, detail: Value) -> Check {
    Check { name: name.into(), passed, detail }
}

pub fn run(suite: Suite, seed: u64, mode: Mode) -> Result<Vec<Check>, CliError> {
    let mut out = Vec::new();
    if matches!(suite, Suite::Identities | Suite::All) {
        match mode {
            Mode::Exact => identities::<Rational>(seed, &mut out)?,
            Mode::Double => identities::<f64>(seed, &mut out)?,
        }
    }
    if matches!(suite, Suite::Curvature | Suite::All) {
        curvature(seed, &mut out)?;
    }
    if matches!(suite, Suite::Monotonicity | Suite::All) {
        monotonicity(&mut out)?;
    }
    Ok(out)
}

const IDENTITY_N: std::ops::RangeInclusive<usize> = 3..=6;
const IDENTITY_K: std::ops::RangeInclusive<usize> = 1..=4;
const SAMPLES: u64 = 3;

fn identities<T: Scalar>(seed: u64, out: &mut Vec<Check>) -> Result<(), CliError> {
    let mut bad = Vec::new();
    for n in IDENTITY_N {
        for k in 0..=4 {
            let got = harmonic_basis(n, k).len() as u64;
            if got != dim_harmonics(n, k) {
                bad.push(json!({ "n": n, "k": k, "basis": got, "formula": dim_harmonics(n, k) }));
            }
        }
    }
    out.push(check("harmonic dimensions", bad.is_empty(), json!({ "mismatches": bad })));

    let mut checked = 0;
    let mut bad = Vec::new();
    for n in IDENTITY_N {
        for k in IDENTITY_K {
            for p in harmonic_basis(n, k).elements() {
                let p = p.map(|c| T::from_rational(c));
                let u = HarmonicField::new(n, k, Bundle::Scalar, [(BundleIndex::Scalar, p)])?;
                checked += 1;
                if !vertical_laplacian_eigencheck(&u) {
                    bad.push(json!({ "n": n, "k": k }));
                }
            }
            for bundle in [Bundle::Form(1), Bundle::Form(2), Bundle::Sym2] {
                let u = random_field::<T>(n, k, bundle, seed)?;
                checked += 1;
                if !vertical_laplacian_eigencheck(&u) {
                    bad.push(json!({ "n": n, "k": k, "bundle": bundle.to_string() }));
                }
            }
        }
    }
    out.push(check("vertical laplacian eigenvalue", bad.is_empty(), json!({ "checked": checked, "failures": bad })));

    let mut checked = 0;
    let mut bad = Vec::new();
    let mut controls = 0;
    for n in 4..=6 {
        for k in 2..=4 {
            for bundle in [Bundle::Form(1), Bundle::Form(2), Bundle::Sym2] {
                for s in 0..SAMPLES {
                    let u = normal_subspace_sample::<T>(n, k, bundle, seed.wrapping_add(s))?;
                    let rep = match bundle {
                        Bundle::Sym2 => g_term_sym2(&u)?,
                        _ => g_term_forms(&u)?,
                    };
                    checked += 1;
                    if !rep.matched {
                        bad.push(json!({ "n": n, "k": k, "bundle": bundle.to_string(), "sample": s }));
                    }
                }
                let generic = random_field::<T>(n, k, bundle, seed ^ 0x5eed)?;
                let rejected = matches!(
                    if bundle == Bundle::Sym2 { g_term_sym2(&generic) } else { g_term_forms(&generic) },
                    Err(Error::ConstraintViolated { .. })
                );
                if rejected && !g_term_evaluate(&generic)?.matched {
                    controls += 1;
                } else {
                    bad.push(json!({ "n": n, "k": k, "bundle": bundle.to_string(), "control": true }));
                }
            }
        }
    }
    out.push(check(
        "curvature term on constrained fields",
        bad.is_empty(),
        json!({ "checked": checked, "negative_controls": controls, "failures": bad }),
    ));

    let mut bad = Vec::new();
    for n in IDENTITY_N {
        for k in IDENTITY_K {
            let u = random_field::<T>(n, k, Bundle::Form(1), seed)?;
            if !gradient_norm_identity(&u) {
                bad.push(json!({ "n": n, "k": k }));
            }
        }
    }
    out.push(check("gradient norm identity", bad.is_empty(), json!({ "failures": bad })));

    let mut bad = Vec::new();
    for (n, k) in [(4, 3), (5, 2), (6, 3)] {
        let u = random_field::<f64>(n, k, Bundle::Form(1), seed)?;
        let rep = cauchy_schwarz_chain(&u, 50_000, seed, 0.05)?;
        if !rep.holds() {
            bad.push(json!({ "n": n, "k": k, "ratio": rep.ratio() }));
        }
    }
    out.push(check("cauchy-schwarz chain", bad.is_empty(), json!({ "failures": bad })));

    let mut bad = Vec::new();
    for (n, k) in [(3, 2), (4, 2)] {
        if !projector_relation_check(n, k, seed)? {
            bad.push(json!({ "n": n, "k": k }));
        }
    }
    out.push(check("projector relation", bad.is_empty(), json!({ "failures": bad })));

    let mut ratios = Vec::new();
    let mut ok = true;
    for m in [2usize, 3] {
        let n = 2 * m;
        let (_, ratio) = rank1_fixture(m)?;
        let expected = Rational::new(1.into(), ((n * (n - 1)) as i64).into());
        ok &= ratio == expected;
        ratios.push(json!({
            "n": n,
            "numerator": ratio.numer().to_string(),
            "denominator": ratio.denom().to_string(),
        }));
    }
    out.push(check("rank-one projector ratio", ok, json!({ "ratios": ratios })));
    Ok(())
}

const FRAMES: usize = 100_000;

fn curvature(seed: u64, out: &mut Vec<Check>) -> Result<(), CliError> {
    let mut ok = true;
    for n in 3..=6 {
        let g = CurvatureTensor::<Rational>::constant_curvature(n);
        ok &= g.has_symmetries() && g.satisfies_bianchi();
    }
    let ch = ch_model::<Rational>(2)?;
    ok &= ch.has_symmetries() && ch.satisfies_bianchi();
    out.push(check("algebraic curvature tensors", ok, json!({})));

    let ch = ch.to_f64();
    let (lo, hi) = sectional_range(&ch, 20_000, seed)?;
    let tol = 1e-9;
    out.push(check(
        "complex hyperbolic pinching",
        lo >= -1.0 - tol && hi <= -0.25 + tol,
        json!({ "min": lo, "max": hi }),
    ));

    let rep = r0_frame_search(&ch, FRAMES, seed)?;
    out.push(check(
        "centered remainder sharpness",
        (0.49..=0.5 + tol).contains(&rep.max_abs) && rep.violations == 0,
        json!({ "max_abs": rep.max_abs, "bound": rep.bound, "frames": rep.samples, "violations": rep.violations }),
    ));
    Ok(())
}

fn monotonicity(out: &mut Vec<Check>) -> Result<(), CliError> {
    let rep = monotonicity_scan(&ScanRanges::default());
    out.push(check(
        "threshold monotonicity grid",
        rep.passed(),
        json!({ "checked": rep.checked, "violations": rep.violations }),
    ));

    let mut bad = Vec::new();
    // Vector-field thresholds; at n = 134 the exceptional case binds instead.
    let seq: Vec<usize> = (2..=200).map(|l| 4 * l + 2).collect();
    for w in seq.windows(2) {
        if delta_lambda1(w[1])? <= delta_lambda1(w[0])? {
            bad.push(json!({ "sequence": "4l+2", "n": w[1] }));
        }
    }
    for l in 3..200 {
        if delta_sym2(4 * l + 4)? >= delta_sym2(4 * l)? {
            bad.push(json!({ "sequence": "4l", "n": 4 * l + 4 }));
        }
    }
    out.push(check("dimension sequences", bad.is_empty(), json!({ "failures": bad })));
    Ok(())
}
