//! Closed-form constants and pinching thresholds.
//!
//! Every threshold is written twice: once in terms of the couplings `r`, and
//! once in the `s = (n+2k−2)·r` form. The `_expanded` variants exist so the two
//! can be compared against each other in tests.

use serde::Serialize;

use crate::error::{domain, Result};

fn nf(n: usize) -> f64 {
    n as f64
}

fn check_n(n: usize) -> Result<()> {
    if n < 3 {
        return domain(format!("dimension n must be >= 3, got {n}"));
    }
    Ok(())
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta <= 1.0) {
        return domain(format!("pinching delta must lie in (0, 1], got {delta}"));
    }
    Ok(())
}

/// `r_{n,p,k} = (2p/3)·√((n−1)/(k(n+k−2)))`.
pub fn r_coupling(n: usize, p: usize, k: usize) -> f64 {
    let (n, p, k) = (nf(n), p as f64, k as f64);
    2.0 * p / 3.0 * ((n - 1.0) / (k * (n + k - 2.0))).sqrt()
}

/// `s_{n,p,k} = (n+2k−2)·r_{n,p,k}`.
pub fn s_coupling(n: usize, p: usize, k: usize) -> f64 {
    (nf(n) + 2.0 * k as f64 - 2.0) * r_coupling(n, p, k)
}

/// `k(n+k−2)`, the vertical Laplacian eigenvalue on degree `k`.
fn lambda(n: f64, k: f64) -> f64 {
    k * (n + k - 2.0)
}

/// `B^{Λᵖ}_{n,k,δ} = δk(n+k−2) − (1+δ)p/2 − (2p/3)(1−δ)√(k(n+k−2)(n−1))`.
pub fn b_forms(n: usize, k: usize, p: usize, delta: f64) -> f64 {
    let (n, k, p) = (nf(n), k as f64, p as f64);
    delta * lambda(n, k) - (1.0 + delta) * p / 2.0
        - 2.0 * p / 3.0 * (1.0 - delta) * (lambda(n, k) * (n - 1.0)).sqrt()
}

/// `B^{Λᵖ}` rewritten with `r_{n,p,k}`.
pub fn b_forms_expanded(n: usize, k: usize, p: usize, delta: f64) -> f64 {
    let l = lambda(nf(n), k as f64);
    let a = p as f64 / (2.0 * l);
    let r = r_coupling(n, p, k);
    l * (delta * (1.0 - a + r) - (a + r))
}

fn c_prefactor(n: f64, k: f64) -> f64 {
    lambda(n, k) * (n + 2.0 * k - 4.0) / ((n + k - 3.0) * (k - 1.0) * (n + 2.0 * k - 2.0))
}

/// `C^{Λᵖ}_{n,k,δ}`; for `k = 1` the convention `−(n−2)(1+δ)/2`.
pub fn c_forms(n: usize, k: usize, p: usize, delta: f64) -> f64 {
    let (nn, kk) = (nf(n), k as f64);
    if k == 1 {
        return -(nn - 2.0) * (1.0 + delta) / 2.0;
    }
    c_prefactor(nn, kk) * b_forms(n, k - 1, p.saturating_sub(1), delta)
        - (nn + 2.0 * kk - 4.0) * (1.0 + delta) / 2.0
}

/// `C^{Λᵖ}` for `k ≥ 2` in the bracketed `r` form.
pub fn c_forms_expanded(n: usize, k: usize, p: usize, delta: f64) -> f64 {
    let (nn, kk, pp) = (nf(n), k as f64, p as f64);
    let q = (pp - 1.0) / (2.0 * (kk - 1.0) * (nn + kk - 3.0));
    let r = r_coupling(n, p.saturating_sub(1), k - 1);
    let t = (nn + 2.0 * kk - 2.0) / (2.0 * lambda(nn, kk));
    lambda(nn, kk) * (nn + 2.0 * kk - 4.0) / (nn + 2.0 * kk - 2.0)
        * (delta * (1.0 - q + r - t) - (q + r + t))
}

/// `C^{Sym²}_{n,k,δ}`; for `k = 1` the convention `−(n−2)(1+δ)`.
pub fn c_sym2(n: usize, k: usize, delta: f64) -> f64 {
    let (nn, kk) = (nf(n), k as f64);
    if k == 1 {
        return -(nn - 2.0) * (1.0 + delta);
    }
    c_prefactor(nn, kk) * b_forms(n, k - 1, 1, delta) - (nn + 2.0 * kk - 4.0) * (1.0 + delta)
}

/// `D_{n,k,δ}`, zero for `k = 1`.
pub fn d_const(n: usize, k: usize, delta: f64) -> f64 {
    if k == 1 {
        return 0.0;
    }
    let (nn, kk) = (nf(n), k as f64);
    (nn + 2.0 * kk - 6.0) * c_prefactor(nn, kk) * (1.0 + delta) / 2.0
}

/// All constants at one parameter point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThresholdBundle {
    pub n: usize,
    pub k: usize,
    pub p: usize,
    pub delta: f64,
    pub r: f64,
    pub s: f64,
    pub b_forms: f64,
    pub b_sym2: f64,
    pub c_forms: f64,
    pub c_sym2: f64,
    pub d: f64,
}

pub fn constants(n: usize, k: usize, p: usize, delta: f64) -> Result<ThresholdBundle> {
    check_n(n)?;
    check_delta(delta)?;
    if k < 1 {
        return domain("degree k must be >= 1");
    }
    Ok(ThresholdBundle {
        n,
        k,
        p,
        delta,
        r: r_coupling(n, p, k),
        s: s_coupling(n, p, k),
        b_forms: b_forms(n, k, p, delta),
        b_sym2: b_forms(n, k, 2, delta),
        c_forms: c_forms(n, k, p, delta),
        c_sym2: c_sym2(n, k, delta),
        d: d_const(n, k, delta),
    })
}

fn check_nkp(n: usize, k: usize, p: usize, min_k: usize) -> Result<()> {
    check_n(n)?;
    if k < min_k {
        return domain(format!("degree k must be >= {min_k}, got {k}"));
    }
    if p < 1 {
        return domain("form degree p must be >= 1");
    }
    Ok(())
}

/// δ₁ with the `(n,p,k)` coupling supplied by the caller.
pub fn delta1_with(n: usize, k: usize, p: usize, r: f64) -> f64 {
    let a = p as f64 / (2.0 * lambda(nf(n), k as f64));
    (a + r) / (1.0 - a + r)
}

/// Threshold characterising `B^{Λᵖ}_{n,k,δ} > 0`.
pub fn delta1(n: usize, k: usize, p: usize) -> Result<f64> {
    check_nkp(n, k, p, 1)?;
    Ok(delta1_with(n, k, p, r_coupling(n, p, k)))
}

pub fn delta1_expanded(n: usize, k: usize, p: usize) -> Result<f64> {
    check_nkp(n, k, p, 1)?;
    let (nn, kk, pp) = (nf(n), k as f64, p as f64);
    let m = nn + 2.0 * kk - 2.0;
    let a = pp * m / (2.0 * lambda(nn, kk));
    let s = s_coupling(n, p, k);
    Ok((a + s) / (m - a + s))
}

/// δ₂ with both couplings supplied by the caller: `r_low = r_{n,p−1,k−1}`,
/// `r_top = r_{n,p,k}`.
pub fn delta2_with(n: usize, k: usize, p: usize, r_low: f64, r_top: f64) -> f64 {
    let (nn, kk, pp) = (nf(n), k as f64, p as f64);
    let q = (pp - 1.0) / (2.0 * (nn + kk - 3.0) * (kk - 1.0));
    let t = (nn + 2.0 * kk - 2.0) / (2.0 * lambda(nn, kk));
    let ratio = (nn + 2.0 * kk - 2.0) / (nn + 2.0 * kk - 4.0);
    let a = pp / (2.0 * lambda(nn, kk));
    let num = q + r_low + t + ratio * (a + r_top);
    let den = 1.0 - q + r_low - t + ratio * (1.0 - a + r_top);
    num / den
}

/// Threshold characterising `B^{Λᵖ} + C^{Λᵖ} > 0`; needs `k ≥ 2`.
pub fn delta2(n: usize, k: usize, p: usize) -> Result<f64> {
    check_nkp(n, k, p, 2)?;
    Ok(delta2_with(n, k, p, r_coupling(n, p - 1, k - 1), r_coupling(n, p, k)))
}

pub fn delta2_expanded(n: usize, k: usize, p: usize) -> Result<f64> {
    check_nkp(n, k, p, 2)?;
    let (nn, kk, pp) = (nf(n), k as f64, p as f64);
    let m = nn + 2.0 * kk - 2.0;
    let m4 = nn + 2.0 * kk - 4.0;
    let l = lambda(nn, kk);
    let q = (pp - 1.0) * m4 / (2.0 * (nn + kk - 3.0) * (kk - 1.0));
    let (s_low, s_top) = (s_coupling(n, p - 1, k - 1), s_coupling(n, p, k));
    let num = q + s_low + m * m4 / (2.0 * l) + pp * m / (2.0 * l) + s_top;
    let den = m4 - q + s_low - m * m4 / (2.0 * l) + m - pp * m / (2.0 * l) + s_top;
    Ok(num / den)
}

/// The Sym² analogue of δ₂, defined for even `k ≥ 4`.
pub fn delta2_sym(n: usize, k: usize) -> Result<f64> {
    check_n(n)?;
    if k < 4 || k % 2 != 0 {
        return domain(format!("Sym² threshold needs even k >= 4, got {k}"));
    }
    let (nn, kk) = (nf(n), k as f64);
    let l = lambda(nn, kk);
    let low = 1.0 / (2.0 * (kk - 1.0) * (nn + kk - 3.0));
    let ratio = (nn + 2.0 * kk - 2.0) / (nn + 2.0 * kk - 4.0);
    let t = (nn + 2.0 * kk - 2.0) / l;
    let extra = (nn + 2.0 * kk - 6.0) / (2.0 * (kk - 1.0) * (nn + kk - 3.0));
    let (r1, r2) = (r_coupling(n, 1, k - 1), r_coupling(n, 2, k));
    let num = low + r1 + t + ratio * (1.0 / l + r2) + extra;
    let den = 1.0 - low + r1 - t + ratio * (1.0 - 1.0 / l + r2) - extra;
    Ok(num / den)
}

pub fn delta2_sym_expanded(n: usize, k: usize) -> Result<f64> {
    delta2_sym(n, k)?;
    let (nn, kk) = (nf(n), k as f64);
    let a = (nn + 2.0 * kk - 4.0) * (nn + 2.0 * kk - 5.0) / (2.0 * (kk - 1.0) * (nn + kk - 3.0));
    let b = (nn + 2.0 * kk - 2.0) * (nn + 2.0 * kk - 3.0) / lambda(nn, kk);
    let (s1, s2) = (s_coupling(n, 1, k - 1), s_coupling(n, 2, k));
    Ok((a + s1 + b + s2) / (2.0 * nn + 4.0 * kk - 6.0 - a + s1 - b + s2))
}

/// Degree-2 Sym² threshold for a projector of rank `r`.
pub fn delta2_sym_deg2(n: usize, r: usize) -> Result<f64> {
    check_n(n)?;
    if r < 1 || r >= n {
        return domain(format!("rank must satisfy 1 <= r <= n-1, got {r}"));
    }
    let nn = nf(n);
    let q = 4.0 / 3.0 * (2.0 * nn * (nn - 1.0)).sqrt();
    let w = nn / (nn - r as f64);
    Ok((q + w) / (2.0 * nn + q - w))
}

/// Closed form for the vector-field case (two branches, `n ≤ 8` and `n ≥ 10`).
pub fn delta_lambda1(n: usize) -> Result<f64> {
    check_n(n)?;
    let nn = nf(n);
    let q = 2.0 / 3.0 * (3.0 * (nn * nn - 1.0)).sqrt();
    Ok(if n <= 8 {
        (q + (nn + 3.0) / 2.0)
            / (3.0 * (nn + 1.0) + q - 0.5 + 0.5 * (nn + 2.0) * (5.0 * nn + 2.0) / (nn + 4.0))
    } else {
        (q + 0.5) / (3.0 * (nn + 1.0) + q - 0.5)
    })
}

/// Closed form for the even-projector case.
pub fn delta_sym2(n: usize) -> Result<f64> {
    check_n(n)?;
    let nn = nf(n);
    let a = 2.0 * (nn + 2.0) * (nn + 4.0) / (3.0 * (nn + 1.0) * (nn + 6.0));
    let q = 4.0 / 3.0 * (3.0 * (nn * nn - 1.0)).sqrt();
    let c = 8.0 / 3.0 * ((nn - 1.0) * (nn + 2.0)).sqrt();
    Ok((nn + 5.0 + c + a * (nn + 3.0 + q)) / (3.0 * (nn + 1.0) + c + a * (5.0 * nn + 3.0 + q)))
}

/// Which of δ₁ / δ₂ attains a maximum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Binding {
    Delta1,
    Delta2,
}

impl std::fmt::Display for Binding {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Binding::Delta1 => "delta1",
            Binding::Delta2 => "delta2",
        })
    }
}

/// `max(δ₁, δ₂)` at one `(n, k, p)` with the binding branch.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThresholdReport {
    pub n: usize,
    pub case: String,
    pub delta1: f64,
    pub delta2: f64,
    pub composite: f64,
    pub binding: Binding,
}

impl ThresholdReport {
    fn new(n: usize, case: &str, d1: f64, d2: f64) -> Self {
        let binding = if d1 >= d2 { Binding::Delta1 } else { Binding::Delta2 };
        Self { n, case: case.to_string(), delta1: d1, delta2: d2, composite: d1.max(d2), binding }
    }
}

pub fn forms_report(n: usize, k: usize, p: usize, case: &str) -> Result<ThresholdReport> {
    Ok(ThresholdReport::new(n, case, delta1(n, k, p)?, delta2(n, k, p)?))
}

/// `max(δ₁, δ₂)` at `(k=3, p=1)`, the quantity the vector-field closed form encodes.
pub fn vector_field_report(n: usize) -> Result<ThresholdReport> {
    forms_report(n, 3, 1, "vector-field")
}

/// `max(δ₁(p=2), δ′₂)` at `k = 4`, the quantity the projector closed form encodes.
pub fn projector_report(n: usize) -> Result<ThresholdReport> {
    Ok(ThresholdReport::new(n, "projector", delta1(n, 4, 2)?, delta2_sym(n, 4)?))
}

/// Exceptional cases with their `(k, p)`.
pub fn exceptional_report(n: usize) -> Option<ThresholdReport> {
    let (case, p) = match n {
        7 => ("complex-structure-7", 2),
        8 => ("g2-structure-8", 3),
        134 => ("lie-bracket-134", 3),
        _ => return None,
    };
    forms_report(n, 3, p, case).ok()
}

/// The dimension-dependent pinching threshold above which ergodicity follows.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MasterThreshold {
    pub n: usize,
    pub value: f64,
    /// Label of the binding case; `"unconditional"` for odd `n ≠ 7`.
    pub case: String,
    /// Every case considered, with its threshold.
    pub cases: Vec<(String, f64)>,
}

pub fn delta_master(n: usize) -> Result<MasterThreshold> {
    check_n(n)?;
    let mut cases: Vec<(String, f64)> = Vec::new();
    if n % 2 == 1 && n != 7 {
        return Ok(MasterThreshold { n, value: 0.0, case: "unconditional".into(), cases });
    }
    if let Some(rep) = exceptional_report(n) {
        cases.push((rep.case.clone(), rep.composite));
    }
    if n == 8 {
        cases.push(("projector".into(), delta_sym2(n)?));
    } else if n == 4 || n % 4 == 2 {
        cases.push(("vector-field".into(), delta_lambda1(n)?));
    } else if n % 4 == 0 {
        cases.push(("projector".into(), delta_sym2(n)?));
    }
    let (case, value) = cases
        .iter()
        .cloned()
        .fold(None::<(String, f64)>, |acc, c| match acc {
            Some(a) if a.1 >= c.1 => Some(a),
            _ => Some(c),
        })
        .expect("even n and n = 7 always have a case");
    Ok(MasterThreshold { n, value, case, cases })
}

/// A grid point where a monotonicity claim fails.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub function: String,
    pub n: usize,
    pub k: usize,
    pub p: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub checked: usize,
    pub violations: Vec<Violation>,
}

impl MonotonicityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Finite grids for [`monotonicity_scan`].
#[derive(Clone, Debug, PartialEq)]
pub struct ScanRanges {
    pub n: std::ops::RangeInclusive<usize>,
    pub k: std::ops::RangeInclusive<usize>,
    pub p: Vec<usize>,
    pub sym_n: std::ops::RangeInclusive<usize>,
    /// Largest even `k` for the Sym² scan (which starts at 4).
    pub sym_k_max: usize,
}

impl Default for ScanRanges {
    fn default() -> Self {
        Self { n: 4..=200, k: 2..=100, p: vec![1, 2, 3], sym_n: 7..=200, sym_k_max: 100 }
    }
}

/// δ₁, δ₂ decreasing in `k` and increasing in `p`; δ′₂ decreasing in `k`.
pub fn monotonicity_scan(ranges: &ScanRanges) -> MonotonicityReport {
    let mut checked = 0;
    let mut violations = Vec::new();
    let mut flag = |ok: bool, function: &str, n, k, p| {
        checked += 1;
        if !ok {
            violations.push(Violation { function: function.into(), n, k, p });
        }
    };
    let (k_lo, k_hi) = (*ranges.k.start().max(&2), *ranges.k.end());
    for n in ranges.n.clone().filter(|&n| n >= 3) {
        for &p in ranges.p.iter().filter(|&&p| p >= 1) {
            for k in k_lo..k_hi {
                let d1 = (delta1(n, k, p), delta1(n, k + 1, p));
                let d2 = (delta2(n, k, p), delta2(n, k + 1, p));
                flag(matches!(d1, (Ok(a), Ok(b)) if b < a), "delta1 decreasing in k", n, k, p);
                flag(matches!(d2, (Ok(a), Ok(b)) if b < a), "delta2 decreasing in k", n, k, p);
            }
            for k in k_lo..=k_hi {
                let d1 = (delta1(n, k, p), delta1(n, k, p + 1));
                let d2 = (delta2(n, k, p), delta2(n, k, p + 1));
                if ranges.p.contains(&(p + 1)) {
                    flag(matches!(d1, (Ok(a), Ok(b)) if b > a), "delta1 increasing in p", n, k, p);
                    flag(matches!(d2, (Ok(a), Ok(b)) if b > a), "delta2 increasing in p", n, k, p);
                }
            }
        }
    }
    for n in ranges.sym_n.clone().filter(|&n| n >= 3) {
        for k in (4..ranges.sym_k_max).step_by(2) {
            let d = (delta2_sym(n, k), delta2_sym(n, k + 2));
            flag(matches!(d, (Ok(a), Ok(b)) if b < a), "delta2_sym decreasing in k", n, k, 2);
        }
    }
    MonotonicityReport { checked, violations }
}
