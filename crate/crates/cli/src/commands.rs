use std::path::Path;

use pinchlab_core::classify::{quarter_pinching_note, structure_menu, verdict, Verdict};
use pinchlab_core::sharpness::{sharpness_search, SearchConfig, SearchResult, Weights};
use pinchlab_core::thresholds::{delta_master, exceptional_report, projector_report, vector_field_report};
use serde::Serialize;
use serde_json::json;

use crate::output::{emit, fmt_num, fmt_opt, report, Artifacts, Csv, Format};
use crate::{figure, verify, CliError, Io, Mode, SharpnessArgs, Suite};

pub const LIT_EVEN: f64 = 0.8649;
pub const LIT_78: f64 = 0.9805;
pub const CONJECTURE: f64 = 0.25;

#[derive(Debug, Clone, Serialize)]
pub struct ThresholdRow {
    pub n: usize,
    pub case: String,
    pub delta: f64,
    pub binding_branch: Option<String>,
    pub lit_even: Option<f64>,
    pub lit_78: Option<f64>,
    pub conjecture: f64,
}

pub fn threshold_row(n: usize) -> Result<ThresholdRow, CliError> {
    let m = delta_master(n)?;
    let binding = match m.case.as_str() {
        "unconditional" => None,
        "vector-field" => Some(vector_field_report(n)?.binding),
        "projector" => Some(projector_report(n)?.binding),
        _ => exceptional_report(n).map(|r| r.binding),
    };
    Ok(ThresholdRow {
        n,
        case: m.case,
        delta: m.value,
        binding_branch: binding.map(|b| b.to_string()),
        lit_even: (n % 2 == 0 && n != 8).then_some(LIT_EVEN),
        lit_78: (n == 7 || n == 8).then_some(LIT_78),
        conjecture: CONJECTURE,
    })
}

fn check_range(n_min: usize, n_max: usize) -> Result<(), CliError> {
    if n_min < 3 || n_min > n_max {
        return Err(CliError::Usage(format!("need 3 <= n-min <= n-max, got {n_min}..{n_max}")));
    }
    Ok(())
}

pub fn threshold_rows(n_min: usize, n_max: usize) -> Result<Vec<ThresholdRow>, CliError> {
    check_range(n_min, n_max)?;
    (n_min..=n_max).map(threshold_row).collect()
}

pub fn thresholds(n_min: usize, n_max: usize, io: &Io) -> Result<(), CliError> {
    let rows = threshold_rows(n_min, n_max)?;
    let config = json!({ "n_min": n_min, "n_max": n_max });
    let body = match io.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut csv = Csv::new(&["n", "case", "delta", "binding_branch", "lit_even", "lit_78", "conjecture"]);
            for r in &rows {
                csv.row(&[
                    r.n.to_string(),
                    r.case.clone(),
                    fmt_num(r.delta),
                    r.binding_branch.clone().unwrap_or_default(),
                    fmt_opt(r.lit_even),
                    fmt_opt(r.lit_78),
                    fmt_num(r.conjecture),
                ]);
            }
            csv.finish()
        }
        Format::Json => report("thresholds", config.clone(), None, &rows)?,
        Format::Text => return Err(CliError::Usage("thresholds supports csv|json".into())),
    };
    emit(Artifacts::new("thresholds", config, None), io.out.as_deref(), &body)
}

pub fn figure(n_min: usize, n_max: usize, out: &Path) -> Result<(), CliError> {
    check_range(n_min, n_max)?;
    let rows = threshold_rows(n_min, n_max)?;
    let series = figure::series(&rows);
    let mut artifacts = Artifacts::new("figure", json!({ "n_min": n_min, "n_max": n_max }), None);
    artifacts.write(&out.join("thresholds.csv"), &figure::csv(&series))?;
    artifacts.write(&out.join("thresholds.svg"), &figure::svg(&series, n_min, n_max))?;
    let manifest = artifacts.finish(Some(out))?;
    println!("wrote {}", manifest.display());
    Ok(())
}

pub fn verify(suite: Suite, seed: u64, mode: Mode, io: &Io) -> Result<(), CliError> {
    let config = json!({ "suite": suite, "mode": mode });
    let checks = verify::run(suite, seed, mode)?;
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    let body = match io.format.unwrap_or(Format::Json) {
        Format::Json => report("verify", config.clone(), Some(seed), json!({ "passed": failed.is_empty(), "checks": checks }))?,
        Format::Csv => {
            let mut csv = Csv::new(&["check", "passed"]);
            for c in &checks {
                csv.row(&[c.name.clone(), c.passed.to_string()]);
            }
            csv.finish()
        }
        Format::Text => return Err(CliError::Usage("verify supports csv|json".into())),
    };
    emit(Artifacts::new("verify", config, Some(seed)), io.out.as_deref(), &body)?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failed(failed.join(", ")))
    }
}

pub fn sharpness_config(args: &SharpnessArgs) -> Result<SearchConfig, CliError> {
    let weights: Weights = args.weights.parse()?;
    let mut cfg = SearchConfig::for_dimension(args.n);
    cfg.k = args.k;
    cfg.seed = args.seed;
    cfg.weights = weights;
    cfg.constrained = args.constrained;
    if let Some(r) = args.restarts {
        cfg.restarts = r;
    }
    if let Some(i) = args.iters {
        cfg.iterations = i;
    }
    if let Some(m) = args.mc_samples {
        cfg.mc_samples = m;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn trace_csv(result: &SearchResult) -> String {
    let mut csv = Csv::new(&["restart", "seed", "value", "best_so_far", "iterations", "converged"]);
    for t in &result.trace {
        csv.row(&[
            t.restart.to_string(),
            t.seed.to_string(),
            fmt_num(t.value),
            fmt_num(t.best_so_far),
            t.iterations.to_string(),
            t.converged.to_string(),
        ]);
    }
    csv.finish()
}

pub fn sharpness(args: &SharpnessArgs) -> Result<(), CliError> {
    let cfg = sharpness_config(args)?;
    let config = serde_json::to_value(&cfg)?;
    let mut artifacts = Artifacts::new("sharpness", config.clone(), Some(cfg.seed));
    let result = sharpness_search(&cfg)?;
    let body = match args.io.format.unwrap_or(Format::Json) {
        Format::Json => report("sharpness", config, Some(cfg.seed), &result)?,
        Format::Csv => {
            let mut csv =
                Csv::new(&["n", "k", "c_estimate", "stderr", "quotient", "delta_new", "best_restart", "seed"]);
            csv.row(&[
                result.n.to_string(),
                result.k.to_string(),
                fmt_num(result.c_estimate),
                fmt_num(result.stderr),
                fmt_num(result.quotient),
                fmt_opt(result.delta_new),
                result.best_restart.to_string(),
                result.seed.to_string(),
            ]);
            csv.finish()
        }
        Format::Text => return Err(CliError::Usage("sharpness supports csv|json".into())),
    };
    if let Some(path) = &args.trace {
        artifacts.write(path, &trace_csv(&result))?;
    }
    match &args.io.out {
        None => print!("{body}"),
        Some(path) => {
            artifacts.write(path, &body)?;
            artifacts.finish(path.parent())?;
            println!("c_estimate = {} ± {}", fmt_num(result.c_estimate), fmt_num(result.stderr));
            println!("quotient   = {}", fmt_num(result.quotient));
            println!("delta_new  = {}", fmt_opt(result.delta_new));
        }
    }
    Ok(())
}

pub fn classify(n: usize, io: &Io) -> Result<(), CliError> {
    let menu = structure_menu(n)?;
    let config = json!({ "n": n });
    let body = match io.format.unwrap_or(Format::Text) {
        Format::Text => {
            let mut s = format!("n = {n}: {} case(s)\n", menu.len());
            for c in &menu {
                s += &format!("  {}  threshold {}\n", c.label, fmt_num(c.threshold));
            }
            s
        }
        Format::Json => report("classify", config.clone(), None, &menu)?,
        Format::Csv => {
            let mut csv = Csv::new(&["n", "case", "threshold"]);
            for c in &menu {
                csv.row(&[n.to_string(), c.label.to_string().replace(',', ";"), fmt_num(c.threshold)]);
            }
            csv.finish()
        }
    };
    emit(Artifacts::new("classify", config, None), io.out.as_deref(), &body)
}

pub fn eval(n: usize, delta: f64, io: &Io) -> Result<(), CliError> {
    let v = verdict(n, delta)?;
    let note = quarter_pinching_note(n, delta);
    let config = json!({ "n": n, "delta": delta });
    let (word, cases) = match &v {
        Verdict::Ergodic { cases } => ("Ergodic", cases),
        Verdict::Inconclusive { open_cases } => ("Inconclusive", open_cases),
    };
    let body = match io.format.unwrap_or(Format::Text) {
        Format::Text => {
            let mut s = format!("n = {n}, delta = {}: {word}\n", fmt_num(delta));
            let lead = if v.is_ergodic() { "excluded" } else { "not excluded" };
            for c in cases {
                s += &format!("  {lead}: {}  threshold {}\n", c.label, fmt_num(c.threshold));
            }
            if let Some(note) = note {
                s += &format!("note: {note}\n");
            }
            s
        }
        Format::Json => report("eval", config.clone(), None, json!({ "verdict": v, "note": note }))?,
        Format::Csv => {
            let mut csv = Csv::new(&["n", "delta", "verdict"]);
            csv.row(&[n.to_string(), fmt_num(delta), word.to_string()]);
            csv.finish()
        }
    };
    emit(Artifacts::new("eval", config, None), io.out.as_deref(), &body)
}
