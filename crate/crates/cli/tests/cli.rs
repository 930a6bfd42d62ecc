use std::path::PathBuf;
use std::process::{Command, Output};

fn pinchlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pinchlab")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("pinchlab-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn threshold_table_csv() {
    let o = pinchlab(&["thresholds", "--n-min", "3", "--n-max", "134"]);
    assert!(o.status.success());
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows[0], ["n", "case", "delta", "binding_branch", "lit_even", "lit_78", "conjecture"]);
    let row = |n: usize| rows.iter().find(|r| r[0] == n.to_string()).unwrap().clone();
    for (n, digits) in [(4, "0.2928"), (6, "0.2823"), (7, "0.4962"), (8, "0.6212"), (10, "0.2725"), (12, "0.5948"), (134, "0.5788")] {
        assert!(row(n)[2].starts_with(digits), "n = {n}: {}", row(n)[2]);
    }
    assert_eq!(&row(9)[1..3], ["unconditional", "0"]);
    assert_eq!(row(4)[4], "0.8649");
    assert_eq!(row(8)[5], "0.9805");
    assert_eq!(row(8)[4], "");
    assert!(rows[1..].iter().all(|r| r[6] == "0.25"));
}

#[test]
fn threshold_table_json_is_deterministic() {
    let a = pinchlab(&["thresholds", "--n-min", "4", "--n-max", "8", "--format", "json"]);
    let b = pinchlab(&["thresholds", "--n-min", "4", "--n-max", "8", "--format", "json"]);
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["manifest"]["command"], "thresholds");
    assert_eq!(v["results"].as_array().unwrap().len(), 5);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(pinchlab(&["thresholds", "--n-min", "9", "--n-max", "4"]).status.code(), Some(2));
    assert_eq!(pinchlab(&["eval", "--n", "4", "--delta", "1.5"]).status.code(), Some(2));
    assert_eq!(pinchlab(&["verify", "everything"]).status.code(), Some(2));
    assert_eq!(pinchlab(&["sharpness", "--n", "4", "--weights", "third"]).status.code(), Some(2));
    assert_eq!(pinchlab(&["classify"]).status.code(), Some(2));
}

#[test]
fn classify_and_eval() {
    let o = pinchlab(&["classify", "--n", "8"]);
    let text = stdout(&o);
    assert!(text.contains("2 case(s)") && text.contains("G2") && text.contains("rank <= 3"), "{text}");

    assert!(stdout(&pinchlab(&["eval", "--n", "4", "--delta", "0.3"])).contains("Ergodic"));
    let text = stdout(&pinchlab(&["eval", "--n", "8", "--delta", "0.5"]));
    assert!(text.contains("Inconclusive"), "{text}");

    let o = pinchlab(&["eval", "--n", "9", "--delta", "0.01", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["results"]["verdict"]["verdict"], "Ergodic");
}

#[test]
fn figure_artifacts() {
    let dir = scratch_dir("figure");
    let o = pinchlab(&["figure", "--out", dir.to_str().unwrap()]);
    assert!(o.status.success());
    let csv = std::fs::read_to_string(dir.join("thresholds.csv")).unwrap();
    let rows = csv_rows(&csv);
    assert!(rows.iter().filter(|r| r[0] == "conjecture").all(|r| r[2] == "0.25"));
    let at134 = rows.iter().find(|r| r[0] == "new" && r[1] == "134").unwrap();
    assert!(at134[2].starts_with("0.5788"));
    let neighbours: Vec<f64> = rows
        .iter()
        .filter(|r| r[0] == "new" && (r[1] == "130" || r[1] == "138"))
        .map(|r| r[2].parse().unwrap())
        .collect();
    assert!(neighbours.iter().all(|&d| d < 0.3));

    let svg = std::fs::read_to_string(dir.join("thresholds.svg")).unwrap();
    let series: std::collections::BTreeSet<&str> = rows[1..].iter().map(|r| r[0].as_str()).collect();
    assert_eq!(svg.matches("<polyline").count(), series.len());
    assert!(svg.starts_with("<?xml") && svg.trim_end().ends_with("</svg>"));

    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap();
    let outputs = manifest["outputs"].as_array().unwrap();
    assert_eq!(outputs.len(), 2);
    assert!(outputs.iter().all(|o| o["sha256"].as_str().unwrap().len() == 64));
    assert!(manifest["wall_clock_seconds"].is_number());
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn verify_suites() {
    let o = pinchlab(&["verify", "curvature", "--seed", "3"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["results"]["passed"], true);
    let max = v["results"]["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "centered remainder sharpness")
        .unwrap()["detail"]["max_abs"]
        .as_f64()
        .unwrap();
    assert!((0.49..=0.5 + 1e-9).contains(&max));

    let o = pinchlab(&["verify", "monotonicity"]);
    assert!(o.status.success());
}

#[test]
fn verify_identities_in_double_mode() {
    let o = Command::new(env!("CARGO_BIN_EXE_pinchlab"))
        .args(["verify", "identities", "--format", "csv"])
        .env("PINCHLAB_MODE", "double")
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(csv_rows(&stdout(&o))[1..].iter().all(|r| r[1] == "true"));

    let bad = Command::new(env!("CARGO_BIN_EXE_pinchlab"))
        .args(["verify", "identities"])
        .env("PINCHLAB_MODE", "quad")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn sharpness_is_reproducible() {
    let args = ["sharpness", "--n", "3", "--restarts", "2", "--iters", "3", "--mc-samples", "2000", "--seed", "5"];
    let a = pinchlab(&args);
    let b = pinchlab(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["manifest"]["seed"], 5);
    assert_eq!(v["results"]["trace"].as_array().unwrap().len(), 2);

    let dir = scratch_dir("sharpness");
    let out = dir.join("result.json");
    let trace = dir.join("trace.csv");
    let o = pinchlab(&[&args[..], &["--out", out.to_str().unwrap(), "--trace", trace.to_str().unwrap()]].concat());
    assert!(o.status.success());
    assert!(stdout(&o).contains("c_estimate"));
    assert_eq!(std::fs::read(&out).unwrap(), a.stdout);
    assert_eq!(csv_rows(&std::fs::read_to_string(&trace).unwrap()).len(), 3);
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["outputs"].as_array().unwrap().len(), 2);
    std::fs::remove_dir_all(dir).unwrap();
}
