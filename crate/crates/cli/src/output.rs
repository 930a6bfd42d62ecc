//! Number formatting, artifact writing and run manifests.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Text,
}

/// Decimal with at most 12 significant digits, trailing zeros trimmed.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-6..=15).contains(&exp) {
        return format!("{x:.11e}");
    }
    let decimals = (11 - exp).max(0) as usize;
    let s = format!("{x:.decimals$}");
    let s = if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.').to_string() } else { s };
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

/// Simple CSV table; cells are never quoted, so callers keep commas out.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Self { text: header.join(",") + "\n" }
    }

    pub fn row(&mut self, cells: &[String]) {
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    pub fn finish(self) -> String {
        self.text
    }
}

/// `{manifest, results}` document. The embedded manifest leaves out anything
/// that changes between identical runs.
pub fn report(command: &str, config: Value, seed: Option<u64>, results: impl Serialize) -> Result<String, CliError> {
    let doc = json!({
        "manifest": {
            "command": command,
            "config": config,
            "seed": seed,
            "version": env!("CARGO_PKG_VERSION"),
        },
        "results": serde_json::to_value(results)?,
    });
    Ok(serde_json::to_string_pretty(&doc)? + "\n")
}

/// Collects written files and emits the sidecar manifest.
pub struct Artifacts {
    command: String,
    config: Value,
    seed: Option<u64>,
    started: Instant,
    outputs: Vec<(PathBuf, String)>,
}

impl Artifacts {
    pub fn new(command: &str, config: Value, seed: Option<u64>) -> Self {
        Self { command: command.into(), config, seed, started: Instant::now(), outputs: Vec::new() }
    }

    pub fn write(&mut self, path: &Path, contents: &str) -> Result<(), CliError> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(path, contents)?;
        let digest = hex::encode(Sha256::digest(contents.as_bytes()));
        self.outputs.push((path.to_path_buf(), digest));
        Ok(())
    }

    /// Writes `manifest.json` next to the first artifact, or into `dir`.
    pub fn finish(self, dir: Option<&Path>) -> Result<PathBuf, CliError> {
        let dir = match dir {
            Some(d) => d.to_path_buf(),
            None => self
                .outputs
                .first()
                .and_then(|(p, _)| p.parent())
                .map(Path::to_path_buf)
                .unwrap_or_default(),
        };
        let path = dir.join("manifest.json");
        let outputs: Vec<Value> = self
            .outputs
            .iter()
            .map(|(p, h)| json!({ "path": p.display().to_string(), "sha256": h }))
            .collect();
        let doc = json!({
            "command": self.command,
            "config": self.config,
            "seed": self.seed,
            "version": env!("CARGO_PKG_VERSION"),
            "wall_clock_seconds": self.started.elapsed().as_secs_f64(),
            "outputs": outputs,
        });
        std::fs::write(&path, serde_json::to_string_pretty(&doc)? + "\n")?;
        Ok(path)
    }
}

/// Prints to stdout, or writes the artifact and its manifest under `--out`.
pub fn emit(mut artifacts: Artifacts, out: Option<&Path>, body: &str) -> Result<(), CliError> {
    match out {
        None => {
            print!("{body}");
            Ok(())
        }
        Some(path) => {
            artifacts.write(path, body)?;
            artifacts.finish(None)?;
            Ok(())
        }
    }
}
