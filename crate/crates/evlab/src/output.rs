//! CSV and JSON writers plus the run manifest.
//!
//! CSV columns are fixed:
//! `p,epsilon,observable,param,mean,std,ks_pass_fraction,reliable,escape_count`.
//! Floats are written with 17 significant digits, `p = inf` marks the
//! unperturbed map. Nothing time dependent is written unless
//! `SOURCE_DATE_EPOCH` is set, so identical runs give identical bytes.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "p,epsilon,observable,param,mean,std,ks_pass_fraction,reliable,escape_count";
pub const SCHEMA_VERSION: u32 = 1;

/// One line of a results table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub epsilon: f64,
    pub observable: String,
    pub param: String,
    pub mean: f64,
    pub std: f64,
    /// `None` for quantities without a goodness-of-fit test.
    pub ks_pass_fraction: Option<f64>,
    pub reliable: bool,
    pub escape_count: usize,
}

impl ResultRow {
    /// `−log10 ε`; infinite at `ε = 0`.
    pub fn p(&self) -> f64 {
        -self.epsilon.log10()
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// 17 significant digits in scientific notation; `inf`, `-inf`, `nan`.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

pub fn rows_to_csv(rows: &[ResultRow]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in rows {
        let ks = r.ks_pass_fraction.map(format_float).unwrap_or_default();
        writeln!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            format_float(r.p()),
            format_float(r.epsilon),
            r.observable,
            r.param,
            format_float(r.mean),
            format_float(r.std),
            ks,
            r.reliable,
            r.escape_count
        )
        .expect("writing to a string");
    }
    s
}

/// JSON number, or `null` when not finite.
pub fn json_float(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::Null
    }
}

fn row_json(r: &ResultRow) -> Value {
    json!({
        "p": json_float(r.p()),
        "epsilon": json_float(r.epsilon),
        "observable": r.observable,
        "param": r.param,
        "mean": json_float(r.mean),
        "std": json_float(r.std),
        "ks_pass_fraction": r.ks_pass_fraction.map(json_float).unwrap_or(Value::Null),
        "reliable": r.reliable,
        "escape_count": r.escape_count,
    })
}

/// A fit as JSON; non-finite numbers become `null`.
pub fn fit_json(fit: &evlab_core::evt::GevFit) -> Value {
    let arr = |v: [f64; 3]| v.iter().map(|x| json_float(*x)).collect::<Vec<_>>();
    let pair = |v: [f64; 2]| [json_float(v[0]), json_float(v[1])];
    json!({
        "kappa": json_float(fit.kappa()),
        "sigma": json_float(fit.sigma()),
        "nu": json_float(fit.nu()),
        "std_errors": arr(fit.std_errors),
        "ci95": { "kappa": pair(fit.ci.shape), "sigma": pair(fit.ci.scale), "nu": pair(fit.ci.loc) },
        "loglik": json_float(fit.loglik),
        "iterations": fit.iterations,
        "sample_size": fit.sample_size,
        "ks": fit.ks.map(|k| json!({
            "statistic": json_float(k.statistic),
            "critical": json_float(k.critical),
            "pass": k.pass,
        })),
    })
}

/// Provenance of one output directory.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub schema_version: u32,
    pub config_sha256: String,
    pub seed: u64,
    /// Seconds since the epoch, from `SOURCE_DATE_EPOCH` only.
    pub created: Option<u64>,
    pub outputs: Vec<OutputChecksum>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputChecksum {
    pub file: String,
    pub sha256: String,
}

impl RunManifest {
    pub fn new(config_sha256: String, seed: u64) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            schema_version: SCHEMA_VERSION,
            config_sha256,
            seed,
            created: std::env::var("SOURCE_DATE_EPOCH").ok().and_then(|s| s.trim().parse().ok()),
            outputs: Vec::new(),
        }
    }

    /// The manifest without output checksums, as embedded in result JSON.
    pub fn header_json(&self) -> Value {
        json!({
            "tool": self.tool,
            "version": self.version,
            "schema_version": self.schema_version,
            "config_sha256": self.config_sha256,
            "seed": self.seed,
            "created": self.created,
        })
    }
}

/// Writes files into one directory and records their checksums.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    manifest: RunManifest,
}

impl OutputDir {
    pub fn create(root: &Path, manifest: RunManifest) -> Result<Self> {
        std::fs::create_dir_all(root).map_err(|e| Error::io(root, e))?;
        Ok(Self { root: root.to_path_buf(), manifest })
    }

    pub fn manifest(&self) -> &RunManifest {
        &self.manifest
    }

    pub fn write(&mut self, name: &str, contents: &[u8]) -> Result<PathBuf> {
        debug_assert!(contents.is_ascii(), "outputs are ASCII");
        let path = self.root.join(name);
        std::fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
        self.manifest.outputs.push(OutputChecksum { file: name.into(), sha256: sha256_hex(contents) });
        Ok(path)
    }

    /// `<stem>.csv` and `<stem>.json` for one table.
    pub fn write_rows(&mut self, stem: &str, rows: &[ResultRow], extra: Value) -> Result<()> {
        self.write(&format!("{stem}.csv"), rows_to_csv(rows).as_bytes())?;
        let doc = json!({
            "manifest": self.manifest.header_json(),
            "table": stem,
            "rows": rows.iter().map(row_json).collect::<Vec<_>>(),
            "details": extra,
        });
        self.write(&format!("{stem}.json"), to_json_text(&doc).as_bytes())?;
        Ok(())
    }

    /// Writes `manifest.json` and returns it.
    pub fn finish(self) -> Result<RunManifest> {
        let text = to_json_text(&serde_json::to_value(&self.manifest).expect("manifest serializes"));
        let path = self.root.join("manifest.json");
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        Ok(self.manifest)
    }
}

/// Pretty JSON with escaped non-ASCII, newline terminated.
pub fn to_json_text(v: &Value) -> String {
    let pretty = serde_json::to_string_pretty(v).expect("value serializes");
    let mut out = String::with_capacity(pretty.len() + 1);
    for c in pretty.chars() {
        if c.is_ascii() {
            out.push(c);
        } else {
            let mut buf = [0u16; 2];
            for unit in c.encode_utf16(&mut buf) {
                write!(out, "\\u{unit:04x}").expect("writing to a string");
            }
        }
    }
    out.push('\n');
    out
}
