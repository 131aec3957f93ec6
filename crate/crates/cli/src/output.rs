//! Output directory with atomic (temp + rename) writes, record schemas and
//! the run manifest.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use gevrey_flow::engine::{RayStatus, RayTrajectory};
use gevrey_flow::NormReport;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};

pub struct OutputDir {
    root: PathBuf,
    written: Vec<String>,
}

impl OutputDir {
    pub fn create(root: &Path) -> CliResult<Self> {
        fs::create_dir_all(root).map_err(|e| CliError::io(root, e))?;
        Ok(Self { root: root.to_path_buf(), written: Vec::new() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> CliResult<()> {
        let target = self.root.join(name);
        let tmp = self.root.join(format!(".{name}.tmp"));
        let mut f = fs::File::create(&tmp).map_err(|e| CliError::io(&tmp, e))?;
        f.write_all(bytes).and_then(|_| f.sync_all()).map_err(|e| CliError::io(&tmp, e))?;
        fs::rename(&tmp, &target).map_err(|e| CliError::io(&target, e))?;
        self.written.push(name.to_string());
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> CliResult<()> {
        let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| CliError::Input(e.to_string()))?;
        bytes.push(b'\n');
        self.write_bytes(name, &bytes)
    }

    /// Writes the manifest last; it lists every file written before it.
    pub fn finish(mut self, command: &str, config: &RunConfig, seeds: BTreeMap<String, u64>) -> CliResult<Vec<String>> {
        let mut outputs = self.written.clone();
        outputs.sort();
        let manifest = Manifest {
            tool: "gevrey-flow".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config_sha256: config_hash(config),
            config: config.clone(),
            seeds,
            outputs,
        };
        self.write_json("manifest.json", &manifest)?;
        Ok(self.written)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config_sha256: String,
    /// Merged configuration (file plus flags); the output location is left out.
    pub config: RunConfig,
    pub seeds: BTreeMap<String, u64>,
    pub outputs: Vec<String>,
}

pub fn config_hash(config: &RunConfig) -> String {
    let bytes = serde_json::to_vec(config).expect("config serializes");
    hex::encode(Sha256::digest(&bytes))
}

/// One JSONL line per trajectory sample.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleRecord {
    pub model: String,
    pub theta: f64,
    pub s: f64,
    pub beta_effective: f64,
    pub norms: BTreeMap<String, NormReport>,
    pub combined: f64,
    pub rejections: u32,
    /// `running` on every sample but the last, which carries the ray's
    /// terminal status.
    pub status: String,
}

pub fn trajectory_jsonl(t: &RayTrajectory) -> CliResult<Vec<u8>> {
    let mut out = Vec::new();
    let last = t.samples.len().saturating_sub(1);
    for (i, sample) in t.samples.iter().enumerate() {
        let rec = SampleRecord {
            model: t.model.name().into(),
            theta: t.theta,
            s: sample.s,
            beta_effective: sample.beta_effective,
            norms: t.members.iter().cloned().zip(sample.norms.iter().cloned()).collect(),
            combined: sample.combined,
            rejections: sample.rejections,
            status: if i == last { t.status.name().into() } else { "running".into() },
        };
        serde_json::to_writer(&mut out, &rec).map_err(|e| CliError::Input(e.to_string()))?;
        out.push(b'\n');
    }
    Ok(out)
}

const STATUSES: [&str; 5] = ["running", "completed", "blown_up", "radius_exhausted", "failed"];

/// Checks one JSONL line against the record schema.
pub fn validate_record(line: &str) -> Result<SampleRecord, String> {
    let rec: SampleRecord = serde_json::from_str(line).map_err(|e| e.to_string())?;
    if !STATUSES.contains(&rec.status.as_str()) {
        return Err(format!("unknown status {:?}", rec.status));
    }
    if !(rec.s >= 0.0) || !rec.theta.is_finite() || !rec.beta_effective.is_finite() {
        return Err("s, theta and beta_effective must be finite with s >= 0".into());
    }
    if rec.norms.is_empty() {
        return Err("norms is empty".into());
    }
    for (name, n) in &rec.norms {
        let vals = [n.l2, n.sobolev_r, n.gevrey, n.gevrey_quarter, n.wiener];
        if vals.iter().any(|v| !(*v >= 0.0)) {
            return Err(format!("norms.{name} has a negative or missing entry"));
        }
    }
    Ok(rec)
}

/// Re-reads a JSONL file and validates every line; samples must increase in
/// `s` and only the last may carry a terminal status.
pub fn validate_jsonl(path: &Path) -> CliResult<usize> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut prev = f64::NEG_INFINITY;
    let lines: Vec<&str> = text.lines().collect();
    for (i, line) in lines.iter().enumerate() {
        let rec = validate_record(line)
            .map_err(|e| CliError::Input(format!("{}:{}: {e}", path.display(), i + 1)))?;
        if rec.s <= prev {
            return Err(CliError::Input(format!("{}:{}: s does not increase", path.display(), i + 1)));
        }
        if (rec.status == "running") == (i + 1 == lines.len()) {
            return Err(CliError::Input(format!("{}:{}: misplaced status {:?}", path.display(), i + 1, rec.status)));
        }
        prev = rec.s;
    }
    Ok(lines.len())
}

pub fn status_label(s: &RayStatus) -> String {
    match s {
        RayStatus::Completed => "completed".into(),
        RayStatus::BlownUp { s } => format!("blown_up at s = {s}"),
        RayStatus::RadiusExhausted { s } => format!("radius_exhausted at s = {s}"),
        RayStatus::Failed { s, message } => format!("failed at s = {s}: {message}"),
    }
}
