//! On-disk run archives: manifest, config, snapshots, series and reports.
//!
//! ```text
//! <dir>/manifest.json        versioned manifest with per-file SHA-256
//! <dir>/config.json          the experiment config as run
//! <dir>/snapshots/NNNNNN.csv one profile per snapshot
//! <dir>/series.jsonl         flow diagnostics, one record per snapshot time
//! <dir>/monitors/NN_name.json
//! <dir>/field.csv, pointpick.json   when point-picking was requested
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use warpflow::flow::RunStatus;

use crate::config::{parse_config, serialize_config, ExperimentConfig, FORMAT_VERSION};
use crate::error::{CliError, Result};
use crate::experiment::{ExperimentOutcome, MonitorOutcome, PickAudit};
use crate::formats::{check_version, state_to_string, write_field};

pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonitorEntry {
    pub name: String,
    pub status: String,
    pub file: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format_version: String,
    pub name: String,
    /// SHA-256 of the canonical config serialization.
    pub config_hash: String,
    pub created_unix: u64,
    pub run_status: RunStatus,
    pub stop_time: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop_reason: Option<String>,
    pub steps: usize,
    pub snapshots: Vec<String>,
    pub monitors: Vec<MonitorEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pointpick: Option<String>,
    /// Relative path to SHA-256 of every payload file.
    pub files: BTreeMap<String, String>,
    /// SHA-256 over the sorted `path  hash` lines of `files`.
    pub content_hash: String,
}

#[derive(Debug, Clone)]
pub struct RunArchive {
    pub dir: PathBuf,
    pub manifest: Manifest,
}

impl RunArchive {
    pub fn path(&self, rel: &str) -> PathBuf {
        self.dir.join(rel)
    }

    pub fn config(&self) -> Result<ExperimentConfig> {
        parse_config(&read_text(&self.path("config.json"))?)
    }

    pub fn monitor_outcomes(&self) -> Result<Vec<MonitorOutcome>> {
        self.manifest
            .monitors
            .iter()
            .map(|m| serde_json::from_str(&read_text(&self.path(&m.file))?).map_err(|e| CliError::format(&m.file, e)))
            .collect()
    }

    pub fn pick(&self) -> Result<Option<PickAudit>> {
        match &self.manifest.pointpick {
            None => Ok(None),
            Some(_) => {
                let text = read_text(&self.path("pointpick.json"))?;
                Ok(Some(serde_json::from_str(&text).map_err(|e| CliError::format("pointpick.json", e))?))
            }
        }
    }

    /// Flow diagnostics as `(name → [(t, value)])`.
    pub fn series(&self) -> Result<BTreeMap<String, Vec<(f64, f64)>>> {
        let mut out: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
        for (n, line) in read_text(&self.path("series.jsonl"))?.lines().enumerate() {
            let record: BTreeMap<String, f64> = serde_json::from_str(line)
                .map_err(|e| CliError::format("series.jsonl", format!("line {}: {e}", n + 1)))?;
            let t = *record.get("t").ok_or_else(|| CliError::format("series.jsonl", "record without t"))?;
            for (k, v) in record {
                if k != "t" {
                    out.entry(k).or_default().push((t, v));
                }
            }
        }
        Ok(out)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn config_hash(config: &ExperimentConfig) -> String {
    sha256_hex(serde_json::to_string(config).expect("config serializes").as_bytes())
}

fn content_hash(files: &BTreeMap<String, String>) -> String {
    let listing: String = files.iter().map(|(p, h)| format!("{p}  {h}\n")).collect();
    sha256_hex(listing.as_bytes())
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

struct Writer {
    dir: PathBuf,
    files: BTreeMap<String, String>,
}

impl Writer {
    fn put(&mut self, rel: &str, bytes: &[u8]) -> Result<()> {
        let path = self.dir.join(rel);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
        }
        std::fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
        self.files.insert(rel.to_string(), sha256_hex(bytes));
        Ok(())
    }
}

/// Replaces an existing archive at `dir`; refuses to write into a non-empty
/// directory that is not an archive.
fn prepare_dir(dir: &Path) -> Result<()> {
    if dir.exists() {
        let mut entries = std::fs::read_dir(dir).map_err(|e| CliError::io(dir, e))?;
        if dir.join(MANIFEST).exists() {
            std::fs::remove_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        } else if entries.next().is_some() {
            return Err(CliError::InvalidConfig(format!("{} exists and is not a run archive", dir.display())));
        }
    }
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

fn series_jsonl(outcome: &ExperimentOutcome) -> String {
    let run = &outcome.run;
    let mut out = String::new();
    for (j, t) in run.times().iter().enumerate() {
        let mut record = serde_json::Map::new();
        record.insert("t".into(), serde_json::json!(t));
        for (name, values) in &run.series {
            if let Some(&(_, v)) = values.get(j) {
                record.insert(name.clone(), serde_json::json!(v));
            }
        }
        out.push_str(&serde_json::Value::Object(record).to_string());
        out.push('\n');
    }
    out
}

pub fn write_archive(outcome: &ExperimentOutcome, dir: &Path) -> Result<RunArchive> {
    prepare_dir(dir)?;
    let mut w = Writer { dir: dir.to_path_buf(), files: BTreeMap::new() };
    w.put("config.json", serialize_config(&outcome.config).as_bytes())?;
    let mut snapshots = Vec::with_capacity(outcome.run.snapshots.len());
    for (j, state) in outcome.run.snapshots.iter().enumerate() {
        let rel = format!("snapshots/{j:06}.csv");
        w.put(&rel, state_to_string(state).as_bytes())?;
        snapshots.push(rel);
    }
    w.put("series.jsonl", series_jsonl(outcome).as_bytes())?;
    let mut monitors = Vec::new();
    for (idx, m) in outcome.monitors.iter().enumerate() {
        let rel = format!("monitors/{idx:02}_{}.json", m.name());
        let text = serde_json::to_string_pretty(m).expect("report serializes");
        w.put(&rel, text.as_bytes())?;
        let message = match m {
            MonitorOutcome::Error { message, .. } => Some(message.clone()),
            MonitorOutcome::Report(_) => None,
        };
        monitors.push(MonitorEntry { name: m.name().into(), status: m.status().into(), file: rel, message });
    }
    if let Some(field) = &outcome.field {
        let mut buf = Vec::new();
        write_field(&mut buf, field)?;
        w.put("field.csv", &buf)?;
    }
    let pointpick = match &outcome.pick {
        Some(audit) => {
            w.put("pointpick.json", serde_json::to_string_pretty(audit).expect("audit serializes").as_bytes())?;
            Some(crate::experiment::verdict_name(audit.verdict).to_string())
        }
        None => None,
    };
    let created_unix =
        std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let run = &outcome.run;
    let manifest = Manifest {
        format_version: FORMAT_VERSION.into(),
        name: outcome.config.name.clone(),
        config_hash: config_hash(&outcome.config),
        created_unix,
        run_status: run.status,
        stop_time: run.stop_time,
        stop_reason: run.stop_reason.clone(),
        steps: run.steps,
        snapshots,
        monitors,
        pointpick,
        content_hash: content_hash(&w.files),
        files: w.files,
    };
    let path = dir.join(MANIFEST);
    std::fs::write(&path, serde_json::to_string_pretty(&manifest).expect("manifest serializes"))
        .map_err(|e| CliError::io(&path, e))?;
    Ok(RunArchive { dir: dir.to_path_buf(), manifest })
}

/// Loads an archive after checking the version and every file hash.
pub fn read_archive(dir: &Path) -> Result<RunArchive> {
    let text = read_text(&dir.join(MANIFEST))?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| CliError::format(MANIFEST, e))?;
    let version = value
        .get("format_version")
        .and_then(|v| v.as_str())
        .ok_or_else(|| CliError::format(MANIFEST, "missing format_version"))?;
    check_version(version)?;
    let manifest: Manifest = serde_json::from_value(value).map_err(|e| CliError::format(MANIFEST, e))?;
    for (rel, expected) in &manifest.files {
        let path = dir.join(rel);
        let bytes = std::fs::read(&path).map_err(|e| CliError::io(&path, e))?;
        if &sha256_hex(&bytes) != expected {
            return Err(CliError::HashMismatch(rel.clone()));
        }
    }
    if content_hash(&manifest.files) != manifest.content_hash {
        return Err(CliError::HashMismatch("content_hash".into()));
    }
    let archive = RunArchive { dir: dir.to_path_buf(), manifest };
    if config_hash(&archive.config()?) != archive.manifest.config_hash {
        return Err(CliError::HashMismatch("config_hash".into()));
    }
    Ok(archive)
}
