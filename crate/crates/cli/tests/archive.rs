use std::path::Path;

use warpflow_cli::{parse_config, read_archive, run_experiment, write_archive, CliError, ExperimentConfig};

fn config(name: &str) -> ExperimentConfig {
    parse_config(&format!(
        r#"{{
          "name": "{name}",
          "profile": {{ "kind": "sphere", "nodes": 48, "dim": 3 }},
          "flow": {{ "t_end": 0.2, "snapshot_every": 200 }},
          "monitors": [{{ "kind": "volume_form" }}, {{ "kind": "distance_growth" }}, {{ "kind": "ct_bound" }}],
          "pointpick": {{ "k": 1 }},
          "seed": 4
        }}"#
    ))
    .unwrap()
}

fn write(dir: &Path) -> warpflow_cli::RunArchive {
    write_archive(&run_experiment(&config("det")).unwrap(), dir).unwrap()
}

#[test]
fn identical_configs_give_identical_archives() {
    let tmp = tempfile::tempdir().unwrap();
    let a = write(&tmp.path().join("a"));
    let b = write(&tmp.path().join("b"));
    assert_eq!(a.manifest.content_hash, b.manifest.content_hash);
    assert_eq!(a.manifest.files, b.manifest.files);
    for rel in a.manifest.files.keys() {
        assert_eq!(std::fs::read(a.path(rel)).unwrap(), std::fs::read(b.path(rel)).unwrap(), "{rel}");
    }
    assert!(a.manifest.snapshots.len() >= 2);
}

#[test]
fn reading_verifies_and_restores() {
    let tmp = tempfile::tempdir().unwrap();
    let written = write(tmp.path());
    let read = read_archive(tmp.path()).unwrap();
    assert_eq!(read.manifest.config_hash, written.manifest.config_hash);
    assert_eq!(read.config().unwrap(), config("det"));
    let outcomes = read.monitor_outcomes().unwrap();
    assert_eq!(outcomes.len(), 3);
    assert!(outcomes.iter().all(|m| !m.failed()));
    assert!(read.pick().unwrap().is_some());
    let series = read.series().unwrap();
    assert!(series.contains_key("max_scal"));
}

#[test]
fn tampering_is_detected() {
    let tmp = tempfile::tempdir().unwrap();
    let archive = write(tmp.path());
    let snap = archive.path(&archive.manifest.snapshots[1]);
    let text = std::fs::read_to_string(&snap).unwrap();
    std::fs::write(&snap, text.replacen("0.", "1.", 1)).unwrap();
    match read_archive(tmp.path()) {
        Err(CliError::HashMismatch(file)) => assert_eq!(file, archive.manifest.snapshots[1]),
        other => panic!("expected hash mismatch, got {other:?}"),
    }
}

#[test]
fn newer_manifest_version_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path());
    let path = tmp.path().join("manifest.json");
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::write(&path, text.replace("\"format_version\": \"1.0\"", "\"format_version\": \"3.1\"")).unwrap();
    assert!(matches!(read_archive(tmp.path()), Err(CliError::UnsupportedVersion { .. })));
}

#[test]
fn foreign_directories_are_left_alone() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(tmp.path().join("notes.txt"), "keep").unwrap();
    let outcome = run_experiment(&config("det")).unwrap();
    assert!(matches!(write_archive(&outcome, tmp.path()), Err(CliError::InvalidConfig(_))));
    assert_eq!(std::fs::read_to_string(tmp.path().join("notes.txt")).unwrap(), "keep");
    // An existing archive is replaced.
    let dir = tmp.path().join("run");
    write_archive(&outcome, &dir).unwrap();
    write_archive(&outcome, &dir).unwrap();
    read_archive(&dir).unwrap();
}
