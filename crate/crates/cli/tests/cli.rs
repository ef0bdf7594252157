use std::process::Command;

fn warpflow() -> Command {
    Command::new(env!("CARGO_BIN_EXE_warpflow"))
}

fn write_config(dir: &std::path::Path, name: &str, body: &str) -> std::path::PathBuf {
    let path = dir.join(format!("{name}.json"));
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn simulate_and_report() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "ok",
        r#"{ "name": "ok", "profile": { "kind": "sphere", "nodes": 48, "dim": 3 },
             "flow": { "t_end": 0.1 }, "monitors": [{ "kind": "volume_form" }, { "kind": "ct_bound" }] }"#,
    );
    let out = tmp.path().join("runs");
    let status = warpflow().arg("simulate").arg(&cfg).arg("--out").arg(&out).arg("--seed").arg("9").status().unwrap();
    assert_eq!(status.code(), Some(0));
    let archived = std::fs::read_to_string(out.join("ok/config.json")).unwrap();
    assert!(archived.contains("\"seed\": 9"));

    let report = warpflow().arg("report").arg(out.join("ok")).args(["--format", "json"]).output().unwrap();
    assert_eq!(report.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&report.stdout).contains("report.json"));
}

#[test]
fn output_root_from_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "env",
        r#"{ "name": "env", "profile": { "kind": "flat_cap", "nodes": 33, "dim": 3, "extent": 2.0 }, "flow": { "t_end": 0.01 } }"#,
    );
    let root = tmp.path().join("from-env");
    let status = warpflow().arg("simulate").arg(&cfg).env("WARPFLOW_OUT", &root).status().unwrap();
    assert_eq!(status.code(), Some(0));
    assert!(root.join("env/manifest.json").exists());
}

#[test]
fn monitor_failure_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "fail",
        r#"{ "name": "fail", "profile": { "kind": "sphere", "nodes": 48, "dim": 3 },
             "flow": { "t_end": 0.1 }, "monitors": [{ "kind": "ct_bound", "known_bound": 0.1 }] }"#,
    );
    let status = warpflow().arg("simulate").arg(&cfg).arg("--out").arg(tmp.path()).status().unwrap();
    assert_eq!(status.code(), Some(1));
}

#[test]
fn usage_and_config_errors_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "bad", r#"{ "name": "bad", "flow": { "t_end": 0.1 } }"#);
    let out = warpflow().arg("simulate").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("profile"));
    assert_eq!(warpflow().arg("frobnicate").status().unwrap().code(), Some(2));
    assert_eq!(warpflow().args(["report", "/nonexistent/archive"]).status().unwrap().code(), Some(2));
    assert_eq!(warpflow().args(["bench", "--only", "13"]).status().unwrap().code(), Some(2));
}

#[test]
fn ode_reports_blowup() {
    let out = warpflow().args(["ode", "--C", "1", "--a0", "-2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let exact = 0.5 * 3f64.ln();
    assert!((v["closed_form_blowup"].as_f64().unwrap() - exact).abs() < 1e-12);
    assert!((v["integrated_blowup"].as_f64().unwrap() - exact).abs() < 1e-3);
    assert_eq!(v["bound_holds"], false);
}

#[test]
fn curvature_and_pointpick_on_archive_files() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "pp",
        r#"{ "name": "pp", "profile": { "kind": "sphere", "nodes": 48, "dim": 3 },
             "flow": { "t_end": 0.2, "snapshot_every": 50 }, "pointpick": { "k": 1 } }"#,
    );
    assert_eq!(warpflow().arg("simulate").arg(&cfg).arg("--out").arg(tmp.path()).status().unwrap().code(), Some(0));
    let snap = tmp.path().join("pp/snapshots/000000.csv");
    let out = warpflow().arg("curvature").arg(&snap).args(["--node", "10"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["min_sectional"].as_f64().unwrap() - 1.0).abs() < 1e-3);
    let table = warpflow().arg("curvature").arg(&snap).output().unwrap();
    assert_eq!(String::from_utf8_lossy(&table.stdout).lines().count(), 49);

    let out = warpflow().arg("pointpick").arg(tmp.path().join("pp/field.csv")).args(["--k", "1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["verdict"], "pass");
}
