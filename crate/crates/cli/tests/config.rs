use warpflow::flow::Scheme;
use warpflow_cli::config::{MonitorSpec, ProfileSpec};
use warpflow_cli::{parse_config, serialize_config, CliError};

const MINIMAL: &str = r#"{
  "name": "s",
  "profile": { "kind": "sphere", "nodes": 64, "dim": 3 },
  "flow": { "t_end": 0.1 }
}"#;

#[test]
fn defaults_fill_in() {
    let c = parse_config(MINIMAL).unwrap();
    assert_eq!(c.version, 1);
    assert_eq!(c.flow.scheme, Scheme::Rk4);
    assert_eq!(c.flow.cfl, 0.2);
    assert_eq!(c.flow.snapshot_every, 100);
    assert_eq!(c.seed, 0);
    assert!(c.monitors.is_empty() && c.pointpick.is_none() && c.output.is_none());
    assert_eq!(c.profile, ProfileSpec::Sphere { nodes: 64, dim: 3, curvature: 1.0 });
}

#[test]
fn unknown_key_is_named_with_position() {
    let text = MINIMAL.replace(r#""t_end": 0.1"#, r#""t_end": 0.1, "cflx": 0.3"#);
    match parse_config(&text) {
        Err(CliError::Config { line, message, .. }) => {
            assert_eq!(line, 4);
            assert!(message.contains("cflx"), "{message}");
        }
        other => panic!("expected a config error, got {other:?}"),
    }
}

#[test]
fn unknown_monitor_kind_rejected() {
    let text = MINIMAL.replace(r#""flow""#, r#""monitors": [{ "kind": "bogus" }], "flow""#);
    assert!(matches!(parse_config(&text), Err(CliError::Config { .. })));
}

#[test]
fn serialized_config_parses_back() {
    let text = r#"{
      "name": "cusp-run",
      "profile": { "kind": "cusp", "nodes": 129, "dim": 3, "extent": [0.0, 6.0] },
      "flow": { "scheme": "explicit_euler", "cfl": 0.1, "t_end": 0.05, "snapshot_every": 20 },
      "monitors": [
        { "kind": "tube_volume", "radii": [1, 2, 3], "half_width": 0.5, "expected_rate": -2.0 },
        { "kind": "volume_persistence", "scal_floor": -6.0 },
        { "kind": "chen_local", "r0": 1.0 }
      ],
      "pointpick": { "k": 2 },
      "seed": 11,
      "output": "out"
    }"#;
    let c = parse_config(text).unwrap();
    assert_eq!(parse_config(&serialize_config(&c)).unwrap(), c);
    match &c.monitors[1] {
        MonitorSpec::VolumePersistence { ball_radius, region, .. } => {
            assert_eq!(*ball_radius, std::f64::consts::E);
            assert!(region.is_none());
        }
        m => panic!("unexpected monitor {m:?}"),
    }
}

#[test]
fn semantic_validation() {
    let newer = MINIMAL.replacen('{', r#"{ "version": 2,"#, 1);
    assert!(matches!(parse_config(&newer), Err(CliError::UnsupportedVersion { .. })));
    let path_name = MINIMAL.replace(r#""name": "s""#, r#""name": "../escape""#);
    assert!(matches!(parse_config(&path_name), Err(CliError::InvalidConfig(_))));
    let bad_cfl = MINIMAL.replace(r#""t_end": 0.1"#, r#""t_end": 0.1, "cfl": 0.0"#);
    assert!(parse_config(&bad_cfl).is_err());
    let bad_k = MINIMAL.replace(r#""flow""#, r#""pointpick": { "k": 0 }, "flow""#);
    assert!(matches!(parse_config(&bad_k), Err(CliError::InvalidConfig(_))));
}
