use std::f64::consts::PI;

use proptest::prelude::*;
use warpflow::flow::{exact_profile, run, ExactKind, ExactParams, FlowConfig, FlowState, Scheme};
use warpflow::pointpick::SpaceTimeField;
use warpflow_cli::formats::{read_field, read_state, state_to_string, write_field};
use warpflow_cli::CliError;

fn sphere_state() -> FlowState<f64> {
    let p = exact_profile(&ExactKind::Sphere, &ExactParams::new(33, 3, (0.0, PI))).unwrap();
    let r = run(&FlowConfig::new(Scheme::Rk4, 0.2, 0.05, 10).unwrap(), &p).unwrap();
    r.snapshots.last().unwrap().clone()
}

#[test]
fn snapshot_reload_is_bit_exact() {
    let state = sphere_state();
    let text = state_to_string(&state);
    let back = read_state(text.as_bytes()).unwrap();
    assert_eq!(back.t.to_bits(), state.t.to_bits());
    for i in 0..state.profile.len() {
        assert_eq!(back.profile.b()[i].to_bits(), state.profile.b()[i].to_bits());
        assert_eq!(back.profile.a()[i].to_bits(), state.profile.a()[i].to_bits());
        assert_eq!(back.slope[i].to_bits(), state.slope[i].to_bits());
    }
    assert_eq!(state_to_string(&back), text);
}

#[test]
fn slope_column_is_optional() {
    let text = state_to_string(&sphere_state());
    let stripped: String = text
        .lines()
        .enumerate()
        .map(|(i, l)| if i == 0 { format!("{l}\n") } else { format!("{}\n", l.rsplit_once(',').unwrap().0) })
        .collect();
    let back = read_state(stripped.as_bytes()).unwrap();
    assert_eq!(back.slope.len(), back.profile.len());
    assert!(back.slope.iter().all(|u| u.is_finite()));
}

#[test]
fn newer_major_rejected() {
    let text = state_to_string(&sphere_state()).replacen("\"1.0\"", "\"2.0\"", 1);
    assert!(matches!(read_state(text.as_bytes()), Err(CliError::UnsupportedVersion { .. })));
}

#[test]
fn truncated_field_rejected() {
    let f = SpaceTimeField::synthetic(vec![0.1, 0.2], vec![0.0, 1.0, 2.0], 3, |x, t| x + t).unwrap();
    let mut buf = Vec::new();
    write_field(&mut buf, &f).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let cut = text.trim_end().rsplit_once('\n').unwrap().0;
    assert!(matches!(read_field(cut.as_bytes()), Err(CliError::Format { .. })));
}

proptest! {
    #[test]
    fn field_reload_is_exact(vals in prop::collection::vec(-1e6f64..1e6, 12), dim in 2usize..6) {
        let f = SpaceTimeField::synthetic(vec![0.25, 0.5, 1.0], vec![0.0, 0.3, 0.7, 1.5], dim, |x, t| {
            vals[(x * 10.0) as usize % 4 + 4 * ((t * 4.0) as usize % 3)]
        }).unwrap();
        let mut buf = Vec::new();
        write_field(&mut buf, &f).unwrap();
        prop_assert_eq!(read_field(buf.as_slice()).unwrap(), f);
    }
}
