use super::*;
use std::f64::consts::PI;

fn sphere(nodes: usize, dim: usize) -> WarpProfile<f64> {
    exact_profile(&ExactKind::Sphere, &ExactParams::new(nodes, dim, (0.0, PI))).unwrap()
}

fn hyperbolic(nodes: usize, dim: usize, extent: f64) -> WarpProfile<f64> {
    exact_profile(&ExactKind::Hyperbolic, &ExactParams::new(nodes, dim, (0.0, extent))).unwrap()
}

fn max_scaling_error(run: &FlowRun<f64>, factor: f64) -> f64 {
    let first = &run.snapshots[0].profile;
    let last = &run.snapshots.last().unwrap().profile;
    (0..first.len())
        .filter(|&i| run.valid[i] && first.b()[i] > 0.0)
        .map(|i| ((last.b()[i] / first.b()[i]).powi(2) / factor - 1.0).abs())
        .fold(0.0, f64::max)
}

#[test]
fn flat_cap_is_stationary() {
    let p: WarpProfile<f64> = exact_profile(&ExactKind::FlatCap, &ExactParams::new(65, 4, (0.0, 3.0))).unwrap();
    let rhs = ricci_rhs(&FlowState::new(0.0, p)).unwrap();
    for v in rhs.da.iter().chain(&rhs.db).chain(&rhs.du) {
        assert!(v.abs() < 1e-10, "{v}");
    }
}

#[test]
fn einstein_rhs_is_pure_scaling() {
    // ∂t g = -2λ g with λ = ±(N-1); the slope b_s is scale invariant.
    for (p, lambda) in [(sphere(129, 3), 2.0), (hyperbolic(129, 3, 4.0), -2.0), (sphere(129, 4), 3.0)] {
        let state = FlowState::new(0.0, p);
        let rhs = ricci_rhs(&state).unwrap();
        let valid = monitor_mask(&state.profile, 0.0);
        for i in (0..state.profile.len()).filter(|&i| valid[i]) {
            let (a, b) = (state.profile.a()[i], state.profile.b()[i]);
            assert!((rhs.da[i] + lambda * a).abs() < 1e-6, "da at {i}: {}", rhs.da[i]);
            assert!((rhs.db[i] + lambda * b).abs() < 1e-6, "db at {i}: {}", rhs.db[i]);
            assert!(rhs.du[i].abs() < 1e-5, "du at {i}: {}", rhs.du[i]);
        }
    }
}

#[test]
fn sphere_shrinks_like_closed_form() {
    let cfg = FlowConfig::with_defaults(0.1).unwrap();
    let run = run(&cfg, &sphere(64, 3)).unwrap();
    assert_eq!(run.status, RunStatus::Completed);
    assert_eq!(run.stop_time, 0.1);
    assert!(max_scaling_error(&run, 1.0 - 4.0 * 0.1) < 1e-4);
}

#[test]
fn hyperbolic_expands_like_closed_form() {
    let cfg = FlowConfig::with_defaults(0.25).unwrap();
    let run = run(&cfg, &hyperbolic(129, 3, 8.0)).unwrap();
    assert_eq!(run.status, RunStatus::Completed);
    assert!(max_scaling_error(&run, 1.0 + 4.0 * 0.25) < 1e-3);
}

#[test]
fn euler_and_rk4_agree_to_first_order() {
    let p = sphere(64, 3);
    let state = FlowState::new(0.0, p);
    let dt = cfl_limit(&state, 0.2).unwrap();
    let euler = step(&state, dt, &FlowConfig::new(Scheme::ExplicitEuler, 0.2, 1.0, 1).unwrap()).unwrap();
    let rk4 = step(&state, dt, &FlowConfig::new(Scheme::Rk4, 0.2, 1.0, 1).unwrap()).unwrap();
    let diff = euler.profile.b().iter().zip(rk4.profile.b()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    assert!(diff > 0.0);
    assert!(diff < 10.0 * dt * dt, "diff {diff} dt {dt}");
    assert_eq!(rk4.t, dt);
}

#[test]
fn step_rejects_cfl_violation() {
    let state = FlowState::new(0.0, sphere(64, 3));
    let limit = cfl_limit(&state, 0.2).unwrap();
    let cfg = FlowConfig::with_defaults(1.0).unwrap();
    assert!(matches!(step(&state, 2.0 * limit, &cfg), Err(Error::CflViolation { .. })));
}

#[test]
fn config_validation() {
    assert!(FlowConfig::new(Scheme::Rk4, 0.6, 1.0, 1).is_err());
    assert!(FlowConfig::new(Scheme::Rk4, 0.2, 0.0, 1).is_err());
    assert!(FlowConfig::new(Scheme::Rk4, 0.2, 1.0, 0).is_err());
}

#[test]
fn runs_are_deterministic() {
    let cfg = FlowConfig::new(Scheme::Rk4, 0.2, 0.02, 7).unwrap();
    let a = run(&cfg, &sphere(48, 3)).unwrap();
    let b = run(&cfg, &sphere(48, 3)).unwrap();
    assert_eq!(a.snapshots, b.snapshots);
    assert_eq!(a.series, b.series);
}

#[test]
fn sphere_reaches_singularity() {
    let cfg = FlowConfig::with_defaults(0.3).unwrap();
    let run = run(&cfg, &sphere(32, 3)).unwrap();
    assert_eq!(run.status, RunStatus::StoppedSingularity);
    assert!(run.stop_reason.is_some());
    assert!(run.stop_time < 0.25 && run.stop_time > 0.24, "{}", run.stop_time);
}

#[test]
fn rescale_identity_and_composition() {
    let cfg = FlowConfig::new(Scheme::Rk4, 0.2, 0.05, 20).unwrap();
    let run = run(&cfg, &sphere(48, 3)).unwrap();
    let same = parabolic_rescale(&run, 0.0, 1.0, None).unwrap();
    assert_eq!(same.times(), run.times());
    assert_eq!(same.snapshots[2].profile.b(), run.snapshots[2].profile.b());

    let once = parabolic_rescale(&parabolic_rescale(&run, 0.02, 4.0, None).unwrap(), 0.0, 9.0, None).unwrap();
    let direct = parabolic_rescale(&run, 0.02, 36.0, None).unwrap();
    for (x, y) in once.times().iter().zip(direct.times()) {
        assert!((x - y).abs() < 1e-12);
    }
    let (bx, by) = (once.snapshots.last().unwrap().profile.b(), direct.snapshots.last().unwrap().profile.b());
    for (x, y) in bx.iter().zip(by.iter()) {
        let (x, y): (&f64, &f64) = (x, y);
        assert!((x - y).abs() < 1e-12 * y.abs().max(1.0));
    }
    assert!(matches!(parabolic_rescale(&run, 0.02, -1.0, None), Err(Error::NonPositiveScale(_))));
    assert!(parabolic_rescale(&run, 0.02, 4.0, Some((10.0, 11.0))).is_err());
}

#[test]
fn volume_residual_is_small_on_sphere() {
    let cfg = FlowConfig::new(Scheme::Rk4, 0.2, 0.1, 20).unwrap();
    let run = run(&cfg, &sphere(64, 3)).unwrap();
    let h = run.snapshots[0].profile.min_spacing();
    for r in volume_form_residual(&run).unwrap() {
        assert!(r.relative <= 5.0 * (r.dt * r.dt + h * h), "{r:?}");
    }
}

#[test]
fn mask_excludes_frozen_end() {
    let p = hyperbolic(129, 3, 8.0);
    let mask = monitor_mask(&p, 0.5);
    assert!(mask[0]);
    assert!(!mask[128]);
    let s = p.arc_length();
    let last_valid = (0..129).rev().find(|&i| mask[i]).unwrap();
    assert!(s[128] - s[last_valid] > 4.0 * 0.5f64.sqrt());
}
