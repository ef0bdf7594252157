use super::*;
use crate::flow::{exact_profile, run, ExactKind, ExactParams, FlowConfig, Scheme};
use std::f64::consts::PI;

fn model(kind: ExactKind<f64>, nodes: usize, dim: usize, extent: (f64, f64)) -> WarpProfile<f64> {
    exact_profile(&kind, &ExactParams::new(nodes, dim, extent)).unwrap()
}

fn sphere_run(nodes: usize, t_end: f64) -> FlowRun<f64> {
    let p = model(ExactKind::Sphere, nodes, 3, (0.0, PI));
    run(&FlowConfig::new(Scheme::Rk4, 0.2, t_end, 50).unwrap(), &p).unwrap()
}

#[test]
fn hyperbolic_ball_volume_closed_forms() {
    for r in [0.1f64, 1.0, 2.5] {
        let v3 = hyperbolic_ball_volume(3, r).unwrap();
        let exact3 = PI * ((2.0 * r).sinh() - 2.0 * r);
        assert!((v3 / exact3 - 1.0).abs() < 1e-10);
        let v2 = hyperbolic_ball_volume(2, r).unwrap();
        assert!((v2 / (2.0 * PI * (r.cosh() - 1.0)) - 1.0).abs() < 1e-10);
    }
    assert!(hyperbolic_ball_volume(1, 1.0f64).is_err());
}

#[test]
fn flat_ball_volume() {
    let p = model(ExactKind::FlatCap, 257, 3, (0.0, 3.0));
    let v = tip_ball_volume(&p, 1.3).unwrap();
    assert!((v / (4.0 / 3.0 * PI * 1.3f64.powi(3)) - 1.0).abs() < 1e-10);
    assert!((tip_volume_ratio(&p, 2.0).unwrap() - 4.0 / 3.0 * PI).abs() < 1e-9);
}

#[test]
fn bishop_gromov_on_model_caps() {
    let radii: Vec<f64> = (1..=20).map(|i| 0.15 * i as f64).collect();
    let hyp = bishop_gromov_ratios(&model(ExactKind::Hyperbolic, 1025, 3, (0.0, 4.0)), &radii).unwrap();
    assert!(hyp.passed());
    assert!((hyp.value("max_ratio").unwrap() - 1.0).abs() < 1e-9);
    assert!((hyp.value("min_ratio").unwrap() - 1.0).abs() < 1e-9);
    for p in [model(ExactKind::FlatCap, 513, 3, (0.0, 4.0)), model(ExactKind::Sphere, 513, 3, (0.0, PI))] {
        let r = bishop_gromov_ratios(&p, &radii).unwrap();
        assert!(r.passed());
        let ratios = &r.series["ratio"];
        assert!(ratios.windows(2).all(|w| w[1].1 < w[0].1));
    }
    let cusp = model(ExactKind::Cusp, 65, 3, (0.0, 3.0));
    assert!(matches!(bishop_gromov_ratios(&cusp, &radii), Err(Error::NotCapped(_))));
}

#[test]
fn petrunin_integral_of_hyperbolic_caps() {
    let p3 = model(ExactKind::Hyperbolic, 257, 3, (0.0, 3.0));
    let exact3 = -6.0 * PI * (2f64.sinh() - 2.0);
    assert!((petrunin_integral(&p3).unwrap() / exact3 - 1.0).abs() < 1e-6);
    let p2 = model(ExactKind::Hyperbolic, 257, 2, (0.0, 3.0));
    let exact2 = -2.0 * 2.0 * PI * (1f64.cosh() - 1.0);
    assert!((petrunin_integral(&p2).unwrap() / exact2 - 1.0).abs() < 1e-6);
    let report = petrunin_report(&p3).unwrap();
    assert_eq!(report.verdict, Verdict::ReportOnly);
    assert!(report.hypotheses_held());
}

#[test]
fn cusp_tube_volume_decays_exponentially() {
    let p = model(ExactKind::Cusp, 801, 3, (0.0, 8.0));
    let w = 0.5;
    for r in [1.0f64, 4.0] {
        let exact = 4.0 * PI * PI * ((-2.0 * (r - w)).exp() - (-2.0 * (r + w)).exp()) / 2.0;
        assert!((tube_volume(&p, r, w).unwrap() / exact - 1.0).abs() < 1e-8);
    }
}

#[test]
fn distance_growth_on_shrinking_sphere() {
    let run = sphere_run(48, 0.1);
    let curves = [CurveSpec::FiberLoop { x_at: 1.0 }, CurveSpec::Radial { x_from: 0.5, x_to: 2.0 }];
    let report = distance_growth_check(&run, &curves).unwrap();
    assert!(report.passed());
    assert!(report.value("max_log_growth_rate").unwrap() < 0.0);
    let outside = [CurveSpec::Radial { x_from: -1.0, x_to: 1.0 }];
    assert!(distance_growth_check(&run, &outside).is_err());
}

#[test]
fn ct_bound_on_shrinking_sphere() {
    // t · scal = 6t / (1 - 4t) on the round S³.
    let run = sphere_run(48, 0.1);
    let report = ct_bound(&run, Some(1.01)).unwrap();
    assert!(report.passed());
    assert!((report.value("sup_t_scal").unwrap() - 1.0).abs() < 1e-2);
    assert_eq!(ct_bound(&run, Some(0.5)).unwrap().verdict, Verdict::Fail);
    assert_eq!(ct_bound(&run, None).unwrap().verdict, Verdict::ReportOnly);
}

#[test]
fn volume_persistence_on_shrinking_sphere() {
    let run = sphere_run(48, 0.1);
    let report = volume_persistence_check(&run, (0.8, 2.3), 0.0, 1.0).unwrap();
    assert!(report.passed());
    assert_eq!(report.series["tip_ball_volume"].len(), run.snapshots.len());
    let eps = report.value("epsilon").unwrap();
    assert!(eps > 0.0 && eps <= 0.5);
    // d/dt vol = -6 vol on the unit sphere; the fitted slope sees it.
    let v0 = report.value("v0").unwrap();
    assert!(report.value("fitted_slope").unwrap() > 5.0 * v0 * 0.5);
    assert_eq!(volume_persistence_check(&run, (0.8, 2.3), 7.0, 1.0).unwrap().verdict, Verdict::NotApplicable);
}

#[test]
fn chen_fit_on_shrinking_sphere() {
    let run = sphere_run(64, 0.2);
    let report = chen_local_estimate_fit(&run, PI / 2.0, 1.0).unwrap();
    assert!(report.passed());
    let c = report.value("fitted_c").unwrap();
    assert!((c - 5f64.ln()).abs() < 0.05 * 5f64.ln(), "{c}");
    let too_big = chen_local_estimate_fit(&run, PI / 2.0, 1.5).unwrap();
    assert_eq!(too_big.verdict, Verdict::NotApplicable);
}
