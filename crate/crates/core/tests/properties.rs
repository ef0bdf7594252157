use approx::assert_relative_eq;
use proptest::prelude::*;
use std::f64::consts::PI;
use warpflow::curvature::{extremal_sectional, SearchConfig, SearchMode};
use warpflow::ode::{bound_check, closed_form, integrate, RiccatiProblem};
use warpflow::pointpick::{find_seed, hop_bound, pick, pick_bounds, verify_pick, SpaceTimeField};
use warpflow::stencil::fornberg_weights;
use warpflow::*;

fn bump_field(centers: &[(f64, f64, f64)]) -> SpaceTimeField<f64> {
    let times: Vec<f64> = (1..=40).map(|j| j as f64 * 0.05).collect();
    let nodes: Vec<f64> = (0..80).map(|i| i as f64 * 0.05).collect();
    SpaceTimeField::synthetic(times, nodes, 3, |x, t| {
        centers
            .iter()
            .fold(1.0, |acc, &(c, tc, h)| acc + h * (-((x - c) / 0.2).powi(2) - ((t - tc) / 0.3).powi(2)).exp())
    })
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn riccati_trajectories_stay_in_comparison_band(c in 0.0f64..3.0, t in 0.0f64..1.0) {
        let a0 = -c + t * (2.0 * c + 5.0);
        let tr = integrate(&RiccatiProblem::new(c, a0, 0.0).unwrap(), 4.0, 0.05).unwrap();
        prop_assert!(!tr.blew_up());
        prop_assert!(bound_check(&tr, c, a0));
        let exact = closed_form(c, a0).unwrap();
        for (&r, &a) in tr.r.iter().zip(&tr.a) {
            prop_assert!((a - exact.eval(r).unwrap()).abs() <= 1e-8);
        }
    }

    #[test]
    fn riccati_blowup_radius(c in 0.0f64..3.0, extra in 0.05f64..5.0) {
        let a0 = -c - extra;
        let exact = closed_form(c, a0).unwrap();
        let r0 = exact.blowup_radius().unwrap();
        let tr = integrate(&RiccatiProblem::new(c, a0, 0.0).unwrap(), r0 + 1.0, 0.05).unwrap();
        prop_assert!((tr.blowup.unwrap() - r0).abs() <= 1e-3);
    }

    #[test]
    fn complex_minimum_never_exceeds_real_minimum(seed in 0u64..10_000, dim in 2usize..=5) {
        let op: CurvatureOperator64 = random_bianchi_tensor(seed, dim).unwrap();
        let cfg = SearchConfig { samples: 64, refine_iters: 400, seed };
        let real = extremal_sectional(&op, SearchMode::Real, &cfg).unwrap();
        let complex = extremal_sectional(&op, SearchMode::Complex, &cfg).unwrap();
        prop_assert!(real.value >= complex.value - 1e-8);
    }

    #[test]
    fn sectionals_respect_pinching_bound(seed in 0u64..10_000, dim in 2usize..=5, u in prop::collection::vec(-1.0f64..1.0, 5), v in prop::collection::vec(-1.0f64..1.0, 5)) {
        let op: CurvatureOperator64 = random_bianchi_tensor(seed, dim).unwrap();
        let cfg = SearchConfig { samples: 64, refine_iters: 400, seed };
        let c = extremal_sectional(&op, SearchMode::Real, &cfg).unwrap().value;
        let bound = pinching_upper_bound(c, op.scal(), dim).unwrap();
        if let Ok(sec) = op.sectional(&u[..dim], &v[..dim]) {
            prop_assert!(sec <= bound + 1e-8);
        }
    }

    #[test]
    fn curvature_scales_inverse_quadratically(k in 0.1f64..10.0, node in 0usize..33) {
        let p: WarpProfile64 = exact_profile(&ExactKind::Sphere, &ExactParams::new(33, 4, (0.0, PI))).unwrap().without_analytic();
        let c = warped_curvature(&p, node).unwrap();
        let d = warped_curvature(&p.rescale(k).unwrap(), node).unwrap();
        for (x, y) in c.op_spectrum.iter().zip(&d.op_spectrum) {
            assert_relative_eq!(x / (k * k), *y, max_relative = 1e-12);
        }
    }

    #[test]
    fn picks_verify_and_survive_rescaling(
        centers in prop::collection::vec((0.5f64..3.5, 0.5f64..2.0, 5.0f64..400.0), 1..4),
        k in 1u32..3,
        lambda in 0.25f64..16.0,
    ) {
        let field = bump_field(&centers);
        if let Some(seed) = find_seed(&field, k).unwrap() {
            let r = pick(&field, k, seed).unwrap();
            prop_assert!(r.verified);
            prop_assert!(verify_pick(&field, &r).is_empty());
            prop_assert!((r.trace.len() as f64) <= hop_bound(&field, &r));
            if let Ok(b) = pick_bounds(&field, &r) {
                prop_assert!(b.hold());
            }
            let scaled = field.parabolic_rescale(lambda).unwrap();
            let seed2 = find_seed(&scaled, k).unwrap();
            if let Some(seed2) = seed2.filter(|s| (s.node, s.time) == (seed.node, seed.time)) {
                let r2 = pick(&scaled, k, seed2).unwrap();
                prop_assert_eq!((r2.picked.node, r2.picked.time), (r.picked.node, r.picked.time));
            }
        }
    }

    #[test]
    fn fornberg_first_derivative_exact_on_quartics(h in 0.01f64..1.0, c in prop::collection::vec(-2.0f64..2.0, 5)) {
        let xs: Vec<f64> = (-2..=2).map(|i| i as f64 * h * (1.0 + 0.1 * i as f64)).collect();
        let w = fornberg_weights(0.0, &xs, 1);
        let f = |x: f64| c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci);
        let d: f64 = w[1].iter().zip(&xs).map(|(wi, &x)| wi * f(x)).sum();
        prop_assert!((d - c[1]).abs() <= 1e-9 * (1.0 + c[1].abs()) / h);
    }
}

#[test]
fn f32_instantiation_tracks_f64() {
    let p32: WarpProfile32 = exact_profile(&ExactKind::Hyperbolic, &ExactParams::new(65, 3, (0.0f32, 2.0))).unwrap();
    let p64: WarpProfile64 = exact_profile(&ExactKind::Hyperbolic, &ExactParams::new(65, 3, (0.0, 2.0))).unwrap();
    for i in [0, 10, 40] {
        let (a, b) = (warped_curvature(&p32, i).unwrap(), warped_curvature(&p64, i).unwrap());
        assert!((a.scal as f64 - b.scal).abs() < 1e-4);
    }
}
