use super::*;
use crate::flow::{exact_profile, ExactKind, ExactParams};
use std::f64::consts::PI;

fn model(kind: ExactKind<f64>, nodes: usize, dim: usize, extent: (f64, f64)) -> WarpProfile<f64> {
    exact_profile(&kind, &ExactParams::new(nodes, dim, extent)).unwrap()
}

/// Largest deviation of every operator eigenvalue from `k` over nodes with curvature.
fn max_deviation(profile: &WarpProfile<f64>, k: f64) -> f64 {
    curvature_field(profile)
        .unwrap()
        .iter()
        .flatten()
        .flat_map(|c| c.op_spectrum.iter().map(move |&v| (v - k).abs()))
        .fold(0.0, f64::max)
}

#[test]
fn analytic_models_have_constant_curvature() {
    for dim in 2..=5 {
        assert!(max_deviation(&model(ExactKind::Hyperbolic, 65, dim, (0.0, 3.0)), -1.0) < 1e-10);
        assert!(max_deviation(&model(ExactKind::FlatCap, 65, dim, (0.0, 3.0)), 0.0) < 1e-10);
        assert!(max_deviation(&model(ExactKind::Sphere, 65, dim, (0.0, PI)), 1.0) < 1e-10);
        assert!(max_deviation(&model(ExactKind::Cusp, 65, dim, (0.0, 3.0)), -1.0) < 1e-10);
    }
}

#[test]
fn finite_differences_converge_at_second_order() {
    let cases: [(ExactKind<f64>, (f64, f64), f64); 3] = [
        (ExactKind::Sphere, (0.0, PI), 1.0),
        (ExactKind::Hyperbolic, (0.0, 3.0), -1.0),
        (ExactKind::Cusp, (0.0, 3.0), -1.0),
    ];
    for (kind, extent, k) in cases {
        let errs: Vec<f64> = [128, 256]
            .iter()
            .map(|&n| max_deviation(&model(kind.clone(), n, 3, extent).without_analytic(), k))
            .collect();
        assert!(errs[1] <= 1e-3, "{kind:?}: {errs:?}");
        let order = (errs[0] / errs[1]).log2();
        assert!(order >= 1.9, "{kind:?}: order {order}");
    }
}

#[test]
fn scal_is_trace_of_ricci() {
    let p = model(ExactKind::Sphere, 65, 4, (0.0, PI)).without_analytic();
    for c in curvature_field(&p).unwrap().iter().flatten() {
        assert!((c.scal - c.scal_from_ricci()).abs() < 1e-12 * c.scal.abs().max(1.0));
        assert!((c.operator().scal() - c.scal).abs() < 1e-12 * c.scal.abs().max(1.0));
    }
}

#[test]
fn spectrum_multiplicities_of_flat_cap() {
    let c = warped_curvature(&model(ExactKind::FlatCap, 33, 4, (0.0, 2.0)), 10).unwrap();
    assert_eq!(c.spectrum_multiplicities(), vec![(0.0, 6)]);
}

#[test]
fn frozen_end_has_no_curvature() {
    let p = model(ExactKind::Hyperbolic, 33, 3, (0.0, 3.0)).without_analytic();
    let field = curvature_field(&p).unwrap();
    assert!(field[32].is_none());
    assert!(field[0].is_some());
    assert!(matches!(warped_curvature(&p, 32), Err(Error::StencilUnderflow { .. })));
}

#[test]
fn rescaling_scales_curvature_by_inverse_square() {
    let p = model(ExactKind::Hyperbolic, 65, 4, (0.0, 2.0));
    for k in [0.5, 3.0] {
        let q = p.rescale(k).unwrap();
        for i in [0, 7, 30] {
            let (c, d) = (warped_curvature(&p, i).unwrap(), warped_curvature(&q, i).unwrap());
            let expected = c.rescale(k).unwrap();
            for (x, y) in d.op_spectrum.iter().zip(&expected.op_spectrum) {
                assert!((x - y).abs() <= 4.0 * f64::EPSILON * y.abs().max(1.0), "{x} vs {y}");
            }
        }
    }
    assert!(matches!(p.rescale(0.0), Err(Error::NonPositiveScale(_))));
}

#[test]
fn constant_operator_matches_space_form_tensor() {
    let op = AlgebraicCurvatureOperator::constant(4, -2.0);
    let (x, y) = ([1.0, 0.5, 0.0, -1.0], [0.0, 2.0, 1.0, 0.3]);
    let (z, w) = ([0.2, -1.0, 0.7, 0.0], [1.0, 1.0, 1.0, 1.0]);
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>();
    let expected = -2.0 * (dot(&x, &w) * dot(&y, &z) - dot(&x, &z) * dot(&y, &w));
    assert!((op.riem(&x, &y, &z, &w) - expected).abs() < 1e-12);
    assert!((op.sectional(&x, &y).unwrap() + 2.0).abs() < 1e-12);
    assert!(op.sectional(&x, &x).is_err());
}

#[test]
fn random_tensors_satisfy_bianchi() {
    for seed in 0..10 {
        let op: AlgebraicCurvatureOperator<f64> = random_bianchi_tensor(seed, 2 + (seed as usize % 4)).unwrap();
        assert!(op.bianchi_residual() < 1e-12);
    }
    assert!(random_bianchi_tensor::<f64>(0, 1).is_err());
    assert_eq!(random_bianchi_tensor::<f64>(7, 4).unwrap(), random_bianchi_tensor::<f64>(7, 4).unwrap());
}

#[test]
fn complexified_real_plane_has_equal_curvature() {
    let op: AlgebraicCurvatureOperator<f64> = random_bianchi_tensor(3, 4).unwrap();
    let plane = algebraic::RealPlane::new(vec![1.0, 2.0, 0.0, -1.0], vec![0.5, 0.0, 1.0, 1.0]).unwrap();
    let real = op.sectional(&plane.u, &plane.v).unwrap();
    let complex = sec_complex(&op, &plane.complexify()).unwrap();
    assert!((real - complex).abs() < 1e-12);
}

#[test]
fn searches_find_warped_spectrum_minimum() {
    let p = model(ExactKind::Hyperbolic, 65, 4, (0.0, 2.0));
    let op = warped_curvature(&p, 20).unwrap().operator();
    let cfg = SearchConfig { samples: 64, refine_iters: 2000, seed: 1 };
    let real = extremal_sectional(&op, SearchMode::Real, &cfg).unwrap();
    let complex = extremal_sectional(&op, SearchMode::Complex, &cfg).unwrap();
    assert!((real.value + 1.0).abs() < 1e-6);
    assert!((complex.value + 1.0).abs() < 1e-6);
}

#[test]
fn pinching_bound_formula() {
    // N = 3 has three coordinate planes: C/2 - 2c.
    assert_eq!(pinching_upper_bound(-1.0, 6.0, 3).unwrap(), 5.0);
    assert!(pinching_upper_bound(0.0f64, 1.0, 1).is_err());
}
