//! The acceptance corpus: twelve end-to-end criteria with their tolerances.

use std::f64::consts::PI;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use warpflow::curvature::{
    curvature_field, extremal_sectional, pinching_upper_bound, random_bianchi_tensor, sec_complex, warped_curvature,
    AlgebraicCurvatureOperator, ComplexPlane, Rescale, SearchConfig, SearchMode, WarpProfile,
};
use warpflow::flow::{
    exact_profile, parabolic_rescale, run, volume_form_residual, ExactKind, ExactParams, FlowConfig, FlowRun, Scheme,
};
use warpflow::monitors::{
    bishop_gromov_ratios, chen_local_estimate_fit, ct_bound, distance_growth_check, petrunin_integral,
    tip_volume_ratio, tube_volume, Verdict,
};
use warpflow::ode::{bound_check, closed_form, integrate, RiccatiProblem};
use warpflow::pointpick::{find_seed, hop_bound, pick, pick_bounds, verify_pick, SpaceTimeField, SpaceTimePoint};

use crate::config::perturbed_sphere;
use crate::experiment::{default_curves, log_slope};

#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl std::fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "criterion {:>2} {:<28} {}  ({:.2} s)  {}",
            self.id,
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.elapsed.as_secs_f64(),
            self.detail
        )
    }
}

pub const CRITERIA: [(u8, &str); 12] = [
    (1, "curvature exactness"),
    (2, "einstein flow benchmark"),
    (3, "volume-form identity"),
    (4, "distance growth"),
    (5, "riccati comparison"),
    (6, "complex vs real sectional"),
    (7, "pinching bound"),
    (8, "scaling laws"),
    (9, "point-picking"),
    (10, "cusp and bishop-gromov"),
    (11, "petrunin integral"),
    (12, "ct bound and chen estimate"),
];

type Outcome = Result<(bool, String), String>;

pub fn run_criterion(id: u8) -> CriterionResult {
    let name = CRITERIA.iter().find(|c| c.0 == id).map_or("unknown", |c| c.1);
    let start = Instant::now();
    let outcome: Outcome = match id {
        1 => curvature_exactness(),
        2 => einstein_benchmark(),
        3 => volume_form_identity(),
        4 => distance_growth(),
        5 => riccati(),
        6 => complex_vs_real(),
        7 => pinching(),
        8 => scaling_laws(),
        9 => point_picking(),
        10 => cusp_and_bishop_gromov(),
        11 => petrunin(),
        12 => ct_and_chen(),
        _ => Err(format!("no criterion {id}")),
    };
    let elapsed = start.elapsed();
    let (passed, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
    CriterionResult { id, name, passed, detail, elapsed }
}

pub fn run_all() -> Vec<CriterionResult> {
    CRITERIA.iter().map(|&(id, _)| run_criterion(id)).collect()
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn model(kind: &ExactKind<f64>, nodes: usize, dim: usize, extent: (f64, f64)) -> Result<WarpProfile<f64>, String> {
    exact_profile(kind, &ExactParams::new(nodes, dim, extent)).map_err(err)
}

/// Largest deviation of any operator eigenvalue from `k`.
fn max_deviation(profile: &WarpProfile<f64>, k: f64) -> Result<f64, String> {
    Ok(curvature_field(profile)
        .map_err(err)?
        .iter()
        .flatten()
        .flat_map(|c| c.op_spectrum.iter().map(move |&v| (v - k).abs()))
        .fold(0.0, f64::max))
}

/// A profile, its constant curvature and a label.
type Model = (WarpProfile<f64>, f64, &'static str);

fn curvature_exactness() -> Outcome {
    let models = |dim: usize| -> Result<Vec<Model>, String> {
        Ok(vec![
            (model(&ExactKind::Hyperbolic, 257, dim, (0.0, 4.0))?, -1.0, "hyperbolic"),
            (model(&ExactKind::FlatCap, 257, dim, (0.0, 4.0))?, 0.0, "flat"),
            (model(&ExactKind::Sphere, 257, dim, (0.0, PI))?, 1.0, "sphere"),
            (model(&ExactKind::Cusp, 257, dim, (0.0, 4.0))?, -1.0, "cusp"),
        ])
    };
    let mut analytic = 0.0f64;
    for dim in 2..=5 {
        for (p, k, _) in models(dim)? {
            analytic = analytic.max(max_deviation(&p, k)?);
        }
    }
    let mut ok = analytic <= 1e-10;
    let mut detail = format!("analytic max err {analytic:.1e}");
    for (kind, extent, k, label) in [
        (ExactKind::Sphere, (0.0, PI), 1.0, "sphere"),
        (ExactKind::Hyperbolic, (0.0, 4.0), -1.0, "hyperbolic"),
        (ExactKind::Cusp, (0.0, 4.0), -1.0, "cusp"),
    ] {
        let coarse = max_deviation(&model(&kind, 128, 3, extent)?.without_analytic(), k)?;
        let fine = max_deviation(&model(&kind, 256, 3, extent)?.without_analytic(), k)?;
        let order = (coarse / fine).log2();
        ok &= fine <= 1e-3 && order >= 1.9;
        detail.push_str(&format!("; {label} fd err {fine:.2e} order {order:.2}"));
    }
    let flat = max_deviation(&model(&ExactKind::FlatCap, 256, 3, (0.0, 4.0))?.without_analytic(), 0.0)?;
    ok &= flat <= 1e-3;
    detail.push_str(&format!("; flat fd err {flat:.1e}"));
    Ok((ok, detail))
}

struct TimedRun {
    run: FlowRun<f64>,
    elapsed: Duration,
}

fn timed_run(profile: &WarpProfile<f64>, config: &FlowConfig<f64>) -> Result<TimedRun, String> {
    let start = Instant::now();
    let run = run(config, profile).map_err(err)?;
    Ok(TimedRun { run, elapsed: start.elapsed() })
}

fn cached(
    cell: &'static OnceLock<Result<TimedRun, String>>,
    make: fn() -> Result<TimedRun, String>,
) -> Result<&'static TimedRun, String> {
    cell.get_or_init(make).as_ref().map_err(Clone::clone)
}

const BENCH_T: f64 = 0.2;

fn sphere_run(nodes: usize) -> Result<TimedRun, String> {
    let p = model(&ExactKind::Sphere, nodes, 3, (0.0, PI))?;
    timed_run(&p, &FlowConfig::new(Scheme::Rk4, 0.2, BENCH_T, 100).map_err(err)?)
}

fn sphere_256() -> Result<&'static TimedRun, String> {
    static CELL: OnceLock<Result<TimedRun, String>> = OnceLock::new();
    cached(&CELL, || sphere_run(256))
}

fn sphere_128() -> Result<&'static TimedRun, String> {
    static CELL: OnceLock<Result<TimedRun, String>> = OnceLock::new();
    cached(&CELL, || sphere_run(128))
}

fn hyperbolic_257() -> Result<&'static TimedRun, String> {
    static CELL: OnceLock<Result<TimedRun, String>> = OnceLock::new();
    cached(&CELL, || {
        let p = model(&ExactKind::Hyperbolic, 257, 3, (0.0, 8.0))?;
        timed_run(&p, &FlowConfig::new(Scheme::Rk4, 0.2, BENCH_T, 100).map_err(err)?)
    })
}

/// Max relative error of `b²(t)/b²(0)` against `factor` on valid nodes.
fn scaling_error(run: &FlowRun<f64>, factor: f64) -> f64 {
    let first = &run.snapshots[0].profile;
    let last = &run.snapshots[run.snapshots.len() - 1].profile;
    (0..first.len())
        .filter(|&i| run.valid[i] && first.b()[i] > 0.0)
        .map(|i| ((last.b()[i] / first.b()[i]).powi(2) / factor - 1.0).abs())
        .fold(0.0, f64::max)
}

fn einstein_benchmark() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for (label, timed, factor) in
        [("sphere", sphere_256()?, 1.0 - 4.0 * BENCH_T), ("hyperbolic", hyperbolic_257()?, 1.0 + 4.0 * BENCH_T)]
    {
        let run = &timed.run;
        let complete = run.status == warpflow::flow::RunStatus::Completed && run.stop_time == BENCH_T;
        let e = scaling_error(run, factor);
        let secs = timed.elapsed.as_secs_f64();
        ok &= complete && e <= 1e-3 && secs < 30.0;
        detail.push(format!("{label} b² err {e:.2e} in {secs:.2} s"));
    }
    Ok((ok, detail.join("; ")))
}

fn volume_form_identity() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for (label, timed) in [("sphere", sphere_256()?), ("hyperbolic", hyperbolic_257()?)] {
        let h = timed.run.snapshots[0].profile.min_spacing();
        let worst = volume_form_residual(&timed.run)
            .map_err(err)?
            .iter()
            .map(|r| r.relative / (r.dt * r.dt + h * h))
            .fold(0.0, f64::max);
        ok &= worst <= 5.0;
        detail.push(format!("{label} residual/(dt²+h²) ≤ {worst:.3}"));
    }
    Ok((ok, detail.join("; ")))
}

fn corpus_runs() -> Result<Vec<(&'static str, FlowRun<f64>)>, String> {
    let cfg = |t: f64| FlowConfig::new(Scheme::Rk4, 0.2, t, 50).map_err(err);
    let mut out = vec![("sphere N=3", sphere_256()?.run.clone()), ("hyperbolic N=3", hyperbolic_257()?.run.clone())];
    let extra: Vec<(&'static str, WarpProfile<f64>, f64)> = vec![
        ("sphere N=4", model(&ExactKind::Sphere, 96, 4, (0.0, PI))?, 0.1),
        ("flat cap N=3", model(&ExactKind::FlatCap, 129, 3, (0.0, 6.0))?, 0.2),
        ("perturbed sphere N=3", model(&perturbed_sphere(0.3), 96, 3, (0.0, PI))?, 0.1),
        ("cusp N=3", model(&ExactKind::Cusp, 129, 3, (0.0, 8.0))?, 0.2),
        ("cusp N=2", model(&ExactKind::Cusp, 129, 2, (0.0, 8.0))?, 0.2),
    ];
    for (label, p, t) in extra {
        out.push((label, run(&cfg(t)?, &p).map_err(err)?));
    }
    Ok(out)
}

fn distance_growth() -> Outcome {
    let mut applicable = 0;
    let mut ok = true;
    let mut detail = Vec::new();
    for (label, run) in corpus_runs()? {
        let report = distance_growth_check(&run, &default_curves(&run)).map_err(err)?;
        match report.verdict {
            Verdict::NotApplicable => detail.push(format!("{label}: n/a")),
            v => {
                applicable += 1;
                ok &= v == Verdict::Pass;
                detail.push(format!(
                    "{label}: {} (max L/bound {:.6})",
                    if v == Verdict::Pass { "ok" } else { "FAIL" },
                    report.value("max_length_over_bound").unwrap_or(f64::NAN)
                ));
            }
        }
    }
    Ok((ok && applicable > 0, format!("{applicable} applicable runs; {}", detail.join(", "))))
}

fn riccati() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst_diff = 0.0f64;
    let mut band_failures = 0;
    for _ in 0..1000 {
        let c: f64 = rng.random_range(0.0..=3.0);
        let a0: f64 = rng.random_range(-c..=c + 5.0);
        let tr = integrate(&RiccatiProblem::new(c, a0, 0.0).map_err(err)?, 5.0, 0.05).map_err(err)?;
        if !bound_check(&tr, c, a0) {
            band_failures += 1;
        }
        let exact = closed_form(c, a0).map_err(err)?;
        for (&r, &a) in tr.r.iter().zip(&tr.a) {
            let e = exact.eval(r).ok_or("closed form undefined on a bounded branch")?;
            worst_diff = worst_diff.max((a - e).abs());
        }
    }
    let mut worst_radius = 0.0f64;
    let mut missed = 0;
    for _ in 0..100 {
        let c: f64 = rng.random_range(0.0..=3.0);
        let a0 = -c - rng.random_range(0.01..=5.0);
        let r0 = closed_form(c, a0).map_err(err)?.blowup_radius().ok_or("no closed-form blow-up")?;
        let tr = integrate(&RiccatiProblem::new(c, a0, 0.0).map_err(err)?, r0 + 1.0, 0.05).map_err(err)?;
        match tr.blowup {
            Some(r) => worst_radius = worst_radius.max((r - r0).abs()),
            None => missed += 1,
        }
    }
    let ok = band_failures == 0 && worst_diff <= 1e-8 && missed == 0 && worst_radius <= 1e-3;
    Ok((
        ok,
        format!("band failures {band_failures}/1000, max |A - closed form| {worst_diff:.1e}, blow-ups missed {missed}/100, max radius err {worst_radius:.1e}"),
    ))
}

const DENSE_SAMPLES: usize = 100_000;

fn gaussian_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

/// Dense random sampling of real sectional curvatures.
fn dense_real(op: &AlgebraicCurvatureOperator<f64>, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let n = op.dim();
    (0..DENSE_SAMPLES)
        .filter_map(|_| op.sectional(&gaussian_vec(&mut rng, n), &gaussian_vec(&mut rng, n)).ok())
        .collect()
}

fn dense_complex_min(op: &AlgebraicCurvatureOperator<f64>, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xc0ffee);
    let n = op.dim();
    let mut min = f64::INFINITY;
    for _ in 0..DENSE_SAMPLES {
        let mut cv = || -> Vec<Complex<f64>> {
            let re = gaussian_vec(&mut rng, n);
            let im = gaussian_vec(&mut rng, n);
            re.into_iter().zip(im).map(|(a, b)| Complex::new(a, b)).collect()
        };
        let (u, v) = (cv(), cv());
        if let Some(s) = ComplexPlane::new(u, v).ok().and_then(|p| sec_complex(op, &p).ok()) {
            min = min.min(s);
        }
    }
    min
}

struct TensorCase {
    op: AlgebraicCurvatureOperator<f64>,
    real_min: f64,
    complex_min: f64,
    samples: Vec<f64>,
    dense_complex: f64,
}

fn tensor_cases() -> Result<&'static [TensorCase], String> {
    static CELL: OnceLock<Result<Vec<TensorCase>, String>> = OnceLock::new();
    CELL.get_or_init(|| {
        (0..100u64)
            .map(|seed| {
                let dim = 2 + (seed as usize % 4);
                let op = random_bianchi_tensor(seed, dim).map_err(err)?;
                let cfg = SearchConfig { samples: 256, refine_iters: 2000, seed };
                let real_min = extremal_sectional(&op, SearchMode::Real, &cfg).map_err(err)?.value;
                let complex_min = extremal_sectional(&op, SearchMode::Complex, &cfg).map_err(err)?.value;
                let samples = dense_real(&op, seed);
                let dense_complex = dense_complex_min(&op, seed);
                Ok(TensorCase { op, real_min, complex_min, samples, dense_complex })
            })
            .collect()
    })
    .as_deref()
    .map_err(Clone::clone)
}

fn complex_vs_real() -> Outcome {
    let cases = tensor_cases()?;
    let mut ordering = 0;
    let mut real_oracle = 0;
    let mut complex_oracle = 0;
    for c in cases {
        ordering += usize::from(c.real_min < c.complex_min - 1e-8);
        let dense = c.samples.iter().copied().fold(f64::INFINITY, f64::min);
        real_oracle += usize::from(c.real_min > dense + 1e-8);
        complex_oracle += usize::from(c.complex_min > c.dense_complex + 1e-8);
    }
    let mut warped_err = 0.0f64;
    for (kind, extent) in
        [(ExactKind::Hyperbolic, (0.0, 3.0)), (ExactKind::Sphere, (0.0, PI)), (perturbed_sphere(0.3), (0.0, PI))]
    {
        for dim in 3..=5 {
            let p = model(&kind, 65, dim, extent)?;
            for node in [5, 20, 40] {
                let pc = warped_curvature(&p, node).map_err(err)?;
                let op = pc.operator();
                let cfg = SearchConfig { samples: 128, refine_iters: 2000, seed: node as u64 };
                for mode in [SearchMode::Real, SearchMode::Complex] {
                    let v = extremal_sectional(&op, mode, &cfg).map_err(err)?.value;
                    warped_err = warped_err.max((v - pc.min_eigenvalue()).abs());
                }
            }
        }
    }
    let ok = ordering == 0 && real_oracle == 0 && complex_oracle == 0 && warped_err <= 1e-6;
    Ok((
        ok,
        format!(
            "real < complex - 1e-8 on {ordering}/100; search above dense oracle: real {real_oracle}, complex {complex_oracle}; warped spectrum err {warped_err:.1e}"
        ),
    ))
}

fn pinching() -> Outcome {
    let mut violations = 0;
    let mut margin = f64::INFINITY;
    for c in tensor_cases()? {
        let bound = pinching_upper_bound(c.real_min, c.op.scal(), c.op.dim()).map_err(err)?;
        for &s in &c.samples {
            violations += usize::from(s > bound + 1e-8);
            margin = margin.min(bound - s);
        }
    }
    Ok((violations == 0, format!("{violations} violations over 100 x {DENSE_SAMPLES} samples; min slack {margin:.2e}")))
}

fn scaling_laws() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut sec_err = 0.0f64;
    for seed in 0..20u64 {
        let dim = 2 + (seed as usize % 5);
        let op: AlgebraicCurvatureOperator<f64> = random_bianchi_tensor(seed, dim).map_err(err)?;
        let scale = op.matrix().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for k in [0.5, 2.0, 3.7] {
            let scaled = op.rescale(k).map_err(err)?;
            for _ in 0..10 {
                let cv = |rng: &mut ChaCha8Rng| -> Vec<Complex<f64>> {
                    (0..dim).map(|_| Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect()
                };
                let Ok(plane) = ComplexPlane::new(cv(&mut rng), cv(&mut rng)) else { continue };
                let a = sec_complex(&op, &plane).map_err(err)? / (k * k);
                let b = sec_complex(&scaled, &plane).map_err(err)?;
                sec_err = sec_err.max((a - b).abs() / (scale / (k * k)));
            }
        }
    }
    let mut spectrum_err = 0.0f64;
    let mut ratio_err = 0.0f64;
    for (kind, extent) in
        [(ExactKind::Hyperbolic, (0.0, 3.0)), (ExactKind::Sphere, (0.0, PI)), (ExactKind::FlatCap, (0.0, 3.0))]
    {
        let p = model(&kind, 257, 3, extent)?;
        for k in [0.5, 2.0] {
            let q = p.rescale(k).map_err(err)?;
            for node in [0, 50, 200] {
                let (c, d) = (warped_curvature(&p, node).map_err(err)?, warped_curvature(&q, node).map_err(err)?);
                for (x, y) in c.op_spectrum.iter().zip(&d.op_spectrum) {
                    spectrum_err = spectrum_err.max((x / (k * k) - y).abs() / x.abs().max(1.0) * k * k);
                }
            }
            for r in [0.3, 1.0, 2.0] {
                let (a, b) = (tip_volume_ratio(&p, r).map_err(err)?, tip_volume_ratio(&q, k * r).map_err(err)?);
                ratio_err = ratio_err.max((a / b - 1.0).abs());
            }
        }
    }
    // Volume ratios along a flow seen through a parabolic rescaling.
    let base = sphere_128()?;
    let q = 4.0;
    let view = parabolic_rescale(&base.run, 0.0, q, None).map_err(err)?;
    for (orig, scaled) in base.run.snapshots.iter().zip(&view.snapshots).step_by(5) {
        let (a, b) = (
            tip_volume_ratio(&orig.profile, 0.5).map_err(err)?,
            tip_volume_ratio(&scaled.profile, 0.5 * q.sqrt()).map_err(err)?,
        );
        ratio_err = ratio_err.max((a / b - 1.0).abs());
    }
    // Point-pick selections under parabolic rescaling.
    let mut pick_mismatch = 0;
    let mut picks = 0;
    let mut fields: Vec<SpaceTimeField<f64>> = synthetic_fields(6).into_iter().map(|(_, f)| f).collect();
    fields.push(SpaceTimeField::from_run(&near_singular_sphere()?).map_err(err)?);
    for field in &fields {
        for k in 1..=2 {
            let Some(seed) = find_seed(field, k).map_err(err)? else { continue };
            let base = pick(field, k, seed).map_err(err)?;
            for lambda in [0.25, 9.0] {
                let scaled = field.parabolic_rescale(lambda).map_err(err)?;
                let seed2 = find_seed(&scaled, k).map_err(err)?;
                let same = match seed2 {
                    Some(s) => {
                        let r = pick(&scaled, k, s).map_err(err)?;
                        (r.seed.node, r.seed.time, r.picked.node, r.picked.time)
                            == (base.seed.node, base.seed.time, base.picked.node, base.picked.time)
                    }
                    None => false,
                };
                picks += 1;
                pick_mismatch += usize::from(!same);
            }
        }
    }
    let ok = sec_err <= 1e-14 && spectrum_err <= 1e-12 && ratio_err <= 1e-10 && pick_mismatch == 0 && picks > 0;
    Ok((
        ok,
        format!(
            "sec^c rel err {sec_err:.1e}; spectrum err {spectrum_err:.1e}; volume ratio err {ratio_err:.1e}; pick mismatches {pick_mismatch}/{picks}"
        ),
    ))
}

/// Seeded fields built from space-time bumps over a unit background.
fn synthetic_fields(count: usize) -> Vec<(u64, SpaceTimeField<f64>)> {
    (0..count as u64)
        .map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed + 900);
            let horizon = [0.5, 2.0, 4.0][seed as usize % 3];
            let bumps: Vec<(f64, f64, f64, f64)> = (0..rng.random_range(1..=4))
                .map(|_| {
                    (
                        rng.random_range(0.5..3.5),
                        rng.random_range(0.3..1.0) * horizon,
                        10f64.powf(rng.random_range(0.5..3.0)),
                        rng.random_range(0.05..0.4),
                    )
                })
                .collect();
            let times: Vec<f64> = (1..=40).map(|j| horizon * j as f64 / 40.0).collect();
            let nodes: Vec<f64> = (0..81).map(|i| i as f64 * 0.05).collect();
            let field = SpaceTimeField::synthetic(times, nodes, 3, |x, t| {
                bumps.iter().fold(1.0, |acc, &(c, tc, h, w)| {
                    acc + h * (-((x - c) / w).powi(2) - ((t - tc) / (0.15 * horizon)).powi(2)).exp()
                })
            })
            .expect("synthetic field is well formed");
            (seed, field)
        })
        .collect()
}

fn near_singular_sphere() -> Result<FlowRun<f64>, String> {
    let p = model(&ExactKind::Sphere, 64, 3, (0.0, PI))?;
    run(&FlowConfig::new(Scheme::Rk4, 0.2, 0.245, 20).map_err(err)?, &p).map_err(err)
}

/// Every admissible seed `scal > 4^k / t` of the field.
fn admissible_seeds(field: &SpaceTimeField<f64>, k: u32) -> Vec<SpaceTimePoint<f64>> {
    let bound = 4f64.powi(k as i32);
    let mut out = Vec::new();
    for (time, &t) in field.times().iter().enumerate() {
        for node in 0..field.node_count() {
            let scal = field.scal(node, time);
            if t > 0.0 && scal > bound / t {
                out.push(SpaceTimePoint { node, time, t, scal });
            }
        }
    }
    out
}

fn point_picking() -> Outcome {
    let mut fields: Vec<(String, SpaceTimeField<f64>)> =
        synthetic_fields(24).into_iter().map(|(s, f)| (format!("synthetic {s}"), f)).collect();
    fields.push(("sphere t=0.2".into(), SpaceTimeField::from_run(&sphere_128()?.run).map_err(err)?));
    fields.push(("sphere t=0.245".into(), SpaceTimeField::from_run(&near_singular_sphere()?).map_err(err)?));
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut picks, mut rejected, mut hop_excess, mut bound_failures, mut doubling, mut eps_checked) =
        (0, 0, 0, 0, 0, 0);
    let (mut hops_total, mut max_hops, mut bounds_na) = (0, 0, 0);
    let mut synthetic_with_pick = std::collections::BTreeSet::new();
    for (label, field) in &fields {
        for k in 1..=3 {
            let mut seeds: Vec<SpaceTimePoint<f64>> = find_seed(field, k).map_err(err)?.into_iter().collect();
            let pool = admissible_seeds(field, k);
            if !pool.is_empty() {
                seeds.extend((0..8).map(|_| pool[rng.random_range(0..pool.len())]));
            }
            for seed in seeds {
                let r = pick(field, k, seed).map_err(err)?;
                picks += 1;
                if label.starts_with("synthetic") {
                    synthetic_with_pick.insert(label.clone());
                }
                hops_total += r.trace.len();
                max_hops = max_hops.max(r.trace.len());
                rejected += usize::from(!verify_pick(field, &r).is_empty() || !r.verified);
                hop_excess += usize::from(r.trace.len() as f64 > hop_bound(field, &r));
                let mut prev = r.seed.scal;
                for h in &r.trace {
                    doubling += usize::from(h.scal < 2.0 * prev);
                    prev = h.scal;
                }
                match pick_bounds(field, &r) {
                    Ok(b) => {
                        bound_failures += usize::from(!b.hold());
                        eps_checked += usize::from(b.eps_k_checked);
                    }
                    Err(warpflow::Error::NotApplicable(_)) => bounds_na += 1,
                    Err(e) => return Err(err(e)),
                }
            }
        }
    }
    let ok = synthetic_with_pick.len() >= 20
        && hops_total > 0
        && rejected == 0
        && hop_excess == 0
        && bound_failures == 0
        && doubling == 0;
    Ok((
        ok,
        format!(
            "{picks} picks on {} fields ({} synthetic with picks), {hops_total} hops (max {max_hops}); rejected {rejected}, hop-bound excess {hop_excess}, doubling failures {doubling}, bound failures {bound_failures} (ε_k checked on {eps_checked}, bounds n/a on {bounds_na})",
            fields.len(),
            synthetic_with_pick.len()
        ),
    ))
}

fn cusp_and_bishop_gromov() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for dim in 2..=4 {
        let n = (dim - 1) as f64;
        let p = model(&ExactKind::Cusp, 801, dim, (0.0, 8.0))?;
        let points: Vec<(f64, f64)> = (1..=6)
            .map(|i| {
                let r = i as f64;
                Ok((r, tube_volume(&p, p.x_at_arc_length(r).map_err(err)?, 0.5).map_err(err)?))
            })
            .collect::<Result<_, String>>()?;
        let rate = log_slope(&points);
        ok &= ((rate + n) / n).abs() <= 0.01;
        detail.push(format!("cusp N={dim} rate {rate:.4}"));
    }
    let radii: Vec<f64> = (1..=30).map(|i| 0.1 * i as f64).collect();
    let hyp = bishop_gromov_ratios(&model(&ExactKind::Hyperbolic, 1025, 3, (0.0, 4.0))?, &radii).map_err(err)?;
    let series = &hyp.series["ratio"];
    let dev = series.iter().map(|&(_, v)| (v - 1.0).abs()).fold(0.0, f64::max);
    ok &= hyp.verdict == Verdict::Pass && dev <= 1e-9;
    detail.push(format!("hyperbolic ratio |1 - r| ≤ {dev:.1e}"));
    for (label, p) in [
        ("flat", model(&ExactKind::FlatCap, 513, 3, (0.0, 4.0))?),
        ("sphere", model(&ExactKind::Sphere, 513, 3, (0.0, PI))?),
    ] {
        let r = bishop_gromov_ratios(&p, &radii).map_err(err)?;
        let s = &r.series["ratio"];
        let strict = s.windows(2).all(|w| w[1].1 < w[0].1);
        ok &= r.verdict == Verdict::Pass && strict;
        detail.push(format!("{label} strictly decreasing: {strict}"));
    }
    Ok((ok, detail.join("; ")))
}

fn petrunin() -> Outcome {
    let exact = -6.0 * PI * (2f64.sinh() - 2.0);
    let hyp = petrunin_integral(&model(&ExactKind::Hyperbolic, 257, 3, (0.0, 3.0))?).map_err(err)?;
    let rel = (hyp / exact - 1.0).abs();
    let sphere = petrunin_integral(&model(&ExactKind::Sphere, 257, 3, (0.0, PI))?).map_err(err)?;
    let corpus = [
        ("hyperbolic", hyp),
        ("flat", petrunin_integral(&model(&ExactKind::FlatCap, 257, 3, (0.0, 3.0))?).map_err(err)?),
        ("perturbed sphere", petrunin_integral(&model(&perturbed_sphere(0.3), 257, 3, (0.0, PI))?).map_err(err)?),
    ];
    let ordered = corpus.iter().all(|&(_, v)| v <= sphere);
    let values: Vec<String> = corpus.iter().map(|(l, v)| format!("{l} {v:.6}")).collect();
    Ok((rel <= 1e-6 && ordered, format!("hyperbolic rel err {rel:.1e}; {}; sphere {sphere:.6}", values.join(", "))))
}

fn ct_and_chen() -> Outcome {
    let fine = &sphere_256()?.run;
    let coarse = &sphere_128()?.run;
    let sup = ct_bound(fine, None).map_err(err)?.value("sup_t_scal").ok_or("missing sup_t_scal")?;
    let c_fine = chen_local_estimate_fit(fine, 0.0, 1.0).map_err(err)?;
    let c_coarse = chen_local_estimate_fit(coarse, 0.0, 1.0).map_err(err)?;
    let (a, b) =
        (c_fine.value("fitted_c").ok_or("missing fitted_c")?, c_coarse.value("fitted_c").ok_or("missing fitted_c")?);
    let stable = a.is_finite() && b.is_finite() && (a / b - 1.0).abs() <= 0.1;
    let ok = ((sup - 6.0) / 6.0).abs() <= 0.01 && c_fine.verdict == Verdict::Pass && stable;
    Ok((ok, format!("sup t·scal {sup:.5}; chen C {a:.4} (256) vs {b:.4} (128)")))
}
