//! Flow, monitors and point-picking for one configured experiment.

use serde::{Deserialize, Serialize};
use warpflow::curvature::WarpProfile;
use warpflow::flow::{run, volume_form_residual, FlowRun};
use warpflow::monitors::{
    bishop_gromov_ratios, chen_local_estimate_fit, ct_bound, distance_growth_check, petrunin_report, tube_volume,
    volume_persistence_check, CurveSpec, MonitorReport, Verdict,
};
use warpflow::pointpick::{find_seed, hop_bound, pick, pick_bounds, PickBounds, PickResult, SpaceTimeField};

use crate::config::{ExperimentConfig, MonitorSpec};
use crate::error::Result;

/// A monitor that produced a report, or the error it raised.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "outcome")]
pub enum MonitorOutcome {
    Report(MonitorReport),
    Error { name: String, message: String },
}

impl MonitorOutcome {
    pub fn name(&self) -> &str {
        match self {
            MonitorOutcome::Report(r) => &r.name,
            MonitorOutcome::Error { name, .. } => name,
        }
    }

    /// `pass`, `fail`, `not_applicable`, `report_only` or `error`.
    pub fn status(&self) -> &'static str {
        match self {
            MonitorOutcome::Report(r) => verdict_name(r.verdict),
            MonitorOutcome::Error { .. } => "error",
        }
    }

    pub fn failed(&self) -> bool {
        matches!(
            self,
            MonitorOutcome::Error { .. } | MonitorOutcome::Report(MonitorReport { verdict: Verdict::Fail, .. })
        )
    }
}

pub fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "pass",
        Verdict::Fail => "fail",
        Verdict::NotApplicable => "not_applicable",
        Verdict::ReportOnly => "report_only",
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PickAudit {
    pub k: u32,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<PickResult<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bounds: Option<PickBounds<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hop_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl PickAudit {
    pub fn failed(&self) -> bool {
        self.verdict == Verdict::Fail
    }
}

/// Point-picking with exhaustive verification and the doubling bounds.
pub fn audit_pick(field: &SpaceTimeField<f64>, k: u32) -> Result<PickAudit> {
    let Some(seed) = find_seed(field, k)? else {
        return Ok(PickAudit {
            k,
            verdict: Verdict::NotApplicable,
            result: None,
            bounds: None,
            hop_bound: None,
            note: Some(format!("no point with scal > 4^{k} / t")),
        });
    };
    let result = pick(field, k, seed)?;
    let hops = hop_bound(field, &result);
    let (bounds, note) = match pick_bounds(field, &result) {
        Ok(b) => (Some(b), None),
        Err(warpflow::Error::NotApplicable(msg)) => (None, Some(msg)),
        Err(e) => return Err(e.into()),
    };
    let ok = result.verified && result.trace.len() as f64 <= hops && bounds.as_ref().is_none_or(|b| b.hold());
    Ok(PickAudit {
        k,
        verdict: if ok { Verdict::Pass } else { Verdict::Fail },
        result: Some(result),
        bounds,
        hop_bound: Some(hops),
        note,
    })
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub config: ExperimentConfig,
    pub run: FlowRun<f64>,
    pub monitors: Vec<MonitorOutcome>,
    pub field: Option<SpaceTimeField<f64>>,
    pub pick: Option<PickAudit>,
}

impl ExperimentOutcome {
    pub fn any_failed(&self) -> bool {
        self.monitors.iter().any(MonitorOutcome::failed) || self.pick.as_ref().is_some_and(PickAudit::failed)
    }
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let initial = config.profile.build()?;
    let flow = config.flow.to_config()?;
    let mut flow_run = run(&flow, &initial)?;
    flow_run.provenance.profile_id = config.name.clone();
    flow_run.provenance.seed = config.seed;
    let monitors = config
        .monitors
        .iter()
        .map(|spec| match evaluate(spec, &flow_run, &initial) {
            Ok(report) => MonitorOutcome::Report(report),
            Err(e) => MonitorOutcome::Error { name: spec.name().into(), message: e.to_string() },
        })
        .collect();
    let (field, pick) = match &config.pointpick {
        Some(spec) => {
            let field = SpaceTimeField::from_run(&flow_run)?;
            let audit = audit_pick(&field, spec.k)?;
            (Some(field), Some(audit))
        }
        None => (None, None),
    };
    Ok(ExperimentOutcome { config: config.clone(), run: flow_run, monitors, field, pick })
}

fn valid_span(run: &FlowRun<f64>) -> (f64, f64) {
    let range = run.valid_range();
    let x = run.snapshots[0].profile.x();
    (x[*range.start()], x[*range.end()])
}

/// Fiber loops at the quarter points and a radial segment over the middle
/// half of the valid region.
pub fn default_curves(run: &FlowRun<f64>) -> Vec<CurveSpec<f64>> {
    let (lo, hi) = valid_span(run);
    let at = |f: f64| lo + f * (hi - lo);
    vec![
        CurveSpec::FiberLoop { x_at: at(0.25) },
        CurveSpec::FiberLoop { x_at: at(0.5) },
        CurveSpec::FiberLoop { x_at: at(0.75) },
        CurveSpec::Radial { x_from: at(0.25), x_to: at(0.75) },
    ]
}

/// Least-squares slope of `ln y` against `x`.
pub fn log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (sx, sy) = points.iter().fold((0.0, 0.0), |(a, b), &(x, y)| (a + x, b + y.ln()));
    let (mx, my) = (sx / n, sy / n);
    let (num, den) =
        points.iter().fold((0.0, 0.0), |(a, b), &(x, y)| (a + (x - mx) * (y.ln() - my), b + (x - mx).powi(2)));
    num / den
}

fn volume_form_report(run: &FlowRun<f64>, factor: f64) -> warpflow::Result<MonitorReport> {
    let h = run.snapshots[0].profile.min_spacing();
    let residuals = volume_form_residual(run)?;
    let mut worst = 0.0f64;
    let mut series = Vec::with_capacity(residuals.len());
    for r in &residuals {
        let estimate = r.dt * r.dt + h * h;
        worst = worst.max(r.relative / estimate);
        series.push((r.t_mid, r.relative));
    }
    let mut report = MonitorReport {
        name: "volume_form".into(),
        verdict: if worst <= factor { Verdict::Pass } else { Verdict::Fail },
        hypotheses: Vec::new(),
        values: Default::default(),
        series: Default::default(),
        notes: Vec::new(),
    };
    report.values.insert("max_residual_over_estimate".into(), worst);
    report.values.insert("allowed_factor".into(), factor);
    report.values.insert("h".into(), h);
    report.series.insert("relative_residual".into(), series);
    Ok(report)
}

fn tube_report(
    profile: &WarpProfile<f64>,
    radii: &[f64],
    half_width: f64,
    expected: Option<f64>,
) -> warpflow::Result<MonitorReport> {
    let points: Vec<(f64, f64)> = radii
        .iter()
        .map(|&r| Ok((r, tube_volume(profile, profile.x_at_arc_length(r)?, half_width)?)))
        .collect::<warpflow::Result<_>>()?;
    let rate = log_slope(&points);
    let mut report = MonitorReport {
        name: "tube_volume".into(),
        verdict: Verdict::ReportOnly,
        hypotheses: Vec::new(),
        values: Default::default(),
        series: Default::default(),
        notes: Vec::new(),
    };
    report.values.insert("fitted_rate".into(), rate);
    if let Some(e) = expected {
        report.values.insert("expected_rate".into(), e);
        report.verdict = if ((rate - e) / e).abs() <= 0.01 { Verdict::Pass } else { Verdict::Fail };
    }
    report.series.insert("volume".into(), points);
    Ok(report)
}

pub fn evaluate(spec: &MonitorSpec, run: &FlowRun<f64>, initial: &WarpProfile<f64>) -> warpflow::Result<MonitorReport> {
    match spec {
        MonitorSpec::VolumeForm { factor } => volume_form_report(run, *factor),
        MonitorSpec::DistanceGrowth { curves } => {
            let curves = if curves.is_empty() { default_curves(run) } else { curves.clone() };
            distance_growth_check(run, &curves)
        }
        MonitorSpec::VolumePersistence { region, scal_floor, ball_radius } => {
            let region = region.map_or_else(|| valid_span(run), |[a, b]| (a, b));
            volume_persistence_check(run, region, *scal_floor, *ball_radius)
        }
        MonitorSpec::CtBound { known_bound } => ct_bound(run, *known_bound),
        MonitorSpec::ChenLocal { x0, r0 } => {
            let (lo, hi) = valid_span(run);
            chen_local_estimate_fit(run, x0.unwrap_or(0.5 * (lo + hi)), *r0)
        }
        MonitorSpec::BishopGromov { radii } => bishop_gromov_ratios(initial, radii),
        MonitorSpec::Petrunin {} => petrunin_report(initial),
        MonitorSpec::TubeVolume { radii, half_width, expected_rate } => {
            tube_report(initial, radii, *half_width, *expected_rate)
        }
    }
}
