//! A-priori estimates of Ricci flow as checks over runs and profiles.
//!
//! A report only passes when every hypothesis it depends on was measured on
//! the same data and held; otherwise it is not applicable.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::curvature::{curvature_field, WarpProfile};
use crate::error::{Error, Result};
use crate::flow::FlowRun;
use crate::quadrature::{adaptive_simpson, unit_sphere_area};
use crate::Scalar;

/// Relative slack on measured curvature hypotheses.
pub const HYPOTHESIS_TOL: f64 = 1e-6;
/// Slack on the monotonicity of Bishop–Gromov ratios.
pub const RATIO_SLACK: f64 = 1e-9;
/// Relative slack on integrated length growth.
pub const LENGTH_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    NotApplicable,
    ReportOnly,
}

/// A measured precondition: `measured ≥ required` (or `≤` when `upper`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub name: String,
    pub measured: f64,
    pub required: f64,
    #[serde(default)]
    pub upper: bool,
    pub held: bool,
}

impl Hypothesis {
    pub fn at_least(name: &str, measured: f64, required: f64) -> Self {
        let held = measured >= required - HYPOTHESIS_TOL * required.abs().max(1.0);
        Self { name: name.into(), measured, required, upper: false, held }
    }

    pub fn at_most(name: &str, measured: f64, required: f64) -> Self {
        let held = measured <= required + HYPOTHESIS_TOL * required.abs().max(1.0);
        Self { name: name.into(), measured, required, upper: true, held }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonitorReport {
    pub name: String,
    pub verdict: Verdict,
    pub hypotheses: Vec<Hypothesis>,
    pub values: BTreeMap<String, f64>,
    pub series: BTreeMap<String, Vec<(f64, f64)>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl MonitorReport {
    fn new(name: &str) -> Self {
        Self {
            name: name.into(),
            verdict: Verdict::ReportOnly,
            hypotheses: Vec::new(),
            values: BTreeMap::new(),
            series: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    pub fn hypotheses_held(&self) -> bool {
        self.hypotheses.iter().all(|h| h.held)
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn value(&self, key: &str) -> Option<f64> {
        self.values.get(key).copied()
    }

    fn set<T: Scalar>(&mut self, key: &str, v: T) {
        self.values.insert(key.into(), v.as_f64());
    }

    /// Pass/fail conditional on the hypotheses.
    fn decide(&mut self, ok: bool) {
        self.verdict = if !self.hypotheses_held() {
            Verdict::NotApplicable
        } else if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
    }
}

/// A test curve fixed in the coordinate `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum CurveSpec<T> {
    /// Radial segment at a fixed fiber point (lengths do not depend on it).
    Radial { x_from: T, x_to: T },
    /// Closed geodesic of the fiber over `x_at`.
    FiberLoop { x_at: T },
}

impl<T: Scalar> CurveSpec<T> {
    fn span(&self) -> (T, T) {
        match *self {
            CurveSpec::Radial { x_from, x_to } => (x_from.min(x_to), x_from.max(x_to)),
            CurveSpec::FiberLoop { x_at } => (x_at, x_at),
        }
    }
}

pub fn curve_length<T: Scalar>(profile: &WarpProfile<T>, curve: &CurveSpec<T>) -> Result<T> {
    match *curve {
        CurveSpec::Radial { x_from, x_to } => Ok((profile.arc_length_at(x_to)? - profile.arc_length_at(x_from)?).abs()),
        CurveSpec::FiberLoop { x_at } => Ok(profile.interpolate(profile.b(), x_at)? * profile.fiber().loop_length()),
    }
}

fn valid_span<T: Scalar>(run: &FlowRun<T>) -> (T, T) {
    let range = run.valid_range();
    let x = run.snapshots[0].profile.x();
    (x[*range.start()], x[*range.end()])
}

fn require_in_valid<T: Scalar>(run: &FlowRun<T>, lo: T, hi: T) -> Result<()> {
    let (a, b) = valid_span(run);
    if lo < a || hi > b {
        return Err(Error::OutOfGrid(format!("[{lo}, {hi}] leaves the monitor-valid region [{a}, {b}]")));
    }
    Ok(())
}

fn series_min<T: Scalar>(run: &FlowRun<T>, name: &str) -> T {
    run.series(name).unwrap_or(&[]).iter().fold(T::infinity(), |m, &(_, v)| m.min(v))
}

fn to_f64<T: Scalar>(s: &[(T, T)]) -> Vec<(f64, f64)> {
    s.iter().map(|&(a, b)| (a.as_f64(), b.as_f64())).collect()
}

/// `|γ|_t ≤ |γ|_0 e^{(N-1)t}` for every curve, and its differential form on
/// every snapshot interval, under `Ric ≥ -(N-1)`.
pub fn distance_growth_check<T: Scalar>(run: &FlowRun<T>, curves: &[CurveSpec<T>]) -> Result<MonitorReport> {
    if run.snapshots.len() < 2 {
        return Err(Error::NotEnoughSnapshots { need: 2, have: run.snapshots.len() });
    }
    let dim = run.total_dim();
    let rate = T::count(dim - 1);
    let mut report = MonitorReport::new("distance_growth");
    report.hypotheses.push(Hypothesis::at_least("min_ricci", series_min(run, "min_ricci").as_f64(), -rate.as_f64()));
    let mut ok = true;
    let mut worst_integrated = T::zero();
    let mut worst_rate = T::neg_infinity();
    for (c, curve) in curves.iter().enumerate() {
        let (lo, hi) = curve.span();
        require_in_valid(run, lo, hi)?;
        let lengths: Vec<T> = run.snapshots.iter().map(|s| curve_length(&s.profile, curve)).collect::<Result<_>>()?;
        let l0 = lengths[0];
        let mut ratios = Vec::with_capacity(lengths.len());
        for (snap, &l) in run.snapshots.iter().zip(&lengths) {
            let bound = l0 * (rate * (snap.t - run.snapshots[0].t)).exp();
            let r = if bound > T::zero() { l / bound } else { T::zero() };
            worst_integrated = worst_integrated.max(r);
            ok &= l <= bound * (T::one() + T::lit(LENGTH_TOL));
            ratios.push((snap.t, if l0 > T::zero() { l / l0 } else { T::one() }));
        }
        for (w, pair) in run.snapshots.windows(2).zip(lengths.windows(2)) {
            let dt = w[1].t - w[0].t;
            if pair[0] > T::zero() && pair[1] > T::zero() {
                let growth = (pair[1] / pair[0]).ln() / dt;
                worst_rate = worst_rate.max(growth);
                ok &= growth <= rate * (T::one() + T::lit(1e-12));
            }
        }
        report.series.insert(format!("curve_{c}_ratio"), to_f64(&ratios));
    }
    report.set("max_length_over_bound", worst_integrated);
    report.set("max_log_growth_rate", worst_rate);
    report.set("rate_bound", rate);
    report.decide(ok);
    Ok(report)
}

fn require_capped<T: Scalar>(profile: &WarpProfile<T>, what: &'static str) -> Result<()> {
    if profile.is_tip(0) {
        Ok(())
    } else {
        Err(Error::NotCapped(what))
    }
}

/// Volume of the geodesic ball of radius `r` about the tip at `x_0`.
pub fn tip_ball_volume<T: Scalar>(profile: &WarpProfile<T>, r: T) -> Result<T> {
    require_capped(profile, "tip_ball_volume")?;
    let x = profile.x_at_arc_length(r)?;
    profile.weighted_volume(None, profile.x()[0], x)
}

/// Volume of a ball of radius `r` in hyperbolic `N`-space.
pub fn hyperbolic_ball_volume<T: Scalar>(dim: usize, r: T) -> Result<T> {
    if dim < 2 {
        return Err(Error::DimensionOutOfRange { dim, min: 2, max: usize::MAX });
    }
    if !(r >= T::zero()) {
        return Err(Error::InvalidConfig(format!("radius must be nonnegative, got {r}")));
    }
    let k = (dim - 1) as i32;
    let integral = adaptive_simpson(&|s: T| s.sinh().powi(k), T::zero(), r, T::lit(1e-13));
    Ok(unit_sphere_area::<T>(dim - 1) * integral)
}

/// Scale-invariant ratio `vol(B(tip, r)) / r^N`.
pub fn tip_volume_ratio<T: Scalar>(profile: &WarpProfile<T>, r: T) -> Result<T> {
    Ok(tip_ball_volume(profile, r)? / r.powi(profile.total_dim() as i32))
}

/// Smallest operator eigenvalue over nodes within arc length `r` of the tip.
fn min_sectional_within<T: Scalar>(profile: &WarpProfile<T>, r: T) -> Result<T> {
    let s = profile.arc_length();
    let field = curvature_field(profile)?;
    Ok(field
        .iter()
        .zip(&s)
        .filter(|(_, &si)| si <= r + T::lit(1e-12))
        .filter_map(|(c, _)| c.as_ref())
        .fold(T::infinity(), |m, c| m.min(c.min_eigenvalue())))
}

/// `vol(B(tip, r)) / v_{-1}(r)` nonincreasing in `r` under `sec ≥ -1`.
pub fn bishop_gromov_ratios<T: Scalar>(profile: &WarpProfile<T>, radii: &[T]) -> Result<MonitorReport> {
    require_capped(profile, "bishop_gromov_ratios")?;
    let r_max = radii.iter().fold(T::zero(), |m, &r| m.max(r));
    let mut report = MonitorReport::new("bishop_gromov");
    report.hypotheses.push(Hypothesis::at_least("min_sectional", min_sectional_within(profile, r_max)?.as_f64(), -1.0));
    let dim = profile.total_dim();
    let ratios: Vec<(T, T)> = radii
        .iter()
        .map(|&r| Ok((r, tip_ball_volume(profile, r)? / hyperbolic_ball_volume(dim, r)?)))
        .collect::<Result<_>>()?;
    let ok = ratios.windows(2).all(|w| w[1].1 <= w[0].1 + T::lit(RATIO_SLACK));
    let max_ratio = ratios.iter().fold(T::neg_infinity(), |m, &(_, v)| m.max(v));
    let min_ratio = ratios.iter().fold(T::infinity(), |m, &(_, v)| m.min(v));
    report.set("max_ratio", max_ratio);
    report.set("min_ratio", min_ratio);
    report.series.insert("ratio".into(), to_f64(&ratios));
    report.decide(ok);
    Ok(report)
}

/// `∫_{B(tip, 1)} scal dvol`.
pub fn petrunin_integral<T: Scalar>(profile: &WarpProfile<T>) -> Result<T> {
    require_capped(profile, "petrunin_integral")?;
    let field = curvature_field(profile)?;
    let x1 = profile.x_at_arc_length(T::one())?;
    let hi = profile.x().partition_point(|&x| x < x1).min(profile.len() - 1);
    let nodes = 0..=hi.max(crate::curvature::STENCIL_HALF_WIDTH * 3).min(profile.len() - 1);
    let scal: Vec<T> = field.iter().map(|c| c.as_ref().map_or(T::nan(), |c| c.scal)).collect();
    if scal[nodes.clone()].iter().any(|v| v.is_nan()) {
        return Err(Error::OutOfGrid("unit tip ball reaches nodes without curvature".into()));
    }
    profile.volume_integral(Some(&scal), nodes, profile.x()[0], x1)
}

/// [`petrunin_integral`] with the `sec ≥ -1` hypothesis recorded.
pub fn petrunin_report<T: Scalar>(profile: &WarpProfile<T>) -> Result<MonitorReport> {
    let mut report = MonitorReport::new("petrunin_integral");
    report.hypotheses.push(Hypothesis::at_least(
        "min_sectional",
        min_sectional_within(profile, T::one())?.as_f64(),
        -1.0,
    ));
    report.set("integral", petrunin_integral(profile)?);
    report.verdict = Verdict::ReportOnly;
    Ok(report)
}

/// `vol_t(Ω) ≥ vol_0(Ω) - L t` with `L = sup_t [∫_Ω scal₊ + |floor| vol_t(Ω)]`
/// on the coordinate region `Ω = [x_from, x_to]`. On capped runs the evolving
/// tip ball of radius `ball_radius` is recorded alongside.
pub fn volume_persistence_check<T: Scalar>(
    run: &FlowRun<T>,
    region: (T, T),
    scal_floor: T,
    ball_radius: T,
) -> Result<MonitorReport> {
    let (x_from, x_to) = region;
    require_in_valid(run, x_from, x_to)?;
    let range = run.valid_range();
    let dim = run.total_dim();
    let mut vols = Vec::new();
    let mut positive = Vec::new();
    let mut signed = Vec::new();
    let mut min_scal = T::infinity();
    for snap in &run.snapshots {
        let p = &snap.profile;
        let field = curvature_field(p)?;
        let scal: Vec<T> = field.iter().map(|c| c.as_ref().map_or(T::zero(), |c| c.scal)).collect();
        for i in range.clone() {
            if p.x()[i] >= x_from && p.x()[i] <= x_to {
                min_scal = min_scal.min(scal[i]);
            }
        }
        let plus: Vec<T> = scal.iter().map(|&s| s.max(T::zero())).collect();
        vols.push((snap.t, p.volume_integral(None, range.clone(), x_from, x_to)?));
        positive.push(p.volume_integral(Some(&plus), range.clone(), x_from, x_to)?);
        signed.push(p.volume_integral(Some(&scal), range.clone(), x_from, x_to)?);
    }
    let mut report = MonitorReport::new("volume_persistence");
    report.hypotheses.push(Hypothesis::at_least("min_scal", min_scal.as_f64(), scal_floor.as_f64()));
    let loss = vols.iter().zip(&positive).fold(T::zero(), |m, (&(_, v), &p)| m.max(p + scal_floor.abs() * v));
    let (t0, v0) = vols[0];
    let ok = vols.iter().all(|&(t, v)| v >= v0 - loss * (t - t0) - T::lit(1e-12) * v0);
    let mut slope = T::zero();
    let mut slope_at = 0;
    for (j, &(t, v)) in vols.iter().enumerate().skip(1) {
        let s = (v0 - v) / (t - t0);
        if s > slope {
            slope = s;
            slope_at = j;
        }
    }
    let inv = T::one() / T::count(dim - 1);
    let eps = if slope > T::zero() { (v0 / (T::lit(2.0) * slope)).min(inv) } else { inv };
    if slope_at > 0 {
        let mut acc = T::zero();
        for j in 0..slope_at {
            acc += (signed[j] + signed[j + 1]) / T::lit(2.0) * (vols[j + 1].0 - vols[j].0);
        }
        report.set("mean_scal_integral", acc / (vols[slope_at].0 - t0));
    }
    report.set("loss_rate_bound", loss);
    report.set("fitted_slope", slope);
    report.set("epsilon", eps);
    report.set("v0", v0);
    report.series.insert("volume".into(), to_f64(&vols));
    if run.snapshots[0].profile.is_tip(0) {
        let e = ball_radius;
        let tip_balls: Vec<(T, T)> = run
            .snapshots
            .iter()
            .filter_map(|s| {
                let x = s.profile.x_at_arc_length(e).ok()?;
                (x <= valid_span(run).1).then(|| Some((s.t, tip_ball_volume(&s.profile, e).ok()?)))?
            })
            .collect();
        if tip_balls.len() == run.snapshots.len() {
            report.series.insert("tip_ball_volume".into(), to_f64(&tip_balls));
        } else {
            report.notes.push(format!("evolving tip ball of radius {e} leaves the valid region"));
        }
    }
    report.decide(ok);
    Ok(report)
}

/// `sup t · scal₊` over the run; passes against `known_bound` when given.
pub fn ct_bound<T: Scalar>(run: &FlowRun<T>, known_bound: Option<T>) -> Result<MonitorReport> {
    let max_scal = run.series("max_scal").ok_or(Error::NotEnoughSnapshots { need: 1, have: 0 })?;
    let series: Vec<(T, T)> = max_scal.iter().map(|&(t, s)| (t, t * s.max(T::zero()))).collect();
    let sup = series.iter().fold(T::zero(), |m, &(_, v)| m.max(v));
    let mut report = MonitorReport::new("ct_bound");
    report.set("sup_t_scal", sup);
    report.series.insert("t_scal".into(), to_f64(&series));
    match known_bound {
        Some(b) => {
            report.set("known_bound", b);
            report.decide(sup <= b * (T::one() + T::lit(HYPOTHESIS_TOL)) + T::lit(HYPOTHESIS_TOL));
        }
        None => report.verdict = Verdict::ReportOnly,
    }
    Ok(report)
}

/// Smallest `C ≥ 0` with `|Rm|_t(x) ≤ e^{CK} (r₀ - d_t(x₀, x))⁻²` on every
/// sampled point with `d_t < r₀`, where `K = sup t |Rm|` on the same samples.
pub fn chen_local_estimate_fit<T: Scalar>(run: &FlowRun<T>, x0: T, r0: T) -> Result<MonitorReport> {
    if !(r0 > T::zero()) {
        return Err(Error::InvalidConfig("r0 must be positive".into()));
    }
    require_in_valid(run, x0, x0)?;
    let range = run.valid_range();
    let mut samples = Vec::new();
    for snap in &run.snapshots {
        let p = &snap.profile;
        let field = curvature_field(p)?;
        let s = p.arc_length();
        let s0 = p.arc_length_at(x0)?;
        for i in range.clone() {
            let d = (s[i] - s0).abs();
            if d < r0 {
                let rm = field[i].as_ref().ok_or(Error::StencilUnderflow { node: i })?.norm();
                samples.push((snap.t, d, rm));
            }
        }
    }
    let t0 = run.snapshots[0].t;
    let initial_sup = samples.iter().filter(|s| s.0 == t0).fold(T::zero(), |m, s| m.max(s.2));
    let k = samples.iter().fold(T::zero(), |m, &(t, _, rm)| m.max((t - t0) * rm));
    let mut report = MonitorReport::new("chen_local_estimate");
    report.hypotheses.push(Hypothesis::at_most("initial_rm_times_r0_squared", (initial_sup * r0 * r0).as_f64(), 1.0));
    let worst = samples
        .iter()
        .filter(|s| s.2 > T::zero())
        .fold(T::neg_infinity(), |m, &(_, d, rm)| m.max((rm * (r0 - d) * (r0 - d)).ln()));
    let c = if worst <= T::zero() {
        T::zero()
    } else if k > T::zero() {
        worst / k
    } else {
        T::infinity()
    };
    report.set("fitted_c", c);
    report.set("k", k);
    report.set("samples", T::count(samples.len()));
    report.verdict = if report.hypotheses_held() { Verdict::ReportOnly } else { Verdict::NotApplicable };
    if report.hypotheses_held() && c.is_finite() {
        report.verdict = Verdict::Pass;
    } else if report.hypotheses_held() {
        report.verdict = Verdict::Fail;
    }
    Ok(report)
}

/// Volume of the radial tube `|s - s(x_center)| < half_width`.
pub fn tube_volume<T: Scalar>(profile: &WarpProfile<T>, x_center: T, half_width: T) -> Result<T> {
    if !(half_width >= T::zero()) {
        return Err(Error::InvalidConfig("half width must be nonnegative".into()));
    }
    let sc = profile.arc_length_at(x_center)?;
    let lo = profile.x_at_arc_length(sc - half_width)?;
    let hi = profile.x_at_arc_length(sc + half_width)?;
    profile.weighted_volume(None, lo, hi)
}

#[cfg(test)]
mod tests;
