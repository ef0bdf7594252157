//! Ricci flow `∂t g = -2 Ric` restricted to warped products `a² dx² + b² h`.
//!
//! With `n` the fiber dimension and derivatives in arc length the flow is the pair
//!
//! ```text
//! ∂t a = n (b_ss / b) a
//! ∂t b = b_ss + (n - 1)(b_s² - κ) / b
//! ```
//!
//! integrated by the method of lines in a fixed coordinate `x`.

mod exact;
mod scheme;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use exact::{exact_profile, ExactKind, ExactParams, JetFn};
pub use scheme::Rhs;

use scheme::Derivative;

use crate::curvature::{curvature_field, PointCurvature, WarpProfile};
use crate::error::{Error, Result};
use crate::Scalar;

/// Relative warp floor below which a run stops as singular.
pub const SINGULAR_WARP_RATIO: f64 = 1e-6;
/// Stop when `|Rm|_sup · dt` exceeds this.
pub const SINGULAR_CURVATURE_STEP: f64 = 0.1;
/// Stop when `dt < COLLAPSED_STEP_RATIO · t_end`.
pub const COLLAPSED_STEP_RATIO: f64 = 1e-10;
/// Domain-of-influence margin in units of `√t` around frozen nodes.
pub const INFLUENCE_MARGIN: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    ExplicitEuler,
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowConfig<T> {
    pub scheme: Scheme,
    /// `dt ≤ cfl · h_min² / max(1, |Rm|_sup)`.
    pub cfl: T,
    pub t_end: T,
    pub snapshot_every: usize,
}

impl<T: Scalar> FlowConfig<T> {
    pub fn new(scheme: Scheme, cfl: T, t_end: T, snapshot_every: usize) -> Result<Self> {
        let cfg = Self { scheme, cfl, t_end, snapshot_every };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Rk4 with `cfl = 0.2`.
    pub fn with_defaults(t_end: T) -> Result<Self> {
        Self::new(Scheme::Rk4, T::lit(0.2), t_end, 100)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > T::zero() && self.cfl <= T::lit(0.5)) {
            return Err(Error::InvalidConfig(format!("cfl must lie in (0, 0.5], got {}", self.cfl)));
        }
        if !(self.t_end > T::zero()) {
            return Err(Error::InvalidConfig("t_end must be positive".into()));
        }
        if self.snapshot_every == 0 {
            return Err(Error::InvalidConfig("snapshot_every must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowState<T: Scalar> {
    pub t: T,
    pub profile: WarpProfile<T>,
    /// Arc-length slope `b_s` evolved alongside the metric.
    pub slope: Vec<T>,
}

impl<T: Scalar> FlowState<T> {
    /// State at time `t`; the slope is read off `profile`.
    pub fn new(t: T, profile: WarpProfile<T>) -> Self {
        let slope = scheme::initial_slope(&profile);
        Self { t, profile, slope }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Completed,
    StoppedSingularity,
    StoppedCfl,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Provenance<T> {
    pub config: FlowConfig<T>,
    pub profile_id: String,
    pub seed: u64,
}

/// Time-ordered snapshots of one run with per-snapshot diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowRun<T: Scalar> {
    pub snapshots: Vec<FlowState<T>>,
    /// Named series sampled at snapshot times.
    pub series: BTreeMap<String, Vec<(T, T)>>,
    pub status: RunStatus,
    pub stop_time: T,
    /// Why the run stopped early.
    pub stop_reason: Option<String>,
    pub provenance: Provenance<T>,
    /// Nodes whose stencils never see frozen data within the run horizon.
    pub valid: Vec<bool>,
    pub steps: usize,
    /// Largest time step taken.
    pub max_dt: T,
}

impl<T: Scalar> FlowRun<T> {
    pub fn times(&self) -> Vec<T> {
        self.snapshots.iter().map(|s| s.t).collect()
    }

    /// Contiguous range of monitor-valid nodes.
    pub fn valid_range(&self) -> std::ops::RangeInclusive<usize> {
        valid_range(&self.valid)
    }

    pub fn series(&self, name: &str) -> Option<&[(T, T)]> {
        self.series.get(name).map(|v| v.as_slice())
    }

    pub fn total_dim(&self) -> usize {
        self.snapshots[0].profile.total_dim()
    }
}

pub(crate) fn valid_range(valid: &[bool]) -> std::ops::RangeInclusive<usize> {
    let lo = valid.iter().position(|&v| v).unwrap_or(0);
    let hi = valid.iter().rposition(|&v| v).unwrap_or(0);
    lo..=hi
}

/// `-2 Ric` applied to both metric coefficients (and the carried slope).
pub fn ricci_rhs<T: Scalar>(state: &FlowState<T>) -> Result<Rhs<T>> {
    scheme::rhs(&Derivative::new(&state.profile), &state.profile, &state.slope)
}

/// Largest time step allowed by the CFL rule at `state`.
pub fn cfl_limit<T: Scalar>(state: &FlowState<T>, cfl: T) -> Result<T> {
    cfl_limit_with(&Derivative::new(&state.profile), state, cfl)
}

fn cfl_limit_with<T: Scalar>(d: &Derivative<T>, state: &FlowState<T>, cfl: T) -> Result<T> {
    let h = state.profile.min_spacing();
    Ok(cfl * h * h / scheme::sup_curvature(d, &state.profile, &state.slope)?.max(T::one()))
}

/// One step of `config.scheme`; rejects steps above the CFL limit.
pub fn step<T: Scalar>(state: &FlowState<T>, dt: T, config: &FlowConfig<T>) -> Result<FlowState<T>> {
    let d = Derivative::new(&state.profile);
    let limit = cfl_limit_with(&d, state, config.cfl)?;
    if dt > limit * (T::one() + T::lit(1e-12)) {
        return Err(Error::CflViolation { dt: dt.as_f64(), limit: limit.as_f64() });
    }
    advance(&d, state, dt, config.scheme)
}

fn advance<T: Scalar>(d: &Derivative<T>, state: &FlowState<T>, dt: T, scheme: Scheme) -> Result<FlowState<T>> {
    let base = state.profile.clone().without_analytic();
    let shifted = |k: &Rhs<T>, h: T| -> (WarpProfile<T>, Vec<T>) {
        let mut p = base.clone();
        let a = base.a().iter().zip(&k.da).map(|(&v, &dv)| v + h * dv).collect();
        let b = base.b().iter().zip(&k.db).map(|(&v, &dv)| v + h * dv).collect();
        p.set_coefficients(a, b);
        (p, state.slope.iter().zip(&k.du).map(|(&v, &dv)| v + h * dv).collect())
    };
    let eval = |(p, u): &(WarpProfile<T>, Vec<T>)| scheme::rhs(d, p, u);
    let two = T::lit(2.0);
    let (profile, slope) = match scheme {
        Scheme::ExplicitEuler => shifted(&scheme::rhs(d, &base, &state.slope)?, dt),
        Scheme::Rk4 => {
            let k1 = scheme::rhs(d, &base, &state.slope)?;
            let k2 = eval(&shifted(&k1, dt / two))?;
            let k3 = eval(&shifted(&k2, dt / two))?;
            let k4 = eval(&shifted(&k3, dt))?;
            let combined = Rhs {
                da: combine(&k1.da, &k2.da, &k3.da, &k4.da),
                db: combine(&k1.db, &k2.db, &k3.db, &k4.db),
                du: combine(&k1.du, &k2.du, &k3.du, &k4.du),
            };
            shifted(&combined, dt)
        }
    };
    let t = state.t + dt;
    for i in 0..profile.len() {
        let (a, b) = (profile.a()[i], profile.b()[i]);
        if !(a > T::zero()) {
            return Err(Error::Singularity { t: t.as_f64(), reason: format!("a = {a} at node {i}") });
        }
        if !profile.is_tip(i) && !(b > T::zero()) {
            return Err(Error::Singularity { t: t.as_f64(), reason: format!("b = {b} at node {i}") });
        }
    }
    Ok(FlowState { t, profile, slope })
}

fn combine<T: Scalar>(k1: &[T], k2: &[T], k3: &[T], k4: &[T]) -> Vec<T> {
    let (two, six) = (T::lit(2.0), T::lit(6.0));
    (0..k1.len()).map(|i| (k1[i] + two * (k2[i] + k3[i]) + k4[i]) / six).collect()
}

/// Nodes the flow evolves whose distance to every frozen node exceeds the
/// domain-of-influence margin for time `horizon`.
pub fn monitor_mask<T: Scalar>(profile: &WarpProfile<T>, horizon: T) -> Vec<bool> {
    let d = Derivative::new(profile);
    let slope = scheme::initial_slope(profile);
    let active: Vec<bool> = scheme::local(&d, profile, &slope).q.iter().map(Option::is_some).collect();
    let s = profile.arc_length();
    let margin = T::lit(INFLUENCE_MARGIN) * horizon.max(T::zero()).sqrt();
    let frozen: Vec<usize> = (0..active.len()).filter(|&i| !active[i]).collect();
    (0..profile.len()).map(|i| active[i] && frozen.iter().all(|&g| (s[i] - s[g]).abs() > margin)).collect()
}

/// Per-snapshot diagnostics over the region of valid nodes.
pub(crate) fn diagnostics<T: Scalar>(profile: &WarpProfile<T>, valid: &[bool]) -> Result<Vec<(&'static str, T)>> {
    let field = curvature_field(profile)?;
    let range = valid_range(valid);
    let (lo, hi) = (*range.start(), *range.end());
    let scal: Vec<T> = field.iter().map(|c| c.as_ref().map_or(T::zero(), |c| c.scal)).collect();
    let x = profile.x();
    let volume = profile.volume_integral(None, range.clone(), x[lo], x[hi])?;
    let scal_integral = profile.volume_integral(Some(&scal), range.clone(), x[lo], x[hi])?;
    let in_region = || field[lo..=hi].iter().zip(&valid[lo..=hi]).filter(|(_, &v)| v).filter_map(|(c, _)| c.as_ref());
    let fold =
        |f: fn(&PointCurvature<T>) -> T, init: T, pick: fn(T, T) -> T| in_region().fold(init, |m, c| pick(m, f(c)));
    Ok(vec![
        ("volume", volume),
        ("scal_integral", scal_integral),
        ("max_scal", fold(|c| c.scal, T::neg_infinity(), T::max)),
        ("min_scal", fold(|c| c.scal, T::infinity(), T::min)),
        ("min_ricci", fold(|c| c.min_ricci(), T::infinity(), T::min)),
        ("min_sec", fold(|c| c.min_eigenvalue(), T::infinity(), T::min)),
        ("max_rm", fold(|c| c.norm(), T::zero(), T::max)),
    ])
}

fn record<T: Scalar>(series: &mut BTreeMap<String, Vec<(T, T)>>, t: T, diag: Vec<(&'static str, T)>) {
    for (name, v) in diag {
        series.entry(name.to_string()).or_default().push((t, v));
    }
}

/// Integrates from `initial` to `config.t_end` or the first stopping condition.
pub fn run<T: Scalar>(config: &FlowConfig<T>, initial: &WarpProfile<T>) -> Result<FlowRun<T>> {
    config.validate()?;
    initial.validate()?;
    let valid = monitor_mask(initial, config.t_end);
    if !valid.iter().any(|&v| v) {
        return Err(Error::InvalidConfig("no monitor-valid nodes for this horizon".into()));
    }
    let b_max0 = initial.b().iter().fold(T::zero(), |m, &b| m.max(b));
    let floor = T::lit(SINGULAR_WARP_RATIO) * b_max0;
    let d = Derivative::new(initial);
    let mut state = FlowState::new(T::zero(), initial.clone());
    let mut series = BTreeMap::new();
    record(&mut series, state.t, diagnostics(&state.profile, &valid)?);
    let mut snapshots = vec![state.clone()];
    let mut status = RunStatus::Completed;
    let mut stop_reason = None;
    let mut steps = 0usize;
    let mut max_dt = T::zero();
    let end = config.t_end;
    while state.t < end {
        let rm = scheme::sup_curvature(&d, &state.profile, &state.slope)?;
        let h = state.profile.min_spacing();
        let mut dt = config.cfl * h * h / rm.max(T::one());
        if state.t + dt >= end || end - (state.t + dt) < dt * T::lit(1e-6) {
            dt = end - state.t;
        }
        if rm * dt > T::lit(SINGULAR_CURVATURE_STEP) {
            status = RunStatus::StoppedSingularity;
            stop_reason = Some(format!("|Rm| dt = {} exceeds {SINGULAR_CURVATURE_STEP}", rm * dt));
            break;
        }
        if dt < T::lit(COLLAPSED_STEP_RATIO) * end {
            status = RunStatus::StoppedSingularity;
            stop_reason = Some(format!("time step {dt} collapsed below {COLLAPSED_STEP_RATIO} t_end at |Rm| = {rm}"));
            break;
        }
        let next = match advance(&d, &state, dt, config.scheme) {
            Ok(s) => s,
            Err(e @ Error::Singularity { .. }) => {
                status = RunStatus::StoppedSingularity;
                stop_reason = Some(e.to_string());
                break;
            }
            Err(e @ Error::CflViolation { .. }) => {
                status = RunStatus::StoppedCfl;
                stop_reason = Some(e.to_string());
                break;
            }
            Err(e) => return Err(e),
        };
        steps += 1;
        max_dt = max_dt.max(dt);
        state = if next.t >= end { FlowState { t: end, ..next } } else { next };
        let b_min = (0..state.profile.len())
            .filter(|&i| !state.profile.is_tip(i))
            .fold(T::infinity(), |m, i| m.min(state.profile.b()[i]));
        let singular = b_min < floor;
        if steps.is_multiple_of(config.snapshot_every) || state.t >= end || singular {
            record(&mut series, state.t, diagnostics(&state.profile, &valid)?);
            snapshots.push(state.clone());
        }
        if singular {
            status = RunStatus::StoppedSingularity;
            stop_reason = Some(format!("b_min = {b_min} below {SINGULAR_WARP_RATIO} b_max(0)"));
            break;
        }
    }
    Ok(FlowRun {
        snapshots,
        series,
        status,
        stop_time: state.t,
        stop_reason,
        provenance: Provenance { config: *config, profile_id: "initial".into(), seed: 0 },
        valid,
        steps,
        max_dt,
    })
}

/// View of `run` under `g̃(s) = Q g(t̄ + s/Q)`, optionally restricted to `s ∈ window`.
pub fn parabolic_rescale<T: Scalar>(run: &FlowRun<T>, t_bar: T, q: T, window: Option<(T, T)>) -> Result<FlowRun<T>> {
    if !(q > T::zero()) {
        return Err(Error::NonPositiveScale(q.as_f64()));
    }
    let t0 = run.snapshots[0].t;
    let t1 = run.snapshots[run.snapshots.len() - 1].t;
    if t_bar < t0 || t_bar > t1 {
        return Err(Error::InvalidConfig(format!("t̄ = {t_bar} outside run interval [{t0}, {t1}]")));
    }
    let k = q.sqrt();
    let mut snapshots = Vec::new();
    for snap in &run.snapshots {
        let s = q * (snap.t - t_bar);
        if let Some((lo, hi)) = window {
            if s < lo || s > hi {
                continue;
            }
        }
        snapshots.push(FlowState { t: s, profile: snap.profile.rescaled(k)?, slope: snap.slope.clone() });
    }
    if snapshots.is_empty() {
        return Err(Error::EmptyWindow);
    }
    let mut series = BTreeMap::new();
    for snap in &snapshots {
        record(&mut series, snap.t, diagnostics(&snap.profile, &run.valid)?);
    }
    let stop_time = snapshots[snapshots.len() - 1].t;
    Ok(FlowRun {
        snapshots,
        series,
        status: run.status,
        stop_time,
        stop_reason: run.stop_reason.clone(),
        provenance: run.provenance.clone(),
        valid: run.valid.clone(),
        steps: run.steps,
        max_dt: run.max_dt * q,
    })
}

/// Residual of `d/dt vol(Ω) = -∫_Ω scal dvol` on one snapshot interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolumeResidual<T> {
    pub t_mid: T,
    pub dt: T,
    pub residual: T,
    /// `residual / vol(Ω)` at the interval midpoint.
    pub relative: T,
}

/// Centered-difference residual per snapshot interval over the valid region.
pub fn volume_form_residual<T: Scalar>(run: &FlowRun<T>) -> Result<Vec<VolumeResidual<T>>> {
    if run.snapshots.len() < 2 {
        return Err(Error::NotEnoughSnapshots { need: 2, have: run.snapshots.len() });
    }
    let range = run.valid_range();
    let (lo, hi) = (*range.start(), *range.end());
    let samples: Vec<(T, T, T)> = run
        .snapshots
        .iter()
        .map(|snap| {
            let p = &snap.profile;
            let scal: Vec<T> = curvature_field(p)?.iter().map(|c| c.as_ref().map_or(T::zero(), |c| c.scal)).collect();
            let (x0, x1) = (p.x()[lo], p.x()[hi]);
            Ok((
                snap.t,
                p.volume_integral(None, range.clone(), x0, x1)?,
                p.volume_integral(Some(&scal), range.clone(), x0, x1)?,
            ))
        })
        .collect::<Result<_>>()?;
    let two = T::lit(2.0);
    Ok(samples
        .windows(2)
        .map(|w| {
            let (t0, v0, s0) = w[0];
            let (t1, v1, s1) = w[1];
            let dt = t1 - t0;
            let residual = ((v1 - v0) / dt + (s0 + s1) / two).abs();
            VolumeResidual { t_mid: (t0 + t1) / two, dt, residual, relative: residual / ((v0 + v1) / two) }
        })
        .collect())
}

#[cfg(test)]
mod tests;
