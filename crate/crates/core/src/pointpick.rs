//! Point-picking on discrete space-time scalar-curvature fields.
//!
//! Starting from a seed with `scal > 4^k / t`, hop to any point of the
//! backward parabolic neighbourhood whose curvature at least doubles, until
//! none is left. The terminal point controls curvature at its own scale.

use serde::{Deserialize, Serialize};

use crate::curvature::curvature_field;
use crate::error::{Error, Result};
use crate::flow::FlowRun;
use crate::Scalar;

/// Scalar curvature sampled on nodes × times, with per-slice node positions
/// (distances are `|s_i - s_j|` within a slice).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceTimeField<T> {
    times: Vec<T>,
    /// `positions[j][i]`: arc-length position of node `i` at time `j`.
    positions: Vec<Vec<T>>,
    /// `scal[j][i]`.
    scal: Vec<Vec<T>>,
    dim: usize,
    /// Whether `Ric ≥ -(N-1)` held on the source of the field.
    ricci_hypothesis: Option<bool>,
}

impl<T: Scalar> SpaceTimeField<T> {
    pub fn new(times: Vec<T>, positions: Vec<Vec<T>>, scal: Vec<Vec<T>>, dim: usize) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::InvalidConfig("field needs at least one time slice".into()));
        }
        if times[0] < T::zero() || times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidConfig("times must be nonnegative and increasing".into()));
        }
        if positions.len() != times.len() || scal.len() != times.len() {
            return Err(Error::InvalidConfig("one position and scal row per time".into()));
        }
        let nodes = scal[0].len();
        if nodes == 0 || positions.iter().chain(&scal).any(|row| row.len() != nodes) {
            return Err(Error::InvalidConfig("rows must share a nonzero node count".into()));
        }
        if scal.iter().flatten().chain(positions.iter().flatten()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig("field values must be finite".into()));
        }
        if dim < 2 {
            return Err(Error::DimensionOutOfRange { dim, min: 2, max: usize::MAX });
        }
        let static_positions = positions.windows(2).all(|w| w[0] == w[1]);
        let ricci_hypothesis = static_positions.then_some(true);
        Ok(Self { times, positions, scal, dim, ricci_hypothesis })
    }

    /// Field `f(x, t)` on fixed node positions.
    pub fn synthetic(times: Vec<T>, nodes: Vec<T>, dim: usize, f: impl Fn(T, T) -> T) -> Result<Self> {
        let scal = times.iter().map(|&t| nodes.iter().map(|&x| f(x, t)).collect()).collect();
        let positions = vec![nodes; times.len()];
        Self::new(times, positions, scal, dim)
    }

    /// Scalar curvature of every snapshot on the run's monitor-valid nodes,
    /// with radial arc-length positions.
    pub fn from_run(run: &FlowRun<T>) -> Result<Self> {
        let nodes: Vec<usize> = (0..run.valid.len()).filter(|&i| run.valid[i]).collect();
        let mut times = Vec::new();
        let mut positions = Vec::new();
        let mut scal = Vec::new();
        for snap in &run.snapshots {
            let field = curvature_field(&snap.profile)?;
            let s = snap.profile.arc_length();
            times.push(snap.t);
            positions.push(nodes.iter().map(|&i| s[i]).collect());
            scal.push(
                nodes
                    .iter()
                    .map(|&i| field[i].as_ref().map(|c| c.scal).ok_or(Error::StencilUnderflow { node: i }))
                    .collect::<Result<Vec<T>>>()?,
            );
        }
        let mut out = Self::new(times, positions, scal, run.total_dim())?;
        let floor = -T::count(out.dim - 1) * (T::one() + T::lit(1e-6));
        out.ricci_hypothesis = run.series("min_ricci").map(|s| s.iter().all(|&(_, v)| v >= floor));
        Ok(out)
    }

    pub fn with_ricci_hypothesis(mut self, held: Option<bool>) -> Self {
        self.ricci_hypothesis = held;
        self
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn node_count(&self) -> usize {
        self.scal[0].len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ricci_hypothesis(&self) -> Option<bool> {
        self.ricci_hypothesis
    }

    pub fn scal(&self, node: usize, time: usize) -> T {
        self.scal[time][node]
    }

    pub fn position(&self, node: usize, time: usize) -> T {
        self.positions[time][node]
    }

    pub fn dist(&self, time: usize, i: usize, j: usize) -> T {
        (self.positions[time][i] - self.positions[time][j]).abs()
    }

    pub fn sup_scal(&self) -> T {
        self.scal.iter().flatten().fold(T::neg_infinity(), |m, &v| m.max(v))
    }

    fn point(&self, node: usize, time: usize) -> SpaceTimePoint<T> {
        SpaceTimePoint { node, time, t: self.times[time], scal: self.scal[time][node] }
    }

    /// Parabolic view `scal ↦ λ scal`, `t ↦ t / λ`, distances `↦ d / √λ`.
    pub fn parabolic_rescale(&self, lambda: T) -> Result<Self> {
        if !(lambda > T::zero()) || !lambda.is_finite() {
            return Err(Error::NonPositiveScale(lambda.as_f64()));
        }
        let root = lambda.sqrt();
        Ok(Self {
            times: self.times.iter().map(|&t| t / lambda).collect(),
            positions: self.positions.iter().map(|r| r.iter().map(|&p| p / root).collect()).collect(),
            scal: self.scal.iter().map(|r| r.iter().map(|&v| v * lambda).collect()).collect(),
            dim: self.dim,
            ricci_hypothesis: self.ricci_hypothesis,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceTimePoint<T> {
    pub node: usize,
    /// Time-slice index.
    pub time: usize,
    pub t: T,
    pub scal: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PickResult<T> {
    pub k: u32,
    pub seed: SpaceTimePoint<T>,
    pub picked: SpaceTimePoint<T>,
    /// Hops after the seed, in order; the last one is `picked`.
    pub trace: Vec<SpaceTimePoint<T>>,
    pub verified: bool,
    /// Whether some backward window reached below the first time slice.
    pub clipped: bool,
}

fn four_pow<T: Scalar>(k: u32) -> T {
    T::lit(4.0).powi(k as i32)
}

fn check_k(k: u32) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidConfig("k must be at least 1".into()));
    }
    Ok(())
}

/// First point, scanning time then node, with `t > 0` and `scal > 4^k / t`.
pub fn find_seed<T: Scalar>(field: &SpaceTimeField<T>, k: u32) -> Result<Option<SpaceTimePoint<T>>> {
    check_k(k)?;
    let bound = four_pow::<T>(k);
    for (j, &t) in field.times.iter().enumerate() {
        if t <= T::zero() {
            continue;
        }
        if let Some(i) = field.scal[j].iter().position(|&s| s > bound / t) {
            return Ok(Some(field.point(i, j)));
        }
    }
    Ok(None)
}

/// Time slices in `(t - k/S, t]`, the lower end clipped at the first slice.
fn window<T: Scalar>(
    field: &SpaceTimeField<T>,
    center: &SpaceTimePoint<T>,
    k: u32,
) -> (std::ops::RangeInclusive<usize>, bool) {
    let lower = center.t - T::count(k as usize) / center.scal;
    let first = field.times.partition_point(|&t| t <= lower);
    (first..=center.time, lower < field.times[0])
}

/// Nodes within `k / √S` of the center in the center's time slice.
fn ball<T: Scalar>(field: &SpaceTimeField<T>, center: &SpaceTimePoint<T>, k: u32) -> Vec<usize> {
    let radius = T::count(k as usize) / center.scal.sqrt();
    (0..field.node_count()).filter(|&i| field.dist(center.time, i, center.node) <= radius).collect()
}

pub fn pick<T: Scalar>(field: &SpaceTimeField<T>, k: u32, seed: SpaceTimePoint<T>) -> Result<PickResult<T>> {
    check_k(k)?;
    let valid_seed = seed.time < field.times.len()
        && seed.node < field.node_count()
        && seed.t > T::zero()
        && field.scal(seed.node, seed.time) == seed.scal
        && seed.scal > four_pow::<T>(k) / seed.t;
    if !valid_seed {
        return Err(Error::InvalidSeed { node: seed.node, t: seed.t.as_f64() });
    }
    let two = T::lit(2.0);
    let mut current = seed;
    let mut trace = Vec::new();
    let mut clipped = false;
    loop {
        let (times, clip) = window(field, &current, k);
        clipped |= clip;
        let nodes = ball(field, &current, k);
        let threshold = two * current.scal;
        let mut best: Option<SpaceTimePoint<T>> = None;
        for j in times {
            for &i in &nodes {
                let s = field.scal(i, j);
                if s >= threshold && best.is_none_or(|b| s > b.scal) {
                    best = Some(field.point(i, j));
                }
            }
        }
        match best {
            Some(next) => {
                trace.push(next);
                current = next;
            }
            None => break,
        }
    }
    let mut result = PickResult { k, seed, picked: current, trace, verified: false, clipped };
    result.verified = verify_pick(field, &result).is_empty();
    Ok(result)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Violation<T> {
    /// A point of the parabolic neighbourhood with `scal > 2 S`.
    Neighbourhood { point: SpaceTimePoint<T>, limit: T },
    /// `S < 4^k / t_k`.
    Scale { scal: T, required: T },
    /// `t̄ ∉ (0, t_k]`.
    Time { t: T },
}

/// Exhaustive check of the picked point against the neighbourhood bound and
/// `S ≥ 4^k / t_k`; an empty list means verified.
pub fn verify_pick<T: Scalar>(field: &SpaceTimeField<T>, result: &PickResult<T>) -> Vec<Violation<T>> {
    let k = result.k;
    let p = result.picked;
    let mut out = Vec::new();
    if !(p.t > T::zero() && p.t <= result.seed.t) {
        out.push(Violation::Time { t: p.t });
    }
    let required = four_pow::<T>(k) / result.seed.t;
    if p.scal < required {
        out.push(Violation::Scale { scal: p.scal, required });
    }
    let limit = T::lit(2.0) * p.scal;
    let (times, _) = window(field, &p, k);
    let nodes = ball(field, &p, k);
    for j in times {
        for &i in &nodes {
            if field.scal(i, j) > limit {
                out.push(Violation::Neighbourhood { point: field.point(i, j), limit });
            }
        }
    }
    out
}

/// Upper bound on the number of hops from the doubling argument.
pub fn hop_bound<T: Scalar>(field: &SpaceTimeField<T>, result: &PickResult<T>) -> T {
    let ratio = field.sup_scal() * result.seed.t / four_pow::<T>(result.k);
    ratio.max(T::one()).log2() + T::one()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PickBounds<T> {
    /// `t_k (1 - 2k / S_k)` as stated in the argument.
    pub eps_k: T,
    /// `t_k - 2k / S_k`, which follows from the doubling alone.
    pub eps_doubling: T,
    /// `e^{(N-1) t_k} k / √S_k / (1 - 1/√2)`.
    pub c_k: T,
    /// Hops with `τ_i < ε_k`; only checked when `t_k ≥ 1`, the range in
    /// which `ε_k ≤ t_k - 2k/S_k`.
    pub time_violations: Vec<usize>,
    pub eps_k_checked: bool,
    /// Hops with `τ_i < t_k - 2k/S_k`.
    pub doubling_violations: Vec<usize>,
    /// Hops farther than `C_k` from the seed at the seed time; only checked
    /// when the Ricci hypothesis held.
    pub distance_violations: Vec<usize>,
    pub ricci_hypothesis: Option<bool>,
}

impl<T> PickBounds<T> {
    pub fn hold(&self) -> bool {
        self.time_violations.is_empty() && self.doubling_violations.is_empty() && self.distance_violations.is_empty()
    }
}

pub fn pick_bounds<T: Scalar>(field: &SpaceTimeField<T>, result: &PickResult<T>) -> Result<PickBounds<T>> {
    let k = T::count(result.k as usize);
    let seed = result.seed;
    let two = T::lit(2.0);
    if seed.scal <= two * k {
        return Err(Error::NotApplicable(format!("seed curvature {} must exceed 2k = {}", seed.scal, two * k)));
    }
    let eps_k = seed.t * (T::one() - two * k / seed.scal);
    let eps_doubling = seed.t - two * k / seed.scal;
    let eps_k_checked = seed.t >= T::one();
    let growth = (T::count(field.dim - 1) * seed.t).exp();
    let c_k = growth * k / seed.scal.sqrt() / (T::one() - T::one() / two.sqrt());
    let below =
        |eps: T| -> Vec<usize> { result.trace.iter().enumerate().filter(|(_, h)| h.t < eps).map(|(i, _)| i).collect() };
    let distance_violations = if field.ricci_hypothesis == Some(true) {
        result
            .trace
            .iter()
            .enumerate()
            .filter(|(_, h)| field.dist(seed.time, seed.node, h.node) > c_k)
            .map(|(i, _)| i)
            .collect()
    } else {
        Vec::new()
    };
    Ok(PickBounds {
        eps_k,
        eps_doubling,
        c_k,
        time_violations: if eps_k_checked { below(eps_k) } else { Vec::new() },
        eps_k_checked,
        doubling_violations: below(eps_doubling),
        distance_violations,
        ricci_hypothesis: field.ricci_hypothesis,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize, step: f64) -> Vec<f64> {
        (0..n).map(|i| i as f64 * step).collect()
    }

    #[test]
    fn constant_field_has_no_seed_for_large_k() {
        let f = SpaceTimeField::synthetic(grid(41, 0.1)[1..].to_vec(), grid(10, 0.1), 3, |_, _| 1.0).unwrap();
        assert!(find_seed(&f, 2).unwrap().is_none());
    }

    #[test]
    fn neckpinch_seed_time() {
        let times: Vec<f64> = (1..1000).map(|j| j as f64 / 1000.0).collect();
        let f = SpaceTimeField::synthetic(times, grid(5, 0.1), 3, |_, t| 10.0 / (1.0 - t)).unwrap();
        let seed = find_seed(&f, 1).unwrap().unwrap();
        assert!(seed.t > 2.0 / 7.0);
        assert!(seed.t - 0.001 <= 2.0 / 7.0);
        assert_eq!(seed.node, 0);
    }

    #[test]
    fn seed_already_controlled() {
        let f = SpaceTimeField::synthetic(vec![0.5, 1.0], grid(5, 0.1), 3, |_, _| 10.0).unwrap();
        let seed = find_seed(&f, 1).unwrap().unwrap();
        let r = pick(&f, 1, seed).unwrap();
        assert!(r.trace.is_empty());
        assert_eq!(r.picked, seed);
        assert!(r.verified);
    }

    #[test]
    fn single_spike_one_hop() {
        let times = vec![0.9, 0.95, 1.0];
        let f = SpaceTimeField::synthetic(times, grid(11, 0.01), 3, |x, t| {
            if (x - 0.05).abs() < 1e-9 && (t - 0.95).abs() < 1e-9 {
                40.0
            } else {
                10.0
            }
        })
        .unwrap();
        let seed = f.point(0, 2);
        let r = pick(&f, 1, seed).unwrap();
        assert_eq!(r.trace.len(), 1);
        assert_eq!((r.picked.node, r.picked.time), (5, 1));
        assert!(r.verified);
    }

    #[test]
    fn perturbed_pick_is_rejected() {
        let times = vec![0.9, 0.95, 1.0];
        let f = SpaceTimeField::synthetic(times, grid(11, 0.01), 3, |x, t| {
            if (x - 0.05).abs() < 1e-9 && (t - 0.95).abs() < 1e-9 {
                40.0
            } else {
                10.0
            }
        })
        .unwrap();
        let seed = f.point(0, 2);
        let bogus = PickResult { k: 1, seed, picked: seed, trace: vec![], verified: false, clipped: false };
        let v = verify_pick(&f, &bogus);
        assert!(matches!(v.as_slice(), [Violation::Neighbourhood { .. }]));
    }

    #[test]
    fn rejects_invalid_seed() {
        let f = SpaceTimeField::synthetic(vec![1.0], grid(3, 0.1), 3, |_, _| 1.0).unwrap();
        assert!(pick(&f, 1, f.point(0, 0)).is_err());
    }

    #[test]
    fn bounds_example() {
        let f = SpaceTimeField::synthetic(vec![1.0], grid(3, 0.1), 3, |_, _| 100.0).unwrap();
        let r = pick(&f, 1, f.point(0, 0)).unwrap();
        let b = pick_bounds(&f, &r).unwrap();
        assert!((b.eps_k - 0.98).abs() < 1e-15);
        let expected = 2f64.exp() * 0.1 / (1.0 - 1.0 / 2f64.sqrt());
        assert!((b.c_k - expected).abs() < 1e-12);
        assert!((b.c_k - 2.523).abs() < 1e-3);
        assert!(b.hold());
    }

    #[test]
    fn bounds_not_applicable_for_small_curvature() {
        let f = SpaceTimeField::synthetic(vec![4.0], grid(3, 0.1), 3, |_, _| 1.5).unwrap();
        let r = pick(&f, 1, f.point(0, 0)).unwrap();
        assert!(matches!(pick_bounds(&f, &r), Err(Error::NotApplicable(_))));
    }

    #[test]
    fn window_clipping_recorded() {
        let f = SpaceTimeField::synthetic(vec![0.19, 0.2], grid(3, 0.1), 3, |_, _| 50.0).unwrap();
        let r = pick(&f, 1, f.point(0, 1)).unwrap();
        assert!(r.clipped);
    }
}
