//! Discretized warped-product metrics `g = a(x)² dx² + b(x)² h`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{cumulative_trapezoid, unit_sphere_area, GridInterpolant};
use crate::stencil::fornberg_weights;
use crate::Scalar;

/// Half width of the interior derivative stencil (five points, fourth order).
pub const STENCIL_HALF_WIDTH: usize = 2;
/// Smallest grid on which every tip stencil stays inside the data.
pub const MIN_NODES: usize = 4 * STENCIL_HALF_WIDTH + 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FiberKind<T> {
    /// Space form of sectional curvature `κ`.
    ConstantCurvature(T),
    /// Einstein fiber whose curvature operator is diagonal on the coordinate
    /// wedges `e_i ∧ e_j` (lexicographic `i < j`) with the given eigenvalues.
    EinsteinSpectrum(Vec<T>),
}

/// The fiber `(N, h)` of a warped product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiberSpec<T> {
    fiber_dim: usize,
    kind: FiberKind<T>,
    volume: Option<T>,
}

impl<T: Scalar> FiberSpec<T> {
    pub fn constant(fiber_dim: usize, kappa: T) -> Result<Self> {
        if fiber_dim == 0 {
            return Err(Error::InvalidFiber("fiber dimension must be at least 1".into()));
        }
        if !kappa.is_finite() {
            return Err(Error::InvalidFiber("curvature must be finite".into()));
        }
        Ok(Self { fiber_dim, kind: FiberKind::ConstantCurvature(kappa), volume: None })
    }

    pub fn einstein(fiber_dim: usize, spectrum: Vec<T>) -> Result<Self> {
        if fiber_dim == 0 {
            return Err(Error::InvalidFiber("fiber dimension must be at least 1".into()));
        }
        let wedges = fiber_dim * (fiber_dim - 1) / 2;
        if spectrum.len() != wedges {
            return Err(Error::InvalidFiber(format!("spectrum has {} entries, expected {wedges}", spectrum.len())));
        }
        if spectrum.iter().any(|l| !l.is_finite()) {
            return Err(Error::InvalidFiber("spectrum entries must be finite".into()));
        }
        let spec = Self { fiber_dim, kind: FiberKind::EinsteinSpectrum(spectrum), volume: None };
        let sums: Vec<T> = (0..fiber_dim).map(|i| spec.fiber_ricci_sum(i)).collect();
        let scale = sums.iter().fold(T::one(), |m, s| m.max(s.abs()));
        if sums.iter().any(|&s| (s - sums[0]).abs() > T::lit(1e-9) * scale) {
            return Err(Error::InvalidFiber("spectrum is not Einstein (unequal Ricci sums)".into()));
        }
        Ok(spec)
    }

    /// Overrides the total fiber volume used in volume integrals.
    pub fn with_volume(mut self, volume: T) -> Self {
        self.volume = Some(volume);
        self
    }

    pub fn fiber_dim(&self) -> usize {
        self.fiber_dim
    }

    pub fn total_dim(&self) -> usize {
        self.fiber_dim + 1
    }

    pub fn kind(&self) -> &FiberKind<T> {
        &self.kind
    }

    pub fn kappa(&self) -> Option<T> {
        match self.kind {
            FiberKind::ConstantCurvature(k) => Some(k),
            FiberKind::EinsteinSpectrum(_) => None,
        }
    }

    /// Curvature-operator eigenvalues of `h` on its wedge basis.
    pub fn spectrum(&self) -> Vec<T> {
        let wedges = self.fiber_dim * (self.fiber_dim - 1) / 2;
        match &self.kind {
            FiberKind::ConstantCurvature(k) => vec![*k; wedges],
            FiberKind::EinsteinSpectrum(l) => l.clone(),
        }
    }

    fn fiber_ricci_sum(&self, i: usize) -> T {
        let spectrum = self.spectrum();
        fiber_pairs(self.fiber_dim)
            .zip(spectrum)
            .filter(|((p, q), _)| *p == i || *q == i)
            .fold(T::zero(), |acc, (_, l)| acc + l)
    }

    /// Volume of `(N, h)`: round sphere of radius `κ^{-1/2}` when `κ > 0`,
    /// otherwise the flat torus `(2π)^n`, unless overridden.
    pub fn volume(&self) -> T {
        if let Some(v) = self.volume {
            return v;
        }
        match self.kappa() {
            Some(k) if k > T::zero() => {
                unit_sphere_area::<T>(self.fiber_dim) * k.powf(-T::count(self.fiber_dim) / T::lit(2.0))
            }
            _ => (T::lit(2.0) * T::PI()).powi(self.fiber_dim as i32),
        }
    }

    /// Length of a closed geodesic loop in `(N, h)`.
    pub fn loop_length(&self) -> T {
        match self.kappa() {
            Some(k) if k > T::zero() => T::lit(2.0) * T::PI() / k.sqrt(),
            _ => T::lit(2.0) * T::PI(),
        }
    }
}

/// Lexicographic pairs `(i, j)`, `i < j < n`.
pub fn fiber_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Boundary<T> {
    /// Smooth closure at `x_0` (`b_0 = 0`, `b_s = 1`); the right end is a
    /// second tip when `b_m = 0` and a frozen end otherwise.
    Capped,
    /// Node `m + 1` is node `0` shifted by `period`.
    Periodic { period: T },
    /// Both ends held at their initial data.
    FrozenGhost,
}

/// Exact first, second and third arc-length derivatives of `b` at every node.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticDerivatives<T> {
    pub b_s: Vec<T>,
    pub b_ss: Vec<T>,
    pub b_sss: Vec<T>,
}

/// Local arc-length jet of the warp factor at one node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet<T> {
    pub b: T,
    pub b_s: T,
    pub b_ss: T,
    /// `b_ss / b`, or its smooth-closure limit at a tip.
    pub ratio: T,
    pub tip: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WarpProfile<T: Scalar> {
    x: Vec<T>,
    a: Vec<T>,
    b: Vec<T>,
    fiber: FiberSpec<T>,
    boundary: Boundary<T>,
    analytic: Option<AnalyticDerivatives<T>>,
}

impl<T: Scalar> WarpProfile<T> {
    pub fn new(x: Vec<T>, a: Vec<T>, b: Vec<T>, fiber: FiberSpec<T>, boundary: Boundary<T>) -> Result<Self> {
        let profile = Self { x, a, b, fiber, boundary, analytic: None };
        profile.validate()?;
        Ok(profile)
    }

    /// Attaches exact derivatives; `b` is then read in arc length.
    pub fn with_analytic(mut self, analytic: AnalyticDerivatives<T>) -> Result<Self> {
        let n = self.len();
        if analytic.b_s.len() != n || analytic.b_ss.len() != n || analytic.b_sss.len() != n {
            return Err(Error::InvalidProfile("analytic derivative arrays have wrong length".into()));
        }
        self.analytic = Some(analytic);
        self.validate()?;
        Ok(self)
    }

    /// Same metric with derivatives recomputed by finite differences.
    pub fn without_analytic(mut self) -> Self {
        self.analytic = None;
        self
    }

    pub(crate) fn from_parts_unchecked(
        x: Vec<T>,
        a: Vec<T>,
        b: Vec<T>,
        fiber: FiberSpec<T>,
        boundary: Boundary<T>,
    ) -> Self {
        Self { x, a, b, fiber, boundary, analytic: None }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.x.len();
        if n < MIN_NODES {
            return Err(Error::InvalidProfile(format!("need at least {MIN_NODES} nodes, got {n}")));
        }
        if self.a.len() != n || self.b.len() != n {
            return Err(Error::InvalidProfile("x, a, b must have equal length".into()));
        }
        if self.x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidProfile("grid must be strictly increasing".into()));
        }
        if let Some(i) = self.a.iter().position(|&a| !(a > T::zero()) || !a.is_finite()) {
            return Err(Error::InvalidProfile(format!("a must be positive (node {i})")));
        }
        if self.b.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidProfile("b must be finite".into()));
        }
        match self.boundary {
            Boundary::Capped => {
                if self.b[0] != T::zero() {
                    return Err(Error::InvalidProfile("capped profile requires b_0 = 0".into()));
                }
                match self.fiber.kappa() {
                    Some(k) if k > T::zero() => {}
                    _ => return Err(Error::InvalidProfile("capped profile requires a round fiber (κ > 0)".into())),
                }
                let slope = self.tip_slope(0);
                if (slope.abs() - T::one()).abs() > T::lit(1e-3) {
                    return Err(Error::InvalidProfile(format!("smooth closure requires b_s(0) = 1, got {slope}")));
                }
            }
            Boundary::Periodic { period } => {
                if !(period > self.x[n - 1] - self.x[0]) {
                    return Err(Error::InvalidProfile("period must exceed the grid extent".into()));
                }
            }
            Boundary::FrozenGhost => {}
        }
        for i in 0..n {
            if !self.is_tip(i) && !(self.b[i] > T::zero()) {
                return Err(Error::NonPositiveWarp { node: i, value: self.b[i].as_f64() });
            }
        }
        Ok(())
    }

    /// Normalized slope `b_s / κ^{1/2}` at a tip node; smooth closure needs 1.
    fn tip_slope(&self, node: usize) -> T {
        let kappa_root = self.fiber.kappa().map(|k| k.sqrt()).unwrap_or_else(T::one);
        if let Some(an) = &self.analytic {
            return an.b_s[node] / kappa_root;
        }
        match self.coordinate_slope(node) {
            Some(bx) => bx / self.a[node] / kappa_root,
            None => T::nan(),
        }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn x(&self) -> &[T] {
        &self.x
    }

    pub fn a(&self) -> &[T] {
        &self.a
    }

    pub fn b(&self) -> &[T] {
        &self.b
    }

    pub fn fiber(&self) -> &FiberSpec<T> {
        &self.fiber
    }

    pub fn boundary(&self) -> Boundary<T> {
        self.boundary
    }

    pub fn analytic(&self) -> Option<&AnalyticDerivatives<T>> {
        self.analytic.as_ref()
    }

    pub fn total_dim(&self) -> usize {
        self.fiber.total_dim()
    }

    pub(crate) fn set_coefficients(&mut self, a: Vec<T>, b: Vec<T>) {
        self.a = a;
        self.b = b;
        self.analytic = None;
    }

    /// Whether node `i` is a smooth tip (`b = 0` closing the manifold).
    pub fn is_tip(&self, i: usize) -> bool {
        match self.boundary {
            Boundary::Capped => (i == 0) || (i + 1 == self.len() && self.b[i] == T::zero()),
            _ => false,
        }
    }

    pub fn right_is_tip(&self) -> bool {
        self.is_tip(self.len() - 1)
    }

    /// Whether an end is held fixed (no closure, no wrap).
    pub fn end_is_frozen(&self, right: bool) -> bool {
        match self.boundary {
            Boundary::Capped => right && !self.right_is_tip(),
            Boundary::Periodic { .. } => false,
            Boundary::FrozenGhost => true,
        }
    }

    /// Arc length `s(x)` by trapezoidal accumulation of `a`.
    pub fn arc_length(&self) -> Vec<T> {
        cumulative_trapezoid(&self.x, &self.a)
    }

    /// Smallest arc-length spacing between neighbouring nodes.
    pub fn min_spacing(&self) -> T {
        let s = self.arc_length();
        s.windows(2).fold(T::infinity(), |m, w| m.min(w[1] - w[0]))
    }

    /// Coordinate `x` at which the arc length from `x_0` equals `s`.
    pub fn x_at_arc_length(&self, s: T) -> Result<T> {
        let arc = self.arc_length();
        let total = arc[arc.len() - 1];
        if s < T::zero() || s > total * (T::one() + T::lit(1e-12)) {
            return Err(Error::OutOfGrid(format!("arc length {s} outside [0, {total}]")));
        }
        let s = s.min(total);
        let i = arc.partition_point(|&v| v <= s).clamp(1, arc.len() - 1) - 1;
        let dx = self.x[i + 1] - self.x[i];
        let (a0, a1) = (self.a[i], self.a[i + 1]);
        let target = s - arc[i];
        // s(x_i + u) = a0 u + (a1 - a0) u² / (2 dx)
        let q = (a1 - a0) / (T::lit(2.0) * dx);
        let u = if q.abs() <= T::epsilon() * a0 / dx {
            target / a0
        } else {
            T::lit(2.0) * target / (a0 + (a0 * a0 + T::lit(4.0) * q * target).max(T::zero()).sqrt())
        };
        Ok(self.x[i] + u.max(T::zero()).min(dx))
    }

    /// Arc length of the coordinate point `x` measured from `x_0`.
    pub fn arc_length_at(&self, x: T) -> Result<T> {
        let n = self.len();
        if x < self.x[0] || x > self.x[n - 1] {
            return Err(Error::OutOfGrid(format!("x = {x} outside grid")));
        }
        let arc = self.arc_length();
        let i = self.x.partition_point(|&v| v <= x).clamp(1, n - 1) - 1;
        let dx = self.x[i + 1] - self.x[i];
        let u = x - self.x[i];
        Ok(arc[i] + self.a[i] * u + (self.a[i + 1] - self.a[i]) * u * u / (T::lit(2.0) * dx))
    }

    /// Linear interpolation of a nodal field at coordinate `x`.
    pub fn interpolate(&self, values: &[T], x: T) -> Result<T> {
        let n = self.len();
        if x < self.x[0] || x > self.x[n - 1] {
            return Err(Error::OutOfGrid(format!("x = {x} outside grid")));
        }
        let i = self.x.partition_point(|&v| v <= x).clamp(1, n - 1) - 1;
        let w = (x - self.x[i]) / (self.x[i + 1] - self.x[i]);
        Ok(values[i] * (T::one() - w) + values[i + 1] * w)
    }

    /// `Vol(fiber) · ∫ f a bⁿ dx` over `[x_from, x_to]` for a nodal field `f`.
    pub fn weighted_volume(&self, f: Option<&[T]>, x_from: T, x_to: T) -> Result<T> {
        self.volume_integral(f, 0..=self.len() - 1, x_from, x_to)
    }

    /// As [`weighted_volume`](Self::weighted_volume), interpolating only over
    /// the nodes in `nodes` (so `f` is read only there).
    pub fn volume_integral(
        &self,
        f: Option<&[T]>,
        nodes: std::ops::RangeInclusive<usize>,
        x_from: T,
        x_to: T,
    ) -> Result<T> {
        let (lo, hi) = (*nodes.start(), *nodes.end());
        if hi >= self.len() || hi <= lo {
            return Err(Error::OutOfGrid(format!("node range {lo}..={hi}")));
        }
        let tol = T::lit(1e-12) * (T::one() + self.x[hi].abs());
        if x_from < self.x[lo] - tol || x_to > self.x[hi] + tol || x_to < x_from {
            return Err(Error::OutOfGrid(format!("[{x_from}, {x_to}] outside nodes {lo}..={hi}")));
        }
        let k = self.fiber.fiber_dim() as i32;
        let density: Vec<T> = (lo..=hi)
            .map(|i| {
                let base = self.a[i] * self.b[i].powi(k);
                f.map_or(base, |f| base * f[i])
            })
            .collect();
        let x_from = x_from.max(self.x[lo]);
        let x_to = x_to.min(self.x[hi]);
        Ok(GridInterpolant::new(&self.x[lo..=hi], &density).integrate(x_from, x_to) * self.fiber.volume())
    }

    /// Stencil `(node, coordinate, reflected)` at offsets `-half..=half`
    /// around node `i`, mirroring across tips and wrapping periodic ends.
    pub(crate) fn stencil_points(&self, i: usize, half: usize) -> Option<Vec<(usize, T, bool)>> {
        let m = self.len() as isize - 1;
        let mut out = Vec::with_capacity(2 * half + 1);
        for off in -(half as isize)..=(half as isize) {
            let j = i as isize + off;
            if (0..=m).contains(&j) {
                out.push((j as usize, self.x[j as usize], false));
            } else if j < 0 {
                match self.boundary {
                    Boundary::Capped if -j <= m => {
                        let r = (-j) as usize;
                        out.push((r, self.x[0] + self.x[0] - self.x[r], true));
                    }
                    Boundary::Periodic { period } => {
                        let w = (j + m + 1) as usize;
                        out.push((w, self.x[w] - period, false));
                    }
                    _ => return None,
                }
            } else {
                match self.boundary {
                    Boundary::Capped if self.right_is_tip() && j <= 2 * m => {
                        let r = (2 * m - j) as usize;
                        let last = m as usize;
                        out.push((r, self.x[last] + self.x[last] - self.x[r], true));
                    }
                    Boundary::Periodic { period } => {
                        let w = (j - m - 1) as usize;
                        out.push((w, self.x[w] + period, false));
                    }
                    _ => return None,
                }
            }
        }
        Some(out)
    }

    /// Arc-length derivative of a nodal field at every node. `odd` marks
    /// fields that change sign under reflection through a tip.
    fn derivative(&self, field: &[Option<T>], odd: bool) -> Vec<Option<T>> {
        (0..self.len())
            .map(|i| {
                let pts = self.stencil_points(i, STENCIL_HALF_WIDTH)?;
                let xs: Vec<T> = pts.iter().map(|p| p.1).collect();
                let w = fornberg_weights(self.x[i], &xs, 1);
                let mut acc = T::zero();
                for (k, &(j, _, reflected)) in pts.iter().enumerate() {
                    let v = field[j]?;
                    acc += w[1][k] * if reflected && odd { -v } else { v };
                }
                Some(acc / self.a[i])
            })
            .collect()
    }

    /// Arc-length jet at node `i`.
    pub fn jet(&self, i: usize) -> Result<Jet<T>> {
        let n = self.len();
        if i >= n {
            return Err(Error::NodeOutOfRange { node: i, len: n });
        }
        self.jets()?[i].ok_or(Error::StencilUnderflow { node: i })
    }

    /// Jets at every node; `None` where the stencil reaches a frozen end.
    ///
    /// Without analytic data `b_s = D b / a` and `b_ss = D b_s / a` with the
    /// same five-point operator `D`; a tip takes `b_ss / b → b_sss / b_s`.
    pub fn jets(&self) -> Result<Vec<Option<Jet<T>>>> {
        let n = self.len();
        for i in 0..n {
            if !self.is_tip(i) && !(self.b[i] > T::zero()) {
                return Err(Error::NonPositiveWarp { node: i, value: self.b[i].as_f64() });
            }
        }
        if let Some(an) = &self.analytic {
            return Ok((0..n)
                .map(|i| {
                    let tip = self.is_tip(i);
                    let (b_s, b_ss) = (an.b_s[i], an.b_ss[i]);
                    let ratio = if tip { an.b_sss[i] / b_s } else { b_ss / self.b[i] };
                    Some(Jet { b: self.b[i], b_s, b_ss, ratio, tip })
                })
                .collect());
        }
        let b: Vec<Option<T>> = self.b.iter().map(|&v| Some(v)).collect();
        let b_s = self.derivative(&b, true);
        let b_ss = self.derivative(&b_s, false);
        let b_sss = if self.is_tip(0) || self.right_is_tip() { self.derivative(&b_ss, true) } else { vec![None; n] };
        Ok((0..n)
            .map(|i| {
                let (b_s, b_ss) = (b_s[i]?, b_ss[i]?);
                let tip = self.is_tip(i);
                let ratio = if tip { b_sss[i]? / b_s } else { b_ss / self.b[i] };
                Some(Jet { b: self.b[i], b_s, b_ss, ratio, tip })
            })
            .collect())
    }

    /// Centered five-point `b_x` at node `i`, mirrored through tips.
    pub(crate) fn coordinate_slope(&self, i: usize) -> Option<T> {
        let pts = self.stencil_points(i, STENCIL_HALF_WIDTH)?;
        let xs: Vec<T> = pts.iter().map(|p| p.1).collect();
        let w = fornberg_weights(self.x[i], &xs, 1);
        Some(
            pts.iter()
                .enumerate()
                .fold(T::zero(), |acc, (k, &(j, _, r))| acc + w[1][k] * if r { -self.b[j] } else { self.b[j] }),
        )
    }

    /// Metric `k² g`: coefficients and grid arc length scale by `k`.
    pub fn rescaled(&self, k: T) -> Result<Self> {
        if !(k > T::zero()) {
            return Err(Error::NonPositiveScale(k.as_f64()));
        }
        let mut out = self.clone();
        out.a.iter_mut().for_each(|v| *v *= k);
        out.b.iter_mut().for_each(|v| *v *= k);
        if let Some(an) = out.analytic.as_mut() {
            an.b_ss.iter_mut().for_each(|v| *v /= k);
            an.b_sss.iter_mut().for_each(|v| *v /= k * k);
        }
        Ok(out)
    }
}
