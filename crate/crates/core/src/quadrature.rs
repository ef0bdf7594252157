//! Quadrature on sampled grids and adaptive quadrature for closed-form integrands.

use crate::Scalar;

const INTERP_POINTS: usize = 6;

/// Four-point Gauss–Legendre nodes and weights on `[-1, 1]`.
const GAUSS4: [(f64, f64); 4] = [
    (-0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
    (-0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
];

/// Degree-5 piecewise Lagrange interpolation of samples on a strictly
/// increasing grid. Integrals of the interpolant are exact (Gauss, degree 7).
#[derive(Debug, Clone)]
pub struct GridInterpolant<'a, T: Scalar> {
    xs: &'a [T],
    ys: &'a [T],
}

impl<'a, T: Scalar> GridInterpolant<'a, T> {
    pub fn new(xs: &'a [T], ys: &'a [T]) -> Self {
        debug_assert_eq!(xs.len(), ys.len());
        debug_assert!(xs.len() >= 2);
        Self { xs, ys }
    }

    /// Index of the cell `[x_i, x_{i+1}]` containing `x` (clamped).
    pub fn cell(&self, x: T) -> usize {
        let n = self.xs.len();
        match self.xs.partition_point(|&xi| xi <= x) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        }
    }

    fn stencil(&self, cell: usize) -> (usize, usize) {
        let n = self.xs.len();
        let width = INTERP_POINTS.min(n);
        let half = width / 2;
        let start = cell.saturating_sub(half - 1).min(n - width);
        (start, start + width)
    }

    fn eval_in_cell(&self, cell: usize, x: T) -> T {
        let (lo, hi) = self.stencil(cell);
        let mut sum = T::zero();
        for j in lo..hi {
            let mut basis = T::one();
            for m in lo..hi {
                if m != j {
                    basis *= (x - self.xs[m]) / (self.xs[j] - self.xs[m]);
                }
            }
            sum += basis * self.ys[j];
        }
        sum
    }

    pub fn eval(&self, x: T) -> T {
        self.eval_in_cell(self.cell(x), x)
    }

    fn integrate_in_cell(&self, cell: usize, from: T, to: T) -> T {
        let half = (to - from) / T::lit(2.0);
        let mid = (to + from) / T::lit(2.0);
        GAUSS4.iter().fold(T::zero(), |acc, &(node, weight)| {
            acc + T::lit(weight) * self.eval_in_cell(cell, mid + half * T::lit(node))
        }) * half
    }

    /// Integral of the interpolant over `[from, to]` (`from <= to`, both inside the grid).
    pub fn integrate(&self, from: T, to: T) -> T {
        if to <= from {
            return T::zero();
        }
        let c0 = self.cell(from);
        let c1 = self.cell(to);
        if c0 == c1 {
            return self.integrate_in_cell(c0, from, to);
        }
        let mut total = self.integrate_in_cell(c0, from, self.xs[c0 + 1]);
        for c in c0 + 1..c1 {
            total += self.integrate_in_cell(c, self.xs[c], self.xs[c + 1]);
        }
        total + self.integrate_in_cell(c1, self.xs[c1], to)
    }

    /// Cumulative integral at every node, starting from zero at the first node.
    pub fn cumulative(&self) -> Vec<T> {
        let mut out = Vec::with_capacity(self.xs.len());
        let mut acc = T::zero();
        out.push(acc);
        for c in 0..self.xs.len() - 1 {
            acc += self.integrate_in_cell(c, self.xs[c], self.xs[c + 1]);
            out.push(acc);
        }
        out
    }
}

/// Trapezoidal cumulative integral.
pub fn cumulative_trapezoid<T: Scalar>(xs: &[T], ys: &[T]) -> Vec<T> {
    let mut out = Vec::with_capacity(xs.len());
    let mut acc = T::zero();
    out.push(acc);
    for i in 1..xs.len() {
        acc += (xs[i] - xs[i - 1]) * (ys[i] + ys[i - 1]) / T::lit(2.0);
        out.push(acc);
    }
    out
}

/// Adaptive Simpson quadrature with Richardson correction.
pub fn adaptive_simpson<T: Scalar, F: Fn(T) -> T>(f: &F, a: T, b: T, rel_tol: T) -> T {
    if b <= a {
        return T::zero();
    }
    let fa = f(a);
    let fb = f(b);
    let m = (a + b) / T::lit(2.0);
    let fm = f(m);
    let whole = (b - a) / T::lit(6.0) * (fa + T::lit(4.0) * fm + fb);
    let scale = whole.abs().max(T::min_positive_value());
    simpson_step(f, a, b, fa, fm, fb, whole, rel_tol * scale, 60)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<T: Scalar, F: Fn(T) -> T>(f: &F, a: T, b: T, fa: T, fm: T, fb: T, whole: T, tol: T, depth: u32) -> T {
    let two = T::lit(2.0);
    let m = (a + b) / two;
    let lm = (a + m) / two;
    let rm = (m + b) / two;
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / T::lit(6.0) * (fa + T::lit(4.0) * flm + fm);
    let right = (b - m) / T::lit(6.0) * (fm + T::lit(4.0) * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= T::lit(15.0) * tol {
        return left + right + delta / T::lit(15.0);
    }
    simpson_step(f, a, m, fa, flm, fm, left, tol / two, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, tol / two, depth - 1)
}

/// Surface area of the unit sphere `S^k` in `R^{k+1}`.
pub fn unit_sphere_area<T: Scalar>(k: usize) -> T {
    let two_pi = T::lit(2.0) * T::PI();
    let mut area = if k.is_multiple_of(2) { T::lit(2.0) } else { two_pi };
    let mut j = if k.is_multiple_of(2) { 0 } else { 1 };
    while j < k {
        j += 2;
        area = area * two_pi / T::count(j - 1);
    }
    area
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_areas() {
        assert!((unit_sphere_area::<f64>(0) - 2.0).abs() < 1e-15);
        assert!((unit_sphere_area::<f64>(1) - 2.0 * std::f64::consts::PI).abs() < 1e-14);
        assert!((unit_sphere_area::<f64>(2) - 4.0 * std::f64::consts::PI).abs() < 1e-14);
        let s3 = 2.0 * std::f64::consts::PI.powi(2);
        assert!((unit_sphere_area::<f64>(3) - s3).abs() < 1e-13);
        let s4 = 8.0 * std::f64::consts::PI.powi(2) / 3.0;
        assert!((unit_sphere_area::<f64>(4) - s4).abs() < 1e-12);
    }

    #[test]
    fn interpolant_integrates_quintics_exactly() {
        let xs: Vec<f64> = (0..20).map(|i| (i as f64 * 0.37).powf(1.2)).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x.powi(5) - 3.0 * x * x + 1.0).collect();
        let g = GridInterpolant::new(&xs, &ys);
        let anti = |x: f64| x.powi(6) / 6.0 - x.powi(3) + x;
        let (a, b) = (0.21, 4.4);
        let rel = (g.integrate(a, b) - (anti(b) - anti(a))).abs() / (anti(b) - anti(a)).abs();
        assert!(rel < 1e-12, "rel = {rel}");
    }

    #[test]
    fn adaptive_simpson_sinh_squared() {
        let v = adaptive_simpson(&|s: f64| s.sinh().powi(2), 0.0, 1.0, 1e-12);
        let exact = (2.0f64.sinh() - 2.0) / 4.0;
        assert!((v - exact).abs() / exact < 1e-11);
    }

    #[test]
    fn trapezoid_linear_exact() {
        let xs = [0.0f64, 0.5, 2.0];
        let ys = [1.0, 2.0, 5.0];
        let c = cumulative_trapezoid(&xs, &ys);
        assert!((c[2] - (2.0 + 4.0)).abs() < 1e-14);
    }
}
