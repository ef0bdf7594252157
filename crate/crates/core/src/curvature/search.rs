//! Minimization of sectional and complex sectional curvature over planes.
//!
//! Random sampling followed by normalized finite-difference descent on the
//! Gram–Schmidt chart of the (real or complex) Grassmannian.

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::algebraic::{sec_complex, wedge, AlgebraicCurvatureOperator, ComplexPlane, RealPlane};
use crate::error::{Error, Result};
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    Real,
    Complex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchConfig {
    pub samples: usize,
    pub refine_iters: usize,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self { samples: 512, refine_iters: 4000, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Plane<T> {
    Real(RealPlane<T>),
    Complex(ComplexPlane<T>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Extremum<T> {
    pub value: T,
    pub plane: Plane<T>,
}

const STEP_TOL: f64 = 1e-9;
const FD_STEP: f64 = 1e-6;
const INITIAL_STEP: f64 = 0.1;
const MAX_STEP: f64 = 0.5;
const STARTS: usize = 8;

/// Estimated minimum of `sec` (real mode) or `sec^c` (complex mode).
///
/// Complex mode seeds its candidate pool with the real-mode witness, so the
/// complex estimate never exceeds the real one for the same configuration.
pub fn extremal_sectional<T: Scalar>(
    op: &AlgebraicCurvatureOperator<T>,
    mode: SearchMode,
    config: &SearchConfig,
) -> Result<Extremum<T>> {
    if config.samples == 0 {
        return Err(Error::ZeroBudget);
    }
    let real = real_search(op, config)?;
    match mode {
        SearchMode::Real => Ok(real),
        SearchMode::Complex => complex_search(op, config, real),
    }
}

fn gaussian<T: Scalar>(rng: &mut ChaCha8Rng) -> T {
    let z: f64 = StandardNormal.sample(rng);
    T::lit(z)
}

fn real_objective<T: Scalar>(op: &AlgebraicCurvatureOperator<T>, x: &[T]) -> Option<(T, RealPlane<T>)> {
    let n = op.dim();
    let plane = RealPlane::new(x[..n].to_vec(), x[n..].to_vec()).ok()?;
    let w = wedge(&plane.u, &plane.v);
    Some((quadratic_form(op, &w), plane))
}

/// `⟨w, R w⟩`; equals `sec` for the wedge of an orthonormal pair.
fn quadratic_form<T: Scalar>(op: &AlgebraicCurvatureOperator<T>, w: &[T]) -> T {
    let m = op.wedge_dim();
    let mut sum = T::zero();
    for i in 0..m {
        for j in 0..m {
            sum += w[i] * op.entry(i, j) * w[j];
        }
    }
    sum
}

fn real_search<T: Scalar>(op: &AlgebraicCurvatureOperator<T>, config: &SearchConfig) -> Result<Extremum<T>> {
    let n = op.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut pool = Vec::new();
    for _ in 0..config.samples {
        let x: Vec<T> = (0..2 * n).map(|_| gaussian(&mut rng)).collect();
        if let Some((f, plane)) = real_objective(op, &x) {
            pool.push((f, pack_real(&plane)));
        }
    }
    if pool.is_empty() {
        return Err(Error::DegeneratePlane);
    }
    let (value, x) = refine(|x| real_objective(op, x).map(|(f, p)| (f, pack_real(&p))), pool, config.refine_iters);
    let plane = RealPlane::new(x[..n].to_vec(), x[n..].to_vec())?;
    Ok(Extremum { value, plane: Plane::Real(plane) })
}

fn pack_real<T: Scalar>(p: &RealPlane<T>) -> Vec<T> {
    let mut out = p.u.clone();
    out.extend_from_slice(&p.v);
    out
}

fn unpack_complex<T: Scalar>(x: &[T], n: usize) -> (Vec<Complex<T>>, Vec<Complex<T>>) {
    let u = (0..n).map(|i| Complex::new(x[2 * i], x[2 * i + 1])).collect();
    let v = (0..n).map(|i| Complex::new(x[2 * n + 2 * i], x[2 * n + 2 * i + 1])).collect();
    (u, v)
}

fn pack_complex<T: Scalar>(p: &ComplexPlane<T>) -> Vec<T> {
    p.u.iter().chain(&p.v).flat_map(|c| [c.re, c.im]).collect()
}

fn complex_objective<T: Scalar>(op: &AlgebraicCurvatureOperator<T>, x: &[T]) -> Option<(T, Vec<T>)> {
    let (u, v) = unpack_complex(x, op.dim());
    let plane = ComplexPlane::new(u, v).ok()?;
    let f = sec_complex(op, &plane).ok()?;
    Some((f, pack_complex(&plane)))
}

fn complex_search<T: Scalar>(
    op: &AlgebraicCurvatureOperator<T>,
    config: &SearchConfig,
    real: Extremum<T>,
) -> Result<Extremum<T>> {
    let n = op.dim();
    let start = match &real.plane {
        Plane::Real(p) => p.complexify(),
        Plane::Complex(p) => p.clone(),
    };
    let mut pool = vec![(sec_complex(op, &start)?, pack_complex(&start))];
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(1);
    for _ in 0..config.samples {
        let x: Vec<T> = (0..4 * n).map(|_| gaussian(&mut rng)).collect();
        if let Some(candidate) = complex_objective(op, &x) {
            pool.push(candidate);
        }
    }
    let (value, x) = refine(|x| complex_objective(op, x), pool, config.refine_iters);
    let (u, v) = unpack_complex(&x, n);
    Ok(Extremum { value, plane: Plane::Complex(ComplexPlane::new(u, v)?) })
}

/// Descends from the `STARTS` lowest candidates and keeps the best result.
/// The sort is stable, so earlier candidates win ties.
fn refine<T: Scalar, F>(objective: F, mut pool: Vec<(T, Vec<T>)>, max_iters: usize) -> (T, Vec<T>)
where
    F: Fn(&[T]) -> Option<(T, Vec<T>)>,
{
    pool.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    pool.truncate(STARTS);
    let mut best: Option<(T, Vec<T>)> = None;
    for (f0, x0) in pool {
        let (f, x) = descend(&objective, f0, x0, max_iters);
        if best.as_ref().is_none_or(|(b, _)| f < *b) {
            best = Some((f, x));
        }
    }
    best.expect("candidate pool is non-empty")
}

/// Normalized-gradient descent with a halving/growing step length. Only
/// improvements are accepted, so the returned value never exceeds `f0`.
fn descend<T: Scalar, F>(objective: &F, f0: T, x0: Vec<T>, max_iters: usize) -> (T, Vec<T>)
where
    F: Fn(&[T]) -> Option<(T, Vec<T>)>,
{
    let h = T::lit(FD_STEP);
    let two = T::lit(2.0);
    let (mut f, mut x) = (f0, x0);
    let mut step = T::lit(INITIAL_STEP);
    let mut grad = gradient(objective, &x, h);
    for _ in 0..max_iters {
        let gnorm = grad.iter().fold(T::zero(), |acc, &g| acc + g * g).sqrt();
        if !(gnorm > T::zero()) || step < T::lit(STEP_TOL) {
            break;
        }
        let trial: Vec<T> = x.iter().zip(&grad).map(|(&xi, &gi)| xi - step * gi / gnorm).collect();
        match objective(&trial) {
            Some((ft, xt)) if ft < f => {
                f = ft;
                x = xt;
                step = (step * T::lit(1.5)).min(T::lit(MAX_STEP));
                grad = gradient(objective, &x, h);
            }
            _ => step /= two,
        }
    }
    (f, x)
}

fn gradient<T: Scalar, F>(objective: &F, x: &[T], h: T) -> Vec<T>
where
    F: Fn(&[T]) -> Option<(T, Vec<T>)>,
{
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|i| {
            let orig = probe[i];
            probe[i] = orig + h;
            let fp = objective(&probe).map(|r| r.0);
            probe[i] = orig - h;
            let fm = objective(&probe).map(|r| r.0);
            probe[i] = orig;
            match (fp, fm) {
                (Some(p), Some(m)) => (p - m) / (h + h),
                _ => T::zero(),
            }
        })
        .collect()
}
