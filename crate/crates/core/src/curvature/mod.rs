//! Curvature of warped products and of algebraic curvature operators.
//!
//! For `g = ds² + b(s)² h` with `φ = log b` the curvature operator is diagonal
//! on the wedges `∂_s ∧ X` (eigenvalue `-(φ″ + φ′²) = -b_ss/b`) and on the
//! fiber wedges `E_a` (eigenvalue `λ_a e^{-2φ} - φ′² = (λ_a - b_s²)/b²`).

mod algebraic;
mod profile;
mod search;

pub use algebraic::{
    pinching_upper_bound, random_bianchi_tensor, sec_complex, AlgebraicCurvatureOperator, ComplexPlane, RealPlane,
    MAX_RANDOM_DIM,
};
pub use profile::{
    fiber_pairs, AnalyticDerivatives, Boundary, FiberKind, FiberSpec, Jet, WarpProfile, STENCIL_HALF_WIDTH,
};
pub use search::{extremal_sectional, Extremum, Plane, SearchConfig, SearchMode};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Scalar;

/// Every curvature quantity of a warped product at one node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointCurvature<T> {
    /// Sectional curvature of planes containing the radial direction.
    pub k_rad: T,
    /// Curvature-operator eigenvalues on the fiber wedges.
    pub k_fib: Vec<T>,
    /// `ric(∂_s, ∂_s)` in a unit frame.
    pub ric_rr: T,
    /// `ric(e_i, e_i)` for the fiber frame.
    pub ric_fib: Vec<T>,
    pub scal: T,
    /// Operator eigenvalues in wedge-basis order: `k_rad` repeated `n` times, then `k_fib`.
    pub op_spectrum: Vec<T>,
}

impl<T: Scalar> PointCurvature<T> {
    pub fn from_jet(jet: &Jet<T>, fiber: &FiberSpec<T>) -> Self {
        let n = fiber.fiber_dim();
        let k_rad = -jet.ratio;
        let k_fib: Vec<T> = if jet.tip {
            vec![k_rad; n * (n - 1) / 2]
        } else {
            let b2 = jet.b * jet.b;
            let slope2 = jet.b_s * jet.b_s;
            fiber.spectrum().into_iter().map(|l| (l - slope2) / b2).collect()
        };
        let ric_rr = T::count(n) * k_rad;
        let mut ric_fib = vec![k_rad; n];
        for ((i, j), &k) in fiber_pairs(n).zip(&k_fib) {
            ric_fib[i] += k;
            ric_fib[j] += k;
        }
        let two = T::lit(2.0);
        let scal = two * (T::count(n) * k_rad + k_fib.iter().fold(T::zero(), |acc, &k| acc + k));
        let mut op_spectrum = vec![k_rad; n];
        op_spectrum.extend_from_slice(&k_fib);
        Self { k_rad, k_fib, ric_rr, ric_fib, scal, op_spectrum }
    }

    /// Scalar curvature as the trace of the Ricci tensor.
    pub fn scal_from_ricci(&self) -> T {
        self.ric_fib.iter().fold(self.ric_rr, |acc, &r| acc + r)
    }

    pub fn min_eigenvalue(&self) -> T {
        self.op_spectrum.iter().fold(T::infinity(), |m, &v| m.min(v))
    }

    pub fn max_eigenvalue(&self) -> T {
        self.op_spectrum.iter().fold(T::neg_infinity(), |m, &v| m.max(v))
    }

    /// Operator norm `|Rm|` of the curvature operator.
    pub fn norm(&self) -> T {
        self.op_spectrum.iter().fold(T::zero(), |m, &v| m.max(v.abs()))
    }

    pub fn min_ricci(&self) -> T {
        self.ric_fib.iter().fold(self.ric_rr, |m, &r| m.min(r))
    }

    /// Eigenvalues grouped with multiplicities (exact equality).
    pub fn spectrum_multiplicities(&self) -> Vec<(T, usize)> {
        let mut sorted = self.op_spectrum.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        let mut out: Vec<(T, usize)> = Vec::new();
        for v in sorted {
            match out.last_mut() {
                Some((w, c)) if *w == v => *c += 1,
                _ => out.push((v, 1)),
            }
        }
        out
    }

    /// The diagonal operator on `Λ²R^N` with this spectrum (radial index 0).
    pub fn operator(&self) -> AlgebraicCurvatureOperator<T> {
        AlgebraicCurvatureOperator::diagonal(self.ric_fib.len() + 1, &self.op_spectrum)
            .expect("spectrum length matches wedge dimension")
    }
}

/// Curvature of `profile` at `node`; tips use the smooth-closure limits.
pub fn warped_curvature<T: Scalar>(profile: &WarpProfile<T>, node: usize) -> Result<PointCurvature<T>> {
    let jet = profile.jet(node)?;
    Ok(PointCurvature::from_jet(&jet, profile.fiber()))
}

/// Curvature at every node; `None` marks nodes whose stencil reaches a frozen end.
pub fn curvature_field<T: Scalar>(profile: &WarpProfile<T>) -> Result<Vec<Option<PointCurvature<T>>>> {
    Ok(profile.jets()?.into_iter().map(|j| j.map(|j| PointCurvature::from_jet(&j, profile.fiber()))).collect())
}

/// Scalar curvature at every valid node.
pub fn profile_scalar_field<T: Scalar>(profile: &WarpProfile<T>) -> Result<Vec<Option<T>>> {
    Ok(curvature_field(profile)?.into_iter().map(|c| c.map(|c| c.scal)).collect())
}

/// Objects that transform under the metric scaling `g ↦ k² g`.
pub trait Rescale<T: Scalar>: Sized {
    fn rescale(&self, k: T) -> Result<Self>;
}

fn check_scale<T: Scalar>(k: T) -> Result<()> {
    if k > T::zero() && k.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveScale(k.as_f64()))
    }
}

impl<T: Scalar> Rescale<T> for WarpProfile<T> {
    fn rescale(&self, k: T) -> Result<Self> {
        check_scale(k)?;
        self.rescaled(k)
    }
}

impl<T: Scalar> Rescale<T> for AlgebraicCurvatureOperator<T> {
    fn rescale(&self, k: T) -> Result<Self> {
        check_scale(k)?;
        Ok(self.scaled(T::one() / (k * k)))
    }
}

impl<T: Scalar> Rescale<T> for PointCurvature<T> {
    fn rescale(&self, k: T) -> Result<Self> {
        check_scale(k)?;
        let f = T::one() / (k * k);
        let sc = |v: &[T]| v.iter().map(|&x| x * f).collect::<Vec<T>>();
        Ok(Self {
            k_rad: self.k_rad * f,
            k_fib: sc(&self.k_fib),
            ric_rr: self.ric_rr * f,
            ric_fib: sc(&self.ric_fib),
            scal: self.scal * f,
            op_spectrum: sc(&self.op_spectrum),
        })
    }
}

#[cfg(test)]
mod tests;
