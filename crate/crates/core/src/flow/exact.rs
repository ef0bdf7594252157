//! Closed-form benchmark profiles with exact arc-length derivatives.

use std::sync::Arc;

use crate::curvature::{AnalyticDerivatives, Boundary, FiberSpec, WarpProfile};
use crate::error::{Error, Result};
use crate::Scalar;

/// `s ↦ [b, b_s, b_ss, b_sss]`.
pub type JetFn<T> = Arc<dyn Fn(T) -> [T; 4] + Send + Sync>;

#[derive(Clone)]
pub enum ExactKind<T> {
    /// `b = s`, round fiber: flat space.
    FlatCap,
    /// `b = sin(√K s)/√K` on `[0, π/√K]`: round sphere of curvature `K`.
    Sphere,
    /// `b = sinh(√K s)/√K`: hyperbolic space of curvature `-K`.
    Hyperbolic,
    /// `b = e^{-s}`, flat fiber: the curvature `-1` cusp.
    Cusp,
    /// User warp factor with a fiber of curvature `kappa`; capped when `b(s_0) = 0`.
    Custom { jet: JetFn<T>, kappa: T },
}

impl<T> std::fmt::Debug for ExactKind<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ExactKind::FlatCap => "FlatCap",
            ExactKind::Sphere => "Sphere",
            ExactKind::Hyperbolic => "Hyperbolic",
            ExactKind::Cusp => "Cusp",
            ExactKind::Custom { .. } => "Custom",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactParams<T> {
    pub nodes: usize,
    /// Total dimension `N = n + 1`.
    pub dim: usize,
    pub extent: (T, T),
    /// Curvature magnitude `K` of the model space (sphere, hyperbolic).
    pub curvature: T,
}

impl<T: Scalar> ExactParams<T> {
    pub fn new(nodes: usize, dim: usize, extent: (T, T)) -> Self {
        Self { nodes, dim, extent, curvature: T::one() }
    }
}

/// Builds a benchmark profile on a uniform arc-length grid (`a ≡ 1`).
pub fn exact_profile<T: Scalar>(kind: &ExactKind<T>, params: &ExactParams<T>) -> Result<WarpProfile<T>> {
    if params.dim < 2 {
        return Err(Error::DimensionOutOfRange { dim: params.dim, min: 2, max: usize::MAX });
    }
    let (s0, s1) = params.extent;
    if !(s1 > s0) || params.nodes < 2 {
        return Err(Error::InvalidConfig("extent must be increasing with at least two nodes".into()));
    }
    let n = params.dim - 1;
    let k = params.curvature;
    if !(k > T::zero()) {
        return Err(Error::InvalidConfig("model curvature magnitude must be positive".into()));
    }
    let rk = k.sqrt();
    let zero = T::zero();
    let capped_start = |name: &str| -> Result<()> {
        if s0 != zero {
            return Err(Error::InvalidConfig(format!("{name} profile must start at the tip s = 0")));
        }
        Ok(())
    };
    let (jet, fiber, boundary, right_tip): (JetFn<T>, FiberSpec<T>, Boundary<T>, bool) = match kind {
        ExactKind::FlatCap => {
            capped_start("flat cap")?;
            (
                Arc::new(|s| [s, T::one(), T::zero(), T::zero()]),
                FiberSpec::constant(n, T::one())?,
                Boundary::Capped,
                false,
            )
        }
        ExactKind::Sphere => {
            capped_start("sphere")?;
            let end = T::PI() / rk;
            if (s1 - end).abs() > T::lit(1e-12) * end {
                return Err(Error::InvalidConfig(format!("sphere requires s in [0, π/√K] = [0, {end}]")));
            }
            (
                Arc::new(move |s: T| {
                    let (sn, cs) = (rk * s).sin_cos();
                    [sn / rk, cs, -rk * sn, -k * cs]
                }),
                FiberSpec::constant(n, T::one())?,
                Boundary::Capped,
                true,
            )
        }
        ExactKind::Hyperbolic => {
            capped_start("hyperbolic")?;
            (
                Arc::new(move |s: T| {
                    let (sh, ch) = ((rk * s).sinh(), (rk * s).cosh());
                    [sh / rk, ch, rk * sh, k * ch]
                }),
                FiberSpec::constant(n, T::one())?,
                Boundary::Capped,
                false,
            )
        }
        ExactKind::Cusp => (
            Arc::new(|s: T| {
                let e = (-s).exp();
                [e, -e, e, -e]
            }),
            FiberSpec::constant(n, T::zero())?,
            Boundary::FrozenGhost,
            false,
        ),
        ExactKind::Custom { jet, kappa } => {
            let capped = jet(s0)[0] == zero;
            (
                jet.clone(),
                FiberSpec::constant(n, *kappa)?,
                if capped { Boundary::Capped } else { Boundary::FrozenGhost },
                capped && jet(s1)[0] == zero,
            )
        }
    };
    let m = params.nodes - 1;
    let h = (s1 - s0) / T::count(m);
    let xs: Vec<T> = (0..=m).map(|i| if i == m { s1 } else { s0 + h * T::count(i) }).collect();
    let jets: Vec<[T; 4]> = xs.iter().map(|&s| jet(s)).collect();
    let mut b: Vec<T> = jets.iter().map(|j| j[0]).collect();
    if matches!(boundary, Boundary::Capped) {
        b[0] = zero;
        if right_tip {
            b[m] = zero;
        }
    }
    let analytic = AnalyticDerivatives {
        b_s: jets.iter().map(|j| j[1]).collect(),
        b_ss: jets.iter().map(|j| j[2]).collect(),
        b_sss: jets.iter().map(|j| j[3]).collect(),
    };
    WarpProfile::from_parts_unchecked(xs, vec![T::one(); m + 1], b, fiber, boundary).with_analytic(analytic)
}
