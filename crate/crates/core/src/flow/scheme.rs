//! Method-of-lines discretization in the fixed coordinate `x`.
//!
//! Besides `a` and `b` the scheme carries the slope `u = b_s` and evolves
//!
//! ```text
//! ∂t a = n a u_s / b
//! ∂t b = u_s + (n - 1)(u² - κ) / b
//! ∂t u = u_ss + (n - 2) u u_s / b - (n - 1)(u² - κ) u / b²
//! ```
//!
//! so `b` is never differentiated during a step. At a tip `b = 0` and
//! `u = ±√κ` stay pinned and `u_s / b` is replaced by its limit `u_ss / u`.

use crate::curvature::{WarpProfile, STENCIL_HALF_WIDTH};
use crate::error::{Error, Result};
use crate::stencil::fornberg_weights;
use crate::Scalar;

type Row<T> = Vec<(usize, T, bool)>;

/// First arc-length derivative on a fixed grid, weights cached per node.
#[derive(Debug, Clone)]
pub(crate) struct Derivative<T> {
    rows: Vec<Option<Row<T>>>,
}

impl<T: Scalar> Derivative<T> {
    pub(crate) fn new(profile: &WarpProfile<T>) -> Self {
        let rows = (0..profile.len())
            .map(|i| {
                let pts = profile.stencil_points(i, STENCIL_HALF_WIDTH)?;
                let xs: Vec<T> = pts.iter().map(|p| p.1).collect();
                let w = fornberg_weights(profile.x()[i], &xs, 1);
                Some(pts.iter().zip(&w[1]).map(|(&(j, _, r), &wk)| (j, wk, r)).collect())
            })
            .collect();
        Self { rows }
    }

    /// `D f / a`; `odd` fields flip sign when mirrored through a tip.
    pub(crate) fn apply(&self, f: &[Option<T>], odd: bool, a: &[T]) -> Vec<Option<T>> {
        self.rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let mut acc = T::zero();
                for &(j, w, reflected) in row.as_ref()? {
                    let v = f[j]?;
                    acc += w * if reflected && odd { -v } else { v };
                }
                Some(acc / a[i])
            })
            .collect()
    }
}

/// Initial slope field: exact when available, otherwise five-point
/// differences (one-sided next to frozen ends).
pub(crate) fn initial_slope<T: Scalar>(profile: &WarpProfile<T>) -> Vec<T> {
    let root_kappa = profile.fiber().kappa().map_or(T::one(), |k| k.abs().sqrt());
    let len = profile.len();
    let x = profile.x();
    (0..len)
        .map(|i| {
            if let Some(an) = profile.analytic() {
                return an.b_s[i];
            }
            if profile.is_tip(i) {
                let bx = profile.coordinate_slope(i).unwrap_or(T::one());
                return root_kappa.copysign(bx);
            }
            if let Some(bx) = profile.coordinate_slope(i) {
                return bx / profile.a()[i];
            }
            let lo = i.saturating_sub(2).min(len - 5);
            let xs = &x[lo..lo + 5];
            let w = fornberg_weights(x[i], xs, 1);
            let bx = (0..5).fold(T::zero(), |acc, k| acc + w[1][k] * profile.b()[lo + k]);
            bx / profile.a()[i]
        })
        .collect()
}

/// Time derivatives of `(a, b, u)`; inactive nodes carry zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Rhs<T> {
    pub da: Vec<T>,
    pub db: Vec<T>,
    pub du: Vec<T>,
}

/// Per-node quantities shared by the right-hand side and the CFL rule.
pub(crate) struct Local<T> {
    /// `u_s / b`, or `u_ss / u` at a tip; `None` where the stencil is cut.
    pub q: Vec<Option<T>>,
    pub u_s: Vec<Option<T>>,
    pub u_ss: Vec<Option<T>>,
}

pub(crate) fn local<T: Scalar>(d: &Derivative<T>, profile: &WarpProfile<T>, u: &[T]) -> Local<T> {
    let a = profile.a();
    let uo: Vec<Option<T>> = u.iter().map(|&v| Some(v)).collect();
    let u_s = d.apply(&uo, false, a);
    let u_ss = d.apply(&u_s, true, a);
    let q = (0..profile.len())
        .map(|i| {
            let uss = u_ss[i]?;
            Some(if profile.is_tip(i) { uss / u[i] } else { u_s[i]? / profile.b()[i] })
        })
        .collect();
    Local { q, u_s, u_ss }
}

pub(crate) fn kappa<T: Scalar>(profile: &WarpProfile<T>) -> Result<T> {
    profile.fiber().kappa().ok_or_else(|| Error::InvalidConfig("flow requires a constant-curvature fiber".into()))
}

pub(crate) fn rhs<T: Scalar>(d: &Derivative<T>, profile: &WarpProfile<T>, u: &[T]) -> Result<Rhs<T>> {
    let kappa = kappa(profile)?;
    let nn = T::count(profile.fiber().fiber_dim());
    let one = T::one();
    let two = T::lit(2.0);
    let loc = local(d, profile, u);
    let len = profile.len();
    let (mut da, mut db, mut du) = (vec![T::zero(); len], vec![T::zero(); len], vec![T::zero(); len]);
    for i in 0..len {
        let (Some(q), Some(uss)) = (loc.q[i], loc.u_ss[i]) else { continue };
        let a = profile.a()[i];
        da[i] = nn * a * q;
        if profile.is_tip(i) {
            continue;
        }
        let b = profile.b()[i];
        let us = loc.u_s[i].expect("u_s exists where u_ss does");
        let defect = (u[i] * u[i] - kappa) / b;
        db[i] = us + (nn - one) * defect;
        du[i] = uss + (nn - two) * u[i] * q - (nn - one) * defect * u[i] / b;
    }
    Ok(Rhs { da, db, du })
}

/// `sup |Rm|` over active nodes from the carried slope.
pub(crate) fn sup_curvature<T: Scalar>(d: &Derivative<T>, profile: &WarpProfile<T>, u: &[T]) -> Result<T> {
    let kappa = kappa(profile)?;
    let loc = local(d, profile, u);
    let mut sup = T::zero();
    for i in 0..profile.len() {
        let Some(q) = loc.q[i] else { continue };
        sup = sup.max(q.abs());
        if !profile.is_tip(i) {
            let b = profile.b()[i];
            sup = sup.max(((kappa - u[i] * u[i]) / (b * b)).abs());
        }
    }
    Ok(sup)
}
