//! Riccati comparison `a' + a² ≤ C²` and the curvature-operator bound it
//! gives for warped products over fibers with nonnegative curvature operator.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Scalar;

/// `|a|` above which an integration is declared to blow up.
pub const BLOWUP_THRESHOLD: f64 = 1e6;
/// Slack allowed by [`bound_check`].
pub const BOUND_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiccatiProblem<T> {
    pub c: T,
    pub a0: T,
    /// Integrates `a' + a² = C² - slack`.
    pub slack: T,
}

impl<T: Scalar> RiccatiProblem<T> {
    pub fn new(c: T, a0: T, slack: T) -> Result<Self> {
        if !(c >= T::zero()) || !c.is_finite() {
            return Err(Error::InvalidConfig(format!("C must be nonnegative, got {c}")));
        }
        if !(slack >= T::zero()) || !slack.is_finite() {
            return Err(Error::InvalidConfig(format!("slack must be nonnegative, got {slack}")));
        }
        if !a0.is_finite() {
            return Err(Error::InvalidConfig("a0 must be finite".into()));
        }
        Ok(Self { c, a0, slack })
    }

    fn rhs(&self, a: T) -> T {
        self.c * self.c - self.slack - a * a
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Branch<T> {
    Constant,
    DecreasingToC,
    IncreasingToC,
    BlowupAtFiniteR { r0: T },
}

/// Exact solution of `A' + A² = C²` with `A(0) = a0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedForm<T> {
    pub c: T,
    pub a0: T,
    /// `K` in `A = C + 2C / (K e^{2Cr} - 1)`; absent on constant branches and for `C = 0`.
    pub k: Option<T>,
    pub branch: Branch<T>,
}

impl<T: Scalar> ClosedForm<T> {
    /// `A(r)`, or `None` at and beyond the blow-up radius.
    pub fn eval(&self, r: T) -> Option<T> {
        if let Branch::BlowupAtFiniteR { r0 } = self.branch {
            if r >= r0 {
                return None;
            }
        }
        let (c, a0) = (self.c, self.a0);
        Some(match (self.branch, self.k) {
            (Branch::Constant, _) => a0,
            (_, None) => a0 / (T::one() + a0 * r),
            (_, Some(k)) => {
                let two_c = c + c;
                c + two_c / (k * (two_c * r).exp() - T::one())
            }
        })
    }

    pub fn blowup_radius(&self) -> Option<T> {
        match self.branch {
            Branch::BlowupAtFiniteR { r0 } => Some(r0),
            _ => None,
        }
    }
}

pub fn closed_form<T: Scalar>(c: T, a0: T) -> Result<ClosedForm<T>> {
    RiccatiProblem::new(c, a0, T::zero())?;
    let zero = T::zero();
    if c == zero {
        let branch = if a0 == zero {
            Branch::Constant
        } else if a0 > zero {
            Branch::DecreasingToC
        } else {
            Branch::BlowupAtFiniteR { r0: -T::one() / a0 }
        };
        return Ok(ClosedForm { c, a0, k: None, branch });
    }
    if a0 == c || a0 == -c {
        return Ok(ClosedForm { c, a0, k: None, branch: Branch::Constant });
    }
    let k = T::one() + (c + c) / (a0 - c);
    let branch = if a0 > c {
        Branch::DecreasingToC
    } else if a0 > -c {
        Branch::IncreasingToC
    } else {
        Branch::BlowupAtFiniteR { r0: (T::one() / k).ln() / (c + c) }
    };
    Ok(ClosedForm { c, a0, k: Some(k), branch })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory<T> {
    pub r: Vec<T>,
    pub a: Vec<T>,
    /// Radius where `|a|` crossed the blow-up threshold.
    pub blowup: Option<T>,
}

impl<T> Trajectory<T> {
    pub fn blew_up(&self) -> bool {
        self.blowup.is_some()
    }
}

fn rk4<T: Scalar>(p: &RiccatiProblem<T>, a: T, h: T) -> T {
    let two = T::lit(2.0);
    let k1 = p.rhs(a);
    let k2 = p.rhs(a + h / two * k1);
    let k3 = p.rhs(a + h / two * k2);
    let k4 = p.rhs(a + h * k3);
    a + h / T::lit(6.0) * (k1 + two * (k2 + k3) + k4)
}

/// RK4 trajectory sampled every `dr` up to `r_max`. Internal substeps are
/// shortened where `|a|` is large so the solution scale `1/|a|` stays resolved.
pub fn integrate<T: Scalar>(problem: &RiccatiProblem<T>, r_max: T, dr: T) -> Result<Trajectory<T>> {
    if !(dr > T::zero()) {
        return Err(Error::InvalidConfig(format!("dr must be positive, got {dr}")));
    }
    if !(r_max >= T::zero()) {
        return Err(Error::InvalidConfig(format!("r_max must be nonnegative, got {r_max}")));
    }
    let threshold = T::lit(BLOWUP_THRESHOLD);
    let resolution = T::lit(0.01);
    let scale = problem.c.max(T::one());
    let samples = (r_max / dr).ceil().to_usize().unwrap_or(0);
    let mut out = Trajectory { r: vec![T::zero()], a: vec![problem.a0], blowup: None };
    let mut a = problem.a0;
    let mut r = T::zero();
    for j in 1..=samples {
        let target = (dr * T::count(j)).min(r_max);
        while r < target {
            let h = (target - r).min(resolution / a.abs().max(scale));
            let next = rk4(problem, a, h);
            if !next.is_finite() || next.abs() > threshold {
                let (mut lo, mut hi) = (T::zero(), h);
                for _ in 0..200 {
                    let mid = (lo + hi) / T::lit(2.0);
                    let v = rk4(problem, a, mid);
                    if v.is_finite() && v.abs() <= threshold {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                    if hi - lo <= T::epsilon() * (r + hi) {
                        break;
                    }
                }
                out.blowup = Some(r + hi);
                return Ok(out);
            }
            a = next;
            r = if target - r <= h { target } else { r + h };
        }
        out.r.push(r);
        out.a.push(a);
    }
    Ok(out)
}

/// Whether every sample stays in `[-C, max(a0, C)]` (`[0, a0]` when `C = 0`);
/// a blown-up trajectory never passes.
pub fn bound_check<T: Scalar>(trajectory: &Trajectory<T>, c: T, a0: T) -> bool {
    if trajectory.blew_up() {
        return false;
    }
    let slack = T::lit(BOUND_SLACK);
    let (lo, hi) = if c > T::zero() { (-c, a0.max(c)) } else { (T::zero(), a0) };
    trajectory.a.iter().all(|&a| a >= lo - slack && a <= hi + slack)
}

/// Lower bound `C'` with `R ≥ -C' id` for a warped product whose radial
/// Ricci curvature is at least `-C²` over a fiber with `R^h ≥ 0`.
pub fn warped_lower_bound<T: Scalar>(c: T, fiber_dim: usize, phi_prime_0: T) -> Result<T> {
    if !(c >= T::zero()) {
        return Err(Error::InvalidConfig(format!("C must be nonnegative, got {c}")));
    }
    if fiber_dim == 0 {
        return Err(Error::DimensionOutOfRange { dim: 0, min: 1, max: usize::MAX });
    }
    let limit = c / T::count(fiber_dim).sqrt();
    if phi_prime_0 < -limit {
        return Err(Error::Incomplete { phi_prime: phi_prime_0.as_f64(), limit: -limit.as_f64() });
    }
    let m = phi_prime_0.abs().max(limit);
    Ok((c * c / T::count(fiber_dim)).max(m * m))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_branches() {
        let f = closed_form(1.0, 1.0).unwrap();
        assert_eq!(f.branch, Branch::Constant);
        assert_eq!(f.eval(3.0), Some(1.0));
        let f = closed_form(2.0, -2.0).unwrap();
        assert_eq!(f.eval(1.0), Some(-2.0));
    }

    #[test]
    fn branch_classification() {
        assert_eq!(closed_form(1.0, 3.0).unwrap().branch, Branch::DecreasingToC);
        assert_eq!(closed_form(1.0, 0.5).unwrap().branch, Branch::IncreasingToC);
        let r0 = closed_form(1.0, -2.0).unwrap().blowup_radius().unwrap();
        assert!((r0 - 3f64.ln() / 2.0).abs() < 1e-15);
        assert_eq!(closed_form(0.0, -1.0).unwrap().blowup_radius(), Some(1.0));
    }

    #[test]
    fn decreasing_branch_value() {
        let f = closed_form(1.0, 3.0).unwrap();
        assert_eq!(f.k, Some(2.0));
        let e2 = 1f64.exp().powi(2);
        assert!((f.eval(1.0).unwrap() - (1.0 + 2.0 / (2.0 * e2 - 1.0))).abs() < 1e-15);
    }

    #[test]
    fn flat_branch_value() {
        assert!((closed_form(0.0f64, 1.0).unwrap().eval(1.0).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn integrator_matches_closed_form() {
        let p = RiccatiProblem::new(1.0f64, 3.0, 0.0).unwrap();
        let tr = integrate(&p, 5.0, 0.1).unwrap();
        let f = closed_form(1.0, 3.0).unwrap();
        for (&r, &a) in tr.r.iter().zip(&tr.a) {
            assert!((a - f.eval(r).unwrap()).abs() < 1e-8, "r = {r}");
        }
        assert!(bound_check(&tr, 1.0, 3.0));
    }

    #[test]
    fn blowup_detected_near_radius() {
        let p = RiccatiProblem::new(1.0, -2.0, 0.0).unwrap();
        let tr = integrate(&p, 10.0, 0.01).unwrap();
        let r = tr.blowup.unwrap();
        assert!((r - 3f64.ln() / 2.0).abs() < 1e-3);
        assert!(!bound_check(&tr, 1.0, -2.0));
    }

    #[test]
    fn slack_keeps_trajectory_bounded() {
        let p = RiccatiProblem::new(1.0, 0.0, 0.5).unwrap();
        let tr = integrate(&p, 10.0, 0.1).unwrap();
        assert!(!tr.blew_up());
        assert!(tr.a.iter().all(|&a| (-1.0..=1.0).contains(&a)));
    }

    #[test]
    fn warped_bound_examples() {
        assert_eq!(warped_lower_bound(0.0, 2, 0.0).unwrap(), 0.0);
        assert!((warped_lower_bound(2f64.sqrt(), 2, -1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((warped_lower_bound(3f64.sqrt(), 3, 2.0).unwrap() - 4.0).abs() < 1e-15);
        assert!(matches!(warped_lower_bound(1.0, 1, -2.0), Err(Error::Incomplete { .. })));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(RiccatiProblem::new(-1.0, 0.0, 0.0).is_err());
        let p = RiccatiProblem::new(1.0, 0.0, 0.0).unwrap();
        assert!(integrate(&p, 1.0, 0.0).is_err());
    }
}
