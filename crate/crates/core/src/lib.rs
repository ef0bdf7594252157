//! Numerical laboratory for Ricci flow on warped-product metrics.
//!
//! The crate is generic over the scalar type (`f32` or `f64`); the `*64`
//! aliases at the root fix the common double-precision instantiation.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod curvature;
pub mod error;
pub mod flow;
pub mod monitors;
pub mod ode;
pub mod pointpick;
pub mod quadrature;
pub mod scalar;
pub mod stencil;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use curvature::{
    curvature_field, extremal_sectional, pinching_upper_bound, profile_scalar_field, random_bianchi_tensor,
    sec_complex, warped_curvature, AlgebraicCurvatureOperator, Boundary, ComplexPlane, FiberSpec, PointCurvature,
    Rescale, SearchConfig, SearchMode, WarpProfile,
};
pub use flow::{
    exact_profile, parabolic_rescale, ricci_rhs, run, step, volume_form_residual, ExactKind, ExactParams, FlowConfig,
    FlowRun, FlowState, RunStatus, Scheme,
};
pub use monitors::{MonitorReport, Verdict};
pub use ode::{closed_form, integrate, RiccatiProblem};
pub use pointpick::{find_seed, pick, pick_bounds, verify_pick, PickResult, SpaceTimeField};

pub type WarpProfile64 = WarpProfile<f64>;
pub type WarpProfile32 = WarpProfile<f32>;
pub type FiberSpec64 = FiberSpec<f64>;
pub type PointCurvature64 = PointCurvature<f64>;
pub type CurvatureOperator64 = AlgebraicCurvatureOperator<f64>;
pub type FlowConfig64 = FlowConfig<f64>;
pub type FlowState64 = FlowState<f64>;
pub type FlowRun64 = FlowRun<f64>;
pub type SpaceTimeField64 = SpaceTimeField<f64>;
pub type PickResult64 = PickResult<f64>;
pub type RiccatiProblem64 = RiccatiProblem<f64>;
