//! Experiment configuration files (JSON, one experiment per file).

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use warpflow::curvature::{Boundary, FiberSpec, WarpProfile};
use warpflow::flow::{exact_profile, ExactKind, ExactParams, FlowConfig, Scheme};
use warpflow::monitors::CurveSpec;

use crate::error::{CliError, Result};

/// Major version of every file format written by this crate.
pub const FORMAT_MAJOR: u32 = 1;
pub const FORMAT_VERSION: &str = "1.0";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_version")]
    pub version: u32,
    pub name: String,
    pub profile: ProfileSpec,
    pub flow: FlowSection,
    #[serde(default)]
    pub monitors: Vec<MonitorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pointpick: Option<PointpickSpec>,
    #[serde(default)]
    pub seed: u64,
    /// Output root; the archive is written to `<root>/<name>`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

fn default_version() -> u32 {
    FORMAT_MAJOR
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundarySpec {
    Capped,
    FrozenGhost,
    Periodic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileSpec {
    /// Round sphere of curvature `curvature` on `[0, π/√K]`.
    Sphere {
        nodes: usize,
        dim: usize,
        #[serde(default = "one")]
        curvature: f64,
    },
    Hyperbolic {
        nodes: usize,
        dim: usize,
        extent: f64,
        #[serde(default = "one")]
        curvature: f64,
    },
    FlatCap {
        nodes: usize,
        dim: usize,
        extent: f64,
    },
    Cusp {
        nodes: usize,
        dim: usize,
        extent: [f64; 2],
    },
    /// `b = sin s + amplitude · sin³ s` on `[0, π]`, round fiber.
    PerturbedSphere {
        nodes: usize,
        dim: usize,
        amplitude: f64,
    },
    /// Explicit samples of `a` and `b` on the coordinate grid `x`.
    Samples {
        x: Vec<f64>,
        a: Vec<f64>,
        b: Vec<f64>,
        fiber_dim: usize,
        kappa: f64,
        boundary: BoundarySpec,
    },
}

fn one() -> f64 {
    1.0
}

impl ProfileSpec {
    pub fn build(&self) -> Result<WarpProfile<f64>> {
        use std::f64::consts::PI;
        let profile = match self {
            ProfileSpec::Sphere { nodes, dim, curvature } => {
                let params = ExactParams {
                    nodes: *nodes,
                    dim: *dim,
                    extent: (0.0, PI / curvature.sqrt()),
                    curvature: *curvature,
                };
                exact_profile(&ExactKind::Sphere, &params)?
            }
            ProfileSpec::Hyperbolic { nodes, dim, extent, curvature } => {
                let params = ExactParams { nodes: *nodes, dim: *dim, extent: (0.0, *extent), curvature: *curvature };
                exact_profile(&ExactKind::Hyperbolic, &params)?
            }
            ProfileSpec::FlatCap { nodes, dim, extent } => {
                exact_profile(&ExactKind::FlatCap, &ExactParams::new(*nodes, *dim, (0.0, *extent)))?
            }
            ProfileSpec::Cusp { nodes, dim, extent } => {
                exact_profile(&ExactKind::Cusp, &ExactParams::new(*nodes, *dim, (extent[0], extent[1])))?
            }
            ProfileSpec::PerturbedSphere { nodes, dim, amplitude } => {
                exact_profile(&perturbed_sphere(*amplitude), &ExactParams::new(*nodes, *dim, (0.0, PI)))?
            }
            ProfileSpec::Samples { x, a, b, fiber_dim, kappa, boundary } => {
                let fiber = FiberSpec::constant(*fiber_dim, *kappa)?;
                let boundary = match boundary {
                    BoundarySpec::Capped => Boundary::Capped,
                    BoundarySpec::FrozenGhost => Boundary::FrozenGhost,
                    BoundarySpec::Periodic => {
                        let n = x.len();
                        if n < 2 {
                            return Err(CliError::InvalidConfig("periodic samples need at least two nodes".into()));
                        }
                        Boundary::Periodic { period: x[n - 1] - x[0] + (x[1] - x[0]) }
                    }
                };
                WarpProfile::new(x.clone(), a.clone(), b.clone(), fiber, boundary)?
            }
        };
        Ok(profile)
    }

    pub fn total_dim(&self) -> usize {
        match self {
            ProfileSpec::Sphere { dim, .. }
            | ProfileSpec::Hyperbolic { dim, .. }
            | ProfileSpec::FlatCap { dim, .. }
            | ProfileSpec::Cusp { dim, .. }
            | ProfileSpec::PerturbedSphere { dim, .. } => *dim,
            ProfileSpec::Samples { fiber_dim, .. } => fiber_dim + 1,
        }
    }
}

/// `b = sin s + ε sin³ s` with its first three derivatives.
pub fn perturbed_sphere(eps: f64) -> ExactKind<f64> {
    ExactKind::Custom {
        jet: Arc::new(move |s: f64| {
            let (sn, cs) = s.sin_cos();
            [
                sn + eps * sn.powi(3),
                cs + 3.0 * eps * sn * sn * cs,
                -sn + 3.0 * eps * (2.0 * sn * cs * cs - sn.powi(3)),
                -cs + 3.0 * eps * (2.0 * cs.powi(3) - 7.0 * sn * sn * cs),
            ]
        }),
        kappa: 1.0,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowSection {
    #[serde(default = "default_scheme")]
    pub scheme: Scheme,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    pub t_end: f64,
    #[serde(default = "default_snapshot_every")]
    pub snapshot_every: usize,
}

fn default_scheme() -> Scheme {
    Scheme::Rk4
}

fn default_cfl() -> f64 {
    0.2
}

fn default_snapshot_every() -> usize {
    100
}

impl FlowSection {
    pub fn to_config(&self) -> Result<FlowConfig<f64>> {
        Ok(FlowConfig::new(self.scheme, self.cfl, self.t_end, self.snapshot_every)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MonitorSpec {
    /// `d/dt vol = -∫ scal dvol` per snapshot interval, against
    /// `factor · (Δt² + h²)`.
    VolumeForm {
        #[serde(default = "default_residual_factor")]
        factor: f64,
    },
    /// Length growth of test curves; default curves span the valid region.
    DistanceGrowth {
        #[serde(default)]
        curves: Vec<CurveSpec<f64>>,
    },
    VolumePersistence {
        #[serde(default)]
        region: Option<[f64; 2]>,
        scal_floor: f64,
        #[serde(default = "euler")]
        ball_radius: f64,
    },
    CtBound {
        #[serde(default)]
        known_bound: Option<f64>,
    },
    ChenLocal {
        #[serde(default)]
        x0: Option<f64>,
        r0: f64,
    },
    /// Static check on the initial profile.
    BishopGromov { radii: Vec<f64> },
    /// Static check on the initial profile.
    Petrunin {},
    /// Tubes on the initial profile centered at arc length `r` from the left
    /// end, with the fitted exponential rate of their volumes.
    TubeVolume {
        radii: Vec<f64>,
        half_width: f64,
        #[serde(default)]
        expected_rate: Option<f64>,
    },
}

fn default_residual_factor() -> f64 {
    5.0
}

fn euler() -> f64 {
    std::f64::consts::E
}

impl MonitorSpec {
    pub fn name(&self) -> &'static str {
        match self {
            MonitorSpec::VolumeForm { .. } => "volume_form",
            MonitorSpec::DistanceGrowth { .. } => "distance_growth",
            MonitorSpec::VolumePersistence { .. } => "volume_persistence",
            MonitorSpec::CtBound { .. } => "ct_bound",
            MonitorSpec::ChenLocal { .. } => "chen_local_estimate",
            MonitorSpec::BishopGromov { .. } => "bishop_gromov",
            MonitorSpec::Petrunin {} => "petrunin_integral",
            MonitorSpec::TubeVolume { .. } => "tube_volume",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointpickSpec {
    pub k: u32,
}

/// Parses and validates a config; errors carry line and column.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let config: ExperimentConfig = serde_json::from_str(text).map_err(|e| CliError::Config {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    validate(&config)?;
    Ok(config)
}

pub fn serialize_config(config: &ExperimentConfig) -> String {
    serde_json::to_string_pretty(config).expect("config serializes")
}

fn validate(config: &ExperimentConfig) -> Result<()> {
    if config.version > FORMAT_MAJOR {
        return Err(CliError::UnsupportedVersion { found: config.version.to_string(), supported: FORMAT_MAJOR });
    }
    let valid_name = !config.name.is_empty()
        && config.name.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'))
        && !config.name.starts_with('.');
    if !valid_name {
        return Err(CliError::InvalidConfig(format!("name {:?} must be a plain file name", config.name)));
    }
    config.flow.to_config()?;
    if let Some(p) = &config.pointpick {
        if p.k == 0 {
            return Err(CliError::InvalidConfig("pointpick.k must be at least 1".into()));
        }
    }
    Ok(())
}
