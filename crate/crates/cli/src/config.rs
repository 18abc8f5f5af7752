//! JSON run configuration: schema, validation and conversion into core types.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use warpcheck_core::flow::{FlowSpeed, XiSpec};
use warpcheck_core::functionals::{ChiSpec, CurvatureArgs, DEFAULT_ABS_TOL};
use warpcheck_core::surface::SurfaceShape;
use warpcheck_core::warped::named_warp;
use warpcheck_core::{GridSpec, RadialGraph, WarpedProduct};

/// Default max-norm tolerance for pointwise (per-node) residuals, which are
/// limited by stencil truncation rather than quadrature.
pub const DEFAULT_NODE_TOL: f64 = 1e-4;

/// WARPCHECK_TOL overrides the built-in tolerance defaults; explicit config
/// values still take precedence.
fn env_tol() -> Option<f64> {
    std::env::var("WARPCHECK_TOL")
        .ok()
        .and_then(|s| s.parse::<f64>().ok())
        .filter(|t| *t > 0.0)
}

fn bad(field: &str, why: &str) -> anyhow::Error {
    anyhow::anyhow!("CONFIG_INVALID: field '{field}': {why}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Task {
    #[serde(rename = "geometry")]
    Geometry,
    #[serde(rename = "identities")]
    Identities,
    #[serde(rename = "hk-sweep")]
    HkSweep,
    #[serde(rename = "theoremB")]
    TheoremB,
    #[serde(rename = "curvature-eq")]
    CurvatureEq,
    #[serde(rename = "flow")]
    Flow,
    #[serde(rename = "substatic-scan")]
    SubstaticScan,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifoldConfig {
    /// hyperbolic | euclidean | hemisphere | custom
    pub kind: String,
    /// Fiber dimension: 1 (over S^1) or 2 (over S^2).
    pub n: usize,
    /// Custom only: named warp function (cosh | sinh | linear | sin).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warp: Option<String>,
    /// Custom only: right end of the radial domain (absent = unbounded).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_max: Option<f64>,
    /// Custom only: constant of the sub-static criterion (default 1).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    /// Custom only: treat r = 0 as a horizon boundary (default false).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<bool>,
}

impl ManifoldConfig {
    pub fn build(&self) -> anyhow::Result<Arc<WarpedProduct>> {
        if self.n != 1 && self.n != 2 {
            return Err(bad("manifold.n", "fiber dimension must be 1 or 2"));
        }
        let m = match self.kind.as_str() {
            "hyperbolic" => WarpedProduct::space_form(-1, self.n).unwrap(),
            "euclidean" => WarpedProduct::space_form(0, self.n).unwrap(),
            "hemisphere" => WarpedProduct::space_form(1, self.n).unwrap(),
            "custom" => {
                let name = self
                    .warp
                    .as_deref()
                    .ok_or_else(|| bad("manifold.warp", "required when kind = custom"))?;
                let warp = named_warp(name)
                    .map_err(|e| bad("manifold.warp", &e.to_string()))?;
                let r_max = self.r_max.unwrap_or(f64::INFINITY);
                if !(r_max > 0.0) {
                    return Err(bad("manifold.r_max", "must be positive"));
                }
                WarpedProduct::custom(
                    self.n,
                    warp,
                    r_max,
                    self.rho.unwrap_or(1.0),
                    self.horizon.unwrap_or(false),
                )
            }
            other => {
                return Err(bad(
                    "manifold.kind",
                    &format!("unknown kind '{other}' (expected hyperbolic|euclidean|hemisphere|custom)"),
                ))
            }
        };
        for (field, set) in [
            ("manifold.warp", self.warp.is_some()),
            ("manifold.r_max", self.r_max.is_some()),
            ("manifold.rho", self.rho.is_some()),
            ("manifold.horizon", self.horizon.is_some()),
        ] {
            if set && self.kind != "custom" {
                return Err(bad(field, "only allowed when kind = custom"));
            }
        }
        Ok(Arc::new(m))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceConfig {
    /// Analytic shape: {"type": "sphere", "radius", "offset"} or
    /// {"type": "perturbed", "base", "modes": [[degree, amplitude], ...]}.
    pub shape: SurfaceShape,
    /// {"dim": "circle", "n_theta"} or {"dim": "sphere", "n_mu", "n_phi"}.
    pub grid: GridSpec,
}

impl SurfaceConfig {
    pub fn build(&self, manifold: Arc<WarpedProduct>) -> anyhow::Result<RadialGraph> {
        if self.grid.dim() != manifold.n {
            return Err(bad(
                "surface.grid",
                &format!(
                    "grid dimension {} does not match manifold fiber dimension {}",
                    self.grid.dim(),
                    manifold.n
                ),
            ));
        }
        self.grid
            .validate()
            .map_err(|e| bad("surface.grid", &e))?;
        let graph = match &self.shape {
            SurfaceShape::Sphere { radius, offset } => {
                RadialGraph::sphere(manifold, *radius, *offset, self.grid)
            }
            SurfaceShape::Perturbed { base, modes } => {
                RadialGraph::perturbed(manifold, *base, modes, self.grid)
            }
        };
        graph.map_err(|e| bad("surface.shape", &e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpeedConfig {
    /// F = -1
    UnitInward,
    /// F = -lambda'
    MinusPotential,
    /// F = -(lambda' - eps u) xi(u - eps lambda') with xi a named profile.
    CustomShifted { eps: f64, xi: XiConfig },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum XiConfig {
    Constant { value: f64 },
    Exp { rate: f64 },
}

impl SpeedConfig {
    pub fn build(&self) -> FlowSpeed {
        match *self {
            SpeedConfig::UnitInward => FlowSpeed::UnitInward,
            SpeedConfig::MinusPotential => FlowSpeed::MinusPotential,
            SpeedConfig::CustomShifted { eps, xi } => FlowSpeed::CustomShifted {
                eps,
                xi: match xi {
                    XiConfig::Constant { value } => XiSpec::Constant { value },
                    XiConfig::Exp { rate } => XiSpec::Exp { rate },
                },
            },
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowConfig {
    pub speed: SpeedConfig,
    pub t_end: f64,
    pub dt: f64,
    /// Keep every k-th state snapshot (0 = endpoints only).
    #[serde(default)]
    pub snapshot_every: usize,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub r_lo: f64,
    pub r_hi: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub manifold: ManifoldConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub surface: Option<SurfaceConfig>,
    pub task: Task,
    /// Shift values; required nonempty for hk-sweep, defaults to [0] elsewhere.
    #[serde(default)]
    pub eps_list: Vec<f64>,
    /// Curvature order for equation / integration-by-parts checks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi: Option<ChiSpec>,
    /// potential | primitive (argument convention for the curvature equation).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<CurvatureArgs>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flow: Option<FlowConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanConfig>,
    /// Absolute tolerance for quadrature-level identities
    /// (default 1e-9; WARPCHECK_TOL overrides this default).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abs_tol: Option<f64>,
    /// Max-norm tolerance for per-node residuals (default 1e-4).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub node_tol: Option<f64>,
}

impl RunConfig {
    pub fn validate(&self) -> anyhow::Result<()> {
        match self.task {
            Task::HkSweep if self.eps_list.is_empty() => {
                Err(bad("eps_list", "must be nonempty for task hk-sweep"))
            }
            Task::CurvatureEq => {
                if self.chi.is_none() {
                    return Err(bad("chi", "required for task curvature-eq"));
                }
                if self.variant.is_none() {
                    return Err(bad("variant", "required for task curvature-eq"));
                }
                Ok(())
            }
            Task::Flow if self.flow.is_none() => {
                Err(bad("flow", "required for task flow"))
            }
            _ => Ok(()),
        }
    }

    pub fn surface_config(&self) -> anyhow::Result<&SurfaceConfig> {
        self.surface
            .as_ref()
            .ok_or_else(|| bad("surface", &format!("required for task {:?}", self.task)))
    }

    pub fn eps_values(&self) -> Vec<f64> {
        if self.eps_list.is_empty() {
            vec![0.0]
        } else {
            self.eps_list.clone()
        }
    }

    /// Quadrature-identity tolerance: explicit config value, else the
    /// WARPCHECK_TOL environment override of the default, else 1e-9.
    pub fn abs_tol(&self) -> f64 {
        self.abs_tol
            .or_else(env_tol)
            .unwrap_or(DEFAULT_ABS_TOL)
    }

    pub fn node_tol(&self) -> f64 {
        self.node_tol
            .or_else(env_tol)
            .unwrap_or(DEFAULT_NODE_TOL)
    }
}
