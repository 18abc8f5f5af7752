//! Star-shaped hypersurfaces as radial graphs over a quadrature grid on S^n.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Result, WarpError};
use crate::grid::{Grid, GridSpec};
use crate::warped::WarpedProduct;

/// Analytic description of a graph, kept alongside the nodal values so the
/// surface can be resampled exactly at any resolution (quadrature error
/// estimates, convergence studies).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SurfaceShape {
    /// Geodesic sphere of the given radius, centered at distance `offset`
    /// along the polar axis.
    Sphere { radius: f64, offset: f64 },
    /// rho = base + sum of amplitude * (cos(degree * polar angle)) for n = 1,
    /// amplitude * P_degree(cos(polar angle)) for n = 2.
    Perturbed {
        base: f64,
        modes: Vec<(u32, f64)>,
    },
}

/// A closed star-shaped hypersurface given by nodal values of the radial
/// function over the grid.
#[derive(Debug, Clone)]
pub struct RadialGraph {
    pub grid: Arc<Grid>,
    pub rho: Vec<f64>,
    pub manifold: Arc<WarpedProduct>,
    /// Present when the graph was built analytically; flow-evolved graphs
    /// carry `None`.
    pub shape: Option<SurfaceShape>,
}

impl RadialGraph {
    /// Wrap nodal values (flow steps, external data).
    pub fn from_nodal(
        grid: Arc<Grid>,
        manifold: Arc<WarpedProduct>,
        rho: Vec<f64>,
    ) -> Result<Self> {
        assert_eq!(rho.len(), grid.node_count());
        let graph = Self {
            grid,
            rho,
            manifold,
            shape: None,
        };
        graph.validate()?;
        Ok(graph)
    }

    fn validate(&self) -> Result<()> {
        let min = self.rho.iter().copied().fold(f64::INFINITY, f64::min);
        if !(min > 0.0) {
            return Err(WarpError::GeometryInvalid(format!(
                "radial function must be positive (min rho = {min})"
            )));
        }
        for &r in &self.rho {
            if !self.manifold.contains_r(r) {
                return Err(WarpError::GeometryInvalid(format!(
                    "node radius {r} outside manifold domain [0, {})",
                    self.manifold.r_max
                )));
            }
        }
        Ok(())
    }

    /// Geodesic sphere of `radius` centered at distance `offset` along the
    /// polar axis of a space form.
    ///
    /// Nodal rho solves the space-form law of cosines per node; hyperbolic
    /// and spherical cases by safeguarded Newton to 1e-13.
    pub fn sphere(
        manifold: Arc<WarpedProduct>,
        radius: f64,
        offset: f64,
        grid_spec: GridSpec,
    ) -> Result<Self> {
        let c = manifold
            .curvature()
            .ok_or(WarpError::UnsupportedManifold("sphere graphs need a space form"))?;
        if radius <= 0.0 || offset < 0.0 || offset >= radius {
            return Err(WarpError::GeometryInvalid(format!(
                "need 0 <= offset < radius, got radius {radius}, offset {offset} (pole must stay inside)"
            )));
        }
        if !manifold.contains_r(offset + radius) {
            return Err(WarpError::GeometryInvalid(format!(
                "sphere leaves the manifold domain: offset + radius = {}",
                offset + radius
            )));
        }
        let grid = Arc::new(Grid::new(grid_spec));
        let rho: Vec<f64> = (0..grid.node_count())
            .map(|k| {
                let gamma = grid.node_theta(k);
                sphere_radial(c, radius, offset, gamma)
            })
            .collect();
        let graph = Self {
            grid,
            rho,
            manifold,
            shape: Some(SurfaceShape::Sphere { radius, offset }),
        };
        graph.validate()?;
        Ok(graph)
    }

    /// Perturbed sphere: `rho = base + sum amplitude * mode(polar angle)`.
    pub fn perturbed(
        manifold: Arc<WarpedProduct>,
        base_radius: f64,
        modes: &[(u32, f64)],
        grid_spec: GridSpec,
    ) -> Result<Self> {
        let grid = Arc::new(Grid::new(grid_spec));
        let n = grid.dim();
        let rho: Vec<f64> = (0..grid.node_count())
            .map(|k| {
                let t = grid.node_theta(k);
                let mut r = base_radius;
                for &(degree, amp) in modes {
                    r += amp * zonal_mode(n, degree, t);
                }
                r
            })
            .collect();
        let graph = Self {
            grid,
            rho,
            manifold: manifold.clone(),
            shape: Some(SurfaceShape::Perturbed {
                base: base_radius,
                modes: modes.to_vec(),
            }),
        };
        graph.validate()?;
        Ok(graph)
    }

    /// The same surface sampled on another grid. Exact for analytic shapes;
    /// restriction (decimation / barycentric interpolation) for nodal-only
    /// graphs, which then must target the half-resolution grid.
    pub fn resample(&self, spec: GridSpec) -> Result<Self> {
        spec.validate().map_err(WarpError::ConfigInvalid)?;
        match &self.shape {
            Some(SurfaceShape::Sphere { radius, offset }) => {
                Self::sphere(self.manifold.clone(), *radius, *offset, spec)
            }
            Some(SurfaceShape::Perturbed { base, modes }) => {
                Self::perturbed(self.manifold.clone(), *base, modes, spec)
            }
            None => {
                let coarse = Arc::new(Grid::new(spec));
                let rho = self.grid.restrict_to(&coarse, &self.rho);
                let graph = Self {
                    grid: coarse,
                    rho,
                    manifold: self.manifold.clone(),
                    shape: None,
                };
                graph.validate()?;
                Ok(graph)
            }
        }
    }

    pub fn half_resolution(&self) -> Result<Self> {
        self.resample(self.grid.spec.half())
    }

    pub fn min_rho(&self) -> f64 {
        self.rho.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_rho(&self) -> f64 {
        self.rho.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Legendre polynomial P_l by recurrence.
fn legendre_p(l: u32, x: f64) -> f64 {
    match l {
        0 => 1.0,
        1 => x,
        _ => {
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=l {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            p1
        }
    }
}

fn zonal_mode(n: usize, degree: u32, theta: f64) -> f64 {
    match n {
        1 => (degree as f64 * theta).cos(),
        2 => legendre_p(degree, theta.cos()),
        _ => unreachable!(),
    }
}

/// Radial coordinate of the point of the off-center geodesic sphere seen at
/// polar angle `gamma` from the warped-product pole.
///
/// Law of cosines per space form; `d < radius` keeps the pole enclosed so the
/// solution is unique.
pub fn sphere_radial(c: i32, radius: f64, d: f64, gamma: f64) -> f64 {
    if d == 0.0 {
        return radius;
    }
    let cg = gamma.cos();
    match c {
        0 => {
            let disc = radius * radius - d * d * (1.0 - cg * cg);
            d * cg + disc.sqrt()
        }
        -1 => {
            // cosh R = cosh d cosh rho - sinh d sinh rho cos gamma
            // The root hits a bracket endpoint at the poles (gamma = 0, pi),
            // where roundoff can flip the endpoint sign; pad the bracket.
            let pad = 1e-9 * (1.0 + radius + d);
            let target = radius.cosh();
            let f = |rho: f64| d.cosh() * rho.cosh() - d.sinh() * rho.sinh() * cg - target;
            let df = |rho: f64| d.cosh() * rho.sinh() - d.sinh() * rho.cosh() * cg;
            safeguarded_newton(f, df, (radius - d - pad).max(1e-8), radius + d + pad)
        }
        1 => {
            // cos R = cos d cos rho + sin d sin rho cos gamma
            let pad = 1e-9 * (1.0 + radius + d);
            let target = radius.cos();
            let f = |rho: f64| d.cos() * rho.cos() + d.sin() * rho.sin() * cg - target;
            let df = |rho: f64| -d.cos() * rho.sin() + d.sin() * rho.cos() * cg;
            safeguarded_newton(f, df, (radius - d - pad).max(1e-8), radius + d + pad)
        }
        _ => unreachable!("space-form curvature"),
    }
}

/// Newton iteration with bisection fallback on a bracketing interval.
fn safeguarded_newton<F, G>(f: F, df: G, mut lo: f64, mut hi: f64) -> f64
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    let mut flo = f(lo);
    let fhi = f(hi);
    debug_assert!(
        flo * fhi <= 0.0,
        "root not bracketed: f({lo}) = {flo}, f({hi}) = {fhi}"
    );
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let fx = f(x);
        if fx.abs() < 1e-13 {
            return x;
        }
        // maintain the bracket
        if fx * flo <= 0.0 {
            hi = x;
        } else {
            lo = x;
            flo = fx;
        }
        let d = df(x);
        let newton = x - fx / d;
        x = if d != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo < 1e-15 {
            break;
        }
    }
    x
}
