//! Surface and bulk quadrature, intrinsic derivative machinery on the
//! induced metric, and the pointwise residuals derived from the conformal
//! field identities.

use crate::error::{Result, WarpError};
use crate::geometry::{compute_geometry, GeometrySample, Mat2};
use crate::quadrature::{integrate_adaptive, pairwise_sum};
use crate::surface::RadialGraph;

/// A surface together with its computed geometry at full and half
/// resolution. Every integral evaluated through this pairs the full-grid
/// value with the half-grid value to attach a defensible quadrature error.
pub struct EvaluatedSurface {
    pub graph: RadialGraph,
    pub geom: Vec<GeometrySample>,
    pub coarse_graph: RadialGraph,
    pub coarse_geom: Vec<GeometrySample>,
}

impl EvaluatedSurface {
    pub fn new(graph: RadialGraph) -> Result<Self> {
        let geom = compute_geometry(&graph)?;
        let coarse_graph = graph.half_resolution()?;
        let coarse_geom = compute_geometry(&coarse_graph)?;
        Ok(Self {
            graph,
            geom,
            coarse_graph,
            coarse_geom,
        })
    }

    pub fn n(&self) -> usize {
        self.graph.grid.dim()
    }

    /// Integral of a per-node scalar against the surface measure, with the
    /// quadrature error estimated as |full - half resolution|.
    pub fn integrate<F>(&self, f: F) -> (f64, f64)
    where
        F: Fn(&GeometrySample) -> f64 + Sync,
    {
        let fine = integrate_samples(&self.geom, &f);
        let coarse = integrate_samples(&self.coarse_geom, &f);
        (fine, (fine - coarse).abs())
    }

    /// Weighted enclosed volume `int_Omega lambda' dv` by iterated
    /// quadrature: adaptive Gauss-Legendre in r under the surface quadrature
    /// on S^n. The r-integral starts at 0 in both the pole and the horizon
    /// case (the horizon region is the solid annulus between {0} x N and the
    /// graph).
    pub fn weighted_volume(&self) -> (f64, f64) {
        let fine = weighted_volume_of(&self.graph);
        let coarse = weighted_volume_of(&self.coarse_graph);
        (fine, (fine - coarse).abs())
    }

    /// min over nodes of (kappa_min - lambda'' u / (lambda lambda')), the
    /// pointwise margin of static-convexity.
    pub fn static_convex_margin(&self) -> Result<f64> {
        let mut margin = f64::INFINITY;
        for s in &self.geom {
            if s.warp.lam1 <= 0.0 {
                return Err(WarpError::PotentialSign(s.warp.lam1));
            }
            let threshold = s.warp.lam2 * s.u / (s.warp.lam * s.warp.lam1);
            margin = margin.min(s.kappa_min() - threshold);
        }
        Ok(margin)
    }

    /// Largest kappa spread over nodes; ~0 exactly on umbilic surfaces.
    pub fn umbilicity_spread(&self) -> f64 {
        self.geom
            .iter()
            .map(|s| s.kappa_max() - s.kappa_min())
            .fold(0.0, f64::max)
    }
}

/// Pairwise-summed quadrature over precomputed geometry samples.
pub fn integrate_samples<F>(geom: &[GeometrySample], f: F) -> f64
where
    F: Fn(&GeometrySample) -> f64 + Sync,
{
    let terms = crate::par::map_indexed(geom.len(), true, |k| f(&geom[k]) * geom[k].area_weight);
    pairwise_sum(&terms)
}

/// `int_Omega lambda' dv` for a single graph (no error estimate).
pub fn weighted_volume_of(graph: &RadialGraph) -> f64 {
    let manifold = graph.manifold.clone();
    let n = graph.grid.dim() as i32;
    let terms = crate::par::map_indexed(graph.grid.node_count(), true, |k| {
        let inner = integrate_adaptive(
            &|r| {
                let w = manifold.eval(r).expect("r inside domain by construction");
                w.lam1 * w.lam.powi(n)
            },
            0.0,
            graph.rho[k],
            1e-12,
        );
        inner * graph.grid.sigma_weight[k]
    });
    pairwise_sum(&terms)
}

/// Intrinsic first and second derivatives of nodal scalar fields with
/// respect to the induced metric: coordinate gradients, covariant Hessians
/// and the Laplace-Beltrami operator. Christoffel symbols of the induced
/// metric are assembled once from stencil derivatives of the nodal metric
/// components.
pub struct SurfaceCalculus<'a> {
    graph: &'a RadialGraph,
    geom: &'a [GeometrySample],
    /// gamma[node][c] = Christoffel matrix (Gamma^c_{ab})_{ab}.
    gamma: Vec<[Mat2; 2]>,
}

impl<'a> SurfaceCalculus<'a> {
    pub fn new(graph: &'a RadialGraph, geom: &'a [GeometrySample]) -> Self {
        let grid = &graph.grid;
        let n = grid.dim();
        let n_nodes = grid.node_count();

        // nodal metric component fields
        let mut comp = vec![vec![0.0; n_nodes]; 3]; // g_tt, g_tp, g_pp
        for (k, s) in geom.iter().enumerate() {
            comp[0][k] = s.g[0][0];
            comp[1][k] = s.g[0][1];
            comp[2][k] = s.g[1][1];
        }
        let dg_t: Vec<Vec<f64>> = comp.iter().map(|f| grid.d_theta(f)).collect();
        let dg_p: Vec<Vec<f64>> = comp.iter().map(|f| grid.d_phi(f)).collect();

        let comp_index = |a: usize, b: usize| match (a, b) {
            (0, 0) => 0,
            (0, 1) | (1, 0) => 1,
            _ => 2,
        };

        let gamma = (0..n_nodes)
            .map(|k| {
                let mut gm: [Mat2; 2] = [[[0.0; 2]; 2]; 2];
                for c in 0..n {
                    for a in 0..n {
                        for b in 0..n {
                            let mut acc = 0.0;
                            for l in 0..n {
                                // d_a g_{bl} + d_b g_{al} - d_l g_{ab}
                                let da = if a == 0 {
                                    dg_t[comp_index(b, l)][k]
                                } else {
                                    dg_p[comp_index(b, l)][k]
                                };
                                let db = if b == 0 {
                                    dg_t[comp_index(a, l)][k]
                                } else {
                                    dg_p[comp_index(a, l)][k]
                                };
                                let dl = if l == 0 {
                                    dg_t[comp_index(a, b)][k]
                                } else {
                                    dg_p[comp_index(a, b)][k]
                                };
                                acc += geom[k].g_inv[c][l] * (da + db - dl);
                            }
                            gm[c][a][b] = 0.5 * acc;
                        }
                    }
                }
                gm
            })
            .collect();

        Self { graph, geom, gamma }
    }

    /// Coordinate partials (d_theta f, d_phi f) per node.
    pub fn gradient(&self, f: &[f64]) -> Vec<[f64; 2]> {
        let grid = &self.graph.grid;
        let dt = grid.d_theta(f);
        let dp = grid.d_phi(f);
        dt.into_iter().zip(dp).map(|(a, b)| [a, b]).collect()
    }

    /// Covariant Hessian per node.
    pub fn hessian(&self, f: &[f64]) -> Vec<Mat2> {
        let grid = &self.graph.grid;
        let n = grid.dim();
        let dt = grid.d_theta(f);
        let dp = grid.d_phi(f);
        let dtt = grid.d2_theta(f);
        let dpp = grid.d2_phi(f);
        let dtp = grid.d_theta_phi(f);
        (0..f.len())
            .map(|k| {
                let partials = [[dtt[k], dtp[k]], [dtp[k], dpp[k]]];
                let grad = [dt[k], dp[k]];
                let mut hess: Mat2 = [[0.0; 2]; 2];
                for a in 0..n {
                    for b in 0..n {
                        let mut acc = partials[a][b];
                        for c in 0..n {
                            acc -= self.gamma[k][c][a][b] * grad[c];
                        }
                        hess[a][b] = acc;
                    }
                }
                hess
            })
            .collect()
    }

    /// Laplace-Beltrami of a nodal field.
    pub fn laplacian(&self, f: &[f64]) -> Vec<f64> {
        let n = self.graph.grid.dim();
        self.hessian(f)
            .into_iter()
            .enumerate()
            .map(|(k, hess)| {
                let mut acc = 0.0;
                for a in 0..n {
                    for b in 0..n {
                        acc += self.geom[k].g_inv[a][b] * hess[a][b];
                    }
                }
                acc
            })
            .collect()
    }

    /// Divergence of a tangent vector field given by contravariant
    /// coordinate components.
    pub fn divergence(&self, comp_t: &[f64], comp_p: &[f64]) -> Vec<f64> {
        let grid = &self.graph.grid;
        let n = grid.dim();
        let n_nodes = comp_t.len();
        // div T = (1/sqrt g) d_a (sqrt g T^a)
        let sqrt_g: Vec<f64> = self
            .geom
            .iter()
            .map(|s| {
                if n == 1 {
                    s.g[0][0].sqrt()
                } else {
                    (s.g[0][0] * s.g[1][1] - s.g[0][1] * s.g[1][0]).sqrt()
                }
            })
            .collect();
        let qt: Vec<f64> = (0..n_nodes).map(|k| sqrt_g[k] * comp_t[k]).collect();
        let dqt = grid.d_theta(&qt);
        if n == 1 {
            (0..n_nodes).map(|k| dqt[k] / sqrt_g[k]).collect()
        } else {
            let qp: Vec<f64> = (0..n_nodes).map(|k| sqrt_g[k] * comp_p[k]).collect();
            let dqp = grid.d_phi(&qp);
            (0..n_nodes).map(|k| (dqt[k] + dqp[k]) / sqrt_g[k]).collect()
        }
    }
}

/// Max-norm residuals of the three conformal-field identities on a surface:
/// the gradient identity for Phi, the Hessian identity
/// `Hess Phi = lambda' g - u h`, and the gradient identity for the support
/// function.
#[derive(Debug, Clone, Copy)]
pub struct ConformalResiduals {
    pub grad_phi: f64,
    pub hessian_phi: f64,
    pub grad_u: f64,
}

/// Residuals of the Phi / support-function identities, all derivatives taken
/// intrinsically on the grid.
pub fn conformal_residuals(surface: &EvaluatedSurface) -> Result<ConformalResiduals> {
    let graph = &surface.graph;
    let geom = &surface.geom;
    let n = graph.grid.dim();
    let calc = SurfaceCalculus::new(graph, geom);

    let phi: Vec<f64> = geom.iter().map(|s| s.warp.phi).collect();
    let u: Vec<f64> = geom.iter().map(|s| s.u).collect();

    let grad_phi = calc.gradient(&phi);
    let hess_phi = calc.hessian(&phi);
    let grad_u = calc.gradient(&u);

    let mut r_grad_phi = 0.0f64;
    let mut r_hess = 0.0f64;
    let mut r_grad_u = 0.0f64;
    for (k, s) in geom.iter().enumerate() {
        let v_tan = s.v_tangent();
        for a in 0..n {
            // grad Phi = <V, e_a>
            r_grad_phi = r_grad_phi.max((grad_phi[k][a] - v_tan[a]).abs());
            // grad u = h_a^b <V, e_b>
            let mut hv = 0.0;
            for b in 0..n {
                for c in 0..n {
                    hv += s.h[a][b] * s.g_inv[b][c] * v_tan[c];
                }
            }
            r_grad_u = r_grad_u.max((grad_u[k][a] - hv).abs());
            for b in 0..n {
                let expect = s.warp.lam1 * s.g[a][b] - s.u * s.h[a][b];
                r_hess = r_hess.max((hess_phi[k][a][b] - expect).abs());
            }
        }
    }
    Ok(ConformalResiduals {
        grad_phi: r_grad_phi,
        hessian_phi: r_hess,
        grad_u: r_grad_u,
    })
}
