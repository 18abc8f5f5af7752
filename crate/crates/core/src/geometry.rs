//! Extrinsic geometry of radial graphs.
//!
//! Two backends compute the same [`GeometrySample`] contract:
//!
//! * [`compute_geometry`] assembles the second fundamental form from the
//!   warped-product Christoffel symbols on the graph parametrization;
//! * [`compute_geometry_embedded`] (space forms only) embeds the surface in
//!   the hyperboloid model, Euclidean space, or the round sphere and
//!   differentiates the embedded unit normal. It exists solely to
//!   cross-validate the first backend.

use crate::error::{Result, WarpError};
use crate::surface::RadialGraph;
use crate::symfunc::Spectrum;
use crate::warped::WarpSample;

/// 2x2 symmetric matrix storage; n = 1 uses only `[0][0]`.
pub type Mat2 = [[f64; 2]; 2];

/// Per-node extrinsic data of a hypersurface.
#[derive(Debug, Clone)]
pub struct GeometrySample {
    pub node: usize,
    /// Fiber dimension of the surface (1 or 2).
    pub n: usize,
    pub theta: f64,
    pub phi: f64,
    /// Radius of the node.
    pub r: f64,
    /// Induced metric in the (theta, phi) coordinate basis.
    pub g: Mat2,
    pub g_inv: Mat2,
    /// Second fundamental form, outward normal convention.
    pub h: Mat2,
    /// Principal curvatures (eigenvalues of the pencil h w = kappa g w).
    pub kappa: [f64; 2],
    /// g-orthonormal generalized eigenvectors, column alpha belongs to
    /// kappa[alpha]; contravariant components.
    pub eigvec: Mat2,
    /// Support function u = <lambda d_r, nu> = lambda / v.
    pub u: f64,
    /// Graph gradient factor sqrt(1 + lambda^-2 |grad rho|^2_sigma).
    pub v: f64,
    /// <d_r, nu> = 1 / v.
    pub normal_radial: f64,
    pub warp: WarpSample,
    /// Quadrature weight against the surface measure d mu.
    pub area_weight: f64,
    /// Coordinate partials (rho_theta, rho_phi).
    pub rho_grad: [f64; 2],
}

impl GeometrySample {
    pub fn kappa_spectrum(&self) -> Spectrum {
        Spectrum::new(self.kappa[..self.n].to_vec())
    }

    /// Mean curvature p_1(kappa).
    pub fn p1(&self) -> f64 {
        self.kappa[..self.n].iter().sum::<f64>() / self.n as f64
    }

    /// |h|^2 = sum kappa_i^2.
    pub fn h_norm_sq(&self) -> f64 {
        self.kappa[..self.n].iter().map(|k| k * k).sum()
    }

    pub fn kappa_min(&self) -> f64 {
        self.kappa[..self.n].iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn kappa_max(&self) -> f64 {
        self.kappa[..self.n]
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// <V, e_a> = lambda * rho_a in the coordinate basis.
    pub fn v_tangent(&self) -> [f64; 2] {
        [self.warp.lam * self.rho_grad[0], self.warp.lam * self.rho_grad[1]]
    }
}

/// Nodal derivative fields of the radial function, shared by both backends.
pub(crate) struct RhoDerivatives {
    pub dt: Vec<f64>,
    pub dp: Vec<f64>,
    pub dtt: Vec<f64>,
    pub dpp: Vec<f64>,
    pub dtp: Vec<f64>,
}

pub(crate) fn rho_derivatives(graph: &RadialGraph) -> RhoDerivatives {
    let grid = &graph.grid;
    RhoDerivatives {
        dt: grid.d_theta(&graph.rho),
        dp: grid.d_phi(&graph.rho),
        dtt: grid.d2_theta(&graph.rho),
        dpp: grid.d2_phi(&graph.rho),
        dtp: grid.d_theta_phi(&graph.rho),
    }
}

/// Geometry from the warped-product Christoffel symbols.
pub fn compute_geometry(graph: &RadialGraph) -> Result<Vec<GeometrySample>> {
    compute_geometry_impl(graph, true)
}

/// Sequential variant of [`compute_geometry`], kept public for the
/// parallel-vs-sequential benchmark.
pub fn compute_geometry_seq(graph: &RadialGraph) -> Result<Vec<GeometrySample>> {
    compute_geometry_impl(graph, false)
}

fn compute_geometry_impl(graph: &RadialGraph, parallel: bool) -> Result<Vec<GeometrySample>> {
    let d = rho_derivatives(graph);
    let n_nodes = graph.grid.node_count();
    crate::par::try_map_indexed(n_nodes, parallel, |k| node_geometry(graph, &d, k))
}

fn node_geometry(graph: &RadialGraph, d: &RhoDerivatives, k: usize) -> Result<GeometrySample> {
    let grid = &graph.grid;
    let n = grid.dim();
    let theta = grid.node_theta(k);
    let phi = grid.node_phi(k);
    let r = graph.rho[k];
    let warp = graph.manifold.eval(r)?;
    let (lam, lam1) = (warp.lam, warp.lam1);
    if lam <= 0.0 {
        return Err(WarpError::GeometryInvalid(format!(
            "warp function non-positive at node radius {r}"
        )));
    }

    let (rt, rp) = (d.dt[k], d.dp[k]);
    let (sin_t, cos_t) = theta.sin_cos();

    // round fiber metric sigma and the covariant Hessian of rho w.r.t. sigma
    let (sigma, hess): (Mat2, Mat2) = if n == 1 {
        ([[1.0, 0.0], [0.0, 0.0]], [[d.dtt[k], 0.0], [0.0, 0.0]])
    } else {
        // fiber Christoffels: G^t_pp = -sin t cos t, G^p_tp = cot t
        let h_tt = d.dtt[k];
        let h_tp = d.dtp[k] - (cos_t / sin_t) * rp;
        let h_pp = d.dpp[k] + sin_t * cos_t * rt;
        (
            [[1.0, 0.0], [0.0, sin_t * sin_t]],
            [[h_tt, h_tp], [h_tp, h_pp]],
        )
    };

    let grad_sq = if n == 1 {
        rt * rt
    } else {
        rt * rt + rp * rp / (sin_t * sin_t)
    };
    let v = (1.0 + grad_sq / (lam * lam)).sqrt();

    let rho_grad = [rt, rp];
    let mut g: Mat2 = [[0.0; 2]; 2];
    let mut h: Mat2 = [[0.0; 2]; 2];
    for a in 0..n {
        for b in 0..n {
            g[a][b] = rho_grad[a] * rho_grad[b] + lam * lam * sigma[a][b];
            h[a][b] = (lam * lam1 * sigma[a][b] + 2.0 * (lam1 / lam) * rho_grad[a] * rho_grad[b]
                - hess[a][b])
                / v;
        }
    }

    let (det_g, g_inv) = invert(&g, n).ok_or_else(|| {
        WarpError::GeometryInvalid(format!(
            "induced metric lost positive definiteness at node {k} (r = {r})"
        ))
    })?;

    let (kappa, eigvec) = generalized_eigen(&h, &g, n);

    let sqrt_det_sigma = if n == 1 { 1.0 } else { sin_t };
    let area_weight = det_g.sqrt() / sqrt_det_sigma * grid.sigma_weight[k];

    Ok(GeometrySample {
        node: k,
        n,
        theta,
        phi,
        r,
        g,
        g_inv,
        h,
        kappa,
        eigvec,
        u: lam / v,
        v,
        normal_radial: 1.0 / v,
        warp,
        area_weight,
        rho_grad,
    })
}

/// Geometry from an explicit space-form embedding; independent oracle.
pub fn compute_geometry_embedded(graph: &RadialGraph) -> Result<Vec<GeometrySample>> {
    let c = graph
        .manifold
        .curvature()
        .ok_or(WarpError::UnsupportedManifold(
            "embedded backend supports space forms only",
        ))?;
    let grid = &graph.grid;
    let n = grid.dim();
    let n_nodes = grid.node_count();
    // ambient embedding dimension and signature
    let (dim, sig): (usize, [f64; 4]) = match c {
        0 => (n + 1, [1.0; 4]),
        -1 => (n + 2, [-1.0, 1.0, 1.0, 1.0]),
        1 => (n + 2, [1.0; 4]),
        _ => unreachable!(),
    };

    // embedded position per component
    let mut x_comp: Vec<Vec<f64>> = vec![vec![0.0; n_nodes]; dim];
    let mut dr_comp: Vec<Vec<f64>> = vec![vec![0.0; n_nodes]; dim];
    for k in 0..n_nodes {
        let rho = graph.rho[k];
        let omega = direction(n, grid.node_theta(k), grid.node_phi(k));
        let (x, dr) = embed(c, rho, &omega, n);
        for p in 0..dim {
            x_comp[p][k] = x[p];
            dr_comp[p][k] = dr[p];
        }
    }

    // tangents by grid stencils on the embedded components
    let ex: Vec<Vec<f64>> = x_comp.iter().map(|f| grid.d_theta_local(f)).collect();
    let ep: Vec<Vec<f64>> = x_comp.iter().map(|f| grid.d_phi(f)).collect();

    // unit normal per node: project d_r against the tangent plane
    let mut nu_comp: Vec<Vec<f64>> = vec![vec![0.0; n_nodes]; dim];
    let mut g_store: Vec<Mat2> = vec![[[0.0; 2]; 2]; n_nodes];
    let mut ginv_store: Vec<Mat2> = vec![[[0.0; 2]; 2]; n_nodes];
    for k in 0..n_nodes {
        let e: [[f64; 4]; 2] = tangent_at(&ex, &ep, dim, k);
        let mut g: Mat2 = [[0.0; 2]; 2];
        for a in 0..n {
            for b in 0..n {
                g[a][b] = dot(&e[a], &e[b], &sig, dim);
            }
        }
        let (_, g_inv) = invert(&g, n).ok_or_else(|| {
            WarpError::GeometryInvalid(format!("embedded metric degenerate at node {k}"))
        })?;
        g_store[k] = g;
        ginv_store[k] = g_inv;

        let mut cand = [0.0; 4];
        for p in 0..dim {
            cand[p] = dr_comp[p][k];
        }
        // subtract tangential part
        let mut coeff = [0.0; 2];
        for a in 0..n {
            for b in 0..n {
                coeff[a] += g_inv[a][b] * dot(&cand, &e[b], &sig, dim);
            }
        }
        let mut nu = cand;
        for a in 0..n {
            for p in 0..dim {
                nu[p] -= coeff[a] * e[a][p];
            }
        }
        let norm = dot(&nu, &nu, &sig, dim).sqrt();
        for p in 0..dim {
            nu[p] /= norm;
        }
        // outward orientation
        if dot(&nu, &cand, &sig, dim) < 0.0 {
            for p in 0..dim {
                nu[p] = -nu[p];
            }
        }
        for p in 0..dim {
            nu_comp[p][k] = nu[p];
        }
    }

    // h_ab = <d_a nu, e_b>
    let dnu_t: Vec<Vec<f64>> = nu_comp.iter().map(|f| grid.d_theta_local(f)).collect();
    let dnu_p: Vec<Vec<f64>> = nu_comp.iter().map(|f| grid.d_phi(f)).collect();

    let rho_dt = grid.d_theta_local(&graph.rho);
    let rho_dp = grid.d_phi(&graph.rho);

    let mut out = Vec::with_capacity(n_nodes);
    for k in 0..n_nodes {
        let theta = grid.node_theta(k);
        let phi = grid.node_phi(k);
        let r = graph.rho[k];
        let warp = graph.manifold.eval(r)?;
        let e: [[f64; 4]; 2] = tangent_at(&ex, &ep, dim, k);
        let dnu: [[f64; 4]; 2] = tangent_at(&dnu_t, &dnu_p, dim, k);
        let mut h: Mat2 = [[0.0; 2]; 2];
        for a in 0..n {
            for b in 0..n {
                h[a][b] = dot(&dnu[a], &e[b], &sig, dim);
            }
        }
        // symmetrize: the two off-diagonal estimates differ by stencil error
        if n == 2 {
            let s = 0.5 * (h[0][1] + h[1][0]);
            h[0][1] = s;
            h[1][0] = s;
        }
        let g = g_store[k];
        let g_inv = ginv_store[k];
        let (kappa, eigvec) = generalized_eigen(&h, &g, n);

        let mut nu = [0.0; 4];
        let mut cand = [0.0; 4];
        for p in 0..dim {
            nu[p] = nu_comp[p][k];
            cand[p] = dr_comp[p][k];
        }
        let normal_radial = dot(&cand, &nu, &sig, dim);
        let u = warp.lam * normal_radial;
        let v = 1.0 / normal_radial;

        let det_g = if n == 1 {
            g[0][0]
        } else {
            g[0][0] * g[1][1] - g[0][1] * g[1][0]
        };
        let sqrt_det_sigma = if n == 1 { 1.0 } else { theta.sin() };
        let area_weight = det_g.sqrt() / sqrt_det_sigma * grid.sigma_weight[k];

        out.push(GeometrySample {
            node: k,
            n,
            theta,
            phi,
            r,
            g,
            g_inv,
            h,
            kappa,
            eigvec,
            u,
            v,
            normal_radial,
            warp,
            area_weight,
            rho_grad: [rho_dt[k], rho_dp[k]],
        });
    }
    Ok(out)
}

fn tangent_at(dt: &[Vec<f64>], dp: &[Vec<f64>], dim: usize, k: usize) -> [[f64; 4]; 2] {
    let mut e = [[0.0; 4]; 2];
    for p in 0..dim {
        e[0][p] = dt[p][k];
        e[1][p] = dp[p][k];
    }
    e
}

fn dot(a: &[f64; 4], b: &[f64; 4], sig: &[f64; 4], dim: usize) -> f64 {
    (0..dim).map(|p| sig[p] * a[p] * b[p]).sum()
}

fn direction(n: usize, theta: f64, phi: f64) -> [f64; 3] {
    if n == 1 {
        [theta.cos(), theta.sin(), 0.0]
    } else {
        let (st, ct) = (theta.sin(), theta.cos());
        [st * phi.cos(), st * phi.sin(), ct]
    }
}

/// Position and radial direction of the space-form embedding.
fn embed(c: i32, rho: f64, omega: &[f64; 3], n: usize) -> ([f64; 4], [f64; 4]) {
    let mut x = [0.0; 4];
    let mut dr = [0.0; 4];
    match c {
        0 => {
            for p in 0..=n {
                x[p] = rho * omega[p];
                dr[p] = omega[p];
            }
        }
        -1 => {
            x[0] = rho.cosh();
            dr[0] = rho.sinh();
            for p in 0..=n {
                x[p + 1] = rho.sinh() * omega[p];
                dr[p + 1] = rho.cosh() * omega[p];
            }
        }
        1 => {
            x[0] = rho.cos();
            dr[0] = -rho.sin();
            for p in 0..=n {
                x[p + 1] = rho.sin() * omega[p];
                dr[p + 1] = rho.cos() * omega[p];
            }
        }
        _ => unreachable!(),
    }
    (x, dr)
}

/// Determinant and inverse of the leading n x n block, None if not SPD.
fn invert(g: &Mat2, n: usize) -> Option<(f64, Mat2)> {
    if n == 1 {
        if g[0][0] <= 0.0 {
            return None;
        }
        Some((g[0][0], [[1.0 / g[0][0], 0.0], [0.0, 0.0]]))
    } else {
        let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
        if g[0][0] <= 0.0 || det <= 0.0 {
            return None;
        }
        Some((
            det,
            [
                [g[1][1] / det, -g[0][1] / det],
                [-g[1][0] / det, g[0][0] / det],
            ],
        ))
    }
}

/// Solve the symmetric pencil h w = kappa g w (g SPD) for n in {1, 2}.
///
/// Returns eigenvalues (ascending) and g-orthonormal eigenvectors as columns.
/// Via the Cholesky factor of g so the reduced problem is symmetric and the
/// eigenvalues are guaranteed real.
pub(crate) fn generalized_eigen(h: &Mat2, g: &Mat2, n: usize) -> ([f64; 2], Mat2) {
    if n == 1 {
        let kappa = h[0][0] / g[0][0];
        return ([kappa, 0.0], [[1.0 / g[0][0].sqrt(), 0.0], [0.0, 0.0]]);
    }
    // g = L L^T
    let l11 = g[0][0].sqrt();
    let l21 = g[1][0] / l11;
    let l22 = (g[1][1] - l21 * l21).sqrt();
    // S = L^-1 h L^-T, symmetric
    // first B = L^-1 h: row solves
    let b11 = h[0][0] / l11;
    let b12 = h[0][1] / l11;
    let b21 = (h[1][0] - l21 * b11) / l22;
    let b22 = (h[1][1] - l21 * b12) / l22;
    // S = B L^-T: column solves
    let s11 = b11 / l11;
    let s21 = b21 / l11;
    let s22 = (b22 - l21 * s21) / l22;
    let s12 = s21; // symmetric by construction

    // closed-form symmetric 2x2 eigen
    let tr = s11 + s22;
    let diff = s11 - s22;
    let disc = (diff * diff + 4.0 * s12 * s12).sqrt();
    let k1 = 0.5 * (tr - disc);
    let k2 = 0.5 * (tr + disc);

    // eigenvectors of S
    let y = if s12.abs() > 1e-300 {
        let y1 = [s12, k1 - s11];
        let y2 = [s12, k2 - s11];
        [y1, y2]
    } else if s11 <= s22 {
        [[1.0, 0.0], [0.0, 1.0]]
    } else {
        [[0.0, 1.0], [1.0, 0.0]]
    };

    let mut w: Mat2 = [[0.0; 2]; 2];
    for (alpha, ya) in y.iter().enumerate() {
        let norm = (ya[0] * ya[0] + ya[1] * ya[1]).sqrt();
        let y0 = ya[0] / norm;
        let y1 = ya[1] / norm;
        // w = L^-T y
        let w1 = y1 / l22;
        let w0 = (y0 - l21 * w1) / l11;
        w[0][alpha] = w0;
        w[1][alpha] = w1;
    }
    ([k1, k2], w)
}
