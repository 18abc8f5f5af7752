//! Quadrature grids on S^1 and S^2 and the derivative stencils used for all
//! intrinsic surface calculus.
//!
//! S^1: uniform periodic grid, order-8 central differences (spectral in
//! practice at the resolutions used). S^2: tensor grid of Gauss-Legendre
//! nodes in mu = cos(polar angle) times a uniform azimuth grid; polar
//! derivatives go through the barycentric differentiation matrix in mu,
//! azimuth derivatives through the periodic stencils. Gauss nodes are
//! strictly interior, so no pole node ever appears.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::quadrature::gauss_legendre;

/// Order-8 central difference weights, first derivative (one-sided half).
const D1_W: [f64; 4] = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];
/// Order-8 central difference weights, second derivative.
const D2_C0: f64 = -205.0 / 72.0;
const D2_W: [f64; 4] = [8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "dim")]
pub enum GridSpec {
    /// n = 1: N_theta equally spaced angles on S^1.
    #[serde(rename = "circle")]
    Circle { n_theta: usize },
    /// n = 2: N_mu Gauss-Legendre nodes in cos(polar angle) x N_phi uniform
    /// azimuth nodes.
    #[serde(rename = "sphere")]
    Sphere { n_mu: usize, n_phi: usize },
}

impl GridSpec {
    pub fn dim(&self) -> usize {
        match self {
            GridSpec::Circle { .. } => 1,
            GridSpec::Sphere { .. } => 2,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        match *self {
            GridSpec::Circle { n_theta } => {
                if n_theta < 16 {
                    return Err(format!("N_theta = {n_theta} < 16"));
                }
                if n_theta % 2 != 0 {
                    return Err(format!("N_theta = {n_theta} must be even"));
                }
            }
            GridSpec::Sphere { n_mu, n_phi } => {
                if n_mu < 8 {
                    return Err(format!("N_mu = {n_mu} < 8"));
                }
                if n_phi < 16 {
                    return Err(format!("N_phi = {n_phi} < 16"));
                }
                if n_phi % 2 != 0 {
                    return Err(format!("N_phi = {n_phi} must be even"));
                }
            }
        }
        Ok(())
    }

    /// Grid at half the resolution, used for quadrature error estimates.
    pub fn half(&self) -> GridSpec {
        match *self {
            GridSpec::Circle { n_theta } => GridSpec::Circle { n_theta: n_theta / 2 },
            GridSpec::Sphere { n_mu, n_phi } => GridSpec::Sphere {
                n_mu: n_mu / 2,
                n_phi: n_phi / 2,
            },
        }
    }

    /// Grid at double the resolution, used for convergence studies.
    pub fn double(&self) -> GridSpec {
        match *self {
            GridSpec::Circle { n_theta } => GridSpec::Circle { n_theta: n_theta * 2 },
            GridSpec::Sphere { n_mu, n_phi } => GridSpec::Sphere {
                n_mu: n_mu * 2,
                n_phi: n_phi * 2,
            },
        }
    }
}

/// Realized grid: node angles, quadrature weights and differentiation data.
#[derive(Debug, Clone)]
pub struct Grid {
    pub spec: GridSpec,
    /// Polar angle theta per polar index (n=1: the circle angle).
    pub theta: Vec<f64>,
    /// Azimuth angles (empty for n=1).
    pub phi: Vec<f64>,
    /// Quadrature weight per node against the round measure d sigma on S^n.
    /// Indexing: node = i_theta * n_phi + j_phi for n=2, node = i for n=1.
    pub sigma_weight: Vec<f64>,
    /// Barycentric differentiation matrix in mu (n=2 only), row-major n_mu x n_mu.
    d_mu: Vec<f64>,
    d2_mu: Vec<f64>,
    /// mu = cos(theta) per polar index (n=2 only).
    pub mu: Vec<f64>,
    /// Barycentric weights for interpolation in mu (n=2 only).
    bary_w: Vec<f64>,
}

impl Grid {
    pub fn new(spec: GridSpec) -> Self {
        spec.validate().expect("invalid grid spec");
        match spec {
            GridSpec::Circle { n_theta } => {
                let theta: Vec<f64> = (0..n_theta).map(|i| 2.0 * PI * i as f64 / n_theta as f64).collect();
                let w = 2.0 * PI / n_theta as f64;
                Grid {
                    spec,
                    theta,
                    phi: Vec::new(),
                    sigma_weight: vec![w; n_theta],
                    d_mu: Vec::new(),
                    d2_mu: Vec::new(),
                    mu: Vec::new(),
                    bary_w: Vec::new(),
                }
            }
            GridSpec::Sphere { n_mu, n_phi } => {
                let (mu, w_mu) = gauss_legendre(n_mu);
                // theta decreasing as mu increases; keep indexed by mu order
                let theta: Vec<f64> = mu.iter().map(|m| m.acos()).collect();
                let phi: Vec<f64> = (0..n_phi).map(|j| 2.0 * PI * j as f64 / n_phi as f64).collect();
                let w_phi = 2.0 * PI / n_phi as f64;
                let mut sigma_weight = Vec::with_capacity(n_mu * n_phi);
                for wi in &w_mu {
                    for _ in 0..n_phi {
                        sigma_weight.push(wi * w_phi);
                    }
                }
                let bary_w = bary_weights_gl(&mu, &w_mu);
                let d_mu = diff_matrix(&mu, &bary_w);
                let d2_mu = mat_mul(&d_mu, &d_mu, n_mu);
                Grid {
                    spec,
                    theta,
                    phi,
                    sigma_weight,
                    d_mu,
                    d2_mu,
                    mu,
                    bary_w,
                }
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    pub fn node_count(&self) -> usize {
        match self.spec {
            GridSpec::Circle { n_theta } => n_theta,
            GridSpec::Sphere { n_mu, n_phi } => n_mu * n_phi,
        }
    }

    /// Polar and azimuth index of a flat node index.
    pub fn split_index(&self, node: usize) -> (usize, usize) {
        match self.spec {
            GridSpec::Circle { .. } => (node, 0),
            GridSpec::Sphere { n_phi, .. } => (node / n_phi, node % n_phi),
        }
    }

    pub fn node_theta(&self, node: usize) -> f64 {
        let (i, _) = self.split_index(node);
        self.theta[i]
    }

    pub fn node_phi(&self, node: usize) -> f64 {
        let (_, j) = self.split_index(node);
        if self.dim() == 1 {
            0.0
        } else {
            self.phi[j]
        }
    }

    /// d/d theta of a nodal field.
    pub fn d_theta(&self, f: &[f64]) -> Vec<f64> {
        match self.spec {
            GridSpec::Circle { n_theta } => periodic_d1(f, 2.0 * PI / n_theta as f64),
            GridSpec::Sphere { n_mu, n_phi } => {
                // df/dtheta = -sin(theta) df/dmu
                let dmu = self.apply_mu_matrix(&self.d_mu, f, n_mu, n_phi);
                let mut out = vec![0.0; f.len()];
                for i in 0..n_mu {
                    let s = self.theta[i].sin();
                    for j in 0..n_phi {
                        out[i * n_phi + j] = -s * dmu[i * n_phi + j];
                    }
                }
                out
            }
        }
    }

    /// d^2/d theta^2 of a nodal field.
    pub fn d2_theta(&self, f: &[f64]) -> Vec<f64> {
        match self.spec {
            GridSpec::Circle { n_theta } => periodic_d2(f, 2.0 * PI / n_theta as f64),
            GridSpec::Sphere { n_mu, n_phi } => {
                // d2f/dtheta2 = sin^2(theta) f_mumu - cos(theta) f_mu
                let dmu = self.apply_mu_matrix(&self.d_mu, f, n_mu, n_phi);
                let d2mu = self.apply_mu_matrix(&self.d2_mu, f, n_mu, n_phi);
                let mut out = vec![0.0; f.len()];
                for i in 0..n_mu {
                    let s2 = self.theta[i].sin().powi(2);
                    let c = self.mu[i];
                    for j in 0..n_phi {
                        let idx = i * n_phi + j;
                        out[idx] = s2 * d2mu[idx] - c * dmu[idx];
                    }
                }
                out
            }
        }
    }

    /// d/d phi (zero field for n=1).
    pub fn d_phi(&self, f: &[f64]) -> Vec<f64> {
        match self.spec {
            GridSpec::Circle { .. } => vec![0.0; f.len()],
            GridSpec::Sphere { n_mu, n_phi } => {
                let h = 2.0 * PI / n_phi as f64;
                let mut out = vec![0.0; f.len()];
                for i in 0..n_mu {
                    let row = &f[i * n_phi..(i + 1) * n_phi];
                    let d = periodic_d1(row, h);
                    out[i * n_phi..(i + 1) * n_phi].copy_from_slice(&d);
                }
                out
            }
        }
    }

    /// d^2/d phi^2 (zero field for n=1).
    pub fn d2_phi(&self, f: &[f64]) -> Vec<f64> {
        match self.spec {
            GridSpec::Circle { .. } => vec![0.0; f.len()],
            GridSpec::Sphere { n_mu, n_phi } => {
                let h = 2.0 * PI / n_phi as f64;
                let mut out = vec![0.0; f.len()];
                for i in 0..n_mu {
                    let row = &f[i * n_phi..(i + 1) * n_phi];
                    let d = periodic_d2(row, h);
                    out[i * n_phi..(i + 1) * n_phi].copy_from_slice(&d);
                }
                out
            }
        }
    }

    /// Mixed partial d^2/(d theta d phi).
    pub fn d_theta_phi(&self, f: &[f64]) -> Vec<f64> {
        match self.spec {
            GridSpec::Circle { .. } => vec![0.0; f.len()],
            GridSpec::Sphere { .. } => self.d_theta(&self.d_phi(f)),
        }
    }

    /// d/d theta by local 7-point polynomial stencils in theta along each
    /// meridian (Fornberg weights on the non-uniform nodes). Used by the
    /// embedding-based geometry backend so its discretization is independent
    /// of the global mu differentiation matrix.
    pub fn d_theta_local(&self, f: &[f64]) -> Vec<f64> {
        match self.spec {
            GridSpec::Circle { n_theta } => periodic_d1(f, 2.0 * PI / n_theta as f64),
            GridSpec::Sphere { n_mu, n_phi } => {
                // Meridians continue smoothly through the poles onto the
                // antipodal azimuth column: the point at polar parameter
                // -theta on meridian phi is the point (theta, phi + pi).
                // Ghost nodes on both sides keep every stencil centered.
                const G: usize = 3;
                let width = 2 * G + 1;
                let mut ext_theta = vec![0.0; n_mu + 2 * G];
                // theta is descending (indexed by ascending mu): the low end
                // of the column sits near the south pole theta = pi
                for g in 0..G {
                    ext_theta[g] = 2.0 * PI - self.theta[G - 1 - g];
                    ext_theta[n_mu + G + g] = -self.theta[n_mu - 1 - g];
                }
                ext_theta[G..G + n_mu].copy_from_slice(&self.theta);

                let mut out = vec![0.0; f.len()];
                let mut col = vec![0.0; n_mu + 2 * G];
                for j in 0..n_phi {
                    let j_anti = (j + n_phi / 2) % n_phi;
                    for g in 0..G {
                        col[g] = f[(G - 1 - g) * n_phi + j_anti];
                        col[n_mu + G + g] = f[(n_mu - 1 - g) * n_phi + j_anti];
                    }
                    for i in 0..n_mu {
                        col[G + i] = f[i * n_phi + j];
                    }
                    for i in 0..n_mu {
                        let lo = i; // centered: ext index of node i is i + G
                        let w = fornberg_d1(&ext_theta[lo..lo + width], self.theta[i]);
                        let mut acc = 0.0;
                        for (k, wk) in w.iter().enumerate() {
                            acc += wk * col[lo + k];
                        }
                        out[i * n_phi + j] = acc;
                    }
                }
                out
            }
        }
    }

    fn apply_mu_matrix(&self, m: &[f64], f: &[f64], n_mu: usize, n_phi: usize) -> Vec<f64> {
        let mut out = vec![0.0; f.len()];
        for i in 0..n_mu {
            for j in 0..n_phi {
                let mut acc = 0.0;
                for k in 0..n_mu {
                    acc += m[i * n_mu + k] * f[k * n_phi + j];
                }
                out[i * n_phi + j] = acc;
            }
        }
        out
    }

    /// Restrict a nodal field to the half-resolution grid: decimation along
    /// periodic directions, barycentric interpolation along mu.
    pub fn restrict_to(&self, coarse: &Grid, f: &[f64]) -> Vec<f64> {
        match (self.spec, coarse.spec) {
            (GridSpec::Circle { n_theta }, GridSpec::Circle { n_theta: nc }) => {
                assert_eq!(n_theta, 2 * nc, "coarse circle grid must be half resolution");
                (0..nc).map(|i| f[2 * i]).collect()
            }
            (
                GridSpec::Sphere { n_mu, n_phi },
                GridSpec::Sphere {
                    n_mu: ncm,
                    n_phi: ncp,
                },
            ) => {
                assert_eq!(n_phi, 2 * ncp, "coarse azimuth grid must be half resolution");
                let mut out = vec![0.0; ncm * ncp];
                // decimate phi first, then interpolate each coarse-phi column in mu
                let mut column = vec![0.0; n_mu];
                for jc in 0..ncp {
                    let j = 2 * jc;
                    for i in 0..n_mu {
                        column[i] = f[i * n_phi + j];
                    }
                    for (ic, &mu_c) in coarse.mu.iter().enumerate() {
                        out[ic * ncp + jc] = bary_interpolate(&self.mu, &self.bary_w, &column, mu_c);
                    }
                }
                out
            }
            _ => panic!("grid dimension mismatch in restrict_to"),
        }
    }
}

/// Periodic order-8 first derivative on a uniform grid with spacing h.
fn periodic_d1(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    let mut out = vec![0.0; n];
    for i in 0..n {
        let mut acc = 0.0;
        for (k, w) in D1_W.iter().enumerate() {
            let k = k + 1;
            acc += w * (f[(i + k) % n] - f[(i + n - k % n) % n]);
        }
        out[i] = acc / h;
    }
    out
}

/// Periodic order-8 second derivative on a uniform grid with spacing h.
fn periodic_d2(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    let mut out = vec![0.0; n];
    for i in 0..n {
        let mut acc = D2_C0 * f[i];
        for (k, w) in D2_W.iter().enumerate() {
            let k = k + 1;
            acc += w * (f[(i + k) % n] + f[(i + n - k % n) % n]);
        }
        out[i] = acc / (h * h);
    }
    out
}

/// Stable barycentric weights for Gauss-Legendre nodes:
/// w_i proportional to (-1)^i sqrt((1 - x_i^2) lambda_i).
fn bary_weights_gl(nodes: &[f64], quad_weights: &[f64]) -> Vec<f64> {
    nodes
        .iter()
        .zip(quad_weights)
        .enumerate()
        .map(|(i, (&x, &w))| {
            let s = ((1.0 - x * x) * w).sqrt();
            if i % 2 == 0 {
                s
            } else {
                -s
            }
        })
        .collect()
}

/// Barycentric differentiation matrix: D_ij = (w_j / w_i) / (x_i - x_j),
/// D_ii = -sum_{j != i} D_ij.
fn diff_matrix(x: &[f64], w: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        let mut diag = 0.0;
        for j in 0..n {
            if i != j {
                let v = (w[j] / w[i]) / (x[i] - x[j]);
                d[i * n + j] = v;
                diag -= v;
            }
        }
        d[i * n + i] = diag;
    }
    d
}

fn mat_mul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut c = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                c[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    c
}

/// First-derivative weights at `x0` for arbitrary nodes (Fornberg's
/// algorithm, truncated to derivative order 1).
fn fornberg_d1(nodes: &[f64], x0: f64) -> Vec<f64> {
    let n = nodes.len();
    // c[k][j]: weight of node j for the k-th derivative
    let mut c = vec![[0.0f64; 2]; n];
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                c[i][1] = c1 * (c[i - 1][0] - c5 * c[i - 1][1]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            c[j][1] = (c4 * c[j][1] - c[j][0]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.iter().map(|row| row[1]).collect()
}

/// Barycentric Lagrange interpolation at a single point.
fn bary_interpolate(x: &[f64], w: &[f64], f: &[f64], target: f64) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..x.len() {
        let dx = target - x[i];
        if dx.abs() < 1e-15 {
            return f[i];
        }
        let t = w[i] / dx;
        num += t * f[i];
        den += t;
    }
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn circle_derivatives_of_trig() {
        let g = Grid::new(GridSpec::Circle { n_theta: 128 });
        let f: Vec<f64> = g.theta.iter().map(|t| (3.0 * t).sin()).collect();
        let d1 = g.d_theta(&f);
        let d2 = g.d2_theta(&f);
        for (i, &t) in g.theta.iter().enumerate() {
            assert_abs_diff_eq!(d1[i], 3.0 * (3.0 * t).cos(), epsilon = 1e-8);
            assert_abs_diff_eq!(d2[i], -9.0 * (3.0 * t).sin(), epsilon = 1e-6);
        }
    }

    #[test]
    fn sphere_quadrature_weight_total() {
        let g = Grid::new(GridSpec::Sphere { n_mu: 16, n_phi: 32 });
        let total: f64 = g.sigma_weight.iter().sum();
        assert_abs_diff_eq!(total, 4.0 * PI, epsilon = 1e-12);
    }

    #[test]
    fn sphere_polar_derivatives() {
        let g = Grid::new(GridSpec::Sphere { n_mu: 24, n_phi: 16 });
        // f = cos(2 theta) is a polynomial in mu: 2mu^2 - 1, exact under D
        let n = g.node_count();
        let f: Vec<f64> = (0..n).map(|k| (2.0 * g.node_theta(k)).cos()).collect();
        let d1 = g.d_theta(&f);
        let d2 = g.d2_theta(&f);
        for k in 0..n {
            let t = g.node_theta(k);
            assert_abs_diff_eq!(d1[k], -2.0 * (2.0 * t).sin(), epsilon = 1e-11);
            assert_abs_diff_eq!(d2[k], -4.0 * (2.0 * t).cos(), epsilon = 1e-9);
        }
    }

    #[test]
    fn sphere_azimuth_derivatives() {
        let g = Grid::new(GridSpec::Sphere { n_mu: 8, n_phi: 64 });
        let n = g.node_count();
        let f: Vec<f64> = (0..n).map(|k| (2.0 * g.node_phi(k)).cos()).collect();
        let d1 = g.d_phi(&f);
        let d2 = g.d2_phi(&f);
        for k in 0..n {
            let p = g.node_phi(k);
            assert_abs_diff_eq!(d1[k], -2.0 * (2.0 * p).sin(), epsilon = 1e-8);
            assert_abs_diff_eq!(d2[k], -4.0 * (2.0 * p).cos(), epsilon = 1e-6);
        }
    }

    #[test]
    fn restriction_reproduces_smooth_fields() {
        let fine = Grid::new(GridSpec::Sphere { n_mu: 32, n_phi: 32 });
        let coarse = Grid::new(fine.spec.half());
        let f: Vec<f64> = (0..fine.node_count())
            .map(|k| fine.node_theta(k).cos().powi(3))
            .collect();
        let restricted = fine.restrict_to(&coarse, &f);
        for k in 0..coarse.node_count() {
            let expect = coarse.node_theta(k).cos().powi(3);
            assert_abs_diff_eq!(restricted[k], expect, epsilon = 1e-12);
        }
    }

    #[test]
    fn local_meridian_derivative() {
        let g = Grid::new(GridSpec::Sphere { n_mu: 32, n_phi: 16 });
        let n = g.node_count();
        // sin(theta) cos(phi): smooth in theta along meridians
        let f: Vec<f64> = (0..n)
            .map(|k| g.node_theta(k).sin() * g.node_phi(k).cos())
            .collect();
        let d = g.d_theta_local(&f);
        for k in 0..n {
            let expect = g.node_theta(k).cos() * g.node_phi(k).cos();
            assert_abs_diff_eq!(d[k], expect, epsilon = 1e-6);
        }
    }

    #[test]
    fn spec_validation() {
        assert!(GridSpec::Circle { n_theta: 8 }.validate().is_err());
        assert!(GridSpec::Sphere { n_mu: 4, n_phi: 32 }.validate().is_err());
        assert!(GridSpec::Circle { n_theta: 64 }.validate().is_ok());
    }
}
