//! Integral identities, inequality deficits and rigidity residuals evaluated
//! on a computed surface geometry.
//!
//! Every quantity is evaluated twice, on the full grid and on the
//! half-resolution restriction of the same surface, and the difference is
//! reported as the quadrature error. Strict inequalities use that error as a
//! dead band: a value inside it is `inconclusive`, which is the honest
//! verdict near equality (rigidity) cases.

use serde::{Deserialize, Serialize};

use crate::error::{Result, WarpError};
use crate::geometry::GeometrySample;
use crate::integrals::{integrate_samples, weighted_volume_of, EvaluatedSurface, SurfaceCalculus};
use crate::report::{FunctionalReport, Verdict};
use crate::surface::RadialGraph;
use crate::symfunc::{eval_pm, grad_pm, Spectrum};

/// Default absolute tolerance for identity verdicts; overridable per call.
pub const DEFAULT_ABS_TOL: f64 = 1e-9;

/// Evaluate a composite expression of integrals on the full and on the
/// half-resolution grid; the difference is the quadrature error attached to
/// the result.
fn composite<F>(surface: &EvaluatedSurface, f: F) -> (f64, f64)
where
    F: Fn(&[GeometrySample], &RadialGraph) -> f64,
{
    let fine = f(&surface.geom, &surface.graph);
    let coarse = f(&surface.coarse_geom, &surface.coarse_graph);
    (fine, (fine - coarse).abs())
}

fn shifted_p(s: &GeometrySample, eps: f64, m: usize) -> f64 {
    let shifted: Vec<f64> = s.kappa[..s.n].iter().map(|k| k - eps).collect();
    eval_pm(&Spectrum::new(shifted), m)
}

/// Extra enclosed-volume term present when the inner boundary is a horizon:
/// `lambda(0)^{n+1} |N|`.
fn horizon_term(graph: &RadialGraph) -> f64 {
    let m = &graph.manifold;
    if !m.has_horizon {
        return 0.0;
    }
    let lam0 = m.eval(0.0).map(|w| w.lam).unwrap_or(0.0);
    lam0.powi(m.n as i32 + 1) * m.fiber_volume()
}

/// Residual of the shifted first Minkowski formula
/// `int (lambda' - eps u) dmu = int u (p_1 - eps) dmu`.
pub fn minkowski_residual(surface: &EvaluatedSurface, eps: f64, abs_tol: f64) -> FunctionalReport {
    let (value, err) = composite(surface, |geom, _| {
        integrate_samples(geom, |s| {
            (s.warp.lam1 - eps * s.u) - s.u * (s.p1() - eps)
        })
    });
    FunctionalReport::identity("minkowski_residual", value, err, abs_tol)
        .with_eps(eps)
        .with_manifold(surface.graph.manifold.tag())
}

/// Residual of the shifted higher-order Minkowski formula
/// `int (lambda' - eps u) p_{m-1}(kappa - eps) dmu = int u p_m(kappa - eps) dmu`.
///
/// Valid in space forms only: the proof needs the shifted second fundamental
/// form to be Codazzi, which fails for general warps.
pub fn shifted_minkowski_residual(
    surface: &EvaluatedSurface,
    eps: f64,
    m: usize,
    abs_tol: f64,
) -> Result<FunctionalReport> {
    if !surface.graph.manifold.is_space_form() {
        return Err(WarpError::UnsupportedManifold(
            "higher-order shifted Minkowski formula needs a space form",
        ));
    }
    let n = surface.n();
    if m < 1 || m > n {
        return Err(WarpError::ConfigInvalid(format!(
            "order m = {m} outside 1..={n}"
        )));
    }
    let (value, err) = composite(surface, |geom, _| {
        integrate_samples(geom, |s| {
            (s.warp.lam1 - eps * s.u) * shifted_p(s, eps, m - 1) - s.u * shifted_p(s, eps, m)
        })
    });
    Ok(
        FunctionalReport::identity("shifted_minkowski_residual", value, err, abs_tol)
            .with_eps(eps)
            .with_k(m)
            .with_manifold(surface.graph.manifold.tag()),
    )
}

/// Pointwise admissibility for the shifted Heintze-Karcher inequality:
/// value = min over nodes of `(lambda' - eps u)(p_1 - eps)`.
///
/// The note records the separate factor minima and, for c = -1 with
/// |eps| <= 1, whether the automatic lower bound
/// `lambda' - eps u >= e^{-r}` held.
pub fn hk_assumption_check(surface: &EvaluatedSurface, eps: f64) -> FunctionalReport {
    let mut min_product = f64::INFINITY;
    let mut min_factor1 = f64::INFINITY;
    let mut min_factor2 = f64::INFINITY;
    let mut violations = 0usize;
    let mut max_r = f64::NEG_INFINITY;
    for s in &surface.geom {
        let f1 = s.warp.lam1 - eps * s.u;
        let f2 = s.p1() - eps;
        min_factor1 = min_factor1.min(f1);
        min_factor2 = min_factor2.min(f2);
        min_product = min_product.min(f1 * f2);
        // Sign hypothesis: both factors strictly positive. The product form
        // with both factors negative flips the direction of the inequality
        // chain, so it does not qualify.
        if f1 <= 0.0 || f2 <= 0.0 {
            violations += 1;
        }
        max_r = max_r.max(s.r);
    }
    let mut note = format!(
        "min(lambda'-eps*u)={min_factor1:.6e}, min(p_1-eps)={min_factor2:.6e}, violations={violations}"
    );
    if surface.graph.manifold.curvature() == Some(-1) && eps.abs() <= 1.0 {
        let bound_ok = min_factor1 >= (-max_r).exp() - 1e-10;
        note.push_str(&format!(", exp_lower_bound_ok={bound_ok}"));
    }
    // pointwise minimum, not an integral: no quadrature dead-band
    let verdict = if violations == 0 {
        Verdict::InequalityOk
    } else {
        Verdict::Violated
    };
    FunctionalReport::new("hk_assumption_check", min_product, 0.0, verdict)
        .with_eps(eps)
        .with_manifold(surface.graph.manifold.tag())
        .with_note(note)
}

fn hk_gate(surface: &EvaluatedSurface, eps: f64) -> Result<()> {
    let mut count = 0usize;
    let mut worst = f64::INFINITY;
    for s in &surface.geom {
        let f1 = s.warp.lam1 - eps * s.u;
        let f2 = s.p1() - eps;
        if f1 <= 0.0 || f2 <= 0.0 {
            count += 1;
        }
        worst = worst.min(f1.min(f2));
    }
    if count > 0 {
        return Err(WarpError::AssumptionViolated {
            what: "lambda' - eps u > 0 and p_1 - eps > 0",
            count,
            worst,
        });
    }
    Ok(())
}

/// Deficit of the shifted Heintze-Karcher inequality:
/// `int (lambda' - eps u)/(p_1 - eps) dmu - (n+1) int_Omega lambda' dv`
/// (minus the extra horizon volume term when the manifold has one).
/// Expected >= 0, with equality exactly on umbilic surfaces.
pub fn hk_deficit(surface: &EvaluatedSurface, eps: f64) -> Result<FunctionalReport> {
    hk_gate(surface, eps)?;
    let n1 = (surface.n() + 1) as f64;
    let (value, err) = composite(surface, |geom, graph| {
        let lhs = integrate_samples(geom, |s| (s.warp.lam1 - eps * s.u) / (s.p1() - eps));
        lhs - n1 * weighted_volume_of(graph) - horizon_term(graph)
    });
    Ok(FunctionalReport::strict_inequality("hk_deficit", value, err)
        .with_eps(eps)
        .with_manifold(surface.graph.manifold.tag())
        .with_note(format!(
            "umbilicity_spread={:.3e}",
            surface.umbilicity_spread()
        )))
}

/// Deficit of the second Minkowski inequality:
/// `(int lambda' dmu)^2 - (n+1)[int_Omega lambda' dv + horizon term] int lambda' p_1 dmu`.
/// Expected >= 0 on static-convex surfaces in sub-static manifolds.
pub fn minkowski_second_deficit(surface: &EvaluatedSurface) -> Result<FunctionalReport> {
    let margin = surface.static_convex_margin()?; // also rejects lambda' <= 0
    let n1 = (surface.n() + 1) as f64;
    let (value, err) = composite(surface, |geom, graph| {
        let a = integrate_samples(geom, |s| s.warp.lam1);
        let b = integrate_samples(geom, |s| s.warp.lam1 * s.p1());
        a * a - n1 * (weighted_volume_of(graph) + horizon_term(graph) / n1) * b
    });
    Ok(
        FunctionalReport::strict_inequality("minkowski_second_deficit", value, err)
            .with_manifold(surface.graph.manifold.tag())
            .with_note(format!("static_convex_margin={margin:.6e}")),
    )
}

/// Deficit of the equivalent quadratic inequality
/// `(int (lambda'-eps u) dmu)^2 >= int u dmu * int (lambda'-eps u) p_1(kappa-eps) dmu`.
///
/// After expanding both sides in eps and using the first Minkowski formula
/// and the divergence identity, this equals `minkowski_second_deficit` as a
/// number; the agreement is checked by the test suite, not here.
pub fn equiv_ineq_residual(surface: &EvaluatedSurface, eps: f64) -> Result<FunctionalReport> {
    surface.static_convex_margin()?; // lambda' > 0 gate
    let (value, err) = composite(surface, |geom, _| {
        let a = integrate_samples(geom, |s| s.warp.lam1 - eps * s.u);
        let int_u = integrate_samples(geom, |s| s.u);
        let b = integrate_samples(geom, |s| (s.warp.lam1 - eps * s.u) * (s.p1() - eps));
        a * a - int_u * b
    });
    Ok(
        FunctionalReport::strict_inequality("equiv_ineq_residual", value, err)
            .with_eps(eps)
            .with_manifold(surface.graph.manifold.tag()),
    )
}

/// Deficit of the Cauchy-Schwarz chain
/// `int (lambda'-eps u) p_1(kappa-eps) dmu * int (lambda'-eps u)/(p_1-eps) dmu
///  - (int (lambda'-eps u) dmu)^2 >= 0`, equality iff p_1 is constant.
pub fn cauchy_schwarz_gap(surface: &EvaluatedSurface, eps: f64) -> Result<FunctionalReport> {
    hk_gate(surface, eps)?;
    let (value, err) = composite(surface, |geom, _| {
        let a = integrate_samples(geom, |s| s.warp.lam1 - eps * s.u);
        let b = integrate_samples(geom, |s| (s.warp.lam1 - eps * s.u) * (s.p1() - eps));
        let c = integrate_samples(geom, |s| (s.warp.lam1 - eps * s.u) / (s.p1() - eps));
        b * c - a * a
    });
    Ok(
        FunctionalReport::strict_inequality("cauchy_schwarz_gap", value, err)
            .with_eps(eps)
            .with_manifold(surface.graph.manifold.tag()),
    )
}

/// Named families of admissible right-hand sides chi(a, b) for the shifted
/// curvature equation. Admissibility means d chi/d a <= 0 and
/// d chi/d b >= 0 on the realized argument range.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ChiSpec {
    Constant { value: f64 },
    /// chi(a, b) = offset + slope * b
    Affine { offset: f64, slope: f64 },
    /// chi(a, b) = coeff * a^p * b^q
    Power { coeff: f64, p: f64, q: f64 },
}

impl ChiSpec {
    pub fn eval(&self, a: f64, b: f64) -> f64 {
        match *self {
            ChiSpec::Constant { value } => value,
            ChiSpec::Affine { offset, slope } => offset + slope * b,
            ChiSpec::Power { coeff, p, q } => coeff * a.powf(p) * b.powf(q),
        }
    }

    /// Monotonicity check on positive arguments (the rigidity statements
    /// need chi non-increasing in a and non-decreasing in b).
    pub fn monotone_ok(&self) -> bool {
        match *self {
            ChiSpec::Constant { .. } => true,
            ChiSpec::Affine { slope, .. } => slope >= 0.0,
            ChiSpec::Power { coeff, p, q } => coeff >= 0.0 && p <= 0.0 && q >= 0.0,
        }
    }

    /// Whether chi genuinely decreases in its first argument (the case where
    /// rigidity forces a centered sphere).
    pub fn strictly_decreasing_in_first(&self) -> bool {
        matches!(*self, ChiSpec::Power { coeff, p, .. } if coeff > 0.0 && p < 0.0)
    }
}

/// Which arguments the curvature equation feeds to chi.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum CurvatureArgs {
    /// (lambda', -lambda' - u); tied to eps = -1 in c = -1.
    Potential,
    /// (Phi, eps Phi - u) with Phi the primitive of lambda.
    Primitive,
}

/// Max-norm residual of the prescribed shifted curvature equation
/// `p_k(kappa - eps) = chi(args)`; zero exactly on the sphere solutions.
pub fn curvature_equation_residual(
    surface: &EvaluatedSurface,
    eps: f64,
    k: usize,
    chi: &ChiSpec,
    variant: CurvatureArgs,
    abs_tol: f64,
) -> Result<FunctionalReport> {
    let manifold = &surface.graph.manifold;
    if !manifold.is_space_form() {
        return Err(WarpError::UnsupportedManifold(
            "prescribed shifted curvature equations are posed in space forms",
        ));
    }
    if variant == CurvatureArgs::Potential && (manifold.curvature() != Some(-1) || eps != -1.0) {
        return Err(WarpError::ConfigInvalid(
            "potential-argument variant requires c = -1 and eps = -1".into(),
        ));
    }
    let n = surface.n();
    if k < 1 || k > n {
        return Err(WarpError::ConfigInvalid(format!(
            "order k = {k} outside 1..={n}"
        )));
    }
    let value = surface
        .geom
        .iter()
        .map(|s| {
            let (a, b) = match variant {
                CurvatureArgs::Potential => (s.warp.lam1, -s.warp.lam1 - s.u),
                CurvatureArgs::Primitive => (s.warp.phi, eps * s.warp.phi - s.u),
            };
            (shifted_p(s, eps, k) - chi.eval(a, b)).abs()
        })
        .fold(0.0f64, f64::max);
    // pointwise max-norm: discretization error enters through the curvature
    // samples, not a quadrature rule
    Ok(
        FunctionalReport::identity("curvature_equation_residual", value, 0.0, abs_tol)
            .with_eps(eps)
            .with_k(k)
            .with_manifold(manifold.tag())
            .with_note(format!("monotone_ok={}", chi.monotone_ok())),
    )
}

/// Contract the shifted curvature-derivative tensor with the covariant
/// Hessian of Phi at one node: `dp_k^{ij} (Hess Phi)_{ij}`, the tensor
/// assembled in the principal frame and rotated back with the g-orthonormal
/// eigenvectors of the shape operator.
fn pdot_contract_hessian(s: &GeometrySample, eps: f64, k: usize, hess: &[[f64; 2]; 2]) -> f64 {
    let n = s.n;
    let shifted = Spectrum::new(s.kappa[..n].iter().map(|x| x - eps).collect());
    let dp = grad_pm(&shifted, k);
    let mut acc = 0.0;
    for alpha in 0..n {
        let w = [s.eigvec[0][alpha], s.eigvec[1][alpha]];
        for i in 0..n {
            for j in 0..n {
                acc += dp[alpha] * w[i] * w[j] * hess[i][j];
            }
        }
    }
    acc
}

/// Residual of the integration-by-parts identity
/// `k int [(lambda'-eps u) p_{k-1}(kappa-eps) - u p_k(kappa-eps)] dmu
///  = int dp_k^{ij} (Hess Phi)_{ij} dmu`,
/// which simultaneously exercises the divergence-free property of
/// dp_k^{ij} (space forms only) and the Hessian identity for Phi.
pub fn integration_by_parts_residual(
    surface: &EvaluatedSurface,
    eps: f64,
    k: usize,
    abs_tol: f64,
) -> Result<FunctionalReport> {
    if !surface.graph.manifold.is_space_form() {
        return Err(WarpError::UnsupportedManifold(
            "dp_k is divergence-free only in space forms",
        ));
    }
    let n = surface.n();
    if k < 1 || k > n {
        return Err(WarpError::ConfigInvalid(format!(
            "order k = {k} outside 1..={n}"
        )));
    }
    let (value, err) = composite(surface, |geom, graph| {
        let lhs = k as f64
            * integrate_samples(geom, |s| {
                (s.warp.lam1 - eps * s.u) * shifted_p(s, eps, k - 1) - s.u * shifted_p(s, eps, k)
            });
        let calc = SurfaceCalculus::new(graph, geom);
        let phi: Vec<f64> = geom.iter().map(|s| s.warp.phi).collect();
        let hess = calc.hessian(&phi);
        let rhs = integrate_samples(geom, |s| pdot_contract_hessian(s, eps, k, &hess[s.node]));
        lhs - rhs
    });
    Ok(
        FunctionalReport::identity("integration_by_parts_residual", value, err, abs_tol)
            .with_eps(eps)
            .with_k(k)
            .with_manifold(surface.graph.manifold.tag()),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use crate::report::Verdict;
    use crate::surface::RadialGraph;
    use crate::warped::WarpedProduct;
    use approx::assert_abs_diff_eq;
    use std::sync::Arc;

    fn hyperbolic(n: usize) -> Arc<WarpedProduct> {
        Arc::new(WarpedProduct::space_form(-1, n).unwrap())
    }

    fn grid_for(n: usize) -> GridSpec {
        if n == 1 {
            GridSpec::Circle { n_theta: 512 }
        } else {
            GridSpec::Sphere { n_mu: 32, n_phi: 64 }
        }
    }

    fn sphere_surface(n: usize, radius: f64, offset: f64) -> EvaluatedSurface {
        EvaluatedSurface::new(
            RadialGraph::sphere(hyperbolic(n), radius, offset, grid_for(n)).unwrap(),
        )
        .unwrap()
    }

    fn perturbed_surface(n: usize, base: f64, amp: f64) -> EvaluatedSurface {
        EvaluatedSurface::new(
            RadialGraph::perturbed(hyperbolic(n), base, &[(2, amp)], grid_for(n)).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn minkowski_on_spheres_and_perturbed() {
        for n in [1usize, 2] {
            for &eps in &[-1.0, 0.0, 0.5, 1.0] {
                let s = sphere_surface(n, 1.0, 0.0);
                let r = minkowski_residual(&s, eps, 1e-9);
                assert_eq!(r.verdict, Verdict::IdentityOk, "sphere n={n} eps={eps}: {r:?}");
                assert!(r.value.abs() < 1e-9);
            }
            let s = perturbed_surface(n, 1.2, 0.1);
            let r = minkowski_residual(&s, -1.0, 1e-7);
            assert_eq!(r.verdict, Verdict::IdentityOk, "perturbed n={n}: {r:?}");
        }
    }

    #[test]
    fn shifted_minkowski_m2() {
        // centered sphere closed form check, n = 2, m = 2, eps = 1
        let s = sphere_surface(2, 1.0, 0.0);
        let r = shifted_minkowski_residual(&s, 1.0, 2, 1e-9).unwrap();
        assert_eq!(r.verdict, Verdict::IdentityOk, "{r:?}");

        for &eps in &[-1.0, 0.0, 1.0] {
            let s = perturbed_surface(2, 1.2, 0.1);
            let r = shifted_minkowski_residual(&s, eps, 2, 1e-6).unwrap();
            assert_eq!(r.verdict, Verdict::IdentityOk, "eps={eps}: {r:?}");
        }

        // m = 1 reproduces the first formula
        let s = perturbed_surface(1, 1.2, 0.1);
        let a = shifted_minkowski_residual(&s, 0.5, 1, 1e-9).unwrap();
        let b = minkowski_residual(&s, 0.5, 1e-9);
        assert_abs_diff_eq!(a.value, b.value, epsilon = 1e-14);
    }

    #[test]
    fn shifted_minkowski_rejects_custom_warp() {
        let m = Arc::new(WarpedProduct::horizon_example(2));
        let g = RadialGraph::perturbed(m, 1.0, &[], GridSpec::Sphere { n_mu: 16, n_phi: 32 })
            .unwrap();
        let s = EvaluatedSurface::new(g).unwrap();
        assert!(matches!(
            shifted_minkowski_residual(&s, 0.0, 2, 1e-9),
            Err(WarpError::UnsupportedManifold(_))
        ));
    }

    #[test]
    fn hk_deficit_zero_on_spheres() {
        for offset in [0.0, 0.4] {
            let s = sphere_surface(2, 1.0, offset);
            let r = hk_deficit(&s, -1.0).unwrap();
            assert!(
                r.value.abs() <= r.quadrature_error.max(1e-8),
                "offset {offset}: {r:?}"
            );
        }
    }

    #[test]
    fn hk_deficit_positive_on_perturbed() {
        let s = perturbed_surface(2, 1.2, 0.15);
        let r = hk_deficit(&s, -1.0).unwrap();
        assert_eq!(r.verdict, Verdict::InequalityOk, "{r:?}");
        assert!(r.value > 10.0 * r.quadrature_error, "{r:?}");
    }

    #[test]
    fn hk_deficit_zero_on_horizon_slice() {
        let m = Arc::new(WarpedProduct::horizon_example(2));
        let g = RadialGraph::perturbed(m, 1.0, &[], GridSpec::Sphere { n_mu: 16, n_phi: 32 })
            .unwrap();
        let s = EvaluatedSurface::new(g).unwrap();
        let r = hk_deficit(&s, 0.5).unwrap();
        assert!(r.value.abs() < 1e-7, "{r:?}");
    }

    #[test]
    fn hk_brendle_matches_explicit_form() {
        let s = perturbed_surface(1, 1.3, 0.1);
        let r = hk_deficit(&s, 0.0).unwrap();
        let (lhs, _) = s.integrate(|g| g.warp.lam1 / g.p1());
        let (wv, _) = s.weighted_volume();
        assert_abs_diff_eq!(r.value, lhs - 2.0 * wv, epsilon = 1e-12);
    }

    #[test]
    fn hk_assumption_gate() {
        // strongly perturbed circle in H^2 with eps = 2: both shifted
        // factors change sign across the surface, at different places
        let s = perturbed_surface(1, 0.7, 0.25);
        let check = hk_assumption_check(&s, 2.0);
        assert!(check.value < 0.0, "{check:?}");
        assert!(matches!(
            hk_deficit(&s, 2.0),
            Err(WarpError::AssumptionViolated { .. })
        ));

        // the automatic c = -1 bound for |eps| <= 1
        let s = sphere_surface(2, 2.0, 1.0);
        let check = hk_assumption_check(&s, -1.0);
        assert!(check.value > 0.0);
        assert!(check.note.unwrap().contains("exp_lower_bound_ok=true"));
    }

    #[test]
    fn second_deficit_and_equivalence() {
        // umbilic equality case
        let s = sphere_surface(2, 1.0, 0.0);
        let r = minkowski_second_deficit(&s).unwrap();
        assert!(r.value.abs() <= r.quadrature_error.max(1e-6), "{r:?}");

        // strict case, and agreement with the quadratic form of the
        // inequality for several shifts
        let s = perturbed_surface(2, 1.2, 0.15);
        let second = minkowski_second_deficit(&s).unwrap();
        assert!(second.value > 0.0, "{second:?}");
        for &eps in &[0.0, 0.5, -1.0] {
            let equiv = equiv_ineq_residual(&s, eps).unwrap();
            assert!(
                (equiv.value - second.value).abs() < 1e-9 * second.value.abs().max(1.0) + 1e-9,
                "eps={eps}: equiv {} vs second {}",
                equiv.value,
                second.value
            );
        }
    }

    #[test]
    fn cauchy_schwarz_chain() {
        let s = sphere_surface(2, 1.0, 0.0);
        let r = cauchy_schwarz_gap(&s, 0.5).unwrap();
        // equality case: tiny value, never flagged as violated
        assert!(r.verdict != Verdict::Violated, "{r:?}");
        assert!(r.value.abs() < 1e-9, "{r:?}");

        let s = perturbed_surface(2, 1.2, 0.15);
        let r = cauchy_schwarz_gap(&s, 0.5).unwrap();
        assert_eq!(r.verdict, Verdict::InequalityOk, "{r:?}");
    }

    #[test]
    fn curvature_equation_on_spheres() {
        // centered sphere radius rho0 in H^3, k = 2, eps = -1:
        // p_2(kappa + 1) = (coth rho0 + 1)^2 exactly
        let rho0 = 1.0f64;
        let s = sphere_surface(2, rho0, 0.0);
        let chi = ChiSpec::Constant {
            value: (1.0 / rho0.tanh() + 1.0).powi(2),
        };
        let r =
            curvature_equation_residual(&s, -1.0, 2, &chi, CurvatureArgs::Potential, 1e-7).unwrap();
        assert_eq!(r.verdict, Verdict::IdentityOk, "{r:?}");

        // chi(a, b) = b with the primitive arguments, eps = 1, k = 1:
        // residual zero iff coth rho0 - 1 = cosh rho0 - sinh rho0, i.e.
        // e^{-rho0}/sinh rho0 = e^{-rho0}, i.e. sinh rho0 = 1
        let rho0 = 1.0f64.asinh();
        let s = EvaluatedSurface::new(
            RadialGraph::sphere(hyperbolic(2), rho0, 0.0, grid_for(2)).unwrap(),
        )
        .unwrap();
        let chi = ChiSpec::Affine { offset: 0.0, slope: 1.0 };
        let r =
            curvature_equation_residual(&s, 1.0, 1, &chi, CurvatureArgs::Primitive, 1e-7).unwrap();
        assert_eq!(r.verdict, Verdict::IdentityOk, "{r:?}");
    }

    #[test]
    fn curvature_equation_rejects_off_center_for_decreasing_chi() {
        // a chi that depends on Phi(r) cannot be solved by an off-center
        // sphere: Phi varies over the surface while p_k(kappa - eps) does not
        let rho0 = 1.0f64;
        let centered = sphere_surface(2, rho0, 0.0);
        let phi0 = rho0.cosh();
        let kap = 1.0 / rho0.tanh();
        // calibrated so the centered sphere of radius rho0 is an exact root
        let chi = ChiSpec::Power {
            coeff: (kap - 0.5) * phi0,
            p: -1.0,
            q: 0.0,
        };
        assert!(chi.strictly_decreasing_in_first());
        let r = curvature_equation_residual(&centered, 0.5, 1, &chi, CurvatureArgs::Primitive, 1e-7)
            .unwrap();
        assert_eq!(r.verdict, Verdict::IdentityOk, "{r:?}");

        let off = sphere_surface(2, rho0, 0.3);
        let r = curvature_equation_residual(&off, 0.5, 1, &chi, CurvatureArgs::Primitive, 1e-7)
            .unwrap();
        assert_eq!(r.verdict, Verdict::Violated, "{r:?}");
        assert!(r.value > 1e-2, "{r:?}");
    }

    #[test]
    fn chi_scaling_linearity() {
        let s = perturbed_surface(2, 1.2, 0.1);
        let chi = ChiSpec::Constant { value: 0.7 };
        let r1 = curvature_equation_residual(&s, 0.0, 2, &chi, CurvatureArgs::Primitive, 1e-7)
            .unwrap();
        // residual of p_k - chi is not linear in chi in general; linearity
        // holds when chi dominates (p_k - c*chi < 0 everywhere)
        let chi_big = ChiSpec::Constant { value: 70.0 };
        let r2 = curvature_equation_residual(&s, 0.0, 2, &chi_big, CurvatureArgs::Primitive, 1e-7)
            .unwrap();
        assert!(r2.value > r1.value);
    }

    #[test]
    fn integration_by_parts() {
        // k = 1 reduces to the first Minkowski residual
        let s = perturbed_surface(1, 1.2, 0.1);
        let a = integration_by_parts_residual(&s, 0.5, 1, 1e-6).unwrap();
        assert_eq!(a.verdict, Verdict::IdentityOk, "{a:?}");

        // centered sphere, k = 2, eps = 0
        let s = sphere_surface(2, 1.0, 0.0);
        let r = integration_by_parts_residual(&s, 0.0, 2, 1e-7).unwrap();
        assert_eq!(r.verdict, Verdict::IdentityOk, "{r:?}");

        // perturbed graph in H^3, k = 2, eps = 1
        let s = perturbed_surface(2, 1.2, 0.1);
        let r = integration_by_parts_residual(&s, 1.0, 2, 1e-5).unwrap();
        assert_eq!(r.verdict, Verdict::IdentityOk, "{r:?}");
    }
}
