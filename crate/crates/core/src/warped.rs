//! Ambient warped product manifolds `[0, r_max) x S^n` with metric
//! `dr^2 + lambda(r)^2 g_{S^n}`: warp functions, the primitive `Phi`,
//! condition (H) for horizon manifolds, and the pointwise sub-static
//! criterion for constant-Ricci fibers.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Result, WarpError};
use crate::quadrature::integrate_adaptive;
use crate::report::{FunctionalReport, Verdict};

/// Scan window used when the r-domain is unbounded.
const R_SCAN: f64 = 10.0;

/// Space-form tag or custom warp.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ManifoldKind {
    /// c = -1: hyperbolic space, lambda = sinh r.
    Hyperbolic,
    /// c = 0: Euclidean space, lambda = r.
    Euclidean,
    /// c = +1: hemisphere, lambda = sin r on [0, pi/2).
    Hemisphere,
    Custom,
}

impl ManifoldKind {
    pub fn space_form_curvature(self) -> Option<i32> {
        match self {
            ManifoldKind::Hyperbolic => Some(-1),
            ManifoldKind::Euclidean => Some(0),
            ManifoldKind::Hemisphere => Some(1),
            ManifoldKind::Custom => None,
        }
    }
}

/// Closed-form warp function with three derivatives.
#[derive(Clone)]
pub struct CustomWarp {
    pub lam: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub lam1: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub lam2: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub lam3: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub name: String,
}

impl std::fmt::Debug for CustomWarp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "CustomWarp({})", self.name)
    }
}

/// The ambient space.
#[derive(Debug, Clone)]
pub struct WarpedProduct {
    /// Fiber dimension (1 or 2); the ambient manifold has dimension n + 1.
    pub n: usize,
    pub kind: ManifoldKind,
    pub r_max: f64,
    /// Constant rho of the sub-static criterion.
    pub rho_const: f64,
    /// Ric_N = const * g_N; equals n - 1 for the unit round fiber.
    pub fiber_ricci_const: f64,
    pub has_horizon: bool,
    custom: Option<CustomWarp>,
}

/// Warp data at a single radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WarpSample {
    pub r: f64,
    pub lam: f64,
    pub lam1: f64,
    pub lam2: f64,
    pub lam3: f64,
    /// Primitive of lambda: cosh r / r^2/2 / -cos r for space forms,
    /// numerically integrated with Phi(0) = 0 for custom warps.
    pub phi: f64,
}

impl WarpedProduct {
    /// Space form N^{n+1}(c) as a warped product over the unit round S^n.
    pub fn space_form(c: i32, n: usize) -> Result<Self> {
        assert!(n == 1 || n == 2, "fiber dimension must be 1 or 2");
        let kind = match c {
            -1 => ManifoldKind::Hyperbolic,
            0 => ManifoldKind::Euclidean,
            1 => ManifoldKind::Hemisphere,
            other => return Err(WarpError::BadCurvature(other)),
        };
        Ok(Self {
            n,
            kind,
            r_max: if c == 1 { PI / 2.0 } else { f64::INFINITY },
            rho_const: 1.0,
            fiber_ricci_const: (n - 1) as f64,
            has_horizon: false,
            custom: None,
        })
    }

    /// The horizon example: lambda = cosh r on [0, inf), which satisfies
    /// condition (H) and is sub-static with rho = 1.
    pub fn horizon_example(n: usize) -> Self {
        assert!(n == 1 || n == 2, "fiber dimension must be 1 or 2");
        Self {
            n,
            kind: ManifoldKind::Custom,
            r_max: f64::INFINITY,
            rho_const: 1.0,
            fiber_ricci_const: (n - 1) as f64,
            has_horizon: true,
            custom: Some(CustomWarp {
                lam: Arc::new(f64::cosh),
                lam1: Arc::new(f64::sinh),
                lam2: Arc::new(f64::cosh),
                lam3: Arc::new(f64::sinh),
                name: "cosh".into(),
            }),
        }
    }

    /// Custom warp from closed-form callables.
    pub fn custom(n: usize, warp: CustomWarp, r_max: f64, rho_const: f64, has_horizon: bool) -> Self {
        assert!(n == 1 || n == 2, "fiber dimension must be 1 or 2");
        Self {
            n,
            kind: ManifoldKind::Custom,
            r_max,
            rho_const,
            fiber_ricci_const: (n - 1) as f64,
            has_horizon,
            custom: Some(warp),
        }
    }

    /// Space-form curvature constant, if this is a space form.
    pub fn curvature(&self) -> Option<i32> {
        self.kind.space_form_curvature()
    }

    pub fn is_space_form(&self) -> bool {
        self.curvature().is_some()
    }

    /// Volume of the unit round fiber S^n.
    pub fn fiber_volume(&self) -> f64 {
        match self.n {
            1 => 2.0 * PI,
            2 => 4.0 * PI,
            _ => unreachable!(),
        }
    }

    pub fn contains_r(&self, r: f64) -> bool {
        r >= 0.0 && r < self.r_max
    }

    /// Warp function and derivatives at `r`.
    pub fn eval(&self, r: f64) -> Result<WarpSample> {
        if !self.contains_r(r) {
            return Err(WarpError::OutOfDomain {
                r,
                r_max: self.r_max,
            });
        }
        Ok(match self.kind {
            ManifoldKind::Hyperbolic => WarpSample {
                r,
                lam: r.sinh(),
                lam1: r.cosh(),
                lam2: r.sinh(),
                lam3: r.cosh(),
                phi: r.cosh(),
            },
            ManifoldKind::Euclidean => WarpSample {
                r,
                lam: r,
                lam1: 1.0,
                lam2: 0.0,
                lam3: 0.0,
                phi: 0.5 * r * r,
            },
            ManifoldKind::Hemisphere => WarpSample {
                r,
                lam: r.sin(),
                lam1: r.cos(),
                lam2: -r.sin(),
                lam3: -r.cos(),
                phi: -r.cos(),
            },
            ManifoldKind::Custom => {
                let w = self.custom.as_ref().expect("custom manifold without warp");
                WarpSample {
                    r,
                    lam: (w.lam)(r),
                    lam1: (w.lam1)(r),
                    lam2: (w.lam2)(r),
                    lam3: (w.lam3)(r),
                    phi: integrate_adaptive(&|s| (w.lam)(s), 0.0, r, 1e-12),
                }
            }
        })
    }

    /// Condition (H): lambda'(0) = 0, lambda''(0) > 0, and lambda' > 0 on the
    /// open domain (the last clause sampled on a 10^4-point grid).
    pub fn check_condition_h(&self) -> bool {
        let at0 = match self.eval(0.0) {
            Ok(w) => w,
            Err(_) => return false,
        };
        if at0.lam1.abs() > 1e-12 || at0.lam2 <= 0.0 {
            return false;
        }
        let hi = self.r_max.min(R_SCAN);
        let samples = 10_000;
        (1..samples).all(|i| {
            let r = hi * i as f64 / samples as f64;
            self.eval(r).map(|w| w.lam1 > 0.0).unwrap_or(false)
        })
    }

    /// Scalar coefficient of `g_N` in the sub-static criterion for a
    /// constant-Ricci fiber:
    ///
    /// `lambda' (ric_N - (n-1) rho) + lambda^2 lambda''' + (n-2) lambda lambda' lambda''
    ///  + (n-1) lambda' (rho - lambda'^2)`.
    ///
    /// Nonnegativity over the domain certifies the manifold sub-static with
    /// potential lambda'. For n = 1 the Ricci term is vacuous
    /// (fiber_ricci_const = 0), so only the bracket survives.
    pub fn substatic_scalar(&self, r: f64) -> Result<f64> {
        let w = self.eval(r)?;
        let n = self.n as f64;
        let rho = self.rho_const;
        Ok(w.lam1 * (self.fiber_ricci_const - (n - 1.0) * rho)
            + w.lam * w.lam * w.lam3
            + (n - 2.0) * w.lam * w.lam1 * w.lam2
            + (n - 1.0) * w.lam1 * (rho - w.lam1 * w.lam1))
    }

    /// Minimum of [`Self::substatic_scalar`] over a uniform grid on
    /// `[r_lo, r_hi]`; the manifold is certified sub-static on the window iff
    /// the minimum is >= -1e-10.
    pub fn substatic_scan(&self, r_lo: f64, r_hi: f64, samples: usize) -> Result<FunctionalReport> {
        assert!(samples >= 2, "substatic_scan needs at least 2 samples");
        if !(self.contains_r(r_lo) && self.contains_r(r_hi) && r_lo <= r_hi) {
            return Err(WarpError::OutOfDomain {
                r: r_hi,
                r_max: self.r_max,
            });
        }
        let mut min = f64::INFINITY;
        let mut argmin = r_lo;
        for i in 0..samples {
            let r = r_lo + (r_hi - r_lo) * i as f64 / (samples - 1) as f64;
            let s = self.substatic_scalar(r)?;
            if s < min {
                min = s;
                argmin = r;
            }
        }
        let verdict = if min >= -1e-10 {
            Verdict::InequalityOk
        } else {
            Verdict::Violated
        };
        let mut rep = FunctionalReport::new("substatic_scan", min, 0.0, verdict);
        rep.inputs.manifold = Some(self.tag());
        rep.note = Some(format!(
            "min of sub-static scalar over [{r_lo}, {r_hi}] attained near r = {argmin:.6}{}",
            if self.n == 1 { "; n = 1: Ricci term vacuous, bracket only" } else { "" }
        ));
        Ok(rep)
    }

    /// Short human-readable tag for reports.
    pub fn tag(&self) -> String {
        match self.kind {
            ManifoldKind::Hyperbolic => format!("H^{}", self.n + 1),
            ManifoldKind::Euclidean => format!("R^{}", self.n + 1),
            ManifoldKind::Hemisphere => format!("S^{}_+", self.n + 1),
            ManifoldKind::Custom => {
                let name = self
                    .custom
                    .as_ref()
                    .map(|w| w.name.as_str())
                    .unwrap_or("custom");
                format!("custom({name}, n={})", self.n)
            }
        }
    }
}

/// Named built-in custom warps accepted by the JSON manifold descriptor.
pub fn named_warp(name: &str) -> Result<CustomWarp> {
    let w = match name {
        "cosh" => CustomWarp {
            lam: Arc::new(f64::cosh),
            lam1: Arc::new(f64::sinh),
            lam2: Arc::new(f64::cosh),
            lam3: Arc::new(f64::sinh),
            name: "cosh".into(),
        },
        "sinh" => CustomWarp {
            lam: Arc::new(f64::sinh),
            lam1: Arc::new(f64::cosh),
            lam2: Arc::new(f64::sinh),
            lam3: Arc::new(f64::cosh),
            name: "sinh".into(),
        },
        "linear" => CustomWarp {
            lam: Arc::new(|r| r),
            lam1: Arc::new(|_| 1.0),
            lam2: Arc::new(|_| 0.0),
            lam3: Arc::new(|_| 0.0),
            name: "linear".into(),
        },
        "sin" => CustomWarp {
            lam: Arc::new(f64::sin),
            lam1: Arc::new(f64::cos),
            lam2: Arc::new(|r: f64| -r.sin()),
            lam3: Arc::new(|r: f64| -r.cos()),
            name: "sin".into(),
        },
        other => {
            return Err(WarpError::ConfigInvalid(format!(
                "unknown named warp '{other}' (expected cosh|sinh|linear|sin)"
            )))
        }
    };
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn space_form_construction() {
        let h = WarpedProduct::space_form(-1, 2).unwrap();
        let w = h.eval(1.0).unwrap();
        assert_abs_diff_eq!(w.lam, 1.0f64.sinh(), epsilon = 1e-15);
        assert_abs_diff_eq!(w.lam1, 1.0f64.cosh(), epsilon = 1e-15);
        assert_eq!(h.rho_const, 1.0);
        assert_eq!(h.fiber_ricci_const, 1.0);

        let e = WarpedProduct::space_form(0, 1).unwrap();
        let w = e.eval(2.5).unwrap();
        assert_eq!(w.lam, 2.5);
        assert_eq!(w.lam2, 0.0);

        let s = WarpedProduct::space_form(1, 2).unwrap();
        assert_abs_diff_eq!(s.r_max, PI / 2.0, epsilon = 1e-15);
        assert!(matches!(
            WarpedProduct::space_form(2, 2),
            Err(WarpError::BadCurvature(2))
        ));
    }

    #[test]
    fn space_form_ode() {
        // lambda'' + c lambda = 0 at random radii
        for (c, m) in [
            (-1.0, WarpedProduct::space_form(-1, 2).unwrap()),
            (0.0, WarpedProduct::space_form(0, 2).unwrap()),
            (1.0, WarpedProduct::space_form(1, 2).unwrap()),
        ] {
            let mut state = 0x9e3779b97f4a7c15u64;
            for _ in 0..1000 {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
                let frac = (state >> 11) as f64 / (1u64 << 53) as f64;
                let r = frac * m.r_max.min(3.0);
                let w = m.eval(r).unwrap();
                assert!((w.lam2 + c * w.lam).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn warp_taylor_values() {
        let h = WarpedProduct::space_form(-1, 2).unwrap();
        let w = h.eval(0.0).unwrap();
        assert_eq!((w.lam, w.lam1, w.lam2, w.lam3, w.phi), (0.0, 1.0, 0.0, 1.0, 1.0));
        let s = WarpedProduct::space_form(1, 1).unwrap();
        let w = s.eval(PI / 4.0).unwrap();
        assert_abs_diff_eq!(w.lam, 2f64.sqrt() / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(w.lam1, 2f64.sqrt() / 2.0, epsilon = 1e-15);
    }

    #[test]
    fn out_of_domain() {
        let s = WarpedProduct::space_form(1, 2).unwrap();
        assert!(matches!(s.eval(2.0), Err(WarpError::OutOfDomain { .. })));
        assert!(matches!(s.eval(-0.1), Err(WarpError::OutOfDomain { .. })));
    }

    #[test]
    fn custom_primitive_matches_closed_form() {
        let m = WarpedProduct::horizon_example(2);
        let w = m.eval(1.0).unwrap();
        assert_abs_diff_eq!(w.lam, 1.0f64.cosh(), epsilon = 1e-15);
        assert_abs_diff_eq!(w.phi, 1.0f64.sinh(), epsilon = 1e-10);
    }

    #[test]
    fn primitive_consistency_central_difference() {
        let m = WarpedProduct::horizon_example(1);
        let h = 1e-5;
        for &r in &[0.3, 1.0, 2.0] {
            let d = (m.eval(r + h).unwrap().phi - m.eval(r - h).unwrap().phi) / (2.0 * h);
            assert_abs_diff_eq!(d, m.eval(r).unwrap().lam, epsilon = 1e-8);
        }
    }

    #[test]
    fn custom_derivative_consistency() {
        let m = WarpedProduct::horizon_example(2);
        let h = 1e-5;
        for &r in &[0.5, 1.5] {
            let w = m.eval(r).unwrap();
            let d1 = (m.eval(r + h).unwrap().lam - m.eval(r - h).unwrap().lam) / (2.0 * h);
            let d2 = (m.eval(r + h).unwrap().lam1 - m.eval(r - h).unwrap().lam1) / (2.0 * h);
            let d3 = (m.eval(r + h).unwrap().lam2 - m.eval(r - h).unwrap().lam2) / (2.0 * h);
            assert_abs_diff_eq!(d1, w.lam1, epsilon = 1e-6);
            assert_abs_diff_eq!(d2, w.lam2, epsilon = 1e-6);
            assert_abs_diff_eq!(d3, w.lam3, epsilon = 1e-6);
        }
    }

    #[test]
    fn condition_h() {
        assert!(WarpedProduct::horizon_example(2).check_condition_h());
        assert!(!WarpedProduct::space_form(-1, 2).unwrap().check_condition_h());
        assert!(!WarpedProduct::space_form(1, 2).unwrap().check_condition_h());
    }

    #[test]
    fn substatic_scalar_vanishes_on_space_forms() {
        for c in [-1, 0, 1] {
            for n in [1, 2] {
                let m = WarpedProduct::space_form(c, n).unwrap();
                let hi = m.r_max.min(3.0) - if c == 1 { 0.01 } else { 0.0 };
                for i in 0..=100 {
                    let r = hi * i as f64 / 100.0;
                    assert!(
                        m.substatic_scalar(r).unwrap().abs() < 1e-10,
                        "space form c={c}, n={n} not static at r={r}"
                    );
                }
            }
        }
    }

    #[test]
    fn substatic_scalar_cosh() {
        for n in [1usize, 2] {
            let m = WarpedProduct::horizon_example(n);
            for &r in &[0.0f64, 0.5, 1.0, 2.5] {
                let expect = 2.0 * (n as f64 - 1.0) * r.sinh();
                assert_abs_diff_eq!(m.substatic_scalar(r).unwrap(), expect, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn substatic_scan_verdicts() {
        let h = WarpedProduct::space_form(-1, 2).unwrap();
        let rep = h.substatic_scan(0.0, 3.0, 1000).unwrap();
        assert!(rep.value.abs() <= 1e-10);
        assert_eq!(rep.verdict, Verdict::InequalityOk);

        let m = WarpedProduct::horizon_example(2);
        let rep = m.substatic_scan(0.0, 3.0, 1000).unwrap();
        assert_abs_diff_eq!(rep.value, 0.0, epsilon = 1e-12); // minimum at r = 0

        let s = WarpedProduct::space_form(1, 2).unwrap();
        let rep = s.substatic_scan(0.0, PI / 2.0 - 0.01, 500).unwrap();
        assert!(rep.value.abs() <= 1e-10);
    }
}
