//! Normal-speed flows of radial graphs, the evolution equations as testable
//! right-hand sides, and the exponentially weighted monotone quantity Q.
//!
//! The flow keeps the fiber coordinate fixed (Lagrangian radial
//! parametrization): for dX/dt = F nu the nodal radial function obeys
//! d rho/dt = F v. That choice keeps every state a RadialGraph, at the price
//! of a tangential drift of the parametrization; all evolution-equation
//! checks add the induced advective terms analytically.

use serde::Serialize;
use std::sync::Arc;

use crate::error::{Result, WarpError};
use crate::geometry::{compute_geometry, GeometrySample, Mat2};
use crate::integrals::{integrate_samples, weighted_volume_of, SurfaceCalculus};
use crate::surface::RadialGraph;

/// Guard against curvature blow-up near extinction.
pub const CURVATURE_GUARD: f64 = 1e3;

/// Named profiles xi(s) for the shifted speed family.
#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum XiSpec {
    Constant { value: f64 },
    /// xi(s) = e^{rate * s}
    Exp { rate: f64 },
}

impl XiSpec {
    pub fn eval(&self, s: f64) -> f64 {
        match *self {
            XiSpec::Constant { value } => value,
            XiSpec::Exp { rate } => (rate * s).exp(),
        }
    }
}

/// Normal speed F as a pointwise function of the geometry sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FlowSpeed {
    /// F = -1
    UnitInward,
    /// F = -lambda'
    MinusPotential,
    /// F = -(lambda' - eps u) xi(u - eps lambda')
    CustomShifted { eps: f64, xi: XiSpec },
}

impl FlowSpeed {
    pub fn eval(&self, s: &GeometrySample) -> f64 {
        match *self {
            FlowSpeed::UnitInward => -1.0,
            FlowSpeed::MinusPotential => -s.warp.lam1,
            FlowSpeed::CustomShifted { eps, xi } => {
                -(s.warp.lam1 - eps * s.u) * xi.eval(s.u - eps * s.warp.lam1)
            }
        }
    }
}

/// One time slice of the flow; geometry cached alongside the graph.
pub struct FlowState {
    pub t: f64,
    pub graph: RadialGraph,
    pub geom: Vec<GeometrySample>,
}

impl FlowState {
    pub fn new(graph: RadialGraph) -> Result<Self> {
        let geom = compute_geometry(&graph)?;
        Ok(Self { t: 0.0, graph, geom })
    }
}

/// Nodal d rho/dt = F * v for the Lagrangian radial parametrization.
pub fn radial_velocity(state: &FlowState, speed: &FlowSpeed) -> Vec<f64> {
    state
        .geom
        .iter()
        .map(|s| speed.eval(s) * s.v)
        .collect()
}

fn velocity_of_rho(
    template: &RadialGraph,
    rho: &[f64],
    speed: &FlowSpeed,
) -> Result<Vec<f64>> {
    let graph = RadialGraph::from_nodal(
        template.grid.clone(),
        template.manifold.clone(),
        rho.to_vec(),
    )?;
    let geom = compute_geometry(&graph)?;
    Ok(geom.iter().map(|s| speed.eval(s) * s.v).collect())
}

fn axpy(rho: &[f64], k: &[f64], dt: f64) -> Vec<f64> {
    rho.iter().zip(k).map(|(r, v)| r + dt * v).collect()
}

/// One RK4 step; `dt` may be negative (used by the probe differences in
/// `verify_evolution`).
fn rk4_step(state: &FlowState, speed: &FlowSpeed, dt: f64) -> Result<FlowState> {
    let graph = &state.graph;
    let rho = &graph.rho;
    let reject = |e: WarpError| WarpError::StepRejected(e.to_string());

    let k1 = radial_velocity(state, speed);
    let k2 = velocity_of_rho(graph, &axpy(rho, &k1, 0.5 * dt), speed).map_err(reject)?;
    let k3 = velocity_of_rho(graph, &axpy(rho, &k2, 0.5 * dt), speed).map_err(reject)?;
    let k4 = velocity_of_rho(graph, &axpy(rho, &k3, dt), speed).map_err(reject)?;

    let rho_next: Vec<f64> = (0..rho.len())
        .map(|i| rho[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect();
    let next = RadialGraph::from_nodal(graph.grid.clone(), graph.manifold.clone(), rho_next)
        .map_err(reject)?;
    let geom = compute_geometry(&next).map_err(reject)?;
    let max_kappa = geom
        .iter()
        .map(|s| s.kappa_max().abs().max(s.kappa_min().abs()))
        .fold(0.0f64, f64::max);
    if max_kappa > CURVATURE_GUARD {
        return Err(WarpError::StepRejected(format!(
            "curvature guard tripped: max |kappa| = {max_kappa:.3e}"
        )));
    }
    Ok(FlowState {
        t: state.t + dt,
        graph: next,
        geom,
    })
}

/// Advance the flow by one explicit RK4 step of size `dt > 0`.
pub fn flow_step(state: &FlowState, speed: &FlowSpeed, dt: f64) -> Result<FlowState> {
    if !(dt > 0.0) {
        return Err(WarpError::ConfigInvalid(format!("dt = {dt} must be > 0")));
    }
    rk4_step(state, speed, dt)
}

/// Max-norm residuals of the evolution equations, checked by central probe
/// steps at fixed node labels with the tangential drift of the radial
/// parametrization accounted for analytically.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EvolutionResiduals {
    /// d/dt (lambda' - eps u) = -cuF - eps lambda' F + eps <grad F, V>
    pub shifted_potential: f64,
    /// d/dt h_i^j = -hess^j_i F - F (h^2)_i^j - c F delta_i^j
    pub weingarten: f64,
    /// d/dt p_1 = -(Lap F)/n - |h|^2 F / n - c F
    pub mean_curvature: f64,
    /// d/dt dmu = n p_1 F dmu
    pub area_form: f64,
    /// d/dt int_Omega lambda' dv = int lambda' F dmu
    pub weighted_volume: f64,
}

impl EvolutionResiduals {
    pub fn max(&self) -> f64 {
        self.shifted_potential
            .max(self.weingarten)
            .max(self.mean_curvature)
            .max(self.area_form)
            .max(self.weighted_volume)
    }
}

/// Drift components t^a of the parametrization: the tangential part of
/// (F v) d_r relative to the true normal motion, t^a = F sigma^{ab} rho_b / (v lambda^2).
fn drift_components(state: &FlowState, speed: &FlowSpeed) -> (Vec<f64>, Vec<f64>) {
    let n = state.graph.grid.dim();
    let mut dt_comp = Vec::with_capacity(state.geom.len());
    let mut dp_comp = Vec::with_capacity(state.geom.len());
    for s in &state.geom {
        let f = speed.eval(s);
        let lam2 = s.warp.lam * s.warp.lam;
        dt_comp.push(f * s.rho_grad[0] / (s.v * lam2));
        if n == 2 {
            let sin2 = s.theta.sin().powi(2);
            dp_comp.push(f * s.rho_grad[1] / (s.v * lam2 * sin2));
        } else {
            dp_comp.push(0.0);
        }
    }
    (dt_comp, dp_comp)
}

fn weingarten_matrix(s: &GeometrySample) -> Mat2 {
    let n = s.n;
    let mut w: Mat2 = [[0.0; 2]; 2];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                w[i][j] += s.h[i][k] * s.g_inv[k][j];
            }
        }
    }
    w
}

/// Verify the evolution equations at one state by comparing central
/// finite-difference time derivatives (probe steps of +-dt_probe) against
/// the analytic right-hand sides. Space forms only.
pub fn verify_evolution(
    state: &FlowState,
    speed: &FlowSpeed,
    dt_probe: f64,
    eps: f64,
) -> Result<EvolutionResiduals> {
    let c = state
        .graph
        .manifold
        .curvature()
        .ok_or(WarpError::UnsupportedManifold(
            "evolution equations are stated in space forms",
        ))? as f64;
    if !(dt_probe > 0.0) {
        return Err(WarpError::ConfigInvalid(format!(
            "dt_probe = {dt_probe} must be > 0"
        )));
    }

    let plus = rk4_step(state, speed, dt_probe)?;
    let minus = rk4_step(state, speed, -dt_probe)?;
    let geom = &state.geom;
    let grid = &state.graph.grid;
    let n = grid.dim();
    let n_nodes = geom.len();
    let two_dt = 2.0 * dt_probe;

    let calc = SurfaceCalculus::new(&state.graph, geom);
    let f_field: Vec<f64> = geom.iter().map(|s| speed.eval(s)).collect();
    let grad_f = calc.gradient(&f_field);
    let hess_f = calc.hessian(&f_field);
    let lap_f = calc.laplacian(&f_field);

    let (drift_t, drift_p) = drift_components(state, speed);
    let div_drift = calc.divergence(&drift_t, &drift_p);
    // coordinate derivatives of the drift components, for the Lie derivative
    // of the Weingarten map
    let d_drift = [
        [grid.d_theta(&drift_t), grid.d_phi(&drift_t)],
        [grid.d_theta(&drift_p), grid.d_phi(&drift_p)],
    ];

    let advect = |field: &[f64]| -> (Vec<f64>, Vec<f64>) {
        (grid.d_theta(field), grid.d_phi(field))
    };

    // scalar residual helper: central time derivative minus advection minus rhs
    let scalar_residual = |now: &[f64], fwd: &[f64], bwd: &[f64], rhs: &[f64]| -> f64 {
        let (dft, dfp) = advect(now);
        (0..n_nodes)
            .map(|k| {
                let ddt = (fwd[k] - bwd[k]) / two_dt;
                let adv = drift_t[k] * dft[k] + drift_p[k] * dfp[k];
                (ddt - adv - rhs[k]).abs()
            })
            .fold(0.0f64, f64::max)
    };

    // (1) shifted potential lambda' - eps u
    let s1 = |g: &[GeometrySample]| -> Vec<f64> {
        g.iter().map(|s| s.warp.lam1 - eps * s.u).collect()
    };
    let rhs1: Vec<f64> = (0..n_nodes)
        .map(|k| {
            let s = &geom[k];
            let v_tan = s.v_tangent();
            let mut grad_f_dot_v = 0.0;
            for a in 0..n {
                for b in 0..n {
                    grad_f_dot_v += s.g_inv[a][b] * grad_f[k][a] * v_tan[b];
                }
            }
            -c * s.u * f_field[k] - eps * s.warp.lam1 * f_field[k] + eps * grad_f_dot_v
        })
        .collect();
    let r1 = scalar_residual(&s1(geom), &s1(&plus.geom), &s1(&minus.geom), &rhs1);

    // (2) Weingarten map h_i^j, with the Lie-derivative drift correction
    let w_now: Vec<Mat2> = geom.iter().map(weingarten_matrix).collect();
    let w_plus: Vec<Mat2> = plus.geom.iter().map(weingarten_matrix).collect();
    let w_minus: Vec<Mat2> = minus.geom.iter().map(weingarten_matrix).collect();
    let mut w_comp_fields: Vec<Vec<f64>> = vec![vec![0.0; n_nodes]; 4];
    for k in 0..n_nodes {
        for i in 0..n {
            for j in 0..n {
                w_comp_fields[2 * i + j][k] = w_now[k][i][j];
            }
        }
    }
    let dw: Vec<(Vec<f64>, Vec<f64>)> = w_comp_fields.iter().map(|f| advect(f)).collect();
    let mut r2 = 0.0f64;
    for k in 0..n_nodes {
        let s = &geom[k];
        let drift = [drift_t[k], drift_p[k]];
        for i in 0..n {
            for j in 0..n {
                let ddt = (w_plus[k][i][j] - w_minus[k][i][j]) / two_dt;
                // (L_T W)_i^j = T^a d_a W_i^j - W_i^a d_a T^j + W_a^j d_i T^a
                let mut lie = drift[0] * dw[2 * i + j].0[k] + drift[1] * dw[2 * i + j].1[k];
                for a in 0..n {
                    lie -= w_now[k][i][a] * d_drift[j][a][k];
                    lie += w_now[k][a][j] * d_drift[a][i][k];
                }
                // -hess^j_i F - F (W^2)_i^j - c F delta_i^j
                let mut hess_up = 0.0;
                for l in 0..n {
                    hess_up += hess_f[k][i][l] * s.g_inv[l][j];
                }
                let mut w_sq = 0.0;
                for a in 0..n {
                    w_sq += w_now[k][i][a] * w_now[k][a][j];
                }
                let rhs = -hess_up - f_field[k] * w_sq
                    - c * f_field[k] * if i == j { 1.0 } else { 0.0 };
                r2 = r2.max((ddt - lie - rhs).abs());
            }
        }
    }

    // (3) mean curvature
    let p1 = |g: &[GeometrySample]| -> Vec<f64> { g.iter().map(|s| s.p1()).collect() };
    let rhs3: Vec<f64> = (0..n_nodes)
        .map(|k| {
            let s = &geom[k];
            -lap_f[k] / n as f64 - s.h_norm_sq() * f_field[k] / n as f64 - c * f_field[k]
        })
        .collect();
    let r3 = scalar_residual(&p1(geom), &p1(&plus.geom), &p1(&minus.geom), &rhs3);

    // (4) area form: d/dt ln sqrt(det g) = n p_1 F + div T at fixed labels
    let mut r4 = 0.0f64;
    for k in 0..n_nodes {
        let ddt =
            (plus.geom[k].area_weight.ln() - minus.geom[k].area_weight.ln()) / two_dt;
        let rhs = n as f64 * geom[k].p1() * f_field[k] + div_drift[k];
        r4 = r4.max((ddt - rhs).abs());
    }

    // (5) weighted enclosed volume (global, no drift term)
    let wv_ddt =
        (weighted_volume_of(&plus.graph) - weighted_volume_of(&minus.graph)) / two_dt;
    let wv_rhs = integrate_samples(geom, |s| s.warp.lam1 * speed.eval(s));
    let r5 = (wv_ddt - wv_rhs).abs();

    Ok(EvolutionResiduals {
        shifted_potential: r1,
        weingarten: r2,
        mean_curvature: r3,
        area_form: r4,
        weighted_volume: r5,
    })
}

/// The exponentially weighted deficit
/// `Q = e^{-(n+1)t} (int (lambda'+u)/(p_1+1) dmu - (n+1) int_Omega lambda' dv)`,
/// monotone non-increasing under the unit inward normal flow in c = -1.
pub fn q_of_state(state: &FlowState) -> Result<f64> {
    if state.graph.manifold.curvature() != Some(-1) {
        return Err(WarpError::UnsupportedManifold(
            "the monotone quantity is defined for c = -1",
        ));
    }
    let bad: Vec<&GeometrySample> = state.geom.iter().filter(|s| s.p1() <= -1.0).collect();
    if !bad.is_empty() {
        let worst = bad.iter().map(|s| s.p1()).fold(f64::INFINITY, f64::min);
        return Err(WarpError::AssumptionViolated {
            what: "p_1(kappa) > -1",
            count: bad.len(),
            worst,
        });
    }
    let n = state.graph.grid.dim();
    let lhs = integrate_samples(&state.geom, |s| (s.warp.lam1 + s.u) / (s.p1() + 1.0));
    let wv = weighted_volume_of(&state.graph);
    Ok((-((n + 1) as f64) * state.t).exp() * (lhs - (n + 1) as f64 * wv))
}

/// Scalar diagnostics recorded at every accepted step.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SeriesEntry {
    pub t: f64,
    /// NaN when the defining assumptions fail at this time.
    pub q: f64,
    pub q_quad_err: f64,
    pub area: f64,
    pub weighted_volume: f64,
    pub int_u: f64,
    pub min_p1: f64,
    pub max_abs_kappa: f64,
    pub min_rho: f64,
}

/// Why a trace ended.
#[derive(Debug, Clone, Serialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StopReason {
    Completed,
    StepRejected { detail: String },
}

/// Time-ordered record of a flow run.
pub struct FlowTrace {
    pub states: Vec<FlowState>,
    pub series: Vec<SeriesEntry>,
    pub stop_reason: StopReason,
    /// Q(t) <= Q(0) + 10x the largest per-step quadrature error, when Q is
    /// defined (c = -1).
    pub q_monotone_ok: Option<bool>,
    /// area(t) < e^{nt} area(0) + 1e-8 at every recorded time.
    pub area_bound_ok: bool,
    /// min p_1 stayed > -1 at every recorded time.
    pub p1_bound_ok: bool,
}

impl FlowTrace {
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("t,q,q_quad_err,area,weighted_volume,int_u,min_p1,max_abs_kappa,min_rho\n");
        for e in &self.series {
            out.push_str(&format!(
                "{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}\n",
                e.t, e.q, e.q_quad_err, e.area, e.weighted_volume, e.int_u, e.min_p1,
                e.max_abs_kappa, e.min_rho
            ));
        }
        out
    }
}

fn series_entry(state: &FlowState) -> SeriesEntry {
    let geom = &state.geom;
    let area = integrate_samples(geom, |_| 1.0);
    let wv = weighted_volume_of(&state.graph);
    let int_u = integrate_samples(geom, |s| s.u);
    let min_p1 = geom.iter().map(|s| s.p1()).fold(f64::INFINITY, f64::min);
    let max_abs_kappa = geom
        .iter()
        .map(|s| s.kappa_max().abs().max(s.kappa_min().abs()))
        .fold(0.0f64, f64::max);
    let (q, q_err) = match q_of_state(state) {
        Ok(q) => {
            // error estimate from the half-resolution restriction of the
            // nodal graph
            let err = state
                .graph
                .half_resolution()
                .and_then(FlowState::new)
                .and_then(|mut coarse| {
                    coarse.t = state.t;
                    q_of_state(&coarse)
                })
                .map(|qc| (q - qc).abs())
                .unwrap_or(f64::NAN);
            (q, err)
        }
        Err(_) => (f64::NAN, f64::NAN),
    };
    SeriesEntry {
        t: state.t,
        q,
        q_quad_err: q_err,
        area,
        weighted_volume: wv,
        int_u,
        min_p1,
        max_abs_kappa,
        min_rho: state.graph.min_rho(),
    }
}

/// Run the flow to `t_end` with fixed step `dt`, recording the scalar series
/// at every step and full states every `snapshot_every` steps (0 = initial
/// and final only). A rejected step truncates the trace instead of failing.
pub fn evolve(
    initial: RadialGraph,
    speed: &FlowSpeed,
    t_end: f64,
    dt: f64,
    snapshot_every: usize,
) -> Result<FlowTrace> {
    if !(dt > 0.0) || !(t_end > 0.0) {
        return Err(WarpError::ConfigInvalid(format!(
            "need dt > 0 and t_end > 0 (got dt = {dt}, t_end = {t_end})"
        )));
    }
    let n_steps = (t_end / dt).round().max(1.0) as usize;
    let mut state = FlowState::new(initial)?;
    let mut series = vec![series_entry(&state)];
    let mut states = Vec::new();
    let mut stop_reason = StopReason::Completed;

    let keep_snapshot = |step: usize, last: bool| -> bool {
        step == 0 || last || (snapshot_every > 0 && step % snapshot_every == 0)
    };
    states.push(clone_state(&state));

    for step in 1..=n_steps {
        match flow_step(&state, speed, dt) {
            Ok(next) => {
                state = next;
                series.push(series_entry(&state));
                if keep_snapshot(step, step == n_steps) {
                    states.push(clone_state(&state));
                }
            }
            Err(WarpError::StepRejected(detail)) => {
                stop_reason = StopReason::StepRejected { detail };
                states.push(clone_state(&state));
                break;
            }
            Err(e) => return Err(e),
        }
    }

    // invariant flags
    let q0 = series[0].q;
    let q_defined = series.iter().all(|e| e.q.is_finite());
    let q_monotone_ok = if q_defined {
        let tol = 10.0
            * series
                .iter()
                .map(|e| e.q_quad_err)
                .fold(0.0f64, f64::max)
                .max(1e-12);
        Some(series.iter().all(|e| e.q <= q0 + tol))
    } else {
        None
    };
    let area0 = series[0].area;
    let n = state.graph.grid.dim() as f64;
    let area_bound_ok = series
        .iter()
        .all(|e| e.area < (n * e.t).exp() * area0 + 1e-8);
    let p1_bound_ok = series.iter().all(|e| e.min_p1 > -1.0);

    Ok(FlowTrace {
        states,
        series,
        stop_reason,
        q_monotone_ok,
        area_bound_ok,
        p1_bound_ok,
    })
}

fn clone_state(state: &FlowState) -> FlowState {
    FlowState {
        t: state.t,
        graph: RadialGraph {
            grid: Arc::clone(&state.graph.grid),
            rho: state.graph.rho.clone(),
            manifold: Arc::clone(&state.graph.manifold),
            shape: state.graph.shape.clone(),
        },
        geom: state.geom.clone(),
    }
}
