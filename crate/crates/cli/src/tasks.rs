//! Task execution: each task turns a validated config into a list of
//! functional reports, plot-ready series and auxiliary CSV artifacts.

use std::collections::BTreeMap;

use warpcheck_core::flow::{evolve, StopReason};
use warpcheck_core::functionals::{
    curvature_equation_residual, equiv_ineq_residual, hk_assumption_check, hk_deficit,
    integration_by_parts_residual, minkowski_residual, minkowski_second_deficit,
    shifted_minkowski_residual,
};
use warpcheck_core::functionals::cauchy_schwarz_gap;
use warpcheck_core::integrals::{conformal_residuals, EvaluatedSurface};
use warpcheck_core::{FunctionalReport, RadialGraph, Verdict};

use crate::config::{RunConfig, Task};

/// Everything a task run produces besides its exit status.
pub struct TaskOutput {
    pub reports: Vec<FunctionalReport>,
    /// Named (x, y) series for `warpcheck plot`.
    pub series: BTreeMap<String, Vec<(f64, f64)>>,
    /// Extra CSV artifacts: (file name, contents).
    pub extras: Vec<(String, String)>,
    /// Precondition failures and propagated module errors (force exit 1).
    pub errors: Vec<String>,
}

impl TaskOutput {
    fn new() -> Self {
        Self {
            reports: Vec::new(),
            series: BTreeMap::new(),
            extras: Vec::new(),
            errors: Vec::new(),
        }
    }
}

pub fn execute(config: &RunConfig) -> anyhow::Result<TaskOutput> {
    config.validate()?;
    let manifold = config.manifold.build()?;
    let mut out = TaskOutput::new();

    if config.task == Task::SubstaticScan {
        run_substatic_scan(config, &manifold, &mut out)?;
        return Ok(out);
    }

    let graph = config.surface_config()?.build(manifold)?;
    match config.task {
        Task::Geometry => run_geometry(config, graph, &mut out)?,
        Task::Identities => run_identities(config, graph, &mut out)?,
        Task::HkSweep => run_hk_sweep(config, graph, &mut out)?,
        Task::TheoremB => run_theorem_b(config, graph, &mut out)?,
        Task::CurvatureEq => run_curvature_eq(config, graph, &mut out)?,
        Task::Flow => run_flow(config, graph, &mut out)?,
        Task::SubstaticScan => unreachable!(),
    }
    Ok(out)
}

fn conformal_reports(
    surface: &EvaluatedSurface,
    node_tol: f64,
    out: &mut TaskOutput,
) -> anyhow::Result<()> {
    let res = conformal_residuals(surface)?;
    let tag = surface.graph.manifold.tag();
    for (name, value) in [
        ("conformal_grad_potential", res.grad_phi),
        ("conformal_hessian", res.hessian_phi),
        ("conformal_grad_support", res.grad_u),
    ] {
        out.reports.push(
            FunctionalReport::identity(name, value, 0.0, node_tol).with_manifold(tag.clone()),
        );
    }
    Ok(())
}

/// `int u dmu = (n+1) * weighted volume + horizon term`.
fn divergence_identity(surface: &EvaluatedSurface, abs_tol: f64) -> FunctionalReport {
    let m = &surface.graph.manifold;
    let n = surface.n();
    let (int_u, err_u) = surface.integrate(|s| s.u);
    let (wv, err_wv) = surface.weighted_volume();
    let horizon = if m.has_horizon {
        let lam0 = m.eval(0.0).map(|w| w.lam).unwrap_or(f64::NAN);
        lam0.powi((n + 1) as i32) * m.fiber_volume()
    } else {
        0.0
    };
    let value = int_u - (n + 1) as f64 * wv - horizon;
    let quad_err = err_u + (n + 1) as f64 * err_wv;
    FunctionalReport::identity("support_divergence", value, quad_err, abs_tol)
        .with_manifold(m.tag())
}

fn run_geometry(config: &RunConfig, graph: RadialGraph, out: &mut TaskOutput) -> anyhow::Result<()> {
    let surface = EvaluatedSurface::new(graph)?;
    let mut csv = String::from("node,theta,phi,rho,kappa_1,kappa_2,p1,u,v,area_weight\n");
    for s in &surface.geom {
        csv.push_str(&format!(
            "{},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}\n",
            s.node, s.theta, s.phi, s.r, s.kappa[0], s.kappa[1], s.p1(), s.u, s.v, s.area_weight
        ));
    }
    out.extras.push(("geometry.csv".into(), csv));

    let tag = surface.graph.manifold.tag();
    let (area, area_err) = surface.integrate(|_| 1.0);
    let (wv, wv_err) = surface.weighted_volume();
    out.reports.push(
        FunctionalReport::new("area", area, area_err, Verdict::IdentityOk)
            .with_manifold(tag.clone())
            .with_note("informational".into()),
    );
    out.reports.push(
        FunctionalReport::new("weighted_volume", wv, wv_err, Verdict::IdentityOk)
            .with_manifold(tag.clone())
            .with_note("informational".into()),
    );
    out.reports.push(
        FunctionalReport::new(
            "umbilicity_spread",
            surface.umbilicity_spread(),
            0.0,
            Verdict::IdentityOk,
        )
        .with_manifold(tag)
        .with_note("informational".into()),
    );
    conformal_reports(&surface, config.node_tol(), out)
}

fn run_identities(
    config: &RunConfig,
    graph: RadialGraph,
    out: &mut TaskOutput,
) -> anyhow::Result<()> {
    let surface = EvaluatedSurface::new(graph)?;
    let abs_tol = config.abs_tol();
    let n = surface.n();

    out.reports.push(divergence_identity(&surface, abs_tol));
    conformal_reports(&surface, config.node_tol(), out)?;

    for &eps in &config.eps_values() {
        out.reports.push(minkowski_residual(&surface, eps, abs_tol));
        if surface.graph.manifold.is_space_form() {
            for m in 1..=n {
                out.reports
                    .push(shifted_minkowski_residual(&surface, eps, m, abs_tol)?);
            }
        }
        for k in 1..=n {
            out.reports
                .push(integration_by_parts_residual(&surface, eps, k, abs_tol)?);
        }
    }
    Ok(())
}

fn run_hk_sweep(config: &RunConfig, graph: RadialGraph, out: &mut TaskOutput) -> anyhow::Result<()> {
    let surface = EvaluatedSurface::new(graph)?;
    let mut deficit_series = Vec::new();
    for &eps in &config.eps_values() {
        let assumption = hk_assumption_check(&surface, eps);
        let gate_ok = assumption.verdict == Verdict::InequalityOk;
        out.reports.push(assumption);
        if !gate_ok {
            out.errors.push(format!(
                "ASSUMPTION_VIOLATED: sign hypothesis fails for eps = {eps}; deficit skipped"
            ));
            continue;
        }
        match hk_deficit(&surface, eps) {
            Ok(rep) => {
                deficit_series.push((eps, rep.value));
                out.reports.push(rep);
            }
            Err(e) => out.errors.push(format!("eps = {eps}: {e}")),
        }
    }
    if !deficit_series.is_empty() {
        out.series.insert("deficit_vs_eps".into(), deficit_series);
    }
    Ok(())
}

fn run_theorem_b(
    config: &RunConfig,
    graph: RadialGraph,
    out: &mut TaskOutput,
) -> anyhow::Result<()> {
    let surface = EvaluatedSurface::new(graph)?;
    let abs_tol = config.abs_tol();
    let second = match minkowski_second_deficit(&surface) {
        Ok(rep) => rep,
        Err(e) => {
            out.errors.push(e.to_string());
            return Ok(());
        }
    };
    for &eps in &config.eps_values() {
        match equiv_ineq_residual(&surface, eps) {
            Ok(rep) => {
                let agreement = FunctionalReport::identity(
                    "deficit_equivalence",
                    rep.value - second.value,
                    rep.quadrature_error + second.quadrature_error,
                    abs_tol.max(1e-9),
                )
                .with_eps(eps);
                out.reports.push(rep);
                out.reports.push(agreement);
            }
            Err(e) => out.errors.push(format!("eps = {eps}: {e}")),
        }
        match cauchy_schwarz_gap(&surface, eps) {
            Ok(rep) => out.reports.push(rep),
            Err(e) => out.errors.push(format!("eps = {eps}: {e}")),
        }
    }
    out.reports.push(second);
    Ok(())
}

fn run_curvature_eq(
    config: &RunConfig,
    graph: RadialGraph,
    out: &mut TaskOutput,
) -> anyhow::Result<()> {
    let surface = EvaluatedSurface::new(graph)?;
    let chi = config.chi.as_ref().expect("validated");
    let variant = *config.variant.as_ref().expect("validated");
    let k = config.k.unwrap_or(1);
    let eps = config.eps_values()[0];
    match curvature_equation_residual(&surface, eps, k, chi, variant, config.node_tol()) {
        Ok(rep) => out.reports.push(rep),
        Err(e) => out.errors.push(e.to_string()),
    }
    match integration_by_parts_residual(&surface, eps, k, config.abs_tol()) {
        Ok(rep) => out.reports.push(rep),
        Err(e) => out.errors.push(e.to_string()),
    }
    Ok(())
}

fn run_flow(config: &RunConfig, graph: RadialGraph, out: &mut TaskOutput) -> anyhow::Result<()> {
    let fc = config.flow.as_ref().expect("validated");
    let speed = fc.speed.build();
    let trace = match evolve(graph, &speed, fc.t_end, fc.dt, fc.snapshot_every) {
        Ok(t) => t,
        Err(e) => {
            out.errors.push(e.to_string());
            return Ok(());
        }
    };
    out.extras.push(("trace.csv".into(), trace.to_csv()));

    let q_series: Vec<(f64, f64)> = trace
        .series
        .iter()
        .filter(|e| e.q.is_finite())
        .map(|e| (e.t, e.q))
        .collect();
    if !q_series.is_empty() {
        out.series.insert("q_vs_t".into(), q_series);
    }

    let first = trace.series.first().expect("trace has initial entry");
    let last = trace.series.last().expect("trace has final entry");
    let completed = trace.stop_reason == StopReason::Completed;
    out.reports.push(FunctionalReport::new(
        "flow_completed",
        last.t,
        0.0,
        if completed {
            Verdict::IdentityOk
        } else {
            Verdict::Inconclusive
        },
    ).with_note(match &trace.stop_reason {
        StopReason::Completed => "reached t_end".into(),
        StopReason::StepRejected { detail } => format!("truncated: {detail}"),
    }));
    if let Some(ok) = trace.q_monotone_ok {
        out.reports.push(FunctionalReport::new(
            "flow_q_monotone",
            first.q - last.q,
            first.q_quad_err.max(last.q_quad_err),
            if ok { Verdict::InequalityOk } else { Verdict::Violated },
        ).with_note("Q(0) - Q(t_end); nonnegative when the exponentially normalized deficit decays".into()));
    }
    let n = fc_dim(&trace);
    let area_margin = trace
        .series
        .iter()
        .map(|e| e.area - (n as f64 * e.t).exp() * first.area)
        .fold(f64::NEG_INFINITY, f64::max);
    out.reports.push(FunctionalReport::new(
        "flow_area_bound",
        -area_margin,
        0.0,
        if trace.area_bound_ok { Verdict::InequalityOk } else { Verdict::Violated },
    ).with_note("min over t of e^{nt} area(0) - area(t)".into()));
    let min_p1 = trace
        .series
        .iter()
        .map(|e| e.min_p1)
        .fold(f64::INFINITY, f64::min);
    out.reports.push(FunctionalReport::new(
        "flow_p1_lower_bound",
        min_p1 + 1.0,
        0.0,
        if trace.p1_bound_ok { Verdict::InequalityOk } else { Verdict::Violated },
    ).with_note("min p_1 + 1 along the trace".into()));
    Ok(())
}

fn fc_dim(trace: &warpcheck_core::flow::FlowTrace) -> usize {
    trace
        .states
        .first()
        .map(|s| s.graph.grid.dim())
        .unwrap_or(2)
}

fn run_substatic_scan(
    config: &RunConfig,
    manifold: &std::sync::Arc<warpcheck_core::WarpedProduct>,
    out: &mut TaskOutput,
) -> anyhow::Result<()> {
    let (r_lo, r_hi, samples) = match config.scan {
        Some(s) => (s.r_lo, s.r_hi, s.samples),
        None => {
            let hi = if manifold.r_max.is_finite() {
                0.98 * manifold.r_max
            } else {
                3.0
            };
            (0.0, hi, 301)
        }
    };
    if !(r_hi > r_lo) || samples < 2 {
        anyhow::bail!("CONFIG_INVALID: field 'scan': need r_lo < r_hi and samples >= 2");
    }
    match manifold.substatic_scan(r_lo, r_hi, samples) {
        Ok(rep) => out.reports.push(rep),
        Err(e) => {
            out.errors.push(e.to_string());
            return Ok(());
        }
    }
    let mut series = Vec::with_capacity(samples);
    for i in 0..samples {
        let r = r_lo + (r_hi - r_lo) * i as f64 / (samples - 1) as f64;
        series.push((r, manifold.substatic_scalar(r)?));
    }
    out.series.insert("substatic".into(), series);
    Ok(())
}
