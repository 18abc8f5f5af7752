//! Batch front-end: parse a JSON run configuration, execute the requested
//! verification task, and emit a JSON report plus plot-ready CSV.

mod config;
mod tasks;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use warpcheck_core::report::reports_to_csv;
use warpcheck_core::{FunctionalReport, Verdict};

use config::RunConfig;

#[derive(Parser)]
#[command(
    name = "warpcheck",
    about = "Numerical verifier for curvature identities, inequalities and flows of star-shaped hypersurfaces in warped product manifolds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute the task described by a JSON config and write report files.
    Run {
        /// Path to the JSON run configuration.
        config: PathBuf,
        /// Output directory for report.json, summary.csv and task artifacts.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Worker thread count (requires the 'parallel' build).
        #[arg(long)]
        threads: Option<usize>,
        /// Print notes along with each report line.
        #[arg(long)]
        verbose: bool,
    },
    /// Emit a long-format (series,x,y) CSV from a previously written report.
    Plot {
        /// Path to a report.json produced by `warpcheck run`.
        report: PathBuf,
        /// Which series to emit.
        #[arg(long, value_parser = ["q_vs_t", "deficit_vs_eps", "substatic"])]
        series: String,
    },
}

/// On-disk shape of report.json.
#[derive(Serialize, Deserialize)]
struct ReportFile {
    config: RunConfig,
    reports: Vec<FunctionalReport>,
    series: BTreeMap<String, Vec<(f64, f64)>>,
    errors: Vec<String>,
    exit_code: i32,
}

fn overall_exit(reports: &[FunctionalReport], errors: &[String]) -> i32 {
    if !errors.is_empty() {
        return 1;
    }
    if reports.iter().any(|r| r.verdict == Verdict::Violated) {
        return 2;
    }
    if reports.iter().any(|r| r.verdict == Verdict::Inconclusive) {
        return 3;
    }
    0
}

fn run(config_path: &Path, out_dir: &Path, threads: Option<usize>, verbose: bool) -> anyhow::Result<i32> {
    if let Some(n) = threads {
        configure_threads(n)?;
    }
    let text = std::fs::read_to_string(config_path)
        .with_context(|| format!("reading config {}", config_path.display()))?;
    let config: RunConfig = serde_json::from_str(&text)
        .map_err(|e| anyhow::anyhow!("CONFIG_INVALID: {e}"))?;
    let output = tasks::execute(&config)?;

    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("creating output directory {}", out_dir.display()))?;
    let exit_code = overall_exit(&output.reports, &output.errors);
    let report_file = ReportFile {
        config,
        reports: output.reports,
        series: output.series,
        errors: output.errors,
        exit_code,
    };
    let json = serde_json::to_string_pretty(&report_file)?;
    std::fs::write(out_dir.join("report.json"), json.as_bytes())?;
    std::fs::write(
        out_dir.join("summary.csv"),
        reports_to_csv(&report_file.reports).as_bytes(),
    )?;
    for (name, contents) in &output.extras {
        std::fs::write(out_dir.join(name), contents.as_bytes())?;
    }

    for rep in &report_file.reports {
        let mut line = format!(
            "{:<28} value={:>14.6e} quad_err={:>10.3e} verdict={}",
            rep.name, rep.value, rep.quadrature_error, rep.verdict
        );
        if let Some(eps) = rep.inputs.eps {
            line.push_str(&format!(" eps={eps}"));
        }
        if let Some(k) = rep.inputs.k {
            line.push_str(&format!(" k={k}"));
        }
        println!("{line}");
        if verbose {
            if let Some(note) = &rep.note {
                println!("    note: {note}");
            }
        }
    }
    for e in &report_file.errors {
        eprintln!("error: {e}");
    }
    let overall = match exit_code {
        0 => "ok",
        2 => "violated",
        3 => "inconclusive",
        _ => "error",
    };
    println!("overall: {overall} (exit {exit_code})");
    Ok(exit_code)
}

fn plot(report_path: &Path, series: &str) -> anyhow::Result<i32> {
    let text = std::fs::read_to_string(report_path)
        .with_context(|| format!("reading report {}", report_path.display()))?;
    let report: ReportFile =
        serde_json::from_str(&text).context("parsing report.json")?;
    let data = report.series.get(series).ok_or_else(|| {
        anyhow::anyhow!(
            "report has no '{series}' series (available: {})",
            report
                .series
                .keys()
                .cloned()
                .collect::<Vec<_>>()
                .join(", ")
        )
    })?;
    let mut out = String::from("series,x,y\n");
    for &(x, y) in data {
        out.push_str(&format!("{series},{x:.12e},{y:.12e}\n"));
    }
    print!("{out}");
    Ok(0)
}

#[cfg(feature = "parallel")]
fn configure_threads(n: usize) -> anyhow::Result<()> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .context("configuring the worker thread pool")
}

#[cfg(not(feature = "parallel"))]
fn configure_threads(_n: usize) -> anyhow::Result<()> {
    eprintln!("warning: built without the 'parallel' feature; --threads ignored");
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run {
            config,
            out,
            threads,
            verbose,
        } => run(config, out, *threads, *verbose),
        Command::Plot { report, series } => plot(report, series),
    };
    match result {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(1);
        }
    }
}
