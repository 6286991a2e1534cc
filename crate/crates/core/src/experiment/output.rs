//! CSV and JSON writers for scenario results.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::{json, Map, Value};

use super::engine::{ScenarioResult, SchemeResult};
use crate::error::Result;
use crate::metrics::{MetricsReport, Z95};

pub const METRICS_HEADER: &str = "scheme,velocity_kmh,spectral_efficiency,spectral_efficiency_ci95,ho_per_km,ho_per_km_ci95,ho_per_sec,ho_cost,ho_cost_ci95,throughput,throughput_ci95,skip_fraction,replications";

pub const COVERAGE_HEADER: &str = "threshold_db,threshold,coverage,coverage_ci95";

pub fn write_metrics_csv<W: Write>(mut out: W, reports: &[MetricsReport]) -> std::io::Result<()> {
    writeln!(out, "{METRICS_HEADER}")?;
    for r in reports {
        let cost_ci = if r.ho_cost < 1.0 {
            Z95 * r.ho_per_km.std_err * r.velocity / 3600.0 * r.ho_delay
        } else {
            0.0
        };
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.scheme,
            r.velocity,
            r.spectral_efficiency.mean,
            r.spectral_efficiency.ci95(),
            r.ho_per_km.mean,
            r.ho_per_km.ci95(),
            r.ho_per_sec,
            r.ho_cost,
            cost_ci,
            r.throughput.mean,
            r.throughput.ci95(),
            r.skip_fraction,
            r.replications
        )?;
    }
    Ok(())
}

pub fn write_coverage_csv<W: Write>(mut out: W, scheme: &SchemeResult, thresholds: &[f64]) -> std::io::Result<()> {
    let c = scheme.coverage(thresholds);
    writeln!(out, "{COVERAGE_HEADER}")?;
    for i in 0..c.thresholds.len() {
        writeln!(
            out,
            "{},{},{},{}",
            c.thresholds_db[i], c.thresholds[i], c.probabilities[i], c.ci_halfwidth[i]
        )?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    scenario: &'a str,
    scheme: &'a str,
    policy: &'a crate::policy::PolicyConfig,
    config_hash: String,
    master_seed: u64,
    version: &'static str,
    created_unix: u64,
    elapsed_s: f64,
    workers: usize,
    samples_per_replication: usize,
    replications: &'a [super::engine::ReplicationRecord],
    config: &'a super::config::ScenarioConfig,
    extra: &'a Map<String, Value>,
}

/// Writes `{root}/{scenario}/{scheme}/{metrics.csv, coverage.csv, manifest.json}`
/// for every scheme and returns the scenario directory.
///
/// The CSV files depend only on the configuration; timing goes to the
/// manifest. `extra` is merged into every manifest (calibrated thresholds,
/// for instance).
pub fn write_outputs(result: &ScenarioResult, root: &Path, extra: &Map<String, Value>) -> Result<PathBuf> {
    let cfg = &result.config;
    let dir = root.join(&cfg.name);
    let thresholds = cfg.coverage_thresholds();
    let created = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    for scheme in &result.schemes {
        let sdir = dir.join(&scheme.label);
        fs::create_dir_all(&sdir)?;
        let reports = result.reports(scheme)?;
        let mut buf = Vec::new();
        write_metrics_csv(&mut buf, &reports)?;
        fs::write(sdir.join("metrics.csv"), buf)?;
        let mut buf = Vec::new();
        write_coverage_csv(&mut buf, scheme, &thresholds)?;
        fs::write(sdir.join("coverage.csv"), buf)?;
        let manifest = Manifest {
            scenario: &cfg.name,
            scheme: &scheme.label,
            policy: &scheme.policy,
            config_hash: cfg.hash(),
            master_seed: cfg.run.master_seed,
            version: env!("CARGO_PKG_VERSION"),
            created_unix: created,
            elapsed_s: result.elapsed.as_secs_f64(),
            workers: result.workers,
            samples_per_replication: cfg.samples_per_replication(),
            replications: &result.replications,
            config: cfg,
            extra,
        };
        fs::write(sdir.join("manifest.json"), serde_json::to_vec_pretty(&manifest)?)?;
    }
    Ok(dir)
}

/// A machine-readable one-line error for the command line.
pub fn error_line(e: &crate::Error) -> String {
    let kind = match e {
        crate::Error::InvalidParameter { .. } => "invalid_parameter",
        crate::Error::EmptyDeployment => "empty_deployment",
        crate::Error::UnknownStation(_) => "unknown_station",
        crate::Error::TrajectoryOutside(_) => "trajectory_outside",
        crate::Error::ArcLengthOutOfRange { .. } => "arc_length_out_of_range",
        crate::Error::MissingThreshold { .. } => "missing_threshold",
        crate::Error::InconsistentSkips(_) => "inconsistent_skips",
        crate::Error::Config { .. } => "config",
        crate::Error::ResampleLimit(_) => "resample_limit",
        crate::Error::CalibrationUnreachable { .. } => "calibration_unreachable",
        crate::Error::UnknownArtifact(_) => "unknown_artifact",
        crate::Error::Io(_) => "io",
        crate::Error::Json(_) => "json",
    };
    let mut v = json!({ "error": kind, "message": e.to_string() });
    if let crate::Error::Config { field, .. } = e {
        v["field"] = json!(field);
    }
    v.to_string()
}
