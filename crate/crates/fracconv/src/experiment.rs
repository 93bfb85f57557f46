//! One experiment end to end: initial data, solve, diagnostics, files.

use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use fracconv_core::asymptotics::{study_from_snapshots, ConvergenceStudy};
use fracconv_core::diagnostics::{assert_bounds, diagnose, BoundsReport, DiagnosticsRecord};
use fracconv_core::initial::InitialData;
use fracconv_core::solver::solve;
use fracconv_core::{Field, ModelParams};
use serde_json::json;

use crate::config::{DiagnosticsSpec, ExperimentConfig, InitialSpec, OutputFormat};
use crate::snapshot::{read_snapshot, write_snapshot, SnapshotError};
use crate::table;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Core(#[from] fracconv_core::Error),
    #[error(transparent)]
    Snapshot(#[from] SnapshotError),
    #[error("cannot write {0}: {1}")]
    Io(PathBuf, #[source] std::io::Error),
    #[error("{0}")]
    Input(String),
}

pub fn initial_field(cfg: &ExperimentConfig) -> Result<Field, RunError> {
    let m = &cfg.model;
    let data = match &cfg.initial_data {
        InitialSpec::Box { half_width } => InitialData::Box { half_width: *half_width },
        InitialSpec::Bump { width } => InitialData::Bump { width: *width },
        InitialSpec::NWaveAt { t0 } => InitialData::NWaveAt { t0: *t0 },
        InitialSpec::File { path } => {
            let f = read_snapshot(path)?;
            if f.grid() != &cfg.grid {
                return Err(RunError::Input(format!(
                    "{}: snapshot grid (L = {}, N = {}) differs from the configured grid (L = {}, N = {})",
                    path.display(),
                    f.grid().half_width(),
                    f.grid().len(),
                    cfg.grid.half_width(),
                    cfg.grid.len()
                )));
            }
            return Ok(f.with_time(0.0));
        }
    };
    Ok(data.sample(&cfg.grid, m.mass, m.q)?)
}

/// Diagnostics and bound checks for a set of snapshots.
#[derive(Debug, Clone)]
pub struct Assessment {
    pub records: Vec<DiagnosticsRecord>,
    pub reports: Vec<BoundsReport>,
}

impl Assessment {
    pub fn new(snapshots: &[Field], params: &ModelParams, diag: &DiagnosticsSpec) -> Self {
        let records: Vec<DiagnosticsRecord> = snapshots
            .iter()
            .map(|s| diagnose(s, params, diag.r_local, diag.r_tail))
            .collect();
        let reports = records.iter().map(|r| assert_bounds(r, params, diag.slack)).collect();
        Self { records, reports }
    }

    pub fn passed(&self) -> bool {
        self.reports.iter().all(BoundsReport::passed)
    }

    pub fn failures(&self) -> Vec<String> {
        self.reports
            .iter()
            .flat_map(|r| {
                r.failures()
                    .map(move |c| format!("t = {}: {} observed {:e} > allowed {:e}", r.time, c.name, c.observed, c.allowed))
            })
            .collect()
    }
}

pub struct SolveRun {
    pub snapshots: Vec<Field>,
    pub assessment: Assessment,
}

pub fn run_solve(cfg: &ExperimentConfig) -> Result<SolveRun, RunError> {
    let u0 = initial_field(cfg)?;
    let snapshots = solve(&u0, &cfg.model, &cfg.solver)?;
    let assessment = Assessment::new(&snapshots, &cfg.model, &cfg.diagnostics);
    Ok(SolveRun { snapshots, assessment })
}

/// Times at which the study is tabulated: the record times, or the horizon.
pub fn study_times(cfg: &ExperimentConfig) -> Vec<f64> {
    if cfg.solver.record_times.is_empty() {
        vec![cfg.solver.end_time]
    } else {
        cfg.solver.record_times.clone()
    }
}

pub fn run_converge(cfg: &ExperimentConfig, p_values: &[f64]) -> Result<ConvergenceStudy, RunError> {
    let u0 = initial_field(cfg)?;
    let mut solver = cfg.solver.clone();
    solver.record_times = study_times(cfg);
    let snaps = solve(&u0, &cfg.model, &solver)?;
    Ok(study_from_snapshots(&cfg.model, &snaps, p_values, cfg.diagnostics.r_tail)?)
}

/// `E_1` strictly decreasing across the study times.
pub fn converge_gate(study: &ConvergenceStudy) -> Vec<String> {
    let Some(e1) = study.error_column(1.0) else {
        return vec!["E_1 was not tracked".into()];
    };
    e1.windows(2)
        .zip(study.times.windows(2))
        .filter(|(e, _)| !(e[1] < e[0]))
        .map(|(e, t)| format!("E_1 did not decrease from t = {} ({:e}) to t = {} ({:e})", t[0], e[0], t[1], e[1]))
        .collect()
}

pub fn snapshot_name(index: usize) -> String {
    format!("snapshot_{index:03}.txt")
}

/// Writes `contents` to `dir/name` and records the path.
pub fn emit(dir: &Path, name: &str, contents: &str, written: &mut Vec<PathBuf>) -> Result<(), RunError> {
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| RunError::Io(path.clone(), e))?;
    written.push(path);
    Ok(())
}

pub fn ensure_dir(dir: &Path) -> Result<(), RunError> {
    std::fs::create_dir_all(dir).map_err(|e| RunError::Io(dir.to_path_buf(), e))
}

pub fn write_solve(run: &SolveRun, cfg: &ExperimentConfig, dir: &Path) -> Result<Vec<PathBuf>, RunError> {
    ensure_dir(dir)?;
    let mut written = Vec::new();
    if cfg.outputs.wants(OutputFormat::Csv) {
        emit(dir, "diagnostics.csv", &table::diagnostics_csv(&run.assessment.records, cfg.model.q), &mut written)?;
        emit(dir, "bounds.csv", &table::bounds_csv(&run.assessment.reports), &mut written)?;
    }
    if cfg.outputs.wants(OutputFormat::Snapshot) {
        for (i, s) in run.snapshots.iter().enumerate() {
            let path = dir.join(snapshot_name(i));
            write_snapshot(s, &path)?;
            written.push(path);
        }
    }
    Ok(written)
}

pub fn write_converge(study: &ConvergenceStudy, cfg: &ExperimentConfig, dir: &Path) -> Result<Vec<PathBuf>, RunError> {
    ensure_dir(dir)?;
    let mut written = Vec::new();
    if cfg.outputs.wants(OutputFormat::Csv) {
        emit(dir, "convergence.csv", &table::convergence_csv(study), &mut written)?;
    }
    Ok(written)
}

/// Run metadata kept out of the data files so those stay byte-identical.
pub struct Manifest<'a> {
    pub command: &'a str,
    pub config: Option<&'a Path>,
    pub started: SystemTime,
    pub clock: Instant,
    pub outputs: &'a [PathBuf],
    pub gate: Option<&'a [String]>,
    pub extra: serde_json::Value,
}

impl Manifest<'_> {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "tool": "fracconv",
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "config": self.config.map(|p| p.display().to_string()),
            "started_unix_seconds": self.started.duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0),
            "elapsed_seconds": self.clock.elapsed().as_secs_f64(),
            "outputs": self.outputs.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
            "gate": self.gate.map(|f| json!({"passed": f.is_empty(), "failures": f})),
            "details": self.extra,
        })
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf, RunError> {
        ensure_dir(dir)?;
        let path = dir.join("manifest.json");
        let text = serde_json::to_string_pretty(&self.to_json()).expect("manifest is valid JSON");
        std::fs::write(&path, text + "\n").map_err(|e| RunError::Io(path.clone(), e))?;
        Ok(path)
    }
}

pub fn config_summary(cfg: &ExperimentConfig) -> serde_json::Value {
    json!({
        "alpha": cfg.model.alpha,
        "q": cfg.model.q,
        "mass": cfg.model.mass,
        "subcritical": cfg.model.is_subcritical(),
        "half_width": cfg.grid.half_width(),
        "points": cfg.grid.len(),
        "scheme": format!("{:?}", cfg.solver.scheme),
        "delta": cfg.solver.delta,
        "end_time": cfg.solver.end_time,
        "record_times": cfg.solver.record_times,
        "initial": format!("{:?}", cfg.initial_data),
    })
}
