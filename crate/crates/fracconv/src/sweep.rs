//! Fan-out over `(alpha, q)` pairs. Experiments are independent and each
//! owns its subdirectory; at most `jobs` run at once.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use fracconv_core::{ModelParams, Regime};

use crate::config::ExperimentConfig;
use crate::experiment::{run_converge, write_converge};
use crate::table::SweepRow;

#[derive(Debug, Clone)]
pub struct SweepPlan {
    pub alphas: Vec<f64>,
    pub qs: Vec<f64>,
    /// Run pairs with `q >= alpha` (negative controls) instead of skipping them.
    pub relaxed: bool,
    pub jobs: usize,
    pub p_values: Vec<f64>,
}

pub fn case_dir(root: &Path, alpha: f64, q: f64) -> PathBuf {
    root.join(format!("alpha{alpha}_q{q}"))
}

/// Runs every pair and returns one row per pair in `(alpha, q)` input order,
/// independent of scheduling.
pub fn run_sweep(base: &ExperimentConfig, plan: &SweepPlan, root: &Path) -> Vec<SweepRow> {
    let cases: Vec<(f64, f64)> = plan
        .alphas
        .iter()
        .flat_map(|&a| plan.qs.iter().map(move |&q| (a, q)))
        .collect();
    let results: Mutex<Vec<Option<SweepRow>>> = Mutex::new(vec![None; cases.len()]);
    let next = AtomicUsize::new(0);
    let jobs = plan.jobs.clamp(1, cases.len().max(1));
    std::thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(alpha, q)) = cases.get(i) else { break };
                let row = run_case(base, plan, root, alpha, q);
                results.lock().expect("no panics while holding the lock")[i] = Some(row);
            });
        }
    });
    results
        .into_inner()
        .expect("workers finished")
        .into_iter()
        .map(|r| r.expect("every case ran"))
        .collect()
}

fn run_case(base: &ExperimentConfig, plan: &SweepPlan, root: &Path, alpha: f64, q: f64) -> SweepRow {
    let subcritical = q < alpha;
    let regime = if subcritical { Regime::Subcritical } else { Regime::Relaxed };
    let mut row = SweepRow {
        alpha,
        q,
        regime: if subcritical { "subcritical" } else { "relaxed" },
        status: String::new(),
        e1_first: f64::NAN,
        e1_last: f64::NAN,
        max_tail_mass: f64::NAN,
    };
    if !subcritical && !plan.relaxed {
        row.status = "skipped: subcritical requires q < alpha".into();
        return row;
    }
    let model = match ModelParams::new(alpha, q, base.model.mass, regime) {
        Ok(m) => m,
        Err(e) => {
            row.status = format!("invalid: {e}");
            return row;
        }
    };
    let cfg = ExperimentConfig { model, ..base.clone() };
    let outcome = run_converge(&cfg, &plan.p_values).and_then(|study| {
        write_converge(&study, &cfg, &case_dir(root, alpha, q))?;
        Ok(study)
    });
    match outcome {
        Ok(study) => {
            if let Some(e1) = study.error_column(1.0) {
                row.e1_first = e1[0];
                row.e1_last = e1[e1.len() - 1];
            }
            row.max_tail_mass = study.tail_history.iter().copied().fold(0.0, f64::max);
            row.status = "ok".into();
        }
        Err(e) => row.status = format!("failed: {e}"),
    }
    row
}
