use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Instant, SystemTime};

use clap::{Args, Parser, Subcommand};
use fracconv::config::{load_config, ExperimentConfig, OutputFormat, Overrides};
use fracconv::experiment::{
    config_summary, converge_gate, emit, ensure_dir, run_converge, run_solve, write_converge, write_solve, Assessment,
    Manifest, RunError,
};
use fracconv::snapshot::read_snapshot;
use fracconv::sweep::{run_sweep, SweepPlan};
use fracconv::table::{self, KernelNormRow};
use fracconv_core::kernel::{fit_decay_exponent, kernel_lp_norms, kernel_value, KernelOrder};
use serde_json::json;

/// Output directory override consulted when `--out` is absent.
const OUT_ENV: &str = "FRACCONV_OUT";

#[derive(Parser)]
#[command(name = "fracconv", version, about = "Fractional convection-diffusion solver and N-wave asymptotics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Kernel profile table or norm/decay table.
    Kernel(KernelArgs),
    /// Run one experiment; write snapshots, diagnostics and bound checks.
    Solve(RunArgs),
    /// Recompute diagnostics on stored snapshots.
    Diagnose(DiagnoseArgs),
    /// Distance to the N-wave over the record times.
    Converge(ConvergeArgs),
    /// Convergence studies over an (alpha, q) grid.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct Common {
    /// Experiment configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Exit nonzero if any acceptance-style check fails.
    #[arg(long)]
    gate: bool,
    /// Output directory (overrides the config and $FRACCONV_OUT).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Allow q >= alpha (negative controls).
    #[arg(long)]
    relaxed: bool,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct DiagnoseArgs {
    #[command(flatten)]
    common: Common,
    /// Snapshot files, or directories whose `snapshot_*.txt` files are used.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
}

#[derive(Args)]
struct ConvergeArgs {
    #[command(flatten)]
    common: Common,
    /// Exponents p of the tabulated errors E_p.
    #[arg(long, value_delimiter = ',', default_value = "1,2")]
    p: Vec<f64>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_delimiter = ',', required = true)]
    alphas: Vec<f64>,
    #[arg(long, value_delimiter = ',', required = true)]
    qs: Vec<f64>,
    /// Maximum number of concurrent experiments.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long, value_delimiter = ',', default_value = "1,2")]
    p: Vec<f64>,
}

#[derive(Args)]
struct KernelArgs {
    #[arg(long)]
    alpha: f64,
    /// Emit K_t(x) on a uniform x grid.
    #[arg(long, conflicts_with = "norms")]
    table: bool,
    /// Emit ||D^s (d/dx)^j K_t||_p for s in {0, 0.5}, j in {0, 1}, p in {1, 2, inf}.
    #[arg(long)]
    norms: bool,
    /// Time for --table.
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    #[arg(long, default_value_t = 20.0)]
    x_max: f64,
    #[arg(long, default_value_t = 401)]
    points: usize,
    /// Times for --norms.
    #[arg(long, value_delimiter = ',', default_value = "0.5,1,2,4")]
    times: Vec<f64>,
    /// Check the table against the Cauchy kernel (alpha = 1) or the fitted
    /// decay exponents against their predictions (within 1%).
    #[arg(long)]
    gate: bool,
    /// Write kernel.csv into this directory instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn output_dir(cli: Option<&Path>, cfg: &ExperimentConfig) -> PathBuf {
    cli.map(Path::to_path_buf)
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| cfg.outputs.directory.clone())
}

fn load(common: &Common) -> Result<(ExperimentConfig, PathBuf), String> {
    let ov = Overrides {
        relaxed: common.relaxed,
        ..Default::default()
    };
    let cfg = load_config(&common.config, &ov).map_err(|e| e.to_string())?;
    let dir = output_dir(common.out.as_deref(), &cfg);
    Ok((cfg, dir))
}

enum Outcome {
    Done,
    GateFailed(Vec<String>),
}

fn finish(
    command: &str,
    common: &Common,
    cfg: &ExperimentConfig,
    dir: &Path,
    started: (SystemTime, Instant),
    mut written: Vec<PathBuf>,
    failures: Vec<String>,
    extra: serde_json::Value,
) -> Result<Outcome, String> {
    if cfg.outputs.wants(OutputFormat::Json) {
        let manifest = Manifest {
            command,
            config: Some(&common.config),
            started: started.0,
            clock: started.1,
            outputs: &written,
            gate: common.gate.then_some(failures.as_slice()),
            extra,
        };
        written.push(manifest.write(dir).map_err(|e| e.to_string())?);
    }
    for p in &written {
        eprintln!("wrote {}", p.display());
    }
    if common.gate && !failures.is_empty() {
        Ok(Outcome::GateFailed(failures))
    } else {
        Ok(Outcome::Done)
    }
}

fn solve_cmd(args: &RunArgs) -> Result<Outcome, String> {
    let started = (SystemTime::now(), Instant::now());
    let (cfg, dir) = load(&args.common)?;
    let run = run_solve(&cfg).map_err(|e| e.to_string())?;
    let written = write_solve(&run, &cfg, &dir).map_err(|e| e.to_string())?;
    let extra = json!({ "config": config_summary(&cfg), "snapshots": run.snapshots.len() });
    finish("solve", &args.common, &cfg, &dir, started, written, run.assessment.failures(), extra)
}

fn collect_snapshots(inputs: &[PathBuf]) -> Result<Vec<PathBuf>, String> {
    let mut files = Vec::new();
    for p in inputs {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = std::fs::read_dir(p)
                .map_err(|e| format!("{}: {e}", p.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| {
                    f.file_name()
                        .and_then(|n| n.to_str())
                        .is_some_and(|n| n.starts_with("snapshot_") && n.ends_with(".txt"))
                })
                .collect();
            found.sort();
            files.extend(found);
        } else {
            files.push(p.clone());
        }
    }
    if files.is_empty() {
        return Err("no snapshot files found".into());
    }
    Ok(files)
}

fn diagnose_cmd(args: &DiagnoseArgs) -> Result<Outcome, String> {
    let started = (SystemTime::now(), Instant::now());
    let (cfg, dir) = load(&args.common)?;
    let files = collect_snapshots(&args.inputs)?;
    let mut snaps = files
        .iter()
        .map(|f| read_snapshot(f).map_err(|e| format!("{}: {e}", f.display())))
        .collect::<Result<Vec<_>, _>>()?;
    snaps.sort_by(|a, b| a.time().total_cmp(&b.time()));
    let assessment = Assessment::new(&snaps, &cfg.model, &cfg.diagnostics);
    ensure_dir(&dir).map_err(|e| e.to_string())?;
    let mut written = Vec::new();
    if cfg.outputs.wants(OutputFormat::Csv) {
        emit(&dir, "diagnostics.csv", &table::diagnostics_csv(&assessment.records, cfg.model.q), &mut written)
            .map_err(|e| e.to_string())?;
        emit(&dir, "bounds.csv", &table::bounds_csv(&assessment.reports), &mut written).map_err(|e| e.to_string())?;
    }
    let extra = json!({
        "config": config_summary(&cfg),
        "inputs": files.iter().map(|f| f.display().to_string()).collect::<Vec<_>>(),
    });
    finish("diagnose", &args.common, &cfg, &dir, started, written, assessment.failures(), extra)
}

fn converge_cmd(args: &ConvergeArgs) -> Result<Outcome, String> {
    let started = (SystemTime::now(), Instant::now());
    let (cfg, dir) = load(&args.common)?;
    let study = run_converge(&cfg, &args.p).map_err(|e: RunError| e.to_string())?;
    let written = write_converge(&study, &cfg, &dir).map_err(|e| e.to_string())?;
    let extra = json!({
        "config": config_summary(&cfg),
        "tail_radius": study.tail_radius,
        "tail_constant": study.tail_constant,
        "trend_slopes": study.trend_slopes,
    });
    finish("converge", &args.common, &cfg, &dir, started, written, converge_gate(&study), extra)
}

fn sweep_cmd(args: &SweepArgs) -> Result<Outcome, String> {
    let started = (SystemTime::now(), Instant::now());
    let (cfg, dir) = load(&args.common)?;
    let plan = SweepPlan {
        alphas: args.alphas.clone(),
        qs: args.qs.clone(),
        relaxed: args.common.relaxed,
        jobs: args.jobs,
        p_values: args.p.clone(),
    };
    let rows = run_sweep(&cfg, &plan, &dir);
    ensure_dir(&dir).map_err(|e| e.to_string())?;
    let mut written = Vec::new();
    emit(&dir, "sweep.csv", &table::sweep_csv(&rows), &mut written).map_err(|e| e.to_string())?;
    let failures: Vec<String> = rows
        .iter()
        .filter(|r| r.status.starts_with("failed") || r.status.starts_with("invalid"))
        .map(|r| format!("alpha = {}, q = {}: {}", r.alpha, r.q, r.status))
        .collect();
    let extra = json!({ "config": config_summary(&cfg), "jobs": args.jobs, "cases": rows.len() });
    finish("sweep", &args.common, &cfg, &dir, started, written, failures, extra)
}

fn kernel_cmd(args: &KernelArgs) -> Result<Outcome, String> {
    let mut failures = Vec::new();
    let csv = if args.norms {
        let mut rows = Vec::new();
        for s in [0.0, 0.5] {
            for deriv in [false, true] {
                let order = KernelOrder::new(args.alpha, s, deriv).map_err(|e| e.to_string())?;
                for p in [1.0, 2.0, f64::INFINITY] {
                    let predicted = order.decay_exponent(p);
                    for &t in &args.times {
                        let norm = kernel_lp_norms(&order, t, &[p]).map_err(|e| e.to_string())?[0];
                        rows.push(KernelNormRow {
                            alpha: args.alpha,
                            s,
                            x_derivative: deriv,
                            p,
                            t,
                            norm,
                            predicted_exponent: predicted,
                        });
                    }
                    if args.gate {
                        let fitted = fit_decay_exponent(args.alpha, s, p, deriv, &args.times).map_err(|e| e.to_string())?;
                        if (fitted - predicted).abs() > 0.01 * predicted.abs().max(1.0) {
                            failures.push(format!("s = {s}, derivative = {deriv}, p = {p}: fitted {fitted}, predicted {predicted}"));
                        }
                    }
                }
            }
        }
        table::kernel_norms_csv(&rows)
    } else if args.table {
        if args.points < 2 {
            return Err("--points must be at least 2".into());
        }
        let mut rows = Vec::with_capacity(args.points);
        for i in 0..args.points {
            let x = -args.x_max + 2.0 * args.x_max * i as f64 / (args.points - 1) as f64;
            let k = kernel_value(args.alpha, args.t, x).map_err(|e| e.to_string())?;
            if args.gate && args.alpha == 1.0 {
                let cauchy = args.t / (std::f64::consts::PI * (x * x + args.t * args.t));
                if (k - cauchy).abs() > 1e-8 {
                    failures.push(format!("x = {x}: {k} vs Cauchy {cauchy}"));
                }
            }
            rows.push((args.t, x, k));
        }
        table::kernel_table_csv(&rows)
    } else {
        return Err("pass --table or --norms".into());
    };
    let dir = args.out.clone().or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from));
    match dir {
        Some(dir) => {
            ensure_dir(&dir).map_err(|e| e.to_string())?;
            let mut written = Vec::new();
            emit(&dir, "kernel.csv", &csv, &mut written).map_err(|e| e.to_string())?;
            eprintln!("wrote {}", written[0].display());
        }
        None => print!("{csv}"),
    }
    if args.gate && !failures.is_empty() {
        Ok(Outcome::GateFailed(failures))
    } else {
        Ok(Outcome::Done)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Kernel(a) => kernel_cmd(a),
        Command::Solve(a) => solve_cmd(a),
        Command::Diagnose(a) => diagnose_cmd(a),
        Command::Converge(a) => converge_cmd(a),
        Command::Sweep(a) => sweep_cmd(a),
    };
    match result {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::GateFailed(failures)) => {
            eprintln!("gate failed ({} check(s)):", failures.len());
            for f in failures.iter().take(20) {
                eprintln!("  {f}");
            }
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
