use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_fracconv");

const SMALL: &str = r#"
[model]
alpha = 1.5
q = 1.2
mass = 1

[grid]
half_width = 256
points = 2048

[solver]
delta = 2e-2
end_time = 4
record_times = [1, 2, 4]

[initial]
kind = "box"
half_width = 1
"#;

fn run(args: &[&str], env_out: Option<&Path>) -> Output {
    let mut cmd = Command::new(BIN);
    cmd.args(args).env_remove("FRACCONV_OUT");
    if let Some(dir) = env_out {
        cmd.env("FRACCONV_OUT", dir);
    }
    cmd.output().expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("c.toml");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let j = header.iter().position(|h| *h == name).unwrap_or_else(|| panic!("no column {name} in {header:?}"));
    lines.map(|l| l.split(',').nth(j).unwrap().parse().unwrap()).collect()
}

#[test]
fn kernel_table_matches_cauchy() {
    let out = run(&["kernel", "--alpha", "1", "--table", "--gate", "--points", "81"], None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.starts_with("t,x,kernel\n"));
    let xs = column(&csv, "x");
    let ks = column(&csv, "kernel");
    assert_eq!(xs.len(), 81);
    for (x, k) in xs.iter().zip(&ks) {
        let cauchy = 1.0 / (std::f64::consts::PI * (x * x + 1.0));
        assert!((k - cauchy).abs() <= 1e-8, "x = {x}: {k} vs {cauchy}");
    }
}

#[test]
fn kernel_norms_gate() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &["kernel", "--alpha", "1.5", "--norms", "--times", "1,2", "--gate", "--out", dir.path().to_str().unwrap()],
        None,
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("kernel.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 * 2 * 3 * 2);
}

#[test]
fn solve_gate_outputs_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for target in [&a, &b] {
        let out = run(&["solve", "--config", &cfg, "--gate", "--out", target.to_str().unwrap()], None);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for name in ["diagnostics.csv", "bounds.csv", "snapshot_000.txt", "snapshot_002.txt"] {
        let x = std::fs::read(a.join(name)).unwrap();
        let y = std::fs::read(b.join(name)).unwrap();
        assert_eq!(x, y, "{name} differs between identical runs");
    }
    let manifest: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(a.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "solve");
    assert_eq!(manifest["gate"]["passed"], true);
    let diag = std::fs::read_to_string(a.join("diagnostics.csv")).unwrap();
    assert_eq!(column(&diag, "time"), vec![1.0, 2.0, 4.0]);
    for m in column(&diag, "mass") {
        assert!((m - 1.0).abs() < 1e-10);
    }

    // re-diagnosing the stored snapshots reproduces the table
    let c = dir.path().join("c");
    let out = run(&["diagnose", "--config", &cfg, "--gate", "--out", c.to_str().unwrap(), a.to_str().unwrap()], None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(std::fs::read_to_string(c.join("diagnostics.csv")).unwrap(), diag);
}

#[test]
fn gate_failure_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let snaps = dir.path().join("s");
    let out = run(&["solve", "--config", &cfg, "--out", snaps.to_str().unwrap()], None);
    assert!(out.status.success());

    // the stored snapshots carry mass 1; declaring mass 2 breaks conservation
    let wrong = dir.path().join("wrong");
    std::fs::create_dir(&wrong).unwrap();
    let cfg2 = write_config(&wrong, &SMALL.replace("mass = 1", "mass = 2"));
    let args = ["diagnose", "--config", &cfg2, "--out", wrong.to_str().unwrap(), snaps.to_str().unwrap()];
    let ungated = run(&args, None);
    assert!(ungated.status.success(), "without --gate failures are only reported");
    let bounds = std::fs::read_to_string(wrong.join("bounds.csv")).unwrap();
    assert!(bounds.lines().any(|l| l.contains(",mass_drift,") && l.ends_with(",false")), "{bounds}");

    let mut gated_args = args.to_vec();
    gated_args.push("--gate");
    let gated = run(&gated_args, None);
    assert_eq!(gated.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&gated.stderr).contains("mass_drift"));
}

#[test]
fn converge_e1_decreasing() {
    let dir = tempfile::tempdir().unwrap();
    // dx = 1/16: coarser grids smear the steep N-wave front enough to stall E_1
    let text = SMALL.replace("points = 2048", "points = 8192").replace("delta = 2e-2", "delta = 1e-2");
    let cfg = write_config(dir.path(), &text);
    let out_dir = dir.path().join("conv");
    let out = run(&["converge", "--config", &cfg, "--gate", "--out", out_dir.to_str().unwrap()], None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(out_dir.join("convergence.csv")).unwrap();
    assert!(csv.starts_with("time,E_1,E_2,tail_mass,tail_prediction,mass_drift\n"));
    let e1 = column(&csv, "E_1");
    assert_eq!(e1.len(), 3);
    assert!(e1.windows(2).all(|w| w[1] < w[0]), "{e1:?}");
}

#[test]
fn config_errors_are_located() {
    let dir = tempfile::tempdir().unwrap();
    let bad = SMALL.replace("q = 1.2", "q = 1.6").replace("record_times = [1, 2, 4]", "record_times = [1, 150]");
    let cfg = write_config(dir.path(), &bad);
    let out = run(&["solve", "--config", &cfg], Some(dir.path()));
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("4:5: subcritical requires q < alpha"), "{err}");
    assert!(err.contains("beyond the horizon"), "{err}");
}

#[test]
fn relaxed_flag_and_env_output() {
    let dir = tempfile::tempdir().unwrap();
    let text = SMALL
        .replace("q = 1.2", "q = 1.8")
        .replace("record_times = [1, 2, 4]", "record_times = [1]")
        .replace("end_time = 4", "end_time = 1");
    let cfg = write_config(dir.path(), &text);
    let env_dir = dir.path().join("from-env");
    let out = run(&["solve", "--config", &cfg, "--relaxed"], Some(&env_dir));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(env_dir.join("diagnostics.csv").exists());
}

#[test]
fn sweep_writes_summary() {
    let dir = tempfile::tempdir().unwrap();
    let text = SMALL.replace("record_times = [1, 2, 4]", "record_times = [1, 2]").replace("end_time = 4", "end_time = 2");
    let cfg = write_config(dir.path(), &text);
    let out_dir = dir.path().join("sw");
    let out = run(
        &["sweep", "--config", &cfg, "--alphas", "1.5,1.9", "--qs", "1.2", "--jobs", "2", "--gate", "--out", out_dir.to_str().unwrap()],
        None,
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(out_dir.join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert_eq!(column(&csv, "alpha"), vec![1.5, 1.9]);
}
