//! CSV emission. Every table has a one-line header; column orders are frozen
//! here and nowhere else. Numbers use 17 significant digits.

use fracconv_core::asymptotics::ConvergenceStudy;
use fracconv_core::diagnostics::{BoundsReport, DiagnosticsRecord};

pub const DIAGNOSTICS_COLUMNS: [&str; 14] = [
    "time",
    "dx",
    "mass",
    "min",
    "l1",
    "l2",
    "lq",
    "l2q",
    "linf",
    "oleinik_product",
    "max_slope",
    "w11_local",
    "energy_density",
    "tail_mass",
];

pub const BOUNDS_COLUMNS: [&str; 5] = ["time", "check", "observed", "allowed", "passed"];

pub const KERNEL_TABLE_COLUMNS: [&str; 3] = ["t", "x", "kernel"];

pub const KERNEL_NORM_COLUMNS: [&str; 7] = ["alpha", "s", "x_derivative", "p", "t", "norm", "predicted_exponent"];

pub const SWEEP_COLUMNS: [&str; 8] = ["alpha", "q", "regime", "status", "e1_first", "e1_last", "e1_ratio", "max_tail_mass"];

/// Full-precision number: 17 significant digits, `inf`/`nan` spelled out.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// Exponent label: `1`, `1.2`, `inf`.
pub fn p_label(p: f64) -> String {
    if p.is_infinite() {
        "inf".into()
    } else {
        format!("{p}")
    }
}

fn header(out: &mut String, cols: &[&str]) {
    out.push_str(&cols.join(","));
    out.push('\n');
}

fn row(out: &mut String, cells: impl IntoIterator<Item = String>) {
    let cells: Vec<String> = cells.into_iter().collect();
    out.push_str(&cells.join(","));
    out.push('\n');
}

pub fn diagnostics_csv(records: &[DiagnosticsRecord], q: f64) -> String {
    let mut out = String::new();
    header(&mut out, &DIAGNOSTICS_COLUMNS);
    for r in records {
        let lp = |p: f64| r.lp_norm(p).unwrap_or(f64::NAN);
        row(
            &mut out,
            [
                r.time,
                r.dx,
                r.mass,
                r.min_value,
                lp(1.0),
                lp(2.0),
                lp(q),
                lp(2.0 * q),
                r.sup_norm(),
                r.oleinik_product,
                r.max_slope,
                r.w11_local,
                r.energy_density,
                r.tail_mass,
            ]
            .map(num),
        );
    }
    out
}

pub fn bounds_csv(reports: &[BoundsReport]) -> String {
    let mut out = String::new();
    header(&mut out, &BOUNDS_COLUMNS);
    for rep in reports {
        for c in &rep.checks {
            row(
                &mut out,
                [num(rep.time), c.name.clone(), num(c.observed), num(c.allowed), c.passed.to_string()],
            );
        }
    }
    out
}

/// Columns: `time`, one `E_<p>` per study exponent, `tail_mass`,
/// `tail_prediction`, `mass_drift`.
pub fn convergence_columns(study: &ConvergenceStudy) -> Vec<String> {
    let mut cols = vec!["time".to_string()];
    cols.extend(study.p_values.iter().map(|&p| format!("E_{}", p_label(p))));
    cols.extend(["tail_mass", "tail_prediction", "mass_drift"].map(String::from));
    cols
}

pub fn convergence_csv(study: &ConvergenceStudy) -> String {
    let mut out = String::new();
    let cols = convergence_columns(study);
    header(&mut out, &cols.iter().map(String::as_str).collect::<Vec<_>>());
    let pred = study.tail_prediction();
    for (i, &t) in study.times.iter().enumerate() {
        let mut cells = vec![num(t)];
        cells.extend(study.errors[i].iter().map(|&e| num(e)));
        cells.extend([num(study.tail_history[i]), num(pred[i]), num(study.mass_drift[i])]);
        row(&mut out, cells);
    }
    out
}

pub fn kernel_table_csv(rows: &[(f64, f64, f64)]) -> String {
    let mut out = String::new();
    header(&mut out, &KERNEL_TABLE_COLUMNS);
    for &(t, x, k) in rows {
        row(&mut out, [num(t), num(x), num(k)]);
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelNormRow {
    pub alpha: f64,
    pub s: f64,
    pub x_derivative: bool,
    pub p: f64,
    pub t: f64,
    pub norm: f64,
    pub predicted_exponent: f64,
}

pub fn kernel_norms_csv(rows: &[KernelNormRow]) -> String {
    let mut out = String::new();
    header(&mut out, &KERNEL_NORM_COLUMNS);
    for r in rows {
        row(
            &mut out,
            [
                num(r.alpha),
                num(r.s),
                r.x_derivative.to_string(),
                p_label(r.p),
                num(r.t),
                num(r.norm),
                num(r.predicted_exponent),
            ],
        );
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub alpha: f64,
    pub q: f64,
    pub regime: &'static str,
    pub status: String,
    pub e1_first: f64,
    pub e1_last: f64,
    pub max_tail_mass: f64,
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::new();
    header(&mut out, &SWEEP_COLUMNS);
    for r in rows {
        // statuses are free text; keep the CSV unambiguous
        let status = r.status.replace([',', '\n'], ";");
        row(
            &mut out,
            [
                num(r.alpha),
                num(r.q),
                r.regime.to_string(),
                status,
                num(r.e1_first),
                num(r.e1_last),
                num(r.e1_last / r.e1_first),
                num(r.max_tail_mass),
            ],
        );
    }
    out
}
