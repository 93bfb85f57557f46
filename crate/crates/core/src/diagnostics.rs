//! Per-snapshot functionals (mass, `L^p` norms, one-sided slopes, energy,
//! tail mass) and the a priori bounds they must satisfy.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::grid::{lp_norm, to_spectral, Field, ModelParams};
use crate::operators::flux;

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsRecord {
    pub time: f64,
    pub dx: f64,
    pub mass: f64,
    /// `(p, ||u||_p)` for `p` in `1, 2, q, 2q, inf` (duplicates dropped).
    pub lp_norms: Vec<(f64, f64)>,
    /// `t max_i D+(u_+^{q-1})_i`, clamped below at 0.
    pub oleinik_product: f64,
    /// `max_i D+ u_i`.
    pub max_slope: f64,
    /// `sum_{|x_i| <= R_local} |D+ u_i| dx`.
    pub w11_local: f64,
    /// Discrete `int |(-Delta)^{alpha/4} u|^2 = 2L sum_k |xi_k|^alpha |u_k|^2`.
    pub energy_density: f64,
    /// `sum_{|x_i| > R_tail} u_i dx`.
    pub tail_mass: f64,
    pub min_value: f64,
}

impl DiagnosticsRecord {
    pub fn lp_norm(&self, p: f64) -> Option<f64> {
        self.lp_norms.iter().find(|(q, _)| *q == p).map(|(_, v)| *v)
    }

    pub fn sup_norm(&self) -> f64 {
        self.lp_norm(f64::INFINITY).expect("records always carry the sup norm")
    }
}

/// Exponents tracked for `q`: `1, 2, q, 2q, inf`.
pub fn tracked_exponents(q: f64) -> Vec<f64> {
    let mut ps: Vec<f64> = Vec::new();
    for p in [1.0, 2.0, q, 2.0 * q, f64::INFINITY] {
        if !ps.contains(&p) {
            ps.push(p);
        }
    }
    ps
}

pub fn diagnose(u: &Field, params: &ModelParams, r_local: f64, r_tail: f64) -> DiagnosticsRecord {
    let g = u.grid();
    let dx = g.dx();
    let s = u.samples();
    let n = s.len();
    let q = params.q;
    let lp_norms = tracked_exponents(q)
        .into_iter()
        .map(|p| (p, lp_norm(s, dx, p)))
        .collect();

    let z = |v: f64| if v > 0.0 { libm::pow(v, q - 1.0) } else { 0.0 };
    let mut oleinik: f64 = 0.0;
    let mut max_slope = f64::NEG_INFINITY;
    let mut w11 = 0.0;
    let mut tail = 0.0;
    let mut z_here = z(s[0]);
    for i in 0..n {
        let j = (i + 1) % n;
        let z_next = z(s[j]);
        oleinik = oleinik.max((z_next - z_here) / dx);
        z_here = z_next;
        let slope = (s[j] - s[i]) / dx;
        max_slope = max_slope.max(slope);
        let x = g.x(i);
        if x.abs() <= r_local {
            w11 += slope.abs() * dx;
        }
        if x.abs() > r_tail {
            tail += s[i] * dx;
        }
    }

    let spec = to_spectral(u);
    let energy = 2.0
        * g.half_width()
        * spec
            .coefficients()
            .iter()
            .enumerate()
            .map(|(slot, c)| libm::pow(g.wavenumber(slot).abs(), params.alpha) * c.norm_sqr())
            .sum::<f64>();

    DiagnosticsRecord {
        time: u.time(),
        dx,
        mass: u.mass(),
        lp_norms,
        oleinik_product: u.time() * oleinik,
        max_slope,
        w11_local: w11,
        energy_density: energy,
        tail_mass: tail,
        min_value: u.min(),
    }
}

/// Upper bound on `||u(t)||_p` for nonnegative solutions of mass `M`:
/// `(q/(q-1))^{(p-1)/(pq)} M^{(p-1)/(pq) + 1/p} t^{-(1/q)(1 - 1/p)}`;
/// at `p = inf` this is the pointwise bound `(qM/(q-1))^{1/q} t^{-1/q}`.
pub fn lp_bound(params: &ModelParams, t: f64, p: f64) -> f64 {
    let q = params.q;
    let m = params.mass;
    let inv_p = if p.is_infinite() { 0.0 } else { 1.0 / p };
    let e = (1.0 - inv_p) / q;
    libm::pow(q / (q - 1.0), e) * libm::pow(m, e + inv_p) * libm::pow(t, -e)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundCheck {
    pub name: String,
    pub observed: f64,
    pub allowed: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BoundsReport {
    pub time: f64,
    pub checks: Vec<BoundCheck>,
}

impl BoundsReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &BoundCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }

    fn push(&mut self, name: String, observed: f64, allowed: f64) {
        self.checks.push(BoundCheck {
            passed: observed <= allowed,
            name,
            observed,
            allowed,
        });
    }
}

/// Allowance per `dx / t` granted to the discrete Oleinik product.
pub const OLEINIK_DX_ALLOWANCE: f64 = 2.0;
pub const MASS_DRIFT_TOL: f64 = 1e-8;

/// Checks mass drift, the sup bound, every finite `L^p` bound, the Oleinik
/// product (`<= 1 + slack + 2 dx/t`) and the lower bound
/// `min >= -slack ||u||_inf`. Time-weighted checks are skipped at `t = 0`.
pub fn assert_bounds(record: &DiagnosticsRecord, params: &ModelParams, slack: f64) -> BoundsReport {
    let mut report = BoundsReport {
        time: record.time,
        checks: Vec::new(),
    };
    let m = params.mass;
    report.push("mass_drift".into(), (record.mass - m).abs() / m, MASS_DRIFT_TOL);
    let t = record.time;
    if t > 0.0 {
        for &(p, v) in &record.lp_norms {
            let name = if p.is_infinite() {
                String::from("linf")
            } else {
                alloc::format!("l{p}")
            };
            report.push(name, v, (1.0 + slack) * lp_bound(params, t, p));
        }
        report.push(
            "oleinik".into(),
            record.oleinik_product,
            1.0 + slack + OLEINIK_DX_ALLOWANCE * record.dx / t,
        );
    }
    let sup = record.sup_norm();
    report.push("min".into(), -record.min_value, slack * sup);
    report
}

/// Space-time box carrying the smooth bump
/// `phi(t, x) = b((t - t_c)/tau) b((x - x_c)/w)`, `b(s) = exp(-1/(1 - s^2))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump {
    pub t_center: f64,
    pub t_radius: f64,
    pub x_center: f64,
    pub x_radius: f64,
}

fn bump_1d(s: f64) -> (f64, f64) {
    if s.abs() >= 1.0 {
        return (0.0, 0.0);
    }
    let d = 1.0 - s * s;
    let v = libm::exp(-1.0 / d);
    (v, v * (-2.0 * s / (d * d)))
}

/// Entropy pairing for `u_t + f(u)_x = 0`:
///
/// ```text
/// int int |u - k| phi_t + sgn(u - k) (f(u) - f(k)) phi_x dx dt,
/// ```
///
/// nonnegative for entropy solutions. Time quadrature is the trapezoid rule
/// over the snapshot times, space the rectangle rule on the grid.
pub fn kruzhkov_residual(snapshots: &[Field], q: f64, k: f64, bump: &Bump) -> Result<f64> {
    if snapshots.len() < 2 {
        return Err(invalid("snapshots", "need at least two snapshots"));
    }
    let t_lo = bump.t_center - bump.t_radius;
    let t_hi = bump.t_center + bump.t_radius;
    let first = snapshots[0].time();
    let last = snapshots[snapshots.len() - 1].time();
    if !(bump.t_radius > 0.0 && bump.x_radius > 0.0) {
        return Err(invalid("bump", "radii must be positive"));
    }
    if t_lo < first || t_hi > last {
        return Err(invalid(
            "bump",
            alloc::format!("temporal support [{t_lo}, {t_hi}] exceeds snapshot window [{first}, {last}]"),
        ));
    }
    let g = *snapshots[0].grid();
    if (bump.x_center - bump.x_radius) < -g.half_width() || (bump.x_center + bump.x_radius) > g.half_width() {
        return Err(invalid("bump", "spatial support exceeds the domain"));
    }
    if snapshots.windows(2).any(|w| !(w[1].time() > w[0].time())) {
        return Err(invalid("snapshots", "times must increase"));
    }
    let fk = flux(k, q);
    let mut values = Vec::with_capacity(snapshots.len());
    for snap in snapshots {
        g.ensure_same(snap.grid())?;
        let (bt, dbt) = bump_1d((snap.time() - bump.t_center) / bump.t_radius);
        let mut acc = 0.0;
        if bt != 0.0 || dbt != 0.0 {
            for (i, &u) in snap.samples().iter().enumerate() {
                let (bx, dbx) = bump_1d((g.x(i) - bump.x_center) / bump.x_radius);
                if bx == 0.0 && dbx == 0.0 {
                    continue;
                }
                let phi_t = dbt / bump.t_radius * bx;
                let phi_x = bt * dbx / bump.x_radius;
                let sgn = if u > k {
                    1.0
                } else if u < k {
                    -1.0
                } else {
                    0.0
                };
                acc += (u - k).abs() * phi_t + sgn * (flux(u, q) - fk) * phi_x;
            }
        }
        values.push(acc * g.dx());
    }
    let mut total = 0.0;
    for (w, v) in snapshots.windows(2).zip(values.windows(2)) {
        total += 0.5 * (w[1].time() - w[0].time()) * (v[0] + v[1]);
    }
    Ok(total)
}
