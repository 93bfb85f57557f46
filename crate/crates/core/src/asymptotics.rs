//! Self-similar rescaling `u_lambda(t, x) = lambda u(lambda^q t, lambda x)`,
//! the scaled distance to the N-wave, and the large-time convergence study.

use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::grid::{lp_norm, Field, GridSpec, ModelParams};
use crate::interp::MonotoneCubic;
use crate::kernel::least_squares_slope;
use crate::nwave::NWave;
use crate::solver::{solve, SolverConfig};

/// `u_lambda` on the grid of half-width `L / lambda` with the same node
/// count, whose nodes map exactly onto the source nodes.
pub fn rescale(u: &Field, lambda: f64, params: &ModelParams) -> Result<Field> {
    check_lambda(lambda)?;
    let g = u.grid();
    let target = GridSpec::new(g.half_width() / lambda, g.len())?;
    let samples: Vec<f64> = u.samples().iter().map(|v| lambda * v).collect();
    Field::new(target, u.time() / libm::pow(lambda, params.q), samples)
}

/// `u_lambda` sampled on an arbitrary `target` grid through monotone cubic
/// interpolation of `u`. Every `lambda y` must fall inside the source nodes.
pub fn rescale_onto(u: &Field, lambda: f64, params: &ModelParams, target: &GridSpec) -> Result<Field> {
    check_lambda(lambda)?;
    let src = u.grid();
    let interp = MonotoneCubic::new(src.nodes().collect(), u.samples().to_vec())?;
    let (lo, hi) = interp.domain();
    let mut samples = Vec::with_capacity(target.len());
    for y in target.nodes() {
        let x = lambda * y;
        if x < lo || x > hi {
            return Err(invalid(
                "lambda",
                alloc::format!("rescaled node {x} falls outside the source domain [{lo}, {hi}]"),
            ));
        }
        samples.push(lambda * interp.eval(x));
    }
    Field::new(*target, u.time() / libm::pow(lambda, params.q), samples)
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda > 0.0 {
        Ok(())
    } else {
        Err(invalid("lambda", alloc::format!("must be positive, got {lambda}")))
    }
}

/// `E_p(t) = t^{(1/q)(1 - 1/p)} ||u(t) - U_M(t)||_p` on the grid of `u`.
pub fn scaled_error(u: &Field, params: &ModelParams, p: f64) -> Result<f64> {
    let t = u.time();
    let w = NWave::new(params.mass, params.q)?;
    let reference = w.field(t, u.grid())?;
    let diff: Vec<f64> = u
        .samples()
        .iter()
        .zip(reference.samples())
        .map(|(a, b)| a - b)
        .collect();
    let inv_p = if p.is_infinite() { 0.0 } else { 1.0 / p };
    let weight = libm::pow(t, (1.0 - inv_p) / params.q);
    Ok(weight * lp_norm(&diff, u.grid().dx(), p))
}

/// Shape of the tail estimate at physical time `t` beyond radius `rho`:
/// `2^alpha t / rho^alpha + 2 t^{1/q} / rho` (the rescaled estimate taken at
/// unit time, `lambda = t^{1/q}`, `R = rho / (2 lambda)`, data compactly
/// supported inside `rho / 2`).
pub fn tail_model(params: &ModelParams, t: f64, rho: f64) -> f64 {
    let a = params.alpha;
    libm::pow(2.0, a) * t / libm::pow(rho, a) + 2.0 * libm::pow(t, 1.0 / params.q) / rho
}

/// Smallest radius at which `c * tail_model(t, rho) <= budget`, by bisection.
pub fn tail_radius(params: &ModelParams, c: f64, t: f64, budget: f64) -> f64 {
    let mut hi = 1.0;
    while c * tail_model(params, t, hi) > budget && hi < 1e300 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if c * tail_model(params, t, mid) > budget {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStudy {
    pub params: ModelParams,
    pub times: Vec<f64>,
    pub p_values: Vec<f64>,
    /// `errors[i][j] = E_{p_j}(t_i)`.
    pub errors: Vec<Vec<f64>>,
    pub tail_radius: f64,
    pub tail_history: Vec<f64>,
    /// `C(M)` of the tail model fitted at the first time.
    pub tail_constant: f64,
    pub mass_drift: Vec<f64>,
    /// Least-squares slope of `log E_p` against `log t`, per `p`.
    pub trend_slopes: Vec<f64>,
}

impl ConvergenceStudy {
    pub fn error_column(&self, p: f64) -> Option<Vec<f64>> {
        let j = self.p_values.iter().position(|&v| v == p)?;
        Some(self.errors.iter().map(|row| row[j]).collect())
    }

    /// `C tail_model(t_i)` for each time.
    pub fn tail_prediction(&self) -> Vec<f64> {
        self.times
            .iter()
            .map(|&t| self.tail_constant * tail_model(&self.params, t, self.tail_radius))
            .collect()
    }
}

/// Relative tail budget.
pub const TAIL_BUDGET: f64 = 1e-3;

/// Runs `u0` to the largest time and tabulates `E_p(t)` for every time.
/// Tail mass is measured beyond `tail_radius` (default `L/2`); exceeding
/// `1e-3 M` aborts with a recommended half-width from the tail model.
pub fn run_convergence_study(
    params: &ModelParams,
    u0: &Field,
    config: &SolverConfig,
    times: &[f64],
    p_values: &[f64],
    tail_radius: Option<f64>,
) -> Result<ConvergenceStudy> {
    if times.is_empty() || times.iter().any(|&t| !(t > 0.0)) {
        return Err(invalid("times", "need at least one positive time"));
    }
    let mut cfg = config.clone();
    cfg.record_times = times.to_vec();
    cfg.end_time = *times.last().expect("non-empty");
    let grid = *u0.grid();
    let r_tail = tail_radius.unwrap_or(0.5 * grid.half_width());
    let snaps = solve(u0, params, &cfg)?;
    study_from_snapshots(params, &snaps, p_values, r_tail)
}

/// The study's bookkeeping on already computed snapshots.
pub fn study_from_snapshots(
    params: &ModelParams,
    snaps: &[Field],
    p_values: &[f64],
    r_tail: f64,
) -> Result<ConvergenceStudy> {
    let m = params.mass;
    let mut errors = Vec::with_capacity(snaps.len());
    let mut tail_history = Vec::with_capacity(snaps.len());
    let mut mass_drift = Vec::with_capacity(snaps.len());
    for s in snaps {
        let row = p_values
            .iter()
            .map(|&p| scaled_error(s, params, p))
            .collect::<Result<Vec<f64>>>()?;
        errors.push(row);
        let g = s.grid();
        let tail: f64 = s
            .samples()
            .iter()
            .enumerate()
            .filter(|(i, _)| g.x(*i).abs() > r_tail)
            .map(|(_, v)| v * g.dx())
            .sum();
        tail_history.push(tail);
        mass_drift.push((s.mass() - m).abs() / m);
    }
    let times: Vec<f64> = snaps.iter().map(|s| s.time()).collect();
    let tail_constant = tail_history[0] / tail_model(params, times[0], r_tail);
    for (i, &tail) in tail_history.iter().enumerate() {
        if tail > TAIL_BUDGET * m {
            let last = *times.last().expect("non-empty");
            let c = tail_constant.max(tail / tail_model(params, times[i], r_tail));
            let rho = tail_radius(params, c, last, TAIL_BUDGET * m);
            return Err(Error::TailBudget {
                time: times[i],
                tail_mass: tail,
                budget: TAIL_BUDGET * m,
                recommended_half_width: 2.0 * rho,
            });
        }
    }
    let trend_slopes = if times.len() >= 2 {
        (0..p_values.len())
            .map(|j| {
                let pts: Vec<(f64, f64)> = times
                    .iter()
                    .zip(&errors)
                    .map(|(t, row)| (libm::log(*t), libm::log(row[j])))
                    .collect();
                least_squares_slope(&pts).unwrap_or(f64::NAN)
            })
            .collect()
    } else {
        alloc::vec![f64::NAN; p_values.len()]
    };
    Ok(ConvergenceStudy {
        params: *params,
        times,
        p_values: p_values.to_vec(),
        errors,
        tail_radius: r_tail,
        tail_history,
        tail_constant,
        mass_drift,
        trend_slopes,
    })
}
