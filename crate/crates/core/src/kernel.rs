//! The alpha-stable heat kernel `K_t(x)`, its self-similar profile
//! `F(r) = K_1(r)`, and fractional derivatives `|D|^s K_t`, `|D|^s d_x K_t`.
//!
//! Every value is a one-sided Fourier integral
//!
//! ```text
//! |D|^s K_t(x)     =  (1/pi) int_0^inf cos(x xi) e^{-t xi^alpha} xi^s     d xi
//! |D|^s d_x K_t(x) = -(1/pi) int_0^inf sin(x xi) e^{-t xi^alpha} xi^{s+1} d xi
//! ```
//!
//! evaluated by Gauss-Kronrod quadrature on the half-periods of the
//! trigonometric factor, truncated where the envelope drops below `1e-17`.
//! Large arguments use the algebraic tail expansion obtained from the
//! non-smooth powers `xi^{s + k alpha}` of the symbol at the origin.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{invalid, Error, Result};
use crate::grid::{Field, GridSpec};
use crate::interp::MonotoneCubic;
use crate::quad::{integrate_adaptive, GaussLegendre};
use crate::special::gamma;

const PANEL_REL_TOL: f64 = 1e-13;
const ENVELOPE_CUTOFF_LOG: f64 = 39.0; // e^{-39} ~ 1e-17

/// Which member of the kernel family to evaluate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelOrder {
    pub alpha: f64,
    /// Order `s >= 0` of `|D|^s`.
    pub s: f64,
    /// Apply `d/dx` as well.
    pub x_derivative: bool,
}

impl KernelOrder {
    pub fn new(alpha: f64, s: f64, x_derivative: bool) -> Result<Self> {
        check_alpha(alpha)?;
        if !(s.is_finite() && s >= 0.0) {
            return Err(invalid("s", alloc::format!("must be >= 0, got {s}")));
        }
        let total = s + if x_derivative { 1.0 } else { 0.0 };
        if total >= alpha + 1.0 {
            return Err(invalid(
                "s",
                alloc::format!("derivative order {total} must stay below alpha + 1 = {}", alpha + 1.0),
            ));
        }
        Ok(Self {
            alpha,
            s,
            x_derivative,
        })
    }

    pub fn profile(alpha: f64) -> Result<Self> {
        Self::new(alpha, 0.0, false)
    }

    // power of xi in the integrand
    fn power(&self) -> f64 {
        self.s + if self.x_derivative { 1.0 } else { 0.0 }
    }

    /// Exponent of `t` in `||.||_p`: `-(1/alpha)(1 - 1/p) - (s + [d_x])/alpha`.
    pub fn decay_exponent(&self, p: f64) -> f64 {
        let inv_p = if p.is_infinite() { 0.0 } else { 1.0 / p };
        -(1.0 - inv_p) / self.alpha - self.power() / self.alpha
    }

    /// Coefficients `c_k` and exponents `e_k` of the large-`x` expansion of
    /// the `t = 1` function, `sum_k c_k x^{-e_k}`, for `x > 0`.
    pub fn tail_expansion(&self, terms: usize) -> Vec<(f64, f64)> {
        let m = self.power();
        let mut out = Vec::with_capacity(terms);
        let mut factorial = 1.0;
        for k in 0..terms {
            if k > 0 {
                factorial *= k as f64;
            }
            let gamma_exp = m + k as f64 * self.alpha;
            let trig = if self.x_derivative {
                libm::cos(0.5 * PI * gamma_exp)
            } else {
                libm::sin(0.5 * PI * gamma_exp)
            };
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let c = -sign * gamma(1.0 + gamma_exp) * trig / (PI * factorial);
            out.push((if c.abs() < 1e-15 * gamma(1.0 + gamma_exp) { 0.0 } else { c }, 1.0 + gamma_exp));
        }
        out
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha > 0.0 && alpha < 2.0 {
        Ok(())
    } else {
        Err(invalid("alpha", alloc::format!("kernel needs alpha in (0, 2), got {alpha}")))
    }
}

// cutoff where e^{-t xi^alpha} xi^m falls below e^{-39} of its scale
fn frequency_cutoff(alpha: f64, m: f64, t: f64) -> f64 {
    // work in eta = t^{1/alpha} xi
    let mut eta = libm::pow(ENVELOPE_CUTOFF_LOG, 1.0 / alpha);
    for _ in 0..50 {
        let next = libm::pow(ENVELOPE_CUTOFF_LOG + m * libm::log(eta.max(1.0)), 1.0 / alpha);
        if (next - eta).abs() < 1e-12 * eta {
            eta = next;
            break;
        }
        eta = next;
    }
    eta / libm::pow(t, 1.0 / alpha)
}

/// `|D|^s K_t(x)` or `|D|^s d_x K_t(x)` by direct oscillatory quadrature.
pub fn kernel_family_value(order: &KernelOrder, t: f64, x: f64) -> Result<f64> {
    if !(t.is_finite() && t > 0.0) {
        return Err(invalid("t", alloc::format!("must be positive, got {t}")));
    }
    let odd = order.x_derivative;
    let (xa, sign) = if x < 0.0 { (-x, if odd { -1.0 } else { 1.0 }) } else { (x, 1.0) };
    if odd && xa == 0.0 {
        return Ok(0.0);
    }
    let alpha = order.alpha;
    let m = order.power();
    let cutoff = frequency_cutoff(alpha, m, t);
    let envelope = move |xi: f64| {
        if xi <= 0.0 {
            return if m == 0.0 { 1.0 } else { 0.0 };
        }
        let l = libm::log(xi);
        libm::exp(-t * libm::exp(alpha * l) + m * l)
    };
    let integrand = move |xi: f64| {
        let trig = if odd { -libm::sin(xa * xi) } else { libm::cos(xa * xi) };
        envelope(xi) * trig
    };

    // int_0^inf e^{-t xi^alpha} xi^m
    let scale = gamma((m + 1.0) / alpha) / (alpha * libm::pow(t, (m + 1.0) / alpha));
    let abs_tol = 1e-15 * scale;
    let half_period = if xa > 0.0 { PI / xa } else { f64::INFINITY };
    let mut total = 0.0;
    if xa * cutoff <= 4.0 * PI {
        // few oscillations: one adaptive pass, with a break away from the cusp at 0
        let brk = (0.5 * cutoff).min(1.0);
        for (a, b) in [(0.0, brk), (brk, cutoff)] {
            total += integrate_adaptive(integrand, a, b, abs_tol, PANEL_REL_TOL, 2000)?.value;
        }
    } else {
        // integrate between consecutive zeros of the trigonometric factor
        let first_zero = if odd { half_period } else { 0.5 * half_period };
        let mut a = 0.0;
        let mut b = first_zero;
        loop {
            let end = b.min(cutoff);
            let panel = integrate_adaptive(integrand, a, end, abs_tol, PANEL_REL_TOL, 2000)?;
            total += panel.value;
            if end >= cutoff {
                break;
            }
            a = end;
            b = end + half_period;
        }
    }
    Ok(sign * total / PI)
}

/// `F_alpha(r) = (1/pi) int_0^inf cos(r xi) e^{-xi^alpha} d xi`.
pub fn profile_value(alpha: f64, r: f64) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(invalid("r", alloc::format!("must be >= 0, got {r}")));
    }
    kernel_family_value(&KernelOrder::profile(alpha)?, 1.0, r)
}

/// `K_t(x) = t^{-1/alpha} F(|x| t^{-1/alpha})`.
pub fn kernel_value(alpha: f64, t: f64, x: f64) -> Result<f64> {
    if !(t.is_finite() && t > 0.0) {
        return Err(invalid("t", alloc::format!("must be positive, got {t}")));
    }
    let scale = libm::pow(t, -1.0 / alpha);
    Ok(scale * profile_value(alpha, x.abs() * scale)?)
}

/// `F(0) = Gamma(1 + 1/alpha) / pi`.
pub fn profile_at_origin(alpha: f64) -> f64 {
    gamma(1.0 + 1.0 / alpha) / PI
}

/// Leading tail constant `c` in `F(r) ~ c r^{-(1+alpha)}`.
pub fn tail_constant_exact(alpha: f64) -> f64 {
    gamma(1.0 + alpha) * libm::sin(0.5 * PI * alpha) / PI
}

/// Large-argument value from the tail expansion, with the magnitude of the
/// first omitted term. `None` when the expansion has not settled at `x`.
pub fn tail_value(order: &KernelOrder, t: f64, x: f64) -> Option<(f64, f64)> {
    let scale = libm::pow(t, -1.0 / order.alpha);
    let y = x.abs() * scale;
    let prefactor = libm::pow(t, -(1.0 + order.power()) / order.alpha);
    let terms: Vec<f64> = order
        .tail_expansion(24)
        .into_iter()
        .filter(|(c, _)| *c != 0.0)
        .map(|(c, e)| c * libm::pow(y, -e))
        .collect();
    let leading = terms.first()?.abs();
    // asymptotic, not convergent: stop at the first negligible term
    let stop = terms.iter().position(|term| term.abs() < 1e-16 * leading)?;
    let sum: f64 = terms[..stop].iter().sum();
    let sign = if order.x_derivative && x < 0.0 { -1.0 } else { 1.0 };
    Some((sign * prefactor * sum, prefactor * terms[stop].abs()))
}

/// Samples of `|D|^s K_t` (or `|D|^s d_x K_t`) at the nodes of `grid`.
pub fn kernel_deriv_samples(alpha: f64, s: f64, t: f64, grid: &GridSpec, with_x_derivative: bool) -> Result<Field> {
    let order = KernelOrder::new(alpha, s, with_x_derivative)?;
    let samples = grid
        .nodes()
        .map(|x| kernel_family_value(&order, t, x))
        .collect::<Result<Vec<_>>>()?;
    Field::new(*grid, t, samples)
}

// panel edges in units of t^{1/alpha}
const NORM_EDGES: [f64; 17] = [
    0.0, 0.125, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0, 24.0, 32.0, 64.0,
];

/// Discrete-free `L^p(R)` norms of one kernel-family member at time `t`, for
/// several exponents at once. The line is integrated panel by panel out to
/// `64 t^{1/alpha}`, splitting panels at sign changes, and the remainder is
/// integrated from the tail expansion.
pub fn kernel_lp_norms(order: &KernelOrder, t: f64, ps: &[f64]) -> Result<Vec<f64>> {
    if !(t.is_finite() && t > 0.0) {
        return Err(invalid("t", alloc::format!("must be positive, got {t}")));
    }
    for &p in ps {
        if !(p >= 1.0) {
            return Err(invalid("p", alloc::format!("must be >= 1, got {p}")));
        }
    }
    let ell = libm::pow(t, 1.0 / order.alpha);
    let g = |x: f64| kernel_family_value(order, t, x);
    let x_max = ell * NORM_EDGES[NORM_EDGES.len() - 1];

    // probe the tail expansion before doing any work
    let (_, tail_err) = tail_value(order, t, x_max).ok_or_else(|| {
        Error::DomainTooNarrow(alloc::format!(
            "tail expansion has not settled at x = {x_max:.3e}"
        ))
    })?;
    let tail_here = g(x_max)?;
    if tail_err > 1e-9 * tail_here.abs().max(1e-300) {
        return Err(Error::DomainTooNarrow(alloc::format!(
            "tail expansion error {tail_err:.2e} too large at x = {x_max:.3e}"
        )));
    }

    // split points where g changes sign
    let mut breaks: Vec<f64> = Vec::new();
    const PROBES: usize = 16;
    for w in NORM_EDGES.windows(2) {
        let (a, b) = (w[0] * ell, w[1] * ell);
        breaks.push(a);
        let mut prev_x = a;
        let mut prev = g(a)?;
        for j in 1..=PROBES {
            let x = a + (b - a) * j as f64 / PROBES as f64;
            let v = g(x)?;
            if prev != 0.0 && v != 0.0 && prev.signum() != v.signum() {
                breaks.push(find_root(&g, prev_x, x, prev, v)?);
            }
            prev_x = x;
            prev = v;
        }
    }
    breaks.push(x_max);

    let mut out = Vec::with_capacity(ps.len());
    for &p in ps {
        let half_line = if p.is_infinite() {
            sup_abs(&g, &breaks)?
        } else {
            let mut body = 0.0;
            for w in breaks.windows(2) {
                let mut err = None;
                let piece = integrate_adaptive(
                    |x| match g(x) {
                        Ok(v) => libm::pow(v.abs(), p),
                        Err(e) => {
                            err.get_or_insert(e);
                            0.0
                        }
                    },
                    w[0],
                    w[1],
                    0.0,
                    1e-10,
                    400,
                )?;
                if let Some(e) = err {
                    return Err(e);
                }
                body += piece.value;
            }
            body + tail_integral(order, t, x_max, p)?
        };
        out.push(if p.is_infinite() {
            half_line
        } else {
            libm::pow(2.0 * half_line, 1.0 / p)
        });
    }
    Ok(out)
}

/// `|| |D|^s (d_x) K_t ||_{L^p(R)}`.
pub fn kernel_lp_norm(alpha: f64, s: f64, p: f64, t: f64, with_x_derivative: bool) -> Result<f64> {
    let order = KernelOrder::new(alpha, s, with_x_derivative)?;
    Ok(kernel_lp_norms(&order, t, &[p])?[0])
}

fn find_root(g: &impl Fn(f64) -> Result<f64>, mut a: f64, mut b: f64, mut fa: f64, mut fb: f64) -> Result<f64> {
    // Illinois variant of regula falsi
    let mut side = 0;
    for _ in 0..100 {
        let c = (a * fb - b * fa) / (fb - fa);
        if (b - a).abs() < 1e-14 * b.abs().max(1.0) {
            return Ok(c);
        }
        let fc = g(c)?;
        if fc == 0.0 {
            return Ok(c);
        }
        if fc.signum() == fb.signum() {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
    }
    Ok(0.5 * (a + b))
}

fn sup_abs(g: &impl Fn(f64) -> Result<f64>, breaks: &[f64]) -> Result<f64> {
    let mut xs: Vec<f64> = Vec::new();
    for w in breaks.windows(2) {
        for j in 0..32 {
            xs.push(w[0] + (w[1] - w[0]) * j as f64 / 32.0);
        }
    }
    xs.push(breaks[breaks.len() - 1]);
    let mut best = 0.0;
    let mut at = 0;
    for (i, &x) in xs.iter().enumerate() {
        let v = g(x)?.abs();
        if v > best {
            best = v;
            at = i;
        }
    }
    // golden-section refinement between the neighbouring probes
    let mut lo = xs[at.saturating_sub(1)];
    let mut hi = xs[(at + 1).min(xs.len() - 1)];
    let phi = 0.5 * (libm::sqrt(5.0) - 1.0);
    let mut c = hi - phi * (hi - lo);
    let mut d = lo + phi * (hi - lo);
    let mut fc = g(c)?.abs();
    let mut fd = g(d)?.abs();
    for _ in 0..80 {
        if hi - lo < 1e-12 * hi.abs().max(1e-300) {
            break;
        }
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - phi * (hi - lo);
            fc = g(c)?.abs();
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + phi * (hi - lo);
            fd = g(d)?.abs();
        }
    }
    Ok(best.max(fc).max(fd))
}

// int_X^inf |g|^p from the tail expansion, mapped to a finite interval
fn tail_integral(order: &KernelOrder, t: f64, x0: f64, p: f64) -> Result<f64> {
    let (_, lead_exp) = order
        .tail_expansion(24)
        .into_iter()
        .find(|(c, _)| *c != 0.0)
        .expect("expansion has a non-vanishing term");
    let gamma_p = p * lead_exp;
    if gamma_p <= 1.0 {
        return Err(Error::DomainTooNarrow(alloc::format!(
            "|g|^p decays like x^-{gamma_p}, not integrable"
        )));
    }
    // x = x0 w^{-1/(gamma_p - 1)} makes the integrand bounded on (0, 1]
    let k = 1.0 / (gamma_p - 1.0);
    let gl = GaussLegendre::new(48);
    let mut sum = 0.0;
    for (w, weight) in gl.mapped(0.0, 1.0) {
        let x = x0 * libm::pow(w, -k);
        let (v, _) = tail_value(order, t, x).ok_or_else(|| {
            Error::DomainTooNarrow(alloc::format!("tail expansion unsettled at {x:.3e}"))
        })?;
        let h = libm::pow(v.abs(), p) * libm::pow(x / x0, gamma_p);
        sum += weight * h;
    }
    Ok(sum * x0 * k)
}

/// Least-squares slope of `log ||.||_p` against `log t`.
pub fn fit_decay_exponent(alpha: f64, s: f64, p: f64, with_x_derivative: bool, times: &[f64]) -> Result<f64> {
    let order = KernelOrder::new(alpha, s, with_x_derivative)?;
    let mut pts = Vec::with_capacity(times.len());
    for &t in times {
        let norm = kernel_lp_norms(&order, t, &[p])?[0];
        pts.push((libm::log(t), libm::log(norm)));
    }
    least_squares_slope(&pts)
}

/// Slope of the least-squares line through `(x, y)` pairs.
pub fn least_squares_slope(pts: &[(f64, f64)]) -> Result<f64> {
    let n = pts.len() as f64;
    let mut distinct = pts.iter().map(|p| p.0).collect::<Vec<_>>();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(Error::DegenerateFit(alloc::format!(
            "need at least two distinct abscissae, got {}",
            distinct.len()
        )));
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Ok(sxy / sxx)
}

/// Tabulated profile for bulk evaluation: `F` and `F'` on `r = 0` plus a
/// log-spaced radius table, cubic Hermite interpolation inside, tail expansion
/// beyond the last radius.
#[derive(Debug, Clone)]
pub struct KernelProfile {
    pub alpha: f64,
    pub sample_radii: Vec<f64>,
    pub values: Vec<f64>,
    /// `c` fitted from the outer table entries in `F(r) ~ c r^{-(1+alpha)}`.
    pub tail_constant: f64,
    interpolant: MonotoneCubic,
    order: KernelOrder,
}

impl KernelProfile {
    pub fn build(alpha: f64, r_max: f64, n_radii: usize) -> Result<Self> {
        let order = KernelOrder::profile(alpha)?;
        if !(r_max > 1.0) || n_radii < 8 {
            return Err(invalid("r_max", "need r_max > 1 and at least 8 radii"));
        }
        let r_min: f64 = 1e-3;
        let ratio = libm::pow(r_max / r_min, 1.0 / (n_radii - 1) as f64);
        let mut sample_radii = Vec::with_capacity(n_radii + 1);
        sample_radii.push(0.0);
        for j in 0..n_radii {
            sample_radii.push(r_min * libm::pow(ratio, j as f64));
        }
        let values = sample_radii
            .iter()
            .map(|&r| kernel_family_value(&order, 1.0, r))
            .collect::<Result<Vec<_>>>()?;
        // fit over the outer quarter of the table in log-log
        let start = sample_radii.partition_point(|&r| r < 0.25 * r_max).max(1);
        let logs: Vec<f64> = (start..sample_radii.len())
            .map(|i| libm::log(values[i]) + (1.0 + alpha) * libm::log(sample_radii[i]))
            .collect();
        let tail_constant = libm::exp(logs.iter().sum::<f64>() / logs.len() as f64);
        let slope_order = KernelOrder::new(alpha, 0.0, true)?;
        let slopes = sample_radii
            .iter()
            .map(|&r| kernel_family_value(&slope_order, 1.0, r))
            .collect::<Result<Vec<_>>>()?;
        let interpolant = MonotoneCubic::hermite(sample_radii.clone(), values.clone(), slopes)?;
        Ok(Self {
            alpha,
            sample_radii,
            values,
            tail_constant,
            interpolant,
            order,
        })
    }

    pub fn eval(&self, r: f64) -> f64 {
        let r = r.abs();
        let (_, r_max) = self.interpolant.domain();
        if r <= r_max {
            return self.interpolant.eval(r);
        }
        match tail_value(&self.order, 1.0, r) {
            Some((v, _)) => v,
            None => self.tail_constant * libm::pow(r, -(1.0 + self.alpha)),
        }
    }

    /// `K_t(x)` through the table.
    pub fn kernel(&self, t: f64, x: f64) -> f64 {
        let scale = libm::pow(t, -1.0 / self.alpha);
        scale * self.eval(x * scale)
    }

    /// `mass * K_t` sampled on `grid`, summed over periodic images until
    /// the image contribution falls below `1e-14` of the peak.
    pub fn kernel_field(&self, t: f64, mass: f64, grid: &GridSpec) -> Result<Field> {
        if !(t > 0.0) {
            return Err(invalid("t", "must be positive"));
        }
        let period = grid.length();
        let peak = self.kernel(t, 0.0);
        let samples = grid
            .nodes()
            .map(|x| {
                let mut v = self.kernel(t, x);
                for img in 1..10_000 {
                    let shift = img as f64 * period;
                    let add = self.kernel(t, x + shift) + self.kernel(t, x - shift);
                    v += add;
                    if add < 1e-14 * peak {
                        break;
                    }
                }
                mass * v
            })
            .collect();
        Field::new(*grid, t, samples)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cauchy(t: f64, x: f64) -> f64 {
        t / (PI * (x * x + t * t))
    }

    #[test]
    fn alpha_one_closed_forms() {
        assert!((profile_value(1.0, 0.0).unwrap() - 1.0 / PI).abs() < 1e-12);
        assert!((profile_value(1.0, 2.0).unwrap() - 1.0 / (5.0 * PI)).abs() < 1e-12);
        assert!((kernel_value(1.0, 2.0, 0.0).unwrap() - 0.5 / PI).abs() < 1e-12);
        assert!((kernel_value(1.0, 1.0, 1.0).unwrap() - 0.5 / PI).abs() < 1e-12);
        for &(t, x) in &[(0.1, 19.0), (7.5, -3.3), (0.3, 0.01), (2.0, 150.0)] {
            let got = kernel_value(1.0, t, x).unwrap();
            assert!((got - cauchy(t, x)).abs() < 1e-10, "t={t} x={x}: {got} vs {}", cauchy(t, x));
        }
    }

    #[test]
    fn profile_origin_matches_gamma() {
        for alpha in [0.7, 1.1, 1.5, 1.9] {
            let got = profile_value(alpha, 0.0).unwrap();
            assert!((got - profile_at_origin(alpha)).abs() < 1e-12, "alpha={alpha}");
        }
    }

    #[test]
    fn derivative_closed_forms() {
        // |D| K_1^1 (0) = (1/pi) int xi e^{-xi} = 1/pi
        let g = KernelOrder::new(1.0, 1.0, false).unwrap();
        assert!((kernel_family_value(&g, 1.0, 0.0).unwrap() - 1.0 / PI).abs() < 1e-12);
        // d_x K_t^1 = -2 t x / (pi (x^2 + t^2)^2)
        let d = KernelOrder::new(1.0, 0.0, true).unwrap();
        assert_eq!(kernel_family_value(&d, 1.0, 0.0).unwrap(), 0.0);
        for &(t, x) in &[(1.0, 0.5), (0.5, -2.0), (3.0, 40.0)] {
            let want = -2.0 * t * x / (PI * libm::pow(x * x + t * t, 2.0));
            let got = kernel_family_value(&d, t, x).unwrap();
            assert!((got - want).abs() < 1e-11, "t={t} x={x}: {got} vs {want}");
        }
        // |D|^{1/2} K_1^{3/2}(0) = Gamma(1)/(1.5 pi), since int xi^{1/2} e^{-xi^{3/2}} = 2/3
        let h = KernelOrder::new(1.5, 0.5, false).unwrap();
        let want = 2.0 / (3.0 * PI);
        assert!((kernel_family_value(&h, 1.0, 0.0).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn self_similarity_is_exact() {
        for &(alpha, t, x) in &[(1.5, 16.0, 0.0), (1.1, 0.3, 2.0), (1.9, 5.0, -7.0)] {
            let lhs = kernel_value(alpha, t, x).unwrap();
            let s = libm::pow(t, -1.0 / alpha);
            let rhs = s * kernel_value(alpha, 1.0, x * s).unwrap();
            assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs());
        }
        let at16 = kernel_value(1.5, 16.0, 0.0).unwrap();
        assert!((at16 - libm::pow(16.0, -2.0 / 3.0) * profile_at_origin(1.5)).abs() < 1e-13);
    }

    #[test]
    fn tail_expansion_matches_quadrature() {
        for alpha in [1.1, 1.5, 1.9] {
            for (s, d) in [(0.0, false), (0.5, false), (0.0, true), (0.5, true)] {
                let order = KernelOrder::new(alpha, s, d).unwrap();
                let x = 64.0;
                let direct = kernel_family_value(&order, 1.0, x).unwrap();
                let (series, err) = tail_value(&order, 1.0, x).unwrap();
                assert!(
                    (direct - series).abs() < 1e-9 * direct.abs() + 1e-15,
                    "alpha={alpha} s={s} d={d}: {direct} vs {series} (err {err})"
                );
            }
        }
    }

    #[test]
    fn cauchy_tail_constant() {
        assert!((tail_constant_exact(1.0) - 1.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(profile_value(2.0, 1.0).is_err());
        assert!(profile_value(0.0, 1.0).is_err());
        assert!(profile_value(1.5, -1.0).is_err());
        assert!(kernel_value(1.5, 0.0, 1.0).is_err());
        assert!(KernelOrder::new(1.5, 2.6, false).is_err());
        assert!(KernelOrder::new(1.5, 2.0, false).is_ok());
        assert!(KernelOrder::new(1.5, 1.6, true).is_err());
        assert!(least_squares_slope(&[(1.0, 2.0), (1.0, 3.0)]).is_err());
    }

    #[test]
    fn alpha_one_norms() {
        let order = KernelOrder::profile(1.0).unwrap();
        let norms = kernel_lp_norms(&order, 1.0, &[1.0, 2.0, f64::INFINITY]).unwrap();
        assert!((norms[0] - 1.0).abs() < 1e-8, "{norms:?}");
        // Plancherel: ||K||_2^2 = (1/2pi) int e^{-2|xi|} = 1/(2 pi)
        assert!((norms[1] - libm::sqrt(0.5 / PI)).abs() < 1e-8);
        assert!((norms[2] - 1.0 / PI).abs() < 1e-12);
        let t3 = kernel_lp_norm(1.0, 0.0, 1.0, 3.7, false).unwrap();
        assert!((t3 - 1.0).abs() < 1e-8);
    }

    #[test]
    fn profile_table_interpolates() {
        let table = KernelProfile::build(1.0, 50.0, 600).unwrap();
        for r in [0.0, 0.3, 1.7, 12.0, 49.0, 80.0, 500.0] {
            let want = 1.0 / (PI * (1.0 + r * r));
            assert!((table.eval(r) - want).abs() < 1e-6 * want, "r={r}: {} vs {want}", table.eval(r));
        }
        assert!((table.tail_constant - 1.0 / PI).abs() < 1e-3);
    }
}
