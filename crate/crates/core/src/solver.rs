//! Time integration: the factor-two splitting scheme, the Duhamel (mild
//! form) integrator, and the pure diffusion / pure convection sub-flows.
//!
//! Both schemes start from `t = 0` and return the solution at each record
//! time (or only at `T` when no record times are given).

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::fft::RealFft;
use crate::grid::{Field, GridSpec, ModelParams};
use crate::operators::{flux, FluxScheme};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    #[default]
    Splitting,
    Duhamel,
}

/// Interface states fed to the numerical flux in the convection sub-flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Reconstruction {
    /// Cell values, forward Euler sub-steps.
    FirstOrder,
    /// Minmod-limited linear reconstruction, two-stage SSP Runge-Kutta.
    #[default]
    Muscl,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub scheme: Scheme,
    /// Splitting half-cycle length; macro step of the Duhamel integrator.
    pub delta: f64,
    pub cfl: f64,
    pub end_time: f64,
    pub record_times: Vec<f64>,
    pub flux_scheme: FluxScheme,
    pub reconstruction: Reconstruction,
    pub picard_tol: f64,
    pub picard_max_iters: usize,
}

impl SolverConfig {
    /// Defaults: CFL 0.5, Godunov flux, MUSCL, Picard tolerance `1e-12`
    /// with at most 50 sweeps.
    pub fn new(scheme: Scheme, delta: f64, end_time: f64, record_times: Vec<f64>) -> Result<Self> {
        let c = Self {
            scheme,
            delta,
            cfl: 0.5,
            end_time,
            record_times,
            flux_scheme: FluxScheme::Godunov,
            reconstruction: Reconstruction::Muscl,
            picard_tol: 1e-12,
            picard_max_iters: 50,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.end_time.is_finite() && self.end_time > 0.0) {
            return Err(invalid("end_time", alloc::format!("must be positive, got {}", self.end_time)));
        }
        if !(self.delta > 0.0 && self.delta <= self.end_time) {
            return Err(invalid(
                "delta",
                alloc::format!("must lie in (0, T = {}], got {}", self.end_time, self.delta),
            ));
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(invalid("cfl", alloc::format!("must lie in (0, 1], got {}", self.cfl)));
        }
        if self.record_times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("record_times", "must be strictly increasing"));
        }
        if let Some(bad) = self
            .record_times
            .iter()
            .find(|&&t| !(t >= 0.0 && t <= self.end_time))
        {
            return Err(invalid(
                "record_times",
                alloc::format!("record time {bad} outside [0, T = {}]", self.end_time),
            ));
        }
        if !(self.picard_tol > 0.0) || self.picard_max_iters == 0 {
            return Err(invalid("picard_tol", "tolerance and iteration cap must be positive"));
        }
        Ok(())
    }

    fn stops(&self) -> Vec<f64> {
        if self.record_times.is_empty() {
            vec![self.end_time]
        } else {
            self.record_times.clone()
        }
    }
}

/// Spectral workspace: real FFT, half-spectrum buffers and `|xi_k|^alpha`.
struct Spectral {
    fft: RealFft,
    n: usize,
    xi: Vec<f64>,
    symbol: Vec<f64>,
    buf: Vec<Complex64>,
}

impl Spectral {
    fn new(grid: &GridSpec, alpha: f64) -> Self {
        let xi = grid.half_wavenumbers();
        let symbol = xi.iter().map(|x| libm::pow(*x, alpha)).collect();
        Self {
            fft: RealFft::new(grid.len()).expect("grid lengths are powers of two >= 16"),
            n: grid.len(),
            buf: vec![Complex64::new(0.0, 0.0); xi.len()],
            xi,
            symbol,
        }
    }

    fn multiplier(&self, rate: f64) -> Vec<f64> {
        self.symbol.iter().map(|s| libm::exp(-rate * s)).collect()
    }

    fn apply_real(&mut self, samples: &mut [f64], multiplier: &[f64]) {
        self.fft.forward(samples, &mut self.buf);
        for (c, m) in self.buf.iter_mut().zip(multiplier) {
            *c *= *m;
        }
        self.fft.inverse(&self.buf, samples);
        let scale = 1.0 / self.n as f64;
        for s in samples.iter_mut() {
            *s *= scale;
        }
    }
}

/// Exact periodic solution operator of `u_t + speed (-Delta)^{alpha/2} u = 0`
/// over `dt`: multiplication by `exp(-speed dt |xi_k|^alpha)`.
pub fn diffusion_step(u: &Field, alpha: f64, dt: f64, speed_factor: f64) -> Result<Field> {
    if !(dt >= 0.0) {
        return Err(invalid("dt", alloc::format!("must be nonnegative, got {dt}")));
    }
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(invalid("alpha", alloc::format!("must lie in (0, 2], got {alpha}")));
    }
    if dt == 0.0 {
        return Ok(u.clone());
    }
    let mut sp = Spectral::new(u.grid(), alpha);
    let m = sp.multiplier(speed_factor * dt);
    let mut s = u.samples().to_vec();
    sp.apply_real(&mut s, &m);
    Ok(Field::from_parts_unchecked(*u.grid(), u.time() + dt, s))
}

/// Finite-volume solver of `u_t + speed f(u)_x = 0` with CFL-limited sub-steps.
struct Convection {
    q: f64,
    speed: f64,
    cfl: f64,
    dx: f64,
    scheme: FluxScheme,
    recon: Reconstruction,
    fluxes: Vec<f64>,
    stage: Vec<f64>,
    second: Vec<f64>,
}

fn minmod(a: f64, b: f64) -> f64 {
    if a * b <= 0.0 {
        0.0
    } else if a.abs() < b.abs() {
        a
    } else {
        b
    }
}

impl Convection {
    fn new(n: usize, dx: f64, q: f64, speed: f64, cfl: f64, scheme: FluxScheme, recon: Reconstruction) -> Self {
        Self {
            q,
            speed,
            cfl,
            dx,
            scheme,
            recon,
            fluxes: vec![0.0; n],
            stage: vec![0.0; n],
            second: vec![0.0; n],
        }
    }

    // fluxes[i] = F_{i+1/2}
    fn compute_fluxes(&mut self, u: &[f64]) {
        let n = u.len();
        let q = self.q;
        let scheme = self.scheme;
        match self.recon {
            Reconstruction::FirstOrder => {
                for i in 0..n {
                    let r = if i + 1 == n { u[0] } else { u[i + 1] };
                    self.fluxes[i] = interface_flux(u[i], r, q, scheme);
                }
            }
            Reconstruction::Muscl => {
                let slope = |i: usize| {
                    let l = u[(i + n - 1) % n];
                    let r = u[(i + 1) % n];
                    minmod(u[i] - l, r - u[i])
                };
                let mut s_here = slope(0);
                for i in 0..n {
                    let j = (i + 1) % n;
                    let s_next = slope(j);
                    self.fluxes[i] = interface_flux(u[i] + 0.5 * s_here, u[j] - 0.5 * s_next, q, scheme);
                    s_here = s_next;
                }
            }
        }
    }

    // out = u - dt speed / dx (F_{i+1/2} - F_{i-1/2}), fluxes from `u`
    fn euler(&mut self, u: &[f64], dt: f64, out: &mut [f64]) {
        self.compute_fluxes(u);
        let n = u.len();
        let c = dt * self.speed / self.dx;
        let mut left = self.fluxes[n - 1];
        for i in 0..n {
            let right = self.fluxes[i];
            out[i] = u[i] - c * (right - left);
            left = right;
        }
    }

    fn advance(&mut self, u: &mut [f64], dt: f64) {
        if dt <= 0.0 {
            return;
        }
        let top = u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let fmax = libm::pow(top, self.q - 1.0);
        let limit = self.cfl * self.dx / (self.speed * fmax.max(f64::MIN_POSITIVE));
        let steps = libm::ceil(dt / limit).max(1.0) as usize;
        let h = dt / steps as f64;
        let mut stage = core::mem::take(&mut self.stage);
        let mut second = core::mem::take(&mut self.second);
        for _ in 0..steps {
            match self.recon {
                Reconstruction::FirstOrder => {
                    self.euler(u, h, &mut stage);
                    u.copy_from_slice(&stage);
                }
                Reconstruction::Muscl => {
                    // Heun form of SSP-RK2: u <- (u + E(E(u))) / 2
                    self.euler(u, h, &mut stage);
                    self.euler(&stage, h, &mut second);
                    for (a, b) in u.iter_mut().zip(&second) {
                        *a = 0.5 * (*a + b);
                    }
                }
            }
        }
        self.second = second;
        self.stage = stage;
    }
}

#[inline]
fn interface_flux(l: f64, r: f64, q: f64, scheme: FluxScheme) -> f64 {
    match scheme {
        FluxScheme::Godunov => flux(l, q),
        _ => crate::operators::numerical_flux(l, r, q, scheme),
    }
}

/// First-order-in-time Godunov update of `u_t + speed f(u)_x = 0` over `dt`,
/// sub-stepped so each sub-step has Courant number at most `cfl`.
pub fn convection_step(
    u: &Field,
    q: f64,
    dt: f64,
    speed_factor: f64,
    cfl: f64,
    flux_scheme: FluxScheme,
) -> Result<Field> {
    convection_step_with(u, q, dt, speed_factor, cfl, flux_scheme, Reconstruction::FirstOrder)
}

pub fn convection_step_with(
    u: &Field,
    q: f64,
    dt: f64,
    speed_factor: f64,
    cfl: f64,
    flux_scheme: FluxScheme,
    reconstruction: Reconstruction,
) -> Result<Field> {
    if !(dt >= 0.0) {
        return Err(invalid("dt", alloc::format!("must be nonnegative, got {dt}")));
    }
    if !(q > 1.0) {
        return Err(invalid("q", alloc::format!("must exceed 1, got {q}")));
    }
    if !(cfl > 0.0 && cfl <= 1.0) {
        return Err(invalid("cfl", alloc::format!("must lie in (0, 1], got {cfl}")));
    }
    if !(speed_factor > 0.0) {
        return Err(invalid("speed_factor", "must be positive"));
    }
    let g = u.grid();
    let mut conv = Convection::new(g.len(), g.dx(), q, speed_factor, cfl, flux_scheme, reconstruction);
    let mut s = u.samples().to_vec();
    conv.advance(&mut s, dt);
    Ok(Field::from_parts_unchecked(*g, u.time() + dt, s))
}

fn check_initial(u0: &Field, params: &ModelParams, config: &SolverConfig) -> Result<()> {
    config.validate()?;
    if !u0.is_nonnegative(0.0) {
        return Err(invalid("u0", alloc::format!("initial data must be nonnegative, min = {}", u0.min())));
    }
    let m = u0.mass();
    if (m - params.mass).abs() > 1e-10 * params.mass {
        return Err(invalid(
            "mass",
            alloc::format!("initial mass {m} differs from the declared mass {}", params.mass),
        ));
    }
    Ok(())
}

// Stops within this fraction of delta are merged with a half-cycle boundary.
const TIME_SNAP: f64 = 1e-9;

/// The splitting scheme: on `(2n delta, (2n+1) delta]` the diffusion
/// `u_t + 2 (-Delta)^{alpha/2} u = 0`, on the next half-cycle the convection
/// `u_t + 2 f(u)_x = 0`. Half-cycles are cut at record times and at `T`.
pub fn split_solve(u0: &Field, params: &ModelParams, config: &SolverConfig) -> Result<Vec<Field>> {
    check_initial(u0, params, config)?;
    let grid = *u0.grid();
    let delta = config.delta;
    let mut spectral = Spectral::new(&grid, params.alpha);
    let full = spectral.multiplier(2.0 * delta);
    let mut conv = Convection::new(
        grid.len(),
        grid.dx(),
        params.q,
        2.0,
        config.cfl,
        config.flux_scheme,
        config.reconstruction,
    );
    let mut u = u0.samples().to_vec();
    let mut out = Vec::new();
    let mut t = 0.0;
    let mut half: u64 = 0;
    for stop in config.stops() {
        while t < stop {
            let boundary = (half + 1) as f64 * delta;
            let (until, closes) = if boundary <= stop + TIME_SNAP * delta {
                (boundary, true)
            } else {
                (stop, false)
            };
            let dt = until - t;
            if half % 2 == 0 {
                if closes && (dt - delta).abs() <= TIME_SNAP * delta {
                    spectral.apply_real(&mut u, &full);
                } else {
                    let m = spectral.multiplier(2.0 * dt);
                    spectral.apply_real(&mut u, &m);
                }
            } else {
                conv.advance(&mut u, dt);
            }
            t = until;
            if closes {
                half += 1;
            }
        }
        out.push(Field::from_parts_unchecked(grid, stop, u.clone()));
        t = t.max(stop);
    }
    Ok(out)
}

const GAUSS_NODES: [f64; 2] = [0.211_324_865_405_187_1, 0.788_675_134_594_812_9];

// phi_1(z) = (e^z - 1)/z and phi_2(z) = (e^z - 1 - z)/z^2 for z <= 0.
fn phi1(z: f64) -> f64 {
    if z.abs() < 1e-5 {
        1.0 + z * (0.5 + z / 6.0)
    } else {
        libm::expm1(z) / z
    }
}

fn phi2(z: f64) -> f64 {
    if z.abs() < 0.05 {
        let mut term = 0.5;
        let mut sum = 0.5;
        for k in 3..12 {
            term *= z / k as f64;
            sum += term;
        }
        sum
    } else {
        (libm::expm1(z) - z) / (z * z)
    }
}

/// Per-mode weights of one macro step of length `dt`.
struct DuhamelWeights {
    dt: f64,
    stage_decay: [Vec<f64>; 2],
    stage: [[Vec<f64>; 2]; 2],
    step_decay: Vec<f64>,
    step: [Vec<f64>; 2],
}

impl DuhamelWeights {
    // int_0^tau e^{-lam (tau - s)} l_j(s) ds for the linear Lagrange basis
    // l_j on the Gauss nodes c_1 dt, c_2 dt.
    fn product(lam: f64, tau: f64, dt: f64) -> [f64; 2] {
        let z = -lam * tau;
        let i0 = tau * phi1(z);
        let i1 = tau * tau * phi2(z);
        let (c1, c2) = (GAUSS_NODES[0] * dt, GAUSS_NODES[1] * dt);
        let h = c2 - c1;
        [(c2 * i0 - i1) / h, (i1 - c1 * i0) / h]
    }

    fn new(symbol: &[f64], dt: f64) -> Self {
        let h = symbol.len();
        let mut w = Self {
            dt,
            stage_decay: [vec![0.0; h], vec![0.0; h]],
            stage: [[vec![0.0; h], vec![0.0; h]], [vec![0.0; h], vec![0.0; h]]],
            step_decay: vec![0.0; h],
            step: [vec![0.0; h], vec![0.0; h]],
        };
        for (k, &lam) in symbol.iter().enumerate() {
            for g in 0..2 {
                let tau = GAUSS_NODES[g] * dt;
                w.stage_decay[g][k] = libm::exp(-lam * tau);
                let p = Self::product(lam, tau, dt);
                w.stage[g][0][k] = p[0];
                w.stage[g][1][k] = p[1];
            }
            w.step_decay[k] = libm::exp(-lam * dt);
            let p = Self::product(lam, dt, dt);
            w.step[0][k] = p[0];
            w.step[1][k] = p[1];
        }
        w
    }
}

struct Duhamel<F: Fn(f64) -> f64> {
    sp: Spectral,
    flux: F,
    tol: f64,
    max_iters: usize,
    physical: [Vec<f64>; 2],
    nonlinear: [Vec<Complex64>; 2],
}

impl<F: Fn(f64) -> f64> Duhamel<F> {
    // -i xi FFT(f(u)), Nyquist mode dropped
    fn nonlinear_term(sp: &mut Spectral, flux: &F, u: &[f64], out: &mut [Complex64]) {
        let fu: Vec<f64> = u.iter().map(|v| flux(*v)).collect();
        sp.fft.forward(&fu, out);
        let last = out.len() - 1;
        for (k, c) in out.iter_mut().enumerate() {
            *c = if k == last {
                Complex64::new(0.0, 0.0)
            } else {
                *c * Complex64::new(0.0, -sp.xi[k])
            };
        }
    }

    /// Advance the spectrum `hat` (unnormalized DFT) by one macro step.
    fn step(&mut self, hat: &mut [Complex64], w: &DuhamelWeights, u_now: &[f64], time: f64) -> Result<()> {
        let n = self.sp.n;
        let scale = 1.0 / n as f64;
        for g in 0..2 {
            Self::nonlinear_term(&mut self.sp, &self.flux, u_now, &mut self.nonlinear[g]);
            self.physical[g].copy_from_slice(u_now);
        }
        let mut stage_hat = vec![Complex64::new(0.0, 0.0); hat.len()];
        let mut fresh = vec![0.0; n];
        let mut residual = f64::INFINITY;
        let mut converged = false;
        for _ in 0..self.max_iters {
            residual = 0.0;
            let mut next: [Vec<Complex64>; 2] = [vec![Complex64::new(0.0, 0.0); hat.len()], vec![Complex64::new(0.0, 0.0); hat.len()]];
            for g in 0..2 {
                for k in 0..hat.len() {
                    stage_hat[k] = hat[k] * w.stage_decay[g][k]
                        + self.nonlinear[0][k] * w.stage[g][0][k]
                        + self.nonlinear[1][k] * w.stage[g][1][k];
                }
                self.sp.fft.inverse(&stage_hat, &mut fresh);
                for (old, new) in self.physical[g].iter_mut().zip(&mut fresh) {
                    *new *= scale;
                    residual = residual.max((*new - *old).abs());
                    *old = *new;
                }
                Self::nonlinear_term(&mut self.sp, &self.flux, &self.physical[g], &mut next[g]);
            }
            self.nonlinear = next;
            if residual < self.tol {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::PicardDivergence {
                time,
                residual,
                iterations: self.max_iters,
            });
        }
        for k in 0..hat.len() {
            hat[k] = hat[k] * w.step_decay[k]
                + self.nonlinear[0][k] * w.step[0][k]
                + self.nonlinear[1][k] * w.step[1][k];
        }
        Ok(())
    }
}

/// Integrator of the mild form
/// `u(t + dt) = K_dt * u(t) - int_0^dt (K_{dt-s})_x * f(u(t+s)) ds`
/// in Fourier space. The flux history on each macro step is the linear
/// interpolant through the two Gauss points; the memory kernel
/// `exp(-(dt - s)|xi|^alpha)` is integrated against it exactly, and the
/// stage values are found by Picard iteration.
pub fn duhamel_solve(u0: &Field, params: &ModelParams, config: &SolverConfig) -> Result<Vec<Field>> {
    check_initial(u0, params, config)?;
    let q = params.q;
    duhamel_with_flux(u0, params.alpha, config, move |v| flux(v, q))
}

fn duhamel_with_flux<F: Fn(f64) -> f64>(u0: &Field, alpha: f64, config: &SolverConfig, flux_fn: F) -> Result<Vec<Field>> {
    let grid = *u0.grid();
    let n = grid.len();
    let sp = Spectral::new(&grid, alpha);
    let h = sp.xi.len();
    let standard = DuhamelWeights::new(&sp.symbol, config.delta);
    let mut integ = Duhamel {
        sp,
        flux: flux_fn,
        tol: config.picard_tol,
        max_iters: config.picard_max_iters,
        physical: [vec![0.0; n], vec![0.0; n]],
        nonlinear: [vec![Complex64::new(0.0, 0.0); h], vec![Complex64::new(0.0, 0.0); h]],
    };
    let mut u = u0.samples().to_vec();
    let mut hat = vec![Complex64::new(0.0, 0.0); h];
    integ.sp.fft.forward(&u, &mut hat);
    let mut out = Vec::new();
    let mut t = 0.0;
    let mut steps: u64 = 0;
    let scale = 1.0 / n as f64;
    for stop in config.stops() {
        while t < stop {
            let boundary = (steps + 1) as f64 * config.delta;
            let (until, closes) = if boundary <= stop + TIME_SNAP * config.delta {
                (boundary, true)
            } else {
                (stop, false)
            };
            let dt = until - t;
            let local;
            let w = if (dt - standard.dt).abs() <= TIME_SNAP * config.delta {
                &standard
            } else {
                local = DuhamelWeights::new(&integ.sp.symbol, dt);
                &local
            };
            integ.step(&mut hat, w, &u, t)?;
            integ.sp.fft.inverse(&hat, &mut u);
            for v in u.iter_mut() {
                *v *= scale;
            }
            t = until;
            if closes {
                steps += 1;
            }
        }
        out.push(Field::from_parts_unchecked(grid, stop, u.clone()));
    }
    Ok(out)
}

/// Dispatch on `config.scheme`.
pub fn solve(u0: &Field, params: &ModelParams, config: &SolverConfig) -> Result<Vec<Field>> {
    match config.scheme {
        Scheme::Splitting => split_solve(u0, params, config),
        Scheme::Duhamel => duhamel_solve(u0, params, config),
    }
}

/// Gap between the runs from `u0 + eps` and `u0` over the record times.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonShift {
    /// `max_t ||u_eps(t) - u(t)||_inf`.
    pub sup_gap: f64,
    /// `min_{t,x} (u_eps - u)`; nonnegative up to rounding by comparison.
    pub min_difference: f64,
}

pub fn epsilon_shift_test(u0: &Field, eps: f64, params: &ModelParams, config: &SolverConfig) -> Result<EpsilonShift> {
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(invalid("eps", alloc::format!("must be nonnegative, got {eps}")));
    }
    let base = solve(u0, params, config)?;
    let shifted0 = u0.map(|v| v + eps);
    let shifted = solve(&shifted0, &params.with_mass(shifted0.mass()), config)?;
    let mut sup_gap: f64 = 0.0;
    let mut min_difference = f64::INFINITY;
    for (a, b) in shifted.iter().zip(&base) {
        for (x, y) in a.samples().iter().zip(b.samples()) {
            let d = x - y;
            sup_gap = sup_gap.max(d.abs());
            min_difference = min_difference.min(d);
        }
    }
    Ok(EpsilonShift { sup_gap, min_difference })
}
