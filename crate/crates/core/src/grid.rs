//! Shared domain types: model parameters, the periodic grid, sampled fields
//! and their discrete Fourier representation.
//!
//! The whole line is replaced by the periodic box `[-L, L)` sampled at
//! `x_i = -L + i dx`. The forward transform carries the `1/N` factor, so the
//! zero mode of a [`SpectralField`] is the mean of the samples and the mass
//! is `2L` times it. Coefficients are expanded on `e^{i xi_k x}` with
//! `xi_k = pi k / L`, which makes `cos(pi x / L)` carry `1/2` at `k = +-1`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::fft::RealFft;

/// Which admissibility rules [`ModelParams`] enforces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `1 < q < alpha < 2`: convection wins at large times.
    Subcritical,
    /// `q > 1`, `0 < alpha <= 2` independently (negative controls, Oleinik checks).
    Relaxed,
}

/// Physical parameters of `u_t + (-Delta)^{alpha/2} u + (|u|^{q-1} u / q)_x = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub alpha: f64,
    pub q: f64,
    pub mass: f64,
}

impl ModelParams {
    /// Parameters in the subcritical regime `1 < q < alpha < 2`.
    pub fn subcritical(alpha: f64, q: f64, mass: f64) -> Result<Self> {
        Self::new(alpha, q, mass, Regime::Subcritical)
    }

    pub fn relaxed(alpha: f64, q: f64, mass: f64) -> Result<Self> {
        Self::new(alpha, q, mass, Regime::Relaxed)
    }

    pub fn new(alpha: f64, q: f64, mass: f64, regime: Regime) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(invalid("mass", alloc::format!("must be positive, got {mass}")));
        }
        if !(q.is_finite() && q > 1.0) {
            return Err(invalid("q", alloc::format!("must exceed 1, got {q}")));
        }
        if !(alpha.is_finite() && alpha > 0.0 && alpha <= 2.0) {
            return Err(invalid("alpha", alloc::format!("must lie in (0, 2], got {alpha}")));
        }
        if regime == Regime::Subcritical && !(q < alpha && alpha < 2.0) {
            return Err(invalid(
                "q",
                alloc::format!("subcritical requires q < alpha < 2, got q = {q}, alpha = {alpha}"),
            ));
        }
        Ok(Self { alpha, q, mass })
    }

    pub fn is_subcritical(&self) -> bool {
        1.0 < self.q && self.q < self.alpha && self.alpha < 2.0
    }

    pub fn with_mass(self, mass: f64) -> Self {
        Self { mass, ..self }
    }
}

/// Uniform periodic grid on `[-L, L)` with `N` nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    half_width: f64,
    n_points: usize,
}

pub const MIN_GRID_POINTS: usize = 16;

impl GridSpec {
    pub fn new(half_width: f64, n_points: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidGrid(alloc::format!(
                "half-width must be positive and finite, got {half_width}"
            )));
        }
        if n_points < MIN_GRID_POINTS || !n_points.is_power_of_two() {
            return Err(Error::InvalidGrid(alloc::format!(
                "point count must be a power of two >= {MIN_GRID_POINTS}, got {n_points}"
            )));
        }
        Ok(Self {
            half_width,
            n_points,
        })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        self.n_points == 0
    }

    pub fn length(&self) -> f64 {
        2.0 * self.half_width
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / self.n_points as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.dx()
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(move |i| self.x(i))
    }

    /// Signed wavenumber index `k in [-N/2, N/2)` stored at FFT slot `j`.
    pub fn mode_index(&self, slot: usize) -> i64 {
        let n = self.n_points as i64;
        let j = slot as i64;
        if j < n / 2 {
            j
        } else {
            j - n
        }
    }

    /// `xi_k = pi k / L` for FFT slot `j`.
    pub fn wavenumber(&self, slot: usize) -> f64 {
        core::f64::consts::PI * self.mode_index(slot) as f64 / self.half_width
    }

    /// Wavenumbers of the non-negative half spectrum, `k = 0..=N/2`.
    pub(crate) fn half_wavenumbers(&self) -> Vec<f64> {
        (0..=self.n_points / 2)
            .map(|k| core::f64::consts::PI * k as f64 / self.half_width)
            .collect()
    }

    pub(crate) fn ensure_same(&self, other: &GridSpec) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(alloc::format!(
                "{self:?} vs {other:?}"
            )))
        }
    }
}

/// `make_grid` under its operational name.
pub fn make_grid(half_width: f64, n_points: usize) -> Result<GridSpec> {
    GridSpec::new(half_width, n_points)
}

/// Samples of `u(t, .)` on a [`GridSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: GridSpec,
    time: f64,
    samples: Vec<f64>,
}

impl Field {
    pub fn new(grid: GridSpec, time: f64, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::GridMismatch(alloc::format!(
                "{} samples for a {}-point grid",
                samples.len(),
                grid.len()
            )));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(invalid("samples", alloc::format!("non-finite value at node {i}")));
        }
        if !(time.is_finite() && time >= 0.0) {
            return Err(invalid("time", alloc::format!("must be finite and >= 0, got {time}")));
        }
        Ok(Self {
            grid,
            time,
            samples,
        })
    }

    /// Samples `g(x_i)` at every node.
    pub fn from_fn(grid: GridSpec, time: f64, g: impl Fn(f64) -> f64) -> Result<Self> {
        let samples = grid.nodes().map(g).collect();
        Self::new(grid, time, samples)
    }

    pub fn zeros(grid: GridSpec, time: f64) -> Self {
        Self {
            grid,
            time,
            samples: vec![0.0; grid.len()],
        }
    }

    pub(crate) fn from_parts_unchecked(grid: GridSpec, time: f64, samples: Vec<f64>) -> Self {
        debug_assert_eq!(samples.len(), grid.len());
        Self {
            grid,
            time,
            samples,
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn with_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    pub fn mass(&self) -> f64 {
        self.grid.dx() * self.samples.iter().sum::<f64>()
    }

    pub fn min(&self) -> f64 {
        self.samples.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.samples.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn sup_norm(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Discrete `L^p` norm `(sum |u_i|^p dx)^{1/p}`; `p = inf` gives the max.
    pub fn lp_norm(&self, p: f64) -> f64 {
        lp_norm(&self.samples, self.grid.dx(), p)
    }

    /// `min(samples) >= -tol`.
    pub fn is_nonnegative(&self, tol: f64) -> bool {
        self.min() >= -tol
    }

    /// Pointwise difference on a common grid (time stamp of `self`).
    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.grid.ensure_same(&other.grid)?;
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Field::from_parts_unchecked(self.grid, self.time, samples))
    }

    pub fn map(&self, g: impl Fn(f64) -> f64) -> Field {
        Field::from_parts_unchecked(self.grid, self.time, self.samples.iter().map(|&v| g(v)).collect())
    }
}

pub(crate) fn lp_norm(samples: &[f64], dx: f64, p: f64) -> f64 {
    if p.is_infinite() {
        return samples.iter().fold(0.0, |m, v| m.max(v.abs()));
    }
    if p == 1.0 {
        return dx * samples.iter().map(|v| v.abs()).sum::<f64>();
    }
    if p == 2.0 {
        return libm::sqrt(dx * samples.iter().map(|v| v * v).sum::<f64>());
    }
    let s: f64 = samples.iter().map(|v| libm::pow(v.abs(), p)).sum();
    libm::pow(dx * s, 1.0 / p)
}

/// Fourier coefficients `u_hat_k = (1/N) sum_i u_i e^{-i xi_k x_i}` stored in
/// FFT order (slot `j` holds `k = j` for `j < N/2`, else `k = j - N`).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: GridSpec,
    coefficients: Vec<Complex64>,
}

impl SpectralField {
    pub fn new(grid: GridSpec, coefficients: Vec<Complex64>) -> Result<Self> {
        if coefficients.len() != grid.len() {
            return Err(Error::GridMismatch(alloc::format!(
                "{} coefficients for a {}-point grid",
                coefficients.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, coefficients })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Coefficients in FFT order.
    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn coefficients_mut(&mut self) -> &mut [Complex64] {
        &mut self.coefficients
    }

    /// Coefficient of mode `k`, `-N/2 <= k < N/2`.
    pub fn coefficient(&self, k: i64) -> Option<Complex64> {
        let n = self.grid.len() as i64;
        if k < -n / 2 || k >= n / 2 {
            return None;
        }
        let slot = if k >= 0 { k } else { k + n } as usize;
        Some(self.coefficients[slot])
    }

    /// `2L u_hat_0`.
    pub fn mass(&self) -> f64 {
        self.grid.length() * self.coefficients[0].re
    }

    /// Multiplies every coefficient by `symbol(xi_k)`.
    pub fn apply_symbol(&mut self, symbol: impl Fn(f64) -> Complex64) {
        for (j, c) in self.coefficients.iter_mut().enumerate() {
            *c *= symbol(self.grid.wavenumber(j));
        }
    }

    /// `2L sum_k |u_hat_k|^2`, equal to `sum_i |u_i|^2 dx` by Parseval.
    pub fn energy(&self) -> f64 {
        self.grid.length() * self.coefficients.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }
}

fn parity(slot: usize) -> f64 {
    if slot % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Forward transform with the `1/N` normalization.
pub fn to_spectral(field: &Field) -> SpectralField {
    let grid = field.grid;
    let n = grid.len();
    let mut rfft = RealFft::new(n).expect("grid lengths are powers of two >= 16");
    let mut half = vec![Complex64::new(0.0, 0.0); n / 2 + 1];
    rfft.forward(&field.samples, &mut half);
    let mut coefficients = vec![Complex64::new(0.0, 0.0); n];
    let scale = 1.0 / n as f64;
    for k in 0..=n / 2 {
        let c = half[k] * (scale * parity(k));
        if k < n / 2 {
            coefficients[k] = c;
        }
        if k > 0 {
            // slot n-k holds mode -k; at k = n/2 this is the Nyquist mode
            coefficients[n - k] = c.conj();
        }
    }
    // the mean is the plain sample average
    coefficients[0] = Complex64::new(field.samples.iter().sum::<f64>() * scale, 0.0);
    SpectralField { grid, coefficients }
}

/// Inverse transform; the imaginary part of the synthesis is discarded.
pub fn from_spectral(spec: &SpectralField, time: f64) -> Field {
    let grid = spec.grid;
    let n = grid.len();
    let mut rfft = RealFft::new(n).expect("grid lengths are powers of two >= 16");
    let mut half = vec![Complex64::new(0.0, 0.0); n / 2 + 1];
    for (k, h) in half.iter_mut().enumerate().take(n / 2) {
        // Hermitian part of the stored coefficients
        let plus = spec.coefficients[k];
        let minus = spec.coefficients[(n - k) % n].conj();
        *h = (plus + minus) * (0.5 * parity(k));
    }
    // Nyquist slot carries k = -N/2 only
    half[n / 2] = Complex64::new(spec.coefficients[n / 2].re * parity(n / 2), 0.0);
    let mut samples = vec![0.0; n];
    rfft.inverse(&half, &mut samples);
    Field::from_parts_unchecked(grid, time, samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn make_grid_examples() {
        assert_eq!(make_grid(10.0, 16).unwrap().dx(), 1.25);
        assert_eq!(make_grid(1.0, 1024).unwrap().dx(), 0.001953125);
        assert!(matches!(make_grid(10.0, 100), Err(Error::InvalidGrid(_))));
        assert!(make_grid(10.0, 8).is_err());
        assert!(make_grid(0.0, 16).is_err());
        assert!(make_grid(-1.0, 16).is_err());
        assert!(make_grid(f64::NAN, 16).is_err());
    }

    #[test]
    fn node_positions() {
        let g = make_grid(10.0, 16).unwrap();
        assert_eq!(g.x(0), -10.0);
        assert_eq!(g.x(8), 0.0);
        assert_eq!(g.dx() * g.len() as f64, g.length());
        assert_eq!(g.mode_index(0), 0);
        assert_eq!(g.mode_index(7), 7);
        assert_eq!(g.mode_index(8), -8);
        assert_eq!(g.mode_index(15), -1);
    }

    #[test]
    fn constant_field_has_only_mean() {
        let g = make_grid(3.0, 64).unwrap();
        let f = Field::from_fn(g, 0.0, |_| 2.5).unwrap();
        let s = to_spectral(&f);
        assert_eq!(s.coefficient(0).unwrap().re, 2.5);
        for j in 1..64 {
            assert!(s.coefficients()[j].norm() < 1e-15);
        }
    }

    #[test]
    fn cosine_has_half_at_unit_modes() {
        let g = make_grid(2.0, 128).unwrap();
        let f = Field::from_fn(g, 0.0, |x| libm::cos(PI * x / 2.0)).unwrap();
        let s = to_spectral(&f);
        for k in [-1i64, 1] {
            let c = s.coefficient(k).unwrap();
            assert!((c.re - 0.5).abs() < 1e-14 && c.im.abs() < 1e-14, "k={k}: {c}");
        }
        let rest: f64 = (2..63).map(|k| s.coefficient(k).unwrap().norm()).sum();
        assert!(rest < 1e-12);
    }

    #[test]
    fn sine_phase_convention() {
        // sin(pi x / L) = (e^{i xi x} - e^{-i xi x}) / 2i
        let g = make_grid(1.0, 32).unwrap();
        let f = Field::from_fn(g, 0.0, |x| libm::sin(PI * x)).unwrap();
        let s = to_spectral(&f);
        let c = s.coefficient(1).unwrap();
        assert!((c - Complex64::new(0.0, -0.5)).norm() < 1e-14);
    }

    #[test]
    fn mass_from_zero_mode_matches_samples() {
        let g = make_grid(5.0, 256).unwrap();
        let f = Field::from_fn(g, 0.0, |x| libm::exp(-x * x) * (1.0 + 0.3 * x)).unwrap();
        let s = to_spectral(&f);
        assert_eq!(s.mass(), g.length() * (f.samples().iter().sum::<f64>() / 256.0));
        assert!((s.mass() - f.mass()).abs() <= 1e-15 * f.mass());
    }

    #[test]
    fn nyquist_mode_round_trips() {
        let g = make_grid(1.0, 16).unwrap();
        let f = Field::from_fn(g, 0.0, |x| libm::cos(8.0 * PI * x)).unwrap();
        let back = from_spectral(&to_spectral(&f), 0.0);
        for (a, b) in back.samples().iter().zip(f.samples()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn field_rejects_bad_samples() {
        let g = make_grid(1.0, 16).unwrap();
        assert!(Field::new(g, 0.0, vec![0.0; 15]).is_err());
        let mut v = vec![0.0; 16];
        v[3] = f64::NAN;
        assert!(Field::new(g, 0.0, v).is_err());
        assert!(Field::new(g, -1.0, vec![0.0; 16]).is_err());
    }

    #[test]
    fn params_admissibility() {
        assert!(ModelParams::subcritical(1.5, 1.2, 1.0).is_ok());
        assert!(ModelParams::subcritical(1.5, 1.6, 1.0).is_err());
        assert!(ModelParams::subcritical(2.0, 1.2, 1.0).is_err());
        assert!(ModelParams::subcritical(1.5, 1.2, 0.0).is_err());
        assert!(ModelParams::relaxed(1.5, 1.8, 1.0).is_ok());
        assert!(ModelParams::relaxed(2.0, 1.8, 1.0).is_ok());
        assert!(ModelParams::relaxed(1.5, 1.0, 1.0).is_err());
        assert!(!ModelParams::relaxed(1.5, 1.8, 1.0).unwrap().is_subcritical());
    }

    #[test]
    fn lp_norms_of_indicator() {
        let g = make_grid(2.0, 64).unwrap();
        let f = Field::from_fn(g, 0.0, |x| if x.abs() < 1.0 { 2.0 } else { 0.0 }).unwrap();
        // nodes strictly inside (-1, 1): x = -0.9375 .. 0.9375, 31 nodes
        let width = 31.0 * g.dx();
        assert!((f.lp_norm(1.0) - 2.0 * width).abs() < 1e-12);
        assert!((f.lp_norm(2.0) - libm::sqrt(4.0 * width)).abs() < 1e-12);
        assert!((f.lp_norm(3.0) - libm::cbrt(8.0 * width)).abs() < 1e-12);
        assert_eq!(f.lp_norm(f64::INFINITY), 2.0);
    }
}
