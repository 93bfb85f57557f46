//! Initial data menu: a box, a Gaussian bump and an N-wave snapshot, each
//! carrying a prescribed mass on the grid.

use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::grid::{Field, GridSpec};
use crate::nwave::NWave;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialData {
    /// `M / (2a)` on `[-a, a]`.
    Box { half_width: f64 },
    /// Gaussian of standard deviation `width` centred at 0.
    Bump { width: f64 },
    /// The N-wave of mass `M` at time `t0`.
    NWaveAt { t0: f64 },
}

impl InitialData {
    /// Samples at time 0 with `mass(field) == mass` to rounding.
    pub fn sample(&self, grid: &GridSpec, mass: f64, q: f64) -> Result<Field> {
        match *self {
            InitialData::Box { half_width } => box_data(grid, half_width, mass),
            InitialData::Bump { width } => bump_data(grid, width, mass),
            InitialData::NWaveAt { t0 } => nwave_data(grid, t0, mass, q),
        }
    }
}

/// Cell averages of the box, so the discrete mass is exact.
pub fn box_data(grid: &GridSpec, half_width: f64, mass: f64) -> Result<Field> {
    let a = half_width;
    if !(a > 0.0 && a < grid.half_width()) {
        return Err(invalid("half_width", alloc::format!("box half-width must lie in (0, L), got {a}")));
    }
    check_mass(mass)?;
    let height = mass / (2.0 * a);
    let dx = grid.dx();
    let samples: Vec<f64> = grid
        .nodes()
        .map(|x| {
            let overlap = ((x + 0.5 * dx).min(a) - (x - 0.5 * dx).max(-a)).max(0.0);
            height * overlap / dx
        })
        .collect();
    Field::new(*grid, 0.0, samples)
}

pub fn bump_data(grid: &GridSpec, width: f64, mass: f64) -> Result<Field> {
    if !(width > 0.0 && 8.0 * width < grid.half_width()) {
        return Err(invalid("width", alloc::format!("bump width must lie in (0, L/8), got {width}")));
    }
    check_mass(mass)?;
    let raw = Field::from_fn(*grid, 0.0, |x| libm::exp(-0.5 * (x / width) * (x / width)))?;
    let scale = mass / raw.mass();
    Ok(raw.map(|v| v * scale))
}

/// The sampled N-wave at `t0`, rescaled to carry exactly `mass`, stamped
/// with time 0.
pub fn nwave_data(grid: &GridSpec, t0: f64, mass: f64, q: f64) -> Result<Field> {
    check_mass(mass)?;
    let w = NWave::new(mass, q)?;
    if !(t0 > 0.0) {
        return Err(invalid("t0", alloc::format!("must be positive, got {t0}")));
    }
    if w.support_radius(t0) >= grid.half_width() {
        return Err(invalid("t0", "N-wave support exceeds the domain"));
    }
    let f = w.field(t0, grid)?;
    let scale = mass / f.mass();
    Ok(f.map(|v| v * scale).with_time(0.0))
}

fn check_mass(mass: f64) -> Result<()> {
    if mass.is_finite() && mass > 0.0 {
        Ok(())
    } else {
        Err(invalid("mass", alloc::format!("must be positive, got {mass}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    #[test]
    fn masses_are_exact() {
        let g = make_grid(20.0, 1024).unwrap();
        for data in [
            InitialData::Box { half_width: 1.0 },
            InitialData::Box { half_width: 0.987 },
            InitialData::Bump { width: 0.7 },
            InitialData::NWaveAt { t0: 1.0 },
        ] {
            let f = data.sample(&g, 1.5, 1.2).unwrap();
            assert!((f.mass() - 1.5).abs() < 1e-13, "{data:?}: {}", f.mass());
            assert!(f.is_nonnegative(0.0));
            assert_eq!(f.time(), 0.0);
        }
    }

    #[test]
    fn box_height() {
        let g = make_grid(4.0, 64).unwrap();
        let f = box_data(&g, 1.0, 1.0).unwrap();
        assert!((f.max() - 0.5).abs() < 1e-15);
        assert!(box_data(&g, 5.0, 1.0).is_err());
        assert!(box_data(&g, 1.0, -1.0).is_err());
    }
}
