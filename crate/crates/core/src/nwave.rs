//! The N-wave `U_M`: entropy solution of `u_t + (|u|^{q-1} u / q)_x = 0`
//! with a Dirac mass `M` as datum,
//!
//! ```text
//! U_M(t, x) = (x / t)^{1/(q-1)}  on 0 < x < r(t),   0 elsewhere,
//! r(t) = (q/(q-1))^{(q-1)/q} M^{(q-1)/q} t^{1/q}.
//! ```

use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::grid::{Field, GridSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NWave {
    pub mass: f64,
    pub q: f64,
}

impl NWave {
    pub fn new(mass: f64, q: f64) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(invalid("mass", alloc::format!("must be positive, got {mass}")));
        }
        if !(q.is_finite() && q > 1.0) {
            return Err(invalid("q", alloc::format!("must exceed 1, got {q}")));
        }
        Ok(Self { mass, q })
    }

    fn exponent(&self) -> f64 {
        1.0 / (self.q - 1.0)
    }

    pub fn support_radius(&self, t: f64) -> f64 {
        let q = self.q;
        libm::pow(q / (q - 1.0), (q - 1.0) / q) * libm::pow(self.mass, (q - 1.0) / q) * libm::pow(t, 1.0 / q)
    }

    /// Pointwise value; the support is the open interval `(0, r(t))`.
    pub fn value(&self, t: f64, x: f64) -> Result<f64> {
        check_time(t)?;
        Ok(self.value_unchecked(t, x))
    }

    fn value_unchecked(&self, t: f64, x: f64) -> f64 {
        if x > 0.0 && x < self.support_radius(t) {
            libm::pow(x / t, self.exponent())
        } else {
            0.0
        }
    }

    /// `int_a^b U_M(t, x) dx`.
    pub fn integral(&self, t: f64, a: f64, b: f64) -> f64 {
        let r = self.support_radius(t);
        let (lo, hi) = (a.max(0.0), b.min(r));
        if hi <= lo {
            return 0.0;
        }
        let e = self.exponent() + 1.0;
        t * (libm::pow(hi / t, e) - libm::pow(lo / t, e)) / e
    }

    /// Closed-form `||U_M(t)||_p`, `p = f64::INFINITY` allowed.
    pub fn lp_norm(&self, t: f64, p: f64) -> Result<f64> {
        check_time(t)?;
        if !(p >= 1.0) {
            return Err(invalid("p", alloc::format!("must lie in [1, inf], got {p}")));
        }
        let r = self.support_radius(t);
        let b = self.exponent();
        if p.is_infinite() {
            return Ok(libm::pow(r / t, b));
        }
        let e = p * b + 1.0;
        let pp = libm::pow(t, -p * b) * libm::pow(r, e) / e;
        Ok(libm::pow(pp, 1.0 / p))
    }

    /// Samples on `grid` at time `t`. Nodes take point values except the
    /// cells `[x_i - dx/2, x_i + dx/2)` holding the support ends `0` and
    /// `r(t)`, which take their exact cell averages so neither end biases
    /// the discrete mass.
    pub fn field(&self, t: f64, grid: &GridSpec) -> Result<Field> {
        check_time(t)?;
        let r = self.support_radius(t);
        let dx = grid.dx();
        let samples: Vec<f64> = grid
            .nodes()
            .map(|x| {
                let (lo, hi) = (x - 0.5 * dx, x + 0.5 * dx);
                if (lo <= r && r < hi) || (lo <= 0.0 && 0.0 < hi) {
                    self.integral(t, lo, hi) / dx
                } else {
                    self.value_unchecked(t, x)
                }
            })
            .collect();
        Field::new(*grid, t, samples)
    }
}

fn check_time(t: f64) -> Result<()> {
    if t.is_finite() && t > 0.0 {
        Ok(())
    } else {
        Err(invalid("t", alloc::format!("must be positive, got {t}")))
    }
}

pub fn nwave_value(t: f64, x: f64, mass: f64, q: f64) -> Result<f64> {
    NWave::new(mass, q)?.value(t, x)
}

pub fn nwave_field(t: f64, mass: f64, q: f64, grid: &GridSpec) -> Result<Field> {
    NWave::new(mass, q)?.field(t, grid)
}

pub fn nwave_lp_norm(t: f64, mass: f64, q: f64, p: f64) -> Result<f64> {
    NWave::new(mass, q)?.lp_norm(t, p)
}

/// `t sup (U_M^{q-1})_x`; `U_M^{q-1} = x/t` on the support, so this is 1.
pub fn nwave_oleinik_product(t: f64, mass: f64, q: f64) -> Result<f64> {
    NWave::new(mass, q)?;
    check_time(t)?;
    Ok(1.0)
}
