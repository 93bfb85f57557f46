//! Spatial operators: two independent discretizations of the fractional
//! Laplacian and the convective flux with its numerical fluxes.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::grid::{from_spectral, to_spectral, Field, GridSpec};
use crate::quad::GaussLegendre;
use crate::special::{gamma, hurwitz_zeta};

/// `(-Delta)^{alpha/2} u` by multiplying Fourier coefficients with `|xi|^alpha`.
pub fn frac_laplacian_spectral(u: &Field, alpha: f64) -> Result<Field> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(invalid("alpha", alloc::format!("must lie in (0, 2], got {alpha}")));
    }
    let mut spec = to_spectral(u);
    spec.apply_symbol(|xi| Complex64::new(libm::pow(xi.abs(), alpha), 0.0));
    Ok(from_spectral(&spec, u.time()))
}

/// Normalizing constant of the singular-integral form, fixed by requiring
/// the symbol `|xi|^alpha`:
/// `c(alpha) = 2^alpha Gamma((1+alpha)/2) / (sqrt(pi) |Gamma(-alpha/2)|)`.
pub fn singular_integral_constant(alpha: f64) -> f64 {
    libm::pow(2.0, alpha) * gamma(0.5 * (1.0 + alpha)) / (libm::sqrt(PI) * gamma(-0.5 * alpha).abs())
}

/// Quadrature realization of
///
/// ```text
/// (-Delta)^{alpha/2} u(x) = -c int_{|z|>=r} (u(x+z) - u(x)) / |z|^{1+alpha} dz
///                           -c int_{|z|<=r} (u(x+z) - u(x) - u'(x) z) / |z|^{1+alpha} dz
/// ```
///
/// on the periodic grid. The far part uses product integration against
/// local cubic interpolants of `u` for two periods, then a trapezoid sum
/// whose periodic images are collapsed with Hurwitz zeta values. The near
/// part uses the Taylor expansion `u'' r^{2-alpha}/(2-alpha) + u'''' r^{4-alpha}/(12 (4-alpha))`
/// with five-point difference stencils.
#[derive(Debug, Clone)]
pub struct SingularLaplacian {
    grid: GridSpec,
    alpha: f64,
    split_radius: f64,
    // weight of u_{i+m}, both sides combined, m in 0..N
    weights: Vec<f64>,
    weight_sum: f64,
}

impl SingularLaplacian {
    /// Default split radius `4 dx`.
    pub fn with_default_radius(grid: GridSpec, alpha: f64) -> Result<Self> {
        Self::new(grid, alpha, 4.0 * grid.dx())
    }

    pub fn new(grid: GridSpec, alpha: f64, split_radius: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(invalid("alpha", alloc::format!("must lie in (0, 2), got {alpha}")));
        }
        let half = grid.half_width();
        if !(split_radius > 0.0 && split_radius < 0.5 * half) {
            return Err(invalid(
                "split_radius",
                alloc::format!("must lie in (0, L/2) = (0, {}), got {split_radius}", 0.5 * half),
            ));
        }
        let n = grid.len();
        let dx = grid.dx();
        let kernel = |z: f64| libm::pow(z, -1.0 - alpha);

        // one-sided weights for u(x + k dx), k >= -1
        let r_cells = split_radius / dx;
        let first = libm::floor(r_cells) as i64;
        let exact_end = (2 * n as i64).max(first + 8);
        let mut one_sided: Vec<f64> = vec![0.0; (exact_end + 3) as usize];
        let offset = 1i64; // slot of k = -1
        let gl = GaussLegendre::new(8);
        let mut a = split_radius;
        let mut j = first;
        while j < exact_end {
            let b = (j + 1) as f64 * dx;
            if b > a {
                // cubic through nodes j-1 .. j+2, in units of dx relative to node j
                for (z, w) in gl.mapped(a, b) {
                    let s = z / dx - j as f64;
                    let basis = [
                        -s * (s - 1.0) * (s - 2.0) / 6.0,
                        (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0,
                        -(s + 1.0) * s * (s - 2.0) / 2.0,
                        (s + 1.0) * s * (s - 1.0) / 6.0,
                    ];
                    let kw = w * kernel(z);
                    for (l, bl) in basis.iter().enumerate() {
                        one_sided[(j - 1 + l as i64 + offset) as usize] += bl * kw;
                    }
                }
            }
            a = b;
            j += 1;
        }

        let mut plus = vec![0.0; n];
        let residue = |k: i64| k.rem_euclid(n as i64) as usize;
        for (slot, w) in one_sided.iter().enumerate() {
            let k = slot as i64 - offset;
            if k > exact_end {
                break;
            }
            plus[residue(k)] += w;
        }
        // trapezoid from z = exact_end dx onwards
        let z_end = exact_end as f64 * dx;
        plus[residue(exact_end)] += 0.5 * dx * kernel(z_end);
        let nf = n as f64;
        let scale = libm::pow(dx, -alpha) * libm::pow(nf, -1.0 - alpha);
        for (rho, p) in plus.iter_mut().enumerate() {
            // smallest k > exact_end with k = rho mod n
            let mut k0 = exact_end + 1 + (rho as i64 - (exact_end + 1)).rem_euclid(n as i64);
            if k0 <= exact_end {
                k0 += n as i64;
            }
            *p += scale * hurwitz_zeta(1.0 + alpha, k0 as f64 / nf);
        }

        // mirror for the z < 0 half
        let weights: Vec<f64> = (0..n).map(|m| plus[m] + plus[(n - m) % n]).collect();
        let weight_sum = weights.iter().sum();
        Ok(Self {
            grid,
            alpha,
            split_radius,
            weights,
            weight_sum,
        })
    }

    pub fn split_radius(&self) -> f64 {
        self.split_radius
    }

    pub fn apply(&self, u: &Field) -> Result<Field> {
        self.grid.ensure_same(u.grid())?;
        let n = self.grid.len();
        let dx = self.grid.dx();
        let v = u.samples();
        let c = singular_integral_constant(self.alpha);
        let r = self.split_radius;
        let a = self.alpha;
        let near_2 = libm::pow(r, 2.0 - a) / (2.0 - a);
        let near_4 = libm::pow(r, 4.0 - a) / (12.0 * (4.0 - a));
        let at = |i: isize| v[i.rem_euclid(n as isize) as usize];
        let mut out = vec![0.0; n];
        for (i, o) in out.iter_mut().enumerate() {
            let ii = i as isize;
            let mut far = 0.0;
            // u_{i+m} with m wrapping: split the loop to avoid modular indexing
            let (head, tail) = v.split_at(i);
            for (w, x) in self.weights.iter().zip(tail.iter().chain(head)) {
                far += w * x;
            }
            far -= self.weight_sum * v[i];
            let (um2, um1, u0, up1, up2) = (at(ii - 2), at(ii - 1), v[i], at(ii + 1), at(ii + 2));
            let d2 = (-um2 + 16.0 * um1 - 30.0 * u0 + 16.0 * up1 - up2) / (12.0 * dx * dx);
            let d4 = (um2 - 4.0 * um1 + 6.0 * u0 - 4.0 * up1 + up2) / (dx * dx * dx * dx);
            *o = -c * (far + d2 * near_2 + d4 * near_4);
        }
        Ok(Field::from_parts_unchecked(self.grid, u.time(), out))
    }
}

/// One-shot form of [`SingularLaplacian::apply`].
pub fn frac_laplacian_singular(u: &Field, alpha: f64, split_radius: f64) -> Result<Field> {
    SingularLaplacian::new(*u.grid(), alpha, split_radius)?.apply(u)
}

/// Convection exponent `q > 1` of `f(u) = |u|^{q-1} u / q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxParams {
    q: f64,
}

impl FluxParams {
    pub fn new(q: f64) -> Result<Self> {
        if q.is_finite() && q > 1.0 {
            Ok(Self { q })
        } else {
            Err(invalid("q", alloc::format!("must exceed 1, got {q}")))
        }
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn flux(&self, u: f64) -> f64 {
        flux(u, self.q)
    }

    pub fn speed(&self, u: f64) -> f64 {
        flux_derivative(u, self.q)
    }
}

/// `f(u) = |u|^{q-1} u / q`.
#[inline]
pub fn flux(u: f64, q: f64) -> f64 {
    if u == 0.0 {
        0.0
    } else {
        libm::pow(u.abs(), q) * u.signum() / q
    }
}

/// `f'(u) = |u|^{q-1}`.
#[inline]
pub fn flux_derivative(u: f64, q: f64) -> f64 {
    if u == 0.0 {
        0.0
    } else {
        libm::pow(u.abs(), q - 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FluxScheme {
    #[default]
    Godunov,
    Rusanov,
}

/// Two-point numerical flux at an interface with states `u_left | u_right`.
#[inline]
pub fn numerical_flux(u_left: f64, u_right: f64, q: f64, scheme: FluxScheme) -> f64 {
    match scheme {
        // min of f over [u_l, u_r] or max over [u_r, u_l]; f is nondecreasing
        // on all of R, so both reduce to upwinding
        FluxScheme::Godunov => flux(u_left, q),
        FluxScheme::Rusanov => {
            let lambda = flux_derivative(u_left, q).max(flux_derivative(u_right, q));
            0.5 * (flux(u_left, q) + flux(u_right, q)) - 0.5 * lambda * (u_right - u_left)
        }
    }
}
