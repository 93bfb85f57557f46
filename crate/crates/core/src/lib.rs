//! Numerical core for the one-dimensional fractional convection-diffusion
//! equation
//!
//! ```text
//! u_t + (-Delta)^{alpha/2} u + (|u|^{q-1} u / q)_x = 0,
//! ```
//!
//! and for its large-time limit, the N-wave entropy solution of the pure
//! conservation law.
//!
//! The crate is `no_std` (it needs `alloc`). IO, configuration and the
//! command-line driver live in the `fracconv` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod asymptotics;
pub mod diagnostics;
pub mod error;
pub mod fft;
pub mod grid;
pub mod initial;
pub mod interp;
pub mod kernel;
pub mod nwave;
pub mod operators;
pub mod quad;
pub mod solver;
pub mod special;

pub use error::{Error, Result};
pub use grid::{from_spectral, make_grid, to_spectral, Field, GridSpec, ModelParams, Regime, SpectralField};
