//! Radix-2 fast Fourier transforms.
//!
//! [`FftPlan`] is an in-place complex transform for power-of-two lengths.
//! [`RealFft`] packs a real sequence of length `n` into a complex one of
//! length `n/2` and returns the `n/2 + 1` non-redundant coefficients.
//! Both transforms are unnormalized; scaling is left to the caller.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct FftPlan {
    n: usize,
    // e^{-2 pi i j / n}, j < n/2
    twiddles: Vec<Complex64>,
    bitrev: Vec<u32>,
}

impl FftPlan {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(alloc::format!(
                "FFT length {n} is not a power of two"
            )));
        }
        let twiddles = (0..n / 2)
            .map(|j| {
                let theta = -2.0 * PI * j as f64 / n as f64;
                Complex64::new(libm::cos(theta), libm::sin(theta))
            })
            .collect();
        let bits = n.trailing_zeros();
        let bitrev = (0..n as u32)
            .map(|i| if bits == 0 { 0 } else { i.reverse_bits() >> (32 - bits) })
            .collect();
        Ok(Self {
            n,
            twiddles,
            bitrev,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// `X_k = sum_j x_j e^{-2 pi i jk/n}`.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, false);
    }

    /// `x_j = sum_k X_k e^{+2 pi i jk/n}` (no 1/n factor).
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.transform(data, true);
    }

    fn transform(&self, data: &mut [Complex64], inverse: bool) {
        let n = self.n;
        assert_eq!(data.len(), n, "FFT buffer length mismatch");
        for i in 0..n {
            let j = self.bitrev[i] as usize;
            if i < j {
                data.swap(i, j);
            }
        }
        let mut len = 2;
        while len <= n {
            let half = len / 2;
            let stride = n / len;
            for start in (0..n).step_by(len) {
                for k in 0..half {
                    let mut w = self.twiddles[k * stride];
                    if inverse {
                        w = w.conj();
                    }
                    let a = data[start + k];
                    let b = data[start + k + half] * w;
                    data[start + k] = a + b;
                    data[start + k + half] = a - b;
                }
            }
            len <<= 1;
        }
    }
}

/// Real-input transform of even length `n >= 4` built on a half-length
/// complex plan.
#[derive(Debug, Clone)]
pub struct RealFft {
    n: usize,
    half: FftPlan,
    // e^{-2 pi i k / n}, k <= n/2
    post: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl RealFft {
    pub fn new(n: usize) -> Result<Self> {
        if n < 4 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(alloc::format!(
                "real FFT length {n} must be a power of two >= 4"
            )));
        }
        let post = (0..=n / 2)
            .map(|k| {
                let theta = -2.0 * PI * k as f64 / n as f64;
                Complex64::new(libm::cos(theta), libm::sin(theta))
            })
            .collect();
        Ok(Self {
            n,
            half: FftPlan::new(n / 2)?,
            post,
            scratch: alloc::vec![Complex64::new(0.0, 0.0); n / 2],
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Writes `X_k`, `k = 0..=n/2`, into `out`.
    pub fn forward(&mut self, input: &[f64], out: &mut [Complex64]) {
        let m = self.n / 2;
        assert_eq!(input.len(), self.n);
        assert_eq!(out.len(), m + 1);
        for (j, z) in self.scratch.iter_mut().enumerate() {
            *z = Complex64::new(input[2 * j], input[2 * j + 1]);
        }
        self.half.forward(&mut self.scratch);
        let z = &self.scratch;
        let i = Complex64::new(0.0, 1.0);
        for k in 0..=m {
            let zk = z[k % m];
            let zc = z[(m - k) % m].conj();
            let even = (zk + zc) * 0.5;
            let odd = (zk - zc) / (2.0 * i);
            out[k] = even + self.post[k] * odd;
        }
    }

    /// Inverse of [`RealFft::forward`] without the `1/n` factor, i.e.
    /// `x_j = sum_k X_k e^{+2 pi i jk/n}` summed over the full Hermitian
    /// spectrum.
    pub fn inverse(&mut self, spectrum: &[Complex64], out: &mut [f64]) {
        let m = self.n / 2;
        assert_eq!(spectrum.len(), m + 1);
        assert_eq!(out.len(), self.n);
        let i = Complex64::new(0.0, 1.0);
        for k in 0..m {
            let xk = spectrum[k];
            let xc = spectrum[m - k].conj();
            let even = (xk + xc) * 0.5;
            let odd = (xk - xc) * 0.5 * self.post[k].conj();
            self.scratch[k] = even + i * odd;
        }
        self.half.inverse(&mut self.scratch);
        for (j, z) in self.scratch.iter().enumerate() {
            out[2 * j] = 2.0 * z.re;
            out[2 * j + 1] = 2.0 * z.im;
        }
    }
}
